use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Id;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyId {
    M1,
    M2,
    M3,
    M4,
    M5,
    C1,
    C2,
    C3,
    C4,
    C5,
    I1,
    I2,
    I3,
    I4,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Mapping,
    ControlFlow,
    InformationFlow,
    Iq,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Mapping => "mapping",
            Category::ControlFlow => "control-flow",
            Category::InformationFlow => "information-flow",
            Category::Iq => "iq",
        }
    }
}

impl PropertyId {
    pub const ALL: [PropertyId; 21] = {
        use PropertyId::*;
        [M1, M2, M3, M4, M5, C1, C2, C3, C4, C5, I1, I2, I3, I4, Q1, Q2, Q3, Q4, Q5, Q6, Q7]
    };

    pub fn category(self) -> Category {
        use PropertyId::*;
        match self {
            M1 | M2 | M3 | M4 | M5 => Category::Mapping,
            C1 | C2 | C3 | C4 | C5 => Category::ControlFlow,
            I1 | I2 | I3 | I4 => Category::InformationFlow,
            Q1 | Q2 | Q3 | Q4 | Q5 | Q6 | Q7 => Category::Iq,
        }
    }

    pub fn name(self) -> &'static str {
        use PropertyId::*;
        match self {
            M1 => "M1",
            M2 => "M2",
            M3 => "M3",
            M4 => "M4",
            M5 => "M5",
            C1 => "C1",
            C2 => "C2",
            C3 => "C3",
            C4 => "C4",
            C5 => "C5",
            I1 => "I1",
            I2 => "I2",
            I3 => "I3",
            I4 => "I4",
            Q1 => "Q1",
            Q2 => "Q2",
            Q3 => "Q3",
            Q4 => "Q4",
            Q5 => "Q5",
            Q6 => "Q6",
            Q7 => "Q7",
        }
    }

    pub fn from_name(s: &str) -> Option<PropertyId> {
        PropertyId::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn description(self) -> &'static str {
        use PropertyId::*;
        match self {
            M1 => "every leaf goal maps to exactly one transition",
            M2 => "no non-leaf goal maps directly",
            M3 => "every mapped block is complete and well placed",
            M4 => "information appears only with its producer present",
            M5 => "transition res equals the delegation-resolved actor",
            C1 => "structurally valid WF-net",
            C2 => "place/transition alternation",
            C3 => "option to complete",
            C4 => "proper completion",
            C5 => "no dead transitions",
            I1 => "no read or send before production",
            I2 => "every send destination has a provision",
            I3 => "modify after production with Modify permission",
            I4 => "sequencing respects data dependencies",
            Q1 => "accessibility",
            Q2 => "believability of required reads",
            Q3 => "source trustworthiness",
            Q4 => "provision trustworthiness",
            Q5 => "completeness",
            Q6 => "timeliness",
            Q7 => "interdependent-reader consistency",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A failed property tied to the elements that break it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub property: PropertyId,
    pub category: Category,
    pub elements: Vec<Id>,
    pub message: String,
    /// Firing sequence leading to the offending configuration.
    pub witness: Option<Vec<Id>>,
}

impl Violation {
    pub fn new(property: PropertyId, elements: Vec<Id>, message: impl Into<String>) -> Self {
        Violation {
            property,
            category: property.category(),
            elements,
            message: message.into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Vec<Id>) -> Self {
        self.witness = Some(w);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.property, self.category.name())?;
        for e in &self.elements {
            write!(f, " {e}")?;
        }
        write!(f, ": {}", self.message)?;
        if let Some(w) = &self.witness {
            if w.is_empty() {
                f.write_str(" [initially]")?;
            } else {
                write!(f, " [after: {}]", w.join(" "))?;
            }
        }
        Ok(())
    }
}
