//! Information-quality analysis over goal models.
//!
//! Seven dimensions are evaluated per (goal, information) usage. Each verdict
//! lists the facets that failed and the model elements that explain the
//! failure. The primary evaluation runs the bundled Datalog axioms; an
//! independent procedural evaluation is kept alongside for cross-checking.

mod chain;
mod direct;
mod facts;
mod rules;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datalog::DatalogError;
use crate::model::{DelegationCycle, GoalModel, Id};

pub use chain::{provenance_chain, ChainEvent, ChainOp, ProvenanceChain};
pub use direct::analyze_direct;
pub use facts::extract_facts;
pub use rules::{analyze_datalog, axiom_program, evaluate_axioms, AXIOMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Accessibility,
    Accuracy,
    Believability,
    Trustworthiness,
    Completeness,
    Timeliness,
    Consistency,
}

impl Dimension {
    pub const ALL: [Dimension; 7] = [
        Dimension::Accessibility,
        Dimension::Accuracy,
        Dimension::Believability,
        Dimension::Trustworthiness,
        Dimension::Completeness,
        Dimension::Timeliness,
        Dimension::Consistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Accessibility => "accessibility",
            Dimension::Accuracy => "accuracy",
            Dimension::Believability => "believability",
            Dimension::Trustworthiness => "trustworthiness",
            Dimension::Completeness => "completeness",
            Dimension::Timeliness => "timeliness",
            Dimension::Consistency => "consistency",
        }
    }

    pub fn from_name(s: &str) -> Option<Dimension> {
        Dimension::ALL.into_iter().find(|d| d.name() == s)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single checkable condition within a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Facet {
    Availability,
    Permission,
    ProduceCheck,
    ReadCheck,
    SourceTrust,
    ProvisionTrust,
    ValueCompleteness,
    PurposeCompleteness,
    ReadTimeliness,
    SendTimeliness,
    ReaderConsistency,
    ProductionAccuracy,
    ReadAccuracy,
}

impl Facet {
    pub const ALL: [Facet; 13] = [
        Facet::Availability,
        Facet::Permission,
        Facet::ProduceCheck,
        Facet::ReadCheck,
        Facet::SourceTrust,
        Facet::ProvisionTrust,
        Facet::ValueCompleteness,
        Facet::PurposeCompleteness,
        Facet::ReadTimeliness,
        Facet::SendTimeliness,
        Facet::ReaderConsistency,
        Facet::ProductionAccuracy,
        Facet::ReadAccuracy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Facet::Availability => "availability",
            Facet::Permission => "permission",
            Facet::ProduceCheck => "produce_check",
            Facet::ReadCheck => "read_check",
            Facet::SourceTrust => "source_trust",
            Facet::ProvisionTrust => "provision_trust",
            Facet::ValueCompleteness => "value_completeness",
            Facet::PurposeCompleteness => "purpose_completeness",
            Facet::ReadTimeliness => "read_timeliness",
            Facet::SendTimeliness => "send_timeliness",
            Facet::ReaderConsistency => "reader_consistency",
            Facet::ProductionAccuracy => "production_accuracy",
            Facet::ReadAccuracy => "read_accuracy",
        }
    }

    pub fn from_name(s: &str) -> Option<Facet> {
        Facet::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Facet::Availability | Facet::Permission => Dimension::Accessibility,
            Facet::ProduceCheck | Facet::ReadCheck => Dimension::Believability,
            Facet::SourceTrust | Facet::ProvisionTrust => Dimension::Trustworthiness,
            Facet::ValueCompleteness | Facet::PurposeCompleteness => Dimension::Completeness,
            Facet::ReadTimeliness | Facet::SendTimeliness => Dimension::Timeliness,
            Facet::ReaderConsistency => Dimension::Consistency,
            Facet::ProductionAccuracy | Facet::ReadAccuracy => Dimension::Accuracy,
        }
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IqVerdict {
    pub goal: Id,
    pub info: Id,
    pub dimension: Dimension,
    pub satisfied: bool,
    /// Failed facets, sorted.
    pub failed: Vec<Facet>,
    /// Elements explaining the failures, sorted and deduplicated.
    pub witness: Vec<Id>,
}

impl IqVerdict {
    pub fn has_failed(&self, f: Facet) -> bool {
        self.failed.contains(&f)
    }
}

impl fmt::Display for IqVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: ", self.goal, self.info, self.dimension)?;
        if self.satisfied {
            return f.write_str("ok");
        }
        let facets: Vec<&str> = self.failed.iter().map(|x| x.name()).collect();
        write!(f, "FAILED {} [{}]", facets.join(","), self.witness.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IqError {
    #[error("inconsistent timestamps: {}", .0.iter().map(|(g, i)| format!("{g} reads {i} before it is produced or sent")).collect::<Vec<_>>().join("; "))]
    InconsistentTimestamps(Vec<(Id, Id)>),
    #[error(transparent)]
    Delegation(#[from] DelegationCycle),
    #[error("axiom evaluation failed: {0}")]
    Datalog(#[from] DatalogError),
}

/// All verdicts, ordered by (goal, info, dimension).
pub fn analyze_all(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    analyze_datalog(model)
}

fn only(model: &GoalModel, d: Dimension) -> Result<Vec<IqVerdict>, IqError> {
    Ok(analyze_all(model)?.into_iter().filter(|v| v.dimension == d).collect())
}

pub fn check_accessibility(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    only(model, Dimension::Accessibility)
}

pub fn check_believability(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    only(model, Dimension::Believability)
}

pub fn check_trustworthiness(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    only(model, Dimension::Trustworthiness)
}

pub fn check_accuracy(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    only(model, Dimension::Accuracy)
}

pub fn check_completeness(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    only(model, Dimension::Completeness)
}

pub fn check_timeliness(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    only(model, Dimension::Timeliness)
}

pub fn check_consistency(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    only(model, Dimension::Consistency)
}
