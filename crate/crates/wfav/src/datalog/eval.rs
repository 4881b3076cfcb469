use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::ast::*;
use super::stratify::stratify;

pub type Tuple = Vec<Value>;

/// Evaluated model: one relation per predicate mentioned by the program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    rels: BTreeMap<Arc<str>, BTreeSet<Tuple>>,
}

pub type Substitution = BTreeMap<String, Value>;

impl Database {
    pub fn relation(&self, pred: &str) -> Option<&BTreeSet<Tuple>> {
        self.rels.get(pred)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.rels.keys().map(|k| &**k)
    }

    pub fn contains(&self, f: &Fact) -> bool {
        self.rels.get(&f.pred).is_some_and(|r| r.contains(&f.args))
    }

    pub fn len(&self) -> usize {
        self.rels.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All facts, sorted by predicate then arguments.
    pub fn facts(&self) -> impl Iterator<Item = Fact> + '_ {
        self.rels.iter().flat_map(|(p, r)| {
            r.iter().map(move |args| Fact { pred: p.clone(), args: args.clone() })
        })
    }

    pub fn into_fact_set(self) -> BTreeSet<Fact> {
        self.facts().collect()
    }

    /// Substitutions for the variables of `pattern` that make it a fact of the model.
    pub fn query(&self, pattern: &Atom) -> Result<Vec<Substitution>, DatalogError> {
        let rel = self
            .rels
            .get(&pattern.pred)
            .ok_or_else(|| DatalogError::UnknownPredicate(pattern.pred.to_string()))?;
        let mut out = BTreeSet::new();
        'tuples: for t in rel {
            if t.len() != pattern.terms.len() {
                continue;
            }
            let mut s = Substitution::new();
            for (term, v) in pattern.terms.iter().zip(t) {
                match term {
                    Term::Const(c) if c != v => continue 'tuples,
                    Term::Const(_) => {}
                    Term::Var(name) => match s.get(&**name) {
                        Some(prev) if prev != v => continue 'tuples,
                        Some(_) => {}
                        None => {
                            s.insert(name.to_string(), v.clone());
                        }
                    },
                }
            }
            out.insert(s);
        }
        Ok(out.into_iter().collect())
    }
}

#[derive(Clone, Debug)]
enum CTerm {
    Const(Value),
    Var(usize),
}

#[derive(Clone, Debug)]
struct CAtom {
    pred: Arc<str>,
    terms: Vec<CTerm>,
}

#[derive(Clone, Debug)]
enum Step {
    Scan(usize),
    Absent(CAtom),
    Cmp(Builtin, CTerm, CTerm, bool),
}

#[derive(Clone, Debug)]
struct CRule {
    head: CAtom,
    pos: Vec<CAtom>,
    plan: Vec<Step>,
    nvars: usize,
}

#[derive(Default)]
struct Slots(HashMap<Arc<str>, usize>);

impl Slots {
    fn term(&mut self, t: &Term) -> CTerm {
        match t {
            Term::Const(v) => CTerm::Const(v.clone()),
            Term::Var(name) => {
                let n = self.0.len();
                CTerm::Var(*self.0.entry(name.clone()).or_insert(n))
            }
        }
    }

    fn atom(&mut self, a: &Atom) -> CAtom {
        CAtom { pred: a.pred.clone(), terms: a.terms.iter().map(|t| self.term(t)).collect() }
    }
}

fn term_vars(ts: &[&CTerm]) -> Vec<usize> {
    ts.iter()
        .filter_map(|t| match t {
            CTerm::Var(v) => Some(*v),
            CTerm::Const(_) => None,
        })
        .collect()
}

/// Positive atoms are joined left to right as written; each filter runs as
/// soon as all of its variables are bound.
fn compile(r: &Rule) -> CRule {
    let mut slots = Slots::default();
    let mut pos = Vec::new();
    for l in &r.body {
        if let Literal::Atom { atom, negated: false } = l {
            pos.push(slots.atom(atom));
        }
    }
    let mut filters: Vec<Option<(Step, Vec<usize>)>> = Vec::new();
    for l in &r.body {
        match l {
            Literal::Atom { negated: false, .. } => {}
            Literal::Atom { atom, negated: true } => {
                let a = slots.atom(atom);
                let vars = term_vars(&a.terms.iter().collect::<Vec<_>>());
                filters.push(Some((Step::Absent(a), vars)));
            }
            Literal::Cmp { op, lhs, rhs, negated } => {
                let (l, r) = (slots.term(lhs), slots.term(rhs));
                let vars = term_vars(&[&l, &r]);
                filters.push(Some((Step::Cmp(*op, l, r, *negated), vars)));
            }
        }
    }
    let head = slots.atom(&r.head);
    let mut bound = vec![false; slots.0.len()];
    let mut plan = Vec::new();
    let place = |bound: &[bool], plan: &mut Vec<Step>, filters: &mut Vec<Option<(Step, Vec<usize>)>>| {
        for f in filters.iter_mut() {
            if f.as_ref().is_some_and(|(_, vs)| vs.iter().all(|v| bound[*v])) {
                plan.push(f.take().unwrap().0);
            }
        }
    };
    place(&bound, &mut plan, &mut filters);
    for (i, a) in pos.iter().enumerate() {
        plan.push(Step::Scan(i));
        for v in term_vars(&a.terms.iter().collect::<Vec<_>>()) {
            bound[v] = true;
        }
        place(&bound, &mut plan, &mut filters);
    }
    debug_assert!(filters.iter().all(Option::is_none), "rule not range-restricted");
    CRule { head, pos, plan, nvars: slots.0.len() }
}

type Relations = BTreeMap<Arc<str>, BTreeSet<Tuple>>;
type Index = HashMap<Tuple, Vec<Tuple>>;

/// Hash indexes over the current relations, keyed by bound argument positions.
struct Indexes<'a> {
    full: &'a Relations,
    delta: &'a Relations,
    cache: RefCell<HashMap<(Arc<str>, Vec<usize>, bool), std::rc::Rc<Index>>>,
}

impl<'a> Indexes<'a> {
    fn get(&self, pred: &Arc<str>, cols: &[usize], delta: bool) -> std::rc::Rc<Index> {
        let key = (pred.clone(), cols.to_vec(), delta);
        if let Some(ix) = self.cache.borrow().get(&key) {
            return ix.clone();
        }
        let src = if delta { self.delta } else { self.full };
        let mut ix: Index = HashMap::new();
        if let Some(rel) = src.get(pred) {
            for t in rel {
                let k: Tuple = cols.iter().map(|c| t[*c].clone()).collect();
                ix.entry(k).or_default().push(t.clone());
            }
        }
        let ix = std::rc::Rc::new(ix);
        self.cache.borrow_mut().insert(key, ix.clone());
        ix
    }
}

fn value<'v>(t: &'v CTerm, s: &'v [Option<Value>]) -> Option<&'v Value> {
    match t {
        CTerm::Const(v) => Some(v),
        CTerm::Var(i) => s[*i].as_ref(),
    }
}

fn ground(a: &CAtom, s: &[Option<Value>]) -> Tuple {
    a.terms.iter().map(|t| value(t, s).expect("bound").clone()).collect()
}

fn join(
    r: &CRule,
    step: usize,
    delta_at: Option<usize>,
    s: &mut Vec<Option<Value>>,
    ix: &Indexes,
    out: &mut BTreeSet<Tuple>,
) {
    let Some(st) = r.plan.get(step) else {
        out.insert(ground(&r.head, s));
        return;
    };
    match st {
        Step::Absent(a) => {
            let t = ground(a, s);
            if !ix.full.get(&a.pred).is_some_and(|rel| rel.contains(&t)) {
                join(r, step + 1, delta_at, s, ix, out);
            }
        }
        Step::Cmp(op, l, rr, negated) => {
            let ok = op.holds(value(l, s).unwrap(), value(rr, s).unwrap());
            if ok != *negated {
                join(r, step + 1, delta_at, s, ix, out);
            }
        }
        Step::Scan(i) => {
            let a = &r.pos[*i];
            let cols: Vec<usize> =
                (0..a.terms.len()).filter(|c| value(&a.terms[*c], s).is_some()).collect();
            let key: Tuple = cols.iter().map(|c| value(&a.terms[*c], s).unwrap().clone()).collect();
            let index = ix.get(&a.pred, &cols, delta_at == Some(*i));
            let Some(rows) = index.get(&key) else { return };
            for t in rows {
                let mut newly = Vec::new();
                let mut ok = true;
                for (c, term) in a.terms.iter().enumerate() {
                    if let CTerm::Var(v) = term {
                        match &s[*v] {
                            Some(x) if *x != t[c] => {
                                ok = false;
                                break;
                            }
                            Some(_) => {}
                            None => {
                                s[*v] = Some(t[c].clone());
                                newly.push(*v);
                            }
                        }
                    }
                }
                if ok {
                    join(r, step + 1, delta_at, s, ix, out);
                }
                for v in newly {
                    s[v] = None;
                }
            }
        }
    }
}

fn fire(r: &CRule, delta_at: Option<usize>, full: &Relations, delta: &Relations) -> BTreeSet<Tuple> {
    let ix = Indexes { full, delta, cache: RefCell::new(HashMap::new()) };
    let mut out = BTreeSet::new();
    let mut s = vec![None; r.nvars];
    join(r, 0, delta_at, &mut s, &ix, &mut out);
    out
}

/// Perfect model of a stratified program, computed semi-naively per stratum.
pub fn evaluate(p: &Program) -> Result<Database, DatalogError> {
    let strata = stratify(p)?;
    let mut full: Relations = BTreeMap::new();
    for pred in p.arities()?.into_keys() {
        full.insert(pred, BTreeSet::new());
    }
    for f in &p.edb {
        full.get_mut(&f.pred).unwrap().insert(f.args.clone());
    }
    for stratum in &strata {
        let rules: Vec<CRule> = stratum.rules.iter().map(|i| compile(&p.rules[*i])).collect();
        let recursive: Vec<Vec<usize>> = rules
            .iter()
            .map(|r| {
                (0..r.pos.len()).filter(|i| stratum.preds.contains(&r.pos[*i].pred)).collect()
            })
            .collect();
        let empty = Relations::new();
        let mut delta = Relations::new();
        for r in &rules {
            for t in fire(r, None, &full, &empty) {
                if !full[&r.head.pred].contains(&t) {
                    delta.entry(r.head.pred.clone()).or_default().insert(t);
                }
            }
        }
        while !delta.is_empty() {
            for (pred, ts) in &delta {
                full.get_mut(pred).unwrap().extend(ts.iter().cloned());
            }
            let mut next = Relations::new();
            for (r, rec) in rules.iter().zip(&recursive) {
                for &i in rec {
                    if !delta.contains_key(&r.pos[i].pred) {
                        continue;
                    }
                    for t in fire(r, Some(i), &full, &delta) {
                        if !full[&r.head.pred].contains(&t) {
                            next.entry(r.head.pred.clone()).or_default().insert(t);
                        }
                    }
                }
            }
            delta = next;
        }
    }
    Ok(Database { rels: full })
}
