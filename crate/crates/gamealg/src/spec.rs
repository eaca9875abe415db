//! Recursive specifications and their classification.
//!
//! A specification is a finite ordered set of equations `X = body`. Linear
//! specifications have bodies that are choices of summands, each summand a
//! bundle of literals optionally followed by a recursion variable. Guarded
//! linear specifications additionally have no cycle of idle-only summands.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::{AtomId, GameTerm, Player, SpecId, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("unbound recursion variable `{0}` in spec `{1}`")]
    UnboundVar(VarId, SpecId),
}

/// A recursive specification: named, with equations in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecSpec {
    pub id: SpecId,
    pub equations: Vec<(VarId, GameTerm)>,
}

impl RecSpec {
    pub fn body(&self, var: &VarId) -> Option<&GameTerm> {
        self.equations.iter().find(|(v, _)| v == var).map(|(_, b)| b)
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarId> {
        self.equations.iter().map(|(v, _)| v)
    }

    /// First variable of the spec, the conventional root.
    pub fn head(&self) -> &VarId {
        &self.equations[0].0
    }
}

impl fmt::Display for RecSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "spec {} {{", self.id)?;
        for (v, body) in &self.equations {
            writeln!(f, "  {v} = {body} ;")?;
        }
        write!(f, "}}")
    }
}

/// A collection of specifications, looked up by name when building
/// transition systems.
#[derive(Clone, Debug, Default)]
pub struct SpecEnv {
    specs: BTreeMap<SpecId, RecSpec>,
}

impl SpecEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of(spec: RecSpec) -> Self {
        let mut env = Self::new();
        env.insert(spec);
        env
    }

    pub fn insert(&mut self, spec: RecSpec) {
        self.specs.insert(spec.id.clone(), spec);
    }

    pub fn get(&self, id: &SpecId) -> Option<&RecSpec> {
        self.specs.get(id)
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RecSpec> {
        self.specs.values()
    }
}

/// A move inside a linear summand: an atom played by one of the players, or
/// the idle game.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Idle,
    Atom(AtomId, Player),
}

impl Literal {
    pub fn is_idle(&self) -> bool {
        matches!(self, Literal::Idle)
    }

    /// The term form of the literal.
    pub fn to_term(&self) -> GameTerm {
        match self {
            Literal::Idle => GameTerm::Idle,
            Literal::Atom(a, Player::One) => GameTerm::Atom(a.clone()),
            Literal::Atom(a, Player::Two) => GameTerm::dual(GameTerm::Atom(a.clone())),
        }
    }

    /// Read a literal off a term, if it is one.
    pub fn from_term(t: &GameTerm) -> Option<Literal> {
        match t {
            GameTerm::Idle => Some(Literal::Idle),
            GameTerm::Atom(a) => Some(Literal::Atom(a.clone(), Player::One)),
            GameTerm::Dual(inner) => match &**inner {
                GameTerm::Atom(a) => Some(Literal::Atom(a.clone(), Player::Two)),
                GameTerm::Idle => Some(Literal::Idle),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// One summand of a linear body: a nonempty bundle of moves, then either a
/// recursion variable or termination.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Summand {
    pub moves: Vec<Literal>,
    pub target: Option<VarId>,
}

impl Summand {
    /// All moves are idle: the summand contributes a silent transition.
    pub fn is_all_idle(&self) -> bool {
        self.moves.iter().all(Literal::is_idle)
    }

    /// The term form of the summand inside the given spec.
    pub fn to_term(&self, spec: &SpecId) -> GameTerm {
        let bundle = GameTerm::par_of(self.moves.iter().map(Literal::to_term).collect());
        match &self.target {
            Some(v) => GameTerm::comp(bundle, GameTerm::rec(v.clone(), spec.clone())),
            None => bundle,
        }
    }
}

/// The extracted shape of a linear equation: summands joined by one choice
/// flavor. A single summand is a degenerate join and defaults to player one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearBody {
    pub flavor: Player,
    pub summands: Vec<Summand>,
}

impl LinearBody {
    pub fn to_term(&self, spec: &SpecId) -> GameTerm {
        GameTerm::choice_of(self.flavor, self.summands.iter().map(|s| s.to_term(spec)).collect())
    }
}

/// Result of classifying a specification.
#[derive(Clone, Debug)]
pub struct Classification {
    pub is_linear: bool,
    /// Per-variable extraction; `None` where the body is not linear.
    pub linear_bodies: BTreeMap<VarId, Option<LinearBody>>,
    pub is_guarded: bool,
}

fn extract_bundle(t: &GameTerm) -> Option<Vec<Literal>> {
    t.par_factors().iter().map(|f| Literal::from_term(f)).collect()
}

fn extract_summand(t: &GameTerm, spec: &RecSpec) -> Option<Summand> {
    match t {
        GameTerm::Comp(l, r) => {
            let moves = extract_bundle(l)?;
            match &**r {
                GameTerm::RecRef(v, s) if *s == spec.id && spec.body(v).is_some() => {
                    Some(Summand { moves, target: Some(v.clone()) })
                }
                _ => None,
            }
        }
        _ => extract_bundle(t).map(|moves| Summand { moves, target: None }),
    }
}

fn extract_linear_body(body: &GameTerm, spec: &RecSpec) -> Option<LinearBody> {
    let (flavor, parts) = match body {
        GameTerm::Choice(p, _, _) => (*p, body.summands(*p)),
        _ => (Player::One, vec![body]),
    };
    let summands: Option<Vec<Summand>> =
        parts.iter().map(|part| extract_summand(part, spec)).collect();
    Some(LinearBody { flavor, summands: summands? })
}

/// Does every occurrence of a recursion variable sit behind a variable-free
/// composition guard? The head-guard criterion for non-linear specs.
fn head_guarded(t: &GameTerm, guarded: bool) -> bool {
    match t {
        GameTerm::RecRef(..) => guarded,
        GameTerm::Idle | GameTerm::Atom(_) => true,
        GameTerm::Dual(inner) | GameTerm::Abs(_, inner) => head_guarded(inner, guarded),
        GameTerm::Choice(_, l, r) | GameTerm::Par(l, r) => {
            head_guarded(l, guarded) && head_guarded(r, guarded)
        }
        GameTerm::Comp(l, r) => {
            let guard_is_closed = !l.contains_rec();
            head_guarded(l, guarded) && head_guarded(r, guarded || guard_is_closed)
        }
    }
}

/// Search for a cycle among variables connected by all-idle summands.
fn has_idle_cycle(edges: &BTreeMap<VarId, BTreeSet<VarId>>) -> bool {
    // Iterative DFS with colors over a graph of at most a handful of nodes.
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color: BTreeMap<&VarId, Color> = edges.keys().map(|v| (v, Color::White)).collect();
    fn visit<'a>(
        v: &'a VarId,
        edges: &'a BTreeMap<VarId, BTreeSet<VarId>>,
        color: &mut BTreeMap<&'a VarId, Color>,
    ) -> bool {
        color.insert(v, Color::Grey);
        for w in edges.get(v).into_iter().flatten() {
            match color.get(w).copied().unwrap_or(Color::Black) {
                Color::Grey => return true,
                Color::White => {
                    if visit(w, edges, color) {
                        return true;
                    }
                }
                Color::Black => {}
            }
        }
        color.insert(v, Color::Black);
        false
    }
    let vars: Vec<&VarId> = edges.keys().collect();
    for v in vars {
        if color[v] == Color::White && visit(v, edges, &mut color) {
            return true;
        }
    }
    false
}

/// Classify a specification: linearity by shape, guardedness by idle-cycle
/// search for linear specs and by the head-guard criterion otherwise.
pub fn classify_spec(spec: &RecSpec) -> Result<Classification, SpecError> {
    // Reject unbound own-variable references up front.
    for (_, rhs) in &spec.equations {
        let mut unbound = None;
        rhs.any(&mut |t| {
            if let GameTerm::RecRef(v, s) = t {
                if *s == spec.id && spec.body(v).is_none() && unbound.is_none() {
                    unbound = Some(v.clone());
                }
            }
            false
        });
        if let Some(v) = unbound {
            return Err(SpecError::UnboundVar(v, spec.id.clone()));
        }
    }

    let mut linear_bodies = BTreeMap::new();
    let mut is_linear = true;
    for (v, body) in &spec.equations {
        let extracted = extract_linear_body(body, spec);
        is_linear &= extracted.is_some();
        linear_bodies.insert(v.clone(), extracted);
    }

    let is_guarded = if is_linear {
        let mut edges: BTreeMap<VarId, BTreeSet<VarId>> = BTreeMap::new();
        for (v, _) in &spec.equations {
            let body = linear_bodies[v].as_ref().expect("linear spec has all bodies");
            let targets: BTreeSet<VarId> = body
                .summands
                .iter()
                .filter(|s| s.is_all_idle())
                .filter_map(|s| s.target.clone())
                .collect();
            edges.insert(v.clone(), targets);
        }
        !has_idle_cycle(&edges)
    } else {
        spec.equations.iter().all(|(_, body)| head_guarded(body, false))
    };

    Ok(Classification { is_linear, linear_bodies, is_guarded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_specs;
    use crate::term::SpecId;

    fn spec(text: &str) -> RecSpec {
        let env = parse_specs(text).unwrap();
        let first = env.iter().next().unwrap().clone();
        first
    }

    #[test]
    fn idle_self_loop_is_linear_but_unguarded() {
        let c = classify_spec(&spec("spec E { X = iota . X ; }")).unwrap();
        assert!(c.is_linear);
        assert!(!c.is_guarded);
    }

    #[test]
    fn plain_two_variable_spec_is_guarded() {
        let c = classify_spec(&spec("spec E { X = a . Y + c ; Y = b . X + d ; }")).unwrap();
        assert!(c.is_linear);
        assert!(c.is_guarded);
        let body = c.linear_bodies[&VarId::new("X").unwrap()].as_ref().unwrap();
        assert_eq!(body.flavor, Player::One);
        assert_eq!(body.summands.len(), 2);
    }

    #[test]
    fn idle_cycle_through_two_variables_detected() {
        let c = classify_spec(&spec("spec E { X = iota . Y + a ; Y = iota . X ; }")).unwrap();
        assert!(c.is_linear);
        assert!(!c.is_guarded);
    }

    #[test]
    fn mixed_idle_bundle_is_not_an_idle_edge() {
        let c = classify_spec(&spec("spec E { X = (iota || a) . X ; }")).unwrap();
        assert!(c.is_linear);
        assert!(c.is_guarded);
    }

    #[test]
    fn nonlinear_bodies_fall_back_to_head_guard() {
        let c = classify_spec(&spec("spec E { X = a . (X . b) ; }")).unwrap();
        assert!(!c.is_linear);
        assert!(c.is_guarded);
        let c = classify_spec(&spec("spec E { X = X . a + b ; }")).unwrap();
        assert!(!c.is_linear);
        assert!(!c.is_guarded);
    }

    #[test]
    fn choice_flavor_two_bodies_extract() {
        let c = classify_spec(&spec("spec E { X = a^d . X & b^d ; }")).unwrap();
        assert!(c.is_linear);
        let body = c.linear_bodies[&VarId::new("X").unwrap()].as_ref().unwrap();
        assert_eq!(body.flavor, Player::Two);
        assert_eq!(body.summands[0].moves, vec![Literal::Atom(AtomId::new("a").unwrap(), Player::Two)]);
    }

    #[test]
    fn cross_spec_reference_is_not_linear() {
        let env = parse_specs("spec E { X = a . <Y|F> ; }").unwrap();
        let e = env.get(&SpecId::new("E").unwrap()).unwrap();
        let c = classify_spec(e).unwrap();
        assert!(!c.is_linear);
    }

    #[test]
    fn summand_to_term_roundtrip() {
        let s = spec("spec E { X = (a || b^d) . X + iota ; }");
        let c = classify_spec(&s).unwrap();
        let body = c.linear_bodies[&VarId::new("X").unwrap()].as_ref().unwrap();
        let rebuilt = body.to_term(&s.id);
        let c2 = extract_linear_body(&rebuilt, &s).unwrap();
        assert_eq!(body, &c2);
    }
}
