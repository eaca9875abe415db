//! Game terms: abstract syntax, the canonical term order, AC-canonical forms,
//! and structural predicates.
//!
//! Terms are built from atomic games, the idle game `iota`, dualization `^d`,
//! the two choice operators (`+` for the first player, `&` for the second),
//! sequential composition `.`, synchronous parallel `||`, the abstraction
//! operator `abs{..}(..)`, and references `<X|E>` into recursive
//! specifications.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Reserved word for the idle game in the concrete syntax.
pub const IDLE_KEYWORD: &str = "iota";

/// Reserved words that cannot be used as atom, variable, or spec names.
pub const RESERVED: &[&str] = &["iota", "abs", "spec"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid name `{name}`: {reason}")]
pub struct InvalidName {
    pub name: String,
    pub reason: &'static str,
}

/// Name of an atomic game.
///
/// Nonempty, starts with a lowercase letter, and is never a reserved word:
/// the idle game is a dedicated constructor, not an atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(String);

impl AtomId {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidName> {
        let name = name.into();
        let ok_start = name.chars().next().is_some_and(|c| c.is_ascii_lowercase());
        if !ok_start {
            return Err(InvalidName { name, reason: "atoms start with a lowercase letter" });
        }
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(InvalidName { name, reason: "atoms are alphanumeric identifiers" });
        }
        if RESERVED.contains(&name.as_str()) {
            return Err(InvalidName { name, reason: "reserved word" });
        }
        Ok(AtomId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Name of a recursion variable. Starts with an uppercase letter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(String);

impl VarId {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidName> {
        let name = name.into();
        let ok_start = name.chars().next().is_some_and(|c| c.is_ascii_uppercase());
        if !ok_start {
            return Err(InvalidName { name, reason: "variables start with an uppercase letter" });
        }
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(InvalidName { name, reason: "variables are alphanumeric identifiers" });
        }
        Ok(VarId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Name of a recursive specification.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpecId(String);

impl SpecId {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidName> {
        let name = name.into();
        let ok_start = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        if !ok_start || RESERVED.contains(&name.as_str()) {
            return Err(InvalidName { name, reason: "spec names are alphabetic identifiers" });
        }
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(InvalidName { name, reason: "spec names are alphanumeric identifiers" });
        }
        Ok(SpecId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One of the two players. Undualized atoms move for player one; `a^d` is the
/// player-two literal of the atom `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn index(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Which algebra a closed term is meant to live in. `Bag` excludes parallel
/// composition; `Acg` allows it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    Bag,
    Acg,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::Bag => f.write_str("BAG"),
            System::Acg => f.write_str("ACG"),
        }
    }
}

/// A game term.
///
/// The variant order here is the canonical total order used by
/// [`GameTerm::ac_canonicalize`]: `Idle < Atom < Dual < Choice(1) < Choice(2)
/// < Comp < Par < Abs < RecRef`, recursively lexicographic (which is exactly
/// the derived [`Ord`]).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GameTerm {
    /// The idle game `iota`.
    Idle,
    /// An atomic game.
    Atom(AtomId),
    /// Dualization: swap the roles of the two players.
    Dual(Box<GameTerm>),
    /// Choice of the given player: `+` for player one, `&` for player two.
    Choice(Player, Box<GameTerm>, Box<GameTerm>),
    /// Sequential composition `.`.
    Comp(Box<GameTerm>, Box<GameTerm>),
    /// Synchronous parallel composition `||`.
    Par(Box<GameTerm>, Box<GameTerm>),
    /// Abstraction `abs{..}(..)`: renames the atoms in the hide set to idle.
    Abs(BTreeSet<AtomId>, Box<GameTerm>),
    /// Reference `<X|E>` to a variable of a recursive specification.
    RecRef(VarId, SpecId),
}

impl GameTerm {
    pub fn atom(id: AtomId) -> Self {
        GameTerm::Atom(id)
    }

    pub fn dual(t: GameTerm) -> Self {
        GameTerm::Dual(Box::new(t))
    }

    pub fn choice(player: Player, l: GameTerm, r: GameTerm) -> Self {
        GameTerm::Choice(player, Box::new(l), Box::new(r))
    }

    pub fn join(l: GameTerm, r: GameTerm) -> Self {
        Self::choice(Player::One, l, r)
    }

    pub fn meet(l: GameTerm, r: GameTerm) -> Self {
        Self::choice(Player::Two, l, r)
    }

    pub fn comp(l: GameTerm, r: GameTerm) -> Self {
        GameTerm::Comp(Box::new(l), Box::new(r))
    }

    pub fn par(l: GameTerm, r: GameTerm) -> Self {
        GameTerm::Par(Box::new(l), Box::new(r))
    }

    pub fn abs(hide: BTreeSet<AtomId>, t: GameTerm) -> Self {
        GameTerm::Abs(hide, Box::new(t))
    }

    pub fn rec(var: VarId, spec: SpecId) -> Self {
        GameTerm::RecRef(var, spec)
    }

    /// Rebuild a choice of the given flavor from a nonempty summand list,
    /// producing the left-nested spine `((s1 + s2) + s3) ...`.
    pub fn choice_of(player: Player, summands: Vec<GameTerm>) -> GameTerm {
        let mut it = summands.into_iter();
        let first = it.next().expect("choice_of: empty summand list");
        it.fold(first, |acc, s| GameTerm::choice(player, acc, s))
    }

    /// Rebuild a right-nested parallel bundle from a nonempty factor list.
    pub fn par_of(factors: Vec<GameTerm>) -> GameTerm {
        let mut it = factors.into_iter().rev();
        let last = it.next().expect("par_of: empty factor list");
        it.fold(last, |acc, s| GameTerm::par(s, acc))
    }

    /// Flatten the maximal same-flavor choice spine rooted at this node.
    pub fn summands(&self, player: Player) -> Vec<&GameTerm> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a GameTerm, player: Player, out: &mut Vec<&'a GameTerm>) {
            match t {
                GameTerm::Choice(p, l, r) if *p == player => {
                    walk(l, player, out);
                    walk(r, player, out);
                }
                _ => out.push(t),
            }
        }
        walk(self, player, &mut out);
        out
    }

    /// Flatten a parallel bundle into its factors, left to right.
    pub fn par_factors(&self) -> Vec<&GameTerm> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a GameTerm, out: &mut Vec<&'a GameTerm>) {
            match t {
                GameTerm::Par(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                _ => out.push(t),
            }
        }
        walk(self, &mut out);
        out
    }

    /// A literal: an atom, a dualized atom, the idle game, or its dual.
    pub fn is_literal(&self) -> bool {
        match self {
            GameTerm::Atom(_) | GameTerm::Idle => true,
            GameTerm::Dual(inner) => matches!(**inner, GameTerm::Atom(_) | GameTerm::Idle),
            _ => false,
        }
    }

    /// A parallel bundle of literals (a single literal counts).
    pub fn is_bundle(&self) -> bool {
        match self {
            GameTerm::Par(l, r) => l.is_bundle() && r.is_bundle(),
            t => t.is_literal(),
        }
    }

    /// Basic terms. For `Bag`, composition guards must be literals; `Acg`
    /// additionally admits parallel composition and bundle guards.
    pub fn is_basic(&self, system: System) -> bool {
        match self {
            t if t.is_literal() => true,
            GameTerm::Choice(_, l, r) => l.is_basic(system) && r.is_basic(system),
            GameTerm::Comp(l, r) => {
                let guard_ok = match system {
                    System::Bag => l.is_literal(),
                    System::Acg => l.is_bundle(),
                };
                guard_ok && r.is_basic(system)
            }
            GameTerm::Par(l, r) => system == System::Acg && l.is_basic(system) && r.is_basic(system),
            _ => false,
        }
    }

    pub fn contains_par(&self) -> bool {
        self.any(&mut |t| matches!(t, GameTerm::Par(..)))
    }

    pub fn contains_abs(&self) -> bool {
        self.any(&mut |t| matches!(t, GameTerm::Abs(..)))
    }

    pub fn contains_rec(&self) -> bool {
        self.any(&mut |t| matches!(t, GameTerm::RecRef(..)))
    }

    pub fn any(&self, pred: &mut dyn FnMut(&GameTerm) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            GameTerm::Idle | GameTerm::Atom(_) | GameTerm::RecRef(..) => false,
            GameTerm::Dual(t) | GameTerm::Abs(_, t) => t.any(pred),
            GameTerm::Choice(_, l, r) | GameTerm::Comp(l, r) | GameTerm::Par(l, r) => {
                l.any(pred) || r.any(pred)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            GameTerm::Idle | GameTerm::Atom(_) | GameTerm::RecRef(..) => 1,
            GameTerm::Dual(t) | GameTerm::Abs(_, t) => 1 + t.node_count(),
            GameTerm::Choice(_, l, r) | GameTerm::Comp(l, r) | GameTerm::Par(l, r) => {
                1 + l.node_count() + r.node_count()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            GameTerm::Idle | GameTerm::Atom(_) | GameTerm::RecRef(..) => 1,
            GameTerm::Dual(t) | GameTerm::Abs(_, t) => 1 + t.depth(),
            GameTerm::Choice(_, l, r) | GameTerm::Comp(l, r) | GameTerm::Par(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    /// Multiset of atom occurrences, sorted.
    pub fn atom_multiset(&self) -> Vec<AtomId> {
        let mut out = Vec::new();
        fn walk(t: &GameTerm, out: &mut Vec<AtomId>) {
            match t {
                GameTerm::Atom(a) => out.push(a.clone()),
                GameTerm::Idle | GameTerm::RecRef(..) => {}
                GameTerm::Dual(t) | GameTerm::Abs(_, t) => walk(t, out),
                GameTerm::Choice(_, l, r) | GameTerm::Comp(l, r) | GameTerm::Par(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out.sort();
        out
    }

    /// All atoms mentioned anywhere in the term, including inside hide sets.
    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out: BTreeSet<AtomId> = self.atom_multiset().into_iter().collect();
        self.any(&mut |t| {
            if let GameTerm::Abs(hide, _) = t {
                out.extend(hide.iter().cloned());
            }
            false
        });
        out
    }

    /// AC-canonical form: nested same-flavor choices are flattened and their
    /// summands sorted under the canonical term order, then rebuilt as a
    /// left-nested spine. Everything else is canonicalized recursively but
    /// left in place. Idempotent, and AC-equal to the input.
    pub fn ac_canonicalize(&self) -> GameTerm {
        match self {
            GameTerm::Idle | GameTerm::Atom(_) | GameTerm::RecRef(..) => self.clone(),
            GameTerm::Dual(t) => GameTerm::dual(t.ac_canonicalize()),
            GameTerm::Abs(hide, t) => GameTerm::abs(hide.clone(), t.ac_canonicalize()),
            GameTerm::Comp(l, r) => GameTerm::comp(l.ac_canonicalize(), r.ac_canonicalize()),
            GameTerm::Par(l, r) => GameTerm::par(l.ac_canonicalize(), r.ac_canonicalize()),
            GameTerm::Choice(p, _, _) => {
                let mut summands: Vec<GameTerm> =
                    self.summands(*p).into_iter().map(|s| s.ac_canonicalize()).collect();
                summands.sort();
                GameTerm::choice_of(*p, summands)
            }
        }
    }

    /// Two terms are AC-equal when their canonical forms coincide.
    pub fn ac_eq(&self, other: &GameTerm) -> bool {
        self.ac_canonicalize() == other.ac_canonicalize()
    }

    /// Rename every atom in `hide` (including under duals) to the idle game.
    /// The rest of the structure is untouched.
    pub fn rename_to_idle(&self, hide: &BTreeSet<AtomId>) -> GameTerm {
        match self {
            GameTerm::Atom(a) if hide.contains(a) => GameTerm::Idle,
            GameTerm::Idle | GameTerm::Atom(_) | GameTerm::RecRef(..) => self.clone(),
            GameTerm::Dual(t) => GameTerm::dual(t.rename_to_idle(hide)),
            GameTerm::Abs(h, t) => GameTerm::abs(h.clone(), t.rename_to_idle(hide)),
            GameTerm::Choice(p, l, r) => {
                GameTerm::choice(*p, l.rename_to_idle(hide), r.rename_to_idle(hide))
            }
            GameTerm::Comp(l, r) => GameTerm::comp(l.rename_to_idle(hide), r.rename_to_idle(hide)),
            GameTerm::Par(l, r) => GameTerm::par(l.rename_to_idle(hide), r.rename_to_idle(hide)),
        }
    }
}

// Printing with minimal parentheses. Binding strength, loosest first:
// `+` (1), `&` (2), `.` (3), `||` (4), primaries and `^d` (5). All binary
// operators associate to the left; a right operand at the same level needs
// parentheses.
fn level(t: &GameTerm) -> u8 {
    match t {
        GameTerm::Choice(Player::One, ..) => 1,
        GameTerm::Choice(Player::Two, ..) => 2,
        GameTerm::Comp(..) => 3,
        GameTerm::Par(..) => 4,
        _ => 5,
    }
}

fn fmt_at(t: &GameTerm, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let lv = level(t);
    let parens = lv < min;
    if parens {
        f.write_str("(")?;
    }
    match t {
        GameTerm::Idle => f.write_str(IDLE_KEYWORD)?,
        GameTerm::Atom(a) => write!(f, "{a}")?,
        GameTerm::Dual(inner) => {
            // `^d` attaches to a primary. `a^d^d` is not in the grammar, so a
            // nested dual is parenthesized as well.
            if matches!(**inner, GameTerm::Dual(_)) {
                f.write_str("(")?;
                fmt_at(inner, 1, f)?;
                f.write_str(")")?;
            } else {
                fmt_at(inner, 5, f)?;
            }
            f.write_str("^d")?;
        }
        GameTerm::Choice(p, l, r) => {
            let op = if *p == Player::One { " + " } else { " & " };
            fmt_at(l, lv, f)?;
            f.write_str(op)?;
            fmt_at(r, lv + 1, f)?;
        }
        GameTerm::Comp(l, r) => {
            fmt_at(l, lv, f)?;
            f.write_str(" . ")?;
            fmt_at(r, lv + 1, f)?;
        }
        GameTerm::Par(l, r) => {
            fmt_at(l, lv, f)?;
            f.write_str(" || ")?;
            fmt_at(r, lv + 1, f)?;
        }
        GameTerm::Abs(hide, body) => {
            f.write_str("abs{")?;
            for (i, a) in hide.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str("}(")?;
            fmt_at(body, 1, f)?;
            f.write_str(")")?;
        }
        GameTerm::RecRef(v, s) => write!(f, "<{v}|{s}>")?,
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for GameTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_at(self, 1, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn t(s: &str) -> GameTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn atom_names_validated() {
        assert!(AtomId::new("a").is_ok());
        assert!(AtomId::new("move_2").is_ok());
        assert!(AtomId::new("iota").is_err());
        assert!(AtomId::new("X").is_err());
        assert!(AtomId::new("").is_err());
    }

    #[test]
    fn canonical_order_sorts_summands() {
        assert_eq!(t("b + a").ac_canonicalize(), t("a + b"));
        assert_eq!(t("(a + b) + c").ac_canonicalize(), t("a + b + c"));
        assert_eq!(t("a & (c & b)").ac_canonicalize(), t("a & b & c"));
    }

    #[test]
    fn canonicalize_is_idempotent_and_preserves_atoms() {
        for s in ["b + a . c", "(a & b) & (iota + a)", "a || (c + b)", "(b + a)^d"] {
            let c = t(s).ac_canonicalize();
            assert_eq!(c, c.ac_canonicalize());
            assert_eq!(t(s).atom_multiset(), c.atom_multiset());
        }
    }

    #[test]
    fn idle_sorts_before_atoms_and_choice_flavors_are_ordered() {
        assert_eq!(t("a + iota").ac_canonicalize(), t("iota + a"));
        // Choice(1) < Choice(2) as summands of an outer join.
        let c = t("(a & b) + (a + b) . c").ac_canonicalize();
        assert_eq!(c, t("(a + b) . c + a & b").ac_canonicalize());
    }

    #[test]
    fn basic_terms_bag() {
        assert!(t("a . (b + c)").is_basic(System::Bag));
        assert!(!t("(a + b) . c").is_basic(System::Bag));
        assert!(t("a^d").is_basic(System::Bag));
        assert!(t("a^d . b^d").is_basic(System::Bag));
        assert!(t("iota").is_basic(System::Bag));
        assert!(!t("a || b").is_basic(System::Bag));
    }

    #[test]
    fn basic_terms_acg() {
        assert!(t("a || b").is_basic(System::Acg));
        assert!(t("(a || b^d) . c").is_basic(System::Acg));
        assert!(!t("((a + b) || c) . d").is_basic(System::Acg));
        assert!(!t("(a . b) . c").is_basic(System::Acg));
    }

    #[test]
    fn rename_examples() {
        let hide: BTreeSet<AtomId> = [AtomId::new("a").unwrap()].into();
        assert_eq!(t("a . b").rename_to_idle(&hide), t("iota . b"));
        assert_eq!(t("a^d").rename_to_idle(&hide), t("iota^d"));
        assert_eq!(t("b").rename_to_idle(&hide), t("b"));
        assert_eq!(t("b").rename_to_idle(&BTreeSet::new()), t("b"));
        let once = t("a + a . b").rename_to_idle(&hide);
        assert_eq!(once.rename_to_idle(&hide), once);
    }

    #[test]
    fn display_minimal_parens() {
        assert_eq!(t("a + b").to_string(), "a + b");
        assert_eq!(t("iota^d").to_string(), "iota^d");
        assert_eq!(t("a || b . c").to_string(), "a || b . c");
        assert_eq!(t("a || (b . c)").to_string(), "a || (b . c)");
        assert_eq!(t("(a + b)^d").to_string(), "(a + b)^d");
        assert_eq!(t("(a^d)^d").to_string(), "(a^d)^d");
        assert_eq!(t("a & (b + c)").to_string(), "a & (b + c)");
        assert_eq!(t("a + b & c").to_string(), "a + b & c");
    }
}
