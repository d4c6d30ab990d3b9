//! First-order formulas over an atom vocabulary with equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::atom::Atom;

/// A variable name. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

static FRESH: AtomicU64 = AtomicU64::new(0);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(Arc::from(name))
    }

    /// A variable name that no parsed input uses (`_` followed by a counter).
    pub fn fresh() -> Var {
        let n = FRESH.fetch_add(1, Ordering::Relaxed);
        Var(Arc::from(format!("_{n}").as_str()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Var {
        Var::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Atom(Atom),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }
}

impl From<Atom> for Term {
    fn from(a: Atom) -> Term {
        Term::Atom(a)
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Atom(a) => write!(f, "{a}"),
        }
    }
}

/// Relation symbols of the shipped vocabularies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Lt,
    Le,
    /// The ternary cyclic-order relation `R`.
    Cyc,
}

impl Rel {
    pub fn arity(self) -> usize {
        match self {
            Rel::Cyc => 3,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Cyc => "R",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Rel(Rel, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

/// Evaluates a relation on concrete atoms, when that is meaningful without a
/// backend (equality always; order and cyclic order on rationals).
pub(crate) fn eval_rel_on_atoms(rel: Rel, args: &[Atom]) -> Option<bool> {
    match rel {
        Rel::Eq => Some(args[0] == args[1]),
        Rel::Lt => Some(args[0].as_rational()? < args[1].as_rational()?),
        Rel::Le => Some(args[0].as_rational()? <= args[1].as_rational()?),
        Rel::Cyc => {
            let (a, b, c) = (
                args[0].as_rational()?,
                args[1].as_rational()?,
                args[2].as_rational()?,
            );
            Some((a < b && b < c) || (b < c && c < a) || (c < a && a < b))
        }
    }
}

impl Formula {
    pub fn rel(rel: Rel, args: Vec<Term>) -> Formula {
        debug_assert_eq!(rel.arity(), args.len());
        if rel == Rel::Eq && args[0] == args[1] {
            return Formula::True;
        }
        if rel == Rel::Le && args[0] == args[1] {
            return Formula::True;
        }
        if rel == Rel::Lt && args[0] == args[1] {
            return Formula::False;
        }
        let atoms: Option<Vec<Atom>> = args
            .iter()
            .map(|t| match t {
                Term::Atom(a) => Some(*a),
                Term::Var(_) => None,
            })
            .collect();
        if let Some(atoms) = atoms {
            if let Some(b) = eval_rel_on_atoms(rel, &atoms) {
                return Formula::constant(b);
            }
        }
        Formula::Rel(rel, args)
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::rel(Rel::Eq, vec![a.into(), b.into()])
    }

    pub fn neq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    pub fn lt(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::rel(Rel::Lt, vec![a.into(), b.into()])
    }

    pub fn cyc(a: impl Into<Term>, b: impl Into<Term>, c: impl Into<Term>) -> Formula {
        Formula::rel(Rel::Cyc, vec![a.into(), b.into(), c.into()])
    }

    pub fn constant(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn and<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut out: Vec<Formula> = Vec::new();
        for f in items {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => {
                    for g in inner {
                        if !out.contains(&g) {
                            out.push(g);
                        }
                    }
                }
                f => {
                    if !out.contains(&f) {
                        out.push(f);
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut out: Vec<Formula> = Vec::new();
        for f in items {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => {
                    for g in inner {
                        if !out.contains(&g) {
                            out.push(g);
                        }
                    }
                }
                f => {
                    if !out.contains(&f) {
                        out.push(f);
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, c: Formula) -> Formula {
        match (a, c) {
            (Formula::True, c) => c,
            (Formula::False, _) => Formula::True,
            (_, Formula::True) => Formula::True,
            (a, Formula::False) => Formula::not(a),
            (a, c) => Formula::Implies(Box::new(a), Box::new(c)),
        }
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and([
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        ])
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        if !body.has_free(&v) {
            return body;
        }
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        if !body.has_free(&v) {
            return body;
        }
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists_many(vars: &[Var], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall_many(vars: &[Var], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    /// Rebuilds the formula with the folding constructors, evaluating
    /// relations between atoms.
    pub fn fold(&self) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::rel(*r, args.clone()),
            Formula::Not(g) => Formula::not(g.fold()),
            Formula::And(gs) => Formula::and(gs.iter().map(Formula::fold)),
            Formula::Or(gs) => Formula::or(gs.iter().map(Formula::fold)),
            Formula::Implies(a, c) => Formula::implies(a.fold(), c.fold()),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.fold()),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.fold()),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn has_free(&self, v: &Var) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Rel(_, args) => args.iter().any(|t| matches!(t, Term::Var(w) if w == v)),
            Formula::Not(f) => f.has_free(v),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.has_free(v)),
            Formula::Implies(a, b) => a.has_free(v) || b.has_free(v),
            Formula::Exists(w, f) | Formula::Forall(w, f) => w != v && f.has_free(v),
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) && !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Atom parameters occurring anywhere in the formula.
    pub fn params(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    pub(crate) fn collect_params(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(_, args) => {
                for t in args {
                    if let Term::Atom(a) = t {
                        out.insert(*a);
                    }
                }
            }
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.collect_params(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_params(out)),
            Formula::Implies(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    pub(crate) fn relations(&self, out: &mut BTreeSet<Rel>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(r, _) => {
                out.insert(*r);
            }
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.relations(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.relations(out)),
            Formula::Implies(a, b) => {
                a.relations(out);
                b.relations(out);
            }
        }
    }

    /// Capture-avoiding substitution of terms for free variables.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::rel(
                *r,
                args.iter()
                    .map(|t| match t {
                        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
                        Term::Atom(_) => t.clone(),
                    })
                    .collect(),
            ),
            Formula::Not(f) => Formula::not(f.substitute(map)),
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.substitute(map))),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.substitute(map))),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let (v, body) = substitute_under_binder(v, f, map);
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
        }
    }

    pub fn rename(&self, from: &Var, to: &Var) -> Formula {
        let mut map = BTreeMap::new();
        map.insert(from.clone(), Term::Var(to.clone()));
        self.substitute(&map)
    }

    /// Replaces the given atoms by variables, which must not be bound inside.
    pub fn abstract_atoms(&self, map: &BTreeMap<Atom, Var>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::Rel(
                *r,
                args.iter()
                    .map(|t| match t {
                        Term::Atom(a) => map.get(a).map_or_else(|| t.clone(), |v| Term::Var(v.clone())),
                        t => t.clone(),
                    })
                    .collect(),
            ),
            Formula::Not(g) => Formula::Not(Box::new(g.abstract_atoms(map))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.abstract_atoms(map)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.abstract_atoms(map)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.abstract_atoms(map)), Box::new(b.abstract_atoms(map)))
            }
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.abstract_atoms(map))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.abstract_atoms(map))),
        }
    }

    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::Rel(
                *r,
                args.iter()
                    .map(|t| match t {
                        Term::Atom(a) => Term::Atom(f(a)),
                        t => t.clone(),
                    })
                    .collect(),
            ),
            Formula::Not(g) => Formula::Not(Box::new(g.map_atoms(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f))),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.map_atoms(f))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.map_atoms(f))),
        }
    }

    /// Renames bound variables, leaving free ones alone.
    pub(crate) fn rename_bound(&self, next: &mut dyn FnMut() -> Var) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) => self.clone(),
            Formula::Not(f) => Formula::Not(Box::new(f.rename_bound(next))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_bound(next)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_bound(next)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.rename_bound(next)), Box::new(b.rename_bound(next)))
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let w = next();
                let body = f.rename(v, &w).rename_bound(next);
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(w, Box::new(body))
                } else {
                    Formula::Forall(w, Box::new(body))
                }
            }
        }
    }

    /// Top-level conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(fs) => fs.iter().collect(),
            Formula::True => vec![],
            f => vec![f],
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) => 1,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            Formula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }
}

fn substitute_under_binder(v: &Var, body: &Formula, map: &BTreeMap<Var, Term>) -> (Var, Formula) {
    let mut inner: BTreeMap<Var, Term> = map
        .iter()
        .filter(|(k, _)| *k != v && body.has_free(k))
        .map(|(k, t)| (k.clone(), t.clone()))
        .collect();
    if inner.is_empty() {
        return (v.clone(), body.clone());
    }
    let captures = inner.values().any(|t| matches!(t, Term::Var(w) if w == v));
    if captures {
        let w = Var::fresh();
        inner.insert(v.clone(), Term::Var(w.clone()));
        (w, body.substitute(&inner))
    } else {
        (v.clone(), body.substitute(&inner))
    }
}

// Printing. Precedence: 1 implication, 2 disjunction, 3 conjunction, 4 unary.
impl Formula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Rel(Rel::Cyc, args) => write!(f, "R({}, {}, {})", args[0], args[1], args[2]),
            Formula::Rel(r, args) => write!(f, "{} {} {}", args[0], r.symbol(), args[1]),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Rel(Rel::Eq, args) => write!(f, "{} != {}", args[0], args[1]),
                g => {
                    f.write_str("not ")?;
                    g.fmt_prec(f, 4)
                }
            },
            Formula::And(fs) | Formula::Or(fs) => {
                let (own, sep) = if matches!(self, Formula::And(_)) {
                    (3, " and ")
                } else {
                    (2, " or ")
                };
                if prec > own {
                    f.write_str("(")?;
                }
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    g.fmt_prec(f, own + 1)?;
                }
                if prec > own {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 2)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 1)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let q = if matches!(self, Formula::Exists(..)) {
                    "exists"
                } else {
                    "forall"
                };
                if prec > 0 {
                    f.write_str("(")?;
                }
                write!(f, "{q} {v}. ")?;
                body.fmt_prec(f, 0)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Pushes quantifiers inwards so that each conjunct sits directly below the
/// innermost quantifier it depends on. Existential blocks scope over
/// conjunctions; universal blocks scope over the antecedent conjuncts of an
/// implication and distribute over conjunctions. Equivalent on every
/// structure with a non-empty domain.
pub fn miniscope(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Rel(..) => f.clone(),
        Formula::Not(g) => Formula::not(miniscope(g)),
        Formula::And(gs) => Formula::and(gs.iter().map(miniscope)),
        Formula::Or(gs) => Formula::or(gs.iter().map(miniscope)),
        Formula::Implies(a, b) => Formula::implies(miniscope(a), miniscope(b)),
        Formula::Exists(..) => {
            let (vars, matrix) = quantifier_block(f, true);
            let matrix = miniscope(matrix);
            let conjuncts: Vec<Formula> = matrix.conjuncts().into_iter().cloned().collect();
            scope_block(&vars, conjuncts, None, true)
        }
        Formula::Forall(..) => {
            let (vars, matrix) = quantifier_block(f, false);
            let matrix = miniscope(matrix);
            match matrix {
                Formula::And(parts) => Formula::and(
                    parts
                        .into_iter()
                        .map(|p| miniscope_forall(&vars, p)),
                ),
                m => miniscope_forall(&vars, m),
            }
        }
    }
}

fn miniscope_forall(vars: &[Var], matrix: Formula) -> Formula {
    match matrix {
        Formula::Implies(a, c) => {
            let conjuncts: Vec<Formula> = a.conjuncts().into_iter().cloned().collect();
            scope_block(vars, conjuncts, Some(*c), false)
        }
        m => Formula::forall_many(vars, m),
    }
}

fn quantifier_block(f: &Formula, existential: bool) -> (Vec<Var>, &Formula) {
    let mut vars = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Exists(v, b) if existential => {
                vars.push(v.clone());
                cur = b;
            }
            Formula::Forall(v, b) if !existential => {
                vars.push(v.clone());
                cur = b;
            }
            _ => break,
        }
    }
    // Shadowed names within one block: keep the innermost binding only.
    let mut seen = BTreeSet::new();
    let mut dedup: Vec<Var> = vars
        .into_iter()
        .rev()
        .filter(|v| seen.insert(v.clone()))
        .collect();
    dedup.reverse();
    (dedup, cur)
}

/// Builds `Q v1 (C1 op Q v2 (C2 op ... ))`; for existential blocks `op` is
/// conjunction, for universal blocks the `Ci` are antecedents and `conclusion`
/// is placed innermost.
fn scope_block(
    vars: &[Var],
    conjuncts: Vec<Formula>,
    conclusion: Option<Formula>,
    existential: bool,
) -> Formula {
    let mut levels: Vec<Vec<Formula>> = vec![Vec::new(); vars.len() + 1];
    for c in conjuncts {
        let level = vars
            .iter()
            .rposition(|v| c.has_free(v))
            .map_or(0, |i| i + 1);
        levels[level].push(c);
    }
    let mut inner = conclusion.unwrap_or(Formula::True);
    for i in (0..vars.len()).rev() {
        let here = std::mem::take(&mut levels[i + 1]);
        let body = if existential {
            Formula::and(here.into_iter().chain([inner]))
        } else {
            Formula::implies(Formula::and(here), inner)
        };
        inner = if existential {
            Formula::exists(vars[i].clone(), body)
        } else {
            Formula::forall(vars[i].clone(), body)
        };
    }
    let outer = std::mem::take(&mut levels[0]);
    if existential {
        Formula::and(outer.into_iter().chain([inner]))
    } else {
        Formula::implies(Formula::and(outer), inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    #[test]
    fn smart_constructors_fold_constants() {
        assert_eq!(Formula::eq(Atom::Id(1), Atom::Id(1)), Formula::True);
        assert_eq!(Formula::eq(Atom::Id(1), Atom::Id(2)), Formula::False);
        assert_eq!(Formula::and([Formula::True, Formula::False]), Formula::False);
        assert_eq!(Formula::or([]), Formula::False);
        assert_eq!(Formula::exists(v("x"), Formula::True), Formula::True);
        assert_eq!(Formula::lt(Atom::int(0), Atom::rat(1, 2)), Formula::True);
    }

    #[test]
    fn substitution_avoids_capture() {
        // exists y. x != y   with x := y
        let f = Formula::exists(v("y"), Formula::neq(v("x"), v("y")));
        let mut map = BTreeMap::new();
        map.insert(v("x"), Term::Var(v("y")));
        let g = f.substitute(&map);
        match &g {
            Formula::Exists(w, body) => {
                assert_ne!(w, &v("y"));
                assert!(body.has_free(&v("y")));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn printing() {
        let f = Formula::implies(
            Formula::and([Formula::eq(v("a"), v("b")), Formula::or([Formula::lt(v("a"), v("c")), Formula::False, Formula::neq(v("b"), Atom::Id(1))])]),
            Formula::exists(v("d"), Formula::cyc(v("a"), v("b"), v("d"))),
        );
        assert_eq!(f.to_string(), "a = b and (a < c or b != #1) -> (exists d. R(a, b, d))");
    }

    #[test]
    fn miniscope_splits_blocks() {
        // exists x y. (P(x) and Q(x,y))  ->  exists x. P(x) and exists y. Q(x,y)
        let f = Formula::exists_many(
            &[v("x"), v("y")],
            Formula::and([Formula::eq(v("x"), v("z")), Formula::lt(v("x"), v("y"))]),
        );
        let g = miniscope(&f);
        assert_eq!(g.to_string(), "exists x. x = z and (exists y. x < y)");
        let f = Formula::forall_many(
            &[v("x"), v("y")],
            Formula::implies(
                Formula::and([Formula::eq(v("y"), v("z")), Formula::lt(v("x"), v("z"))]),
                Formula::lt(v("x"), v("y")),
            ),
        );
        assert_eq!(
            miniscope(&f).to_string(),
            "forall x. x < z -> (forall y. y = z -> x < y)"
        );
    }
}
