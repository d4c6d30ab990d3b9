//! Set-builder expressions over atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::atom::{Atom, AtomMap};
use crate::error::{Error, Result};
use crate::formula::{Formula, Rel, Term, Var};
use crate::theory::Backend;

mod compile;
mod parse;
mod print;

pub use compile::{clear_cache, eq_formula, equality_formula, member_formula, subset_formula};
pub use parse::{parse, parse_for, parse_formula};

/// A definable value: an atom, a tuple, or a finite union of comprehensions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    Atom(Atom),
    /// A variable bound by an enclosing comprehension; always denotes an atom.
    Var(Var),
    /// The set of all atoms.
    Atoms,
    Union(Vec<Comp>),
    Tuple(Vec<Expr>),
}

/// `{ elem | binders in atoms, guard }`
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Comp {
    pub elem: Expr,
    pub binders: Vec<Var>,
    pub guard: Formula,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Atom,
    Set,
    Tuple(usize),
}

impl Comp {
    pub fn new(elem: Expr, binders: Vec<Var>, guard: Formula) -> Result<Comp> {
        let mut seen = BTreeSet::new();
        for b in &binders {
            if !seen.insert(b) {
                return Err(Error::DuplicateBinder(b.name().into()));
            }
        }
        Ok(Comp { elem, binders, guard })
    }

    /// A comprehension with fresh binders, equal to this one.
    pub fn freshened(&self) -> Comp {
        if self.binders.is_empty() {
            return self.clone();
        }
        let fresh: Vec<Var> = self.binders.iter().map(|_| Var::fresh()).collect();
        let map: BTreeMap<Var, Term> = self
            .binders
            .iter()
            .cloned()
            .zip(fresh.iter().cloned().map(Term::Var))
            .collect();
        Comp {
            elem: self.elem.substitute(&map),
            binders: fresh,
            guard: self.guard.substitute(&map),
        }
    }
}

impl Expr {
    pub fn empty() -> Expr {
        Expr::Union(Vec::new())
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Var::new(name))
    }

    /// The finite set `{e1, ..., ek}`.
    pub fn set<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        Expr::Union(
            items
                .into_iter()
                .map(|e| Comp { elem: e, binders: Vec::new(), guard: Formula::True })
                .collect(),
        )
    }

    pub fn comp(elem: Expr, binders: &[&str], guard: Formula) -> Result<Expr> {
        let binders = binders.iter().map(|b| Var::new(b)).collect();
        Ok(Expr::Union(vec![Comp::new(elem, binders, guard)?]))
    }

    pub fn pair(a: Expr, b: Expr) -> Expr {
        Expr::Tuple(vec![a, b])
    }

    pub fn kind(&self) -> Kind {
        match self {
            Expr::Atom(_) | Expr::Var(_) => Kind::Atom,
            Expr::Atoms | Expr::Union(_) => Kind::Set,
            Expr::Tuple(items) => Kind::Tuple(items.len()),
        }
    }

    pub fn is_atom(&self) -> bool {
        self.kind() == Kind::Atom
    }

    pub fn is_set(&self) -> bool {
        self.kind() == Kind::Set
    }

    /// The comprehensions of a set expression; `atoms` becomes `{a | a in atoms}`.
    pub fn comps(&self) -> Result<Vec<Comp>> {
        match self {
            Expr::Atoms => {
                let a = Var::fresh();
                Ok(vec![Comp { elem: Expr::Var(a.clone()), binders: vec![a], guard: Formula::True }])
            }
            Expr::Union(cs) => Ok(cs.clone()),
            e => Err(Error::Kind(format!("`{e}` is not a set"))),
        }
    }

    /// Set union; both operands must be sets.
    pub fn union(&self, other: &Expr) -> Result<Expr> {
        let mut cs = self.comps()?;
        cs.extend(other.comps()?);
        Ok(Expr::Union(cs))
    }

    /// All atoms occurring in the expression, including in guards.
    pub fn params(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Expr::Atom(a) => {
                out.insert(*a);
            }
            Expr::Var(_) | Expr::Atoms => {}
            Expr::Union(cs) => {
                for c in cs {
                    c.elem.collect_params(out);
                    c.guard.collect_params(out);
                }
            }
            Expr::Tuple(items) => items.iter().for_each(|e| e.collect_params(out)),
        }
    }

    /// Free variables, in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        match self {
            Expr::Var(v) => {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Atom(_) | Expr::Atoms => {}
            Expr::Tuple(items) => items.iter().for_each(|e| e.collect_free(bound, out)),
            Expr::Union(cs) => {
                for c in cs {
                    let n = bound.len();
                    bound.extend(c.binders.iter().cloned());
                    c.elem.collect_free(bound, out);
                    for v in c.guard.free_vars() {
                        if !bound.contains(&v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                    bound.truncate(n);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Replaces free variables, renaming binders that would capture.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Expr::Var(v) => match map.get(v) {
                Some(Term::Atom(a)) => Expr::Atom(*a),
                Some(Term::Var(w)) => Expr::Var(w.clone()),
                None => self.clone(),
            },
            Expr::Atom(_) | Expr::Atoms => self.clone(),
            Expr::Tuple(items) => Expr::Tuple(items.iter().map(|e| e.substitute(map)).collect()),
            Expr::Union(cs) => Expr::Union(cs.iter().map(|c| c.substitute(map)).collect()),
        }
    }

    /// Applies an atom map to every parameter.
    pub fn act(&self, pi: &AtomMap) -> Result<Expr> {
        Ok(match self {
            Expr::Atom(a) => Expr::Atom(pi.apply(a)?),
            Expr::Var(_) | Expr::Atoms => self.clone(),
            Expr::Tuple(items) => Expr::Tuple(items.iter().map(|e| e.act(pi)).collect::<Result<_>>()?),
            Expr::Union(cs) => Expr::Union(
                cs.iter()
                    .map(|c| {
                        for a in c.guard.params() {
                            pi.apply(&a)?;
                        }
                        Ok(Comp {
                            elem: c.elem.act(pi)?,
                            binders: c.binders.clone(),
                            guard: c.guard.map_atoms(&mut |a| pi.get(a).unwrap_or(*a)),
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// Replaces the given atoms by variables, which must not be bound inside.
    pub fn abstract_atoms(&self, map: &BTreeMap<Atom, Var>) -> Expr {
        match self {
            Expr::Atom(a) => map.get(a).map_or_else(|| self.clone(), |v| Expr::Var(v.clone())),
            Expr::Var(_) | Expr::Atoms => self.clone(),
            Expr::Tuple(items) => Expr::Tuple(items.iter().map(|e| e.abstract_atoms(map)).collect()),
            Expr::Union(cs) => Expr::Union(
                cs.iter()
                    .map(|c| Comp {
                        elem: c.elem.abstract_atoms(map),
                        binders: c.binders.clone(),
                        guard: c.guard.abstract_atoms(map),
                    })
                    .collect(),
            ),
        }
    }

    /// Whether the expression is built from atoms and tuples only.
    pub fn is_flat(&self) -> bool {
        match self {
            Expr::Atom(_) | Expr::Var(_) => true,
            Expr::Tuple(items) => items.iter().all(Expr::is_flat),
            _ => false,
        }
    }

    /// The atoms of a flat expression, left to right.
    pub fn flat_atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        fn go(e: &Expr, out: &mut Vec<Atom>) {
            match e {
                Expr::Atom(a) => out.push(*a),
                Expr::Tuple(items) => items.iter().for_each(|e| go(e, out)),
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// Tuple and atom structure, with sets collapsed.
    pub fn shape(&self) -> String {
        match self {
            Expr::Atom(_) | Expr::Var(_) => "a".into(),
            Expr::Atoms | Expr::Union(_) => "s".into(),
            Expr::Tuple(items) => format!("({})", items.iter().map(Expr::shape).collect::<Vec<_>>().join(",")),
        }
    }

    /// Replaces parameters through `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> Expr {
        match self {
            Expr::Atom(a) => Expr::Atom(f(a)),
            Expr::Var(_) | Expr::Atoms => self.clone(),
            Expr::Tuple(items) => Expr::Tuple(items.iter().map(|e| e.map_atoms(f)).collect()),
            Expr::Union(cs) => Expr::Union(
                cs.iter()
                    .map(|c| Comp {
                        elem: c.elem.map_atoms(f),
                        binders: c.binders.clone(),
                        guard: c.guard.map_atoms(f),
                    })
                    .collect(),
            ),
        }
    }

    /// Removes binders forced equal to another term by a conjunct of the
    /// guard, at every level.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Atom(_) | Expr::Var(_) | Expr::Atoms => self.clone(),
            Expr::Tuple(items) => Expr::Tuple(items.iter().map(Expr::simplify).collect()),
            Expr::Union(cs) => Expr::Union(cs.iter().map(Comp::simplify).collect()),
        }
    }

    /// Renames every bound variable depth-first to `a`, `b`, `c`, ...
    /// Sibling scopes reuse names.
    pub fn canonical(&self) -> Expr {
        self.canonical_from(0)
    }

    fn canonical_from(&self, depth: usize) -> Expr {
        match self {
            Expr::Atom(_) | Expr::Var(_) | Expr::Atoms => self.clone(),
            Expr::Tuple(items) => Expr::Tuple(items.iter().map(|e| e.canonical_from(depth)).collect()),
            Expr::Union(cs) => Expr::Union(
                cs.iter()
                    .map(|c| {
                        let names: Vec<Var> =
                            (0..c.binders.len()).map(|i| canonical_name(depth + i)).collect();
                        let map: BTreeMap<Var, Term> = c
                            .binders
                            .iter()
                            .cloned()
                            .zip(names.iter().cloned().map(Term::Var))
                            .collect();
                        let inner = depth + names.len();
                        let mut next = inner;
                        let guard = c.guard.substitute(&map).fold().rename_bound(&mut || {
                            next += 1;
                            canonical_name(next - 1)
                        });
                        Comp {
                            elem: c.elem.substitute(&map).canonical_from(inner),
                            binders: names,
                            guard,
                        }
                    })
                    .collect(),
            ),
        }
    }

    /// Checks atoms and guard relations against a backend.
    pub fn check_backend(&self, backend: Backend) -> Result<()> {
        match self {
            Expr::Atom(a) => backend.check_atom(a),
            Expr::Var(_) | Expr::Atoms => Ok(()),
            Expr::Tuple(items) => items.iter().try_for_each(|e| e.check_backend(backend)),
            Expr::Union(cs) => cs.iter().try_for_each(|c| {
                backend.check_formula(&c.guard)?;
                c.elem.check_backend(backend)
            }),
        }
    }

    /// Checks that the expression is closed and binders are distinct.
    pub fn validate(&self) -> Result<()> {
        self.validate_in(&mut Vec::new())
    }

    fn validate_in(&self, scope: &mut Vec<Var>) -> Result<()> {
        match self {
            Expr::Var(v) if !scope.contains(v) => Err(Error::UnboundVariable(v.name().into())),
            Expr::Atom(_) | Expr::Var(_) | Expr::Atoms => Ok(()),
            Expr::Tuple(items) => items.iter().try_for_each(|e| e.validate_in(scope)),
            Expr::Union(cs) => cs.iter().try_for_each(|c| {
                let mut seen = BTreeSet::new();
                if let Some(b) = c.binders.iter().find(|b| !seen.insert(*b)) {
                    return Err(Error::DuplicateBinder(b.name().into()));
                }
                let n = scope.len();
                scope.extend(c.binders.iter().cloned());
                let res = c.elem.validate_in(scope).and_then(|_| {
                    match c.guard.free_vars().into_iter().find(|v| !scope.contains(v)) {
                        Some(v) => Err(Error::UnboundVariable(v.name().into())),
                        None => Ok(()),
                    }
                });
                scope.truncate(n);
                res
            }),
        }
    }

    /// Number of syntax nodes, used to bound generated inputs.
    pub fn size(&self) -> usize {
        match self {
            Expr::Atom(_) | Expr::Var(_) | Expr::Atoms => 1,
            Expr::Tuple(items) => 1 + items.iter().map(Expr::size).sum::<usize>(),
            Expr::Union(cs) => 1 + cs.iter().map(|c| c.elem.size() + c.guard.size()).sum::<usize>(),
        }
    }
}

impl Comp {
    fn simplify(&self) -> Comp {
        let mut c = self.clone();
        loop {
            let found = c.guard.conjuncts().into_iter().find_map(|f| match f {
                Formula::Rel(Rel::Eq, args) => c.binders.iter().rev().find_map(|b| match (&args[0], &args[1]) {
                    (Term::Var(x), t) | (t, Term::Var(x)) if x == b && !matches!(t, Term::Var(y) if y == b) => {
                        Some((b.clone(), t.clone()))
                    }
                    _ => None,
                }),
                _ => None,
            });
            let Some((b, t)) = found else { break };
            let map = BTreeMap::from([(b.clone(), t)]);
            c.binders.retain(|x| *x != b);
            c.elem = c.elem.substitute(&map);
            let guard = c.guard.substitute(&map);
            c.guard = Formula::and(guard.conjuncts().into_iter().map(|f| match f {
                Formula::Rel(r, args) => Formula::rel(*r, args.clone()),
                f => f.clone(),
            }));
        }
        c.elem = c.elem.simplify();
        c
    }

    fn substitute(&self, map: &BTreeMap<Var, Term>) -> Comp {
        let mut inner: BTreeMap<Var, Term> =
            map.iter().filter(|(k, _)| !self.binders.contains(k)).map(|(k, t)| (k.clone(), t.clone())).collect();
        if inner.is_empty() {
            return self.clone();
        }
        let mut binders = self.binders.clone();
        for b in binders.iter_mut() {
            if inner.values().any(|t| matches!(t, Term::Var(w) if w == b)) {
                let w = Var::fresh();
                inner.insert(b.clone(), Term::Var(w.clone()));
                *b = w;
            }
        }
        Comp { elem: self.elem.substitute(&inner), binders, guard: self.guard.substitute(&inner) }
    }
}

fn canonical_name(i: usize) -> Var {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        Var::new(&letter.to_string())
    } else {
        Var::new(&format!("{letter}{}", i / 26))
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Expr {
        Expr::Atom(a)
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

impl fmt::Display for Comp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::fmt_comp(self, f)
    }
}

#[cfg(test)]
mod tests;
