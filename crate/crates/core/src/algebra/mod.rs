//! Decidable operations on definable sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::expr::{eq_formula, equality_formula, member_formula, subset_formula, Comp, Expr};
use crate::formula::{Formula, Var};
use crate::theory::Backend;

mod function;
mod orbits;

pub use function::{DefFunction, FnFlags};
pub use orbits::{definable_subsets, orbit_decomposition, orbit_expression, OrbitDescriptor, DEFAULT_SUBSET_BUDGET};

/// Checks that `e` is a closed expression over the backend.
pub fn check_closed(b: Backend, e: &Expr) -> Result<()> {
    e.validate()?;
    e.check_backend(b)
}

pub fn set_equal(b: Backend, x: &Expr, y: &Expr) -> Result<bool> {
    check_closed(b, x)?;
    check_closed(b, y)?;
    Ok(b.holds_unchecked(&equality_formula(b, x, y)?))
}

pub fn is_member(b: Backend, x: &Expr, set: &Expr) -> Result<bool> {
    check_closed(b, x)?;
    check_closed(b, set)?;
    Ok(b.holds_unchecked(&member_formula(x, set)))
}

pub fn is_subset(b: Backend, x: &Expr, y: &Expr) -> Result<bool> {
    check_closed(b, x)?;
    check_closed(b, y)?;
    Ok(b.holds_unchecked(&subset_formula(x, y)))
}

/// Whether two sets have no common element.
pub fn is_disjoint(b: Backend, x: &Expr, y: &Expr) -> Result<bool> {
    check_closed(b, x)?;
    check_closed(b, y)?;
    let f = Formula::and(x.comps()?.iter().map(|c| {
        Formula::forall_many(&c.binders, Formula::implies(c.guard.clone(), Formula::not(member_formula(&c.elem, y))))
    }));
    Ok(b.holds_unchecked(&f))
}

/// The cartesian product of sets, as a set of tuples.
pub fn product(sets: &[Expr]) -> Result<Expr> {
    let mut acc: Vec<(Vec<Expr>, Vec<Var>, Formula)> = vec![(Vec::new(), Vec::new(), Formula::True)];
    for s in sets {
        let comps = s.comps()?;
        let mut next = Vec::with_capacity(acc.len() * comps.len());
        for (elems, binders, guard) in &acc {
            for c in &comps {
                let c = c.freshened();
                let mut elems = elems.clone();
                elems.push(c.elem);
                let mut binders = binders.clone();
                binders.extend(c.binders);
                next.push((elems, binders, Formula::and([guard.clone(), c.guard])));
            }
        }
        acc = next;
    }
    Ok(Expr::Union(
        acc.into_iter()
            .map(|(elems, binders, guard)| Comp { elem: Expr::Tuple(elems), binders, guard })
            .collect(),
    ))
}

/// The `n`-th power of a set; `n = 1` gives the set itself.
pub fn power(set: &Expr, n: usize) -> Result<Expr> {
    if n == 1 {
        return Ok(set.clone());
    }
    product(&vec![set.clone(); n])
}

/// The least support of a value and its size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub atoms: BTreeSet<Atom>,
}

impl Support {
    pub fn dimension(&self) -> usize {
        self.atoms.len()
    }
}

/// `x` written as `e(p̄)` with the parameters outside `keep` abstracted into
/// fresh variables.
pub(crate) fn abstract_params(x: &Expr, keep: &BTreeSet<Atom>) -> (Expr, Vec<Var>, Vec<Atom>) {
    let moving: Vec<Atom> = x.params().into_iter().filter(|a| !keep.contains(a)).collect();
    let vars: Vec<Var> = moving.iter().map(|_| Var::fresh()).collect();
    let map: BTreeMap<Atom, Var> = moving.iter().copied().zip(vars.iter().cloned()).collect();
    (x.abstract_atoms(&map), vars, moving)
}

/// Whether every automorphism fixing `s` pointwise fixes `x`.
pub fn supports(b: Backend, x: &Expr, s: &BTreeSet<Atom>) -> Result<bool> {
    check_closed(b, x)?;
    let (e, vars, moving) = abstract_params(x, s);
    if vars.is_empty() {
        return Ok(true);
    }
    let ty = b.type_of(&vars, &moving, s);
    let f = Formula::forall_many(&vars, Formula::implies(ty, eq_formula(&e, x)));
    Ok(b.holds_unchecked(&f))
}

/// The least support, found by removing parameters one at a time in
/// ascending order.
pub fn least_support(b: Backend, x: &Expr) -> Result<Support> {
    check_closed(b, x)?;
    let mut current = x.params();
    for a in x.params() {
        current.remove(&a);
        if !supports(b, x, &current)? {
            current.insert(a);
        }
    }
    Ok(Support { atoms: current })
}

/// Checks that `params(x) ⊆ s`.
pub(crate) fn require_params(x: &Expr, s: &BTreeSet<Atom>) -> Result<()> {
    match x.params().into_iter().find(|a| !s.contains(a)) {
        Some(a) => Err(Error::Support(a)),
        None => Ok(()),
    }
}
