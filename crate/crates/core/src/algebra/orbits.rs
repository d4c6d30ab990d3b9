use std::collections::{BTreeMap, BTreeSet};

use super::{abstract_params, check_closed, require_params};
use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::expr::{member_formula, Comp, Expr};
use crate::formula::{Formula, Term, Var};
use crate::theory::eval::Prepared;
use crate::theory::{Backend, Valuation};

pub const DEFAULT_SUBSET_BUDGET: u128 = 1 << 16;

/// One orbit of a set under the automorphisms fixing `fixed`: the values of
/// a clause of the set on the tuples of one complete type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDescriptor {
    /// Index of the clause in the set's comprehension list.
    pub clause_index: usize,
    pub clause: Comp,
    /// Complete type of the clause binders over `fixed`.
    pub ty: Formula,
    pub fixed: BTreeSet<Atom>,
    pub rep: Valuation,
}

impl OrbitDescriptor {
    /// The representative element.
    pub fn element(&self) -> Expr {
        let map: BTreeMap<Var, Term> = self.rep.iter().map(|(v, a)| (v.clone(), Term::Atom(*a))).collect();
        self.clause.elem.substitute(&map)
    }

    /// The orbit as a set expression.
    pub fn expr(&self) -> Expr {
        Expr::Union(vec![Comp {
            elem: self.clause.elem.clone(),
            binders: self.clause.binders.clone(),
            guard: self.ty.clone(),
        }])
    }
}

/// Partition of a set into orbits over `s`, in clause order then type
/// enumeration order. Clauses denoting an orbit already listed are dropped.
pub fn orbit_decomposition(b: Backend, x: &Expr, s: &BTreeSet<Atom>) -> Result<Vec<OrbitDescriptor>> {
    check_closed(b, x)?;
    require_params(x, s)?;
    let comps = x.comps()?;
    let fixed: Vec<Atom> = s.iter().copied().collect();
    let st = b.structure();
    let mut out: Vec<OrbitDescriptor> = Vec::new();
    for (ci, c) in comps.iter().enumerate() {
        let n = c.binders.len();
        // conjuncts of the guard checkable once their last binder is chosen
        let mut stages: Vec<Vec<Prepared>> = (0..=n).map(|_| Vec::new()).collect();
        for conj in c.guard.conjuncts() {
            let free = conj.free_vars();
            let last = free
                .iter()
                .map(|v| c.binders.iter().position(|b| b == v).ok_or_else(|| Error::UnboundVariable(v.name().into())))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .map_or(0, |i| i + 1);
            stages[last].push(Prepared::new(conj, &c.binders[..last])?);
        }
        if stages[0].iter().any(|p| !p.eval(st, &[])) {
            continue;
        }
        let tuples = b.enumerate_types(n, &fixed, |len, prefix| stages[len].iter().all(|p| p.eval(st, prefix)));
        for t in tuples {
            let rep: Valuation = c.binders.iter().cloned().zip(t.iter().copied()).collect();
            let d = OrbitDescriptor {
                clause_index: ci,
                clause: c.clone(),
                ty: b.type_of(&c.binders, &t, s),
                fixed: s.clone(),
                rep,
            };
            if !out.iter().any(|o| same_orbit(b, o, &d)) {
                out.push(d);
            }
        }
    }
    Ok(out)
}

fn same_orbit(b: Backend, o: &OrbitDescriptor, d: &OrbitDescriptor) -> bool {
    let (x, y) = (o.element(), d.element());
    if x.shape() != y.shape() {
        return false;
    }
    if x.is_flat() {
        let st = b.structure();
        let with = |e: &Expr| -> Vec<Atom> { o.fixed.iter().copied().chain(e.flat_atoms()).collect() };
        return st.type_key(&with(&x)) == st.type_key(&with(&y));
    }
    b.holds_unchecked(&member_formula(&y, &o.expr()))
}

/// The orbit of `x` under automorphisms fixing `s` pointwise.
pub fn orbit_expression(b: Backend, x: &Expr, s: &BTreeSet<Atom>) -> Result<Expr> {
    check_closed(b, x)?;
    let (e, vars, moving) = abstract_params(x, s);
    if vars.is_empty() {
        return Ok(Expr::set([x.clone()]));
    }
    let guard = b.type_of(&vars, &moving, s);
    Ok(Expr::Union(vec![Comp { elem: e, binders: vars, guard }]).canonical())
}

/// Every subset of `x` definable over `t`: the unions of its `t`-orbits,
/// listed by the bitmask of included orbits.
pub fn definable_subsets(b: Backend, x: &Expr, t: &BTreeSet<Atom>, budget: u128) -> Result<Vec<Expr>> {
    let orbits = orbit_decomposition(b, x, t)?;
    let k = orbits.len();
    let count = if k >= 127 { u128::MAX } else { 1u128 << k };
    if count > budget {
        return Err(Error::Budget { what: "definable subsets", count, limit: budget });
    }
    let exprs: Vec<Expr> = orbits.iter().map(OrbitDescriptor::expr).collect();
    Ok((0..count as usize)
        .map(|mask| {
            Expr::Union(
                (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| exprs[i].comps().unwrap())
                    .collect(),
            )
        })
        .collect())
}
