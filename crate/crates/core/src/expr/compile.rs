//! Compilation of equality, membership and inclusion between expressions
//! into first-order formulas over the atoms.

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use super::{Comp, Expr, Kind};
use crate::error::Result;
use crate::formula::{Formula, Rel, Term, Var};
use crate::theory::Backend;

fn term(e: &Expr) -> Option<Term> {
    match e {
        Expr::Atom(a) => Some(Term::Atom(*a)),
        Expr::Var(v) => Some(Term::Var(v.clone())),
        _ => None,
    }
}

/// Formula expressing `e1 = e2`, with the free variables of both.
pub fn eq_formula(e1: &Expr, e2: &Expr) -> Formula {
    match (e1.kind(), e2.kind()) {
        (Kind::Atom, Kind::Atom) => Formula::eq(term(e1).unwrap(), term(e2).unwrap()),
        (Kind::Tuple(n), Kind::Tuple(m)) if n == m => {
            let (Expr::Tuple(xs), Expr::Tuple(ys)) = (e1, e2) else { unreachable!() };
            Formula::and(xs.iter().zip(ys).map(|(x, y)| eq_formula(x, y)))
        }
        (Kind::Set, Kind::Set) => {
            if e1 == e2 {
                return Formula::True;
            }
            Formula::and([subset_formula(e1, e2), subset_formula(e2, e1)])
        }
        _ => Formula::False,
    }
}

/// Formula expressing `e ∈ set`.
pub fn member_formula(e: &Expr, set: &Expr) -> Formula {
    match set {
        Expr::Atoms => Formula::constant(e.is_atom()),
        Expr::Union(cs) => Formula::or(cs.iter().map(|c| {
            if !kinds_compatible(e, &c.elem) {
                return Formula::False;
            }
            let c = c.freshened();
            let body = Formula::and([c.guard.clone(), eq_formula(e, &c.elem)]);
            let (binders, body) = one_point(c.binders, body, true);
            Formula::exists_many(&binders, body)
        })),
        _ => Formula::False,
    }
}

/// Formula expressing `x ⊆ y`; false unless both are sets.
pub fn subset_formula(x: &Expr, y: &Expr) -> Formula {
    if !x.is_set() || !y.is_set() {
        return Formula::False;
    }
    if matches!(y, Expr::Atoms) {
        return match x {
            Expr::Atoms => Formula::True,
            Expr::Union(cs) => Formula::and(cs.iter().map(|c| {
                let inside = if c.elem.is_atom() { Formula::True } else { Formula::False };
                Formula::forall_many(&c.binders, Formula::implies(c.guard.clone(), inside))
            })),
            _ => unreachable!(),
        };
    }
    let comps: Vec<Comp> = x.comps().unwrap_or_default();
    Formula::and(comps.iter().map(|c| {
        let c = c.freshened();
        let body = Formula::implies(c.guard.clone(), member_formula(&c.elem, y));
        let (binders, body) = one_point(c.binders, body, false);
        Formula::forall_many(&binders, body)
    }))
}

fn kinds_compatible(a: &Expr, b: &Expr) -> bool {
    match (a.kind(), b.kind()) {
        (Kind::Tuple(n), Kind::Tuple(m)) => {
            n == m && {
                let (Expr::Tuple(xs), Expr::Tuple(ys)) = (a, b) else { unreachable!() };
                xs.iter().zip(ys).all(|(x, y)| kinds_compatible(x, y))
            }
        }
        (k, l) => k == l,
    }
}

/// Eliminates binders forced equal to another term: in `exists b. (b = t and
/// φ)` and `forall b. (b = t and ψ -> φ)` the binder is replaced by `t`.
fn one_point(mut binders: Vec<Var>, mut body: Formula, exists: bool) -> (Vec<Var>, Formula) {
    loop {
        let scope = if exists {
            &body
        } else {
            match &body {
                Formula::Implies(a, _) => a.as_ref(),
                _ => break,
            }
        };
        let found = scope.conjuncts().into_iter().find_map(|f| match f {
            Formula::Rel(Rel::Eq, args) => binders.iter().position(|b| {
                matches!((&args[0], &args[1]), (Term::Var(x), t) | (t, Term::Var(x))
                    if x == b && !matches!(t, Term::Var(y) if y == b))
            })
            .map(|i| {
                let other = if matches!(&args[0], Term::Var(x) if *x == binders[i]) {
                    args[1].clone()
                } else {
                    args[0].clone()
                };
                (i, other)
            }),
            _ => None,
        });
        let Some((i, t)) = found else { break };
        let b = binders.remove(i);
        body = body.substitute(&BTreeMap::from([(b, t)]));
    }
    (binders, body)
}

type Cache = RwLock<HashMap<(Backend, Expr, Expr), Formula>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// A quantifier-free formula, over the free variables and parameters of the
/// operands, that holds exactly when they denote the same value.
pub fn equality_formula(backend: Backend, e1: &Expr, e2: &Expr) -> Result<Formula> {
    let key = (backend, e1.clone(), e2.clone());
    if let Some(f) = cache().read().unwrap().get(&key) {
        return Ok(f.clone());
    }
    e1.check_backend(backend)?;
    e2.check_backend(backend)?;
    let f = backend.qe(&eq_formula(e1, e2))?;
    cache().write().unwrap().insert(key, f.clone());
    Ok(f)
}

pub fn clear_cache() {
    cache().write().unwrap().clear();
}
