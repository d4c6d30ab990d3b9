use std::collections::BTreeMap;

use serde::Serialize;

use super::check_closed;
use crate::error::{Error, Result};
use crate::expr::{eq_formula, member_formula, subset_formula, Comp, Expr};
use crate::formula::{Formula, Rel, Term};
use crate::theory::Backend;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FnFlags {
    /// The graph is contained in `dom × cod`.
    pub contained: bool,
    pub functional: bool,
    pub total: bool,
    pub injective: bool,
    pub surjective: bool,
}

impl FnFlags {
    pub fn is_function(&self) -> bool {
        self.contained && self.functional && self.total
    }

    pub fn is_bijection(&self) -> bool {
        self.is_function() && self.injective && self.surjective
    }
}

/// A function given by definable domain, codomain and graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefFunction {
    pub backend: Backend,
    pub dom: Expr,
    pub cod: Expr,
    /// A set of pairs.
    pub graph: Expr,
}

impl DefFunction {
    pub fn new(backend: Backend, dom: Expr, cod: Expr, graph: Expr) -> Result<DefFunction> {
        for e in [&dom, &cod, &graph] {
            check_closed(backend, e)?;
        }
        if !dom.is_set() || !cod.is_set() || !graph.is_set() {
            return Err(Error::Function("domain, codomain and graph must be sets".into()));
        }
        for c in graph.comps()? {
            if !matches!(c.elem, Expr::Tuple(ref items) if items.len() == 2) {
                return Err(Error::Function(format!("graph element `{}` is not a pair", c.elem)));
            }
        }
        Ok(DefFunction { backend, dom, cod, graph })
    }

    /// The identity function on a set.
    pub fn identity(backend: Backend, set: &Expr) -> Result<DefFunction> {
        let graph = Expr::Union(
            set.comps()?
                .into_iter()
                .map(|c| Comp { elem: Expr::pair(c.elem.clone(), c.elem), binders: c.binders, guard: c.guard })
                .collect(),
        );
        DefFunction::new(backend, set.clone(), set.clone(), graph)
    }

    fn pairs(&self) -> Vec<(Comp, Expr, Expr)> {
        self.graph
            .comps()
            .unwrap_or_default()
            .into_iter()
            .map(|c| {
                let Expr::Tuple(items) = &c.elem else { unreachable!() };
                let (x, y) = (items[0].clone(), items[1].clone());
                (c, x, y)
            })
            .collect()
    }

    fn projection(&self, second: bool) -> Expr {
        Expr::Union(
            self.pairs()
                .into_iter()
                .map(|(c, x, y)| Comp { elem: if second { y } else { x }, binders: c.binders, guard: c.guard })
                .collect(),
        )
    }

    /// Domain of definition: the first projection of the graph.
    pub fn first_projection(&self) -> Expr {
        self.projection(false)
    }

    pub fn second_projection(&self) -> Expr {
        self.projection(true)
    }

    /// `forall pairs p, q of the graph: p.i = q.i -> p.j = q.j`
    fn determined(&self, by_second: bool) -> Formula {
        let pairs = self.pairs();
        let mut conj = Vec::new();
        for (i, (c1, _, _)) in pairs.iter().enumerate() {
            for (c2, _, _) in pairs.iter().skip(i) {
                let (c1, c2) = (c1.freshened(), c2.freshened());
                let parts = |c: &Comp| match &c.elem {
                    Expr::Tuple(items) => (items[0].clone(), items[1].clone()),
                    _ => unreachable!(),
                };
                let ((x1, y1), (x2, y2)) = (parts(&c1), parts(&c2));
                let (k1, k2, v1, v2) = if by_second { (y1, y2, x1, x2) } else { (x1, x2, y1, y2) };
                let binders: Vec<_> = c1.binders.iter().chain(c2.binders.iter()).cloned().collect();
                conj.push(Formula::forall_many(
                    &binders,
                    Formula::implies(
                        Formula::and([c1.guard.clone(), c2.guard.clone(), eq_formula(&k1, &k2)]),
                        eq_formula(&v1, &v2),
                    ),
                ));
            }
        }
        Formula::and(conj)
    }

    pub fn functional_formula(&self) -> Formula {
        self.determined(false)
    }

    pub fn injective_formula(&self) -> Formula {
        self.determined(true)
    }

    pub fn contained_formula(&self) -> Formula {
        Formula::and(self.pairs().into_iter().map(|(c, x, y)| {
            Formula::forall_many(
                &c.binders,
                Formula::implies(
                    c.guard.clone(),
                    Formula::and([member_formula(&x, &self.dom), member_formula(&y, &self.cod)]),
                ),
            )
        }))
    }

    pub fn total_formula(&self) -> Formula {
        subset_formula(&self.dom, &self.first_projection())
    }

    pub fn surjective_formula(&self) -> Formula {
        subset_formula(&self.cod, &self.second_projection())
    }

    pub fn check(&self) -> FnFlags {
        let b = self.backend;
        FnFlags {
            contained: b.holds_unchecked(&self.contained_formula()),
            functional: b.holds_unchecked(&self.functional_formula()),
            total: b.holds_unchecked(&self.total_formula()),
            injective: b.holds_unchecked(&self.injective_formula()),
            surjective: b.holds_unchecked(&self.surjective_formula()),
        }
    }

    /// The value at `x`, read off a witness pair of the graph.
    pub fn apply(&self, x: &Expr) -> Result<Expr> {
        check_closed(self.backend, x)?;
        for (c, first, second) in self.pairs() {
            // keep every binder free so that the witness assigns it
            let keep = c.binders.iter().map(|v| Formula::Rel(Rel::Eq, vec![Term::Var(v.clone()); 2]));
            let body = Formula::and([c.guard.clone(), eq_formula(x, &first)].into_iter().chain(keep));
            if let Some(w) = self.backend.find_witness(&body)? {
                let map: BTreeMap<_, _> = w.into_iter().map(|(v, a)| (v, Term::Atom(a))).collect();
                return Ok(second.substitute(&map).canonical());
            }
        }
        Err(Error::NotInDomain(x.to_string()))
    }

    /// The inverse relation, from codomain to domain.
    pub fn inverse(&self) -> DefFunction {
        let graph = Expr::Union(
            self.pairs()
                .into_iter()
                .map(|(c, x, y)| Comp { elem: Expr::pair(y, x), binders: c.binders, guard: c.guard })
                .collect(),
        );
        DefFunction { backend: self.backend, dom: self.cod.clone(), cod: self.dom.clone(), graph }
    }
}
