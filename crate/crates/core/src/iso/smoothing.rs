use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{is_member, least_support, orbit_decomposition, orbit_expression, DefFunction, OrbitDescriptor};
use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::expr::{Comp, Expr};
use crate::structure::{check_signature, is_isomorphism, Structure};

/// Which structure an orbit belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

/// One extension of the partial bijection by a pair of orbits.
#[derive(Clone, Debug)]
pub struct SmoothingStep {
    /// 1-based position in the construction.
    pub order: usize,
    /// Side of the chosen orbit; for `Side::B` the roles of the structures
    /// were swapped for this step.
    pub side: Side,
    pub orbit: usize,
    pub target_orbit: usize,
    /// Size of the least support outside the fixed parameters.
    pub dimension: usize,
    /// The alternating sequence `(x_i, y_i)` with `y_i = f(x_i)` and
    /// `h(x_{i+1}) = y_i`, in the orientation of the step.
    pub trace: Vec<(Expr, Expr)>,
    /// Index of the last element of the trace.
    pub length: usize,
    /// The new graph piece, oriented from `A` to `B`.
    pub piece: Expr,
}

#[derive(Clone, Debug)]
pub struct SmoothingState {
    pub f: DefFunction,
    pub s: BTreeSet<Atom>,
    pub t: BTreeSet<Atom>,
    pub orbits_a: Vec<OrbitDescriptor>,
    pub orbits_b: Vec<OrbitDescriptor>,
    pub done_a: Vec<usize>,
    pub done_b: Vec<usize>,
    pub pieces: Vec<Comp>,
    pub steps: Vec<SmoothingStep>,
}

impl SmoothingState {
    /// The current partial bijection `h_n`.
    pub fn h(&self) -> DefFunction {
        DefFunction {
            backend: self.f.backend,
            dom: Expr::Union(self.done_a.iter().flat_map(|&i| self.orbits_a[i].expr().comps().unwrap()).collect()),
            cod: Expr::Union(self.done_b.iter().flat_map(|&i| self.orbits_b[i].expr().comps().unwrap()).collect()),
            graph: Expr::Union(self.pieces.clone()),
        }
    }
}

fn swap_pair(c: &Comp) -> Comp {
    let Expr::Tuple(items) = &c.elem else { unreachable!("graph pieces are pairs") };
    Comp { elem: Expr::pair(items[1].clone(), items[0].clone()), binders: c.binders.clone(), guard: c.guard.clone() }
}

/// Turns an isomorphism `f` between `t`-definable structures into a
/// `t`-definable one, extending a partial bijection one orbit at a time.
pub fn eliminate_parameters(
    f: &DefFunction,
    a: &Structure,
    b: &Structure,
    t: &BTreeSet<Atom>,
) -> Result<(DefFunction, SmoothingState)> {
    let backend = a.backend;
    check_signature(a, b)?;
    if f.backend != backend {
        return Err(Error::BackendMismatch(f.backend.to_string(), backend.to_string()));
    }
    if !backend.is_dense() {
        return Err(Error::NotDense(backend.structure().name()));
    }
    if let Some(p) = a.params().into_iter().chain(b.params()).find(|p| !t.contains(p)) {
        return Err(Error::Support(p));
    }
    if !is_isomorphism(f, a, b)? {
        return Err(Error::Function("the given map is not an isomorphism between the structures".into()));
    }
    let mut s = t.clone();
    s.extend(f.graph.params());
    s.extend(f.dom.params());
    s.extend(f.cod.params());

    let orbits_a = orbit_decomposition(backend, &a.universe, t)?;
    let orbits_b = orbit_decomposition(backend, &b.universe, t)?;
    let dims = |orbits: &[OrbitDescriptor]| -> Result<Vec<usize>> {
        orbits
            .iter()
            .map(|o| Ok(least_support(backend, &o.element())?.atoms.difference(t).count()))
            .collect()
    };
    let dims_a = dims(&orbits_a)?;
    let dims_b = dims(&orbits_b)?;
    let s_orbits_a = orbit_decomposition(backend, &a.universe, &s)?.len();
    let s_orbits_b = orbit_decomposition(backend, &b.universe, &s)?.len();

    let mut st = SmoothingState {
        f: f.clone(),
        s: s.clone(),
        t: t.clone(),
        orbits_a,
        orbits_b,
        done_a: Vec::new(),
        done_b: Vec::new(),
        pieces: Vec::new(),
        steps: Vec::new(),
    };
    let f_inv = f.inverse();
    loop {
        let remaining = |side: Side, done: &[usize], dims: &[usize]| {
            (0..dims.len()).filter(move |i| !done.contains(i)).map(move |i| (dims[i], side, i)).collect::<Vec<_>>()
        };
        let mut cands = remaining(Side::A, &st.done_a, &dims_a);
        cands.extend(remaining(Side::B, &st.done_b, &dims_b));
        let Some(&(dimension, side, orbit)) = cands
            .iter()
            .max_by_key(|(d, side, i)| (*d, std::cmp::Reverse(*side), std::cmp::Reverse(*i)))
        else {
            break;
        };
        let h = st.h();
        let (forward, h_fwd, src, tgt, done_tgt, bound) = match side {
            Side::A => (f, h, &st.orbits_a, &st.orbits_b, &st.done_b, s_orbits_b),
            Side::B => (&f_inv, h.inverse(), &st.orbits_b, &st.orbits_a, &st.done_a, s_orbits_a),
        };
        let codom = h_fwd.second_projection();
        let h_back = h_fwd.inverse();

        // an independent node of the chosen orbit
        let rep = src[orbit].element();
        let params: Vec<Atom> = rep.params().into_iter().collect();
        let moved = backend.independent_realization(t, &s, &params)?;
        let map: BTreeMap<Atom, Atom> = params.iter().copied().zip(moved).collect();
        let x0 = rep.map_atoms(&mut |p| map.get(p).copied().unwrap_or(*p));

        let mut trace: Vec<(Expr, Expr)> = Vec::new();
        let mut seen: Vec<Expr> = Vec::new();
        let mut x = x0.clone();
        let y_last = loop {
            let y = forward.apply(&x)?;
            for o in &seen {
                if is_member(backend, &y, o)? {
                    return Err(Error::Internal(format!("alternating sequence revisited the orbit of {y}")));
                }
            }
            seen.push(orbit_expression(backend, &y, &s)?);
            trace.push((x.clone(), y.clone()));
            if !is_member(backend, &y, &codom)? {
                break y;
            }
            if trace.len() > bound {
                return Err(Error::Internal("alternating sequence exceeded the orbit bound".into()));
            }
            x = h_back.apply(&y)?;
        };
        let target_orbit = (0..tgt.len())
            .filter(|j| !done_tgt.contains(j))
            .map(|j| is_member(backend, &y_last, &tgt[j].expr()).map(|m| (j, m)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find_map(|(j, m)| m.then_some(j))
            .ok_or_else(|| Error::Internal(format!("{y_last} lies in no remaining orbit")))?;

        let piece = orbit_expression(backend, &Expr::pair(x0.clone(), y_last.clone()), t)?;
        let check = DefFunction { backend, dom: src[orbit].expr(), cod: tgt[target_orbit].expr(), graph: piece.clone() };
        if !check.check().is_bijection() {
            return Err(Error::Internal(format!("orbit closure {piece} is not a bijection between orbits")));
        }
        let oriented: Vec<Comp> = match side {
            Side::A => piece.comps()?,
            Side::B => piece.comps()?.iter().map(swap_pair).collect(),
        };
        match side {
            Side::A => {
                st.done_a.push(orbit);
                st.done_b.push(target_orbit);
            }
            Side::B => {
                st.done_b.push(orbit);
                st.done_a.push(target_orbit);
            }
        }
        st.pieces.extend(oriented.iter().cloned());
        let length = trace.len() - 1;
        st.steps.push(SmoothingStep {
            order: st.steps.len() + 1,
            side,
            orbit,
            target_orbit,
            dimension,
            trace,
            length,
            piece: Expr::Union(oriented),
        });
        debug_assert_eq!(st.done_a.len(), st.done_b.len());
    }
    let h = DefFunction::new(backend, a.universe.clone(), b.universe.clone(), Expr::Union(st.pieces.clone()).canonical())?;
    if !is_isomorphism(&h, a, b)? {
        return Err(Error::Internal(format!("constructed map is not an isomorphism: {}", h.graph)));
    }
    Ok((h, st))
}
