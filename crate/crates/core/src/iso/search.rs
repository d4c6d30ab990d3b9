use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{Certificate, Mode, Stats, Verdict, HOM_CAVEAT};
use crate::algebra::{definable_subsets, orbit_decomposition, product, DefFunction, OrbitDescriptor, DEFAULT_SUBSET_BUDGET};
use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::expr::{Comp, Expr};
use crate::structure::{check_signature, morphism_formula, Structure};

/// An orbit of `A × B` that is the graph of a function from one orbit of
/// `A` (onto one orbit of `B`).
#[derive(Clone, Debug)]
pub struct OrbitGraph {
    pub a_orbit: usize,
    pub b_orbit: usize,
    pub piece: OrbitDescriptor,
}

impl OrbitGraph {
    pub fn comp(&self) -> Comp {
        let Expr::Union(mut cs) = self.piece.expr() else { unreachable!() };
        cs.pop().unwrap()
    }
}

/// Upper bound on the number of orbits of `A × B` examined.
pub const ORBIT_BUDGET: u128 = 1 << 16;

pub(crate) fn orbit_graphs(
    a: &Structure,
    t: &BTreeSet<Atom>,
    mode: Mode,
    orbits_a: &[OrbitDescriptor],
    orbits_b: &[OrbitDescriptor],
    budget: u128,
) -> Result<Vec<OrbitGraph>> {
    let backend = a.backend;
    let pairs: Vec<(usize, usize)> =
        (0..orbits_a.len()).flat_map(|i| (0..orbits_b.len()).map(move |j| (i, j))).collect();
    let found: Vec<Result<Vec<OrbitGraph>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (oa, ob) = (orbits_a[i].expr(), orbits_b[j].expr());
            let pieces = orbit_decomposition(backend, &product(&[oa.clone(), ob.clone()])?, t)?;
            let mut out = Vec::new();
            for piece in pieces {
                let f = DefFunction { backend, dom: oa.clone(), cod: ob.clone(), graph: piece.expr() };
                let ok = backend.holds_unchecked(&f.functional_formula())
                    && (mode == Mode::Hom || backend.holds_unchecked(&f.injective_formula()));
                if ok {
                    out.push(OrbitGraph { a_orbit: i, b_orbit: j, piece });
                }
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for r in found {
        out.extend(r?);
    }
    if out.len() as u128 > budget {
        return Err(Error::Budget { what: "orbit graphs", count: out.len() as u128, limit: budget });
    }
    Ok(out)
}

/// The orbits of `A × B` over `t` that are graphs of bijections between an
/// orbit of `A` and an orbit of `B`.
pub fn bijective_orbit_graphs(a: &Structure, b: &Structure, t: &BTreeSet<Atom>) -> Result<Vec<OrbitGraph>> {
    check_signature(a, b)?;
    let oa = orbit_decomposition(a.backend, &a.universe, t)?;
    let ob = orbit_decomposition(b.backend, &b.universe, t)?;
    orbit_graphs(a, t, Mode::Iso, &oa, &ob, ORBIT_BUDGET)
}

struct Search<'a> {
    a: &'a Structure,
    b: &'a Structure,
    mode: Mode,
    order: Vec<usize>,
    by_orbit: Vec<Vec<usize>>,
    graphs: &'a [OrbitGraph],
    comps: Vec<Comp>,
}

impl Search<'_> {
    /// Tries `g` as the next piece; returns whether the partial map is still
    /// a morphism.
    fn accept(&self, chosen: &[usize], g: usize) -> bool {
        let mut pieces: Vec<Comp> = chosen.iter().map(|&i| self.comps[i].clone()).collect();
        pieces.push(self.comps[g].clone());
        let f = morphism_formula(self.a, self.b, &pieces, chosen.len(), self.mode != Mode::Hom);
        self.a.backend.holds_unchecked(&f)
    }

    fn run(&self, depth: usize, chosen: &mut Vec<usize>, used_b: &mut Vec<bool>, count: &mut u64) -> bool {
        if depth == self.order.len() {
            return true;
        }
        for &g in &self.by_orbit[self.order[depth]] {
            let bo = self.graphs[g].b_orbit;
            if self.mode != Mode::Hom && used_b[bo] {
                continue;
            }
            *count += 1;
            if !self.accept(chosen, g) {
                continue;
            }
            chosen.push(g);
            used_b[bo] = true;
            if self.run(depth + 1, chosen, used_b, count) {
                return true;
            }
            chosen.pop();
            used_b[bo] = false;
        }
        false
    }
}

fn union_of(comps: impl IntoIterator<Item = Comp>) -> Expr {
    Expr::Union(comps.into_iter().collect()).simplify().canonical()
}

/// Verifies a candidate graph against the requirements of `mode`.
pub(crate) fn verify(a: &Structure, b: &Structure, graph: &Expr, mode: Mode) -> Result<bool> {
    let f = DefFunction { backend: a.backend, dom: a.universe.clone(), cod: b.universe.clone(), graph: graph.clone() };
    let flags = f.check();
    let shape = match mode {
        Mode::Iso => flags.is_bijection(),
        Mode::Emb => flags.is_function() && flags.injective,
        Mode::Hom => flags.is_function(),
    };
    let pieces = graph.comps()?;
    Ok(shape && a.backend.holds_unchecked(&morphism_formula(a, b, &pieces, 0, mode != Mode::Hom)))
}

fn certificate(verdict: Verdict, witness: Option<Expr>, t: &BTreeSet<Atom>, stats: Stats, mode: Mode) -> Certificate {
    Certificate {
        verdict,
        witness,
        params: t.clone(),
        stats,
        caveat: (mode != Mode::Iso).then(|| HOM_CAVEAT.to_string()),
    }
}

/// Searches for a `t`-definable isomorphism (or homomorphism, embedding)
/// assembled from orbit graphs, one per orbit of `A`.
pub fn find_t_definable_iso(a: &Structure, b: &Structure, t: &BTreeSet<Atom>, mode: Mode) -> Result<Certificate> {
    find_t_definable_iso_within(a, b, t, mode, ORBIT_BUDGET)
}

/// [`find_t_definable_iso`] with an explicit bound on the number of orbit graphs.
pub fn find_t_definable_iso_within(
    a: &Structure,
    b: &Structure,
    t: &BTreeSet<Atom>,
    mode: Mode,
    budget: u128,
) -> Result<Certificate> {
    check_signature(a, b)?;
    let orbits_a = orbit_decomposition(a.backend, &a.universe, t)?;
    let orbits_b = orbit_decomposition(b.backend, &b.universe, t)?;
    let mut stats = Stats { orbits_a: orbits_a.len(), orbits_b: orbits_b.len(), candidates: 0 };
    let impossible = match mode {
        Mode::Iso => orbits_a.len() != orbits_b.len(),
        Mode::Emb => orbits_a.len() > orbits_b.len(),
        Mode::Hom => orbits_b.is_empty() && !orbits_a.is_empty(),
    };
    if impossible {
        return Ok(certificate(Verdict::NotFound, None, t, stats, mode));
    }
    let graphs = orbit_graphs(a, t, mode, &orbits_a, &orbits_b, budget)?;
    let mut by_orbit = vec![Vec::new(); orbits_a.len()];
    for (g, og) in graphs.iter().enumerate() {
        by_orbit[og.a_orbit].push(g);
    }
    let mut order: Vec<usize> = (0..orbits_a.len()).collect();
    order.sort_by_key(|&i| {
        let o = &orbits_a[i];
        (std::cmp::Reverse((o.clause.binders.len(), o.ty.size())), i)
    });
    let search = Search { a, b, mode, order, by_orbit, graphs: &graphs, comps: graphs.iter().map(OrbitGraph::comp).collect() };
    let result: Option<Vec<usize>> = if search.order.is_empty() {
        Some(Vec::new())
    } else {
        let first = &search.by_orbit[search.order[0]];
        let branches: Vec<(Option<Vec<usize>>, u64)> = first
            .par_iter()
            .map(|&g| {
                let mut count = 1;
                let mut used = vec![false; orbits_b.len()];
                if !search.accept(&[], g) {
                    return (None, count);
                }
                used[graphs[g].b_orbit] = true;
                let mut chosen = vec![g];
                let ok = search.run(1, &mut chosen, &mut used, &mut count);
                (ok.then_some(chosen), count)
            })
            .collect();
        stats.candidates = branches.iter().map(|(_, c)| c).sum();
        branches.into_iter().find_map(|(r, _)| r)
    };
    match result {
        Some(mut chosen) => {
            chosen.sort_by_key(|&g| graphs[g].a_orbit);
            let witness = union_of(chosen.iter().map(|&g| search.comps[g].clone()));
            if !verify(a, b, &witness, mode)? {
                return Err(Error::Internal(format!("assembled witness failed verification: {witness}")));
            }
            Ok(certificate(Verdict::Found, Some(witness), t, stats, mode))
        }
        None => Ok(certificate(Verdict::NotFound, None, t, stats, mode)),
    }
}

/// Reference search: tries every `t`-definable subset of `A × B`.
pub fn find_t_definable_iso_naive(
    a: &Structure,
    b: &Structure,
    t: &BTreeSet<Atom>,
    mode: Mode,
) -> Result<Certificate> {
    check_signature(a, b)?;
    let orbits_a = orbit_decomposition(a.backend, &a.universe, t)?.len();
    let orbits_b = orbit_decomposition(b.backend, &b.universe, t)?.len();
    let all = product(&[a.universe.clone(), b.universe.clone()])?;
    let mut stats = Stats { orbits_a, orbits_b, candidates: 0 };
    for r in definable_subsets(a.backend, &all, t, DEFAULT_SUBSET_BUDGET)? {
        stats.candidates += 1;
        if verify(a, b, &r, mode)? {
            return Ok(certificate(Verdict::Found, Some(r.simplify().canonical()), t, stats, mode));
        }
    }
    Ok(certificate(Verdict::NotFound, None, t, stats, mode))
}
