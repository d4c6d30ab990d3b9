//! Atom structures: the pluggable backends that every definable set is built
//! over, together with their decision procedures.

mod cyclic;
mod dlo;
mod equality;
pub(crate) mod eval;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::atom::{Atom, AtomMap};
use crate::error::{Error, Result};
use crate::formula::{eval_rel_on_atoms, Formula, Rel, Term, Var};

pub use cyclic::CyclicOrder;
pub use dlo::DenseOrder;
pub use equality::PureSet;

use eval::Prepared;

/// A homogeneous, effectively ω-categorical relational structure of atoms.
///
/// Homogeneity is what the rest of the crate relies on: two tuples lie in the
/// same orbit (over a finite set of fixed atoms) iff they have the same
/// quantifier-free diagram, so [`AtomStructure::type_key`] identifies orbits
/// and [`AtomStructure::extension_candidates`] can realize every 1-type over a
/// finite set of atoms.
pub trait AtomStructure: Send + Sync {
    fn name(&self) -> &'static str;

    fn vocabulary(&self) -> &'static [Rel];

    /// Whether the atom has the representation this structure uses.
    fn accepts(&self, atom: &Atom) -> bool;

    fn holds(&self, rel: Rel, args: &[Atom]) -> bool {
        eval_rel_on_atoms(rel, args).unwrap_or(false)
    }

    /// Atoms realizing every 1-type over `known` other than equality with a
    /// known atom, in the preferred order. `known` is sorted and deduplicated.
    fn fresh_candidates(&self, known: &[Atom]) -> Vec<Atom>;

    /// One atom per 1-type over `known`: the known atoms, then fresh ones.
    fn extension_candidates(&self, known: &[Atom]) -> Vec<Atom> {
        let mut out = known.to_vec();
        out.extend(self.fresh_candidates(known));
        out
    }

    /// A key that is equal for two tuples iff they lie in the same orbit.
    fn type_key(&self, atoms: &[Atom]) -> Vec<u8>;

    /// A quantifier-free formula defining the orbit of the listed values.
    /// Terms are variables, or atoms standing for themselves (fixed
    /// parameters); parameter items come first.
    fn type_formula(&self, items: &[(Term, Atom)]) -> Formula;

    fn is_dense(&self) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Equality,
    Dlo,
    Cyclic,
}

static PURE_SET: PureSet = PureSet;
static DENSE_ORDER: DenseOrder = DenseOrder;
static CYCLIC_ORDER: CyclicOrder = CyclicOrder;

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.structure().name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Backend> {
        match s {
            "equality" => Ok(Backend::Equality),
            "dlo" => Ok(Backend::Dlo),
            "cyclic" => Ok(Backend::Cyclic),
            other => Err(Error::Input(format!("unknown backend `{other}`"))),
        }
    }
}

/// A finite assignment of atoms to variables.
pub type Valuation = BTreeMap<Var, Atom>;

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Equality, Backend::Dlo, Backend::Cyclic];

    pub fn structure(self) -> &'static dyn AtomStructure {
        match self {
            Backend::Equality => &PURE_SET,
            Backend::Dlo => &DENSE_ORDER,
            Backend::Cyclic => &CYCLIC_ORDER,
        }
    }

    pub fn is_dense(self) -> bool {
        self.structure().is_dense()
    }

    pub fn check_atom(self, a: &Atom) -> Result<()> {
        if self.structure().accepts(a) {
            Ok(())
        } else {
            Err(Error::Vocabulary(format!("atom {a} does not belong to the {self} backend")))
        }
    }

    pub fn check_formula(self, f: &Formula) -> Result<()> {
        let mut rels = BTreeSet::new();
        f.relations(&mut rels);
        let vocab = self.structure().vocabulary();
        if let Some(r) = rels.iter().find(|r| !vocab.contains(r)) {
            return Err(Error::Vocabulary(format!(
                "relation `{}` is not in the {self} vocabulary",
                r.symbol()
            )));
        }
        f.params().iter().try_for_each(|a| self.check_atom(a))
    }

    /// Truth of `f` under `val`, which must cover its free variables.
    pub fn sat(self, f: &Formula, val: &Valuation) -> Result<bool> {
        self.check_formula(f)?;
        let free = f.free_vars();
        let values = free
            .iter()
            .map(|v| val.get(v).copied().ok_or_else(|| Error::Valuation(v.name().into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Prepared::new(f, &free)?.eval(self.structure(), &values))
    }

    /// Truth of a sentence (a formula without free variables).
    pub fn holds(self, f: &Formula) -> Result<bool> {
        self.sat(f, &Valuation::new())
    }

    pub(crate) fn holds_unchecked(self, f: &Formula) -> bool {
        match Prepared::new(f, &[]) {
            Ok(p) => p.eval(self.structure(), &[]),
            Err(e) => panic!("formula with free variables passed as a sentence: {e}"),
        }
    }

    /// Tuples realizing each orbit of `vars.len()`-tuples over the fixed atoms
    /// `fixed`, one representative per orbit, in canonical enumeration order.
    /// `keep(prefix_len, prefix)` may reject partial tuples; it must depend
    /// only on the orbit of the prefix.
    pub fn enumerate_types(
        self,
        arity: usize,
        fixed: &[Atom],
        mut keep: impl FnMut(usize, &[Atom]) -> bool,
    ) -> Vec<Vec<Atom>> {
        let st = self.structure();
        let mut fixed: Vec<Atom> = fixed.to_vec();
        fixed.sort();
        fixed.dedup();
        let mut level: Vec<Vec<Atom>> = vec![Vec::new()];
        for i in 0..arity {
            let mut next = Vec::new();
            let mut seen: HashSet<Vec<u8>> = HashSet::new();
            for prefix in &level {
                let mut known: Vec<Atom> = fixed.iter().chain(prefix.iter()).copied().collect();
                known.sort();
                known.dedup();
                for c in st.extension_candidates(&known) {
                    let mut tuple = prefix.clone();
                    tuple.push(c);
                    let all: Vec<Atom> = fixed.iter().chain(tuple.iter()).copied().collect();
                    if seen.insert(st.type_key(&all)) && keep(i + 1, &tuple) {
                        next.push(tuple);
                    }
                }
            }
            level = next;
        }
        level
    }

    /// The complete type over `fixed` of `values`, as a formula in `vars`.
    pub fn type_of(self, vars: &[Var], values: &[Atom], fixed: &BTreeSet<Atom>) -> Formula {
        let items: Vec<(Term, Atom)> = fixed
            .iter()
            .map(|a| (Term::Atom(*a), *a))
            .chain(vars.iter().cloned().map(Term::Var).zip(values.iter().copied()))
            .collect();
        self.structure().type_formula(&items)
    }

    /// Pairwise inconsistent, jointly exhaustive quantifier-free formulas,
    /// each defining one orbit of tuples over the fixed atoms.
    pub fn complete_types(self, vars: &[Var], fixed: &BTreeSet<Atom>) -> Vec<Formula> {
        let fixed_list: Vec<Atom> = fixed.iter().copied().collect();
        self.enumerate_types(vars.len(), &fixed_list, |_, _| true)
            .iter()
            .map(|t| self.type_of(vars, t, fixed))
            .collect()
    }

    /// Number of orbits of n-tuples of atoms.
    pub fn rn_count(self, n: usize) -> usize {
        self.enumerate_types(n, &[], |_, _| true).len()
    }

    /// A quantifier-free formula equivalent to `f`, over the free variables
    /// and parameters of `f`.
    pub fn qe(self, f: &Formula) -> Result<Formula> {
        self.check_formula(f)?;
        if f.is_quantifier_free() {
            return Ok(f.fold());
        }
        let free = f.free_vars();
        let params = f.params();
        let fixed: Vec<Atom> = params.iter().copied().collect();
        let prepared = Prepared::new(f, &free)?;
        let st = self.structure();
        let types = self.enumerate_types(free.len(), &fixed, |_, _| true);
        let total = types.len();
        let disjuncts: Vec<Formula> = types
            .into_iter()
            .filter(|t| prepared.eval(st, t))
            .map(|t| self.type_of(&free, &t, &params))
            .collect();
        if disjuncts.len() == total {
            return Ok(Formula::True);
        }
        Ok(Formula::or(disjuncts))
    }

    /// A satisfying valuation of the free variables of `f`, chosen
    /// deterministically: parameters and earlier choices first, then the
    /// least fresh atom (least id, or the gap representative in ascending
    /// order).
    pub fn find_witness(self, f: &Formula) -> Result<Option<Valuation>> {
        self.check_formula(f)?;
        let vars = f.free_vars();
        let params: Vec<Atom> = f.params().into_iter().collect();
        let st = self.structure();
        let closure = |from: usize| Formula::exists_many(&vars[from..], f.clone());
        if !Prepared::new(&closure(0), &[])?.eval(st, &[]) {
            return Ok(None);
        }
        let mut chosen: Vec<Atom> = Vec::new();
        for i in 0..vars.len() {
            let rest = Prepared::new(&closure(i + 1), &vars[..=i])?;
            let mut known: Vec<Atom> = params.iter().chain(chosen.iter()).copied().collect();
            known.sort();
            known.dedup();
            let found = st.extension_candidates(&known).into_iter().find(|c| {
                let mut vals = chosen.clone();
                vals.push(*c);
                rest.eval(st, &vals)
            });
            match found {
                Some(c) => chosen.push(c),
                None => return Err(Error::Internal("witness search lost satisfiability".into())),
            }
        }
        Ok(Some(vars.into_iter().zip(chosen).collect()))
    }

    /// Whether the finite map preserves and reflects every relation.
    pub fn is_partial_automorphism(self, map: &AtomMap) -> bool {
        let st = self.structure();
        let (dom, img): (Vec<Atom>, Vec<Atom>) = map.iter().map(|(a, b)| (*a, *b)).unzip();
        dom.iter().chain(img.iter()).all(|a| st.accepts(a)) && st.type_key(&dom) == st.type_key(&img)
    }

    pub fn partial_automorphism<I: IntoIterator<Item = (Atom, Atom)>>(self, pairs: I) -> Result<AtomMap> {
        let map = AtomMap::from_pairs(pairs)?;
        if !self.is_partial_automorphism(&map) {
            return Err(Error::NotPartialAutomorphism(format!(
                "the map does not preserve the {self} structure"
            )));
        }
        Ok(map)
    }

    /// Extends a finite partial automorphism to the given atoms, one at a
    /// time: the image of a new atom realizes its type over the current
    /// domain, transported along the map.
    pub fn extend_map(self, map: &AtomMap, atoms: &[Atom]) -> Result<AtomMap> {
        let mut map = map.clone();
        let x = Var::new("x");
        for a in atoms {
            if map.get(a).is_some() {
                continue;
            }
            self.check_atom(a)?;
            let dom: BTreeSet<Atom> = map.domain().copied().collect();
            let ty = self.type_of(std::slice::from_ref(&x), &[*a], &dom);
            let moved = ty.map_atoms(&mut |b| map.get(b).unwrap_or(*b));
            let witness = self
                .find_witness(&moved)?
                .ok_or_else(|| Error::Internal(format!("cannot extend the map to {a}")))?;
            let image = witness.get(&x).copied().unwrap_or_else(|| {
                // The type was trivial: any atom outside the image works.
                let img: Vec<Atom> = {
                    let mut v: Vec<Atom> = map.iter().map(|(_, b)| *b).collect();
                    v.sort();
                    v
                };
                self.structure().fresh_candidates(&img)[0]
            });
            map.insert_unchecked(*a, image);
        }
        Ok(map)
    }

    /// `n` distinct atoms inside a region `H(Atoms)` witnessing denseness for
    /// the fixed set `s`: every automorphism of the region extends to an
    /// automorphism fixing `s`.
    pub fn independent_atoms(self, s: &BTreeSet<Atom>, n: usize) -> Result<Vec<Atom>> {
        self.independent_in(&BTreeSet::new(), s, n)
    }

    fn independent_in(self, fixed: &BTreeSet<Atom>, s: &BTreeSet<Atom>, n: usize) -> Result<Vec<Atom>> {
        match self {
            Backend::Cyclic => Err(Error::NotDense("cyclic")),
            Backend::Equality => {
                let mut taken: Vec<Atom> = s.iter().chain(fixed.iter()).copied().collect();
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let a = equality::least_fresh_id(&taken);
                    taken.push(a);
                    out.push(a);
                }
                Ok(out)
            }
            Backend::Dlo => {
                let (lo, hi) = independent_interval(fixed, s, None, None);
                Ok(simplest_rationals(lo, hi, n))
            }
        }
    }

    /// Moves the atoms of `tuple` that are not in `fixed` into the
    /// denseness region for `(fixed, s)`, keeping the type of the tuple over
    /// `fixed`. The result is the canonical S-independent realization of
    /// that type.
    pub fn independent_realization(
        self,
        fixed: &BTreeSet<Atom>,
        s: &BTreeSet<Atom>,
        tuple: &[Atom],
    ) -> Result<Vec<Atom>> {
        let moving: BTreeSet<Atom> = tuple.iter().filter(|a| !fixed.contains(a)).copied().collect();
        let mut image: BTreeMap<Atom, Atom> = BTreeMap::new();
        match self {
            Backend::Cyclic => return Err(Error::NotDense("cyclic")),
            Backend::Equality => {
                let fresh = self.independent_in(fixed, s, moving.len())?;
                image.extend(moving.iter().copied().zip(fresh));
            }
            Backend::Dlo => {
                // Group the moving atoms by the gap between fixed atoms they lie in.
                let mut by_gap: BTreeMap<(Option<Atom>, Option<Atom>), Vec<Atom>> = BTreeMap::new();
                for a in &moving {
                    let lo = fixed.range(..*a).next_back().copied();
                    let hi = fixed.range(*a..).next().copied();
                    by_gap.entry((lo, hi)).or_default().push(*a);
                }
                for ((lo, hi), atoms) in by_gap {
                    let (l, h) = independent_interval(fixed, s, lo, hi);
                    let targets = simplest_rationals(l, h, atoms.len());
                    image.extend(atoms.into_iter().zip(targets));
                }
            }
        }
        Ok(tuple.iter().map(|a| *image.get(a).unwrap_or(a)).collect())
    }
}

/// An open interval inside the gap `(lo, hi)` of `fixed` containing no atom of
/// `s`: between the first two atoms of `s` in the gap, or right after the only
/// one, or the whole gap (made bounded) when there are none.
fn independent_interval(
    _fixed: &BTreeSet<Atom>,
    s: &BTreeSet<Atom>,
    lo: Option<Atom>,
    hi: Option<Atom>,
) -> (Rational64, Rational64) {
    let lo = lo.and_then(|a| a.as_rational());
    let hi = hi.and_then(|a| a.as_rational());
    let inside: Vec<Rational64> = s
        .iter()
        .filter_map(Atom::as_rational)
        .filter(|r| lo.is_none_or(|l| *r > l) && hi.is_none_or(|h| *r < h))
        .collect();
    let one = Rational64::one();
    match (inside.as_slice(), lo, hi) {
        ([a, b, ..], _, _) => (*a, *b),
        ([a], _, Some(h)) => (*a, (*a + one).min(h)),
        ([a], _, None) => (*a, *a + one),
        ([], Some(l), Some(h)) => (l, h),
        ([], Some(l), None) => (l, l + one),
        ([], None, Some(h)) => (h - one, h),
        ([], None, None) => (Rational64::from_integer(0), one),
    }
}

/// The `n` simplest rationals (least denominator, then least value) strictly
/// between `lo` and `hi`, in ascending order.
fn simplest_rationals(lo: Rational64, hi: Rational64, n: usize) -> Vec<Atom> {
    let mut out: Vec<Rational64> = Vec::with_capacity(n);
    let mut q: i64 = 1;
    while out.len() < n {
        let qr = Rational64::from_integer(q);
        let start = (lo * qr).floor().to_integer() + 1;
        let end = (hi * qr).ceil().to_integer() - 1;
        for p in start..=end {
            let r = Rational64::new(p, q);
            if *r.denom() == q && out.len() < n {
                out.push(r);
            }
        }
        q += 1;
    }
    out.sort();
    out.into_iter().map(Atom::Rat).collect()
}
