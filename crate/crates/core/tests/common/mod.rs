//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use atomiso::algebra::orbit_decomposition;
use atomiso::structure::{Relation, Structure};
use atomiso::{Atom, AtomMap, Backend, Comp, Expr, Formula, Rel, Term, Var};
use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub mod invariants;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn constants(b: Backend) -> Vec<Atom> {
    match b {
        Backend::Equality => vec![Atom::Id(1), Atom::Id(2), Atom::Id(3)],
        _ => vec![Atom::int(0), Atom::int(1), Atom::rat(1, 2)],
    }
}

fn rat(a: &Atom) -> Rational64 {
    a.as_rational().expect("rational atom")
}

/// `known` plus `k` new points in every gap (equality: `k` fresh ids).
pub fn refine(b: Backend, known: &BTreeSet<Atom>, k: usize) -> Vec<Atom> {
    let mut out = known.clone();
    match b {
        Backend::Equality => {
            let max = known.iter().filter_map(Atom::as_id).max().unwrap_or(0);
            for i in 1..=k as u64 {
                out.insert(Atom::Id(max + i));
            }
        }
        Backend::Dlo | Backend::Cyclic => {
            let pts: Vec<Rational64> = known.iter().map(rat).collect();
            if pts.is_empty() {
                for i in 0..k as i64 {
                    out.insert(Atom::int(i));
                }
            } else {
                let (lo, hi) = (pts[0], pts[pts.len() - 1]);
                for i in 1..=k as i64 {
                    out.insert(Atom::Rat(lo - i));
                    out.insert(Atom::Rat(hi + i));
                }
                for w in pts.windows(2) {
                    for i in 1..=k as i64 {
                        out.insert(Atom::Rat(w[0] + (w[1] - w[0]) * Rational64::new(i, k as i64 + 1)));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

pub fn rel_holds(r: Rel, v: &[Atom]) -> bool {
    match r {
        Rel::Eq => v[0] == v[1],
        Rel::Lt => rat(&v[0]) < rat(&v[1]),
        Rel::Le => rat(&v[0]) <= rat(&v[1]),
        Rel::Cyc => {
            let (a, b, c) = (rat(&v[0]), rat(&v[1]), rat(&v[2]));
            (a < b && b < c) || (b < c && c < a) || (c < a && a < b)
        }
    }
}

pub type Env = Vec<(Var, Atom)>;

fn lookup(env: &Env, v: &Var) -> Atom {
    env.iter().rev().find(|(w, _)| w == v).unwrap_or_else(|| panic!("unbound {v}")).1
}

/// Truth of `f` in the infinite structure. Each quantifier ranges over the
/// atoms in play plus one point in every gap between them, which meets
/// every 1-type over those atoms.
pub fn brute(b: Backend, f: &Formula, env: &mut Env) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Rel(r, args) => {
            let vals: Vec<Atom> = args
                .iter()
                .map(|t| match t {
                    Term::Atom(a) => *a,
                    Term::Var(v) => lookup(env, v),
                })
                .collect();
            rel_holds(*r, &vals)
        }
        Formula::Not(g) => !brute(b, g, env),
        Formula::And(gs) => gs.iter().all(|g| brute(b, g, env)),
        Formula::Or(gs) => gs.iter().any(|g| brute(b, g, env)),
        Formula::Implies(p, q) => !brute(b, p, env) || brute(b, q, env),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let mut known: BTreeSet<Atom> = env.iter().map(|(_, a)| *a).collect();
            known.extend(g.params());
            let exists = matches!(f, Formula::Exists(..));
            for c in refine(b, &known, 1) {
                env.push((v.clone(), c));
                let r = brute(b, g, env);
                env.pop();
                if r == exists {
                    return exists;
                }
            }
            !exists
        }
    }
}

/// All tuples of length `n` over `pool`.
pub fn tuples(pool: &[Atom], n: usize) -> Vec<Vec<Atom>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                pool.iter().map(move |a| {
                    let mut t = t.clone();
                    t.push(*a);
                    t
                })
            })
            .collect();
    }
    out
}

fn relations(b: Backend) -> Vec<Rel> {
    match b {
        Backend::Equality => vec![Rel::Eq],
        Backend::Dlo => vec![Rel::Eq, Rel::Lt, Rel::Le],
        Backend::Cyclic => vec![Rel::Eq, Rel::Cyc],
    }
}

fn term(rng: &mut StdRng, vars: &[Var], consts: &[Atom]) -> Term {
    if !vars.is_empty() && (consts.is_empty() || rng.gen_bool(0.75)) {
        Term::Var(vars.choose(rng).unwrap().clone())
    } else {
        Term::Atom(*consts.choose(rng).unwrap())
    }
}

fn literal(rng: &mut StdRng, b: Backend, vars: &[Var], consts: &[Atom]) -> Formula {
    let r = *relations(b).choose(rng).unwrap();
    let args = (0..r.arity()).map(|_| term(rng, vars, consts)).collect();
    let lit = Formula::Rel(r, args);
    if rng.gen_bool(0.4) {
        Formula::Not(Box::new(lit))
    } else {
        lit
    }
}

/// A random formula whose free variables are among `vars`; quantifiers bind
/// names from `q0` on, and may shadow.
pub fn random_formula(rng: &mut StdRng, b: Backend, vars: &[Var], consts: &[Atom], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.05) {
            if rng.gen_bool(0.5) {
                Formula::True
            } else {
                Formula::False
            }
        } else {
            literal(rng, b, vars, consts)
        };
    }
    match rng.gen_range(0..7) {
        0 => Formula::Not(Box::new(random_formula(rng, b, vars, consts, depth - 1))),
        1 | 2 => Formula::And((0..rng.gen_range(2..=3)).map(|_| random_formula(rng, b, vars, consts, depth - 1)).collect()),
        3 => Formula::Or((0..rng.gen_range(2..=3)).map(|_| random_formula(rng, b, vars, consts, depth - 1)).collect()),
        4 => Formula::Implies(
            Box::new(random_formula(rng, b, vars, consts, depth - 1)),
            Box::new(random_formula(rng, b, vars, consts, depth - 1)),
        ),
        k => {
            let v = Var::new(&format!("q{}", rng.gen_range(0..3)));
            let mut inner = vars.to_vec();
            if !inner.contains(&v) {
                inner.push(v.clone());
            }
            let body = Box::new(random_formula(rng, b, &inner, consts, depth - 1));
            if k == 5 {
                Formula::Exists(v, body)
            } else {
                Formula::Forall(v, body)
            }
        }
    }
}

/// A finite value: what an expression denotes once binders are restricted
/// to a finite pool.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FVal {
    Atom(Atom),
    Tuple(Vec<FVal>),
    Set(BTreeSet<FVal>),
}

impl FVal {
    pub fn atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            FVal::Atom(a) => {
                out.insert(*a);
            }
            FVal::Tuple(xs) => xs.iter().for_each(|x| x.atoms(out)),
            FVal::Set(xs) => xs.iter().for_each(|x| x.atoms(out)),
        }
    }
}

/// The value of `e` with every binder ranging over `pool`.
pub fn restrict(b: Backend, e: &Expr, env: &mut Env, pool: &[Atom]) -> FVal {
    match e {
        Expr::Atom(a) => FVal::Atom(*a),
        Expr::Var(v) => FVal::Atom(lookup(env, v)),
        Expr::Atoms => FVal::Set(pool.iter().map(|a| FVal::Atom(*a)).collect()),
        Expr::Tuple(xs) => FVal::Tuple(xs.iter().map(|x| restrict(b, x, env, pool)).collect()),
        Expr::Union(cs) => {
            let mut out = BTreeSet::new();
            for c in cs {
                for t in tuples(pool, c.binders.len()) {
                    let n = env.len();
                    env.extend(c.binders.iter().cloned().zip(t));
                    if brute(b, &c.guard, env) {
                        out.insert(restrict(b, &c.elem, env, pool));
                    }
                    env.truncate(n);
                }
            }
            FVal::Set(out)
        }
    }
}

/// Whether the finite value `z` belongs to `set`, for sets whose nested
/// sets have no binders. Binders are searched one at a time over the atoms
/// in play plus a point in every gap.
pub fn member_brute(b: Backend, z: &FVal, set: &Expr) -> bool {
    let mut base = set.params();
    z.atoms(&mut base);
    set.comps().unwrap().iter().any(|c| {
        fn go(b: Backend, c: &Comp, i: usize, env: &mut Env, base: &BTreeSet<Atom>, z: &FVal) -> bool {
            if i == c.binders.len() {
                return brute(b, &c.guard, env) && restrict(b, &c.elem, env, &[]) == *z;
            }
            let mut known = base.clone();
            known.extend(env.iter().map(|(_, a)| *a));
            for a in refine(b, &known, 1) {
                env.push((c.binders[i].clone(), a));
                let r = go(b, c, i + 1, env, base, z);
                env.pop();
                if r {
                    return true;
                }
            }
            false
        }
        go(b, c, 0, &mut Vec::new(), &base, z)
    })
}

/// Extensional equality of two closed sets decided by finite evaluation.
/// Equality atoms: restriction to the parameters plus six fresh atoms.
/// Ordered atoms: nested sets must be binder-free; every element of one
/// side over a type-complete pool is looked up in the other.
pub fn sets_equal_oracle(b: Backend, x: &Expr, y: &Expr) -> bool {
    let mut params = x.params();
    params.extend(y.params());
    match b {
        Backend::Equality => {
            let pool = refine(b, &params, 6);
            restrict(b, x, &mut Vec::new(), &pool) == restrict(b, y, &mut Vec::new(), &pool)
        }
        _ => {
            let pool = refine(b, &params, 3);
            let side = |p: &Expr, q: &Expr| match restrict(b, p, &mut Vec::new(), &pool) {
                FVal::Set(zs) => zs.iter().all(|z| member_brute(b, z, q)),
                _ => unreachable!(),
            };
            side(x, y) && side(y, x)
        }
    }
}

/// Random set expressions with at most three binders in total.
pub struct ExprGen<'a> {
    pub rng: &'a mut StdRng,
    pub backend: Backend,
    pub consts: Vec<Atom>,
    /// Allow binders in nested sets.
    pub nested_binders: bool,
    next: usize,
}

impl<'a> ExprGen<'a> {
    pub fn new(rng: &'a mut StdRng, backend: Backend, nested_binders: bool) -> Self {
        let consts = constants(backend);
        ExprGen { rng, backend, consts, nested_binders, next: 0 }
    }

    fn fresh(&mut self) -> Var {
        self.next += 1;
        Var::new(&format!("v{}", self.next))
    }

    pub fn guard(&mut self, scope: &[Var]) -> Formula {
        let n = self.rng.gen_range(0..=2);
        let mut lits = Vec::new();
        for _ in 0..n {
            if self.rng.gen_bool(0.15) {
                let w = Var::new("w");
                let mut inner = scope.to_vec();
                inner.push(w.clone());
                let body = Formula::And(vec![
                    literal(self.rng, self.backend, &inner, &self.consts),
                    literal(self.rng, self.backend, &inner, &self.consts),
                ]);
                lits.push(if self.rng.gen_bool(0.5) {
                    Formula::Exists(w, Box::new(body))
                } else {
                    Formula::Forall(w, Box::new(Formula::Not(Box::new(body))))
                });
            } else {
                lits.push(literal(self.rng, self.backend, scope, &self.consts));
            }
        }
        match lits.len() {
            0 => Formula::True,
            1 => lits.pop().unwrap(),
            _ if self.rng.gen_bool(0.25) => Formula::Or(lits),
            _ => Formula::And(lits),
        }
    }

    fn leaf(&mut self, scope: &[Var]) -> Expr {
        if !scope.is_empty() && self.rng.gen_bool(0.8) {
            Expr::Var(scope.choose(self.rng).unwrap().clone())
        } else {
            Expr::Atom(*self.consts.choose(self.rng).unwrap())
        }
    }

    /// An element of nesting depth at most `depth`.
    pub fn elem(&mut self, depth: usize, scope: &[Var], budget: &mut usize) -> Expr {
        if depth <= 1 {
            return self.leaf(scope);
        }
        match self.rng.gen_range(0..5) {
            0 | 1 => self.leaf(scope),
            2 | 3 => Expr::Tuple((0..2).map(|_| self.elem(depth - 1, scope, budget)).collect()),
            _ => {
                let allowed = if self.nested_binders { *budget } else { 0 };
                self.set(depth - 1, scope, budget, allowed)
            }
        }
    }

    /// A set of nesting depth at most `depth` whose comprehensions use at
    /// most `max_binders` binders each.
    pub fn set(&mut self, depth: usize, scope: &[Var], budget: &mut usize, max_binders: usize) -> Expr {
        let ncomps = self.rng.gen_range(1..=2);
        let mut comps = Vec::new();
        for _ in 0..ncomps {
            let n = self.rng.gen_range(0..=max_binders.min(*budget));
            *budget -= n;
            let binders: Vec<Var> = (0..n).map(|_| self.fresh()).collect();
            let mut inner = scope.to_vec();
            inner.extend(binders.iter().cloned());
            let elem = self.elem(depth.max(1), &inner, budget);
            let guard = if n == 0 && self.rng.gen_bool(0.5) { Formula::True } else { self.guard(&inner) };
            comps.push(Comp { elem, binders, guard });
        }
        Expr::Union(comps)
    }

    pub fn top(&mut self) -> Expr {
        let mut budget = 3;
        self.set(3, &[], &mut budget, 3)
    }

    /// A variant of `x`: often equal by construction, sometimes perturbed.
    pub fn variant(&mut self, x: &Expr) -> Expr {
        let Expr::Union(cs) = x else { return x.clone() };
        let mut cs = cs.clone();
        match self.rng.gen_range(0..7) {
            0 => cs.reverse(),
            1 => {
                // split a clause on a literal
                let i = self.rng.gen_range(0..cs.len());
                let c = cs.remove(i);
                let lit = literal(self.rng, self.backend, &c.binders, &self.consts);
                let mut pos = c.clone();
                pos.guard = Formula::And(vec![c.guard.clone(), lit.clone()]);
                let mut neg = c.clone();
                neg.guard = Formula::And(vec![c.guard.clone(), Formula::Not(Box::new(lit))]);
                cs.insert(i, neg);
                cs.insert(i, pos);
            }
            2 => {
                // strengthen a guard: usually changes the set
                let i = self.rng.gen_range(0..cs.len());
                let lit = literal(self.rng, self.backend, &cs[i].binders, &self.consts);
                cs[i].guard = Formula::And(vec![cs[i].guard.clone(), lit]);
            }
            3 => {
                let i = self.rng.gen_range(0..cs.len());
                cs[i].binders.push(Var::new("unused"));
            }
            4 if cs.len() > 1 => {
                cs.pop();
            }
            5 => {
                let i = self.rng.gen_range(0..cs.len());
                if let Expr::Tuple(items) = &mut cs[i].elem {
                    items.reverse();
                } else {
                    cs[i].guard = Formula::Not(Box::new(cs[i].guard.clone()));
                }
            }
            _ => {
                let i = self.rng.gen_range(0..cs.len());
                cs.push(cs[i].clone());
            }
        }
        Expr::Union(cs)
    }
}

/// A random order- or cyclic-order-preserving injective map defined on
/// `dom`, with images drawn near `dom`. Returns `None` if the draw failed.
pub fn random_automorphism(rng: &mut StdRng, b: Backend, dom: &BTreeSet<Atom>, fixed: &BTreeSet<Atom>) -> Option<AtomMap> {
    let moving: Vec<Atom> = dom.iter().filter(|a| !fixed.contains(a)).copied().collect();
    let mut all: BTreeSet<Atom> = dom.clone();
    all.extend(fixed.iter().copied());
    let pool = refine(b, &refine(b, &all, 2).into_iter().collect(), 1);
    for _ in 0..50 {
        let mut pairs: Vec<(Atom, Atom)> = fixed.iter().map(|a| (*a, *a)).collect();
        let mut imgs: BTreeSet<Atom> = fixed.clone();
        let mut ok = true;
        for a in &moving {
            let cands: Vec<Atom> = pool.iter().filter(|c| !imgs.contains(c)).copied().collect();
            let Some(c) = cands.choose(rng) else {
                ok = false;
                break;
            };
            imgs.insert(*c);
            pairs.push((*a, *c));
        }
        if ok && preserves(b, &pairs) {
            return Some(AtomMap::from_pairs(pairs).unwrap());
        }
    }
    None
}

/// Whether a finite map preserves and reflects the backend relations.
pub fn preserves(b: Backend, pairs: &[(Atom, Atom)]) -> bool {
    for r in relations(b) {
        for idx in tuples(&(0..pairs.len()).map(|i| Atom::Id(i as u64)).collect::<Vec<_>>(), r.arity()) {
            let ix: Vec<usize> = idx.iter().map(|a| a.as_id().unwrap() as usize).collect();
            let src: Vec<Atom> = ix.iter().map(|&i| pairs[i].0).collect();
            let dst: Vec<Atom> = ix.iter().map(|&i| pairs[i].1).collect();
            if rel_holds(r, &src) != rel_holds(r, &dst) {
                return false;
            }
        }
    }
    true
}

/// Universes for random structures, per backend.
pub fn universes(b: Backend) -> Vec<&'static str> {
    match b {
        Backend::Equality => vec![
            "atoms",
            "{#1, #2}",
            "{#1}",
            "{a | a in atoms, a != #1}",
            "{(a, b) | a, b in atoms, a != b}",
            "{{a, b} | a, b in atoms, a != b}",
        ],
        Backend::Dlo => vec!["atoms", "{a | a in atoms, 0 < a}", "{0, 1}", "{a | a in atoms, a < 0}"],
        Backend::Cyclic => vec!["atoms", "{0, 1/2}", "{0}"],
    }
}

/// A random structure over the given universe with one or two relations
/// whose interpretations are unions of orbits over `t`.
pub fn random_structure(rng: &mut StdRng, b: Backend, universe: &str, t: &BTreeSet<Atom>, arities: &[usize]) -> Structure {
    let u: Expr = universe.parse().unwrap();
    let mut fixed = t.clone();
    fixed.extend(u.params());
    let mut relations = Vec::new();
    for (i, &r) in arities.iter().enumerate() {
        let amb = if r == 1 { u.clone() } else { atomiso::algebra::power(&u, r).unwrap() };
        let orbits = orbit_decomposition(b, &amb, &fixed).unwrap();
        let chosen: Vec<Comp> = orbits
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .flat_map(|o| o.expr().comps().unwrap())
            .collect();
        relations.push(Relation { name: format!("R{i}"), arity: r, interp: Expr::Union(chosen) });
    }
    Structure { name: "random".into(), backend: b, universe: u, relations, families: vec![] }
}

/// Brute-force count of orbits of `n`-tuples: distinct relation patterns
/// among tuples drawn from `n` points.
pub fn brute_rn(b: Backend, n: usize) -> usize {
    let pool: Vec<Atom> = match b {
        Backend::Equality => (1..=n as u64).map(Atom::Id).collect(),
        _ => (0..n as i64).map(Atom::int).collect(),
    };
    let mut patterns = BTreeSet::new();
    for t in tuples(&pool, n) {
        let mut key = Vec::new();
        for r in relations(b) {
            for idx in tuples(&(0..n as u64).map(Atom::Id).collect::<Vec<_>>(), r.arity()) {
                let vals: Vec<Atom> = idx.iter().map(|i| t[i.as_id().unwrap() as usize]).collect();
                key.push(rel_holds(r, &vals));
            }
        }
        patterns.insert(key);
    }
    patterns.len()
}
