//! Property checks on randomly generated instances, one seed each.

use std::collections::BTreeSet;

use atomiso::algebra::{
    is_disjoint, is_member, least_support, orbit_decomposition, set_equal, DefFunction, OrbitDescriptor,
};
use atomiso::{Atom, AtomMap, Backend, Expr};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{constants, random_automorphism, rng, ExprGen};

pub type Check = Result<(), String>;

fn backend(rng: &mut StdRng) -> Backend {
    *Backend::ALL.choose(rng).unwrap()
}

fn image(pi: &AtomMap, s: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    s.iter().map(|a| pi.apply(a).unwrap()).collect()
}

fn random_set(rng: &mut StdRng, b: Backend) -> Expr {
    ExprGen::new(rng, b, true).top()
}

fn err(what: &str, e: impl std::fmt::Display) -> String {
    format!("{what}: {e}")
}

/// A random orbit of `x` over `t` and a random element of it.
fn random_member(rng: &mut StdRng, b: Backend, x: &Expr, t: &BTreeSet<Atom>) -> Result<Option<(OrbitDescriptor, Expr)>, String> {
    let orbits = orbit_decomposition(b, x, t).map_err(|e| err("orbits", e))?;
    let Some(o) = orbits.choose(rng).cloned() else { return Ok(None) };
    let r = o.element();
    let Some(pi) = random_automorphism(rng, b, &r.params(), t) else { return Ok(None) };
    let y = r.act(&pi).map_err(|e| err("act", e))?;
    Ok(Some((o, y)))
}

/// The least support moves along with the value.
pub fn support_equivariance(seed: u64) -> Check {
    let mut rng = rng(seed);
    let b = backend(&mut rng);
    let x = random_set(&mut rng, b);
    let Some(pi) = random_automorphism(&mut rng, b, &x.params(), &BTreeSet::new()) else { return Ok(()) };
    let s = least_support(b, &x).map_err(|e| err("support", e))?;
    let y = x.act(&pi).map_err(|e| err("act", e))?;
    let s2 = least_support(b, &y).map_err(|e| err("support", e))?;
    if s2.atoms != image(&pi, &s.atoms) {
        return Err(format!("{b}: supp({x}) = {:?} but supp({y}) = {:?}", s.atoms, s2.atoms));
    }
    Ok(())
}

/// Elements of one orbit have least supports of one size.
pub fn dimension_constancy(seed: u64) -> Check {
    let mut rng = rng(seed);
    let b = backend(&mut rng);
    let x = random_set(&mut rng, b);
    let mut t = x.params();
    if rng.gen_bool(0.5) {
        t.insert(*constants(b).choose(&mut rng).unwrap());
    }
    let Some((o, y)) = random_member(&mut rng, b, &x, &t)? else { return Ok(()) };
    let r = o.element();
    if !is_member(b, &y, &o.expr()).map_err(|e| err("member", e))? {
        return Err(format!("{b}: {y} should lie in the orbit of {r}"));
    }
    let d1 = least_support(b, &r).map_err(|e| err("support", e))?.dimension();
    let d2 = least_support(b, &y).map_err(|e| err("support", e))?.dimension();
    if d1 != d2 {
        return Err(format!("{b}: dim supp({r}) = {d1} but dim supp({y}) = {d2}"));
    }
    Ok(())
}

/// A random definable function together with its domain.
fn random_function(rng: &mut StdRng, b: Backend) -> DefFunction {
    let c = constants(b);
    let p = c[0];
    let q = c[1];
    let graphs: Vec<(String, String)> = match b {
        Backend::Equality => vec![
            ("atoms".into(), "{(a, a) | a in atoms}".into()),
            ("{(a, b) | a, b in atoms}".into(), "{((a, b), a) | a, b in atoms}".into()),
            ("atoms".into(), format!("{{(a, (a, {p})) | a in atoms}}")),
            ("atoms".into(), format!("{{(a, {{a, {p}}}) | a in atoms}}")),
            ("atoms".into(), format!("{{({p}, {q}), ({q}, {p})}} + {{(a, a) | a in atoms, a != {p} and a != {q}}}")),
            (
                "{(a, b) | a, b in atoms} + atoms".into(),
                "{(a, (a, #1)) | a in atoms} + {((a, #1), a) | a in atoms} + {((a, b), (a, b)) | a, b in atoms, b != #1}".into(),
            ),
            ("{{a, b} | a, b in atoms, a != b}".into(), "{({a, b}, {a, b}) | a, b in atoms, a != b}".into()),
        ],
        Backend::Dlo => vec![
            ("atoms".into(), format!("{{(a, a) | a in atoms, a < {p}}} + {{({p}, {p})}} + {{(a, a) | a in atoms, {p} < a}}")),
            ("{(a, b) | a, b in atoms, a < b}".into(), "{((a, b), b) | a, b in atoms, a < b}".into()),
            ("atoms".into(), format!("{{(a, (a, {p})) | a in atoms}}")),
            ("atoms".into(), "{(a, {c | c in atoms, c < a}) | a in atoms}".into()),
        ],
        Backend::Cyclic => vec![
            ("atoms".into(), "{(a, a) | a in atoms}".into()),
            (
                "{(a, b) | a, b in atoms, a != b}".into(),
                "{((a, b), {c | c in atoms, R(a, c, b)}) | a, b in atoms, a != b}".into(),
            ),
            ("atoms".into(), format!("{{(a, {{a, {p}}}) | a in atoms}}")),
        ],
    };
    let (dom, graph) = graphs.choose(rng).unwrap().clone();
    let dom: Expr = dom.parse().unwrap();
    let graph: Expr = graph.parse().unwrap();
    DefFunction { backend: b, dom, cod: Expr::empty(), graph }
}

fn function_and_argument(rng: &mut StdRng) -> Result<Option<(Backend, DefFunction, Expr)>, String> {
    let b = backend(rng);
    let f = random_function(rng, b);
    let mut t = f.graph.params();
    t.extend(f.dom.params());
    if rng.gen_bool(0.5) {
        t.insert(*constants(b).choose(rng).unwrap());
    }
    Ok(random_member(rng, b, &f.dom, &t)?.map(|(_, x)| (b, f, x)))
}

/// A value computed from `x` by `f` is supported by `supp(x) ∪ supp(f)`.
pub fn image_support(seed: u64) -> Check {
    let mut rng = rng(seed);
    let Some((b, f, x)) = function_and_argument(&mut rng)? else { return Ok(()) };
    let y = f.apply(&x).map_err(|e| err("apply", e))?;
    let mut allowed = least_support(b, &x).map_err(|e| err("support", e))?.atoms;
    allowed.extend(least_support(b, &f.graph).map_err(|e| err("support", e))?.atoms);
    let sy = least_support(b, &y).map_err(|e| err("support", e))?.atoms;
    if !sy.is_subset(&allowed) {
        return Err(format!("{b}: supp({y}) = {sy:?} escapes {allowed:?}"));
    }
    Ok(())
}

/// `f(π x) = π f(x)` whenever `π` fixes the support of `f`.
pub fn function_equivariance(seed: u64) -> Check {
    let mut rng = rng(seed);
    let Some((b, f, x)) = function_and_argument(&mut rng)? else { return Ok(()) };
    let fixed = least_support(b, &f.graph).map_err(|e| err("support", e))?.atoms;
    let mut dom = x.params();
    dom.extend(f.graph.params());
    let Some(pi) = random_automorphism(&mut rng, b, &dom, &fixed) else { return Ok(()) };
    let lhs = f.apply(&x.act(&pi).map_err(|e| err("act", e))?).map_err(|e| err("apply", e))?;
    let rhs = f.apply(&x).map_err(|e| err("apply", e))?.act(&pi).map_err(|e| err("act", e))?;
    if !set_equal(b, &lhs, &rhs).map_err(|e| err("equal", e))? {
        return Err(format!("{b}: f(πx) = {lhs} but πf(x) = {rhs}"));
    }
    Ok(())
}

/// Orbits are disjoint, cover the set, and each is a single orbit.
pub fn orbit_partition(seed: u64) -> Check {
    let mut rng = rng(seed);
    let b = backend(&mut rng);
    let x = random_set(&mut rng, b);
    let mut t = x.params();
    if rng.gen_bool(0.5) {
        t.insert(*constants(b).choose(&mut rng).unwrap());
    }
    let orbits = orbit_decomposition(b, &x, &t).map_err(|e| err("orbits", e))?;
    let exprs: Vec<Expr> = orbits.iter().map(OrbitDescriptor::expr).collect();
    for i in 0..exprs.len() {
        for j in i + 1..exprs.len() {
            if !is_disjoint(b, &exprs[i], &exprs[j]).map_err(|e| err("disjoint", e))? {
                return Err(format!("{b}: orbits {} and {} of {x} overlap", exprs[i], exprs[j]));
            }
        }
    }
    let union = Expr::Union(exprs.iter().flat_map(|e| e.comps().unwrap()).collect());
    if !set_equal(b, &union, &x).map_err(|e| err("equal", e))? {
        return Err(format!("{b}: orbits of {x} do not cover it"));
    }
    for (i, o) in orbits.iter().enumerate() {
        let r = o.element();
        let Some(pi) = random_automorphism(&mut rng, b, &r.params(), &t) else { continue };
        let y = r.act(&pi).map_err(|e| err("act", e))?;
        for (j, e) in exprs.iter().enumerate() {
            if is_member(b, &y, e).map_err(|e| err("member", e))? != (i == j) {
                return Err(format!("{b}: {y} (image of {r}) misplaced with respect to orbit {e}"));
            }
        }
    }
    Ok(())
}

pub type Invariant = (&'static str, fn(u64) -> Check);

pub const ALL: [Invariant; 5] = [
    ("support equivariance", support_equivariance),
    ("dimension constancy", dimension_constancy),
    ("support of f(x)", image_support),
    ("function equivariance", function_equivariance),
    ("orbit partition", orbit_partition),
];
