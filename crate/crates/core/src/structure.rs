//! Definable relational structures and their validation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{check_closed, is_subset, power, product, set_equal, DefFunction};
use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::expr::{member_formula, parse_for, Comp, Expr, Kind};
use crate::formula::Formula;
use crate::theory::Backend;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    /// A subset of `universe^arity`; for arity 1, of the universe itself.
    pub interp: Expr,
}

/// A definable family of relation symbols `name_i`, one for each `i` in
/// `index`. The interpretation holds tuples `(i, a1, ..., ar)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    pub arity: usize,
    pub index: Expr,
    pub interp: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub name: String,
    pub backend: Backend,
    pub universe: Expr,
    pub relations: Vec<Relation>,
    pub families: Vec<Family>,
}

#[derive(Serialize, Deserialize)]
struct RawRelation {
    name: String,
    arity: usize,
    interp: String,
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    name: String,
    arity: usize,
    index: String,
    interp: String,
}

#[derive(Serialize, Deserialize)]
struct RawStructure {
    backend: Backend,
    name: String,
    universe: String,
    #[serde(default)]
    relations: Vec<RawRelation>,
    #[serde(default)]
    families: Vec<RawFamily>,
}

#[derive(Serialize, Deserialize)]
struct RawFunction {
    backend: Backend,
    dom: String,
    cod: String,
    graph: String,
}

/// Upper bound on symbol arities.
pub const MAX_ARITY: usize = 4;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn tuple_arity_ok(set: &Expr, len: usize) -> Result<bool> {
    Ok(set.comps()?.iter().all(|c| match c.elem.kind() {
        Kind::Tuple(n) => n == len,
        _ => len == 1,
    }))
}

impl Structure {
    pub fn from_json(text: &str) -> Result<Structure> {
        let raw: RawStructure = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        let b = raw.backend;
        let s = Structure {
            name: raw.name,
            backend: b,
            universe: parse_for(b, &raw.universe)?,
            relations: raw
                .relations
                .into_iter()
                .map(|r| Ok(Relation { name: r.name, arity: r.arity, interp: parse_for(b, &r.interp)? }))
                .collect::<Result<_>>()?,
            families: raw
                .families
                .into_iter()
                .map(|f| {
                    Ok(Family {
                        name: f.name,
                        arity: f.arity,
                        index: parse_for(b, &f.index)?,
                        interp: parse_for(b, &f.interp)?,
                    })
                })
                .collect::<Result<_>>()?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Structure> {
        Structure::from_json(&read(path)?)
    }

    pub fn to_json(&self) -> String {
        let raw = RawStructure {
            backend: self.backend,
            name: self.name.clone(),
            universe: self.universe.to_string(),
            relations: self
                .relations
                .iter()
                .map(|r| RawRelation { name: r.name.clone(), arity: r.arity, interp: r.interp.to_string() })
                .collect(),
            families: self
                .families
                .iter()
                .map(|f| RawFamily {
                    name: f.name.clone(),
                    arity: f.arity,
                    index: f.index.to_string(),
                    interp: f.interp.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("structure serializes")
    }

    /// Checks arities, names and containment of every interpretation.
    pub fn validate(&self) -> Result<()> {
        let b = self.backend;
        check_closed(b, &self.universe)?;
        if !self.universe.is_set() {
            return Err(Error::Kind("the universe must be a set".into()));
        }
        let mut names = BTreeSet::new();
        for name in self.relations.iter().map(|r| &r.name).chain(self.families.iter().map(|f| &f.name)) {
            if !names.insert(name) {
                return Err(Error::Signature(format!("symbol `{name}` is declared twice")));
            }
        }
        for r in &self.relations {
            check_arity(&r.name, r.arity)?;
            check_closed(b, &r.interp)?;
            if !r.interp.is_set() || !tuple_arity_ok(&r.interp, r.arity)? {
                return Err(Error::Arity(format!("interpretation of `{}` does not hold {}-tuples", r.name, r.arity)));
            }
            if !is_subset(b, &r.interp, &power(&self.universe, r.arity)?)? {
                return Err(Error::Containment(r.name.clone()));
            }
        }
        for f in &self.families {
            check_arity(&f.name, f.arity)?;
            check_closed(b, &f.index)?;
            check_closed(b, &f.interp)?;
            if !f.index.is_set() {
                return Err(Error::Kind(format!("index of `{}` must be a set", f.name)));
            }
            if !f.interp.is_set() || !tuple_arity_ok(&f.interp, f.arity + 1)? {
                return Err(Error::Arity(format!(
                    "interpretation of `{}` does not hold (index, {}-tuple) entries",
                    f.name, f.arity
                )));
            }
            let mut factors = vec![f.index.clone()];
            factors.extend(std::iter::repeat_n(self.universe.clone(), f.arity));
            if !is_subset(b, &f.interp, &product(&factors)?)? {
                return Err(Error::Containment(f.name.clone()));
            }
        }
        Ok(())
    }

    /// All atoms used by the structure.
    pub fn params(&self) -> BTreeSet<Atom> {
        let mut out = self.universe.params();
        for r in &self.relations {
            out.extend(r.interp.params());
        }
        for f in &self.families {
            out.extend(f.index.params());
            out.extend(f.interp.params());
        }
        out
    }

    pub fn symbol_count(&self) -> usize {
        self.relations.len() + self.families.len()
    }
}

fn check_arity(name: &str, arity: usize) -> Result<()> {
    if arity == 0 || arity > MAX_ARITY {
        return Err(Error::Arity(format!("`{name}` has arity {arity}, expected 1..={MAX_ARITY}")));
    }
    Ok(())
}

/// Checks that two structures share backend and signature.
pub fn check_signature(a: &Structure, b: &Structure) -> Result<()> {
    if a.backend != b.backend {
        return Err(Error::BackendMismatch(a.backend.to_string(), b.backend.to_string()));
    }
    let sig = |s: &Structure| -> BTreeMap<String, usize> {
        s.relations.iter().map(|r| (r.name.clone(), r.arity)).collect()
    };
    let fam = |s: &Structure| -> BTreeMap<String, usize> {
        s.families.iter().map(|f| (f.name.clone(), f.arity)).collect()
    };
    if sig(a) != sig(b) || fam(a) != fam(b) {
        return Err(Error::Signature(format!("`{}` and `{}` have different symbols", a.name, b.name)));
    }
    for f in &a.families {
        let g = b.families.iter().find(|g| g.name == f.name).unwrap();
        if !set_equal(a.backend, &f.index, &g.index)? {
            return Err(Error::Signature(format!("index sets of `{}` differ", f.name)));
        }
    }
    Ok(())
}

fn tuple_of(items: Vec<Expr>) -> Expr {
    if items.len() == 1 {
        items.into_iter().next().unwrap()
    } else {
        Expr::Tuple(items)
    }
}

/// Sentence stating that the pairs listed by `pieces` preserve (and, with
/// `reflect`, reflect) every symbol from `a` to `b`. Only combinations of
/// pieces including at least one index `>= new_from` are constrained.
pub fn morphism_formula(a: &Structure, b: &Structure, pieces: &[Comp], new_from: usize, reflect: bool) -> Formula {
    let link = |x: Formula, y: Formula| if reflect { Formula::iff(x, y) } else { Formula::implies(x, y) };
    let mut conj = Vec::new();
    let combos = |r: usize| -> Vec<Vec<usize>> {
        let k = pieces.len();
        let mut out = Vec::new();
        let total = k.pow(r as u32);
        for code in 0..total {
            let idx: Vec<usize> = (0..r).map(|i| code / k.pow(i as u32) % k).collect();
            if idx.iter().any(|&i| i >= new_from) {
                out.push(idx);
            }
        }
        out
    };
    let instantiate = |idx: &[usize]| {
        let mut binders = Vec::new();
        let mut guards = Vec::new();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &i in idx {
            let c = pieces[i].freshened();
            let Expr::Tuple(items) = &c.elem else { unreachable!("graph pieces are pairs") };
            xs.push(items[0].clone());
            ys.push(items[1].clone());
            binders.extend(c.binders.iter().cloned());
            guards.push(c.guard.clone());
        }
        (binders, guards, xs, ys)
    };
    for r in &a.relations {
        let rb = &b.relations.iter().find(|s| s.name == r.name).unwrap().interp;
        for idx in combos(r.arity) {
            let (binders, guards, xs, ys) = instantiate(&idx);
            let body = link(member_formula(&tuple_of(xs), &r.interp), member_formula(&tuple_of(ys), rb));
            conj.push(Formula::forall_many(&binders, Formula::implies(Formula::and(guards), body)));
        }
    }
    for f in &a.families {
        let fb = &b.families.iter().find(|s| s.name == f.name).unwrap().interp;
        let index = f.index.comps().unwrap_or_default();
        for idx in combos(f.arity) {
            for d in &index {
                let d = d.freshened();
                let (mut binders, mut guards, mut xs, mut ys) = instantiate(&idx);
                binders.extend(d.binders.iter().cloned());
                guards.push(d.guard.clone());
                xs.insert(0, d.elem.clone());
                ys.insert(0, d.elem.clone());
                let body = link(member_formula(&Expr::Tuple(xs), &f.interp), member_formula(&Expr::Tuple(ys), fb));
                conj.push(Formula::forall_many(&binders, Formula::implies(Formula::and(guards), body)));
            }
        }
    }
    Formula::and(conj)
}

/// Whether `f` preserves and reflects every symbol. Does not check that
/// `f` is a bijection between the universes.
pub fn check_isomorphism(f: &DefFunction, a: &Structure, b: &Structure) -> Result<bool> {
    check_signature(a, b)?;
    if f.backend != a.backend {
        return Err(Error::BackendMismatch(f.backend.to_string(), a.backend.to_string()));
    }
    let pieces = f.graph.comps()?;
    Ok(a.backend.holds_unchecked(&morphism_formula(a, b, &pieces, 0, true)))
}

/// Bijectivity between the universes together with the morphism condition.
pub fn is_isomorphism(f: &DefFunction, a: &Structure, b: &Structure) -> Result<bool> {
    if !set_equal(f.backend, &f.dom, &a.universe)? || !set_equal(f.backend, &f.cod, &b.universe)? {
        return Ok(false);
    }
    Ok(f.check().is_bijection() && check_isomorphism(f, a, b)?)
}

pub fn load_function(path: &Path) -> Result<DefFunction> {
    function_from_json(&read(path)?)
}

pub fn function_from_json(text: &str) -> Result<DefFunction> {
    let raw: RawFunction = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    let b = raw.backend;
    DefFunction::new(b, parse_for(b, &raw.dom)?, parse_for(b, &raw.cod)?, parse_for(b, &raw.graph)?)
}

pub fn function_to_json(f: &DefFunction) -> String {
    let raw = RawFunction {
        backend: f.backend,
        dom: f.dom.to_string(),
        cod: f.cod.to_string(),
        graph: f.graph.to_string(),
    };
    serde_json::to_string_pretty(&raw).expect("function serializes")
}
