//! Deciding definable isomorphism and eliminating parameters.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::structure::{check_signature, Structure};

mod search;
mod smoothing;

pub use search::{
    bijective_orbit_graphs, find_t_definable_iso, find_t_definable_iso_naive, find_t_definable_iso_within, OrbitGraph,
    ORBIT_BUDGET,
};
pub use smoothing::{eliminate_parameters, Side, SmoothingState, SmoothingStep};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Iso,
    /// Definable homomorphisms: functional graphs preserving every symbol.
    Hom,
    /// Definable embeddings: injective homomorphisms that also reflect.
    Emb,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "iso" => Ok(Mode::Iso),
            "hom" => Ok(Mode::Hom),
            "emb" => Ok(Mode::Emb),
            _ => Err(Error::Input(format!("unknown mode `{s}` (expected iso, hom or emb)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "FOUND")]
    Found,
    #[serde(rename = "NOT_FOUND")]
    NotFound,
    #[serde(rename = "NOT_FOUND_INCOMPLETE")]
    NotFoundIncomplete,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Found => "FOUND",
            Verdict::NotFound => "NOT_FOUND",
            Verdict::NotFoundIncomplete => "NOT_FOUND_INCOMPLETE",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    #[serde(rename = "orbits_A")]
    pub orbits_a: usize,
    #[serde(rename = "orbits_B")]
    pub orbits_b: usize,
    /// Number of partial or complete candidates checked.
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    #[serde(serialize_with = "witness_string")]
    pub witness: Option<Expr>,
    #[serde(serialize_with = "atom_strings")]
    pub params: BTreeSet<Atom>,
    pub stats: Stats,
    pub caveat: Option<String>,
}

fn witness_string<S: Serializer>(w: &Option<Expr>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match w {
        Some(e) => s.serialize_some(&e.to_string()),
        None => s.serialize_none(),
    }
}

fn atom_strings<S: Serializer>(atoms: &BTreeSet<Atom>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(atoms.iter().map(|a| a.to_string()))
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

pub(crate) const HOM_CAVEAT: &str =
    "completeness of the parameter-restricted search is only established for isomorphisms";

/// Decides whether a definable isomorphism (or homomorphism, embedding)
/// exists, searching over the parameters of both structures plus `extra`.
pub fn decide_definable_iso(a: &Structure, b: &Structure, extra: &BTreeSet<Atom>, mode: Mode) -> Result<Certificate> {
    decide_definable_iso_within(a, b, extra, mode, ORBIT_BUDGET)
}

/// [`decide_definable_iso`] with an explicit bound on the number of orbit graphs.
pub fn decide_definable_iso_within(
    a: &Structure,
    b: &Structure,
    extra: &BTreeSet<Atom>,
    mode: Mode,
    budget: u128,
) -> Result<Certificate> {
    check_signature(a, b)?;
    let mut t = a.params();
    t.extend(b.params());
    t.extend(extra.iter().copied());
    let mut cert = find_t_definable_iso_within(a, b, &t, mode, budget)?;
    if cert.verdict == Verdict::NotFound && (!a.backend.is_dense() || mode != Mode::Iso) {
        cert.verdict = Verdict::NotFoundIncomplete;
        if cert.caveat.is_none() {
            cert.caveat = Some(format!(
                "the {} atoms are not dense: a definable isomorphism using parameters outside {{{}}} may still exist",
                a.backend,
                t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            ));
        }
    }
    Ok(cert)
}
