//! The pure set: countably many atoms `#0, #1, ...` with equality only.

use crate::atom::Atom;
use crate::formula::{Formula, Rel, Term};

use super::AtomStructure;

#[derive(Debug, Clone, Copy, Default)]
pub struct PureSet;

/// The least id `>= 1` outside `taken`.
pub(crate) fn least_fresh_id(taken: &[Atom]) -> Atom {
    let mut n = 1;
    while taken.contains(&Atom::Id(n)) {
        n += 1;
    }
    Atom::Id(n)
}

impl AtomStructure for PureSet {
    fn name(&self) -> &'static str {
        "equality"
    }

    fn vocabulary(&self) -> &'static [Rel] {
        &[Rel::Eq]
    }

    fn accepts(&self, atom: &Atom) -> bool {
        matches!(atom, Atom::Id(_))
    }

    fn fresh_candidates(&self, known: &[Atom]) -> Vec<Atom> {
        vec![least_fresh_id(known)]
    }

    fn type_key(&self, atoms: &[Atom]) -> Vec<u8> {
        let mut key = Vec::with_capacity(atoms.len() * atoms.len() / 2);
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                key.push((atoms[i] == atoms[j]) as u8);
            }
        }
        key
    }

    fn type_formula(&self, items: &[(Term, Atom)]) -> Formula {
        // Class representatives, parameters first because callers list them first.
        let mut reps: Vec<(Term, Atom)> = Vec::new();
        let mut lits = Vec::new();
        for (term, value) in items {
            match reps.iter().find(|(_, v)| v == value) {
                Some((rep, _)) => lits.push(Formula::eq(term.clone(), rep.clone())),
                None => {
                    for (rep, _) in &reps {
                        lits.push(Formula::neq(term.clone(), rep.clone()));
                    }
                    reps.push((term.clone(), *value));
                }
            }
        }
        Formula::and(lits)
    }

    fn is_dense(&self) -> bool {
        true
    }
}
