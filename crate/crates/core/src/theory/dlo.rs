//! The dense linear order `(Q, <)`.

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::atom::Atom;
use crate::formula::{Formula, Rel, Term};

use super::AtomStructure;

#[derive(Debug, Clone, Copy, Default)]
pub struct DenseOrder;

/// One atom in every open interval cut out by `known` (which must be sorted
/// and deduplicated): below, between consecutive points, above.
pub(crate) fn rational_gaps(known: &[Atom]) -> Vec<Atom> {
    let values: Vec<Rational64> = known.iter().filter_map(Atom::as_rational).collect();
    if values.is_empty() {
        return vec![Atom::Rat(Rational64::zero())];
    }
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(Atom::Rat(values[0].floor() - Rational64::one()));
    for w in values.windows(2) {
        out.push(Atom::Rat((w[0] + w[1]) / Rational64::from_integer(2)));
    }
    out.push(Atom::Rat(values[values.len() - 1].floor() + Rational64::one()));
    out
}

pub(crate) fn order_key(atoms: &[Atom]) -> Vec<u8> {
    let mut key = Vec::with_capacity(atoms.len() * atoms.len() / 2);
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            key.push(atoms[i].cmp(&atoms[j]) as i8 as u8);
        }
    }
    key
}

/// Groups items by value in ascending order; each group's representative is
/// its first parameter term if it has one, else its first term.
pub(crate) fn sorted_groups(items: &[(Term, Atom)]) -> Vec<Vec<Term>> {
    let mut sorted: Vec<&(Term, Atom)> = items.iter().collect();
    sorted.sort_by_key(|a| a.1);
    let mut groups: Vec<(Atom, Vec<Term>)> = Vec::new();
    for (term, value) in sorted {
        match groups.last_mut() {
            Some((v, g)) if v == value => g.push(term.clone()),
            _ => groups.push((*value, vec![term.clone()])),
        }
    }
    groups
        .into_iter()
        .map(|(_, mut g)| {
            if let Some(pos) = g.iter().position(|t| matches!(t, Term::Atom(_))) {
                let rep = g.remove(pos);
                g.insert(0, rep);
            }
            g
        })
        .collect()
}

pub(crate) fn group_equalities(groups: &[Vec<Term>]) -> Vec<Formula> {
    groups
        .iter()
        .flat_map(|g| g[1..].iter().map(move |t| Formula::eq(t.clone(), g[0].clone())))
        .collect()
}

impl AtomStructure for DenseOrder {
    fn name(&self) -> &'static str {
        "dlo"
    }

    fn vocabulary(&self) -> &'static [Rel] {
        &[Rel::Eq, Rel::Lt, Rel::Le]
    }

    fn accepts(&self, atom: &Atom) -> bool {
        matches!(atom, Atom::Rat(_))
    }

    fn fresh_candidates(&self, known: &[Atom]) -> Vec<Atom> {
        rational_gaps(known)
    }

    fn type_key(&self, atoms: &[Atom]) -> Vec<u8> {
        order_key(atoms)
    }

    fn type_formula(&self, items: &[(Term, Atom)]) -> Formula {
        let groups = sorted_groups(items);
        let mut lits = group_equalities(&groups);
        for w in groups.windows(2) {
            lits.push(Formula::lt(w[0][0].clone(), w[1][0].clone()));
        }
        Formula::and(lits)
    }

    fn is_dense(&self) -> bool {
        true
    }
}
