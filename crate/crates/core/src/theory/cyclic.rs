//! The dense cyclic order on `Q`: `R(a, b, c)` iff `a < b < c` or `b < c < a`
//! or `c < a < b`. Quantifiers are still evaluated over rational
//! representatives of the linear order, whose automorphisms are cyclic
//! automorphisms too; types follow the (larger) cyclic automorphism group.

use crate::atom::Atom;
use crate::formula::{eval_rel_on_atoms, Formula, Rel, Term};

use super::dlo::{group_equalities, rational_gaps, sorted_groups};
use super::AtomStructure;

#[derive(Debug, Clone, Copy, Default)]
pub struct CyclicOrder;

impl AtomStructure for CyclicOrder {
    fn name(&self) -> &'static str {
        "cyclic"
    }

    fn vocabulary(&self) -> &'static [Rel] {
        &[Rel::Eq, Rel::Cyc]
    }

    fn accepts(&self, atom: &Atom) -> bool {
        matches!(atom, Atom::Rat(_))
    }

    fn fresh_candidates(&self, known: &[Atom]) -> Vec<Atom> {
        rational_gaps(known)
    }

    fn type_key(&self, atoms: &[Atom]) -> Vec<u8> {
        let n = atoms.len();
        let mut key = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                key.push((atoms[i] == atoms[j]) as u8);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let r = eval_rel_on_atoms(Rel::Cyc, &[atoms[i], atoms[j], atoms[k]]).unwrap_or(false);
                    key.push(r as u8);
                }
            }
        }
        key
    }

    fn type_formula(&self, items: &[(Term, Atom)]) -> Formula {
        let groups = sorted_groups(items);
        let mut lits = group_equalities(&groups);
        let reps: Vec<&Term> = groups.iter().map(|g| &g[0]).collect();
        match reps.len() {
            0 | 1 => {}
            2 => lits.push(Formula::neq(reps[0].clone(), reps[1].clone())),
            _ => {
                // Cutting the circle at the first point turns the cyclic order
                // into a linear chain.
                for w in reps[1..].windows(2) {
                    lits.push(Formula::cyc(reps[0].clone(), w[0].clone(), w[1].clone()));
                }
            }
        }
        Formula::and(lits)
    }

    fn is_dense(&self) -> bool {
        false
    }
}
