//! Concrete atoms and finite partial maps between them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An atom of one of the shipped backends.
///
/// Equality atoms are natural-number ids written `#n`. Order and cyclic atoms
/// are rationals kept in lowest terms (guaranteed by [`Rational64`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Id(u64),
    Rat(Rational64),
}

impl Atom {
    pub fn rat(numer: i64, denom: i64) -> Atom {
        Atom::Rat(Rational64::new(numer, denom))
    }

    pub fn int(n: i64) -> Atom {
        Atom::Rat(Rational64::from_integer(n))
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Atom::Rat(r) => Some(*r),
            Atom::Id(_) => None,
        }
    }

    pub fn as_id(&self) -> Option<u64> {
        match self {
            Atom::Id(n) => Some(*n),
            Atom::Rat(_) => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Id(n) => write!(f, "#{n}"),
            Atom::Rat(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Atom::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Atom> {
        let s = s.trim();
        let bad = || Error::Input(format!("not an atom literal: `{s}`"));
        if let Some(rest) = s.strip_prefix('#') {
            return rest.parse::<u64>().map(Atom::Id).map_err(|_| bad());
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: i64 = num.parse().map_err(|_| bad())?;
        let den: i64 = den.parse().map_err(|_| bad())?;
        if den.is_zero() || den.is_negative() {
            return Err(bad());
        }
        Ok(Atom::Rat(Rational64::new(num, den)))
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Atom, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a list of atoms separated by commas and/or whitespace. The empty
/// string is the empty list.
pub fn parse_atom_list(s: &str) -> Result<Vec<Atom>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// A finite injective map on atoms. Validation against a backend (that it is a
/// partial automorphism) lives in [`crate::theory::Backend::partial_automorphism`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AtomMap {
    pairs: BTreeMap<Atom, Atom>,
}

impl AtomMap {
    pub fn identity<I: IntoIterator<Item = Atom>>(atoms: I) -> AtomMap {
        AtomMap {
            pairs: atoms.into_iter().map(|a| (a, a)).collect(),
        }
    }

    /// Builds the map, rejecting non-functional or non-injective input.
    pub fn from_pairs<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Result<AtomMap> {
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            if let Some(old) = map.insert(a, b) {
                if old != b {
                    return Err(Error::NotPartialAutomorphism(format!("{a} has two images")));
                }
            }
        }
        let mut images: Vec<_> = map.values().collect();
        images.sort();
        if images.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotPartialAutomorphism("map is not injective".into()));
        }
        Ok(AtomMap { pairs: map })
    }

    pub fn get(&self, a: &Atom) -> Option<Atom> {
        self.pairs.get(a).copied()
    }

    pub fn apply(&self, a: &Atom) -> Result<Atom> {
        self.get(a).ok_or(Error::Domain(*a))
    }

    pub fn domain(&self) -> impl Iterator<Item = &Atom> {
        self.pairs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn inverse(&self) -> AtomMap {
        AtomMap {
            pairs: self.pairs.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    pub(crate) fn insert_unchecked(&mut self, a: Atom, b: Atom) {
        self.pairs.insert(a, b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        for s in ["#0", "#17", "0", "-3", "1/2", "-7/3"] {
            let a: Atom = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert_eq!("2/4".parse::<Atom>().unwrap(), Atom::rat(1, 2));
        assert!("#x".parse::<Atom>().is_err());
        assert!("1/0".parse::<Atom>().is_err());
    }

    #[test]
    fn atom_lists() {
        assert_eq!(parse_atom_list("").unwrap(), vec![]);
        assert_eq!(
            parse_atom_list("#1, #2 #3").unwrap(),
            vec![Atom::Id(1), Atom::Id(2), Atom::Id(3)]
        );
    }

    #[test]
    fn maps_must_be_injective() {
        assert!(AtomMap::from_pairs([(Atom::Id(0), Atom::Id(1)), (Atom::Id(2), Atom::Id(1))]).is_err());
        let m = AtomMap::from_pairs([(Atom::Id(0), Atom::Id(1)), (Atom::Id(1), Atom::Id(0))]).unwrap();
        assert_eq!(m.inverse(), m);
    }
}
