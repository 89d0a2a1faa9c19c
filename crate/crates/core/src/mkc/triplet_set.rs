use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite set of allowed detector-alignment triplets.
///
/// `Product` stores one option list per detector and stands for their
/// Cartesian product; `Explicit` lists the triplets themselves.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TripletSet<D> {
    Product { factors: [Vec<D>; 3] },
    Explicit { members: Vec<[D; 3]> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductVerdict<D> {
    pub is_product: bool,
    /// A triplet of the projections' product that the set does not contain.
    pub witness: Option<[D; 3]>,
}

fn dedup_in_order<T: Ord + Clone>(items: Vec<T>) -> Vec<T> {
    let mut seen = BTreeSet::new();
    items
        .into_iter()
        .filter(|x| seen.insert(x.clone()))
        .collect()
}

impl<D: Ord + Clone> TripletSet<D> {
    pub fn product(factors: [Vec<D>; 3]) -> Result<Self> {
        if factors.iter().any(Vec::is_empty) {
            return Err(Error::EmptyTripletSet);
        }
        Ok(Self::Product {
            factors: factors.map(dedup_in_order),
        })
    }

    /// Duplicate triplets are dropped, keeping first occurrences.
    pub fn explicit(members: Vec<[D; 3]>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyTripletSet);
        }
        Ok(Self::Explicit {
            members: dedup_in_order(members),
        })
    }

    /// Members in storage order (lexicographic factor order for `Product`).
    pub fn members(&self) -> Vec<[D; 3]> {
        match self {
            Self::Explicit { members } => members.clone(),
            Self::Product { factors } => {
                let mut out = Vec::new();
                for a in &factors[0] {
                    for b in &factors[1] {
                        for c in &factors[2] {
                            out.push([a.clone(), b.clone(), c.clone()]);
                        }
                    }
                }
                out
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Explicit { members } => members.len(),
            Self::Product { factors } => factors.iter().map(Vec::len).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, t: &[D; 3]) -> bool {
        match self {
            Self::Explicit { members } => members.contains(t),
            Self::Product { factors } => (0..3).all(|r| factors[r].contains(&t[r])),
        }
    }

    /// Per-detector sets of alignments that occur in some member.
    pub fn projections(&self) -> [BTreeSet<D>; 3] {
        match self {
            Self::Product { factors } => {
                std::array::from_fn(|r| factors[r].iter().cloned().collect())
            }
            Self::Explicit { members } => {
                std::array::from_fn(|r| members.iter().map(|m| m[r].clone()).collect())
            }
        }
    }

    pub fn to_explicit(&self) -> Self {
        Self::Explicit {
            members: self.members(),
        }
    }
}

/// Decides whether `s` equals the Cartesian product of its three projections.
/// The witness, when present, is the lexicographically first missing triplet.
pub fn is_cartesian_product<D: Ord + Clone>(s: &TripletSet<D>) -> ProductVerdict<D> {
    let [p1, p2, p3] = s.projections();
    let present: BTreeSet<[D; 3]> = s.members().into_iter().collect();
    if present.len() == p1.len() * p2.len() * p3.len() {
        return ProductVerdict {
            is_product: true,
            witness: None,
        };
    }
    for a in &p1 {
        for b in &p2 {
            for c in &p3 {
                let t = [a.clone(), b.clone(), c.clone()];
                if !present.contains(&t) {
                    return ProductVerdict {
                        is_product: false,
                        witness: Some(t),
                    };
                }
            }
        }
    }
    unreachable!("fewer members than the product implies a missing triplet")
}
