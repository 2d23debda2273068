//! Hypercube symmetries as signed permutations: a coordinate permutation
//! followed by an XOR mask. Canonical forms are found by sweeping the whole
//! group of order `2^d * d!`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

/// Largest dimension accepted by the group sweeps.
pub const MAX_SYMMETRY_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    /// Bit `i` of a vertex moves to bit `perm[i]`.
    perm: Vec<usize>,
    mask: u64,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, mask: u64) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Parse(format!("{perm:?} is not a permutation")));
            }
        }
        if d < 64 && mask >> d != 0 {
            return Err(Error::Parse(format!("mask {mask:#b} wider than {d} bits")));
        }
        Ok(SignedPermutation { perm, mask })
    }

    pub fn identity(d: usize) -> Self {
        SignedPermutation {
            perm: (0..d).collect(),
            mask: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    #[inline]
    fn permute_bits(&self, v: u64) -> u64 {
        let mut out = 0;
        for (i, &p) in self.perm.iter().enumerate() {
            out |= (v >> i & 1) << p;
        }
        out
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        (self.permute_bits(v as u64) ^ self.mask) as usize
    }

    pub fn apply_set(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(s.universe());
        for v in s.iter() {
            out.insert(self.apply(v));
        }
        out
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        SignedPermutation {
            perm: other.perm.iter().map(|&p| self.perm[p]).collect(),
            mask: self.permute_bits(other.mask) ^ self.mask,
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.dim()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        let mut out = SignedPermutation { perm: inv, mask: 0 };
        out.mask = out.permute_bits(self.mask);
        out
    }

    /// Every group element; permutations in lexicographic order, masks inner.
    pub fn all(d: usize) -> Result<Vec<Self>> {
        guard(d)?;
        let mut out = Vec::new();
        for perm in permutations(d) {
            for mask in 0..1u64 << d {
                out.push(SignedPermutation {
                    perm: perm.clone(),
                    mask,
                });
            }
        }
        Ok(out)
    }
}

pub fn group_order(d: usize) -> u64 {
    (1..=d as u64).product::<u64>() << d
}

fn guard(d: usize) -> Result<()> {
    if d == 0 || d > MAX_SYMMETRY_DIM {
        return Err(Error::DimensionOutOfRange {
            d,
            max: MAX_SYMMETRY_DIM,
        });
    }
    Ok(())
}

fn check_set(d: usize, s: &VertexSet) -> Result<()> {
    guard(d)?;
    if s.universe() != 1 << d {
        return Err(Error::Parse(format!(
            "set over {} vertices used with Q_{d}",
            s.universe()
        )));
    }
    Ok(())
}

/// All permutations of `0..d` in lexicographic order.
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..d).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..d).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalForm {
    pub canonical: VertexSet,
    pub orbit_size: u64,
}

/// Smallest bitmask in the orbit of `s`. The orbit size is the group order
/// divided by the number of elements fixing `s`.
pub fn canonical_form(d: usize, s: &VertexSet) -> Result<CanonicalForm> {
    check_set(d, s)?;
    let members: Vec<u64> = s.iter().map(|v| v as u64).collect();
    let words = s.words().len();
    let (best, stab) = permutations(d)
        .into_par_iter()
        .map(|perm| {
            let g = SignedPermutation { perm, mask: 0 };
            let moved: Vec<u64> = members.iter().map(|&v| g.permute_bits(v)).collect();
            let mut buf = vec![0u64; words];
            let mut best: Option<Vec<u64>> = None;
            let mut stab = 0u64;
            for mask in 0..1u64 << d {
                buf.iter_mut().for_each(|w| *w = 0);
                for &v in &moved {
                    let x = (v ^ mask) as usize;
                    buf[x / 64] |= 1 << (x % 64);
                }
                if buf.as_slice() == s.words() {
                    stab += 1;
                }
                if best
                    .as_ref()
                    .is_none_or(|b| buf.iter().rev().lt(b.iter().rev()))
                {
                    best = Some(buf.clone());
                }
            }
            (best.unwrap(), stab)
        })
        .reduce_with(|(a, sa), (b, sb)| {
            let min = if b.iter().rev().lt(a.iter().rev()) {
                b
            } else {
                a
            };
            (min, sa + sb)
        })
        .expect("group is non-empty");
    Ok(CanonicalForm {
        canonical: VertexSet::from_words(s.universe(), &best),
        orbit_size: group_order(d) / stab,
    })
}

pub fn are_automorphic(d: usize, a: &VertexSet, b: &VertexSet) -> Result<bool> {
    if a.len() != b.len() {
        check_set(d, a)?;
        check_set(d, b)?;
        return Ok(false);
    }
    Ok(canonical_form(d, a)?.canonical == canonical_form(d, b)?.canonical)
}

/// Every distinct image of `s`, sorted.
pub fn orbit(d: usize, s: &VertexSet) -> Result<Vec<VertexSet>> {
    check_set(d, s)?;
    let images: BTreeSet<VertexSet> = SignedPermutation::all(d)?
        .par_iter()
        .map(|g| g.apply_set(s))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(images.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitClass {
    pub canonical: VertexSet,
    pub orbit_size: u64,
    pub members: Vec<VertexSet>,
}

/// Partitions `sets` by canonical form, ordered by canonical bitmask.
pub fn classify_orbits(d: usize, sets: &[VertexSet]) -> Result<Vec<OrbitClass>> {
    let forms = sets
        .iter()
        .map(|s| canonical_form(d, s))
        .collect::<Result<Vec<_>>>()?;
    let mut classes: BTreeMap<VertexSet, OrbitClass> = BTreeMap::new();
    for (s, form) in sets.iter().zip(forms) {
        classes
            .entry(form.canonical.clone())
            .or_insert_with(|| OrbitClass {
                canonical: form.canonical,
                orbit_size: form.orbit_size,
                members: Vec::new(),
            })
            .members
            .push(s.clone());
    }
    Ok(classes
        .into_values()
        .map(|mut c| {
            c.members.sort();
            c
        })
        .collect())
}
