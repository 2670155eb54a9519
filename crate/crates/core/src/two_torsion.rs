//! Two-torsion of the Jacobian and the kernel of reduction.
//!
//! For `y^2 = c f(x)` with `f` of degree `2g + 2`, the two-torsion of the
//! Jacobian is modelled by even-size subsets of the roots of `f`, two
//! subsets giving the same class exactly when they are complements.  Masks
//! are canonicalised to leave root 0 out, which turns the complement
//! identification into plain xor linear algebra: the group is an
//! `F_2`-vector space of dimension `2g`.
//!
//! For an equation certified with `v(alpha_i - beta_i) = 2` on every pair,
//! the kernel of reduction to the two-torsion of the special fibre is
//! spanned by the `g + 1` pair classes `{alpha_i, beta_i}`, whose only
//! relation is that their sum is the full set; the kernel has dimension
//! `g`, as does its image.
//!
//! Root indexing follows the certificate: pair `i` owns roots `2i` and
//! `2i + 1`.

use crate::certify::{StarCertificate, Verdict};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorsionError {
    #[error("kernel description requires distance exactly 2 on every pair")]
    NotStar,
    #[error("a two-torsion class must contain an even number of roots")]
    OddWeight,
}

/// A two-torsion class: an even-size subset of the `size` roots, stored as
/// the unique representative not containing root 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoTorsionElt {
    size: usize,
    mask: u64,
}

impl TwoTorsionElt {
    /// Wraps a subset mask, canonicalising by complement.
    pub fn from_mask(size: usize, mask: u64) -> Result<TwoTorsionElt, TorsionError> {
        assert!(size >= 4 && size % 2 == 0 && size <= 64);
        assert_eq!(mask >> (size - 1) >> 1, 0, "mask exceeds the root count");
        if mask.count_ones() % 2 != 0 {
            return Err(TorsionError::OddWeight);
        }
        let full = full_mask(size);
        let mask = if mask & 1 == 1 { mask ^ full } else { mask };
        Ok(TwoTorsionElt { size, mask })
    }

    pub fn zero(size: usize) -> TwoTorsionElt {
        TwoTorsionElt::from_mask(size, 0).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.mask == 0
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Canonical representative mask (root 0 absent).
    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn add(&self, other: &TwoTorsionElt) -> TwoTorsionElt {
        assert_eq!(self.size, other.size);
        TwoTorsionElt { size: self.size, mask: self.mask ^ other.mask }
    }
}

impl fmt::Display for TwoTorsionElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for b in 0..self.size {
            if self.mask >> b & 1 == 1 {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{b}")?;
                first = false;
            }
        }
        write!(f, "}}")
    }
}

fn full_mask(size: usize) -> u64 {
    (u64::MAX >> (64 - size)) & u64::MAX
}

/// An `F_2`-subspace of the two-torsion group, stored as a reduced echelon
/// basis on canonical masks, so equal subgroups compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    size: usize,
    basis: Vec<u64>,
}

impl Subgroup {
    pub fn from_generators(size: usize, gens: &[TwoTorsionElt]) -> Subgroup {
        let mut basis: Vec<u64> = Vec::new();
        for g in gens {
            assert_eq!(g.size, size);
            let mut m = g.mask;
            for &b in &basis {
                if m >> (63 - b.leading_zeros() as u64) & 1 == 1 {
                    m ^= b;
                }
            }
            if m != 0 {
                basis.push(m);
                basis.sort_by_key(|b| std::cmp::Reverse(*b));
            }
        }
        // Back-eliminate for a unique reduced form.
        for i in (0..basis.len()).rev() {
            let pivot = 63 - basis[i].leading_zeros() as usize;
            for j in 0..i {
                if basis[j] >> pivot & 1 == 1 {
                    basis[j] ^= basis[i];
                }
            }
        }
        basis.sort_by_key(|b| std::cmp::Reverse(*b));
        Subgroup { size, basis }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<TwoTorsionElt> {
        self.basis
            .iter()
            .map(|&m| TwoTorsionElt { size: self.size, mask: m })
            .collect()
    }

    pub fn contains(&self, elt: &TwoTorsionElt) -> bool {
        assert_eq!(elt.size, self.size);
        let mut m = elt.mask;
        for &b in &self.basis {
            if m >> (63 - b.leading_zeros() as u64) & 1 == 1 {
                m ^= b;
            }
        }
        m == 0
    }

    /// Whether every element of `other` lies in this subgroup.
    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.basis().iter().all(|e| self.contains(e))
    }

    /// All `2^dim` elements.  Only for small subgroups.
    pub fn elements(&self) -> Vec<TwoTorsionElt> {
        assert!(self.basis.len() <= 20);
        let mut out = vec![TwoTorsionElt::zero(self.size)];
        for &b in &self.basis {
            let add = TwoTorsionElt { size: self.size, mask: b };
            let mut next = Vec::with_capacity(out.len() * 2);
            for e in &out {
                next.push(*e);
                next.push(e.add(&add));
            }
            out = next;
        }
        out
    }
}

/// The full two-torsion group of a genus-`g` curve: dimension `2g`.
pub fn full_two_torsion(genus: usize) -> Subgroup {
    let size = 2 * genus + 2;
    let gens: Vec<TwoTorsionElt> = (0..size - 1)
        .map(|j| TwoTorsionElt::from_mask(size, 0b11 << j).unwrap())
        .collect();
    let sub = Subgroup::from_generators(size, &gens);
    assert_eq!(sub.dim(), 2 * genus);
    sub
}

/// Kernel of reduction on two-torsion, spanned by the pair classes.  Only
/// defined when the certificate verdict is the strict one.
pub fn reduction_kernel(cert: &StarCertificate) -> Result<Subgroup, TorsionError> {
    if cert.verdict != Verdict::Star {
        return Err(TorsionError::NotStar);
    }
    let g = cert.genus();
    let size = 2 * g + 2;
    let gens: Vec<TwoTorsionElt> = (0..g + 1)
        .map(|i| TwoTorsionElt::from_mask(size, 0b11 << (2 * i)).unwrap())
        .collect();
    let sub = Subgroup::from_generators(size, &gens);
    assert_eq!(sub.dim(), g);
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify, CurveInput};

    const GLOBAL_F: [i64; 7] = [28, -232, 221, 66, -61, -2, 1];
    const STAR_G2_F: [i64; 7] = [-84, 24, 41, -14, -9, 2, 1];
    const STAR_G3_F: [i64; 9] = [252, 96, -255, -16, 96, -2, -16, 0, 1];
    const STAR_G4_F: [i64; 11] = [-1188, -480, 1489, 432, -598, -166, 127, 30, -17, -2, 1];

    #[test]
    fn masks_canonicalise_by_complement() {
        let a = TwoTorsionElt::from_mask(6, 0b000011).unwrap();
        assert_eq!(a.mask(), 0b111100);
        let b = TwoTorsionElt::from_mask(6, 0b111100).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.add(&b), TwoTorsionElt::zero(6));
        assert_eq!(TwoTorsionElt::from_mask(6, 0b1), Err(TorsionError::OddWeight));
        assert_eq!(format!("{b}"), "{2,3,4,5}");
    }

    #[test]
    fn kernel_dimensions_for_strict_fixtures() {
        for (f, g) in [
            (&STAR_G2_F[..], 2usize),
            (&STAR_G3_F[..], 3),
            (&STAR_G4_F[..], 4),
        ] {
            let curve = CurveInput::from_i64(1, f, 1).unwrap();
            let cert = certify(&curve).unwrap();
            assert!(cert.is_star(), "genus {g} fixture must be strict");
            let full = full_two_torsion(g);
            let ker = reduction_kernel(&cert).unwrap();
            assert_eq!(full.dim(), 2 * g);
            assert_eq!(ker.dim(), g);
            assert!(full.contains_subgroup(&ker));
            // Image of reduction has dimension 2g - g = g.
            assert_eq!(full.dim() - ker.dim(), g);
        }
    }

    #[test]
    fn kernel_requires_strict_verdict() {
        let curve = CurveInput::from_i64(1, &GLOBAL_F, 1).unwrap();
        let cert = certify(&curve).unwrap();
        assert_eq!(reduction_kernel(&cert), Err(TorsionError::NotStar));
    }

    #[test]
    fn membership_matches_pair_structure() {
        let curve = CurveInput::from_i64(1, &STAR_G2_F, 1).unwrap();
        let ker = reduction_kernel(&certify(&curve).unwrap()).unwrap();
        let pair1 = TwoTorsionElt::from_mask(6, 0b001100).unwrap();
        let pair0 = TwoTorsionElt::from_mask(6, 0b000011).unwrap();
        let cross = TwoTorsionElt::from_mask(6, 0b000110).unwrap();
        assert!(ker.contains(&pair1));
        assert!(ker.contains(&pair0));
        assert!(ker.contains(&pair0.add(&pair1)));
        assert!(!ker.contains(&cross));
    }

    #[test]
    fn kernel_matches_brute_force_span() {
        let curve = CurveInput::from_i64(1, &STAR_G2_F, 1).unwrap();
        let cert = certify(&curve).unwrap();
        let g = cert.genus();
        let size = 2 * g + 2;
        let ker = reduction_kernel(&cert).unwrap();

        // Independently: xor-combinations of the pair masks, canonicalised.
        let twins: Vec<u64> = (0..g + 1).map(|i| 0b11 << (2 * i)).collect();
        let mut span = std::collections::HashSet::new();
        for pick in 0u64..1 << (g + 1) {
            let mut m = 0;
            for (i, t) in twins.iter().enumerate() {
                if pick >> i & 1 == 1 {
                    m ^= t;
                }
            }
            span.insert(TwoTorsionElt::from_mask(size, m).unwrap());
        }
        let elements: std::collections::HashSet<TwoTorsionElt> =
            ker.elements().into_iter().collect();
        assert_eq!(span, elements);
        assert_eq!(elements.len(), 1 << g);

        // Every even-size class is either in the kernel or not, matching
        // brute-force membership.
        for mask in 0u64..1 << size {
            if mask.count_ones() % 2 != 0 {
                continue;
            }
            let e = TwoTorsionElt::from_mask(size, mask).unwrap();
            assert_eq!(ker.contains(&e), span.contains(&e));
        }
    }

    #[test]
    fn echelon_basis_is_order_independent() {
        let gens: Vec<TwoTorsionElt> = [0b001111u64, 0b111100, 0b110011]
            .iter()
            .map(|&m| TwoTorsionElt::from_mask(6, m).unwrap())
            .collect();
        let s1 = Subgroup::from_generators(6, &gens);
        let rev: Vec<TwoTorsionElt> = gens.iter().rev().cloned().collect();
        let s2 = Subgroup::from_generators(6, &rev);
        assert_eq!(s1, s2);
    }
}
