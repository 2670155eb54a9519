//! Truncated unramified extensions of the p-adic integers.
//!
//! `UnramRing(p, M, N)` models O / p^N where O is the valuation ring of the
//! unramified extension of Q_p of degree M, realized as (Z/p^N)[t]/(lift_poly)
//! with lift_poly the canonical defining polynomial of the residue field
//! lifted coefficient-wise. Precision N is part of the ring identity and
//! elements of different precisions never meet in one operation; moving down
//! in precision is always an explicit `truncate`.
//!
//! The p-power Frobenius is the unique ring automorphism reducing to x -> x^p:
//! it is pinned down by its value on the generator, the Newton-lifted root of
//! lift_poly congruent to t^p mod p.

use crate::fq::{FqElem, FqEmbedding, FqField};
use crate::poly::{Coeff, Poly};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

/// Failures of ring-level operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("element is not a unit")]
    NotAUnit,
    #[error("working precision exhausted")]
    PrecisionExhausted,
}

#[derive(Debug)]
struct RingInner {
    p: u64,
    m: usize,
    n: u32,
    /// p^n.
    modulus: BigUint,
    /// Monic degree-m polynomial, coefficients in {0, ..., p-1}, low first.
    lift_poly: Vec<u64>,
    residue: FqField,
    /// Coordinates of sigma(t), filled on first use.
    sigma_gen: OnceLock<Vec<BigUint>>,
}

/// Handle to a truncated unramified ring. Cheap to clone.
#[derive(Clone)]
pub struct UnramRing(Arc<RingInner>);

impl PartialEq for UnramRing {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.m == other.0.m && self.0.n == other.0.n
    }
}
impl Eq for UnramRing {}

impl fmt::Debug for UnramRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({}^{})/{}^{}", self.0.p, self.0.m, self.0.p, self.0.n)
    }
}

/// Element of an [`UnramRing`]: m coordinates in the power basis of t, each
/// reduced mod p^N.
#[derive(Clone)]
pub struct UnramElem {
    ring: UnramRing,
    coeffs: Vec<BigUint>,
}

impl PartialEq for UnramElem {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.coeffs == other.coeffs
    }
}
impl Eq for UnramElem {}

fn vp_biguint(x: &BigUint, p: u64, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    if p == 2 {
        return x.trailing_zeros().map_or(cap, |t| (t as u32).min(cap));
    }
    let big_p = BigUint::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while v < cap {
        let (q, r) = y.div_rem(&big_p);
        if !r.is_zero() {
            break;
        }
        v += 1;
        y = q;
    }
    v
}

fn inv_mod(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    let e = BigInt::from(a.clone()).extended_gcd(&BigInt::from(modulus.clone()));
    if !e.gcd.is_one() {
        return None;
    }
    let m = BigInt::from(modulus.clone());
    Some(e.x.mod_floor(&m).to_biguint().unwrap())
}

impl UnramRing {
    /// The ring of integers of the unramified degree-M extension of Q_p,
    /// truncated at p^N.
    pub fn new(p: u64, m: usize, n: u32) -> UnramRing {
        assert!(n >= 1, "precision exponent must be positive");
        let residue = FqField::new(p, m);
        let lift_poly = residue.defining_poly().to_vec();
        let modulus = BigUint::from(p).pow(n);
        UnramRing(Arc::new(RingInner {
            p,
            m,
            n,
            modulus,
            lift_poly,
            residue,
            sigma_gen: OnceLock::new(),
        }))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Residue degree M over Q_p.
    pub fn degree(&self) -> usize {
        self.0.m
    }

    /// Precision exponent N.
    pub fn precision(&self) -> u32 {
        self.0.n
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    pub fn residue_field(&self) -> &FqField {
        &self.0.residue
    }

    pub fn lift_poly(&self) -> &[u64] {
        &self.0.lift_poly
    }

    /// The same ring at a lower precision.
    pub fn truncated(&self, n2: u32) -> UnramRing {
        assert!(n2 >= 1 && n2 <= self.0.n, "can only truncate downward");
        if n2 == self.0.n {
            return self.clone();
        }
        let modulus = BigUint::from(self.0.p).pow(n2);
        let inner = RingInner {
            p: self.0.p,
            m: self.0.m,
            n: n2,
            modulus: modulus.clone(),
            lift_poly: self.0.lift_poly.clone(),
            residue: self.0.residue.clone(),
            sigma_gen: OnceLock::new(),
        };
        if let Some(sig) = self.0.sigma_gen.get() {
            let trunc: Vec<BigUint> = sig.iter().map(|c| c % &modulus).collect();
            let _ = inner.sigma_gen.set(trunc);
        }
        UnramRing(Arc::new(inner))
    }

    pub fn zero(&self) -> UnramElem {
        UnramElem { ring: self.clone(), coeffs: vec![BigUint::zero(); self.0.m] }
    }

    pub fn one(&self) -> UnramElem {
        self.from_i64(1)
    }

    pub fn from_biguint(&self, x: &BigUint) -> UnramElem {
        let mut coeffs = vec![BigUint::zero(); self.0.m];
        coeffs[0] = x % &self.0.modulus;
        UnramElem { ring: self.clone(), coeffs }
    }

    pub fn from_bigint(&self, x: &BigInt) -> UnramElem {
        let m = BigInt::from(self.0.modulus.clone());
        self.from_biguint(&x.mod_floor(&m).to_biguint().unwrap())
    }

    pub fn from_i64(&self, x: i64) -> UnramElem {
        self.from_bigint(&BigInt::from(x))
    }

    /// The class of t, a generator of the ring over Z_p.
    pub fn gen(&self) -> UnramElem {
        let mut e = self.zero();
        if self.0.m > 1 {
            e.coeffs[1] = BigUint::one();
        }
        e
    }

    /// Element from explicit power-basis coordinates (low first, length <= m).
    pub fn elem(&self, coords: &[BigUint]) -> UnramElem {
        assert!(coords.len() <= self.0.m);
        let mut coeffs = vec![BigUint::zero(); self.0.m];
        for (i, c) in coords.iter().enumerate() {
            coeffs[i] = c % &self.0.modulus;
        }
        UnramElem { ring: self.clone(), coeffs }
    }

    /// Coefficient-wise lift of a residue-field element.
    pub fn lift(&self, x: &FqElem) -> UnramElem {
        assert!(*x.field() == self.0.residue, "element of a different residue field");
        let coeffs = x.coeffs().iter().map(|&c| BigUint::from(c)).collect();
        UnramElem { ring: self.clone(), coeffs }
    }

    /// Image of sigma on the generator t, as an element.
    fn sigma_of_gen(&self) -> UnramElem {
        let coords = self.0.sigma_gen.get_or_init(|| {
            // Newton-lift the root of lift_poly that reduces to t^p
            let phi: Poly<UnramElem> = Poly::from_coeffs(
                self.0.lift_poly.iter().map(|&c| self.from_i64(c as i64)).collect(),
            );
            let dphi = phi.derivative();
            let seed = self.0.residue.gen().frobenius();
            let mut x = self.lift(&seed);
            let iters = 33 - (self.0.n.max(2) - 1).leading_zeros();
            for _ in 0..iters {
                let fx = phi.eval(&x);
                let dfx = dphi.eval(&x).invert().expect("lift_poly is separable mod p");
                x = x.sub(&fx.mul(&dfx));
            }
            assert!(phi.eval(&x).is_zero(), "Frobenius lift failed to converge");
            x.coeffs
        });
        UnramElem { ring: self.clone(), coeffs: coords.clone() }
    }
}

impl UnramElem {
    pub fn ring(&self) -> &UnramRing {
        &self.ring
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Zero at this precision, i.e. every coordinate divisible by p^N.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn assert_same(&self, other: &UnramElem) {
        assert!(
            self.ring == other.ring,
            "mixing elements of different rings or precisions: {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    pub fn add(&self, other: &UnramElem) -> UnramElem {
        self.assert_same(other);
        let md = &self.ring.0.modulus;
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % md).collect();
        UnramElem { ring: self.ring.clone(), coeffs }
    }

    pub fn sub(&self, other: &UnramElem) -> UnramElem {
        self.assert_same(other);
        let md = &self.ring.0.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + md - b) % md)
            .collect();
        UnramElem { ring: self.ring.clone(), coeffs }
    }

    pub fn neg(&self) -> UnramElem {
        let md = &self.ring.0.modulus;
        let coeffs = self.coeffs.iter().map(|a| (md - a) % md).collect();
        UnramElem { ring: self.ring.clone(), coeffs }
    }

    pub fn mul(&self, other: &UnramElem) -> UnramElem {
        self.assert_same(other);
        let inner = &self.ring.0;
        let m = inner.m;
        let md = &inner.modulus;
        if m == 1 {
            return UnramElem {
                ring: self.ring.clone(),
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0] % md],
            };
        }
        let mut conv = vec![BigUint::zero(); 2 * m - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                conv[i + j] = (&conv[i + j] + a * b) % md;
            }
        }
        // reduce by the monic lift_poly
        for i in (m..2 * m - 1).rev() {
            let c = std::mem::take(&mut conv[i]);
            if c.is_zero() {
                continue;
            }
            for (j, &lc) in inner.lift_poly.iter().take(m).enumerate() {
                if lc != 0 {
                    let sub = &c * lc % md;
                    conv[i - m + j] = (&conv[i - m + j] + md - sub) % md;
                }
            }
        }
        conv.truncate(m);
        UnramElem { ring: self.ring.clone(), coeffs: conv }
    }

    pub fn square(&self) -> UnramElem {
        self.mul(self)
    }

    /// Scale by an integer scalar.
    pub fn scale(&self, k: &BigUint) -> UnramElem {
        let md = &self.ring.0.modulus;
        let kr = k % md;
        let coeffs = self.coeffs.iter().map(|a| a * &kr % md).collect();
        UnramElem { ring: self.ring.clone(), coeffs }
    }

    pub fn pow(&self, mut e: u64) -> UnramElem {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// p-adic valuation: minimum coordinate valuation, or None when every
    /// coordinate vanishes mod p^N (valuation at least N, indistinguishable
    /// from zero at this precision).
    pub fn valuation(&self) -> Option<u32> {
        let inner = &self.ring.0;
        let v = self
            .coeffs
            .iter()
            .map(|c| vp_biguint(c, inner.p, inner.n))
            .min()
            .unwrap();
        if v >= inner.n {
            None
        } else {
            Some(v)
        }
    }

    /// Image in the residue field.
    pub fn reduce(&self) -> FqElem {
        let inner = &self.ring.0;
        let p = BigUint::from(inner.p);
        let coords: Vec<u64> = self.coeffs.iter().map(|c| (c % &p).to_u64().unwrap()).collect();
        inner.residue.elem(&coords)
    }

    /// Multiplicative inverse of a unit.
    pub fn invert(&self) -> Result<UnramElem, RingError> {
        let red = self.reduce();
        let Some(inv0) = red.inv() else {
            return Err(RingError::NotAUnit);
        };
        let mut z = self.ring.lift(&inv0);
        let two = self.ring.from_i64(2);
        let iters = 33 - (self.ring.0.n.max(2) - 1).leading_zeros();
        for _ in 0..iters {
            z = z.mul(&two.sub(&self.mul(&z)));
        }
        debug_assert!(self.mul(&z) == self.ring.one());
        Ok(z)
    }

    /// The p-power Frobenius automorphism.
    pub fn frobenius(&self) -> UnramElem {
        if self.ring.0.m == 1 {
            return self.clone();
        }
        let st = self.ring.sigma_of_gen();
        let mut acc = self.ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&st);
            acc.coeffs[0] = (&acc.coeffs[0] + c) % &self.ring.0.modulus;
        }
        acc
    }

    /// sigma^e.
    pub fn frobenius_pow(&self, e: usize) -> UnramElem {
        let mut x = self.clone();
        for _ in 0..e % self.ring.0.m.max(1) {
            x = x.frobenius();
        }
        x
    }

    /// The same element at a lower precision.
    pub fn truncate(&self, target: &UnramRing) -> UnramElem {
        assert!(
            target.0.p == self.ring.0.p && target.0.m == self.ring.0.m,
            "truncation into an unrelated ring"
        );
        assert!(target.0.n <= self.ring.0.n, "cannot truncate upward");
        let coeffs = self.coeffs.iter().map(|c| c % &target.0.modulus).collect();
        UnramElem { ring: target.clone(), coeffs }
    }

    /// Exact division by p^k, landing in `target` (which must not claim more
    /// precision than the N - k digits actually known). None when some
    /// coordinate is not divisible by p^k.
    pub fn div_exact_pow_p(&self, k: u32, target: &UnramRing) -> Option<UnramElem> {
        assert!(target.0.p == self.ring.0.p && target.0.m == self.ring.0.m);
        assert!(
            target.0.n + k <= self.ring.0.n,
            "quotient would claim more digits than are known"
        );
        let pk = BigUint::from(self.ring.0.p).pow(k);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(&pk);
            if !r.is_zero() {
                return None;
            }
            coeffs.push(q % &target.0.modulus);
        }
        Some(UnramElem { ring: target.clone(), coeffs })
    }
}

impl Coeff for UnramElem {
    fn is_zero(&self) -> bool {
        UnramElem::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.one()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn mul_u64(&self, n: u64) -> Self {
        self.scale(&BigUint::from(n))
    }
    fn try_invert(&self) -> Option<Self> {
        self.invert().ok()
    }
}

impl fmt::Display for UnramElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ring.0.m == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            write!(f, "[")?;
            for (i, c) in self.coeffs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")
        }
    }
}

impl fmt::Debug for UnramElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Reduction of a ring polynomial to the residue field.
pub fn reduce_poly(f: &Poly<UnramElem>) -> Poly<FqElem> {
    Poly::from_coeffs(f.coeffs().iter().map(|c| c.reduce()).collect())
}

/// Coefficient-wise lift of a residue polynomial into the ring.
pub fn lift_poly_to(ring: &UnramRing, f: &Poly<FqElem>) -> Poly<UnramElem> {
    Poly::from_coeffs(f.coeffs().iter().map(|c| ring.lift(c)).collect())
}

/// Polynomial over the ring from signed integer coefficients.
pub fn int_poly_in(ring: &UnramRing, coeffs: &[i64]) -> Poly<UnramElem> {
    Poly::from_coeffs(coeffs.iter().map(|&c| ring.from_i64(c)).collect())
}

/// Truncate every coefficient of a ring polynomial.
pub fn truncate_poly(f: &Poly<UnramElem>, target: &UnramRing) -> Poly<UnramElem> {
    Poly::from_coeffs(f.coeffs().iter().map(|c| c.truncate(target)).collect())
}

// ---------------------------------------------------------------------------
// embeddings between unramified rings
// ---------------------------------------------------------------------------

/// Canonical embedding of UnramRing(p, d, N) into UnramRing(p, D, N) for
/// d | D, compatible with the canonical residue-field embedding.
pub struct UnramEmbedding {
    small: UnramRing,
    big: UnramRing,
    residue: FqEmbedding,
    basis_images: Vec<UnramElem>,
}

impl UnramEmbedding {
    pub fn new(small: &UnramRing, big: &UnramRing) -> UnramEmbedding {
        assert_eq!(small.p(), big.p(), "different primes");
        assert_eq!(small.precision(), big.precision(), "different precisions");
        assert!(big.degree() % small.degree() == 0, "no embedding exists");
        let residue = FqEmbedding::new(small.residue_field(), big.residue_field());
        let gen_image = if small.degree() == 1 {
            big.zero()
        } else {
            // Newton-lift the root of small's lift_poly above the canonical
            // residue embedding of its generator
            let phi: Poly<UnramElem> = Poly::from_coeffs(
                small.lift_poly().iter().map(|&c| big.from_i64(c as i64)).collect(),
            );
            let dphi = phi.derivative();
            let mut x = big.lift(residue.gen_image());
            let iters = 33 - (big.precision().max(2) - 1).leading_zeros();
            for _ in 0..iters {
                let fx = phi.eval(&x);
                let dfx = dphi.eval(&x).invert().expect("lift_poly separable mod p");
                x = x.sub(&fx.mul(&dfx));
            }
            assert!(phi.eval(&x).is_zero(), "embedding lift failed to converge");
            x
        };
        let mut basis_images = Vec::with_capacity(small.degree());
        let mut cur = big.one();
        for _ in 0..small.degree() {
            basis_images.push(cur.clone());
            cur = cur.mul(&gen_image);
        }
        UnramEmbedding { small: small.clone(), big: big.clone(), residue, basis_images }
    }

    pub fn small(&self) -> &UnramRing {
        &self.small
    }

    pub fn big(&self) -> &UnramRing {
        &self.big
    }

    pub fn residue_embedding(&self) -> &FqEmbedding {
        &self.residue
    }

    pub fn embed(&self, x: &UnramElem) -> UnramElem {
        assert!(*x.ring() == self.small);
        let mut acc = self.big.zero();
        for (c, b) in x.coeffs().iter().zip(&self.basis_images) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }

    /// Preimage in the small ring when `y` lies in the embedded image.
    pub fn restrict(&self, y: &UnramElem) -> Option<UnramElem> {
        assert!(*y.ring() == self.big);
        let d = self.small.degree();
        let big_m = self.big.degree();
        let rows: Vec<Vec<BigUint>> = (0..big_m)
            .map(|i| (0..d).map(|j| self.basis_images[j].coeffs()[i].clone()).collect())
            .collect();
        let sol = zmod_solve_unit_pivots(
            self.big.p(),
            self.big.modulus(),
            &rows,
            y.coeffs(),
        )?;
        let cand = self.small.elem(&sol);
        if self.embed(&cand) == *y {
            Some(cand)
        } else {
            None
        }
    }

    pub fn embed_poly(&self, f: &Poly<UnramElem>) -> Poly<UnramElem> {
        f.map(|c| self.embed(c))
    }

    pub fn restrict_poly(&self, f: &Poly<UnramElem>) -> Option<Poly<UnramElem>> {
        let mut out = Vec::new();
        for c in f.coeffs() {
            out.push(self.restrict(c)?);
        }
        Some(Poly::from_coeffs(out))
    }
}

/// Solve M x = b over Z/p^n where the columns of M are independent mod p, so
/// every column admits a unit pivot. None when the system is inconsistent.
fn zmod_solve_unit_pivots(
    p: u64,
    modulus: &BigUint,
    rows: &[Vec<BigUint>],
    b: &[BigUint],
) -> Option<Vec<BigUint>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let big_p = BigUint::from(p);
    let mut a: Vec<Vec<BigUint>> = rows
        .iter()
        .zip(b)
        .map(|(r, rhs)| {
            let mut row = r.clone();
            row.push(rhs.clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::with_capacity(ncols);
    let mut used = vec![false; nrows];
    for col in 0..ncols {
        let piv = (0..nrows)
            .find(|&r| !used[r] && !(&a[r][col] % &big_p).is_zero())
            .expect("columns must be independent mod p");
        used[piv] = true;
        let inv = inv_mod(&a[piv][col], modulus).unwrap();
        for x in a[piv].iter_mut() {
            *x = &*x * &inv % modulus;
        }
        for r in 0..nrows {
            if r != piv && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..=ncols {
                    let sub = &f * &a[piv][c] % modulus;
                    a[r][c] = (&a[r][c] + modulus - sub) % modulus;
                }
            }
        }
        pivot_rows.push(piv);
    }
    for (r, row) in a.iter().enumerate() {
        if !used[r] && !row[ncols].is_zero() {
            return None;
        }
    }
    Some(pivot_rows.iter().map(|&r| a[r][ncols].clone()).collect())
}

// ---------------------------------------------------------------------------
// resultants over the truncated ring
// ---------------------------------------------------------------------------

/// Resultant of two ring polynomials via Gaussian elimination on the
/// Sylvester matrix with valuation-minimal pivoting.
///
/// Dividing a column by a pivot of valuation v leaves the top v digits of the
/// affected entries meaningless, so the computation tracks the total lost
/// precision and returns the determinant in the ring truncated to what is
/// actually known. A column with no pivot below the current precision floor
/// aborts: the determinant cannot be distinguished from zero.
pub fn resultant(
    f: &Poly<UnramElem>,
    g: &Poly<UnramElem>,
) -> Result<UnramElem, RingError> {
    assert!(!f.is_zero() && !g.is_zero(), "resultant of a zero polynomial");
    let ring = f.coeffs()[0].ring().clone();
    let df = f.deg();
    let dg = g.deg();
    if df == 0 {
        return Ok(f.coeffs()[0].pow(dg as u64));
    }
    if dg == 0 {
        return Ok(g.coeffs()[0].pow(df as u64));
    }
    let size = df + dg;
    let zero = ring.zero();
    let mut mat: Vec<Vec<UnramElem>> = Vec::with_capacity(size);
    for i in 0..dg {
        let mut row = vec![zero.clone(); size];
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        mat.push(row);
    }
    for i in 0..df {
        let mut row = vec![zero.clone(); size];
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        mat.push(row);
    }
    let n = ring.precision();
    let mut lost = 0u32;
    let mut det = ring.one();
    let mut negate = false;
    for col in 0..size {
        let mut best: Option<(usize, u32)> = None;
        for (r, row) in mat.iter().enumerate().skip(col) {
            if let Some(v) = row[col].valuation() {
                if v < n - lost && best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((r, v));
                }
            }
        }
        let Some((piv, v)) = best else {
            return Err(RingError::PrecisionExhausted);
        };
        if piv != col {
            mat.swap(piv, col);
            negate = !negate;
        }
        lost += v;
        if lost >= n {
            return Err(RingError::PrecisionExhausted);
        }
        det = det.mul(&mat[col][col]);
        let shifted_ring = ring.truncated(n - v);
        let unit = mat[col][col]
            .div_exact_pow_p(v, &shifted_ring)
            .expect("pivot valuation was just computed")
            .invert()
            .expect("shifted pivot is a unit");
        for r in col + 1..size {
            if mat[r][col].is_zero() {
                continue;
            }
            // entry / pivot, with the quotient's garbage digits padded back
            // up to full precision; correctness is mod p^(n - lost) only
            let shifted = match mat[r][col].div_exact_pow_p(v, &shifted_ring) {
                Some(s) => s,
                None => return Err(RingError::PrecisionExhausted),
            };
            let factor_low = shifted.mul(&unit);
            let factor = UnramElem {
                ring: ring.clone(),
                coeffs: factor_low.coeffs().to_vec(),
            };
            for c in col..size {
                let t = factor.mul(&mat[col][c]);
                mat[r][c] = mat[r][c].sub(&t);
            }
        }
    }
    if negate {
        det = det.neg();
    }
    let out_ring = ring.truncated(n - lost);
    Ok(det.truncate(&out_ring))
}

/// Discriminant of a monic ring polynomial, with the same precision caveats
/// as [`resultant`].
pub fn discriminant(f: &Poly<UnramElem>) -> Result<UnramElem, RingError> {
    assert!(f.is_monic(), "discriminant implemented for monic polynomials");
    let n = f.deg();
    let deriv = f.derivative();
    if deriv.is_zero() {
        return Err(RingError::PrecisionExhausted);
    }
    let res = resultant(f, &deriv)?;
    if (n * (n - 1) / 2) % 2 == 1 {
        Ok(res.neg())
    } else {
        Ok(res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int_poly;
    use num_bigint::BigInt;

    #[test]
    fn valuation_examples() {
        let z2 = UnramRing::new(2, 1, 10);
        assert_eq!(z2.from_i64(8).valuation(), Some(3));
        assert_eq!(z2.from_i64(0).valuation(), None);
        assert_eq!(z2.from_i64(1024).valuation(), None);
        let w2 = UnramRing::new(2, 2, 10);
        let x = w2.gen().add(&w2.one()).scale(&BigUint::from(2u32));
        assert_eq!(x.valuation(), Some(1));
    }

    #[test]
    fn frobenius_on_quadratic_generator() {
        // lift_poly = t^2 + t + 1; the other root mod 16 is -1 - t = 15 + 15t
        let ring = UnramRing::new(2, 2, 4);
        let g = ring.gen();
        let sg = g.frobenius();
        assert_eq!(sg.coeffs(), &[BigUint::from(15u32), BigUint::from(15u32)]);
        assert_eq!(sg.reduce(), g.reduce().frobenius());
        assert_eq!(sg.frobenius(), g);
    }

    #[test]
    fn frobenius_is_ring_homomorphism() {
        let ring = UnramRing::new(2, 3, 16);
        let a = ring.gen().add(&ring.from_i64(7));
        let b = ring.gen().square().add(&ring.from_i64(3).mul(&ring.gen()));
        assert_eq!(a.frobenius().mul(&b.frobenius()), a.mul(&b).frobenius());
        assert_eq!(a.frobenius().add(&b.frobenius()), a.add(&b).frobenius());
        assert_eq!(a.frobenius_pow(3), a);
        assert_eq!(a.frobenius().reduce(), a.reduce().frobenius());
    }

    #[test]
    fn invert_examples() {
        let z2 = UnramRing::new(2, 1, 4);
        let inv3 = z2.from_i64(3).invert().unwrap();
        assert_eq!(inv3, z2.from_i64(11));
        assert_eq!(z2.one().invert().unwrap(), z2.one());
        assert_eq!(z2.from_i64(2).invert(), Err(RingError::NotAUnit));
        let w3 = UnramRing::new(3, 2, 7);
        let u = w3.gen().add(&w3.from_i64(5));
        assert_eq!(u.mul(&u.invert().unwrap()), w3.one());
    }

    #[test]
    fn valuation_additivity() {
        let ring = UnramRing::new(2, 2, 20);
        let a = ring.gen().add(&ring.one()).scale(&BigUint::from(4u32));
        let b = ring.from_i64(6);
        assert_eq!(a.valuation(), Some(2));
        assert_eq!(b.valuation(), Some(1));
        assert_eq!(a.mul(&b).valuation(), Some(3));
        let s = a.add(&b);
        assert!(s.valuation().unwrap() >= 1);
    }

    #[test]
    fn precision_truncation_consistency() {
        let hi = UnramRing::new(2, 2, 16);
        let lo = UnramRing::new(2, 2, 8);
        let x = hi.from_i64(3).mul(&hi.gen()).add(&hi.from_i64(21));
        let inv_hi = x.invert().unwrap().truncate(&lo);
        let inv_lo = x.truncate(&lo).invert().unwrap();
        assert_eq!(inv_hi, inv_lo);
        let sg_hi = hi.gen().frobenius().truncate(&lo);
        let sg_lo = lo.gen().frobenius();
        assert_eq!(sg_hi, sg_lo);
        assert_eq!(hi.truncated(8), lo);
    }

    #[test]
    fn div_exact_pow_p() {
        let ring = UnramRing::new(2, 1, 10);
        let lo = ring.truncated(8);
        let x = ring.from_i64(12);
        let q = x.div_exact_pow_p(2, &lo).unwrap();
        assert_eq!(q, lo.from_i64(3));
        assert_eq!(x.div_exact_pow_p(3, &ring.truncated(7)), None);
    }

    #[test]
    fn embedding_roundtrip() {
        let small = UnramRing::new(2, 1, 8);
        let big = UnramRing::new(2, 2, 8);
        let emb = UnramEmbedding::new(&small, &big);
        let x = small.from_i64(-37);
        assert_eq!(emb.embed(&x), big.from_i64(-37));
        assert_eq!(emb.restrict(&emb.embed(&x)).unwrap(), x);
        assert_eq!(emb.restrict(&big.gen()), None);

        let mid = UnramRing::new(2, 2, 8);
        let top = UnramRing::new(2, 6, 8);
        let e2 = UnramEmbedding::new(&mid, &top);
        let y = mid.gen().add(&mid.from_i64(6));
        let img = e2.embed(&y);
        assert_eq!(e2.restrict(&img).unwrap(), y);
        // ring homomorphism spot check
        let z = mid.gen().scale(&BigUint::from(5u32));
        assert_eq!(e2.embed(&y.mul(&z)), img.mul(&e2.embed(&z)));
        // compatible with the canonical residue embedding
        assert_eq!(img.reduce(), e2.residue_embedding().embed(&y.reduce()));
    }

    #[test]
    fn resultant_matches_integer_computation() {
        let ring = UnramRing::new(2, 1, 12);
        let f = int_poly_in(&ring, &[-4, 0, 1]);
        let d = discriminant(&f).unwrap();
        assert_eq!(d.valuation(), Some(4));
        assert_eq!(d, d.ring().from_i64(16));

        let g = int_poly_in(&ring, &[7, -9, 1]);
        let dg = discriminant(&g).unwrap();
        let expect = crate::poly::discriminant(&int_poly(&[7, -9, 1]));
        assert_eq!(expect, BigInt::from(53));
        assert_eq!(dg, dg.ring().from_bigint(&expect).truncate(dg.ring()));

        let r = resultant(&int_poly_in(&ring, &[-2, 1]), &int_poly_in(&ring, &[2, 1])).unwrap();
        assert_eq!(r, r.ring().from_i64(4));
    }

    #[test]
    fn resultant_precision_exhaustion() {
        let ring = UnramRing::new(2, 1, 6);
        let f = int_poly_in(&ring, &[-3, 1]);
        assert_eq!(resultant(&f, &f), Err(RingError::PrecisionExhausted));
    }
}
