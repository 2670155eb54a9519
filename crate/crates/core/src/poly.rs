//! Dense univariate polynomials over an abstract coefficient ring.
//!
//! Coefficients are stored low degree first with no trailing zeros, so the
//! empty vector is the zero polynomial. The ring is abstracted by [`Coeff`]
//! because elements here carry their own ring handles (finite field, truncated
//! unramified ring, ...) and there is no global `zero()`; fresh constants are
//! instead derived from an existing coefficient via `zero_like` / `one_like`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// Ring element usable as a polynomial coefficient.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    /// Zero of the same ring as `self`.
    fn zero_like(&self) -> Self;
    /// One of the same ring as `self`.
    fn one_like(&self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// Multiply by a small natural number (used by formal derivatives).
    fn mul_u64(&self, n: u64) -> Self;
    /// Multiplicative inverse when `self` is a unit of its ring.
    fn try_invert(&self) -> Option<Self>;
}

/// Rings with exact division, enough for fraction-free elimination.
pub trait ExactDiv: Sized {
    /// `self / d` when the division is exact in the ring.
    fn div_exact(&self, d: &Self) -> Option<Self>;
}

impl Coeff for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_u64(&self, n: u64) -> Self {
        self * BigInt::from(n)
    }
    fn try_invert(&self) -> Option<Self> {
        if self.magnitude().is_one() {
            Some(self.clone())
        } else {
            None
        }
    }
}

impl ExactDiv for BigInt {
    fn div_exact(&self, d: &Self) -> Option<Self> {
        if Zero::is_zero(d) {
            return None;
        }
        let (q, r) = num_integer::Integer::div_rem(self, d);
        if Zero::is_zero(&r) {
            Some(q)
        } else {
            None
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Build from low-degree-first coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * x^deg`.
    pub fn monomial(c: T, deg: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![c.zero_like(); deg + 1];
        coeffs[deg] = c;
        Poly { coeffs }
    }

    /// `x - r`.
    pub fn x_minus(r: &T) -> Self {
        Poly::from_coeffs(vec![r.neg_ref(), r.one_like()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree of a polynomial known to be nonzero.
    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn leading(&self) -> &T {
        self.coeffs.last().expect("leading coefficient of zero polynomial")
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c == &c.one_like())
    }

    /// Coefficient of `x^i`, clones or synthesizes zero from `like`.
    pub fn coeff(&self, i: usize, like: &T) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(|| like.zero_like())
    }

    pub fn coeff_ref(&self, i: usize) -> Option<&T> {
        self.coeffs.get(i)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.sub_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.neg_ref(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn mul_scalar(&self, c: &T) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// Map coefficients into another ring.
    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let out: Vec<T> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_u64(i as u64))
            .collect();
        Poly::from_coeffs(out)
    }

    /// Quotient and remainder; requires the divisor's leading coefficient to
    /// be a unit (always true for monic divisors).
    pub fn divmod(&self, den: &Self) -> (Self, Self) {
        assert!(!den.is_zero(), "division by zero polynomial");
        let dd = den.deg();
        let lead_inv = den
            .leading()
            .try_invert()
            .expect("divisor leading coefficient must be a unit");
        if self.is_zero() || self.deg() < dd {
            return (Poly::zero(), self.clone());
        }
        let zero = self.coeffs[0].zero_like();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![zero.clone(); rem.len() - dd];
        for pos in (0..quo.len()).rev() {
            let lead = rem[pos + dd].clone();
            if lead.is_zero() {
                continue;
            }
            let q = lead.mul_ref(&lead_inv);
            for (i, c) in den.coeffs.iter().enumerate() {
                rem[pos + i] = rem[pos + i].sub_ref(&q.mul_ref(c));
            }
            quo[pos] = q;
        }
        (Poly::from_coeffs(quo), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, den: &Self) -> Self {
        self.divmod(den).1
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, den: &Self) -> Self {
        let (q, r) = self.divmod(den);
        assert!(r.is_zero(), "polynomial division was not exact");
        q
    }

    /// Scale so the leading coefficient is one; requires it to be a unit.
    pub fn monic(&self) -> Self {
        assert!(!self.is_zero());
        let inv = self
            .leading()
            .try_invert()
            .expect("leading coefficient must be a unit");
        self.mul_scalar(&inv)
    }

    /// Monic greatest common divisor via Euclid; coefficients must form a
    /// field (every nonzero leading coefficient invertible).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*self + t*other = g`,
    /// `g` monic. Field coefficients required.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let one = Poly::constant(if !self.is_zero() {
            self.coeffs[0].one_like()
        } else {
            other.coeffs[0].one_like()
        });
        let mut s0 = one.clone();
        let mut s1 = Poly::zero();
        let mut t0 = Poly::zero();
        let mut t1 = one;
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lead_inv = r0.leading().try_invert().expect("gcd leading not a unit");
        let ci = Poly::constant(lead_inv);
        (r0.mul(&ci), s0.mul(&ci), t0.mul(&ci))
    }

    /// `x^n f(1/x)` for `n >= deg f`: the coefficient list reversed after
    /// padding to length `n+1`. Used for the chart at infinity.
    pub fn reverse_padded(&self, n: usize) -> Self {
        let zero = match self.coeffs.first() {
            Some(c) => c.zero_like(),
            None => return Poly::zero(),
        };
        assert!(self.deg() <= n, "reverse length shorter than degree");
        let mut out = vec![zero; n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[n - i] = c.clone();
        }
        Poly::from_coeffs(out)
    }

    /// `f(x + u)` by Horner expansion.
    pub fn translate(&self, u: &T) -> Self {
        let mut out = Poly::zero();
        let shift = Poly::from_coeffs(vec![u.clone(), u.one_like()]);
        for c in self.coeffs.iter().rev() {
            out = out.mul(&shift).add(&Poly::constant(c.clone()));
        }
        out
    }

    /// `self^e mod modulus` by square-and-multiply on the bits of `e`.
    pub fn powmod(&self, e: &num_bigint::BigUint, modulus: &Self) -> Self {
        let one = Poly::constant(modulus.leading().one_like());
        let mut result = one;
        let mut base = self.rem(modulus);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base).rem(modulus);
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(modulus);
            }
        }
        result
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: Coeff> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

/// Resultant of `f` and `g` as the Sylvester determinant, computed by
/// fraction-free Bareiss elimination. Requires an exact-division ring.
pub fn resultant<T: Coeff + ExactDiv>(f: &Poly<T>, g: &Poly<T>) -> T {
    let zero = f
        .coeffs
        .first()
        .or_else(|| g.coeffs.first())
        .expect("resultant of zero polynomials")
        .zero_like();
    let n = f.deg();
    let m = g.deg();
    if n == 0 && m == 0 {
        return zero.one_like();
    }
    let size = n + m;
    let mut a = vec![vec![zero.clone(); size]; size];
    for i in 0..m {
        for (j, c) in f.coeffs.iter().rev().enumerate() {
            a[i][i + j] = c.clone();
        }
    }
    for i in 0..n {
        for (j, c) in g.coeffs.iter().rev().enumerate() {
            a[m + i][i + j] = c.clone();
        }
    }
    let mut sign_flip = false;
    let mut prev = zero.one_like();
    for k in 0..size {
        if a[k][k].is_zero() {
            let swap = (k + 1..size).find(|&r| !a[r][k].is_zero());
            match swap {
                Some(r) => {
                    a.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return zero,
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let t = a[k][k].mul_ref(&a[i][j]).sub_ref(&a[i][k].mul_ref(&a[k][j]));
                a[i][j] = t
                    .div_exact(&prev)
                    .expect("Bareiss division must be exact");
            }
            a[i][k] = zero.clone();
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if sign_flip {
        det.neg_ref()
    } else {
        det
    }
}

/// Discriminant of a monic polynomial: `(-1)^(n(n-1)/2) Res(f, f')`.
pub fn discriminant<T: Coeff + ExactDiv>(f: &Poly<T>) -> T {
    assert!(f.is_monic(), "discriminant requires a monic polynomial");
    let n = f.deg();
    assert!(n >= 1);
    let fp = f.derivative();
    if fp.is_zero() {
        return f.coeffs[0].zero_like();
    }
    let r = resultant(f, &fp);
    if (n * (n - 1) / 2) % 2 == 1 {
        r.neg_ref()
    } else {
        r
    }
}

/// Convenience: integer polynomial from `i64` coefficients, low degree first.
pub fn int_poly(coeffs: &[i64]) -> Poly<BigInt> {
    Poly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
}
