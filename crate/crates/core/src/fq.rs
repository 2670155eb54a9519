//! Finite fields F_{p^m} with deterministic defining polynomials.
//!
//! A field is represented as F_p[t]/(defining_poly) where defining_poly is the
//! canonical choice for (p, m): the lexicographically smallest monic
//! irreducible of degree m, candidates keyed by their non-leading coefficient
//! tuple (c_0, ..., c_{m-1}) compared left to right. Two handles with equal
//! (p, m) therefore describe literally the same field and elements move
//! between them freely.
//!
//! Elements are coefficient vectors (low degree first) reduced mod p. The
//! prime is capped below 2^31 so products fit comfortably in u128
//! accumulators.

use crate::factor;
use crate::poly::{Coeff, Poly};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
struct FieldInner {
    p: u64,
    m: usize,
    /// Monic, degree m, coefficients in 0..p, low degree first (length m+1).
    poly: Vec<u64>,
}

/// Handle to a finite field F_{p^m}. Cheap to clone.
#[derive(Clone)]
pub struct FqField(Arc<FieldInner>);

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.m == other.0.m
    }
}
impl Eq for FqField {}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}}", self.0.p, self.0.m)
    }
}

/// Element of an [`FqField`].
#[derive(Clone)]
pub struct FqElem {
    field: FqField,
    /// Length m, entries reduced mod p, low degree first.
    coeffs: Vec<u64>,
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for FqElem {}

impl std::hash::Hash for FqElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.0.p.hash(state);
        self.field.0.m.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FqElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on elements of one field: lexicographic on the coefficient
/// tuple (c_0, ..., c_{m-1}), c_0 most significant. Used wherever the crate
/// needs a deterministic canonical choice among conjugates.
impl Ord for FqElem {
    fn cmp(&self, other: &Self) -> Ordering {
        assert!(self.field == other.field, "ordering elements of different fields");
        self.coeffs.cmp(&other.coeffs)
    }
}

// ---------------------------------------------------------------------------
// bootstrap arithmetic on prime-field coefficient vectors (low degree first)
// ---------------------------------------------------------------------------

fn pf_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pf_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    let mut out: Vec<u64> = out.into_iter().map(|c| c as u64).collect();
    pf_trim(&mut out);
    out
}

fn pf_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // m monic
    let mut r: Vec<u64> = a.to_vec();
    pf_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let pos = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead as u128 * c as u128) % p as u128;
                let cur = r[pos + i] as u128;
                r[pos + i] = ((cur + p as u128 * p as u128 - sub) % p as u128) as u64;
            }
        }
        r.pop();
        pf_trim(&mut r);
        if r.len() <= dm {
            break;
        }
    }
    r
}

fn pf_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    pf_trim(&mut x);
    pf_trim(&mut y);
    while !y.is_empty() {
        // make y monic for pf_rem
        let inv = mod_inv(*y.last().unwrap(), p);
        let ym: Vec<u64> = y.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect();
        let r = pf_rem(&x, &ym, p);
        x = ym;
        y = r;
    }
    x
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p prime
    mod_pow(a, p - 2, p)
}

fn mod_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r: u128 = 1;
    let mut base = a as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    a = r as u64;
    a
}

/// `x^(p^k) mod m` over F_p, by k rounds of `t -> t^p mod m`.
fn pf_frob_power(x: &[u64], k: usize, m: &[u64], p: u64) -> Vec<u64> {
    let mut t = pf_rem(x, m, p);
    for _ in 0..k {
        // t^p mod m via square-and-multiply on exponent p
        let mut acc: Vec<u64> = vec![1];
        let mut base = t.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = pf_rem(&pf_mul(&acc, &base, p), m, p);
            }
            e >>= 1;
            if e > 0 {
                base = pf_rem(&pf_mul(&base, &base, p), m, p);
            }
        }
        t = acc;
    }
    t
}

fn pf_is_irreducible(poly: &[u64], p: u64) -> bool {
    let m = poly.len() - 1;
    if m == 0 {
        return false;
    }
    let x = vec![0, 1];
    // x^(p^m) == x mod poly
    let xpm = pf_frob_power(&x, m, poly, p);
    let xr = pf_rem(&x, poly, p);
    if xpm != xr {
        return false;
    }
    // gcd(x^(p^(m/l)) - x, poly) == 1 for every prime l | m
    let mut rest = m;
    let mut l = 2;
    let mut primes = Vec::new();
    while l * l <= rest {
        if rest % l == 0 {
            primes.push(l);
            while rest % l == 0 {
                rest /= l;
            }
        }
        l += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    for l in primes {
        let e = m / l;
        let xe = pf_frob_power(&x, e, poly, p);
        // xe - x
        let mut diff = xe;
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        pf_trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        let g = pf_gcd(&diff, poly, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The canonical defining polynomial for F_{p^m}.
fn canonical_poly(p: u64, m: usize) -> Vec<u64> {
    assert!(m >= 1);
    if m == 1 {
        return vec![0, 1]; // t
    }
    // Lex order on (c_0, ..., c_{m-1}) with c_0 most significant. Any
    // irreducible of degree >= 2 has c_0 != 0, so start c_0 at 1.
    for c0 in 1..p {
        // remaining digits (c_1, ..., c_{m-1}) counted with c_{m-1} least
        // significant so that tuples appear in lex order
        let digits = m - 1;
        let total = (p as u128).checked_pow(digits as u32).expect("field too large");
        for n in 0..total {
            let mut cand = vec![0u64; m + 1];
            cand[0] = c0;
            cand[m] = 1;
            let mut rem = n;
            for i in (1..m).rev() {
                cand[i] = (rem % p as u128) as u64;
                rem /= p as u128;
            }
            if pf_is_irreducible(&cand, p) {
                return cand;
            }
        }
    }
    unreachable!("no irreducible polynomial found");
}

// ---------------------------------------------------------------------------
// field and element API
// ---------------------------------------------------------------------------

impl FqField {
    /// The field F_{p^m} with its canonical defining polynomial.
    pub fn new(p: u64, m: usize) -> FqField {
        assert!(p >= 2 && p < (1 << 31), "prime must be in [2, 2^31)");
        assert!(m >= 1, "extension degree must be positive");
        let poly = canonical_poly(p, m);
        FqField(Arc::new(FieldInner { p, m, poly }))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Absolute degree m over the prime field.
    pub fn degree(&self) -> usize {
        self.0.m
    }

    /// Monic defining polynomial, coefficients low degree first, length m+1.
    pub fn defining_poly(&self) -> &[u64] {
        &self.0.poly
    }

    /// Number of elements, as u128 (panics if it does not fit).
    pub fn order(&self) -> u128 {
        (self.0.p as u128)
            .checked_pow(self.0.m as u32)
            .expect("field order exceeds u128")
    }

    pub fn zero(&self) -> FqElem {
        FqElem { field: self.clone(), coeffs: vec![0; self.0.m] }
    }

    pub fn one(&self) -> FqElem {
        self.from_prime(1)
    }

    /// Image of an integer residue under F_p -> F_{p^m}.
    pub fn from_prime(&self, a: u64) -> FqElem {
        let mut coeffs = vec![0; self.0.m];
        coeffs[0] = a % self.0.p;
        FqElem { field: self.clone(), coeffs }
    }

    /// Image of a signed integer.
    pub fn from_int(&self, a: i64) -> FqElem {
        let p = self.0.p as i64;
        self.from_prime(a.rem_euclid(p) as u64)
    }

    /// The residue class of t, a root of the defining polynomial.
    pub fn gen(&self) -> FqElem {
        if self.0.m == 1 {
            return self.zero();
        }
        let mut coeffs = vec![0; self.0.m];
        coeffs[1] = 1;
        FqElem { field: self.clone(), coeffs }
    }

    /// Element from explicit coefficients (low degree first, length <= m).
    pub fn elem(&self, coeffs: &[u64]) -> FqElem {
        assert!(coeffs.len() <= self.0.m, "too many coefficients");
        let mut c = vec![0; self.0.m];
        for (i, &a) in coeffs.iter().enumerate() {
            c[i] = a % self.0.p;
        }
        FqElem { field: self.clone(), coeffs: c }
    }

    /// All field elements in a deterministic order. Only call on small fields.
    pub fn elements(&self) -> Vec<FqElem> {
        let q = self.order();
        assert!(q <= 1 << 22, "refusing to enumerate a field this large");
        let mut out = Vec::with_capacity(q as usize);
        let p = self.0.p as u128;
        for n in 0..q {
            let mut coeffs = vec![0u64; self.0.m];
            let mut rem = n;
            for c in coeffs.iter_mut() {
                *c = (rem % p) as u64;
                rem /= p;
            }
            out.push(FqElem { field: self.clone(), coeffs });
        }
        out
    }
}

impl FqElem {
    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The residue in F_p when this element is prime-field valued.
    pub fn as_prime(&self) -> Option<u64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    fn assert_same(&self, other: &FqElem) {
        assert!(self.field == other.field, "elements of different fields");
    }

    pub fn add(&self, other: &FqElem) -> FqElem {
        self.assert_same(other);
        let p = self.field.0.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        FqElem { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &FqElem) -> FqElem {
        self.assert_same(other);
        let p = self.field.0.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        FqElem { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> FqElem {
        let p = self.field.0.p;
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FqElem { field: self.field.clone(), coeffs }
    }

    pub fn mul(&self, other: &FqElem) -> FqElem {
        self.assert_same(other);
        let inner = &self.field.0;
        let prod = pf_mul(&self.coeffs, &other.coeffs, inner.p);
        let mut red = pf_rem(&prod, &inner.poly, inner.p);
        red.resize(inner.m, 0);
        FqElem { field: self.field.clone(), coeffs: red }
    }

    pub fn square(&self) -> FqElem {
        self.mul(self)
    }

    pub fn inv(&self) -> Option<FqElem> {
        if self.is_zero() {
            return None;
        }
        let inner = &self.field.0;
        // extended Euclid over F_p[t] on (coeffs, defining poly)
        let mut r0: Vec<u64> = self.coeffs.clone();
        pf_trim(&mut r0);
        let mut r1 = inner.poly.clone();
        let mut s0: Vec<u64> = vec![1];
        let mut s1: Vec<u64> = vec![];
        let p = inner.p;
        while !r1.is_empty() {
            // q, r = divmod(r0, r1)
            let inv = mod_inv(*r1.last().unwrap(), p);
            let r1m: Vec<u64> = r1.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect();
            // long division r0 / r1m
            let mut rem = r0.clone();
            let mut quo: Vec<u64> = vec![0; rem.len().saturating_sub(r1m.len()) + 1];
            while rem.len() >= r1m.len() && !rem.is_empty() {
                let lead = *rem.last().unwrap();
                let pos = rem.len() - r1m.len();
                if lead != 0 {
                    quo[pos] = (quo[pos] + lead) % p;
                    for (i, &c) in r1m.iter().enumerate() {
                        let sub = (lead as u128 * c as u128) % p as u128;
                        rem[pos + i] = ((rem[pos + i] as u128 + p as u128 * p as u128 - sub)
                            % p as u128) as u64;
                    }
                }
                pf_trim(&mut rem);
                if rem.len() < r1m.len() {
                    break;
                }
            }
            pf_trim(&mut quo);
            // scale q by inv since we divided by monicized r1
            let quo: Vec<u64> = quo.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect();
            let qs1 = pf_mul(&quo, &s1, p);
            let mut snew = s0.clone();
            // snew = s0 - q*s1
            let n = snew.len().max(qs1.len());
            snew.resize(n, 0);
            for (i, &c) in qs1.iter().enumerate() {
                snew[i] = (snew[i] + p - c) % p;
            }
            pf_trim(&mut snew);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = snew;
        }
        // r0 = gcd (degree 0 since poly irreducible), s0 * self = r0 mod poly
        assert_eq!(r0.len(), 1, "defining polynomial not irreducible?");
        let scale = mod_inv(r0[0], p);
        let mut coeffs: Vec<u64> =
            s0.iter().map(|&c| (c as u128 * scale as u128 % p as u128) as u64).collect();
        coeffs.resize(inner.m, 0);
        let out = FqElem { field: self.field.clone(), coeffs };
        debug_assert!(out.mul(self) == self.field.one());
        Some(out)
    }

    pub fn pow(&self, mut e: u128) -> FqElem {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Absolute Frobenius x -> x^p.
    pub fn frobenius(&self) -> FqElem {
        self.pow(self.field.0.p as u128)
    }

    /// x -> x^(p^e).
    pub fn frobenius_pow(&self, e: usize) -> FqElem {
        let mut out = self.clone();
        for _ in 0..e % self.field.0.m {
            out = out.frobenius();
        }
        out
    }

    /// Orbit of x under x -> x^(p^d): `[x, x^q, x^(q^2), ...]` up to first repeat.
    pub fn frobenius_orbit(&self, d: usize) -> Vec<FqElem> {
        let mut out = vec![self.clone()];
        let mut cur = self.frobenius_pow(d);
        while cur != *self {
            out.push(cur.clone());
            cur = cur.frobenius_pow(d);
        }
        out
    }

    /// Absolute trace to F_p of an element of this field.
    pub fn trace_to_prime(&self) -> u64 {
        self.trace_in_subfield(self.field.0.m)
    }

    /// Absolute trace over the subfield F_{p^abs_deg} containing this element:
    /// sum of x^(p^i) for i < abs_deg. Panics if x is not in that subfield.
    pub fn trace_in_subfield(&self, abs_deg: usize) -> u64 {
        assert!(abs_deg >= 1 && self.field.0.m % abs_deg == 0);
        let mut acc = self.field.zero();
        let mut cur = self.clone();
        for _ in 0..abs_deg {
            acc = acc.add(&cur);
            cur = cur.frobenius();
        }
        assert!(cur == *self, "element not in the stated subfield");
        acc.as_prime().expect("trace landed outside the prime field")
    }

    /// Square root. Unique in characteristic 2; for odd p returns the
    /// lexicographically smaller root when one exists.
    pub fn sqrt(&self) -> Option<FqElem> {
        let inner = &self.field.0;
        if self.is_zero() {
            return Some(self.clone());
        }
        if inner.p == 2 {
            // inverse of Frobenius: x^(2^(m-1))
            let mut out = self.clone();
            for _ in 0..inner.m - 1 {
                out = out.square();
            }
            debug_assert!(out.square() == *self);
            return Some(out);
        }
        let q = self.field.order();
        // Euler criterion
        if self.pow((q - 1) / 2) != self.field.one() {
            return None;
        }
        // Tonelli-Shanks in F_q
        let mut s = 0u32;
        let mut t = q - 1;
        while t % 2 == 0 {
            t /= 2;
            s += 1;
        }
        // deterministic non-residue search in canonical element order
        let nonres = self
            .field
            .elements_nonresidue_search()
            .expect("finite field has a quadratic non-residue");
        let mut m_ = s;
        let mut c = nonres.pow(t);
        let mut u = self.pow(t);
        let mut r = self.pow((t + 1) / 2);
        while u != self.field.one() {
            let mut i = 0u32;
            let mut probe = u.clone();
            while probe != self.field.one() {
                probe = probe.square();
                i += 1;
                assert!(i < m_, "element was not a square");
            }
            let mut b = c.clone();
            for _ in 0..m_ - i - 1 {
                b = b.square();
            }
            m_ = i;
            c = b.square();
            u = u.mul(&c);
            r = r.mul(&b);
        }
        debug_assert!(r.square() == *self);
        let other = r.neg();
        Some(if r <= other { r } else { other })
    }
}

impl FqField {
    /// First quadratic non-residue in a deterministic element sweep (odd p).
    fn elements_nonresidue_search(&self) -> Option<FqElem> {
        let q = self.order();
        assert!(self.0.p != 2);
        let p = self.0.p as u128;
        let mut n = 1u128;
        loop {
            n += 1;
            if n >= q {
                return None;
            }
            let mut coeffs = vec![0u64; self.0.m];
            let mut rem = n;
            for c in coeffs.iter_mut() {
                *c = (rem % p) as u64;
                rem /= p;
            }
            let e = FqElem { field: self.clone(), coeffs };
            if e.pow((q - 1) / 2) != self.one() {
                return Some(e);
            }
        }
    }

    /// F_p-basis of the subfield of absolute degree `abs_deg` inside this
    /// field (kernel of Frobenius^abs_deg - id).
    pub fn subfield_basis(&self, abs_deg: usize) -> Vec<FqElem> {
        assert!(self.0.m % abs_deg == 0, "no subfield of that degree");
        let m = self.0.m;
        // rows of the map x -> x^(p^abs_deg) - x on basis t^j
        let mut cols = Vec::with_capacity(m);
        for j in 0..m {
            let mut b = self.zero();
            b.coeffs[j] = 1;
            let img = b.frobenius_pow(abs_deg).sub(&b);
            cols.push(img.coeffs);
        }
        // matrix acting on coordinate vectors: entry (i, j) = cols[j][i]
        let rows: Vec<Vec<u64>> =
            (0..m).map(|i| (0..m).map(|j| cols[j][i]).collect()).collect();
        let ker = fp_kernel(self.0.p, &rows);
        assert_eq!(ker.len(), abs_deg, "subfield dimension mismatch");
        ker.into_iter()
            .map(|coeffs| FqElem { field: self.clone(), coeffs })
            .collect()
    }

    /// All elements of the subfield of absolute degree `abs_deg`. Only for
    /// small subfields.
    pub fn subfield_elements(&self, abs_deg: usize) -> Vec<FqElem> {
        let basis = self.subfield_basis(abs_deg);
        let p = self.0.p;
        assert!((p as u128).pow(abs_deg as u32) <= 1 << 20, "subfield too large to enumerate");
        let mut out = vec![self.zero()];
        for b in basis {
            let mut next = Vec::with_capacity(out.len() * p as usize);
            for e in &out {
                let mut scaled = e.clone();
                for _ in 0..p {
                    next.push(scaled.clone());
                    scaled = scaled.add(&b);
                }
            }
            out = next;
        }
        out
    }

    /// Both roots of w^2 + w = beta, lex-sorted, or None when insoluble.
    /// Characteristic 2 only.
    pub fn artin_schreier_roots(&self, beta: &FqElem) -> Option<[FqElem; 2]> {
        assert!(self.0.p == 2, "Artin-Schreier solve requires characteristic 2");
        assert!(beta.field == *self);
        let m = self.0.m;
        // matrix of w -> w^2 + w on the power basis
        let mut cols = Vec::with_capacity(m);
        for j in 0..m {
            let mut b = self.zero();
            b.coeffs[j] = 1;
            let img = b.square().add(&b);
            cols.push(img.coeffs);
        }
        let rows: Vec<Vec<u64>> =
            (0..m).map(|i| (0..m).map(|j| cols[j][i]).collect()).collect();
        let sol = fp_solve(2, &rows, &beta.coeffs)?;
        let w = FqElem { field: self.clone(), coeffs: sol };
        debug_assert!(w.square().add(&w) == *beta);
        let w2 = w.add(&self.one());
        Some(if w <= w2 { [w, w2] } else { [w2, w] })
    }
}

// ---------------------------------------------------------------------------
// linear algebra over F_p
// ---------------------------------------------------------------------------

/// Solve M x = b over F_p for one particular solution. `rows` are the matrix
/// rows. Returns None when inconsistent.
pub(crate) fn fp_solve(p: u64, rows: &[Vec<u64>], b: &[u64]) -> Option<Vec<u64>> {
    let nrows = rows.len();
    assert_eq!(nrows, b.len());
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .zip(b)
        .map(|(r, &rhs)| {
            let mut row = r.clone();
            row.push(rhs);
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let piv = (rank..nrows).find(|&r| a[r][col] != 0);
        let Some(piv) = piv else { continue };
        a.swap(rank, piv);
        let inv = mod_inv(a[rank][col], p);
        for x in a[rank].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        for r in 0..nrows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for c in col..=ncols {
                    let sub = (f as u128 * a[rank][c] as u128) % p as u128;
                    a[r][c] = ((a[r][c] as u128 + p as u128 * p as u128 - sub) % p as u128) as u64;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    for r in rank..nrows {
        if a[r][ncols] != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; ncols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = a[r][ncols];
    }
    Some(x)
}

/// Kernel basis of the matrix over F_p.
pub(crate) fn fp_kernel(p: u64, rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<u64>> = rows.to_vec();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0;
    for col in 0..ncols {
        let piv = (rank..nrows).find(|&r| a[r][col] != 0);
        let Some(piv) = piv else { continue };
        a.swap(rank, piv);
        let inv = mod_inv(a[rank][col], p);
        for x in a[rank].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        for r in 0..nrows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..ncols {
                    let sub = (f as u128 * a[rank][c] as u128) % p as u128;
                    a[r][c] = ((a[r][c] as u128 + p as u128 * p as u128 - sub) % p as u128) as u64;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for col in 0..ncols {
            if let Some(r) = pivot_of_col[col] {
                // v[col] = -a[r][free]
                v[col] = (p - a[r][free] % p) % p;
            }
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// subfield embeddings
// ---------------------------------------------------------------------------

/// Canonical embedding F_{p^s} -> F_{p^n} for s | n: the generator of the
/// small field maps to the lexicographically smallest root of its defining
/// polynomial in the big field.
pub struct FqEmbedding {
    small: FqField,
    big: FqField,
    gen_image: FqElem,
    /// Images of the small power basis in big-field coordinates; the columns
    /// of the linear system solved by `restrict`.
    basis_images: Vec<FqElem>,
}

impl FqEmbedding {
    pub fn new(small: &FqField, big: &FqField) -> FqEmbedding {
        assert_eq!(small.p(), big.p(), "different characteristics");
        assert!(big.degree() % small.degree() == 0, "no embedding exists");
        let gen_image = if small.degree() == 1 {
            big.zero()
        } else {
            let defining = Poly::from_coeffs(
                small
                    .defining_poly()
                    .iter()
                    .map(|&c| big.from_prime(c))
                    .collect::<Vec<_>>(),
            );
            let mut roots = factor::roots_in_field(&defining);
            assert_eq!(roots.len(), small.degree(), "defining polynomial must split");
            roots.sort();
            roots.remove(0)
        };
        let mut basis_images = Vec::with_capacity(small.degree());
        let mut cur = big.one();
        for _ in 0..small.degree() {
            basis_images.push(cur.clone());
            cur = cur.mul(&gen_image);
        }
        FqEmbedding { small: small.clone(), big: big.clone(), gen_image, basis_images }
    }

    pub fn small(&self) -> &FqField {
        &self.small
    }

    pub fn big(&self) -> &FqField {
        &self.big
    }

    pub fn gen_image(&self) -> &FqElem {
        &self.gen_image
    }

    pub fn embed(&self, x: &FqElem) -> FqElem {
        assert!(*x.field() == self.small);
        let mut acc = self.big.zero();
        for (c, b) in x.coeffs().iter().zip(&self.basis_images) {
            if *c != 0 {
                acc = acc.add(&b.mul(&self.big.from_prime(*c)));
            }
        }
        acc
    }

    /// Preimage in the small field, if `y` lies in the embedded image.
    pub fn restrict(&self, y: &FqElem) -> Option<FqElem> {
        assert!(*y.field() == self.big);
        let n = self.big.degree();
        let s = self.small.degree();
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..s).map(|j| self.basis_images[j].coeffs()[i]).collect())
            .collect();
        let sol = fp_solve(self.big.p(), &rows, y.coeffs())?;
        let cand = self.small.elem(&sol);
        if &self.embed(&cand) == y {
            Some(cand)
        } else {
            None
        }
    }

    pub fn embed_poly(&self, f: &Poly<FqElem>) -> Poly<FqElem> {
        f.map(|c| self.embed(c))
    }

    pub fn restrict_poly(&self, f: &Poly<FqElem>) -> Option<Poly<FqElem>> {
        let mut out = Vec::new();
        for c in f.coeffs() {
            out.push(self.restrict(c)?);
        }
        Some(Poly::from_coeffs(out))
    }
}

// ---------------------------------------------------------------------------
// Coeff impl so Poly<FqElem> works
// ---------------------------------------------------------------------------

impl Coeff for FqElem {
    fn is_zero(&self) -> bool {
        FqElem::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
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
        self.mul(&self.field.from_prime(n))
    }
    fn try_invert(&self) -> Option<Self> {
        self.inv()
    }
}

impl crate::poly::ExactDiv for FqElem {
    fn div_exact(&self, d: &Self) -> Option<Self> {
        Some(self.mul(&d.inv()?))
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "t")?,
                1 => write!(f, "{c}t")?,
                _ if c == 1 => write!(f, "t^{i}")?,
                _ => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Polynomial over F_q from prime-field residues (low degree first).
pub fn prime_poly(field: &FqField, coeffs: &[i64]) -> Poly<FqElem> {
    Poly::from_coeffs(coeffs.iter().map(|&c| field.from_int(c)).collect())
}
