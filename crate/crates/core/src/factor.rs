//! Polynomial factorization over finite fields.
//!
//! Squarefree decomposition handles characteristic p via p-th roots, then
//! distinct-degree and equal-degree splitting finish the job. Equal-degree
//! splitting is randomized (trace maps in characteristic 2, Euler powers for
//! odd p) but driven by a seeded ChaCha8 stream, and the returned factor list
//! is sorted canonically, so results are reproducible.

use crate::fq::{FqElem, FqField};
use crate::poly::Poly;
use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

/// Seed for the internal equal-degree splitting stream when the caller does
/// not supply one.
pub const DEFAULT_FACTOR_SEED: u64 = 0x00c0_ffee;

fn field_of(f: &Poly<FqElem>) -> FqField {
    f.coeffs().first().expect("zero polynomial has no field").field().clone()
}

fn random_poly(field: &FqField, deg_below: usize, rng: &mut ChaCha8Rng) -> Poly<FqElem> {
    let p = field.p();
    let m = field.degree();
    let coeffs: Vec<FqElem> = (0..deg_below)
        .map(|_| {
            let c: Vec<u64> = (0..m).map(|_| rng.gen_range(0..p)).collect();
            field.elem(&c)
        })
        .collect();
    Poly::from_coeffs(coeffs)
}

/// Coefficient-wise p-th root of g(x^p), i.e. the h with h^p = f.
fn pth_root(f: &Poly<FqElem>) -> Poly<FqElem> {
    let field = field_of(f);
    let p = field.p() as usize;
    let m = field.degree();
    let coeffs = f.coeffs();
    let mut out = Vec::with_capacity(coeffs.len() / p + 1);
    for (i, c) in coeffs.iter().enumerate() {
        if i % p == 0 {
            // inverse Frobenius: c -> c^(p^(m-1))
            let mut r = c.clone();
            for _ in 0..m.saturating_sub(1) {
                r = r.pow(field.p() as u128);
            }
            out.push(r);
        } else {
            assert!(c.is_zero(), "polynomial is not a p-th power despite zero derivative");
        }
    }
    Poly::from_coeffs(out)
}

/// Squarefree decomposition of a monic polynomial: pairwise coprime monic
/// squarefree parts with their multiplicities, product reassembling the input.
pub fn squarefree_decomposition(f: &Poly<FqElem>) -> Vec<(Poly<FqElem>, usize)> {
    assert!(f.is_monic(), "squarefree decomposition expects a monic polynomial");
    let mut out = Vec::new();
    sqfree_inner(f, 1, &mut out);
    out.sort_by(|a, b| cmp_poly(&a.0, &b.0));
    out
}

fn sqfree_inner(f: &Poly<FqElem>, mult: usize, out: &mut Vec<(Poly<FqElem>, usize)>) {
    if f.deg() == 0 {
        return;
    }
    let field = field_of(f);
    let p = field.p() as usize;
    let deriv = f.derivative();
    let mut c = f.gcd(&deriv);
    let mut w = f.divmod(&c).0;
    let mut i = 1usize;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.divmod(&y).0;
        if z.deg() > 0 {
            out.push((z, mult * i));
        }
        c = c.divmod(&y).0;
        w = y;
        i += 1;
    }
    if c.deg() > 0 {
        let root = pth_root(&c);
        sqfree_inner(&root, mult * p, out);
    }
}

/// Whether a monic polynomial has no repeated roots.
pub fn is_squarefree(f: &Poly<FqElem>) -> bool {
    let deriv = f.derivative();
    if deriv.is_zero() {
        return f.deg() == 0;
    }
    f.gcd(&deriv).deg() == 0
}

/// Distinct-degree splitting of a monic squarefree polynomial: list of
/// (product of all irreducible factors of degree d, d).
fn distinct_degree(f: &Poly<FqElem>) -> Vec<(Poly<FqElem>, usize)> {
    let field = field_of(f);
    let q = BigUint::from(field.order());
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::from_coeffs(vec![field.zero(), field.one()]);
    let mut h = x.rem(&rest);
    let mut d = 0usize;
    while rest.deg() > 0 {
        d += 1;
        if 2 * d > rest.deg() {
            out.push((rest.clone(), rest.deg()));
            break;
        }
        h = h.powmod(&q, &rest);
        let g = rest.gcd(&h.sub(&x.rem(&rest)));
        if g.deg() > 0 {
            out.push((g.clone(), d));
            rest = rest.divmod(&g).0;
            h = h.rem(&rest);
        }
    }
    out
}

/// Equal-degree splitting: `f` monic squarefree, every irreducible factor of
/// degree exactly `d`. Returns the irreducible factors.
fn equal_degree(f: &Poly<FqElem>, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly<FqElem>> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    let field = field_of(f);
    let split = loop {
        let a = random_poly(&field, n, rng);
        if a.is_zero() || a.deg() == 0 {
            continue;
        }
        let g0 = f.gcd(&a);
        if g0.deg() > 0 && g0.deg() < n {
            break g0;
        }
        let candidate = if field.p() == 2 {
            // trace of a into F_2 through F_{2^(s*d)}, evaluated mod f
            let rounds = field.degree() * d;
            let mut cur = a.rem(f);
            let mut acc = cur.clone();
            for _ in 1..rounds {
                cur = cur.mul(&cur).rem(f);
                acc = acc.add(&cur);
            }
            acc
        } else {
            let qd = BigUint::from(field.order()).pow(d as u32);
            let exp = (qd - 1u32) / 2u32;
            let b = a.powmod(&exp, f);
            b.sub(&Poly::constant(field.one()))
        };
        let g = f.gcd(&candidate);
        if g.deg() > 0 && g.deg() < n {
            break g;
        }
    };
    let rest = f.divmod(&split).0;
    let mut out = equal_degree(&split, d, rng);
    out.extend(equal_degree(&rest, d, rng));
    out
}

fn cmp_poly(a: &Poly<FqElem>, b: &Poly<FqElem>) -> Ordering {
    match a.deg().cmp(&b.deg()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.coeffs().iter().zip(b.coeffs()).rev() {
        match x.cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// Full factorization of a nonzero polynomial into monic irreducibles with
/// multiplicities, deterministic for a fixed seed. The product of the factors
/// times the input's leading coefficient equals the input.
pub fn factor_with_seed(f: &Poly<FqElem>, seed: u64) -> Vec<(Poly<FqElem>, usize)> {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monic = f.monic();
    if monic.deg() == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for (prod, d) in distinct_degree(&part) {
            for irr in equal_degree(&prod, d, &mut rng) {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|a, b| cmp_poly(&a.0, &b.0));
    out
}

/// [`factor_with_seed`] with the default seed.
pub fn factor(f: &Poly<FqElem>) -> Vec<(Poly<FqElem>, usize)> {
    factor_with_seed(f, DEFAULT_FACTOR_SEED)
}

/// Irreducibility over the coefficient field.
pub fn is_irreducible(f: &Poly<FqElem>) -> bool {
    let Some(n) = f.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let field = field_of(f);
    let q = BigUint::from(field.order());
    let x = Poly::from_coeffs(vec![field.zero(), field.one()]);
    let mut powers = Vec::with_capacity(n + 1);
    powers.push(x.rem(f));
    for _ in 0..n {
        let prev = powers.last().unwrap();
        powers.push(prev.powmod(&q, f));
    }
    if powers[n] != powers[0] {
        return false;
    }
    let mut rest = n;
    let mut primes = Vec::new();
    let mut l = 2;
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
        let diff = powers[n / l].sub(&powers[0]);
        if diff.is_zero() || f.gcd(&diff).deg() != 0 {
            return false;
        }
    }
    true
}

/// Distinct roots of a nonzero polynomial inside its coefficient field,
/// unsorted.
pub fn roots_in_field(f: &Poly<FqElem>) -> Vec<FqElem> {
    assert!(!f.is_zero());
    if f.deg() == 0 {
        return Vec::new();
    }
    let field = field_of(f);
    let q = BigUint::from(field.order());
    let x = Poly::from_coeffs(vec![field.zero(), field.one()]);
    // gcd(f, x^q - x) collects the distinct roots in the field
    let xq = x.powmod(&q, &f.monic());
    let lin = f.monic().gcd(&xq.sub(&x.rem(&f.monic())));
    if lin.deg() == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_FACTOR_SEED);
    equal_degree(&lin, 1, &mut rng)
        .into_iter()
        .map(|l| l.coeff(0, &field.zero()).neg())
        .collect()
}

/// Square root of a polynomial over a field of characteristic 2. `None` when
/// the input is not a square (some odd-degree coefficient is nonzero).
pub fn char2_poly_sqrt(f: &Poly<FqElem>) -> Option<Poly<FqElem>> {
    if f.is_zero() {
        return Some(f.clone());
    }
    let field = field_of(f);
    assert!(field.p() == 2, "polynomial square root shortcut requires characteristic 2");
    let mut out = Vec::with_capacity(f.coeffs().len() / 2 + 1);
    for (i, c) in f.coeffs().iter().enumerate() {
        if i % 2 == 1 {
            if !c.is_zero() {
                return None;
            }
        } else {
            out.push(c.sqrt().expect("characteristic 2 elements are squares"));
        }
    }
    Some(Poly::from_coeffs(out))
}
