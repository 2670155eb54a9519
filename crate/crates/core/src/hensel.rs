//! Multifactor Hensel lifting of coprime factorizations.
//!
//! Given a monic polynomial f over a truncated unramified ring and monic
//! pairwise-coprime seed factors over the residue field multiplying to f mod
//! p, the lift produces the unique monic factors of f congruent to the seeds.
//! Lifting is by a quadratic Hensel step on a balanced two-way split,
//! recursing into each half, with the working precision doubling every round
//! so intermediate degrees stay canonical.

use crate::fq::FqElem;
use crate::poly::{Coeff, Poly};
use crate::unram::{lift_poly_to, reduce_poly, truncate_poly, UnramElem, UnramRing};
use thiserror::Error;

/// Rejection reasons for a proposed seed factorization.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HenselError {
    #[error("seed factors are not pairwise coprime mod p")]
    SeedsNotCoprime,
    #[error("seed product does not match the polynomial mod p")]
    ProductMismatch,
}

/// Reinterpret the representatives of a lower-precision polynomial in a
/// higher-precision ring (the canonical lift with zero top digits).
fn extend_poly(f: &Poly<UnramElem>, target: &UnramRing) -> Poly<UnramElem> {
    Poly::from_coeffs(f.coeffs().iter().map(|c| target.elem(c.coeffs())).collect())
}

/// Lift monic coprime residue seeds to monic factors of `f`.
///
/// Returns factors F_j with F_j = seed_j mod p and prod F_j = f at the full
/// precision of f's ring, in seed order.
pub fn lift_factors(
    f: &Poly<UnramElem>,
    seeds: &[Poly<FqElem>],
) -> Result<Vec<Poly<UnramElem>>, HenselError> {
    assert!(f.is_monic(), "lifting requires a monic polynomial");
    assert!(!seeds.is_empty(), "need at least one seed");
    let ring = f.coeffs()[0].ring().clone();
    let k = ring.residue_field();
    let mut prod = Poly::constant(k.one());
    for s in seeds {
        assert!(s.is_monic() && s.deg() >= 1, "seeds must be monic of positive degree");
        assert!(*s.coeffs()[0].field() == *k, "seed over the wrong residue field");
        prod = prod.mul(s);
    }
    for i in 0..seeds.len() {
        for j in i + 1..seeds.len() {
            if seeds[i].gcd(&seeds[j]).deg() != 0 {
                return Err(HenselError::SeedsNotCoprime);
            }
        }
    }
    if prod != reduce_poly(f) {
        return Err(HenselError::ProductMismatch);
    }
    Ok(lift_rec(f, seeds))
}

fn lift_rec(f: &Poly<UnramElem>, seeds: &[Poly<FqElem>]) -> Vec<Poly<UnramElem>> {
    if seeds.len() == 1 {
        return vec![f.clone()];
    }
    // split so the two halves have roughly equal total degree
    let total: usize = seeds.iter().map(|s| s.deg()).sum();
    let mut acc = 0;
    let mut mid = 1;
    for (i, s) in seeds.iter().enumerate() {
        acc += s.deg();
        if 2 * acc >= total {
            mid = (i + 1).min(seeds.len() - 1);
            break;
        }
    }
    let gbar = seeds[..mid].iter().fold(
        Poly::constant(seeds[0].coeffs()[0].one_like()),
        |p, s| p.mul(s),
    );
    let hbar = seeds[mid..].iter().fold(
        Poly::constant(seeds[0].coeffs()[0].one_like()),
        |p, s| p.mul(s),
    );
    let (g, h) = lift_pair(f, &gbar, &hbar);
    let mut out = lift_rec(&g, &seeds[..mid]);
    out.extend(lift_rec(&h, &seeds[mid..]));
    out
}

/// One two-factor lift: f = g h with g = gbar, h = hbar mod p.
fn lift_pair(
    f: &Poly<UnramElem>,
    gbar: &Poly<FqElem>,
    hbar: &Poly<FqElem>,
) -> (Poly<UnramElem>, Poly<UnramElem>) {
    let ring = f.coeffs()[0].ring().clone();
    let n = ring.precision();

    // Bezout cofactors with the degree bounds deg s < deg hbar, deg t < deg gbar
    let one_bar = Poly::constant(gbar.coeffs()[0].one_like());
    let (d, s0, _) = gbar.xgcd(hbar);
    assert_eq!(d.deg(), 0, "seed halves are coprime by precondition");
    let dinv = d.coeffs()[0].try_invert().unwrap();
    let sbar = s0.mul_scalar(&dinv).rem(hbar);
    let (tbar, t_rem) = one_bar.sub(&sbar.mul(gbar)).divmod(hbar);
    assert!(t_rem.is_zero());

    let mut nu = 1u32;
    let mut cur = ring.truncated(1);
    let mut g = lift_poly_to(&cur, gbar);
    let mut h = lift_poly_to(&cur, hbar);
    let mut s = lift_poly_to(&cur, &sbar);
    let mut t = lift_poly_to(&cur, &tbar);
    while nu < n {
        let nu2 = (2 * nu).min(n);
        cur = ring.truncated(nu2);
        let fx = truncate_poly(f, &cur);
        g = extend_poly(&g, &cur);
        h = extend_poly(&h, &cur);
        s = extend_poly(&s, &cur);
        t = extend_poly(&t, &cur);

        let e = fx.sub(&g.mul(&h));
        let (q, r) = s.mul(&e).divmod(&h);
        let g2 = g.add(&t.mul(&e)).add(&q.mul(&g));
        let h2 = h.add(&r);
        let one = Poly::constant(cur.one());
        let b = s.mul(&g2).add(&t.mul(&h2)).sub(&one);
        let (c, d2) = s.mul(&b).divmod(&h2);
        s = s.sub(&d2);
        t = t.sub(&t.mul(&b)).sub(&c.mul(&g2));
        g = g2;
        h = h2;
        nu = nu2;
    }
    // replace g by the exact monic cofactor of the (monic) lifted h
    let (q, r) = f.divmod(&h);
    assert!(r.is_zero(), "lifted factorization failed to converge");
    debug_assert!(q.is_monic());
    (q, h)
}
