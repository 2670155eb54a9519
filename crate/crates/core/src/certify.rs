//! Certification of the 2-adic pairing condition for hyperelliptic equations.
//!
//! Input is an equation `y^2 = c * f(x)` with `f` monic, squarefree, of even
//! degree `2g + 2` over (an unramified extension of) the 2-adic integers.
//! The pipeline checks whether the roots of `f` split into `g + 1`
//! Galois-stable pairs `{alpha_i, beta_i}` with
//!
//! * `v(alpha_i - beta_i) >= 2` for every pair, and
//! * all cross-distances `v(alpha_i - alpha_j) = 0`,
//!
//! together with `c = 1 mod 4`.  When the answer is yes the certificate
//! carries, for each pair, the monic quadratic `(x - gamma_i)^2 - 4 eta_i`
//! cut out by the pair, the residue point `r_i = gamma_i mod 2`, the node
//! depth `2 + v(eta_i) / 2`, and the permutation induced by Frobenius on the
//! pairs.  The strict variant additionally requires `v(eta_i) = 0` for all
//! pairs, which happens exactly when every `v(alpha_i - beta_i) = 2`.
//!
//! All 2-adic work happens in a fixed-precision unramified ring.  Working
//! precision is chosen from the discriminant of `f` and doubled once if an
//! intermediate quantity saturates; a verdict is only emitted when every
//! derived value is determined at the certified precision.

use crate::factor;
use crate::fq::{FqElem, FqEmbedding, FqField};
use crate::hensel;
use crate::poly::{self, Poly};
use crate::unram::{UnramElem, UnramRing};
use crate::val::Val;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt::Write as _;
use thiserror::Error;

/// Rejection reasons for malformed input equations.
///
/// These are structural defects of the equation itself, detected before any
/// 2-adic computation starts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("c must be a nonzero integer")]
    ZeroC,
    #[error("f must be monic")]
    NotMonic,
    #[error("f must have even degree at least 6")]
    BadDegree,
    #[error("f must be squarefree over the rationals")]
    NotSquarefree,
    #[error("base residue degree must be at least 1")]
    BadBaseDegree,
}

/// Reasons the certification pipeline can reject an equation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FailReason {
    /// `c` is not congruent to 1 modulo 4 (this also covers even `c`).
    #[error("c is not congruent to 1 modulo 4")]
    CNotOneMod4,
    /// The reduction of `f` modulo 2 is not the square of a polynomial.
    #[error("f mod 2 is not the square of a polynomial")]
    FBarNotASquare,
    /// `f mod 2 = Q^2` with `Q` not separable, so the residue points collide.
    #[error("the square root of f mod 2 is not separable")]
    QBarNotSeparable,
    /// The lifted quadratic of pair `i` has `gamma^2 - c0` not divisible by 4,
    /// i.e. the two roots of the pair are too close to distance 2 to qualify.
    #[error("pair {0}: gamma^2 - c0 is not divisible by 4")]
    DiscCondition(usize),
    /// A derived quantity was zero to full working precision even after the
    /// automatic precision retry.
    #[error("working precision exhausted")]
    PrecisionExhausted,
}

/// Outcome of a successful certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every pair has `v(eta_i) = 0`, equivalently `v(alpha_i - beta_i) = 2`.
    Star,
    /// All pairs satisfy `v(alpha_i - beta_i) >= 2` but some `v(eta_i) > 0`.
    StarStar,
}

/// A validated input equation `y^2 = c * f(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInput {
    c: BigInt,
    f: Poly<BigInt>,
    base_degree: usize,
}

impl CurveInput {
    /// Validates and wraps an equation.  `f_coeffs` is low-degree-first.
    ///
    /// `base_degree` is the residue degree `d` of the base field, i.e. the
    /// base is the unramified extension of the 2-adics with residue field of
    /// size `2^d`.
    pub fn new(c: BigInt, f_coeffs: Vec<BigInt>, base_degree: usize) -> Result<CurveInput, InputError> {
        if c.is_zero() {
            return Err(InputError::ZeroC);
        }
        if base_degree == 0 {
            return Err(InputError::BadBaseDegree);
        }
        let f = Poly::from_coeffs(f_coeffs);
        match f.degree() {
            Some(n) if n >= 6 && n % 2 == 0 => {}
            _ => return Err(InputError::BadDegree),
        }
        if !f.is_monic() {
            return Err(InputError::NotMonic);
        }
        if poly::discriminant(&f).is_zero() {
            return Err(InputError::NotSquarefree);
        }
        Ok(CurveInput { c, f, base_degree })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(c: i64, f_coeffs: &[i64], base_degree: usize) -> Result<CurveInput, InputError> {
        let coeffs = f_coeffs.iter().map(|&x| BigInt::from(x)).collect();
        CurveInput::new(BigInt::from(c), coeffs, base_degree)
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn f(&self) -> &Poly<BigInt> {
        &self.f
    }

    pub fn base_degree(&self) -> usize {
        self.base_degree
    }

    /// The genus `g` of the curve, so `deg f = 2g + 2`.
    pub fn genus(&self) -> usize {
        (self.f.deg() - 2) / 2
    }

    /// The same curve after the substitution `x -> x + u`.
    ///
    /// Translation preserves the discriminant, the verdict, and all node
    /// data; it only moves the residue points.
    pub fn translated(&self, u: i64) -> CurveInput {
        let f = self.f.translate(&BigInt::from(u));
        CurveInput {
            c: self.c.clone(),
            f,
            base_degree: self.base_degree,
        }
    }
}

/// Per-pair data of a certified equation.
///
/// The pair cuts out the monic quadratic `(x - gamma)^2 - 4 eta` over the
/// working ring; its two roots are `alpha = gamma + 2 sqrt(eta)` and
/// `beta = gamma - 2 sqrt(eta)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairData {
    /// Position in the certificate's pair list.
    pub index: usize,
    /// Midpoint of the pair, `(alpha + beta) / 2`, at certified precision.
    pub gamma: UnramElem,
    /// Quarter square distance, `((alpha - beta) / 4)^2 * 4 / 4`, i.e.
    /// `eta = (gamma^2 - c0) / 4` for the lifted quadratic `x^2 + bx + c0`.
    pub eta: UnramElem,
    /// `v(eta)`; zero exactly when the pair is at distance 2.
    pub eta_valuation: u32,
    /// Residue point `r = gamma mod 2` in the working residue field.
    pub r: FqElem,
    /// Degree of `r` over the base residue field.
    pub residue_degree: usize,
    /// Node depth `2 + v(eta) / 2`.
    pub depth: Val,
}

impl PairData {
    /// The monic quadratic `(x - gamma)^2 - 4 eta` over the working ring.
    pub fn quadratic(&self) -> Poly<UnramElem> {
        let four = BigUint::from(4u32);
        let two = BigUint::from(2u32);
        let c0 = self.gamma.square().sub(&self.eta.scale(&four));
        let b = self.gamma.scale(&two).neg();
        Poly::from_coeffs(vec![c0, b, self.gamma.ring().one()])
    }
}

/// Certificate that an equation satisfies the pairing condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarCertificate {
    pub verdict: Verdict,
    /// The validated input equation.
    pub curve: CurveInput,
    /// `(c - 1) / 4`.
    pub a: BigInt,
    /// Pairs sorted by the coordinate tuple of their residue point.
    pub pairs: Vec<PairData>,
    /// `perm[i] = j` where the base Frobenius sends pair `i` to pair `j`.
    pub frobenius_perm: Vec<usize>,
    /// Relative degree `M` of the working ring over the base, the lcm of the
    /// residue degrees of the pairs.
    pub common_degree: usize,
    /// Certified 2-adic precision of `gamma` and `eta`.
    pub precision: u32,
    /// Factorisation seed used for the residue computation.
    pub seed: u64,
}

impl StarCertificate {
    /// Working ring containing all `gamma` and `eta`, namely the unramified
    /// ring of residue degree `d * M` at the certified precision.
    pub fn ring(&self) -> UnramRing {
        self.pairs[0].gamma.ring().clone()
    }

    /// Base ring of residue degree `d` at the certified precision.
    pub fn base_ring(&self) -> UnramRing {
        UnramRing::new(2, self.curve.base_degree, self.precision)
    }

    /// Base residue field `k` of size `2^d`.
    pub fn base_residue_field(&self) -> FqField {
        FqField::new(2, self.curve.base_degree)
    }

    /// `a mod 2` as an element of the working residue field.
    pub fn a_bar(&self) -> FqElem {
        let two = BigInt::from(2);
        let r = self.a.mod_floor(&two).to_u64().unwrap();
        self.ring().residue_field().from_prime(r)
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn is_star(&self) -> bool {
        self.verdict == Verdict::Star
    }
}

fn poly_mod2(f: &Poly<BigInt>, k: &FqField) -> Poly<FqElem> {
    let two = BigInt::from(2);
    f.map(|c| k.from_prime(c.mod_floor(&two).to_u64().unwrap()))
}

fn v2_bigint(x: &BigInt) -> u32 {
    assert!(!x.is_zero());
    x.magnitude().trailing_zeros().unwrap() as u32
}

/// Default working precision for an equation: generous enough that the
/// discriminant bound guarantees every `v(eta_i)` is visible.
pub fn default_precision(curve: &CurveInput) -> u32 {
    let disc = poly::discriminant(curve.f());
    let v = if disc.is_zero() { 0 } else { v2_bigint(&disc) };
    (2 * v + 16).max(64)
}

/// Runs the certification pipeline with default precision and seed.
pub fn certify(curve: &CurveInput) -> Result<StarCertificate, FailReason> {
    certify_with(curve, None, factor::DEFAULT_FACTOR_SEED)
}

/// Runs the certification pipeline with a pinned starting precision and a
/// factorisation seed.  On precision exhaustion the precision is doubled
/// once before giving up.
pub fn certify_with(
    curve: &CurveInput,
    precision: Option<u32>,
    seed: u64,
) -> Result<StarCertificate, FailReason> {
    let n0 = precision.unwrap_or_else(|| default_precision(curve));
    match certify_at(curve, n0, seed) {
        Err(FailReason::PrecisionExhausted) => certify_at(curve, n0 * 2, seed),
        out => out,
    }
}

fn certify_at(curve: &CurveInput, n: u32, seed: u64) -> Result<StarCertificate, FailReason> {
    let d = curve.base_degree;
    let g = curve.genus();
    let four = BigInt::from(4);

    if curve.c.mod_floor(&four) != BigInt::one() {
        return Err(FailReason::CNotOneMod4);
    }
    let a = (&curve.c - BigInt::one()) / &four;

    let k = FqField::new(2, d);
    let fbar = poly_mod2(&curve.f, &k);
    let qbar = match factor::char2_poly_sqrt(&fbar) {
        Some(q) => q,
        None => return Err(FailReason::FBarNotASquare),
    };
    debug_assert_eq!(qbar.deg(), g + 1);
    if !factor::is_squarefree(&qbar) {
        return Err(FailReason::QBarNotSeparable);
    }

    let factors = factor::factor_with_seed(&qbar, seed);
    let m_rel = factors
        .iter()
        .fold(1usize, |acc, (fac, _)| acc.lcm(&fac.deg()));
    let big_field = FqField::new(2, d * m_rel);
    let roots = {
        let qbar_big = if m_rel == 1 {
            qbar.clone()
        } else {
            FqEmbedding::new(&k, &big_field).embed_poly(&qbar)
        };
        let mut roots = factor::roots_in_field(&qbar_big);
        assert_eq!(roots.len(), g + 1, "separable square root must split over its splitting field");
        roots.sort();
        roots
    };

    // Lift the squared linear seeds (x - r_i)^2 = x^2 + r_i^2 to quadratics
    // over a ring three digits wider than the certified precision; the two
    // exact divisions below spend those digits.
    let w = n + 3;
    let ring_w = UnramRing::new(2, d * m_rel, w);
    let f_w = curve.f.map(|c| ring_w.from_bigint(c));
    let seeds: Vec<Poly<FqElem>> = roots
        .iter()
        .map(|r| Poly::from_coeffs(vec![r.square(), big_field.zero(), big_field.one()]))
        .collect();
    let lifted = hensel::lift_factors(&f_w, &seeds)
        .expect("squares of distinct linear factors are coprime and multiply to f mod 2");

    let ring_g = ring_w.truncated(w - 1);
    let ring_n = ring_w.truncated(n);
    let mut pairs = Vec::with_capacity(g + 1);
    for (i, quad) in lifted.iter().enumerate() {
        assert_eq!(quad.deg(), 2);
        let b = quad.coeff(1, &ring_w.zero());
        let c0 = quad.coeff(0, &ring_w.zero());
        let gamma_wide = b
            .neg()
            .div_exact_pow_p(1, &ring_g)
            .expect("x coefficient of a lifted pair quadratic is even");
        let diff = gamma_wide.square().sub(&c0.truncate(&ring_g));
        let eta = match diff.div_exact_pow_p(2, &ring_n) {
            Some(e) => e,
            None => return Err(FailReason::DiscCondition(i)),
        };
        let gamma = gamma_wide.truncate(&ring_n);
        let eta_valuation = match eta.valuation() {
            Some(v) => v,
            None => return Err(FailReason::PrecisionExhausted),
        };
        let r = gamma.reduce();
        assert_eq!(r, roots[i]);
        let residue_degree = r.frobenius_orbit(d).len();
        pairs.push(PairData {
            index: i,
            gamma,
            eta,
            eta_valuation,
            r,
            residue_degree,
            depth: Val::half(4 + eta_valuation as i64),
        });
    }

    let frobenius_perm: Vec<usize> = pairs
        .iter()
        .map(|p| {
            let sg = p.gamma.frobenius_pow(d);
            let j = pairs
                .iter()
                .position(|q| q.gamma == sg)
                .expect("Frobenius permutes the lifted pair midpoints");
            assert_eq!(pairs[j].eta, p.eta.frobenius_pow(d));
            j
        })
        .collect();

    let mut product = Poly::constant(ring_n.one());
    for p in &pairs {
        product = product.mul(&p.quadratic());
    }
    assert_eq!(
        product,
        curve.f.map(|c| ring_n.from_bigint(c)),
        "pair quadratics must multiply back to f at certified precision"
    );

    let verdict = if pairs.iter().all(|p| p.eta_valuation == 0) {
        Verdict::Star
    } else {
        Verdict::StarStar
    };

    Ok(StarCertificate {
        verdict,
        curve: curve.clone(),
        a,
        pairs,
        frobenius_perm,
        common_degree: m_rel,
        precision: n,
        seed,
    })
}

/// Human-readable report of the pairing data of a certificate.
pub fn pairing_report(cert: &StarCertificate) -> String {
    let mut out = String::new();
    let kind = match cert.verdict {
        Verdict::Star => "distance exactly 2 on every pair",
        Verdict::StarStar => "distance at least 2 on every pair",
    };
    let _ = writeln!(
        out,
        "verdict: {:?} ({kind}); genus {}, a = {}, base residue degree {}, relative degree {}, precision {}",
        cert.verdict,
        cert.genus(),
        cert.a,
        cert.curve.base_degree(),
        cert.common_degree,
        cert.precision,
    );
    for p in &cert.pairs {
        let _ = writeln!(
            out,
            "pair {}: (x - {})^2 - 4*({})  |  r = {}, residue degree {}, v(eta) = {}, depth {}",
            p.index, p.gamma, p.eta, p.r, p.residue_degree, p.eta_valuation, p.depth,
        );
    }
    let _ = writeln!(out, "frobenius permutation of pairs: {:?}", cert.frobenius_perm);
    out
}
