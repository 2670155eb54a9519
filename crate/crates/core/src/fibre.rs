//! Stable model equation and its special fibre.
//!
//! From a certificate the stable model of `y^2 = c f(x)` is the hypersurface
//! `v^2 + Q(x) v = P(x)` where `Q = prod (x - gamma_i)` collects the pair
//! midpoints and `P = (c f - Q^2) / 4`.  Both descend to the base ring
//! because Frobenius permutes the pairs.  The special fibre is the curve
//! `v^2 + Qbar v = Pbar` over the residue field; its only singularities are
//! ordinary double points, one at each residue point `r_i` with
//! `v(eta_i) >= 1`, of thickness `v(eta_i)`.
//!
//! Besides building the model this module classifies every point of the
//! fibre above a root of `Qbar` (smooth, node, or worse), decides for each
//! node whether its two branches are rational over its residue field, and
//! decides whether the fibre splits into two components.

use crate::certify::StarCertificate;
use crate::factor;
use crate::fq::{self, FqElem, FqEmbedding, FqField};
use crate::poly::{Coeff, Poly};
use crate::unram::{reduce_poly, UnramElem, UnramEmbedding};
use crate::val::Val;
use num_integer::Integer;

/// The stable model equation `v^2 + Q v = P` and its reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableModel {
    /// Monic of degree `g + 1` over the base ring at certificate precision.
    pub q: Poly<UnramElem>,
    /// Degree at most `2g + 2` over the base ring, two digits shallower.
    pub p: Poly<UnramElem>,
    /// `Q mod 2` over the base residue field.
    pub qbar: Poly<FqElem>,
    /// `P mod 2` over the base residue field.
    pub pbar: Poly<FqElem>,
}

/// Builds the stable model from a certificate.
///
/// Panics if the certificate data fails its internal consistency checks:
/// the midpoint product must descend to the base ring, `c f - Q^2` must be
/// divisible by 4, and `Pbar` must match its closed form
/// `abar Qbar^2 + sum_i etabar_i prod_{j != i} (x - r_j)^2`.
pub fn stable_model(cert: &StarCertificate) -> StableModel {
    let ring_w = cert.ring();
    let base = cert.base_ring();

    let mut q_big = Poly::constant(ring_w.one());
    for pair in &cert.pairs {
        q_big = q_big.mul(&Poly::from_coeffs(vec![pair.gamma.neg(), ring_w.one()]));
    }
    let q = if cert.common_degree == 1 {
        q_big.clone()
    } else {
        UnramEmbedding::new(&base, &ring_w)
            .restrict_poly(&q_big)
            .expect("Frobenius-stable midpoint product descends to the base ring")
    };

    let cf = cert.curve.f().map(|co| base.from_bigint(&(co * cert.curve.c())));
    let diff = cf.sub(&q.mul(&q));
    let base_lo = base.truncated(base.precision() - 2);
    let p = Poly::from_coeffs(
        diff.coeffs()
            .iter()
            .map(|co| {
                co.div_exact_pow_p(2, &base_lo)
                    .expect("c f - Q^2 is divisible by 4")
            })
            .collect(),
    );

    let qbar = reduce_poly(&q);
    let pbar = reduce_poly(&p);

    // Cross-check Pbar against the closed form over the working residue
    // field, where all residue points are visible.
    let big_k = ring_w.residue_field();
    let (qbar_big, pbar_big) = if cert.common_degree == 1 {
        (qbar.clone(), pbar.clone())
    } else {
        let emb = FqEmbedding::new(&cert.base_residue_field(), big_k);
        (emb.embed_poly(&qbar), emb.embed_poly(&pbar))
    };
    let mut closed = qbar_big.mul(&qbar_big).mul_scalar(&cert.a_bar());
    for (i, pair) in cert.pairs.iter().enumerate() {
        let mut term = Poly::constant(pair.eta.reduce());
        for (j, other) in cert.pairs.iter().enumerate() {
            if j != i {
                let lin = Poly::x_minus(&other.r);
                term = term.mul(&lin).mul(&lin);
            }
        }
        closed = closed.add(&term);
    }
    assert_eq!(pbar_big, closed, "Pbar must match its closed form");

    StableModel { q, p, qbar, pbar }
}

/// Classification of a fibre point above a root of `Qbar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Smooth,
    /// Ordinary double point: two distinct branches.
    Node,
    /// A singularity worse than an ordinary double point.
    Worse,
}

/// Classifies the fibre `v^2 + Qbar v = P bar` above every root of `Qbar`
/// in its splitting field.
///
/// A root `r` is smooth on the fibre when
/// `Pbar'(r)^2 + Pbar(r) Qbar'(r)^2 != 0`, a node when that vanishes and `r`
/// is a simple root of `Qbar`, and worse otherwise.  Points are returned
/// sorted by root.
pub fn smoothness_scan(qbar: &Poly<FqElem>, pbar: &Poly<FqElem>) -> Vec<(FqElem, PointKind)> {
    let k = qbar.leading().field().clone();
    let m_rel = factor::factor(qbar)
        .iter()
        .fold(1usize, |acc, (fac, _)| acc.lcm(&fac.deg()));
    let (qb, pb) = if m_rel == 1 {
        (qbar.clone(), pbar.clone())
    } else {
        let big = FqField::new(2, k.degree() * m_rel);
        let emb = FqEmbedding::new(&k, &big);
        (emb.embed_poly(qbar), emb.embed_poly(pbar))
    };
    let dq = qb.derivative();
    let dp = pb.derivative();
    let mut roots = factor::roots_in_field(&qb);
    roots.sort();
    roots
        .into_iter()
        .map(|r| {
            let s = dp.eval(&r).square().add(&pb.eval(&r).mul(&dq.eval(&r).square()));
            let kind = if !s.is_zero() {
                PointKind::Smooth
            } else if !dq.eval(&r).is_zero() {
                PointKind::Node
            } else {
                PointKind::Worse
            };
            (r, kind)
        })
        .collect()
}

/// Whether the points at infinity of `v^2 + Qbar v = Pbar` are smooth, for a
/// curve of the stated genus.  For monic `Qbar` of degree `g + 1` this is
/// always true: the chart at infinity reads `w^2 + Qbar*(u) w = Pbar*(u)`
/// with `Qbar*(0)` the leading coefficient of `Qbar`.
pub fn infinity_points_smooth(qbar: &Poly<FqElem>, pbar: &Poly<FqElem>, genus: usize) -> bool {
    let zero = qbar.leading().zero_like();
    let qs = qbar.reverse_padded(genus + 1);
    let ps = pbar.reverse_padded(2 * genus + 2);
    let q0 = qs.coeff(0, &zero);
    if !q0.is_zero() {
        return true;
    }
    let p0 = ps.coeff(0, &zero);
    let p1 = ps.coeff(1, &zero);
    let q1 = qs.coeff(1, &zero);
    !p1.square().add(&p0.mul(&q1.square())).is_zero()
}

/// An ordinary double point of the special fibre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    /// Index of the pair in the certificate this node comes from.
    pub pair_index: usize,
    /// Residue point in the working residue field.
    pub r: FqElem,
    /// `v(eta)` of the pair; the node deforms as `uv = 2^thickness`.
    pub thickness: u32,
    /// Depth `2 + thickness / 2`.
    pub depth: Val,
    /// Degree of the residue point over the base residue field.
    pub residue_degree: usize,
    /// Whether the two branches are rational over the residue field of the
    /// point, i.e. not swapped by the Frobenius that fixes the point.
    pub split: bool,
    /// The class `abar + sum_{j != i} etabar_j (r_i - r_j)^{-2}`; the two
    /// branches correspond to the two solutions of `w^2 + w = branch_class`.
    pub branch_class: FqElem,
}

/// The branch class of pair `i`: `abar + sum_{j != i} etabar_j (r_i - r_j)^{-2}`.
pub fn node_branch_class(a_bar: &FqElem, roots: &[FqElem], etas: &[FqElem], i: usize) -> FqElem {
    let mut xi = a_bar.clone();
    for j in 0..roots.len() {
        if j != i && !etas[j].is_zero() {
            let inv = roots[i].sub(&roots[j]).square().inv().unwrap();
            xi = xi.add(&etas[j].mul(&inv));
        }
    }
    xi
}

/// Split test via the additive trace: the node at `r_i` is split over its
/// residue field (of absolute degree `abs_deg`) exactly when the trace of
/// its branch class down to the prime field vanishes.
pub fn node_split_by_trace(
    a_bar: &FqElem,
    roots: &[FqElem],
    etas: &[FqElem],
    i: usize,
    abs_deg: usize,
) -> bool {
    node_branch_class(a_bar, roots, etas, i).trace_in_subfield(abs_deg) == 0
}

/// Split test by brute force: searches the residue field of the point for a
/// branch slope, i.e. a solution of
/// `w^2 + Qbar'(r_i) w = abar Qbar'(r_i)^2 + sum_{j != i} etabar_j prod_{s != i, j} (r_i - r_s)^2`.
///
/// Only usable when `2^abs_deg` is small; agrees with
/// [`node_split_by_trace`] and exists as an independent check of it.
pub fn node_split_by_search(
    a_bar: &FqElem,
    roots: &[FqElem],
    etas: &[FqElem],
    i: usize,
    abs_deg: usize,
) -> bool {
    let field = roots[i].field();
    let mut dq = field.one();
    for (s, r) in roots.iter().enumerate() {
        if s != i {
            dq = dq.mul(&roots[i].sub(r));
        }
    }
    let mut rhs = a_bar.mul(&dq.square());
    for j in 0..roots.len() {
        if j == i || etas[j].is_zero() {
            continue;
        }
        let mut prod = field.one();
        for (s, r) in roots.iter().enumerate() {
            if s != i && s != j {
                prod = prod.mul(&roots[i].sub(r));
            }
        }
        rhs = rhs.add(&etas[j].mul(&prod.square()));
    }
    field
        .subfield_elements(abs_deg)
        .iter()
        .any(|w| w.square().add(&w.mul(&dq)) == rhs)
}

/// The ordinary double points of the special fibre, one per pair with
/// `v(eta) >= 1`, in pair order.
pub fn nodes(cert: &StarCertificate) -> Vec<Node> {
    let a_bar = cert.a_bar();
    let d = cert.curve.base_degree();
    let roots: Vec<FqElem> = cert.pairs.iter().map(|p| p.r.clone()).collect();
    let etas: Vec<FqElem> = cert.pairs.iter().map(|p| p.eta.reduce()).collect();
    cert.pairs
        .iter()
        .filter(|p| p.eta_valuation >= 1)
        .map(|p| {
            let xi = node_branch_class(&a_bar, &roots, &etas, p.index);
            let abs_deg = d * p.residue_degree;
            Node {
                pair_index: p.index,
                r: p.r.clone(),
                thickness: p.eta_valuation,
                depth: p.depth,
                residue_degree: p.residue_degree,
                split: xi.trace_in_subfield(abs_deg) == 0,
                branch_class: xi,
            }
        })
        .collect()
}

/// Component structure of the fibre `v^2 + Qbar v = Pbar`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentAnalysis {
    /// Square root of `Pbar` in the algebra `k[x]/(Qbar)`, as the unique
    /// representative of degree below `deg Qbar`.
    pub u0: Poly<FqElem>,
    /// 1 when the fibre is geometrically irreducible, 2 when it splits.
    pub geometric_components: usize,
    /// When the fibre splits, the constant `c` with
    /// `Pbar + U0^2 + Qbar U0 = c Qbar^2`; components are `v = U0 + lambda Qbar`
    /// for the two solutions of `lambda^2 + lambda = c`.
    pub constant: Option<FqElem>,
    /// When the fibre splits: whether the two components are defined over
    /// the coefficient field (else Frobenius swaps them).
    pub split_over_base: Option<bool>,
    /// The two component sections when they exist over the coefficient
    /// field, lex-sorted by the Artin-Schreier solution.
    pub components: Option<[Poly<FqElem>; 2]>,
}

/// Decides whether `v^2 + Qbar v = Pbar` splits into two components over
/// the algebraic closure, and if so whether already over the coefficient
/// field.  `Qbar` must be squarefree.
pub fn component_analysis(qbar: &Poly<FqElem>, pbar: &Poly<FqElem>) -> ComponentAnalysis {
    let k = qbar.leading().field().clone();
    let u0 = etale_sqrt(qbar, pbar);
    let r = u0
        .mul(&u0)
        .add(&qbar.mul(&u0))
        .add(pbar);
    let q2 = qbar.mul(qbar);
    let (quot, rem) = r.divmod(&q2);
    if !rem.is_zero() {
        return ComponentAnalysis {
            u0,
            geometric_components: 1,
            constant: None,
            split_over_base: None,
            components: None,
        };
    }
    assert!(
        quot.degree().map_or(true, |d| d == 0),
        "component residual must be a constant multiple of Qbar^2"
    );
    let c = quot.coeff(0, &k.zero());
    match k.artin_schreier_roots(&c) {
        Some([l0, l1]) => {
            let c0 = u0.add(&qbar.mul_scalar(&l0));
            let c1 = u0.add(&qbar.mul_scalar(&l1));
            ComponentAnalysis {
                u0,
                geometric_components: 2,
                constant: Some(c),
                split_over_base: Some(true),
                components: Some([c0, c1]),
            }
        }
        None => ComponentAnalysis {
            u0,
            geometric_components: 2,
            constant: Some(c),
            split_over_base: Some(false),
            components: None,
        },
    }
}

/// Square root of `pbar` in `k[x]/(qbar)`: squaring is a bijection of that
/// algebra in characteristic 2, inverted here as a linear map over the
/// prime field.
fn etale_sqrt(qbar: &Poly<FqElem>, pbar: &Poly<FqElem>) -> Poly<FqElem> {
    let k = qbar.leading().field().clone();
    let m = k.degree();
    let n = qbar.deg();
    let dim = n * m;
    let coords = |w: &Poly<FqElem>| -> Vec<u64> {
        let mut v = vec![0u64; dim];
        for (t, c) in w.coeffs().iter().enumerate() {
            v[t * m..(t + 1) * m].copy_from_slice(c.coeffs());
        }
        v
    };
    let mut cols = Vec::with_capacity(dim);
    for t in 0..n {
        for j in 0..m {
            let mut unit = vec![0u64; m];
            unit[j] = 1;
            let e = k.elem(&unit);
            let img = Poly::monomial(e.square(), 2 * t).rem(qbar);
            cols.push(coords(&img));
        }
    }
    let rows: Vec<Vec<u64>> = (0..dim)
        .map(|i| (0..dim).map(|s| cols[s][i]).collect())
        .collect();
    let b = coords(&pbar.rem(qbar));
    let sol = fq::fp_solve(2, &rows, &b)
        .expect("squaring is onto in an etale algebra of characteristic 2");
    let coeffs: Vec<FqElem> = (0..n).map(|t| k.elem(&sol[t * m..(t + 1) * m])).collect();
    let u0 = Poly::from_coeffs(coeffs);
    debug_assert!(u0.mul(&u0).sub(pbar).rem(qbar).is_zero());
    u0
}
