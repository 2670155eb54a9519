//! Cluster pictures of the root configuration at 2 and at odd primes.
//!
//! A cluster picture is the unlabelled ultrametric tree of the roots of `f`:
//! a cluster is a set of roots cut out by a p-adic disc, its depth the
//! radius witnessing it.  Clusters nest, singletons are recorded as free
//! leaves of their smallest proper parent, and children are kept in a
//! canonical order so two pictures are equal exactly when their trees are.
//!
//! At `p = 2` a certified equation gives the picture directly: one top
//! cluster of depth 0 holding `g + 1` twins, the twin of pair `i` at depth
//! `2 + v(eta_i) / 2`.  Shifting that picture subtracts 2 from every twin
//! depth, dissolving twins that land at depth 0; this matches the picture
//! of the equation after the substitution that makes it semistable.
//!
//! At an odd prime the roots are computed in the quadratic arena
//! `Q_{p^2}(sqrt p)`, which holds every root of a factorisation of `f` into
//! integral factors of degree at most 2, and the picture is rebuilt from
//! the matrix of pairwise root valuations.

use crate::arena::{Arena, ArenaElem, ArenaError};
use crate::poly::{self, Poly};
use crate::val::Val;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("factor not usable over this arena: {0}")]
    UnsupportedExtension(#[from] ArenaError),
    #[error("working precision exhausted")]
    PrecisionExhausted,
}

/// One cluster: `leaf_count` roots, of which `free_leaves` lie in no child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterNode {
    pub depth: Val,
    pub leaf_count: usize,
    pub free_leaves: usize,
    pub children: Vec<ClusterNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterPicture {
    pub root: ClusterNode,
}

fn node_cmp(a: &ClusterNode, b: &ClusterNode) -> Ordering {
    a.depth
        .cmp(&b.depth)
        .then(a.leaf_count.cmp(&b.leaf_count))
        .then(a.free_leaves.cmp(&b.free_leaves))
        .then(a.children.len().cmp(&b.children.len()))
        .then_with(|| {
            for (x, y) in a.children.iter().zip(&b.children) {
                let c = node_cmp(x, y);
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
}

impl ClusterNode {
    fn new(depth: Val, leaf_count: usize, free_leaves: usize, mut children: Vec<ClusterNode>) -> ClusterNode {
        children.sort_by(node_cmp);
        assert_eq!(
            leaf_count,
            free_leaves + children.iter().map(|c| c.leaf_count).sum::<usize>()
        );
        ClusterNode { depth, leaf_count, free_leaves, children }
    }
}

impl ClusterPicture {
    /// Canonical JSON encoding; two pictures are equal exactly when these
    /// values are.
    pub fn canonical_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.root).expect("cluster trees serialize")
    }

    /// Indented text rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_node(&self.root, 0, &mut out);
        out
    }
}

fn render_node(node: &ClusterNode, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let kind = if node.leaf_count == 2 && node.children.is_empty() {
        "twin"
    } else {
        "cluster"
    };
    let _ = write!(out, "{pad}{kind} (depth {}, {} roots", node.depth, node.leaf_count);
    if node.free_leaves > 0 && !node.children.is_empty() {
        let _ = write!(out, ", {} free", node.free_leaves);
    }
    let _ = writeln!(out, ")");
    for c in &node.children {
        render_node(c, indent + 1, out);
    }
}

/// The 2-adic cluster picture of a certified equation: a depth-0 top
/// cluster holding one twin per pair at the pair's depth.
pub fn picture_from_certificate(cert: &crate::certify::StarCertificate) -> ClusterPicture {
    let children: Vec<ClusterNode> = cert
        .pairs
        .iter()
        .map(|p| ClusterNode::new(p.depth, 2, 2, Vec::new()))
        .collect();
    let leaf_count = 2 * cert.pairs.len();
    ClusterPicture {
        root: ClusterNode::new(Val::ZERO, leaf_count, 0, children),
    }
}

/// Subtracts 2 from the depth of every proper cluster, dissolving clusters
/// that land at their parent's depth into free leaves (and splicing their
/// children up).  The top depth is unchanged.
pub fn shifted_picture(picture: &ClusterPicture) -> ClusterPicture {
    let two = Val::int(2);
    fn shift(node: &ClusterNode, two: Val, is_root: bool) -> ClusterNode {
        let depth = if is_root { node.depth } else { node.depth - two };
        let mut free = node.free_leaves;
        let mut children = Vec::new();
        for c in &node.children {
            let shifted = shift(c, two, false);
            assert!(shifted.depth >= depth, "child depth sank below its parent");
            if shifted.depth == depth {
                free += shifted.free_leaves;
                children.extend(shifted.children);
            } else {
                children.push(shifted);
            }
        }
        ClusterNode::new(depth, node.leaf_count, free, children)
    }
    ClusterPicture { root: shift(&picture.root, two, true) }
}

/// Rebuilds the ultrametric tree from the symmetric matrix of pairwise
/// valuations `vals[i][j] = v(root_i - root_j)`.
pub fn picture_from_valuations(vals: &[Vec<Val>]) -> ClusterPicture {
    let n = vals.len();
    assert!(n >= 2);
    for (i, row) in vals.iter().enumerate() {
        assert_eq!(row.len(), n);
        for j in 0..n {
            assert_eq!(vals[i][j], vals[j][i]);
        }
    }
    let members: Vec<usize> = (0..n).collect();
    ClusterPicture { root: build_cluster(vals, &members) }
}

fn build_cluster(vals: &[Vec<Val>], members: &[usize]) -> ClusterNode {
    let depth = members
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| members[a + 1..].iter().map(move |&j| vals[i][j]))
        .min()
        .expect("a cluster has at least two members");

    // Group members whose mutual valuations exceed the cluster depth.
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != c {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            if vals[members[a]][members[b]] > depth {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                parent[ra] = rb;
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_root = vec![usize::MAX; members.len()];
    for a in 0..members.len() {
        let r = find(&mut parent, a);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[class_of_root[r]].push(members[a]);
    }

    let mut free = 0;
    let mut children = Vec::new();
    for class in classes {
        if class.len() == 1 {
            free += 1;
        } else {
            children.push(build_cluster(vals, &class));
        }
    }
    ClusterNode::new(depth, members.len(), free, children)
}

/// Sum of `v(a_i - b_j)` over all cross pairs; `None` when a difference is
/// zero to working precision.
pub fn cross_valuation_sum(a: &[ArenaElem], b: &[ArenaElem]) -> Option<Val> {
    let mut total = Val::ZERO;
    for x in a {
        for y in b {
            total = total + x.sub(y).valuation()?;
        }
    }
    Some(total)
}

/// The exact power of `p` dividing a nonzero integer.
pub fn vp_int(p: u64, x: &BigInt) -> u32 {
    assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// Cluster picture of `f = prod factors` at an odd prime, built from the
/// roots of the factors in the arena `Q_{p^2}(sqrt p)`.  Factors must be
/// integral of degree 1 or 2 with leading coefficient prime to `p`, and
/// their product squarefree.  Starting precision defaults to
/// `v_p(disc f) + 6` and doubles once if a root difference saturates.
pub fn odd_p_picture(
    p: u64,
    factors: &[Vec<BigInt>],
    precision: Option<u32>,
) -> Result<ClusterPicture, ClusterError> {
    assert!(p % 2 == 1 && p > 1, "odd prime required");
    let f = factors
        .iter()
        .fold(Poly::constant(BigInt::from(1)), |acc, c| {
            acc.mul(&Poly::from_coeffs(c.clone()))
        });
    let disc = poly::discriminant(&f);
    assert!(!disc.is_zero(), "product of the factors must be squarefree");
    let n0 = precision.unwrap_or_else(|| vp_int(p, &disc) + 6);
    match odd_p_picture_at(p, factors, n0) {
        Err(ClusterError::PrecisionExhausted) => odd_p_picture_at(p, factors, 2 * n0),
        out => out,
    }
}

fn odd_p_picture_at(
    p: u64,
    factors: &[Vec<BigInt>],
    precision: u32,
) -> Result<ClusterPicture, ClusterError> {
    let arena = Arena::new(p, precision);
    let mut roots = Vec::new();
    for coeffs in factors {
        roots.extend(arena.roots_of_factor(coeffs)?);
    }
    let n = roots.len();
    let mut vals = vec![vec![Val::ZERO; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = roots[i]
                .sub(&roots[j])
                .valuation()
                .ok_or(ClusterError::PrecisionExhausted)?;
            vals[i][j] = v;
            vals[j][i] = v;
        }
    }
    Ok(picture_from_valuations(&vals))
}
