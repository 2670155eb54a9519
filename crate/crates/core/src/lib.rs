//! Certification and analysis of stable models of hyperelliptic curves over
//! 2-adic fields.
//!
//! The crate takes a Weierstrass equation y^2 = c f(x) with integral
//! coefficients over an unramified extension of Q_2, decides whether the
//! equation satisfies the root-pairing conditions under which the curve
//! acquires semistable reduction over the base field itself, and when it
//! does, produces the stable model, its special fibre with split/non-split
//! node data, the dual graphs of the stable and minimal regular models,
//! cluster pictures (2-adic and odd-residue), and the kernel of reduction on
//! the 2-torsion of the Jacobian.

pub mod arena;
pub mod certify;
pub mod cluster;
pub mod factor;
pub mod fibre;
pub mod fq;
pub mod graph;
pub mod hensel;
pub mod poly;
pub mod two_torsion;
pub mod unram;
pub mod val;
