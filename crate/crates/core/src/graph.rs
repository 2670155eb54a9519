//! Dual graphs of the stable and minimal regular models.
//!
//! The stable model's special fibre has `t` nodes.  For `t <= g` the fibre
//! is irreducible, so its dual graph is a single vertex of genus `g - t`
//! carrying `t` loops.  For `t = g + 1` the fibre splits into two smooth
//! rational components crossing at the `g + 1` nodes, giving two genus-0
//! vertices joined by `g + 1` edges.  Either way the total genus, vertex
//! genera plus cycle rank, is `g`.
//!
//! Frobenius acts on the graph.  Its action on edges follows the action on
//! nodes; its action on the two branches at each node is tracked through
//! darts: the two solutions of `w^2 + w = branch_class` in a quadratic
//! extension of the working residue field, where the equation is always
//! soluble.  An edge orbit picks up a net branch swap exactly when its
//! nodes are non-split.
//!
//! The minimal regular model resolves a node of thickness `n` into a chain
//! of `n - 1` rational curves.  Its dual graph subdivides each edge into
//! `n` unit edges through `n - 1` chain-link vertices, and a branch swap on
//! the original edge reverses the chain.

use crate::certify::StarCertificate;
use crate::fibre::{component_analysis, nodes, StableModel};
use crate::fq::{FqElem, FqEmbedding, FqField};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    /// A component of the special fibre of the stable model.
    Component,
    /// An exceptional curve in a resolution chain of the regular model.
    ChainLink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub genus: usize,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    /// End vertices; equal for a loop.
    pub ends: (usize, usize),
    pub thickness: u32,
    /// Index of the certificate pair whose node this edge comes from.
    pub pair_index: Option<usize>,
}

/// Action of the base Frobenius on a dual graph.  `edge_flip[e]` records
/// whether the two branches of edge `e` are exchanged on the way to its
/// image edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphFrobenius {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub edge_flip: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub frobenius: GraphFrobenius,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub vertex_orbits: Vec<Vec<usize>>,
    pub edge_orbits: Vec<Vec<usize>>,
}

impl DualGraph {
    /// Internal consistency: permutations are bijections compatible with
    /// incidence, genus, kind, and thickness.
    pub fn validate(&self) {
        let nv = self.vertices.len();
        let ne = self.edges.len();
        let vp = &self.frobenius.vertex_perm;
        let ep = &self.frobenius.edge_perm;
        assert_eq!(vp.len(), nv);
        assert_eq!(ep.len(), ne);
        assert_eq!(self.frobenius.edge_flip.len(), ne);
        let mut seen = vec![false; nv];
        for &v in vp {
            assert!(!seen[v], "vertex permutation must be a bijection");
            seen[v] = true;
        }
        let mut seen = vec![false; ne];
        for &e in ep {
            assert!(!seen[e], "edge permutation must be a bijection");
            seen[e] = true;
        }
        for (v, &w) in vp.iter().enumerate() {
            assert_eq!(self.vertices[v], self.vertices[w]);
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let (u, v) = edge.ends;
            assert!(u < nv && v < nv);
            let target = &self.edges[ep[e]];
            assert_eq!(target.thickness, edge.thickness);
            let mapped = if self.frobenius.edge_flip[e] {
                (vp[v], vp[u])
            } else {
                (vp[u], vp[v])
            };
            assert_eq!(target.ends, mapped, "edge permutation must respect incidence");
        }
    }

    /// Vertex genera plus the cycle rank of the graph.
    pub fn total_genus(&self) -> usize {
        self.vertices.iter().map(|v| v.genus).sum::<usize>() + cycle_rank(self)
    }

    /// Graphviz rendering.  The Frobenius action is carried as `frob`
    /// attributes on vertices and edges (with `swap` marking an edge whose
    /// two branches are exchanged), and repeated in trailing comments.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {name} {{");
        for (i, v) in self.vertices.iter().enumerate() {
            let target = self.frobenius.vertex_perm[i];
            match v.kind {
                VertexKind::Component => {
                    let _ = writeln!(s, "  v{i} [label=\"genus {}\", frob=\"v{target}\"];", v.genus);
                }
                VertexKind::ChainLink => {
                    let _ = writeln!(s, "  v{i} [label=\"\", shape=point, frob=\"v{target}\"];");
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let target = self.frobenius.edge_perm[i];
            let swap = if self.frobenius.edge_flip[i] { ", swap=\"yes\"" } else { "" };
            let _ = writeln!(
                s,
                "  v{} -- v{} [label=\"e{i} t={}\", frob=\"e{target}\"{swap}];",
                e.ends.0, e.ends.1, e.thickness
            );
        }
        let _ = writeln!(s, "  // frobenius on vertices: {:?}", self.frobenius.vertex_perm);
        let _ = writeln!(
            s,
            "  // frobenius on edges: {:?} branch swaps: {:?}",
            self.frobenius.edge_perm, self.frobenius.edge_flip
        );
        s.push_str("}\n");
        s
    }
}

/// First Betti number, `E - V + number_of_components`.
pub fn cycle_rank(graph: &DualGraph) -> usize {
    let nv = graph.vertices.len();
    let mut parent: Vec<usize> = (0..nv).collect();
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
    for e in &graph.edges {
        let a = find(&mut parent, e.ends.0);
        let b = find(&mut parent, e.ends.1);
        parent[a] = b;
    }
    let comps = (0..nv).filter(|&v| find(&mut parent, v) == v).count();
    graph.edges.len() + comps - nv
}

fn perm_orbits(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut orbits = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            orbit.push(cur);
            cur = perm[cur];
        }
        orbits.push(orbit);
    }
    orbits
}

/// Frobenius orbits of vertices and edges, each orbit listed as the cycle
/// starting from its smallest element.
pub fn orbit_report(graph: &DualGraph) -> OrbitReport {
    OrbitReport {
        vertex_orbits: perm_orbits(&graph.frobenius.vertex_perm),
        edge_orbits: perm_orbits(&graph.frobenius.edge_perm),
    }
}

/// Dual graph of the special fibre of the stable model.
pub fn stable_graph(cert: &StarCertificate, model: &StableModel) -> DualGraph {
    let g = cert.genus();
    let d = cert.curve.base_degree();
    let ns = nodes(cert);
    let t = ns.len();
    let comp = component_analysis(&model.qbar, &model.pbar);

    let work_k = cert.ring().residue_field().clone();
    let double = FqField::new(2, 2 * work_k.degree());
    let emb = FqEmbedding::new(&work_k, &double);
    let darts: Vec<[FqElem; 2]> = ns
        .iter()
        .map(|n| {
            double
                .artin_schreier_roots(&emb.embed(&n.branch_class))
                .expect("branch equation is soluble in the double field")
        })
        .collect();

    let mut node_of_pair = vec![usize::MAX; cert.pairs.len()];
    for (e, n) in ns.iter().enumerate() {
        node_of_pair[n.pair_index] = e;
    }
    let edge_perm: Vec<usize> = ns
        .iter()
        .map(|n| node_of_pair[cert.frobenius_perm[n.pair_index]])
        .collect();
    let edge_flip: Vec<bool> = ns
        .iter()
        .enumerate()
        .map(|(e, _)| {
            let img = darts[e][0].frobenius_pow(d);
            let td = &darts[edge_perm[e]];
            if img == td[0] {
                false
            } else {
                assert_eq!(img, td[1], "Frobenius must permute the darts");
                true
            }
        })
        .collect();

    let (vertices, vertex_perm, ends) = if t == g + 1 {
        // Two rational components labelled by the solutions of
        // w^2 + w = abar; every branch class equals abar here, so the darts
        // of every edge are exactly the two component labels.
        let labels = double
            .artin_schreier_roots(&emb.embed(&cert.a_bar()))
            .expect("soluble in the double field");
        for dd in &darts {
            assert_eq!(dd, &labels, "all branch classes equal abar when the fibre splits");
        }
        let swap = labels[0].frobenius_pow(d) != labels[0];
        assert_eq!(comp.geometric_components, 2);
        assert_eq!(comp.split_over_base, Some(!swap));
        let vs = vec![
            Vertex { genus: 0, kind: VertexKind::Component },
            Vertex { genus: 0, kind: VertexKind::Component },
        ];
        let vp = if swap { vec![1, 0] } else { vec![0, 1] };
        (vs, vp, vec![(0usize, 1usize); t])
    } else {
        assert_eq!(comp.geometric_components, 1);
        let vs = vec![Vertex { genus: g - t, kind: VertexKind::Component }];
        (vs, vec![0], vec![(0usize, 0usize); t])
    };

    let edges: Vec<Edge> = ns
        .iter()
        .zip(&ends)
        .map(|(n, &e)| Edge {
            ends: e,
            thickness: n.thickness,
            pair_index: Some(n.pair_index),
        })
        .collect();

    let graph = DualGraph {
        vertices,
        edges,
        frobenius: GraphFrobenius { vertex_perm, edge_perm, edge_flip },
    };
    graph.validate();
    assert_eq!(graph.total_genus(), g);

    // A closed walk of edges returns the branches swapped exactly when the
    // nodes on it are non-split.
    for orbit in orbit_report(&graph).edge_orbits {
        let net = orbit
            .iter()
            .fold(false, |acc, &e| acc ^ graph.frobenius.edge_flip[e]);
        for &e in &orbit {
            assert_eq!(ns[e].split, ns[orbit[0]].split);
        }
        assert_eq!(net, !ns[orbit[0]].split);
    }

    graph
}

/// Dual graph of the minimal regular model: every edge of thickness `n`
/// becomes a chain of `n` unit edges through `n - 1` chain-link vertices.
pub fn minimal_regular_graph(stable: &DualGraph) -> DualGraph {
    let mut vertices = stable.vertices.clone();
    let mut chain_start = Vec::with_capacity(stable.edges.len());
    for e in &stable.edges {
        chain_start.push(vertices.len());
        for _ in 1..e.thickness {
            vertices.push(Vertex { genus: 0, kind: VertexKind::ChainLink });
        }
    }

    let mut edges = Vec::new();
    let mut edge_start = Vec::with_capacity(stable.edges.len());
    for (i, e) in stable.edges.iter().enumerate() {
        let n = e.thickness as usize;
        edge_start.push(edges.len());
        for s in 0..n {
            let left = if s == 0 { e.ends.0 } else { chain_start[i] + s - 1 };
            let right = if s == n - 1 { e.ends.1 } else { chain_start[i] + s };
            edges.push(Edge { ends: (left, right), thickness: 1, pair_index: e.pair_index });
        }
    }

    let mut vertex_perm = stable.frobenius.vertex_perm.clone();
    vertex_perm.resize(vertices.len(), usize::MAX);
    let mut edge_perm = vec![usize::MAX; edges.len()];
    let mut edge_flip = vec![false; edges.len()];
    for (i, e) in stable.edges.iter().enumerate() {
        let n = e.thickness as usize;
        let j = stable.frobenius.edge_perm[i];
        let f = stable.frobenius.edge_flip[i];
        for s in 1..n {
            let s2 = if f { n - s } else { s };
            vertex_perm[chain_start[i] + s - 1] = chain_start[j] + s2 - 1;
        }
        for s in 0..n {
            let s2 = if f { n - 1 - s } else { s };
            edge_perm[edge_start[i] + s] = edge_start[j] + s2;
            edge_flip[edge_start[i] + s] = f;
        }
    }

    let graph = DualGraph {
        vertices,
        edges,
        frobenius: GraphFrobenius { vertex_perm, edge_perm, edge_flip },
    };
    graph.validate();
    graph
}

/// Collapses the resolution chains of a graph produced by
/// [`minimal_regular_graph`], recovering the stable graph.  Sub-edges are
/// grouped by originating pair.
pub fn contract_chain_links(graph: &DualGraph) -> DualGraph {
    let is_component: Vec<bool> = graph
        .vertices
        .iter()
        .map(|v| v.kind == VertexKind::Component)
        .collect();
    let vertices: Vec<Vertex> = graph
        .vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Component)
        .cloned()
        .collect();

    // Group sub-edges by pair, in first-seen order.
    let mut groups: Vec<(Option<usize>, Vec<usize>)> = Vec::new();
    for (i, e) in graph.edges.iter().enumerate() {
        match groups.iter_mut().find(|(p, _)| *p == e.pair_index) {
            Some((_, members)) => members.push(i),
            None => groups.push((e.pair_index, vec![i])),
        }
    }

    let mut edges = Vec::with_capacity(groups.len());
    for (pair_index, members) in &groups {
        let first = &graph.edges[members[0]];
        let last = &graph.edges[*members.last().unwrap()];
        let u = if is_component[first.ends.0] { first.ends.0 } else { first.ends.1 };
        let v = if members.len() == 1 {
            first.ends.1
        } else if is_component[last.ends.1] {
            last.ends.1
        } else {
            last.ends.0
        };
        edges.push(Edge {
            ends: (u, v),
            thickness: members.len() as u32,
            pair_index: *pair_index,
        });
    }

    let group_of_pair = |p: &Option<usize>| groups.iter().position(|(q, _)| q == p).unwrap();
    let edge_perm: Vec<usize> = groups
        .iter()
        .map(|(_, members)| {
            let image = graph.frobenius.edge_perm[members[0]];
            group_of_pair(&graph.edges[image].pair_index)
        })
        .collect();
    let edge_flip: Vec<bool> = groups
        .iter()
        .map(|(_, members)| graph.frobenius.edge_flip[members[0]])
        .collect();
    let vertex_perm: Vec<usize> = (0..vertices.len())
        .map(|v| graph.frobenius.vertex_perm[v])
        .collect();

    let out = DualGraph {
        vertices,
        edges,
        frobenius: GraphFrobenius { vertex_perm, edge_perm, edge_flip },
    };
    out.validate();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify, CurveInput};
    use crate::fibre::stable_model;

    const GLOBAL_F: [i64; 7] = [28, -232, 221, 66, -61, -2, 1];
    const EX111_F: [i64; 7] = [-2184, 240, 505, -46, -37, 2, 1];
    const STAR_G2_F: [i64; 7] = [-84, 24, 41, -14, -9, 2, 1];

    fn graphs_for(c: i64, f: &[i64]) -> (DualGraph, DualGraph) {
        let curve = CurveInput::from_i64(c, f, 1).unwrap();
        let cert = certify(&curve).unwrap();
        let model = stable_model(&cert);
        let st = stable_graph(&cert, &model);
        let mr = minimal_regular_graph(&st);
        (st, mr)
    }

    #[test]
    fn global_graphs() {
        let (st, mr) = graphs_for(1, &GLOBAL_F);
        assert_eq!(st.vertices.len(), 1);
        assert_eq!(st.vertices[0].genus, 0);
        assert_eq!(st.edges.len(), 2);
        assert!(st.edges.iter().all(|e| e.ends == (0, 0) && e.thickness == 2));
        assert_eq!(st.frobenius.edge_perm, vec![1, 0]);
        assert_eq!(cycle_rank(&st), 2);
        assert_eq!(st.total_genus(), 2);
        // One edge orbit of size two with one net branch swap.
        let rep = orbit_report(&st);
        assert_eq!(rep.edge_orbits, vec![vec![0, 1]]);
        assert!(st.frobenius.edge_flip.iter().fold(false, |a, &b| a ^ b));

        assert_eq!(mr.vertices.len(), 3);
        assert_eq!(mr.edges.len(), 4);
        assert_eq!(cycle_rank(&mr), 2);
        assert_eq!(mr.total_genus(), 2);
        assert_eq!(contract_chain_links(&mr), st);
    }

    #[test]
    fn two_component_graphs() {
        let (st, mr) = graphs_for(5, &EX111_F);
        assert_eq!(st.vertices.len(), 2);
        assert!(st.vertices.iter().all(|v| v.genus == 0));
        assert_eq!(st.edges.len(), 3);
        assert!(st.edges.iter().all(|e| e.ends == (0, 1)));
        let th: Vec<u32> = st.edges.iter().map(|e| e.thickness).collect();
        assert_eq!(th, vec![1, 2, 2]);
        // Frobenius swaps the components and the two thick edges.
        assert_eq!(st.frobenius.vertex_perm, vec![1, 0]);
        assert_eq!(st.frobenius.edge_perm, vec![0, 2, 1]);
        assert_eq!(st.total_genus(), 2);

        assert_eq!(mr.vertices.len(), 4);
        assert_eq!(mr.edges.len(), 5);
        assert_eq!(cycle_rank(&mr), 2);
        assert_eq!(mr.total_genus(), 2);
        let rep = orbit_report(&mr);
        let mut sizes: Vec<usize> = rep.vertex_orbits.iter().map(|o| o.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 2]);
        assert_eq!(contract_chain_links(&mr), st);
    }

    #[test]
    fn split_components_stay_fixed() {
        // Same f, c = 1: abar = 0, so the two components are rational over
        // the base and Frobenius fixes them.
        let (st, _) = graphs_for(1, &EX111_F);
        assert_eq!(st.vertices.len(), 2);
        assert_eq!(st.frobenius.vertex_perm, vec![0, 1]);
        assert!(st.frobenius.edge_flip.iter().all(|&f| !f));
    }

    #[test]
    fn smooth_fibre_graph() {
        let (st, mr) = graphs_for(1, &STAR_G2_F);
        assert_eq!(st.vertices.len(), 1);
        assert_eq!(st.vertices[0].genus, 2);
        assert!(st.edges.is_empty());
        assert_eq!(st.total_genus(), 2);
        assert_eq!(mr, st);
    }

    #[test]
    fn dot_rendering_mentions_all_parts() {
        let (st, _) = graphs_for(5, &EX111_F);
        let dot = st.to_dot("stable");
        assert!(dot.contains("graph stable {"));
        assert!(dot.contains("v0 [label=\"genus 0\", frob=\"v1\"]"));
        assert!(dot.contains("v0 -- v1"));
        assert!(dot.contains("frobenius on vertices: [1, 0]"));
    }
}
