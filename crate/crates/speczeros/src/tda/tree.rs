//! Persistence tree over the 2-simplices, H1 read-off and union-find H0.
//!
//! The tree is built by walking the filtration in reverse. Every 2-simplex
//! becomes a node; a 1-simplex shared by two 2-simplices with distinct roots
//! links the root of smaller filtration index beneath the root of larger
//! index, labeled with the 1-simplex scale. Edges with a single incident
//! triangle link against the distinguished node sigma_infinity, which
//! represents the complement of the complex. Each tree edge
//! `parent -(r_b)-> child` is an H1 birth-death pair `(r_b, r_child)`.

use super::filtration::{Filtration, Simplex};
use super::PersistencePair;
use crate::Result;
use std::collections::HashMap;

/// Parent link of a tree node, labeled by the 1-simplex that created it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub parent: usize,
    /// Filtration value of the linking 1-simplex (the H1 birth).
    pub label: f64,
    /// Filtration index of the linking 1-simplex.
    pub edge_index: usize,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    /// Filtration index of the 2-simplex; `None` for sigma_infinity.
    pub simplex_index: Option<usize>,
    /// Scale at which the 2-simplex enters; infinity for the root.
    pub value: f64,
    pub parent: Option<TreeEdge>,
    pub children: Vec<usize>,
}

/// Rooted tree over all 2-simplices plus sigma_infinity.
#[derive(Debug, Clone)]
pub struct PersistenceTree {
    nodes: Vec<TreeNode>,
    root: usize,
    by_simplex: HashMap<usize, usize>,
}

impl PersistenceTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always contains sigma_infinity
    }

    /// Node id of the 2-simplex with the given filtration index.
    pub fn node_of_simplex(&self, filtration_index: usize) -> Option<usize> {
        self.by_simplex.get(&filtration_index).copied()
    }

    /// All descendants of a node (excluding the node itself).
    pub fn descendants(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.nodes[id].children.clone();
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend_from_slice(&self.nodes[n].children);
        }
        out
    }
}

/// Build the persistence tree of an alpha filtration.
pub fn build_persistence_tree(filt: &Filtration) -> Result<PersistenceTree> {
    // incident triangles per edge simplex, read from the filtration itself
    let mut incident: HashMap<Simplex, Vec<usize>> = HashMap::new();
    for (i, (_, s)) in filt.entries().iter().enumerate() {
        if let Simplex::Triangle(_) = s {
            for face in s.faces() {
                incident.entry(face).or_default().push(i);
            }
        }
    }

    let root = 0usize;
    let mut nodes = vec![TreeNode {
        simplex_index: None,
        value: f64::INFINITY,
        parent: None,
        children: Vec::new(),
    }];
    let mut by_simplex: HashMap<usize, usize> = HashMap::new();
    // union-find over node ids whose representative is the current tree root
    let mut uf: Vec<usize> = vec![root];

    fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]]; // path halving
            x = uf[x];
        }
        x
    }

    for j in (0..filt.len()).rev() {
        let (r_j, s) = (filt.value(j), filt.simplex(j));
        match s {
            Simplex::Triangle(_) => {
                let id = nodes.len();
                nodes.push(TreeNode {
                    simplex_index: Some(j),
                    value: r_j,
                    parent: None,
                    children: Vec::new(),
                });
                uf.push(id);
                by_simplex.insert(j, id);
            }
            Simplex::Edge(_) => {
                let tris = incident.get(s).map(Vec::as_slice).unwrap_or(&[]);
                let side = |k: usize| -> usize {
                    tris.get(k)
                        .and_then(|fi| by_simplex.get(fi).copied())
                        .unwrap_or(root)
                };
                let (sa, sb) = (side(0), side(1));
                let (ra, rb) = (find(&mut uf, sa), find(&mut uf, sb));
                if ra == rb {
                    continue;
                }
                // larger filtration index becomes the parent; the root has
                // infinite index
                let key = |id: usize| nodes[id].simplex_index.map_or(usize::MAX, |i| i);
                let (parent, child) = if key(ra) > key(rb) { (ra, rb) } else { (rb, ra) };
                nodes[child].parent = Some(TreeEdge { parent, label: r_j, edge_index: j });
                nodes[parent].children.push(child);
                uf[child] = parent;
            }
            Simplex::Vertex(_) => {}
        }
    }

    debug_assert!(
        nodes.iter().enumerate().all(|(i, n)| i == root || n.parent.is_some()),
        "persistence tree must be a single tree rooted at sigma_infinity"
    );
    Ok(PersistenceTree { nodes, root, by_simplex })
}

/// Read the H1 diagram off the tree: one pair per non-root node, birth from
/// the parent edge label, death from the node's own scale. Zero-persistence
/// pairs (`birth == death`) are included and flagged by the pair itself.
pub fn diagram_h1(tree: &PersistenceTree) -> Vec<PersistencePair> {
    let mut pairs = Vec::with_capacity(tree.len().saturating_sub(1));
    for node in tree.nodes() {
        if let Some(edge) = node.parent {
            pairs.push(PersistencePair {
                birth: edge.label,
                death: node.value,
                dim: 1,
                birth_simplex: Some(edge.edge_index),
                death_simplex: node.simplex_index,
            });
        }
    }
    pairs.sort_by(|a, b| {
        (a.birth, a.death, a.death_simplex).partial_cmp(&(b.birth, b.death, b.death_simplex)).unwrap()
    });
    pairs
}

/// H0 diagram by union-find over the filtration edges: components are all
/// born at 0; each merge kills one at the merging scale; one component
/// survives with infinite death.
pub fn diagram_h0(filt: &Filtration) -> Vec<PersistencePair> {
    let n = filt.n_vertices();
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut pairs = Vec::with_capacity(n);
    for (r, s) in filt.entries() {
        if let Simplex::Edge([a, b]) = s {
            let (ra, rb) = (find(&mut uf, *a), find(&mut uf, *b));
            if ra != rb {
                uf[ra.max(rb)] = ra.min(rb);
                pairs.push(PersistencePair {
                    birth: 0.0,
                    death: *r,
                    dim: 0,
                    birth_simplex: None,
                    death_simplex: None,
                });
            }
        }
    }
    pairs.push(PersistencePair {
        birth: 0.0,
        death: f64::INFINITY,
        dim: 0,
        birth_simplex: None,
        death_simplex: None,
    });
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ZeroSet;
    use crate::tda::alpha_filtration;

    fn topology_of(pts: &[[f64; 2]]) -> (Filtration, PersistenceTree) {
        let f = alpha_filtration(&ZeroSet::from_points(pts.to_vec(), 0.0).unwrap()).unwrap();
        let t = build_persistence_tree(&f).unwrap();
        (f, t)
    }

    #[test]
    fn single_triangle_tree_is_root_plus_one_node() {
        let s = 2.0;
        let (_, tree) = topology_of(&[[0.0, 0.0], [s, 0.0], [s / 2.0, s * 3f64.sqrt() / 2.0]]);
        assert_eq!(tree.len(), 2);
        let pairs = diagram_h1(&tree);
        assert_eq!(pairs.len(), 1);
        // the 3-edge cycle is born at the last side (s/2) and filled at the
        // circumradius
        assert!((pairs[0].birth - s / 2.0).abs() < 1e-6);
        assert!((pairs[0].death - s / 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn square_has_one_nontrivial_h1_pair() {
        let (_, tree) = topology_of(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let pairs = diagram_h1(&tree);
        let real: Vec<_> = pairs.iter().filter(|p| p.persistence() > 1e-6).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].birth - 0.5).abs() < 1e-6, "birth {}", real[0].birth);
        assert!(
            (real[0].death - 0.5f64.sqrt()).abs() < 1e-6,
            "death {}",
            real[0].death
        );
    }

    #[test]
    fn node_and_edge_counts_match_triangulation() {
        let pts: Vec<[f64; 2]> = (0..25)
            .map(|i| [((i * 13) % 7) as f64 + 0.1 * i as f64, ((i * 29) % 11) as f64])
            .collect();
        let (filt, tree) = topology_of(&pts);
        let n_triangles = filt
            .entries()
            .iter()
            .filter(|(_, s)| matches!(s, Simplex::Triangle(_)))
            .count();
        assert_eq!(tree.len(), n_triangles + 1);
        let n_edges = tree.nodes().iter().filter(|n| n.parent.is_some()).count();
        assert_eq!(n_edges, tree.len() - 1);
        // birth/death match the recorded simplex scales
        for p in diagram_h1(&tree) {
            assert_eq!(p.birth, filt.value(p.birth_simplex.unwrap()));
            assert_eq!(p.death, filt.value(p.death_simplex.unwrap()));
            assert!(p.birth <= p.death);
        }
    }

    #[test]
    fn structural_birth_death_reading() {
        // a pentagon with a center hole: the most persistent pair must be
        // created by the last hull side and killed by the triangle whose
        // appearance fills the center
        let pts: Vec<[f64; 2]> = (0..5)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let (filt, tree) = topology_of(&pts);
        let pairs = diagram_h1(&tree);
        let top = pairs
            .iter()
            .max_by(|a, b| a.persistence().partial_cmp(&b.persistence()).unwrap())
            .unwrap();
        // birth = half the side length, death = circumradius of the hole
        let side = (pts[0][0] - pts[1][0]).hypot(pts[0][1] - pts[1][1]);
        assert!((top.birth - side / 2.0).abs() < 1e-6);
        assert!((top.death - 1.0).abs() < 1e-2, "death near the circumscribed radius");
        // the recorded birth simplex is an edge, the death simplex a triangle
        assert!(matches!(filt.simplex(top.birth_simplex.unwrap()), Simplex::Edge(_)));
        assert!(matches!(filt.simplex(top.death_simplex.unwrap()), Simplex::Triangle(_)));
    }

    #[test]
    fn h0_isolated_clusters_die_at_half_gaps() {
        // points on a line with increasing gaps 1, 2, 3
        let pts = [[0.0, 0.0], [1.0, 0.0], [3.0, 0.0], [6.0, 0.0]];
        let f = alpha_filtration(&ZeroSet::from_points(pts.to_vec(), 0.0).unwrap()).unwrap();
        let pairs = diagram_h0(&f);
        let mut finite: Vec<f64> =
            pairs.iter().filter(|p| p.death.is_finite()).map(|p| p.death).collect();
        finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [0.5, 1.0, 1.5];
        assert_eq!(finite.len(), 3);
        for (d, e) in finite.iter().zip(expected) {
            assert!((d - e).abs() < 1e-6, "death {d} vs {e}");
        }
        assert_eq!(pairs.iter().filter(|p| p.death.is_infinite()).count(), 1);
    }

    #[test]
    fn h0_two_points_from_hand_built_filtration() {
        let entries = vec![
            (0.0, Simplex::Vertex(0)),
            (0.0, Simplex::Vertex(1)),
            (0.5, Simplex::edge([0, 1])),
        ];
        let f = Filtration::new(entries, 2).unwrap();
        let pairs = diagram_h0(&f);
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].birth, pairs[0].death), (0.0, 0.5));
        assert!(pairs[1].death.is_infinite());
    }
}
