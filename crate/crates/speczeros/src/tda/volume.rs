//! Minimum volumes, stable volumes, bandwidth tuning and component ranking.

use super::tree::PersistenceTree;
use super::PersistencePair;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VolumeKind {
    Minimum,
    Stable { epsilon: f64 },
}

/// A set of 2-simplices representing one detected component.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    /// Filtration indices of the member 2-simplices, sorted.
    triangles: Vec<usize>,
    pair: PersistencePair,
    kind: VolumeKind,
}

impl Volume {
    pub fn triangles(&self) -> &[usize] {
        &self.triangles
    }

    pub fn pair(&self) -> &PersistencePair {
        &self.pair
    }

    pub fn kind(&self) -> VolumeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

fn death_node(tree: &PersistenceTree, pair: &PersistencePair) -> Result<usize> {
    let death_simplex = pair
        .death_simplex
        .ok_or_else(|| Error::invalid("volume requires an H1 pair with a death simplex"))?;
    let node = tree
        .node_of_simplex(death_simplex)
        .ok_or_else(|| Error::invalid("pair does not belong to this tree"))?;
    let tn = tree.node(node);
    let matches = tn.value == pair.death
        && tn.parent.map(|e| e.label) == Some(pair.birth)
        && tn.parent.map(|e| e.edge_index) == pair.birth_simplex;
    if !matches {
        return Err(Error::invalid("pair does not match the tree's records"));
    }
    Ok(node)
}

/// Minimum volume `MV(sigma_d) = {sigma_d} ∪ descendants(sigma_d)`.
pub fn minimum_volume(tree: &PersistenceTree, pair: &PersistencePair) -> Result<Volume> {
    let node = death_node(tree, pair)?;
    let mut ids = vec![node];
    ids.extend(tree.descendants(node));
    let mut triangles: Vec<usize> =
        ids.iter().map(|&id| tree.node(id).simplex_index.unwrap()).collect();
    triangles.sort_unstable();
    Ok(Volume { triangles, pair: *pair, kind: VolumeKind::Minimum })
}

/// Stable volume with noise bandwidth `epsilon`: prune the branches stemming
/// from `sigma_d` whose edge label is below `(1 + epsilon) * birth`, then
/// aggregate the remaining descendants.
pub fn stable_volume(tree: &PersistenceTree, pair: &PersistencePair, epsilon: f64) -> Result<Volume> {
    if !(epsilon >= 0.0) {
        return Err(Error::invalid(format!("stable volume needs epsilon >= 0, got {epsilon}")));
    }
    let node = death_node(tree, pair)?;
    let threshold = (1.0 + epsilon) * pair.birth;
    let mut ids = vec![node];
    for &child in &tree.node(node).children {
        let label = tree.node(child).parent.unwrap().label;
        if label >= threshold {
            ids.push(child);
            ids.extend(tree.descendants(child));
        }
    }
    let mut triangles: Vec<usize> =
        ids.iter().map(|&id| tree.node(id).simplex_index.unwrap()).collect();
    triangles.sort_unstable();
    Ok(Volume { triangles, pair: *pair, kind: VolumeKind::Stable { epsilon } })
}

/// Pick the bandwidth from the volume-size curve: the smallest epsilon of the
/// longest plateau (run of equal sizes), ties resolved toward smaller
/// epsilon.
pub fn plateau_epsilon(grid: &[f64], sizes: &[usize]) -> f64 {
    assert_eq!(grid.len(), sizes.len());
    assert!(!grid.is_empty());
    let (mut best_start, mut best_len) = (0usize, 1usize);
    let (mut start, mut len) = (0usize, 1usize);
    for i in 1..sizes.len() {
        if sizes[i] == sizes[i - 1] {
            len += 1;
        } else {
            start = i;
            len = 1;
        }
        if len > best_len {
            best_start = start;
            best_len = len;
        }
    }
    grid[best_start]
}

/// Tune the stable-volume bandwidth by locating a plateau of the size curve
/// on a 40-point grid over `[0, eps_max]`, expanding the interval when the
/// curve has no plateau and too few size changes to call one.
pub fn tune_epsilon(tree: &PersistenceTree, pair: &PersistencePair, eps_max: f64) -> Result<f64> {
    const GRID_POINTS: usize = 40;
    let mut eps_max = if eps_max > 0.0 { eps_max } else { 0.15 };
    loop {
        let grid: Vec<f64> = (0..GRID_POINTS)
            .map(|i| eps_max * i as f64 / (GRID_POINTS - 1) as f64)
            .collect();
        let mut sizes = Vec::with_capacity(GRID_POINTS);
        for &e in &grid {
            sizes.push(stable_volume(tree, pair, e)?.len());
        }
        let changes = sizes.windows(2).filter(|w| w[0] != w[1]).count();
        let has_plateau = sizes.windows(2).any(|w| w[0] == w[1]);
        if has_plateau || changes >= 10 {
            return Ok(plateau_epsilon(&grid, &sizes));
        }
        eps_max *= 2.0;
    }
}

/// Order H1 pairs by distance to the diagonal, descending, dropping
/// zero-persistence pairs. With `non_overlapping` the selection is restricted
/// to pairs whose death simplex is a direct child of sigma_infinity, which
/// guarantees pairwise-disjoint minimum volumes. Ties break deterministically
/// by (birth, death, death simplex index).
pub fn top_components(
    tree: &PersistenceTree,
    pairs: &[PersistencePair],
    k: usize,
    non_overlapping: bool,
) -> Vec<PersistencePair> {
    let mut selected: Vec<PersistencePair> = pairs
        .iter()
        .filter(|p| p.dim == 1 && p.death.is_finite() && !p.is_zero_persistence())
        .filter(|p| {
            if !non_overlapping {
                return true;
            }
            p.death_simplex
                .and_then(|s| tree.node_of_simplex(s))
                .map(|n| tree.node(n).parent.map(|e| e.parent) == Some(tree.root()))
                .unwrap_or(false)
        })
        .copied()
        .collect();
    selected.sort_by(|a, b| {
        b.distance_to_diagonal()
            .partial_cmp(&a.distance_to_diagonal())
            .unwrap()
            .then((a.birth, a.death, a.death_simplex).partial_cmp(&(b.birth, b.death, b.death_simplex)).unwrap())
    });
    selected.truncate(k);
    selected
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ZeroSet;
    use crate::tda::{alpha_filtration, build_persistence_tree, diagram_h1};

    fn cloud(n: usize, seed: u64) -> Vec<[f64; 2]> {
        // simple deterministic pseudo-random cloud
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n).map(|_| [10.0 * next(), 10.0 * next()]).collect()
    }

    fn topology(pts: Vec<[f64; 2]>) -> (PersistenceTree, Vec<PersistencePair>) {
        let f = alpha_filtration(&ZeroSet::from_points(pts, 0.0).unwrap()).unwrap();
        let t = build_persistence_tree(&f).unwrap();
        let pairs = diagram_h1(&t);
        (t, pairs)
    }

    #[test]
    fn leaf_death_simplex_gives_singleton_volume() {
        let (tree, pairs) = topology(cloud(20, 3));
        let leaf_pair = pairs
            .iter()
            .find(|p| {
                let n = tree.node_of_simplex(p.death_simplex.unwrap()).unwrap();
                tree.node(n).children.is_empty()
            })
            .expect("some leaf exists");
        let mv = minimum_volume(&tree, leaf_pair).unwrap();
        assert_eq!(mv.triangles(), &[leaf_pair.death_simplex.unwrap()]);
    }

    #[test]
    fn stable_volume_at_zero_equals_minimum_volume() {
        let (tree, pairs) = topology(cloud(30, 7));
        for p in &pairs {
            let mv = minimum_volume(&tree, p).unwrap();
            let sv = stable_volume(&tree, p, 0.0).unwrap();
            assert_eq!(mv.triangles(), sv.triangles());
        }
    }

    #[test]
    fn huge_epsilon_leaves_only_the_death_simplex() {
        let (tree, pairs) = topology(cloud(30, 8));
        for p in pairs.iter().filter(|p| !p.is_zero_persistence()) {
            let sv = stable_volume(&tree, p, 1e12).unwrap();
            assert_eq!(sv.triangles(), &[p.death_simplex.unwrap()]);
        }
    }

    #[test]
    fn stable_volumes_shrink_monotonically_and_stay_inside_mv() {
        let (tree, pairs) = topology(cloud(40, 9));
        let top = top_components(&tree, &pairs, 5, false);
        for p in &top {
            let mv = minimum_volume(&tree, p).unwrap();
            let mut last = usize::MAX;
            for i in 0..=20 {
                let eps = 0.05 * i as f64;
                let sv = stable_volume(&tree, p, eps).unwrap();
                assert!(sv.len() <= last, "size must be non-increasing in epsilon");
                last = sv.len();
                assert!(
                    sv.triangles().iter().all(|t| mv.triangles().binary_search(t).is_ok()),
                    "SV must be a subset of MV"
                );
                assert!(sv.triangles().contains(&p.death_simplex.unwrap()));
            }
        }
    }

    #[test]
    fn plateau_rule_examples() {
        // constant curve: plateau starts at 0
        assert_eq!(plateau_epsilon(&[0.0, 0.05, 0.1, 0.15], &[5, 5, 5, 5]), 0.0);
        // documented example: sizes [9,7,7,7,4]
        let grid = [0.0, 0.0375, 0.075, 0.1125, 0.15];
        assert_eq!(plateau_epsilon(&grid, &[9, 7, 7, 7, 4]), 0.0375);
        // tie between two runs of equal length: the earlier one wins
        assert_eq!(plateau_epsilon(&grid, &[9, 9, 4, 4, 1]), 0.0);
    }

    #[test]
    fn tuned_epsilon_is_inside_the_interval_when_curve_has_plateaus() {
        let (tree, pairs) = topology(cloud(35, 10));
        let top = top_components(&tree, &pairs, 3, false);
        for p in &top {
            let eps = tune_epsilon(&tree, p, 0.15).unwrap();
            assert!((0.0..=0.15).contains(&eps));
        }
    }

    #[test]
    fn top_components_orders_by_distance() {
        let mk = |b: f64, d: f64, i: usize| PersistencePair {
            birth: b,
            death: d,
            dim: 1,
            birth_simplex: Some(i),
            death_simplex: Some(i + 1),
        };
        let (tree, _) = topology(cloud(10, 11));
        let pairs = vec![mk(0.0, 1.0, 0), mk(1.0, 3.0, 2)];
        let top = top_components(&tree, &pairs, 5, false);
        assert_eq!(top.len(), 2);
        assert_eq!((top[0].birth, top[0].death), (1.0, 3.0));
        assert_eq!((top[1].birth, top[1].death), (0.0, 1.0));
        assert!(top_components(&tree, &[], 4, false).is_empty());
    }

    #[test]
    fn non_overlapping_selection_gives_disjoint_volumes() {
        let (tree, pairs) = topology(cloud(60, 12));
        let top = top_components(&tree, &pairs, 8, true);
        let volumes: Vec<Volume> =
            top.iter().map(|p| minimum_volume(&tree, p).unwrap()).collect();
        for i in 0..volumes.len() {
            for j in i + 1..volumes.len() {
                let overlap = volumes[i]
                    .triangles()
                    .iter()
                    .any(|t| volumes[j].triangles().binary_search(t).is_ok());
                assert!(!overlap, "volumes {i} and {j} overlap");
            }
        }
    }

    #[test]
    fn mismatched_pair_is_rejected() {
        let (tree, pairs) = topology(cloud(15, 13));
        let mut fake = pairs[0];
        fake.birth += 0.123;
        assert!(minimum_volume(&tree, &fake).is_err());
        assert!(stable_volume(&tree, &pairs[0], -0.1).is_err());
    }
}
