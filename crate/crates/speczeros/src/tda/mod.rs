//! Persistent homology of planar point clouds via alpha complexes.
//!
//! The pipeline is: Delaunay triangulation -> alpha filtration (radius
//! convention) -> persistence tree -> H0/H1 diagrams, minimum volumes and
//! stable volumes. The persistence tree makes H1 pairing and volume-optimal
//! representatives a tree traversal instead of a matrix reduction or an LP.

mod delaunay;
mod filtration;
mod raster;
mod tree;
mod volume;

pub use delaunay::{delaunay, Triangulation, DEFAULT_JITTER_SEED};
pub use filtration::{alpha_filtration, alpha_filtration_of, Filtration, Simplex};
pub use raster::{rasterize_volume, BinaryMask};
pub use tree::{build_persistence_tree, diagram_h0, diagram_h1, PersistenceTree, TreeEdge, TreeNode};
pub use volume::{
    minimum_volume, stable_volume, top_components, tune_epsilon, Volume, VolumeKind,
};

use crate::signal::ZeroSet;
use crate::Result;
use serde::{Deserialize, Serialize};

/// A birth-death pair of a homology class, in plane units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    /// `f64::INFINITY` for the one immortal connected component.
    pub death: f64,
    pub dim: u8,
    /// Filtration index of the 1-simplex creating the class (dim 1 only).
    pub birth_simplex: Option<usize>,
    /// Filtration index of the 2-simplex killing the class (dim 1 only).
    pub death_simplex: Option<usize>,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    /// Distance of the pair to the diagonal, `(death - birth) / sqrt(2)`.
    pub fn distance_to_diagonal(&self) -> f64 {
        (self.death - self.birth) / std::f64::consts::SQRT_2
    }

    /// Pairs born and killed at the same scale carry no information.
    pub fn is_zero_persistence(&self) -> bool {
        self.birth == self.death
    }
}

/// Full topological analysis of a zero set, bundling every stage so that
/// downstream queries (volumes, masks, statistics) have what they need.
#[derive(Debug, Clone)]
pub struct ZeroTopology {
    pub triangulation: Triangulation,
    pub filtration: Filtration,
    pub tree: PersistenceTree,
    pub h0: Vec<PersistencePair>,
    pub h1: Vec<PersistencePair>,
}

/// Run the whole chain on a zero set.
pub fn analyze_zeros(zeros: &ZeroSet) -> Result<ZeroTopology> {
    let triangulation = delaunay(zeros)?;
    let filtration = alpha_filtration_of(&triangulation)?;
    let tree = build_persistence_tree(&filtration)?;
    let h1 = diagram_h1(&tree);
    let h0 = diagram_h0(&filtration);
    Ok(ZeroTopology { triangulation, filtration, tree, h0, h1 })
}
