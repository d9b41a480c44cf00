//! Delaunay triangulation of a zero set with deterministic symbolic jitter.
//!
//! Collinear triples break the alpha-complex construction; a seed-derived
//! uniform jitter of magnitude 1e-9 times the bounding-box diagonal is added
//! before triangulating, and recorded so results are reproducible.

use crate::signal::ZeroSet;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_JITTER_SEED: u64 = 0x5eed;
const JITTER_REL: f64 = 1e-9;

/// An undirected Delaunay edge and its (one or two) incident triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeInfo {
    /// Sorted vertex indices.
    pub vertices: [usize; 2],
    pub tri_a: usize,
    pub tri_b: Option<usize>,
}

/// Delaunay triangulation over jittered points.
#[derive(Debug, Clone)]
pub struct Triangulation {
    points: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<EdgeInfo>,
    jitter_seed: u64,
    jitter_magnitude: f64,
}

impl Triangulation {
    /// Jittered coordinates actually triangulated.
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Triangles as sorted vertex index triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[EdgeInfo] {
        &self.edges
    }

    pub fn jitter_seed(&self) -> u64 {
        self.jitter_seed
    }

    pub fn jitter_magnitude(&self) -> f64 {
        self.jitter_magnitude
    }

    pub fn circumcenter(&self, tri: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[tri];
        circumcenter(self.points[a], self.points[b], self.points[c])
    }

    pub fn circumradius(&self, tri: usize) -> f64 {
        let [a, _, _] = self.triangles[tri];
        let c = self.circumcenter(tri);
        dist(c, self.points[a])
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) fn circumcenter(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    let a2 = a[0] * a[0] + a[1] * a[1];
    let b2 = b[0] * b[0] + b[1] * b[1];
    let c2 = c[0] * c[0] + c[1] * c[1];
    let ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    let uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    [ux, uy]
}

/// Triangulate a zero set after applying the symbolic jitter.
pub fn delaunay(zeros: &ZeroSet) -> Result<Triangulation> {
    delaunay_seeded(zeros, DEFAULT_JITTER_SEED)
}

pub fn delaunay_seeded(zeros: &ZeroSet, jitter_seed: u64) -> Result<Triangulation> {
    let raw = zeros.points();
    if raw.len() < 3 {
        return Err(Error::degenerate(format!(
            "delaunay needs at least 3 points, got {}",
            raw.len()
        )));
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in raw {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let diag = dist(lo, hi);
    let magnitude = JITTER_REL * diag;
    let mut rng = ChaCha8Rng::seed_from_u64(jitter_seed);
    let points: Vec<[f64; 2]> = raw
        .iter()
        .map(|p| {
            let dx: f64 = rng.random_range(-1.0..1.0);
            let dy: f64 = rng.random_range(-1.0..1.0);
            [p[0] + magnitude * dx, p[1] + magnitude * dy]
        })
        .collect();

    let dpoints: Vec<delaunator::Point> = points
        .iter()
        .map(|p| delaunator::Point { x: p[0], y: p[1] })
        .collect();
    let tri = delaunator::triangulate(&dpoints);
    if tri.triangles.is_empty() {
        return Err(Error::degenerate(
            "point cloud is degenerate (no triangles even after jitter)",
        ));
    }

    let n_tris = tri.triangles.len() / 3;
    let mut triangles = Vec::with_capacity(n_tris);
    for t in 0..n_tris {
        let mut v = [
            tri.triangles[3 * t],
            tri.triangles[3 * t + 1],
            tri.triangles[3 * t + 2],
        ];
        v.sort_unstable();
        triangles.push(v);
    }

    // one EdgeInfo per undirected edge, via halfedge twins
    let mut edges = Vec::new();
    for e in 0..tri.triangles.len() {
        let twin = tri.halfedges[e];
        if twin != delaunator::EMPTY && twin < e {
            continue; // counted from the other side
        }
        let next = if e % 3 == 2 { e - 2 } else { e + 1 };
        let mut vertices = [tri.triangles[e], tri.triangles[next]];
        vertices.sort_unstable();
        edges.push(EdgeInfo {
            vertices,
            tri_a: e / 3,
            tri_b: if twin == delaunator::EMPTY { None } else { Some(twin / 3) },
        });
    }

    Ok(Triangulation {
        points,
        triangles,
        edges,
        jitter_seed,
        jitter_magnitude: magnitude,
    })
}
