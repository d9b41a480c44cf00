//! Independent oracles shared by the integration tests.
//!
//! Everything here recomputes quantities from first principles, without
//! touching the persistence tree, the alpha-value assignment or the volume
//! traversal they are checking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speczeros::tda::{Filtration, PersistencePair, Simplex};

/// Uniform random cloud in a square.
pub fn random_cloud(n: usize, seed: u64, extent: f64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.random_range(0.0..extent), rng.random_range(0.0..extent)])
        .collect()
}

fn top_bit(words: &[u64]) -> Option<usize> {
    for (w, word) in words.iter().enumerate().rev() {
        if *word != 0 {
            return Some(w * 64 + 63 - word.leading_zeros() as usize);
        }
    }
    None
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// Persistence by standard boundary-matrix reduction over Z/2.
///
/// Returns H0 pairs as (birth, death) values (the immortal component is
/// omitted) and H1 pairs as (birth index, death index) filtration positions.
pub fn reduction_persistence(filt: &Filtration) -> (Vec<(f64, f64)>, Vec<(usize, usize)>) {
    let j = filt.len();
    let words = j.div_ceil(64);
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(j);
    for i in 0..j {
        let mut col = vec![0u64; words];
        for face in filt.simplex(i).faces() {
            let fi = filt.index_of(&face).expect("face present");
            col[fi / 64] ^= 1 << (fi % 64);
        }
        cols.push(col);
    }
    let mut owner: Vec<Option<usize>> = vec![None; j];
    let mut h0 = Vec::new();
    let mut h1 = Vec::new();
    for i in 0..j {
        loop {
            let Some(low) = top_bit(&cols[i]) else { break };
            match owner[low] {
                None => {
                    owner[low] = Some(i);
                    match filt.simplex(low).dim() {
                        0 => h0.push((0.0, filt.value(i))),
                        1 => h1.push((low, i)),
                        _ => unreachable!("2-simplices cannot be pivots in the plane"),
                    }
                    break;
                }
                Some(prev) => {
                    let (a, b) = cols.split_at_mut(i);
                    xor_into(&mut b[0], &a[prev]);
                }
            }
        }
    }
    (h0, h1)
}

const EPS: f64 = 1e-12;

/// Entry radius of an edge per the alpha-complex definition: the smallest r
/// such that the balls of radius r around both endpoints intersect inside
/// the shared Voronoi face. Computed by intersecting the half-plane
/// constraints of every other point along the bisector. `None` when the two
/// cells share no face (a non-Delaunay pair).
pub fn alpha_edge_entry(points: &[[f64; 2]], a: usize, b: usize) -> Option<f64> {
    let (pa, pb) = (points[a], points[b]);
    let m = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
    let len = ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt();
    let dir = [-(pb[1] - pa[1]) / len, (pb[0] - pa[0]) / len];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (w, pw) in points.iter().enumerate() {
        if w == a || w == b {
            continue;
        }
        // |x - pa|^2 <= |x - pw|^2 at x = m + s dir, linear in s
        let coef = 2.0 * (dir[0] * (pw[0] - pa[0]) + dir[1] * (pw[1] - pa[1]));
        let rhs = (pw[0] - m[0]).powi(2) + (pw[1] - m[1]).powi(2)
            - (pa[0] - m[0]).powi(2)
            - (pa[1] - m[1]).powi(2);
        if coef > EPS {
            hi = hi.min(rhs / coef);
        } else if coef < -EPS {
            lo = lo.max(rhs / coef);
        } else if rhs < 0.0 {
            return None;
        }
    }
    if lo > hi {
        return None;
    }
    let s_star = lo.max(0.0).min(hi);
    Some((len / 2.0).hypot(s_star))
}

/// Entry radius of a triangle: its circumradius, provided the circumcenter
/// lies in all three Voronoi cells (no other point strictly closer).
pub fn alpha_triangle_entry(points: &[[f64; 2]], v: [usize; 3]) -> Option<f64> {
    let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    if d == 0.0 {
        return None;
    }
    let a2 = a[0] * a[0] + a[1] * a[1];
    let b2 = b[0] * b[0] + b[1] * b[1];
    let c2 = c[0] * c[0] + c[1] * c[1];
    let cc = [
        (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d,
        (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d,
    ];
    let r = ((cc[0] - a[0]).powi(2) + (cc[1] - a[1]).powi(2)).sqrt();
    for (w, pw) in points.iter().enumerate() {
        if v.contains(&w) {
            continue;
        }
        let dw = ((cc[0] - pw[0]).powi(2) + (cc[1] - pw[1]).powi(2)).sqrt();
        if dw < r * (1.0 - 1e-9) {
            return None;
        }
    }
    Some(r)
}

/// Size of the smallest valid 2-chain for an H1 pair, by exhaustive
/// enumeration: chains contain the death simplex plus any subset of the
/// triangles entering strictly between birth and death; a chain is valid when
/// the maximal edge of its boundary is exactly the birth simplex. `None` when
/// the pair carries no indices or the search space is too large.
pub fn minimal_chain_size(filt: &Filtration, pair: &PersistencePair) -> Option<usize> {
    let ib = pair.birth_simplex?;
    let id = pair.death_simplex?;
    let candidates: Vec<usize> = (ib + 1..id)
        .filter(|i| matches!(filt.simplex(*i), Simplex::Triangle(_)))
        .collect();
    if candidates.len() > 24 {
        return None;
    }
    let words = filt.len().div_ceil(64);
    let boundary = |i: usize| -> Vec<u64> {
        let mut col = vec![0u64; words];
        for face in filt.simplex(i).faces() {
            let fi = filt.index_of(&face).unwrap();
            col[fi / 64] ^= 1 << (fi % 64);
        }
        col
    };
    let base = boundary(id);
    let cand_bd: Vec<Vec<u64>> = candidates.iter().map(|i| boundary(*i)).collect();
    let mut best: Option<usize> = None;
    for mask in 0u64..(1u64 << candidates.len()) {
        let size = 1 + mask.count_ones() as usize;
        if let Some(b) = best {
            if size >= b {
                continue;
            }
        }
        let mut bd = base.clone();
        let mut bits = mask;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            xor_into(&mut bd, &cand_bd[k]);
            bits &= bits - 1;
        }
        if top_bit(&bd) == Some(ib) {
            best = Some(size);
        }
    }
    best
}
