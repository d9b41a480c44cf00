//! Alpha filtration values against the direct ball-and-Voronoi definition.

mod common;

use common::{alpha_edge_entry, alpha_triangle_entry, random_cloud};
use speczeros::signal::ZeroSet;
use speczeros::tda::{alpha_filtration, delaunay, Simplex};

#[test]
fn filtration_values_match_the_geometric_predicate() {
    for seed in 0..10 {
        let zeros = ZeroSet::from_points(random_cloud(15, 100 + seed, 8.0), 0.0).unwrap();
        let tri = delaunay(&zeros).unwrap();
        let filt = speczeros::tda::alpha_filtration_of(&tri).unwrap();
        let points = tri.points();
        for (r, s) in filt.entries() {
            let expected = match s {
                Simplex::Vertex(_) => Some(0.0),
                Simplex::Edge([a, b]) => alpha_edge_entry(points, *a, *b),
                Simplex::Triangle(v) => alpha_triangle_entry(points, *v),
            };
            let expected = expected.expect("every filtration simplex enters eventually");
            assert!(
                (r - expected).abs() <= 1e-9 * expected.max(1.0),
                "simplex {s:?}: filtration {r} vs oracle {expected}"
            );
        }
    }
}

#[test]
fn obtuse_triangle_edge_entry_by_fine_r_bisection() {
    // brute-force confirmation of the inherited value for a non-Gabriel edge:
    // bisect the predicate "the edge has entered by scale r"
    let pts = vec![[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]];
    let zeros = ZeroSet::from_points(pts, 0.0).unwrap();
    let tri = delaunay(&zeros).unwrap();
    let filt = speczeros::tda::alpha_filtration_of(&tri).unwrap();
    let points = tri.points();
    let entry = alpha_edge_entry(points, 0, 1).unwrap();

    // predicate at radius r: feasible s with |s| <= sqrt(r^2 - h^2) within
    // the Voronoi face; scan a fine r grid around the reported value
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..60 {
        let r = (lo + hi) / 2.0;
        if entry <= r {
            hi = r;
        } else {
            lo = r;
        }
    }
    let r_filt = filt
        .entries()
        .iter()
        .find(|(_, s)| matches!(s, Simplex::Edge([0, 1])))
        .map(|(r, _)| *r)
        .unwrap();
    assert!((r_filt - hi).abs() < 1e-8, "filtration {r_filt} vs bisected {hi}");
    // and it must equal the attached triangle's circumradius
    let r_tri = filt
        .entries()
        .iter()
        .find(|(_, s)| matches!(s, Simplex::Triangle(_)))
        .map(|(r, _)| *r)
        .unwrap();
    assert_eq!(r_filt, r_tri);
}

#[test]
fn alpha_complex_membership_matches_definition_on_sampled_scales() {
    let zeros = ZeroSet::from_points(random_cloud(10, 77, 6.0), 0.0).unwrap();
    let tri = delaunay(&zeros).unwrap();
    let filt = speczeros::tda::alpha_filtration_of(&tri).unwrap();
    let points = tri.points();
    let n = points.len();

    // sample scales strictly between consecutive distinct filtration values
    let mut values: Vec<f64> = filt.entries().iter().map(|(r, _)| *r).collect();
    values.dedup();
    let mut scales: Vec<f64> = values.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    scales.push(values.last().unwrap() * 1.1);
    scales.truncate(20);

    for &r in &scales {
        // edges: every unordered pair of points
        for a in 0..n {
            for b in a + 1..n {
                let in_filtration = filt
                    .index_of(&Simplex::edge([a, b]))
                    .map(|i| filt.value(i) <= r)
                    .unwrap_or(false);
                let by_definition = alpha_edge_entry(points, a, b).map(|e| e <= r).unwrap_or(false);
                assert_eq!(
                    in_filtration, by_definition,
                    "edge [{a},{b}] at scale {r}"
                );
            }
        }
        // triangles: every triple
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let in_filtration = filt
                        .index_of(&Simplex::triangle([a, b, c]))
                        .map(|i| filt.value(i) <= r)
                        .unwrap_or(false);
                    let by_definition = alpha_triangle_entry(points, [a, b, c])
                        .map(|e| e <= r)
                        .unwrap_or(false);
                    assert_eq!(
                        in_filtration, by_definition,
                        "triangle [{a},{b},{c}] at scale {r}"
                    );
                }
            }
        }
    }
}
