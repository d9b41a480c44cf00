//! Rasterization of volumes onto the spectrogram grid.

use super::filtration::{Filtration, Simplex};
use super::volume::Volume;
use crate::signal::GridGeometry;
use serde::{Deserialize, Serialize};

/// Binary time-frequency mask aligned with a spectrogram grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMask {
    bits: Vec<bool>,
    rows: usize,
    cols: usize,
}

impl BinaryMask {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { bits: vec![false; rows * cols], rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.cols + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Cellwise OR with another mask of the same shape.
    pub fn or_with(&mut self, other: &BinaryMask) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let row: Vec<&str> =
                (0..self.cols).map(|c| if self.get(r, c) { "1" } else { "0" }).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Set every grid cell whose center lies inside or on the boundary of some
/// triangle of the volume.
pub fn rasterize_volume(
    vol: &Volume,
    filt: &Filtration,
    points: &[[f64; 2]],
    geom: &GridGeometry,
) -> BinaryMask {
    let mut mask = BinaryMask::zeros(geom.rows, geom.cols);
    let u_step = geom.hop as f64 * geom.plane_scale;
    let v_step = geom.plane_scale;
    for &ti in vol.triangles() {
        let verts = match filt.simplex(ti) {
            Simplex::Triangle(v) => *v,
            _ => continue,
        };
        let (a, b, c) = (points[verts[0]], points[verts[1]], points[verts[2]]);
        let u_lo = a[0].min(b[0]).min(c[0]);
        let u_hi = a[0].max(b[0]).max(c[0]);
        let v_lo = a[1].min(b[1]).min(c[1]);
        let v_hi = a[1].max(b[1]).max(c[1]);
        let col_hi_f = (u_hi / u_step).floor();
        let row_hi_f = (v_hi / v_step).floor();
        if col_hi_f < 0.0 || row_hi_f < 0.0 {
            continue;
        }
        let col_lo = (u_lo / u_step).ceil().max(0.0) as usize;
        let col_hi = (col_hi_f as usize).min(geom.cols - 1);
        let row_lo = (v_lo / v_step).ceil().max(0.0) as usize;
        let row_hi = (row_hi_f as usize).min(geom.rows - 1);
        if col_lo > col_hi || row_lo > row_hi {
            continue;
        }
        for row in row_lo..=row_hi {
            let v = geom.v_of_row(row);
            for col in col_lo..=col_hi {
                if mask.get(row, col) {
                    continue;
                }
                let u = geom.u_of_col(col);
                if point_in_triangle([u, v], a, b, c) {
                    mask.set(row, col, true);
                }
            }
        }
    }
    mask
}

fn point_in_triangle(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    let cross = |o: [f64; 2], u: [f64; 2], v: [f64; 2]| {
        (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])
    };
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(has_neg && has_pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ZeroSet;
    use crate::tda::{
        alpha_filtration, build_persistence_tree, diagram_h1, minimum_volume, top_components,
    };

    fn geom(rows: usize, cols: usize, scale: f64) -> GridGeometry {
        GridGeometry {
            rows,
            cols,
            hop: 1,
            n_fft: rows,
            plane_scale: scale,
            onesided: false,
            signal_len: cols,
            circular: false,
            sample_rate: 1.0,
        }
    }

    #[test]
    fn one_triangle_covering_the_grid_sets_every_cell() {
        let pts = vec![[-10.0, -10.0], [30.0, -10.0], [5.0, 30.0]];
        let f = alpha_filtration(&ZeroSet::from_points(pts.clone(), 0.0).unwrap()).unwrap();
        let t = build_persistence_tree(&f).unwrap();
        let pairs = diagram_h1(&t);
        let vol = minimum_volume(&t, &pairs[0]).unwrap();
        let g = geom(8, 8, 1.0);
        let tri = crate::tda::delaunay(&ZeroSet::from_points(pts, 0.0).unwrap()).unwrap();
        let mask = rasterize_volume(&vol, &f, tri.points(), &g);
        assert_eq!(mask.count(), 64);
    }

    #[test]
    fn mask_area_matches_triangle_area_up_to_the_boundary_ring() {
        let pts: Vec<[f64; 2]> = (0..30)
            .map(|i| {
                let x = ((i * 37 + 11) % 101) as f64 / 101.0 * 6.0 + 1.0;
                let y = ((i * 53 + 29) % 97) as f64 / 97.0 * 6.0 + 1.0;
                [x, y]
            })
            .collect();
        let zeros = ZeroSet::from_points(pts, 0.0).unwrap();
        let tri = crate::tda::delaunay(&zeros).unwrap();
        let f = crate::tda::alpha_filtration_of(&tri).unwrap();
        let t = build_persistence_tree(&f).unwrap();
        let pairs = diagram_h1(&t);
        let top = top_components(&t, &pairs, 1, false);
        let vol = minimum_volume(&t, &top[0]).unwrap();
        let scale = 0.05;
        let g = geom(200, 200, scale);
        let mask = rasterize_volume(&vol, &f, tri.points(), &g);

        // exact polygon area: triangles of a volume are interior-disjoint
        let mut area = 0.0;
        let mut perimeter = 0.0;
        for &ti in vol.triangles() {
            if let crate::tda::Simplex::Triangle(v) = f.simplex(ti) {
                let (a, b, c) = (tri.points()[v[0]], tri.points()[v[1]], tri.points()[v[2]]);
                area += 0.5
                    * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
                for (p, q) in [(a, b), (b, c), (c, a)] {
                    perimeter += (p[0] - q[0]).hypot(p[1] - q[1]);
                }
            }
        }
        let cell = scale * scale;
        let raster_area = mask.count() as f64 * cell;
        let ring = perimeter * scale * 1.5 + cell;
        assert!(
            (raster_area - area).abs() <= ring,
            "raster {raster_area} vs polygon {area} (ring {ring})"
        );
    }

    #[test]
    fn or_with_unions_masks() {
        let mut a = BinaryMask::zeros(2, 2);
        a.set(0, 0, true);
        let mut b = BinaryMask::zeros(2, 2);
        b.set(1, 1, true);
        a.or_with(&b);
        assert_eq!(a.count(), 2);
    }
}
