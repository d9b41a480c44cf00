//! Spectrogram zero detection.
//!
//! Zeros of the Gaussian-window STFT are isolated; on the discrete grid they
//! are detected as strict minima of the spectrogram over the 3x3
//! neighborhood. A margin band in plane units is excluded to suppress
//! boundary artifacts.

use super::SpectrogramGrid;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Empirical zero density of complex white noise spectrograms in the
/// normalized plane, at the default discretization (`n_fft` = signal length,
/// `hop` = 1), counted inside a margin of 1.0 plane unit.
///
/// Calibrated once by the Monte Carlo run in `tests/calibration.rs`:
/// 100 replicates at N = 4096 give density 1.00053 with a per-replicate
/// coefficient of variation of 0.14% (1000 replicates at N = 1024 give
/// 1.00202, cv 0.39%). The hyperuniform planar-GAF model predicts exactly
/// 1 zero per unit area.
pub const WHITE_NOISE_ZERO_DENSITY_COMPLEX: f64 = 1.0005;

/// Same calibration for real white noise (bins `0..=n_fft/2`):
/// 100 replicates at N = 4096 give 1.00057 (cv 0.24%); 1000 replicates at
/// N = 1024 give 1.00330 (cv 0.72%).
pub const WHITE_NOISE_ZERO_DENSITY_REAL: f64 = 1.0006;

/// Zeros of a spectrogram in normalized plane coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    points: Vec<[f64; 2]>,
    margin: f64,
}

impl ZeroSet {
    /// Build from explicit plane points; points must be pairwise distinct.
    pub fn from_points(points: Vec<[f64; 2]>, margin: f64) -> Result<Self> {
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("zero set contains duplicate points"));
        }
        if points
            .iter()
            .any(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(Error::invalid("zero set contains non-finite points"));
        }
        Ok(Self { points, margin })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Detect spectrogram zeros as strict 3x3 local minima, excluding a `margin`
/// band (in plane units) on every side.
///
/// Neighbor lookups respect the grid's structure: circular transforms wrap in
/// time (and in frequency for complex input), and onesided grids mirror
/// across the DC and Nyquist rows, so zeros on those axes are detected. Cells
/// whose neighborhood cannot be completed are skipped.
pub fn find_zeros(spec: &SpectrogramGrid, margin: f64) -> Result<ZeroSet> {
    let geom = *spec.geometry();
    if geom.rows < 3 || geom.cols < 3 {
        return Err(Error::invalid("zero detection needs a grid of at least 3x3"));
    }
    let wrap_cols = geom.circular && geom.cols * geom.hop == geom.signal_len;
    let wrap_rows = !geom.onesided && geom.rows == geom.n_fft;
    let rows = geom.rows as i64;
    let cols = geom.cols as i64;

    let row_index = |m: i64| -> Option<usize> {
        if (0..rows).contains(&m) {
            return Some(m as usize);
        }
        if geom.onesided {
            // |V(u, -v)| = |V(u, v)| for real signals: mirror across DC, and
            // across Nyquist when that row exists (even n_fft)
            let mirrored = if m < 0 {
                -m
            } else if geom.n_fft % 2 == 0 {
                2 * (rows - 1) - m
            } else {
                return None;
            };
            ((0..rows).contains(&mirrored)).then_some(mirrored as usize)
        } else if wrap_rows {
            Some(m.rem_euclid(rows) as usize)
        } else {
            None
        }
    };
    let col_index = |n: i64| -> Option<usize> {
        if (0..cols).contains(&n) {
            Some(n as usize)
        } else if wrap_cols {
            Some(n.rem_euclid(cols) as usize)
        } else {
            None
        }
    };

    let (u_max, v_max) = geom.plane_extent();
    let mut points = Vec::new();
    for m in 0..geom.rows {
        let v = geom.v_of_row(m);
        if v < margin || v > v_max - margin {
            continue;
        }
        for n in 0..geom.cols {
            let u = geom.u_of_col(n);
            if u < margin || u > u_max - margin {
                continue;
            }
            let c = spec.value(m, n);
            let mut strict = true;
            'nbrs: for dm in -1i64..=1 {
                for dn in -1i64..=1 {
                    if dm == 0 && dn == 0 {
                        continue;
                    }
                    let (mm, nn) = (row_index(m as i64 + dm), col_index(n as i64 + dn));
                    let nb = match (mm, nn) {
                        (Some(mm), Some(nn)) if (mm, nn) != (m, n) => spec.value(mm, nn),
                        _ => {
                            strict = false; // incomplete neighborhood
                            break 'nbrs;
                        }
                    };
                    // ties are not strict minima: zeros of analytic functions
                    // are generically nondegenerate
                    if nb <= c {
                        strict = false;
                        break 'nbrs;
                    }
                }
            }
            if strict {
                points.push([u, v]);
            }
        }
    }
    ZeroSet::from_points(points, margin)
}
