//! Monte Carlo noise references: run the full pipeline on B independent
//! white-noise draws and collect the top-K statistics, with a content-hashed
//! on-disk cache.

use super::{statistic_vector, EpsPolicy, StatKind};
use crate::signal::{find_zeros, stft, white_noise, NoiseKind, NoiseModel, StftConfig};
use crate::tda::analyze_zeros;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

const CACHE_VERSION: &str = "speczeros-noiseref-v1";

/// Everything the reference distribution depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceParams {
    /// Signal length of each replicate.
    pub n: usize,
    pub stft: StftConfig,
    /// Zero-detection margin in plane units.
    pub margin: f64,
    pub noise_kind: NoiseKind,
    pub variance: f64,
    pub kind: StatKind,
    pub k: usize,
    pub eps: EpsPolicy,
    /// Number of Monte Carlo replicates.
    pub b: usize,
    /// Root seed; replicates use `seed+1 ..= seed+b`.
    pub seed: u64,
}

impl ReferenceParams {
    /// Content hash identifying this parameter set (and the format version).
    pub fn content_hash(&self) -> String {
        let payload = serde_json::to_string(self).expect("params always serialize");
        let mut hasher = Sha256::new();
        hasher.update(CACHE_VERSION.as_bytes());
        hasher.update(b"|");
        hasher.update(payload.as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }

    /// Small example used by unit tests.
    pub fn example() -> Self {
        Self {
            n: 256,
            stft: StftConfig::default(),
            margin: 2.0,
            noise_kind: NoiseKind::Real,
            variance: 1.0,
            kind: StatKind::Dist,
            k: 5,
            eps: EpsPolicy::default(),
            b: 4,
            seed: 0,
        }
    }
}

/// B x K matrix of pure-noise statistics plus its generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReference {
    params: ReferenceParams,
    matrix: Vec<f64>,
    hash: String,
}

impl NoiseReference {
    pub fn from_rows(params: ReferenceParams, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(rows.len(), params.b, "row count must equal B");
        let mut matrix = Vec::with_capacity(params.b * params.k);
        for row in &rows {
            assert_eq!(row.len(), params.k, "row width must equal K");
            matrix.extend_from_slice(row);
        }
        let hash = params.content_hash();
        Self { params, matrix, hash }
    }

    pub fn params(&self) -> &ReferenceParams {
        &self.params
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn b(&self) -> usize {
        self.params.b
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    /// Statistic of replicate `j` at rank `k`.
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.matrix[j * self.params.k + k]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.matrix[j * self.params.k..(j + 1) * self.params.k]
    }

    /// Derived reference keeping only the leading `k` ranks of each
    /// replicate (a rank-1 reference for the simple test, for instance).
    /// Derived references are never written to the cache.
    pub fn truncated(&self, k: usize) -> NoiseReference {
        assert!(k >= 1 && k <= self.params.k, "cannot widen a reference");
        let params = ReferenceParams { k, ..self.params };
        let rows: Vec<Vec<f64>> = (0..self.b()).map(|j| self.row(j)[..k].to_vec()).collect();
        NoiseReference::from_rows(params, rows)
    }
}

/// Statistics of a single noise replicate for each requested kind. A draw
/// whose zero set is too small to triangulate contributes all-zero rows
/// (no components means maximal evidence for the null at every rank).
fn replicate_rows(params: &ReferenceParams, kinds: &[StatKind], seed: u64) -> Result<Vec<Vec<f64>>> {
    let model = NoiseModel { kind: params.noise_kind, variance: params.variance, seed };
    let noise = white_noise(params.n, &model);
    let grid = stft(&noise, &params.stft)?;
    let spec = grid.spectrogram();
    let zeros = find_zeros(&spec, params.margin)?;
    if zeros.len() < 3 {
        return Ok(kinds.iter().map(|_| vec![0.0; params.k]).collect());
    }
    let topo = analyze_zeros(&zeros)?;
    kinds
        .iter()
        .map(|kind| {
            statistic_vector(&spec, &topo, *kind, params.k, &params.eps)
                .map(|sv| sv.values().to_vec())
        })
        .collect()
}

/// Build (or load from cache) the reference for one statistic kind.
pub fn build_noise_reference(
    params: &ReferenceParams,
    cache_dir: Option<&Path>,
) -> Result<NoiseReference> {
    let refs = build_noise_references(params, &[params.kind], cache_dir)?;
    Ok(refs.into_iter().next().expect("one kind requested"))
}

/// Build references for several statistic kinds over the same replicates,
/// sharing the expensive per-replicate pipeline. Cached kinds are loaded;
/// missing kinds are generated in one pass and persisted.
pub fn build_noise_references(
    base: &ReferenceParams,
    kinds: &[StatKind],
    cache_dir: Option<&Path>,
) -> Result<Vec<NoiseReference>> {
    let mut out: Vec<Option<NoiseReference>> = vec![None; kinds.len()];
    let mut missing: Vec<(usize, StatKind)> = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        let params = ReferenceParams { kind: *kind, ..*base };
        if let Some(dir) = cache_dir {
            if let Some(loaded) = load_cached(dir, &params)? {
                out[i] = Some(loaded);
                continue;
            }
        }
        missing.push((i, *kind));
    }
    if !missing.is_empty() {
        let kinds_missing: Vec<StatKind> = missing.iter().map(|(_, k)| *k).collect();
        let rows: Vec<Vec<Vec<f64>>> = (0..base.b)
            .into_par_iter()
            .map(|j| replicate_rows(base, &kinds_missing, base.seed + 1 + j as u64))
            .collect::<Result<_>>()?;
        for (slot, (i, kind)) in missing.iter().enumerate() {
            let params = ReferenceParams { kind: *kind, ..*base };
            let kind_rows: Vec<Vec<f64>> = rows.iter().map(|r| r[slot].clone()).collect();
            let reference = NoiseReference::from_rows(params, kind_rows);
            if let Some(dir) = cache_dir {
                store_cached(dir, &reference)?;
            }
            out[*i] = Some(reference);
        }
    }
    Ok(out.into_iter().map(|r| r.expect("all kinds resolved")).collect())
}

fn cache_path(dir: &Path, params: &ReferenceParams) -> PathBuf {
    dir.join(format!("noiseref-{}.csv", params.content_hash()))
}

/// Load a cached reference; `Ok(None)` when absent or when the embedded hash
/// does not match the requested parameters (never silently reuse).
fn load_cached(dir: &Path, params: &ReferenceParams) -> Result<Option<NoiseReference>> {
    let path = cache_path(dir, params);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(format!("read cache {}", path.display()), e)),
    };
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let expected = format!("# {CACHE_VERSION} hash={}", params.content_hash());
    if header != expected {
        return Ok(None);
    }
    let mut rows = Vec::with_capacity(params.b);
    for line in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|x| x.parse::<f64>()).collect();
        match row {
            Ok(r) if r.len() == params.k => rows.push(r),
            _ => return Ok(None), // corrupt cache: regenerate
        }
    }
    if rows.len() != params.b {
        return Ok(None);
    }
    Ok(Some(NoiseReference::from_rows(*params, rows)))
}

/// Persist a reference atomically (write to a temp file, then rename).
fn store_cached(dir: &Path, reference: &NoiseReference) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("create {}", dir.display()), e))?;
    let path = cache_path(dir, reference.params());
    let mut body = format!("# {CACHE_VERSION} hash={}\n", reference.hash());
    body.push_str(&format!(
        "# params={}\n",
        serde_json::to_string(reference.params()).expect("params serialize")
    ));
    for j in 0..reference.b() {
        let row: Vec<String> = reference.row(j).iter().map(|x| format!("{x}")).collect();
        body.push_str(&row.join(","));
        body.push('\n');
    }
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let tmp = path.with_extension(format!("tmp-{nanos}"));
    {
        let mut f = std::fs::File::create(&tmp)
            .map_err(|e| Error::io(format!("create {}", tmp.display()), e))?;
        f.write_all(body.as_bytes())
            .map_err(|e| Error::io(format!("write {}", tmp.display()), e))?;
    }
    std::fs::rename(&tmp, &path).map_err(|e| Error::io(format!("rename {}", path.display()), e))?;
    Ok(())
}
