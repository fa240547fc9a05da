//! Domain types and the dataset-level operations shared by every other
//! module: CSV ingestion, z-score normalization, synthetic outlier
//! injection, label-derived outlier masks, planted-instance generation, and
//! the robust clustering cost functions.

use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;

/// Clustering objective used when evaluating a center set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    KMeans,
    KMedian,
    KCenter,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::KMeans => "kmeans",
            Objective::KMedian => "kmedian",
            Objective::KCenter => "kcenter",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kmeans" => Ok(Objective::KMeans),
            "kmedian" => Ok(Objective::KMedian),
            "kcenter" => Ok(Objective::KCenter),
            other => Err(Error::contract(format!(
                "unknown objective '{other}' (expected kmeans, kmedian or kcenter)"
            ))),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A row-major matrix of `n` points in `d` dimensions with an optional
/// per-point class label and an optional ground-truth outlier mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F: Real> {
    points: Array2<F>,
    labels: Option<Vec<i64>>,
    true_outliers: Option<Vec<bool>>,
    name: String,
}

impl<F: Real> Dataset<F> {
    /// Builds a dataset after checking shape and finiteness.
    pub fn new(points: Array2<F>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::contract(format!(
                "dataset must have n >= 1 and d >= 1, got {}x{}",
                points.nrows(),
                points.ncols()
            )));
        }
        if let Some((i, j)) = points
            .indexed_iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(idx, _)| idx)
        {
            return Err(Error::contract(format!(
                "non-finite coordinate at point {i}, dimension {j}"
            )));
        }
        Ok(Self {
            points,
            labels: None,
            true_outliers: None,
            name: String::new(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::contract(format!(
                "labels length {} != n {}",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.n() {
            return Err(Error::contract(format!(
                "outlier mask length {} != n {}",
                mask.len(),
                self.n()
            )));
        }
        self.true_outliers = Some(mask);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, F> {
        self.points.view()
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, F> {
        self.points.row(i)
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn true_outliers(&self) -> Option<&[bool]> {
        self.true_outliers.as_deref()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Indices flagged true in the ground-truth mask, ascending.
    pub fn true_outlier_indices(&self) -> Option<Vec<usize>> {
        self.true_outliers.as_ref().map(|m| {
            m.iter()
                .enumerate()
                .filter_map(|(i, &t)| t.then_some(i))
                .collect()
        })
    }

    /// The sub-dataset at `indices` (row order follows `indices`); labels and
    /// mask are carried over.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= self.n()) {
            return Err(Error::contract("subset index out of range".to_string()));
        }
        let d = self.dim();
        let mut points = Array2::zeros((indices.len(), d));
        for (r, &i) in indices.iter().enumerate() {
            points.row_mut(r).assign(&self.points.row(i));
        }
        let mut out = Dataset::new(points)?.with_name(self.name.clone());
        if let Some(labels) = &self.labels {
            out = out.with_labels(indices.iter().map(|&i| labels[i]).collect())?;
        }
        if let Some(mask) = &self.true_outliers {
            out = out.with_mask(indices.iter().map(|&i| mask[i]).collect())?;
        }
        Ok(out)
    }
}

/// A dataset together with the number of clusters `k` and outlier budget `z`.
#[derive(Debug, Clone)]
pub struct RobustInstance<F: Real> {
    pub data: Dataset<F>,
    pub k: usize,
    pub z: usize,
}

impl<F: Real> RobustInstance<F> {
    pub fn new(data: Dataset<F>, k: usize, z: usize) -> Result<Self> {
        let n = data.n();
        if k == 0 || k > n {
            return Err(Error::contract(format!(
                "need 1 <= k <= n, got k={k}, n={n}"
            )));
        }
        if z > n - k {
            return Err(Error::contract(format!(
                "need z <= n - k so at least k inliers remain, got z={z}, n={n}, k={k}"
            )));
        }
        Ok(Self { data, k, z })
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }
}

/// A set of cluster centers (free points in R^d).
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet<F: Real> {
    centers: Array2<F>,
}

impl<F: Real> CenterSet<F> {
    pub fn new(centers: Array2<F>) -> Result<Self> {
        if centers.nrows() == 0 {
            return Err(Error::contract("center set must be nonempty".to_string()));
        }
        if centers.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract(
                "center set contains a non-finite coordinate".to_string(),
            ));
        }
        Ok(Self { centers })
    }

    /// Convenience constructor for tests and examples.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::contract("center set must be nonempty".to_string()));
        }
        let d = rows[0].len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::contract("ragged center rows".to_string()));
        }
        let flat: Vec<F> = rows.iter().flatten().copied().collect();
        let arr = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| Error::contract(e.to_string()))?;
        CenterSet::new(arr)
    }

    pub fn k(&self) -> usize {
        self.centers.nrows()
    }

    pub fn dim(&self) -> usize {
        self.centers.ncols()
    }

    pub fn rows(&self) -> ArrayView2<'_, F> {
        self.centers.view()
    }

    pub fn row(&self, j: usize) -> ArrayView1<'_, F> {
        self.centers.row(j)
    }

    /// Centers as plain `f64` rows, for serialization.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.centers
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.to_f64_lossy()).collect())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// CSV ingestion and export
// ---------------------------------------------------------------------------

/// Options for [`load_csv_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Interpret the last value column as an integer class label.
    pub has_labels: bool,
    /// Interpret the final column as a 0/1 ground-truth outlier mask
    /// (labels, when present, sit just before it).
    pub has_mask: bool,
    /// Skip the first row.
    pub skip_header: bool,
}

/// Loads a comma-separated dataset. With `has_labels` the last column is
/// parsed as an integer class label.
pub fn load_csv<F: Real>(
    path: impl AsRef<Path>,
    has_labels: bool,
    skip_header: bool,
) -> Result<Dataset<F>> {
    load_csv_with(
        path,
        &CsvOptions {
            has_labels,
            has_mask: false,
            skip_header,
        },
    )
}

/// Loads a dataset with optional label and mask columns (mask last).
pub fn load_csv_with<F: Real>(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset<F>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.skip_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let extra = usize::from(opts.has_labels) + usize::from(opts.has_mask);
    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut labels: Vec<i64> = Vec::new();
    let mut mask: Vec<bool> = Vec::new();
    let mut width: Option<usize> = None;

    for record in reader.records() {
        let record = record.map_err(|e| match e.position() {
            Some(pos) => Error::Parse {
                row: pos.line() as usize,
                col: 1,
                reason: e.to_string(),
            },
            None => Error::Parse {
                row: 0,
                col: 1,
                reason: e.to_string(),
            },
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(rows.len() + 1);
        if record.len() == 1 && record.get(0) == Some("") {
            continue; // blank line
        }
        match width {
            None => {
                if record.len() <= extra {
                    return Err(Error::Parse {
                        row: line,
                        col: record.len(),
                        reason: format!(
                            "need at least {} columns ({} coordinate + {} annotation)",
                            extra + 1,
                            1,
                            extra
                        ),
                    });
                }
                width = Some(record.len());
            }
            Some(w) if record.len() != w => {
                return Err(Error::Parse {
                    row: line,
                    col: record.len().min(w) + 1,
                    reason: format!("expected {w} fields, found {}", record.len()),
                });
            }
            _ => {}
        }
        let w = width.expect("set above");
        let coord_cols = w - extra;
        let mut row = Vec::with_capacity(coord_cols);
        for (j, field) in record.iter().enumerate() {
            let col = j + 1;
            if j < coord_cols {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    row: line,
                    col,
                    reason: format!("'{field}' is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row: line,
                        col,
                        reason: format!("non-finite value '{field}'"),
                    });
                }
                row.push(F::from_f64_lossy(v));
            } else if opts.has_labels && j == coord_cols {
                let v: i64 = field.parse().map_err(|_| Error::Parse {
                    row: line,
                    col,
                    reason: format!("label '{field}' is not an integer"),
                })?;
                labels.push(v);
            } else {
                let v: i64 = field.parse().map_err(|_| Error::Parse {
                    row: line,
                    col,
                    reason: format!("mask '{field}' is not 0 or 1"),
                })?;
                if v != 0 && v != 1 {
                    return Err(Error::Parse {
                        row: line,
                        col,
                        reason: format!("mask value '{field}' is not 0 or 1"),
                    });
                }
                mask.push(v == 1);
            }
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            reason: "empty file".to_string(),
        });
    }

    let d = rows[0].len();
    let flat: Vec<F> = rows.into_iter().flatten().collect();
    let n = flat.len() / d;
    let points =
        Array2::from_shape_vec((n, d), flat).map_err(|e| Error::contract(e.to_string()))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut out = Dataset::new(points)?.with_name(stem);
    if opts.has_labels {
        out = out.with_labels(labels)?;
    }
    if opts.has_mask {
        out = out.with_mask(mask)?;
    }
    Ok(out)
}

/// Writes the dataset as CSV; labels and mask, when present, are appended as
/// trailing columns (mask last, encoded 0/1).
pub fn save_csv<F: Real>(data: &Dataset<F>, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    for i in 0..data.n() {
        let mut record: Vec<String> = data.point(i).iter().map(|v| format!("{v}")).collect();
        if let Some(labels) = data.labels() {
            record.push(labels[i].to_string());
        }
        if let Some(mask) = data.true_outliers() {
            record.push(if mask[i] { "1" } else { "0" }.to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Normalization and outlier preparation
// ---------------------------------------------------------------------------

/// Shifts and scales every column to mean 0 and population standard
/// deviation 1. Constant columns map to all-zeros.
pub fn normalize_zscore<F: Real>(data: &Dataset<F>) -> Result<Dataset<F>> {
    let n = data.n();
    if n < 2 {
        return Err(Error::contract(format!(
            "normalization needs n >= 2, got n={n}"
        )));
    }
    let nf = F::from_f64_lossy(n as f64);
    let mut points = data.points.clone();
    for mut col in points.axis_iter_mut(Axis(1)) {
        let first = col[0];
        if col.iter().all(|&v| v == first) {
            col.fill(F::zero());
            continue;
        }
        let mean = col.iter().copied().sum::<F>() / nf;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>() / nf;
        let std = var.sqrt();
        for v in col.iter_mut() {
            *v = (*v - mean) / std;
        }
    }
    let mut out = Dataset::new(points)?.with_name(data.name.clone());
    if let Some(labels) = &data.labels {
        out = out.with_labels(labels.clone())?;
    }
    if let Some(mask) = &data.true_outliers {
        out = out.with_mask(mask.clone())?;
    }
    Ok(out)
}

/// Appends `round(fraction * n)` (at least one) synthetic outliers drawn
/// coordinate-wise uniform on `[-xi, xi]`; the returned mask marks exactly
/// the appended points. Existing rows are untouched.
pub fn inject_outliers<F: Real>(
    data: &Dataset<F>,
    fraction: f64,
    xi: f64,
    seed: u64,
) -> Result<Dataset<F>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::contract(format!(
            "injection fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if !(xi > 0.0) {
        return Err(Error::contract(format!("xi must be positive, got {xi}")));
    }
    let n = data.n();
    let d = data.dim();
    let count = ((fraction * n as f64).round() as usize).max(1);
    let mut rng = seeded(seed);

    let mut points = Array2::zeros((n + count, d));
    points.slice_mut(ndarray::s![..n, ..]).assign(&data.points);
    for i in 0..count {
        for j in 0..d {
            let u: f64 = rng.random();
            points[[n + i, j]] = F::from_f64_lossy(-xi + 2.0 * xi * u);
        }
    }

    let mut mask = vec![false; n + count];
    for m in mask.iter_mut().skip(n) {
        *m = true;
    }
    let mut out = Dataset::new(points)?.with_name(data.name.clone());
    if let Some(labels) = &data.labels {
        let mut extended = labels.clone();
        extended.resize(n + count, -1); // injected points carry no class
        out = out.with_labels(extended)?;
    }
    out.with_mask(mask)
}

/// Sets the ground-truth mask to true exactly where the class label belongs
/// to `outlier_classes`.
pub fn mark_label_outliers<F: Real>(
    data: &Dataset<F>,
    outlier_classes: &[i64],
) -> Result<Dataset<F>> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::contract("mark_label_outliers requires labels".to_string()))?;
    let mask: Vec<bool> = labels
        .iter()
        .map(|l| outlier_classes.contains(l))
        .collect();
    data.clone().with_mask(mask)
}

// ---------------------------------------------------------------------------
// Robust cost evaluation
// ---------------------------------------------------------------------------

/// Squared distance of every point to its nearest center and that center's
/// index; ties go to the lower center index.
pub(crate) fn nearest_assignments<F: Real>(
    points: ArrayView2<'_, F>,
    centers: &CenterSet<F>,
) -> Vec<(F, usize)> {
    let rows: Vec<ArrayView1<'_, F>> = points.rows().into_iter().collect();
    rows.par_iter()
        .map(|p| {
            let mut best = (F::infinity(), 0usize);
            for (j, c) in centers.rows().rows().into_iter().enumerate() {
                let mut d2 = F::zero();
                for (a, b) in p.iter().zip(c.iter()) {
                    let diff = *a - *b;
                    d2 += diff * diff;
                }
                if d2 < best.0 {
                    best = (d2, j);
                }
            }
            best
        })
        .collect()
}

#[derive(Debug, Clone)]
pub(crate) struct Evaluation<F: Real> {
    pub cost: F,
    /// The z dropped indices, ascending.
    pub outliers: Vec<usize>,
    /// Per-point assigned center; `None` exactly at the dropped indices.
    pub assignment: Vec<Option<usize>>,
}

/// Orders point indices by (distance descending, index ascending): the drop
/// order for the z farthest points and the fixed summation order that makes
/// cost comparisons between kept sets exact.
fn drop_order<F: Real>(d2: &[(F, usize)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d2.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        d2[b].0
            .partial_cmp(&d2[a].0)
            .expect("distances are finite")
            .then(a.cmp(&b))
    });
    order
}

fn cost_of_kept<F: Real>(d2: &[(F, usize)], kept_desc: &[usize], objective: Objective) -> F {
    match objective {
        Objective::KMeans => kept_desc.iter().map(|&i| d2[i].0).sum(),
        Objective::KMedian => kept_desc.iter().map(|&i| d2[i].0.sqrt()).sum(),
        Objective::KCenter => kept_desc
            .first()
            .map(|&i| d2[i].0.sqrt())
            .unwrap_or_else(F::zero),
    }
}

pub(crate) fn evaluate_detailed<F: Real>(
    data: &Dataset<F>,
    centers: &CenterSet<F>,
    z: usize,
    objective: Objective,
) -> Result<Evaluation<F>> {
    let n = data.n();
    if centers.dim() != data.dim() {
        return Err(Error::contract(format!(
            "center dimension {} != data dimension {}",
            centers.dim(),
            data.dim()
        )));
    }
    if z > n.saturating_sub(1) {
        return Err(Error::contract(format!(
            "outlier budget z={z} must leave at least one point, n={n}"
        )));
    }
    let d2 = nearest_assignments(data.points(), centers);
    let order = drop_order(&d2);
    let mut outliers: Vec<usize> = order[..z].to_vec();
    outliers.sort_unstable();
    let cost = cost_of_kept(&d2, &order[z..], objective);
    let mut assignment: Vec<Option<usize>> = d2.iter().map(|&(_, j)| Some(j)).collect();
    for &i in &outliers {
        assignment[i] = None;
    }
    Ok(Evaluation {
        cost,
        outliers,
        assignment,
    })
}

/// Robust cost of `centers` on `data`: drops the `z` points with the largest
/// distance to their nearest center (ties broken toward the lower index) and
/// returns the objective over the remainder plus the dropped indices.
pub fn evaluate_cost<F: Real>(
    data: &Dataset<F>,
    centers: &CenterSet<F>,
    z: usize,
    objective: Objective,
) -> Result<(F, Vec<usize>)> {
    let eval = evaluate_detailed(data, centers, z, objective)?;
    Ok((eval.cost, eval.outliers))
}

/// Cost of `centers` over `data` with the points in `drop` (sorted or not)
/// excluded; shares the kept-set summation order with [`evaluate_cost`] so
/// the two are exactly comparable.
pub(crate) fn cost_excluding<F: Real>(
    data: &Dataset<F>,
    centers: &CenterSet<F>,
    drop: &[usize],
    objective: Objective,
) -> Result<F> {
    if centers.dim() != data.dim() {
        return Err(Error::contract(format!(
            "center dimension {} != data dimension {}",
            centers.dim(),
            data.dim()
        )));
    }
    let dropped: std::collections::HashSet<usize> = drop.iter().copied().collect();
    let d2 = nearest_assignments(data.points(), centers);
    let kept_desc: Vec<usize> = drop_order(&d2)
        .into_iter()
        .filter(|i| !dropped.contains(i))
        .collect();
    Ok(cost_of_kept(&d2, &kept_desc, objective))
}

// ---------------------------------------------------------------------------
// Synthetic instance generation
// ---------------------------------------------------------------------------

pub(crate) fn place_separated_centers(
    rng: &mut rand_chacha::ChaCha8Rng,
    k: usize,
    separation: f64,
    d: usize,
) -> Vec<Vec<f64>> {
    let box_half = separation * (k.max(2) as f64);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    'outer: for j in 0..k {
        for _ in 0..1000 {
            let cand: Vec<f64> = (0..d)
                .map(|_| {
                    let u: f64 = rng.random();
                    -box_half + 2.0 * box_half * u
                })
                .collect();
            let ok = centers.iter().all(|c| {
                let sq: f64 = c.iter().zip(&cand).map(|(a, b)| (a - b) * (a - b)).sum();
                sq >= separation * separation
            });
            if ok {
                centers.push(cand);
                continue 'outer;
            }
        }
        // Lattice fallback: axis-aligned spikes are pairwise >= 2*separation apart.
        let mut cand = vec![0.0; d];
        cand[j % d] = 2.0 * separation * ((j / d + 1) as f64);
        centers.push(cand);
    }
    centers
}

fn gaussian_point(
    rng: &mut rand_chacha::ChaCha8Rng,
    center: &[f64],
    spread: f64,
) -> Vec<f64> {
    center
        .iter()
        .map(|&c| {
            let g: f64 = StandardNormal.sample(rng);
            c + spread * g
        })
        .collect()
}

/// Generates `k` Gaussian blobs of `cluster_size` points each (centers
/// pairwise at least `separation` apart, per-coordinate std `spread`) plus
/// `z` far-away outliers; the mask marks exactly the planted outliers.
pub fn generate_planted<F: Real>(
    k: usize,
    cluster_size: usize,
    z: usize,
    separation: f64,
    spread: f64,
    d: usize,
    seed: u64,
) -> Result<RobustInstance<F>> {
    if k == 0 || cluster_size == 0 || d == 0 {
        return Err(Error::contract(
            "generate_planted needs k >= 1, cluster_size >= 1, d >= 1".to_string(),
        ));
    }
    if !(separation > spread) {
        return Err(Error::contract(format!(
            "separation ({separation}) must exceed spread ({spread})"
        )));
    }
    let mut rng = seeded(seed);
    let blob_centers = place_separated_centers(&mut rng, k, separation, d);
    let n = k * cluster_size + z;
    let mut points = Array2::zeros((n, d));
    let mut row = 0usize;
    for center in &blob_centers {
        for _ in 0..cluster_size {
            let p = gaussian_point(&mut rng, center, spread);
            for (j, v) in p.iter().enumerate() {
                points[[row, j]] = F::from_f64_lossy(*v);
            }
            row += 1;
        }
    }
    // Outliers sit far beyond the blob layout in a random direction from the
    // centroid of the blob centers.
    let mut origin = vec![0.0; d];
    for c in &blob_centers {
        for (o, v) in origin.iter_mut().zip(c) {
            *o += v / k as f64;
        }
    }
    for _ in 0..z {
        let dir = random_unit(&mut rng, d);
        let radius = separation * (8.0 + 4.0 * rng.random::<f64>());
        for j in 0..d {
            points[[row, j]] = F::from_f64_lossy(origin[j] + radius * dir[j]);
        }
        row += 1;
    }
    let mut mask = vec![false; n];
    for m in mask.iter_mut().skip(k * cluster_size) {
        *m = true;
    }
    let data = Dataset::new(points)?
        .with_name(format!("planted-k{k}-s{cluster_size}-z{z}"))
        .with_mask(mask)?;
    RobustInstance::new(data, k, z)
}

/// Generates labeled Gaussian classes with the given sizes (class `i` gets
/// label `i`); class centers are pairwise at least `separation` apart.
pub fn generate_labeled_classes<F: Real>(
    class_sizes: &[usize],
    separation: f64,
    spread: f64,
    d: usize,
    seed: u64,
) -> Result<Dataset<F>> {
    if class_sizes.is_empty() || class_sizes.contains(&0) || d == 0 {
        return Err(Error::contract(
            "generate_labeled_classes needs nonempty positive class sizes and d >= 1".to_string(),
        ));
    }
    if !(separation > spread) {
        return Err(Error::contract(format!(
            "separation ({separation}) must exceed spread ({spread})"
        )));
    }
    let mut rng = seeded(seed);
    let k = class_sizes.len();
    // One axis per class when the dimension allows: every pair of class
    // centers sits at the same distance (separation * sqrt(2)), so no class
    // is structurally more remote than another.
    let centers: Vec<Vec<f64>> = if k <= d {
        (0..k)
            .map(|i| {
                let mut c = vec![0.0; d];
                c[i] = separation;
                c
            })
            .collect()
    } else {
        place_separated_centers(&mut rng, k, separation, d)
    };
    let n: usize = class_sizes.iter().sum();
    let mut points = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    let mut row = 0usize;
    for (class, (&size, center)) in class_sizes.iter().zip(&centers).enumerate() {
        for _ in 0..size {
            let p = gaussian_point(&mut rng, center, spread);
            for (j, v) in p.iter().enumerate() {
                points[[row, j]] = F::from_f64_lossy(*v);
            }
            labels.push(class as i64);
            row += 1;
        }
    }
    Dataset::new(points)?
        .with_name(format!("classes-{}", class_sizes.len()))
        .with_labels(labels)
}

fn random_unit(rng: &mut rand_chacha::ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
