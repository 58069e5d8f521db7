//! Nearest-neighbour entropy, conditional mutual information and transfer
//! entropy.
//!
//! All estimators use the max-norm. Conditional mutual information follows
//! the KSG "algorithm 1" counting scheme: the radius is the distance to the
//! k-th neighbour in the joint space, and marginal counts are strict.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{build_te_dataset, EmbeddingSpec, PairEmbedding, TeDataset};
use crate::error::{Error, Result};
use crate::neighbors::{count_within_2d, KdTree, NeighborSearch, PointSet, SortedLine};
use crate::rng;
use crate::signal;
use crate::swt::SubbandDecomposition;

/// Data sets smaller than this are always searched exhaustively.
pub const BRUTE_FORCE_BELOW: usize = 512;
/// Joint spaces of higher dimension are searched exhaustively; bounding
/// boxes stop pruning well before this.
pub const TREE_MAX_DIM: usize = 8;

/// Integer-argument digamma values `ψ(0..=n)`; `ψ(0)` is unused.
pub struct Digamma(Vec<f64>);

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

impl Digamma {
    pub fn up_to(n: usize) -> Self {
        let mut t = vec![f64::NAN, -EULER_GAMMA];
        for i in 1..n {
            let last = t[i];
            t.push(last + 1.0 / i as f64);
        }
        t.truncate(n + 1);
        Digamma(t)
    }

    #[inline]
    pub fn at(&self, n: usize) -> f64 {
        self.0[n]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStrategy {
    /// Tree for large, low-dimensional inputs, exhaustive otherwise.
    #[default]
    Auto,
    BruteForce,
    KdTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    /// Jitter scale relative to each column's standard deviation; applied
    /// only to columns that contain repeated values.
    pub jitter_amplitude: f64,
    pub seed: u64,
    #[serde(default)]
    pub search: SearchStrategy,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 4, jitter_amplitude: 1e-10, seed: 0, search: SearchStrategy::Auto }
    }
}

impl KnnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if !(self.jitter_amplitude >= 0.0 && self.jitter_amplitude.is_finite()) {
            return Err(Error::invalid("jitter amplitude must be finite and non-negative"));
        }
        Ok(())
    }

    fn use_tree(&self, n: usize, dim: usize) -> bool {
        match self.search {
            SearchStrategy::Auto => n >= BRUTE_FORCE_BELOW && dim <= TREE_MAX_DIM,
            SearchStrategy::BruteForce => false,
            SearchStrategy::KdTree => true,
        }
    }
}

fn has_repeats(col: &[f64]) -> bool {
    let mut v = col.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v.windows(2).any(|w| w[0] == w[1])
}

/// Adds seeded uniform jitter to every column with repeated values. The
/// stream is seeded from the column's contents, so identical columns get
/// identical jitter wherever they appear.
fn jitter(points: &PointSet, params: &KnnParams) -> PointSet {
    let mut out = points.clone();
    if params.jitter_amplitude == 0.0 {
        return out;
    }
    let dim = points.dim();
    for d in 0..dim {
        let col = points.column(d);
        if !has_repeats(&col) {
            continue;
        }
        let sd = signal::variance(&col).sqrt();
        let scale = if sd > 0.0 {
            sd
        } else {
            col.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0)
        };
        let a = params.jitter_amplitude * scale;
        let bits: Vec<u64> = col.iter().map(|v| v.to_bits()).collect();
        let mut g = rng::stream(params.seed, &bits);
        let data = out.data_mut();
        for i in 0..col.len() {
            data[i * dim + d] += a * g.random_range(-1.0..1.0);
        }
    }
    out
}

/// Kozachenko-Leonenko differential entropy in nats.
pub fn knn_entropy(points: &PointSet, params: &KnnParams) -> Result<f64> {
    params.validate()?;
    let n = points.len();
    if n <= params.k {
        return Err(Error::invalid(format!("need more than k={} points, got {n}", params.k)));
    }
    let pts = jitter(points, params);
    let eps: Vec<f64> = if params.use_tree(n, pts.dim()) {
        let tree = KdTree::build(&pts);
        (0..n).map(|i| tree.kth_distance(pts.row(i), params.k, i)).collect()
    } else {
        let brute = crate::neighbors::BruteForce::new(&pts);
        (0..n).map(|i| brute.kth_distance(pts.row(i), params.k, i)).collect()
    };
    if let Some(row) = eps.iter().position(|&e| e <= 0.0) {
        return Err(Error::ZeroDistance { row });
    }
    let psi = Digamma::up_to(n);
    let dim = pts.dim() as f64;
    let mean_log = eps.iter().map(|e| e.ln()).sum::<f64>() / n as f64;
    Ok(psi.at(n) - psi.at(params.k) + dim * std::f64::consts::LN_2 + dim * mean_log)
}

/// Neighbour counts for one row: joint radius and strict counts in the
/// (x,z), (y,z) and z subspaces.
#[derive(Clone, Copy)]
struct Counts {
    n_xz: usize,
    n_yz: usize,
    n_z: usize,
}

/// Column-major copy for vectorized distance sweeps.
fn columns(p: &PointSet) -> Vec<Vec<f64>> {
    (0..p.dim()).map(|d| p.column(d)).collect()
}

/// `dist[j] = max(dist[j], max_d |cols[d][j] - q[d]|)`.
#[inline]
fn sweep(dist: &mut [f64], cols: &[Vec<f64>], q: impl Fn(usize) -> f64) {
    for (d, c) in cols.iter().enumerate() {
        let qd = q(d);
        for (m, &v) in dist.iter_mut().zip(c) {
            let a = (v - qd).abs();
            *m = if a > *m { a } else { *m };
        }
    }
}

fn counts_brute(
    x: &PointSet,
    y: &PointSet,
    z: Option<&PointSet>,
    k: usize,
) -> Result<Vec<Counts>> {
    let n = x.len();
    let (cx, cy) = (columns(x), columns(y));
    let cz = z.map(columns).unwrap_or_default();
    let mut dx = vec![0.0; n];
    let mut dy = vec![0.0; n];
    let mut dz = vec![0.0; n];
    let mut best = Vec::with_capacity(k + 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        dx.fill(0.0);
        dy.fill(0.0);
        dz.fill(0.0);
        sweep(&mut dx, &cx, |d| cx[d][i]);
        sweep(&mut dy, &cy, |d| cy[d][i]);
        sweep(&mut dz, &cz, |d| cz[d][i]);
        // k smallest joint distances, ascending
        best.clear();
        best.resize(k, f64::INFINITY);
        for j in (0..n).filter(|&j| j != i) {
            let d = dx[j].max(dy[j]).max(dz[j]);
            if d < best[k - 1] {
                let pos = best.partition_point(|&b| b <= d);
                best.insert(pos, d);
                best.pop();
            }
        }
        let eps = best[k - 1];
        if eps <= 0.0 {
            return Err(Error::ZeroDistance { row: i });
        }
        // row i sits at distance zero in every subspace and is always counted
        let (mut n_xz, mut n_yz, mut n_z) = (0usize, 0usize, 0usize);
        for j in 0..n {
            let c = dz[j];
            n_xz += usize::from(dx[j].max(c) < eps);
            n_yz += usize::from(dy[j].max(c) < eps);
            n_z += usize::from(c < eps);
        }
        out.push(Counts { n_xz: n_xz - 1, n_yz: n_yz - 1, n_z: n_z - 1 });
    }
    Ok(out)
}

/// Strict radius counts in one marginal subspace, excluding each row:
/// binary search in one dimension, an offline sweep in two and k-d tree
/// queries (issued in `order`) above that.
fn marginal_counts(points: &PointSet, radii: &[f64], order: &[usize]) -> Vec<usize> {
    match points.dim() {
        1 => {
            let line = SortedLine::build(points);
            (0..points.len()).map(|i| line.count_within(points.row(i)[0], radii[i], i)).collect()
        }
        2 => count_within_2d(points, radii),
        _ => {
            let tree = KdTree::build(points);
            let mut out = vec![0; points.len()];
            for &i in order {
                out[i] = tree.count_within(points.row(i), radii[i], i);
            }
            out
        }
    }
}

fn counts_tree(
    x: &PointSet,
    y: &PointSet,
    z: Option<&PointSet>,
    k: usize,
) -> Result<Vec<Counts>> {
    let n = x.len();
    let joint = match z {
        Some(z) => PointSet::hstack(&[x, y, z]),
        None => PointSet::hstack(&[x, y]),
    };
    let t_joint = KdTree::build(&joint);
    let order = t_joint.order();
    let mut eps = vec![0.0; n];
    for &i in order {
        eps[i] = t_joint.row_kth_distance(i, k);
        if eps[i] <= 0.0 {
            return Err(Error::ZeroDistance { row: i });
        }
    }
    let (n_xz, n_yz, n_z) = match z {
        Some(z) => (
            marginal_counts(&PointSet::hstack(&[x, z]), &eps, order),
            marginal_counts(&PointSet::hstack(&[y, z]), &eps, order),
            marginal_counts(z, &eps, order),
        ),
        None => (marginal_counts(x, &eps, order), marginal_counts(y, &eps, order), vec![n - 1; n]),
    };
    Ok((0..n).map(|i| Counts { n_xz: n_xz[i], n_yz: n_yz[i], n_z: n_z[i] }).collect())
}

/// KSG conditional mutual information `I(x; y | z)` in nats; with `z`
/// absent this is the KSG mutual information. Estimates are not clipped
/// at zero.
pub fn ksg_cmi(x: &PointSet, y: &PointSet, z: Option<&PointSet>, params: &KnnParams) -> Result<f64> {
    params.validate()?;
    let n = x.len();
    if y.len() != n || z.is_some_and(|z| z.len() != n) {
        return Err(Error::RowMismatch(format!(
            "x has {n} rows, y {}, z {}",
            y.len(),
            z.map_or(n, |z| z.len())
        )));
    }
    if n <= params.k {
        return Err(Error::invalid(format!("need more than k={} rows, got {n}", params.k)));
    }
    let (x, y) = (jitter(x, params), jitter(y, params));
    let z = z.map(|z| jitter(z, params));
    let dim = x.dim() + y.dim() + z.as_ref().map_or(0, |z| z.dim());
    let counts = if params.use_tree(n, dim) {
        counts_tree(&x, &y, z.as_ref(), params.k)?
    } else {
        counts_brute(&x, &y, z.as_ref(), params.k)?
    };
    let psi = Digamma::up_to(n);
    let mean = counts
        .iter()
        .map(|c| psi.at(c.n_xz + 1) + psi.at(c.n_yz + 1) - psi.at(c.n_z + 1))
        .sum::<f64>()
        / n as f64;
    Ok(psi.at(params.k) - mean)
}

/// KSG mutual information `I(x; y)`.
pub fn ksg_mi(x: &PointSet, y: &PointSet, params: &KnnParams) -> Result<f64> {
    ksg_cmi(x, y, None, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeResult {
    /// Nats.
    pub value: f64,
    pub n_samples: usize,
    pub params: KnnParams,
    pub embedding: PairEmbedding,
}

/// `TE = I(x⁻; y | y⁻)` on a prepared data set.
pub fn transfer_entropy(ds: &TeDataset, params: &KnnParams) -> Result<TeResult> {
    let target = PointSet::new(ds.target_next.clone(), 1);
    let value = ksg_cmi(&ds.source_past, &target, Some(&ds.target_past), params)?;
    Ok(TeResult { value, n_samples: ds.len(), params: *params, embedding: ds.params })
}

/// Standardizes both series, embeds them and estimates TE.
pub fn transfer_entropy_between(
    src: &[f64],
    dst: &[f64],
    embedding: &PairEmbedding,
    params: &KnnParams,
) -> Result<TeResult> {
    let ds = build_te_dataset(&signal::zscore_slice(src)?, &signal::zscore_slice(dst)?, embedding)?;
    transfer_entropy(&ds, params)
}

/// Band-pair TE values; `values[dst][src]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeMatrix {
    pub bands: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub n_samples: Vec<Vec<usize>>,
    /// Per-cell 95% confidence levels, same layout as `values`.
    pub cls: Option<Vec<Vec<f64>>>,
    pub metadata: TeMetadata,
}

/// Estimator settings recorded alongside every matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeMetadata {
    pub estimator: String,
    pub k: usize,
    pub jitter_amplitude: f64,
    pub seed: u64,
    pub standardized: bool,
    pub dim: usize,
    pub interaction_delay: usize,
    pub delays: Vec<(String, usize)>,
}

impl TeMatrix {
    pub fn get(&self, src: &str, dst: &str) -> Result<f64> {
        let (s, d) = (self.position(src)?, self.position(dst)?);
        Ok(self.values[d][s])
    }

    pub fn cl(&self, src: &str, dst: &str) -> Result<Option<f64>> {
        let (s, d) = (self.position(src)?, self.position(dst)?);
        Ok(self.cls.as_ref().map(|c| c[d][s]))
    }

    pub fn position(&self, band: &str) -> Result<usize> {
        self.bands.iter().position(|b| b == band).ok_or_else(|| Error::UnknownBand(band.into()))
    }

    pub fn with_cls(mut self, cls: Vec<Vec<f64>>) -> Result<Self> {
        let n = self.bands.len();
        if cls.len() != n || cls.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(format!("confidence levels must be {n}x{n}")));
        }
        self.cls = Some(cls);
        Ok(self)
    }

    /// Whether `(src → dst)` exceeds its confidence level; `None` without CLs.
    pub fn is_significant(&self, src: &str, dst: &str) -> Result<Option<bool>> {
        let v = self.get(src, dst)?;
        Ok(self.cl(src, dst)?.map(|c| v > c))
    }

    /// Significance mask `[dst][src]`; all false without CLs.
    pub fn mask(&self) -> Vec<Vec<bool>> {
        match &self.cls {
            Some(c) => self
                .values
                .iter()
                .zip(c)
                .map(|(vr, cr)| vr.iter().zip(cr).map(|(v, c)| v > c).collect())
                .collect(),
            None => vec![vec![false; self.bands.len()]; self.bands.len()],
        }
    }

    /// Rows are destination bands, columns source bands.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("destination");
        for b in &self.bands {
            s.push(',');
            s.push_str(b);
        }
        s.push('\n');
        for (b, row) in self.bands.iter().zip(&self.values) {
            s.push_str(b);
            for v in row {
                s.push(',');
                s.push_str(&v.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }
}

fn standardized_bands(dec: &SubbandDecomposition, bands: &[String]) -> Result<Vec<Vec<f64>>> {
    bands
        .iter()
        .map(|b| {
            let c = dec.component(b).map_err(|_| Error::MissingBand(b.clone()))?;
            signal::zscore_slice(c.samples())
        })
        .collect()
}

fn check_lengths(src: &SubbandDecomposition, dst: &SubbandDecomposition) -> Result<()> {
    if src.len() != dst.len() {
        return Err(Error::RowMismatch(format!(
            "source decomposition has {} samples, destination {}",
            src.len(),
            dst.len()
        )));
    }
    Ok(())
}

/// TE for every (source band, destination band) pair of the schedule. Each
/// component is standardized before embedding.
pub fn te_matrix(
    src: &SubbandDecomposition,
    dst: &SubbandDecomposition,
    spec: &EmbeddingSpec,
    params: &KnnParams,
) -> Result<TeMatrix> {
    check_lengths(src, dst)?;
    let bands: Vec<String> = spec.bands().map(str::to_string).collect();
    let (xs, ys) = (standardized_bands(src, &bands)?, standardized_bands(dst, &bands)?);
    let n = bands.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|d| (0..n).map(move |s| (d, s))).collect();
    let results: Vec<TeResult> = cells
        .par_iter()
        .map(|&(d, s)| {
            let p = spec.pair(&bands[s], &bands[d])?;
            transfer_entropy(&build_te_dataset(&xs[s], &ys[d], &p)?, params)
        })
        .collect::<Result<_>>()?;
    let mut values = vec![vec![0.0; n]; n];
    let mut counts = vec![vec![0; n]; n];
    for (&(d, s), r) in cells.iter().zip(&results) {
        values[d][s] = r.value;
        counts[d][s] = r.n_samples;
    }
    Ok(TeMatrix {
        bands,
        values,
        n_samples: counts,
        cls: None,
        metadata: TeMetadata::new(spec, params),
    })
}

/// Same-band TE for each band of the schedule, in schedule order.
pub fn intraband_te(
    src: &SubbandDecomposition,
    dst: &SubbandDecomposition,
    spec: &EmbeddingSpec,
    params: &KnnParams,
) -> Result<Vec<TeResult>> {
    check_lengths(src, dst)?;
    let bands: Vec<String> = spec.bands().map(str::to_string).collect();
    let (xs, ys) = (standardized_bands(src, &bands)?, standardized_bands(dst, &bands)?);
    (0..bands.len())
        .into_par_iter()
        .map(|b| {
            let p = spec.pair(&bands[b], &bands[b])?;
            transfer_entropy(&build_te_dataset(&xs[b], &ys[b], &p)?, params)
        })
        .collect()
}

impl TeMetadata {
    pub fn new(spec: &EmbeddingSpec, params: &KnnParams) -> Self {
        TeMetadata {
            estimator: "KSG algorithm 1, max-norm".into(),
            k: params.k,
            jitter_amplitude: params.jitter_amplitude,
            seed: params.seed,
            standardized: true,
            dim: spec.dim(),
            interaction_delay: spec.interaction_delay(),
            delays: spec.delays(),
        }
    }
}

/// TE as a function of the interaction delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayScan {
    pub grid: Vec<usize>,
    pub te: Vec<f64>,
    pub best_u: usize,
}

impl DelayScan {
    pub fn max_te(&self) -> f64 {
        self.te.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether the peak exceeds a confidence level.
    pub fn is_significant(&self, cl: f64) -> bool {
        self.max_te() > cl
    }
}

/// Maximizes TE over `u_grid`, ties going to the smallest `u`. The
/// `u` field of `embedding` is ignored.
pub fn estimate_interaction_delay(
    src: &[f64],
    dst: &[f64],
    embedding: &PairEmbedding,
    u_grid: &[usize],
    params: &KnnParams,
) -> Result<DelayScan> {
    if u_grid.is_empty() {
        return Err(Error::invalid("delay grid must be non-empty"));
    }
    let (x, y) = (signal::zscore_slice(src)?, signal::zscore_slice(dst)?);
    let te: Vec<f64> = u_grid
        .par_iter()
        .map(|&u| {
            let p = PairEmbedding { u, ..*embedding };
            Ok(transfer_entropy(&build_te_dataset(&x, &y, &p)?, params)?.value)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for i in 1..te.len() {
        if te[i] > te[best] || (te[i] == te[best] && u_grid[i] < u_grid[best]) {
            best = i;
        }
    }
    Ok(DelayScan { grid: u_grid.to_vec(), te, best_u: u_grid[best] })
}
