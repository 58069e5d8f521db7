//! The batch pipelines behind each CLI verb.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use wavelet_te::baselines::{coherence_spectrogram, gc_spectrogram, gc_spectrogram_cls, Direction};
use wavelet_te::embedding::{acf, cao_e1, first_zero, ragwitz_mspe, EmbeddingSpec};
use wavelet_te::infotheory::{intraband_te, te_matrix, KnnParams, TeMatrix};
use wavelet_te::signal::{self, load_recording, notch_filter};
use wavelet_te::significance::{intraband_cls, per_band_cls, BandPairCls, SurrogateConfig};
use wavelet_te::simgen::{gen_experiment, ExperimentConfig, Modulation};
use wavelet_te::swt::{swt_decompose, IteratedFilters, SubbandDecomposition};
use wavelet_te::TimeSeries;

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::heatmap::{mask_from, LabelledMatrix};
use crate::output::Output;

/// One analysed channel pair.
pub struct Recording {
    pub stem: String,
    pub x: TimeSeries,
    pub y: TimeSeries,
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn pick<'a>(channels: &'a [TimeSeries], key: &str) -> Option<&'a TimeSeries> {
    channels
        .iter()
        .find(|c| c.label() == key)
        .or_else(|| key.parse::<usize>().ok().and_then(|i| channels.get(i)))
}

pub fn load_inputs(cfg: &Config, out: &mut Output) -> Result<Vec<Recording>> {
    if cfg.input.paths.is_empty() {
        return Err(CliError::Config("no input files (set input.paths)".into()));
    }
    let mut recs = Vec::new();
    for path in &cfg.input.paths {
        let channels = load_recording(path, cfg.input.format, cfg.input.fs)?;
        let [a, b] = &cfg.input.channels;
        let get = |k: &str| {
            pick(&channels, k).cloned().ok_or_else(|| {
                CliError::Config(format!("channel '{k}' not found in {}", path.display()))
            })
        };
        let (mut x, mut y) = (get(a)?, get(b)?);
        if cfg.preprocess.notch {
            x = notch_filter(&x, cfg.preprocess.notch_hz, cfg.preprocess.notch_bandwidth)?;
            y = notch_filter(&y, cfg.preprocess.notch_hz, cfg.preprocess.notch_bandwidth)?;
        }
        let stem = sanitize(&path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        if recs.iter().any(|r: &Recording| r.stem == stem) {
            return Err(CliError::Config(format!("two inputs share the file stem '{stem}'")));
        }
        recs.push(Recording { stem, x, y });
    }
    if cfg.preprocess.notch {
        out.convention(format!(
            "zero-phase notch at {} Hz (bandwidth {} Hz) applied to both channels",
            cfg.preprocess.notch_hz, cfg.preprocess.notch_bandwidth
        ));
    }
    Ok(recs)
}

/// Start samples of the analysis windows.
pub fn window_starts(len: usize, cfg: &Config) -> Result<Vec<usize>> {
    let (win, hop) = (cfg.segmentation.window, cfg.segmentation.hop);
    if win > len {
        return Err(CliError::Config(format!("window of {win} samples exceeds the {len}-sample recording")));
    }
    let mut starts: Vec<usize> = (0..=(len - win) / hop).map(|i| i * hop).collect();
    if cfg.segmentation.drop_final && starts.len() > 1 {
        starts.pop();
    }
    Ok(starts)
}

fn window_label(start: usize, win: usize, fs: f64) -> String {
    format!("{}", (start as f64 + win as f64 / 2.0) / fs)
}

fn direction_names(r: &Recording) -> [String; 2] {
    let (a, b) = (sanitize(r.x.label()), sanitize(r.y.label()));
    [format!("{a}_to_{b}"), format!("{b}_to_{a}")]
}

fn slice(ts: &TimeSeries, start: usize, win: usize) -> Result<TimeSeries> {
    Ok(ts.with_samples(ts.samples()[start..start + win].to_vec())?)
}

fn decompose_window(r: &Recording, start: usize, win: usize, f: &IteratedFilters) -> Result<(SubbandDecomposition, SubbandDecomposition)> {
    Ok((swt_decompose(&slice(&r.x, start, win)?, f)?, swt_decompose(&slice(&r.y, start, win)?, f)?))
}

fn surrogate_config(cfg: &Config, len: usize, r: &Recording) -> SurrogateConfig {
    SurrogateConfig {
        len,
        var_x: signal::variance(r.x.samples()),
        var_y: signal::variance(r.y.samples()),
        n: cfg.significance.n_surrogates,
        seed: cfg.significance.seed,
    }
}

fn check_level(cfg: &Config, out: &mut Output) {
    if (cfg.significance.level - 0.95).abs() > 1e-12 {
        out.convention(format!("confidence levels at the {} quantile of the surrogate distributions", cfg.significance.level));
    }
}

#[derive(Serialize)]
struct IntrabandResult<'a> {
    direction: &'a str,
    scale: usize,
    bands: &'a [String],
    window_starts: &'a [usize],
    window_len: usize,
    te: &'a [Vec<f64>],
    cl: &'a [f64],
    significant: &'a [Vec<bool>],
    n_samples: &'a [Vec<usize>],
    embedding: &'a EmbeddingSpec,
    estimator: &'a KnnParams,
    n_surrogates: usize,
}

pub fn run_intraband(cfg: &Config, out: &mut Output) -> Result<()> {
    let recs = load_inputs(cfg, out)?;
    let filters = cfg.wavelet.filters()?;
    let params = cfg.estimator.params()?;
    let win = cfg.segmentation.window;
    let fs = cfg.input.fs;
    check_level(cfg, out);
    out.convention("one surrogate ensemble per (recording, scale), shared by both directions and all windows".to_string());
    for r in &recs {
        let starts = window_starts(r.x.len(), cfg)?;
        let times: Vec<String> = starts.iter().map(|&s| window_label(s, win, fs)).collect();
        for &scale in &cfg.embedding.scales {
            let spec = cfg.embedding.spec(scale, fs, cfg.wavelet.levels)?;
            let bands: Vec<String> = spec.bands().map(str::to_string).collect();
            let dists = out.timed("intraband surrogates", |_| {
                Ok(intraband_cls(&spec, &filters, fs, &params, &surrogate_config(cfg, win, r))?)
            })?;
            let cl: Vec<f64> = dists.iter().map(|d| d.cl(cfg.significance.level)).collect();
            let per_window: Vec<[Vec<(f64, usize)>; 2]> = out.timed("intraband estimates", |_| {
                starts
                    .par_iter()
                    .map(|&s| {
                        let (dx, dy) = decompose_window(r, s, win, &filters)?;
                        let fwd = intraband_te(&dx, &dy, &spec, &params)?;
                        let back = intraband_te(&dy, &dx, &spec, &params)?;
                        let pack = |v: Vec<wavelet_te::infotheory::TeResult>| v.iter().map(|t| (t.value, t.n_samples)).collect();
                        Ok([pack(fwd), pack(back)])
                    })
                    .collect::<Result<_>>()
            })?;
            for (d, name) in direction_names(r).iter().enumerate() {
                // rows are bands, columns windows
                let te: Vec<Vec<f64>> = (0..bands.len()).map(|b| per_window.iter().map(|w| w[d][b].0).collect()).collect();
                let n: Vec<Vec<usize>> = (0..bands.len()).map(|b| per_window.iter().map(|w| w[d][b].1).collect()).collect();
                let cls: Vec<Vec<f64>> = cl.iter().map(|c| vec![*c; starts.len()]).collect();
                let sig = mask_from(&te, &cls);
                let m = LabelledMatrix { row_labels: bands.clone(), col_labels: times.clone(), values: te.clone() };
                let stem = format!("{}/intraband/s{scale}/{name}", r.stem);
                out.write_text(&format!("{stem}.csv"), &m.to_csv("band"))?;
                let clm = LabelledMatrix { row_labels: bands.clone(), col_labels: vec!["cl".into()], values: cl.iter().map(|c| vec![*c]).collect() };
                out.write_text(&format!("{stem}_cl.csv"), &clm.to_csv("band"))?;
                out.write_json(
                    &format!("{stem}.json"),
                    &IntrabandResult {
                        direction: name,
                        scale,
                        bands: &bands,
                        window_starts: &starts,
                        window_len: win,
                        te: &te,
                        cl: &cl,
                        significant: &sig,
                        n_samples: &n,
                        embedding: &spec,
                        estimator: &params,
                        n_surrogates: cfg.significance.n_surrogates,
                    },
                )?;
                if cfg.output.heatmaps {
                    let c = cfg.output.cell_size;
                    out.write_heatmap(&stem, &m, Some(&sig), (c, c), ("band", "window centre, s"))?;
                }
            }
        }
    }
    Ok(())
}

/// Window index chosen by `cfc.window` or `cfc.start_s`.
pub fn select_window(starts: &[usize], cfg: &Config) -> Result<usize> {
    if let Some(t) = cfg.cfc.start_s {
        let s = (t * cfg.input.fs).round();
        return starts
            .iter()
            .position(|&w| w as f64 == s)
            .ok_or_else(|| CliError::Config(format!("no analysis window starts at {t} s")));
    }
    let i = cfg.cfc.window.unwrap_or(0);
    if i >= starts.len() {
        return Err(CliError::Config(format!("cfc.window {i} out of range: {} windows", starts.len())));
    }
    Ok(i)
}

fn write_matrix(out: &mut Output, cfg: &Config, stem: &str, m: &TeMatrix) -> Result<()> {
    let lm = LabelledMatrix { row_labels: m.bands.clone(), col_labels: m.bands.clone(), values: m.values.clone() };
    out.write_text(&format!("{stem}.csv"), &lm.to_csv("destination"))?;
    if let Some(cls) = &m.cls {
        let cm = LabelledMatrix { values: cls.clone(), ..lm.clone() };
        out.write_text(&format!("{stem}_cl.csv"), &cm.to_csv("destination"))?;
    }
    out.write_json(&format!("{stem}.json"), m)?;
    if cfg.output.heatmaps {
        let c = cfg.output.cell_size;
        let mask = m.cls.as_ref().map(|_| m.mask());
        out.write_heatmap(stem, &lm, mask.as_deref(), (c, c), ("destination band", "source band"))?;
    }
    Ok(())
}

pub fn run_cfc(cfg: &Config, out: &mut Output) -> Result<()> {
    let recs = load_inputs(cfg, out)?;
    let filters = cfg.wavelet.filters()?;
    let params = cfg.estimator.params()?;
    let (win, fs) = (cfg.segmentation.window, cfg.input.fs);
    check_level(cfg, out);
    for r in &recs {
        let starts = window_starts(r.x.len(), cfg)?;
        let w = select_window(&starts, cfg)?;
        let (dx, dy) = decompose_window(r, starts[w], win, &filters)?;
        for &scale in &cfg.embedding.scales {
            let spec = cfg.embedding.spec(scale, fs, cfg.wavelet.levels)?;
            let cls = out.timed("cfc surrogates", |_| {
                Ok(per_band_cls(&spec, &filters, fs, &params, &surrogate_config(cfg, win, r))?)
            })?;
            let cl = cls_at(&cls, cfg.significance.level);
            let [fwd_name, back_name] = direction_names(r);
            let (fwd, back) = out.timed("cfc estimates", |_| {
                Ok((te_matrix(&dx, &dy, &spec, &params)?, te_matrix(&dy, &dx, &spec, &params)?))
            })?;
            for (name, m) in [(fwd_name, fwd), (back_name, back)] {
                let m = m.with_cls(cl.clone())?;
                write_matrix(out, cfg, &format!("{}/cfc/s{scale}/{name}", r.stem), &m)?;
            }
        }
        out.convention(format!("{}: cross-frequency window {w} starting at sample {}", r.stem, starts[w]));
    }
    Ok(())
}

fn cls_at(cls: &BandPairCls, level: f64) -> Vec<Vec<f64>> {
    cls.dists.iter().map(|r| r.iter().map(|d| d.cl(level)).collect()).collect()
}

/// Transposes `[window][freq]` to frequency rows, highest frequency first.
fn spectrogram_image(values: &[Vec<f64>], freqs: &[f64], times: &[String]) -> LabelledMatrix {
    let nf = freqs.len();
    LabelledMatrix {
        row_labels: (0..nf).rev().map(|f| freqs[f].to_string()).collect(),
        col_labels: times.to_vec(),
        values: (0..nf).rev().map(|f| values.iter().map(|w| w[f]).collect()).collect(),
    }
}

fn spectrogram_csv(values: &[Vec<f64>], freqs: &[f64], times: &[String]) -> LabelledMatrix {
    LabelledMatrix {
        row_labels: freqs.iter().map(|f| f.to_string()).collect(),
        col_labels: times.to_vec(),
        values: (0..freqs.len()).map(|f| values.iter().map(|w| w[f]).collect()).collect(),
    }
}

#[derive(Serialize)]
struct GcSummary<'a> {
    window_starts: &'a [usize],
    orders: Vec<Option<usize>>,
    masked: BTreeMap<usize, String>,
    criterion: wavelet_te::baselines::Criterion,
    m_max: usize,
    cl95_x_to_y: Option<&'a [f64]>,
    cl95_y_to_x: Option<&'a [f64]>,
    note: &'static str,
}

pub fn run_baselines(cfg: &Config, out: &mut Output) -> Result<()> {
    let recs = load_inputs(cfg, out)?;
    let (win, hop, fs) = (cfg.segmentation.window, cfg.segmentation.hop, cfg.input.fs);
    let b = &cfg.baselines;
    let freqs = b.gc_freqs()?;
    check_level(cfg, out);
    for r in &recs {
        let starts = window_starts(r.x.len(), cfg)?;
        let nw = starts.len();
        let times: Vec<String> = starts.iter().map(|&s| window_label(s, win, fs)).collect();
        let [fwd, back] = direction_names(r);

        let mut coh = out.timed("coherence", |_| Ok(coherence_spectrogram(&r.x, &r.y, win, hop, &b.welch())?))?;
        coh.values.truncate(nw);
        coh.times.truncate(nw);
        let cm = spectrogram_csv(&coh.values, &coh.freqs, &times);
        let stem = format!("{}/baselines/coherence", r.stem);
        out.write_text(&format!("{stem}.csv"), &cm.to_csv("freq_hz"))?;
        out.write_json(&format!("{stem}.json"), &coh)?;
        if cfg.output.heatmaps {
            let img = spectrogram_image(&coh.values, &coh.freqs, &times);
            let mask: Vec<Vec<bool>> = img.values.iter().map(|row| row.iter().map(|v| *v > coh.cl95).collect()).collect();
            let c = cfg.output.spectrogram_cell;
            out.write_heatmap(&stem, &img, Some(&mask), (4 * c, c), ("frequency, Hz", "window centre, s"))?;
        }

        let mut gc = out.timed("granger", |_| {
            Ok(gc_spectrogram(&r.x, &r.y, win, hop, b.var_max_order, b.criterion, &freqs)?)
        })?;
        gc.windows.truncate(nw);
        gc.times.truncate(nw);
        for w in &gc.windows {
            if let Some(e) = &w.error {
                out.warn(format!("{}: GC window at sample {} masked: {e}", r.stem, w.start));
            }
        }
        if b.gc_surrogates {
            let (to_y, to_x) = out.timed("granger surrogates", |_| {
                Ok(gc_spectrogram_cls(fs, b.var_max_order, b.criterion, &freqs, &surrogate_config(cfg, win, r))?)
            })?;
            let lvl = cfg.significance.level;
            gc = gc.with_cls(to_y.iter().map(|d| d.cl(lvl)).collect(), to_x.iter().map(|d| d.cl(lvl)).collect());
        }
        for (name, dir) in [(&fwd, Direction::XToY), (&back, Direction::YToX)] {
            let vals: Vec<Vec<f64>> = gc
                .windows
                .iter()
                .map(|w| match &w.spectrum {
                    Some(s) => match dir {
                        Direction::XToY => s.x_to_y.clone(),
                        Direction::YToX => s.y_to_x.clone(),
                    },
                    None => vec![f64::NAN; freqs.len()],
                })
                .collect();
            let stem = format!("{}/baselines/gc_{name}", r.stem);
            out.write_text(&format!("{stem}.csv"), &spectrogram_csv(&vals, &freqs, &times).to_csv("freq_hz"))?;
            let cl = match dir {
                Direction::XToY => gc.cl95_x_to_y.as_deref(),
                Direction::YToX => gc.cl95_y_to_x.as_deref(),
            };
            if let Some(cl) = cl {
                let m = LabelledMatrix {
                    row_labels: freqs.iter().map(|f| f.to_string()).collect(),
                    col_labels: vec!["cl".into()],
                    values: cl.iter().map(|c| vec![*c]).collect(),
                };
                out.write_text(&format!("{stem}_cl.csv"), &m.to_csv("freq_hz"))?;
            }
            if cfg.output.heatmaps {
                let img = spectrogram_image(&vals, &freqs, &times);
                let mask = cl.map(|cl| {
                    img.values
                        .iter()
                        .enumerate()
                        .map(|(i, row)| row.iter().map(|v| *v > cl[freqs.len() - 1 - i]).collect())
                        .collect::<Vec<Vec<bool>>>()
                });
                let c = cfg.output.spectrogram_cell;
                out.write_heatmap(&stem, &img, mask.as_deref(), (4 * c, c), ("frequency, Hz", "window centre, s"))?;
            }
        }
        out.write_json(
            &format!("{}/baselines/gc.json", r.stem),
            &GcSummary {
                window_starts: &starts,
                orders: gc.windows.iter().map(|w| w.order).collect(),
                masked: gc.windows.iter().enumerate().filter_map(|(i, w)| w.error.clone().map(|e| (i, e))).collect(),
                criterion: b.criterion,
                m_max: b.var_max_order,
                cl95_x_to_y: gc.cl95_x_to_y.as_deref(),
                cl95_y_to_x: gc.cl95_y_to_x.as_deref(),
                note: "bivariate VAR fitted by least squares; no moving-average part",
            },
        )?;
    }
    Ok(())
}

/// Detection counts of one SNR level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrRow {
    pub snr_db: f64,
    pub trials: usize,
    pub true_detected: usize,
    pub spurious_total: usize,
    /// Per-cell number of trials in which the cell was significant, `[dst][src]`.
    pub cell_hits: Vec<Vec<usize>>,
}

impl SnrRow {
    pub fn detection_rate(&self) -> f64 {
        self.true_detected as f64 / self.trials as f64
    }

    pub fn mean_spurious(&self) -> f64 {
        self.spurious_total as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMatrix {
    pub snr_db: f64,
    pub trial: usize,
    pub seed: u64,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Study {
    pub kind: Modulation,
    pub bands: Vec<String>,
    pub true_cell: (String, String),
    pub cl: Vec<Vec<f64>>,
    pub rows: Vec<SnrRow>,
    pub trials: Vec<TrialMatrix>,
}

pub fn simulation_spec(cfg: &Config) -> Result<EmbeddingSpec> {
    cfg.simulation.spec(&cfg.embedding.bands, cfg.wavelet.levels)
}

/// Surrogate ensemble for the simulation parameter set; no dependence on
/// the modulation kind.
pub fn simulation_cls(cfg: &Config) -> Result<BandPairCls> {
    let sim = &cfg.simulation;
    let len = (sim.fs * sim.duration).round() as usize;
    let sc = SurrogateConfig::new(len, cfg.significance.n_surrogates, cfg.significance.seed);
    Ok(per_band_cls(&simulation_spec(cfg)?, &cfg.wavelet.filters()?, sim.fs, &cfg.estimator.params()?, &sc)?)
}

pub fn simulation_study(cfg: &Config, kind: Modulation, cls: &BandPairCls) -> Result<Study> {
    let sim = &cfg.simulation;
    let spec = simulation_spec(cfg)?;
    let filters = cfg.wavelet.filters()?;
    let params = cfg.estimator.params()?;
    let cl = cls_at(cls, cfg.significance.level);
    let bands: Vec<String> = spec.bands().map(str::to_string).collect();
    let pos = |b: &str| bands.iter().position(|x| x == b).expect("validated band");
    let (ts, td) = (pos(&sim.true_source), pos(&sim.true_destination));
    let exp = ExperimentConfig {
        kind,
        snr_grid: sim.snr_db.clone(),
        trials_per_snr: sim.trials,
        fs: sim.fs,
        duration: sim.duration,
        seed: sim.seed,
        null_control: sim.null_control,
    };
    let trials = gen_experiment(&exp)?;
    let matrices: Vec<TeMatrix> = trials
        .par_iter()
        .map(|t| {
            let m = te_matrix(&swt_decompose(&t.x, &filters)?, &swt_decompose(&t.y, &filters)?, &spec, &params)?;
            Ok(m.with_cls(cl.clone())?)
        })
        .collect::<Result<_>>()?;
    let n = bands.len();
    let mut rows: Vec<SnrRow> = sim
        .snr_db
        .iter()
        .map(|&snr_db| SnrRow { snr_db, trials: 0, true_detected: 0, spurious_total: 0, cell_hits: vec![vec![0; n]; n] })
        .collect();
    for (t, m) in trials.iter().zip(&matrices) {
        let row = &mut rows[t.snr_index];
        row.trials += 1;
        for (d, mrow) in m.mask().iter().enumerate() {
            for (s, &hit) in mrow.iter().enumerate() {
                if hit {
                    row.cell_hits[d][s] += 1;
                    if (d, s) == (td, ts) {
                        row.true_detected += 1;
                    } else {
                        row.spurious_total += 1;
                    }
                }
            }
        }
    }
    Ok(Study {
        kind,
        true_cell: (sim.true_source.clone(), sim.true_destination.clone()),
        cl,
        rows,
        trials: trials
            .iter()
            .zip(matrices)
            .map(|(t, m)| TrialMatrix { snr_db: t.snr_db, trial: t.trial, seed: t.seed, values: m.values })
            .collect(),
        bands,
    })
}

pub fn run_simulate(cfg: &Config, out: &mut Output) -> Result<()> {
    let sim = &cfg.simulation;
    if sim.kinds.is_empty() {
        return Err(CliError::Config("simulation.kinds is empty".into()));
    }
    check_level(cfg, out);
    out.convention("one surrogate ensemble for all modulation kinds and SNRs (same parameter set)".to_string());
    if sim.null_control {
        out.convention("null control: x carries an independent message".to_string());
    }
    let cls = out.timed("simulation surrogates", |_| simulation_cls(cfg))?;
    let bands: Vec<String> = cfg.embedding.bands.clone();
    let clm = LabelledMatrix { row_labels: bands.clone(), col_labels: bands.clone(), values: cls_at(&cls, cfg.significance.level) };
    out.write_text("simulate/cl.csv", &clm.to_csv("destination"))?;
    for &kind in &sim.kinds {
        let study = out.timed("simulation estimates", |_| simulation_study(cfg, kind, &cls))?;
        let dir = format!("simulate/{kind}");
        let mut det = String::from("snr_db,trials,true_detected,detection_rate,spurious_total,mean_spurious\n");
        for r in &study.rows {
            det.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.snr_db,
                r.trials,
                r.true_detected,
                r.detection_rate(),
                r.spurious_total,
                r.mean_spurious()
            ));
        }
        out.write_text(&format!("{dir}/detection.csv"), &det)?;
        let mut tr = String::from("snr_db,trial,seed,destination,source,te,cl,significant\n");
        for t in &study.trials {
            for (d, row) in t.values.iter().enumerate() {
                for (s, v) in row.iter().enumerate() {
                    let c = study.cl[d][s];
                    tr.push_str(&format!("{},{},{},{},{},{v},{c},{}\n", t.snr_db, t.trial, t.seed, bands[d], bands[s], v > &c));
                }
            }
        }
        out.write_text(&format!("{dir}/trials.csv"), &tr)?;
        out.write_json(&format!("{dir}/study.json"), &study)?;
        if cfg.output.heatmaps {
            for (i, r) in study.rows.iter().enumerate() {
                let m = LabelledMatrix {
                    row_labels: bands.clone(),
                    col_labels: bands.clone(),
                    values: r.cell_hits.iter().map(|row| row.iter().map(|&h| h as f64 / r.trials.max(1) as f64).collect()).collect(),
                };
                let stem = format!("{dir}/detection_snr{i}");
                out.write_text(&format!("{stem}.csv"), &m.to_csv("destination"))?;
                let c = cfg.output.cell_size;
                out.write_heatmap(&stem, &m, None, (c, c), ("destination band", "source band"))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BandDiagnosis {
    channel: String,
    band: String,
    acf_first_zero: Option<usize>,
    cao_tau: usize,
    cao_dimension: Option<usize>,
    ragwitz_best_tau: usize,
    ragwitz_best_dim: usize,
}

pub fn run_diagnose(cfg: &Config, out: &mut Output) -> Result<()> {
    let recs = load_inputs(cfg, out)?;
    let filters = cfg.wavelet.filters()?;
    let d = &cfg.diagnose;
    out.convention("Cao delay = first zero of the band autocorrelation (1 if none within max_lag)".to_string());
    for r in &recs {
        let mut summary = Vec::new();
        for ts in [&r.x, &r.y] {
            let dec = swt_decompose(ts, &filters)?;
            let ch = sanitize(ts.label());
            let results: Vec<_> = cfg
                .embedding
                .bands
                .par_iter()
                .map(|band| {
                    let z = signal::zscore_slice(dec.component(band)?.samples())?;
                    let zero = first_zero(&acf(&z, d.max_lag)?);
                    let tau = zero.unwrap_or(1).max(1);
                    let cao = cao_e1(&z, tau, d.cao_d_max)?;
                    let rag = ragwitz_mspe(&z, &d.ragwitz_taus, &d.ragwitz_dims, d.ragwitz_k)?;
                    Ok((band.clone(), zero, tau, cao, rag))
                })
                .collect::<wavelet_te::Result<_>>()?;
            for (band, zero, tau, cao, rag) in results {
                let stem = format!("{}/diagnose/{ch}_{band}", r.stem);
                let mut c = String::from("d,e,e1\n");
                for (i, e) in cao.e.iter().enumerate() {
                    let e1 = cao.e1.get(i).map_or(String::new(), |v| v.to_string());
                    c.push_str(&format!("{},{e},{e1}\n", i + 1));
                }
                out.write_text(&format!("{stem}_cao.csv"), &c)?;
                let m = LabelledMatrix {
                    row_labels: rag.dims.iter().map(|v| v.to_string()).collect(),
                    col_labels: rag.taus.iter().map(|v| v.to_string()).collect(),
                    values: rag.mspe.clone(),
                };
                out.write_text(&format!("{stem}_ragwitz.csv"), &m.to_csv("dim"))?;
                summary.push(BandDiagnosis {
                    channel: ts.label().to_string(),
                    band,
                    acf_first_zero: zero,
                    cao_tau: tau,
                    cao_dimension: cao.estimated_dimension(),
                    ragwitz_best_tau: rag.best_tau,
                    ragwitz_best_dim: rag.best_dim,
                });
            }
        }
        out.write_json(&format!("{}/diagnose/summary.json", r.stem), &summary)?;
    }
    Ok(())
}
