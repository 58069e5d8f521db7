use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use wavelet_te::signal::{save_recording, Format};
use wavelet_te::significance::SurrogateConfig;
use wavelet_te::TimeSeries;
use wavelet_te_cli::heatmap::{mask_from, render_ppm, LabelledMatrix};
use wavelet_te_cli::{execute, Config, Verb};

const FS: f64 = 1024.0;
const LEN: usize = 5120;

fn white(seed: u64) -> (Vec<f64>, Vec<f64>) {
    SurrogateConfig::new(LEN + 64, 100, seed).pair(0)
}

fn line(t: usize, amp: f64) -> f64 {
    amp * (2.0 * std::f64::consts::PI * 50.0 * t as f64 / FS).sin()
}

fn save(dir: &Path, name: &str, x: Vec<f64>, y: Vec<f64>) -> PathBuf {
    let path = dir.join(name);
    save_recording(
        &path,
        Format::Csv,
        &[TimeSeries::new(x, FS, "eeg").unwrap(), TimeSeries::new(y, FS, "emg").unwrap()],
    )
    .unwrap();
    path
}

/// `x` white; `y[t] = coupling·x[t-40] + ε`. With the default 26-sample
/// interaction delay the coupled source sample sits inside the low-gamma
/// source embedding at scale 4.
fn write_pair(dir: &Path, name: &str, coupling: f64, seed: u64) -> PathBuf {
    let (ex, ey) = white(seed);
    let x: Vec<f64> = (0..LEN).map(|t| ex[t + 64]).collect();
    let y: Vec<f64> = (0..LEN).map(|t| coupling * ex[t + 64 - 40] + ey[t]).collect();
    save(dir, name, x, y)
}

/// A 20 Hz resonant AR(2) `x` driving a first-order `y` at lag 1, with a
/// shared 50 Hz line of amplitude `mains`.
fn write_var(dir: &Path, name: &str, mains: f64, seed: u64) -> PathBuf {
    let (ex, ey) = white(seed);
    let theta = 2.0 * std::f64::consts::PI * 20.0 / FS;
    let (a1, a2) = (2.0 * 0.95 * theta.cos(), -0.95 * 0.95);
    let (mut x, mut y) = (vec![0.0; LEN + 64], vec![0.0; LEN + 64]);
    for t in 2..LEN + 64 {
        x[t] = a1 * x[t - 1] + a2 * x[t - 2] + ex[t];
        y[t] = 0.5 * y[t - 1] + 0.3 * x[t - 1] + ey[t];
    }
    let x = (0..LEN).map(|t| x[t + 64] + line(t, mains)).collect();
    let y = (0..LEN).map(|t| y[t + 64] + line(t, mains)).collect();
    save(dir, name, x, y)
}

fn config(inputs: &[PathBuf], extra: &[&str]) -> Config {
    let paths: Vec<String> = inputs.iter().map(|p| format!("'{}'", p.display())).collect();
    let mut o = vec![
        format!("input.paths=[{}]", paths.join(",")),
        "input.channels=['eeg','emg']".into(),
        "significance.n_surrogates=200".into(),
        "embedding.scales=[4]".into(),
    ];
    o.extend(extra.iter().map(|s| s.to_string()));
    Config::from_toml("", &o).unwrap()
}

fn read_matrix(path: &Path) -> LabelledMatrix {
    LabelledMatrix::from_csv(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn manifest_digests_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_pair(dir.path(), "rec.csv", 3.0, 1);
    let out = dir.path().join("out");
    let m = execute(Verb::Cfc, &config(&[input], &["significance.n_surrogates=100"]), &out, false).unwrap();
    assert!(!m.files.is_empty());
    for (rel, rec) in &m.files {
        let bytes = fs::read(out.join(rel)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), rec.sha256, "{rel}");
    }
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"cfc\""));
    assert!(!manifest.contains("workers"));
}

fn hits(base: &Path, name: &str) -> Vec<usize> {
    let te = read_matrix(&base.join(format!("{name}.csv")));
    let cl = read_matrix(&base.join(format!("{name}_cl.csv")));
    te.values.iter().zip(&cl.values).map(|(row, c)| row.iter().filter(|v| **v > c[0]).count()).collect()
}

#[test]
fn intraband_coupled_pair_is_stable_across_windows() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_pair(dir.path(), "coupled.csv", 3.0, 2);
    let out = dir.path().join("out");
    execute(Verb::Intraband, &config(&[input], &["preprocess.notch=false"]), &out, false).unwrap();
    let base = out.join("coupled/intraband/s4");
    for name in ["eeg_to_emg", "emg_to_eeg"] {
        for ext in [".csv", "_cl.csv", ".json", ".ppm", ".labels.txt"] {
            assert!(base.join(format!("{name}{ext}")).exists(), "{name}{ext}");
        }
    }
    let te = read_matrix(&base.join("eeg_to_emg.csv"));
    assert_eq!(te.values.len(), 4);
    assert_eq!(te.col_labels.len(), 18);
    let fwd = hits(&base, "eeg_to_emg");
    assert!(fwd[3] >= 16, "low gamma significant in {}/18 windows", fwd[3]);
    let back: usize = hits(&base, "emg_to_eeg").iter().sum();
    assert!(back <= 8, "reverse direction significant in {back}/72 cells");
}

#[test]
fn intraband_independent_inputs_are_calibrated() {
    let dir = tempfile::tempdir().unwrap();
    let inputs: Vec<PathBuf> = (0..2).map(|i| write_pair(dir.path(), &format!("null{i}.csv"), 0.0, 10 + i)).collect();
    let out = dir.path().join("out");
    execute(Verb::Intraband, &config(&inputs, &["preprocess.notch=false", "output.heatmaps=false"]), &out, false).unwrap();
    let (mut sig, mut total) = (0, 0);
    for i in 0..2 {
        for name in ["eeg_to_emg", "emg_to_eeg"] {
            let base = out.join(format!("null{i}/intraband/s4"));
            let te = read_matrix(&base.join(format!("{name}.csv")));
            let cl = read_matrix(&base.join(format!("{name}_cl.csv")));
            for (row, c) in te.values.iter().zip(&cl.values) {
                sig += row.iter().filter(|v| **v > c[0]).count();
                total += row.len();
            }
        }
    }
    let rate = sig as f64 / total as f64;
    assert!(rate <= 0.07, "{sig}/{total} significant");
}

#[test]
fn cfc_heatmap_rerenders_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_pair(dir.path(), "rec.csv", 3.0, 3);
    let out = dir.path().join("out");
    let cfg = config(&[input], &["cfc.window=5", "significance.n_surrogates=100"]);
    execute(Verb::Cfc, &cfg, &out, false).unwrap();
    let base = out.join("rec/cfc/s4");
    let m = read_matrix(&base.join("eeg_to_emg.csv"));
    let cl = read_matrix(&base.join("eeg_to_emg_cl.csv"));
    assert_eq!(m.row_labels, vec!["delta_theta", "alpha", "beta", "low_gamma"]);
    let img = render_ppm(&m.values, Some(&mask_from(&m.values, &cl.values)), 24, 24).unwrap();
    assert_eq!(img, fs::read(base.join("eeg_to_emg.ppm")).unwrap());
    assert!(img.starts_with(b"P6\n96 96\n255\n"));
}

#[test]
fn cfc_rejects_out_of_range_window() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_pair(dir.path(), "rec.csv", 3.0, 5);
    let cfg = config(&[input], &["cfc.window=18"]);
    let e = execute(Verb::Cfc, &cfg, &dir.path().join("out"), false).unwrap_err().to_string();
    assert!(e.contains("out of range"), "{e}");
}

fn coherence_at(out: &Path, stem: &str, hz: f64) -> f64 {
    let m = read_matrix(&out.join(format!("{stem}/baselines/coherence.csv")));
    let dist = |f: &String| (f.parse::<f64>().unwrap() - hz).abs();
    let row = (0..m.row_labels.len()).min_by(|&a, &b| dist(&m.row_labels[a]).total_cmp(&dist(&m.row_labels[b]))).unwrap();
    m.values[row].iter().sum::<f64>() / m.values[row].len() as f64
}

#[test]
fn notch_removes_a_shared_line() {
    let dir = tempfile::tempdir().unwrap();
    let (ex, ey) = white(8);
    let x = (0..LEN).map(|t| ex[t] + line(t, 3.0)).collect();
    let y = (0..LEN).map(|t| ey[t] + line(t, 3.0)).collect();
    let input = save(dir.path(), "mains.csv", x, y);
    let extra = ["significance.n_surrogates=20", "baselines.gc_surrogates=false"];
    let plain = dir.path().join("plain");
    let cfg = config(std::slice::from_ref(&input), &[extra[0], extra[1], "preprocess.notch=false"]);
    execute(Verb::Baselines, &cfg, &plain, false).unwrap();
    let notched = dir.path().join("notched");
    execute(Verb::Baselines, &config(&[input], &extra), &notched, false).unwrap();
    assert!(coherence_at(&plain, "mains", 50.0) > 0.9);
    // after the notch the line bin sits at the independent-noise level
    let null = coherence_at(&notched, "mains", 100.0);
    assert!((coherence_at(&notched, "mains", 50.0) - null).abs() < 0.1);
}

#[test]
fn baselines_flag_coupling_band_and_direction() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_var(dir.path(), "rec.csv", 0.0, 6);
    let out = dir.path().join("out");
    let cfg = config(&[input], &["significance.n_surrogates=100", "baselines.var_max_order=20"]);
    execute(Verb::Baselines, &cfg, &out, false).unwrap();
    let cl = 1.0 - 0.05f64.powf(1.0 / 17.0);
    assert!(coherence_at(&out, "rec", 20.0) > 3.0 * cl);

    let above = |name: &str| {
        let m = read_matrix(&out.join(format!("rec/baselines/gc_{name}.csv")));
        let cl = read_matrix(&out.join(format!("rec/baselines/gc_{name}_cl.csv")));
        let (mut above, mut total) = (0, 0);
        for (row, c) in m.values.iter().zip(&cl.values).skip(12).take(17) {
            above += row.iter().filter(|v| **v > c[0]).count();
            total += row.len();
        }
        above as f64 / total as f64
    };
    let (fwd, back) = (above("eeg_to_emg"), above("emg_to_eeg"));
    assert!(fwd > 0.9 && back < 0.25, "forward {fwd}, reverse {back}");
    assert!(out.join("rec/baselines/gc.json").exists());
    assert!(out.join("rec/baselines/coherence.ppm").exists());
}

#[test]
fn diagnose_writes_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_pair(dir.path(), "rec.csv", 3.0, 7);
    let out = dir.path().join("out");
    execute(Verb::Diagnose, &config(&[input], &["diagnose.ragwitz_dims=[1,2,3]"]), &out, false).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("rec/diagnose/summary.json")).unwrap()).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 8);
    let rag = read_matrix(&out.join("rec/diagnose/eeg_beta_ragwitz.csv"));
    assert_eq!(rag.values.len(), 3);
    assert_eq!(rag.col_labels.len(), 6);
    assert!(out.join("rec/diagnose/emg_low_gamma_cao.csv").exists());
}

#[test]
fn binary_reports_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_wavelet-te"))
        .args(["intraband", "--set", "estimator.k=0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!status.status.success());
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_wavelet-te"))
        .args(["cfc", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("no input files"));
}
