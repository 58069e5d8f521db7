//! Binary PPM heatmaps with a fixed colour ramp.
//!
//! Values are divided by the largest displayed value and mapped through
//! the ramp below. Cells that are not significant take the floor colour;
//! non-finite cells (masked windows) are black. Row 0 is the top row.

use crate::error::{CliError, Result};

/// `(position, r, g, b)` stops, linearly interpolated.
pub const RAMP: [(f64, [u8; 3]); 5] = [
    (0.00, [0, 0, 96]),
    (0.25, [0, 96, 255]),
    (0.50, [0, 224, 160]),
    (0.75, [255, 224, 0]),
    (1.00, [200, 0, 0]),
];
pub const FLOOR: [u8; 3] = RAMP[0].1;
pub const MASKED: [u8; 3] = [0, 0, 0];

pub fn ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    for w in RAMP.windows(2) {
        let ((p0, c0), (p1, c1)) = (w[0], w[1]);
        if t <= p1 {
            let f = (t - p0) / (p1 - p0);
            let mut out = [0u8; 3];
            for i in 0..3 {
                out[i] = (c0[i] as f64 + f * (c1[i] as f64 - c0[i] as f64)).round() as u8;
            }
            return out;
        }
    }
    RAMP[RAMP.len() - 1].1
}

/// Renders `values[row][col]`; `significant`, when given, has the same shape.
pub fn render_ppm(
    values: &[Vec<f64>],
    significant: Option<&[Vec<bool>]>,
    cell_w: usize,
    cell_h: usize,
) -> Result<Vec<u8>> {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || cell_w == 0 || cell_h == 0 {
        return Err(CliError::Config("heatmap needs at least one cell and a positive cell size".into()));
    }
    if values.iter().any(|r| r.len() != cols) {
        return Err(CliError::Config("heatmap rows differ in length".into()));
    }
    if let Some(m) = significant {
        if m.len() != rows || m.iter().any(|r| r.len() != cols) {
            return Err(CliError::Config("significance mask does not match the matrix".into()));
        }
    }
    let shown = |r: usize, c: usize| significant.is_none_or(|m| m[r][c]);
    let mut vmax = 0.0f64;
    for (r, row) in values.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if v.is_finite() && shown(r, c) {
                vmax = vmax.max(*v);
            }
        }
    }
    let colour = |r: usize, c: usize| -> [u8; 3] {
        let v = values[r][c];
        if !v.is_finite() {
            MASKED
        } else if !shown(r, c) || vmax <= 0.0 {
            FLOOR
        } else {
            ramp(v / vmax)
        }
    };
    let (w, h) = (cols * cell_w, rows * cell_h);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h * 3);
    for r in 0..rows {
        let line: Vec<u8> = (0..cols).flat_map(|c| std::iter::repeat_n(colour(r, c), cell_w)).flatten().collect();
        for _ in 0..cell_h {
            out.extend_from_slice(&line);
        }
    }
    Ok(out)
}

/// Sidecar text naming the rows, columns and colour convention.
pub fn labels_sidecar(rows: &[String], cols: &[String], row_axis: &str, col_axis: &str) -> String {
    let mut s = format!("rows ({row_axis}, top to bottom): {}\n", rows.join(", "));
    s.push_str(&format!("columns ({col_axis}, left to right): {}\n", cols.join(", ")));
    s.push_str("colour: value / max displayed value through ramp");
    for (p, c) in RAMP {
        s.push_str(&format!(" {p}:#{:02x}{:02x}{:02x}", c[0], c[1], c[2]));
    }
    s.push_str("; below confidence level = floor colour; masked = black\n");
    s
}

/// A labelled matrix as written by the pipelines: first header cell is the
/// row-axis name, then column labels; each row starts with its label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl LabelledMatrix {
    pub fn to_csv(&self, corner: &str) -> String {
        let mut s = String::from(corner);
        for c in &self.col_labels {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.values) {
            s.push_str(label);
            for v in row {
                s.push(',');
                s.push_str(&v.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<LabelledMatrix> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| CliError::Config("empty matrix csv".into()))?;
        let col_labels: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
        let mut row_labels = Vec::new();
        let mut values = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let mut cells = line.split(',');
            row_labels.push(cells.next().unwrap_or_default().to_string());
            let row: Vec<f64> = cells
                .map(|c| c.parse::<f64>().map_err(|_| CliError::Config(format!("bad number '{c}' in matrix csv"))))
                .collect::<Result<_>>()?;
            if row.len() != col_labels.len() {
                return Err(CliError::Config("ragged matrix csv".into()));
            }
            values.push(row);
        }
        Ok(LabelledMatrix { row_labels, col_labels, values })
    }
}

/// `value > cl` cell by cell.
pub fn mask_from(values: &[Vec<f64>], cls: &[Vec<f64>]) -> Vec<Vec<bool>> {
    values.iter().zip(cls).map(|(v, c)| v.iter().zip(c).map(|(v, c)| v > c).collect()).collect()
}
