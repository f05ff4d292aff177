//! The law-school rank experiment: fit OLS of ZFYA on race, sex, LSAT and
//! UGPA on half of the data, post-process the fitted values and the true
//! outcome with the empirical quantile repair, and compare the rankings of
//! a small test subgroup under four scorings.
//!
//! The real `law_data.csv` is read by [`load_csv`] when available;
//! [`synth_lawschool`] generates a low signal-to-noise stand-in otherwise.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repair::{fit_repair, RepairMode};
use crate::rng::{seeded, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub race: String,
    pub sex: String,
    pub lsat: f64,
    pub ugpa: f64,
    pub zfya: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub rows: Vec<LawRow>,
}

pub const COLUMNS: [&str; 5] = ["race", "sex", "LSAT", "UGPA", "ZFYA"];

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Value of a categorical column (`race` or `sex`, any case).
    pub fn categorical(&self, row: usize, column: &str) -> Result<&str> {
        let r = &self.rows[row];
        match column.to_ascii_lowercase().as_str() {
            "race" => Ok(&r.race),
            "sex" => Ok(&r.sex),
            _ => Err(Error::input(format!("`{column}` is not a categorical column (race, sex)"))),
        }
    }

    pub fn select(&self, idx: &[usize]) -> Dataset {
        Dataset { rows: idx.iter().map(|&i| self.rows[i].clone()).collect() }
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    read_csv(File::open(path).map_err(Error::at_path(path))?)
}

/// Reads the five used columns by case-insensitive header name; other
/// columns are ignored.
pub fn read_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let headers = reader.headers()?.clone();
    let mut positions = [0usize; 5];
    for (slot, name) in positions.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Schema(name.to_string()))?;
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let record = record?;
        let field = |k: usize| record.get(positions[k]).unwrap_or("").trim();
        let text = |k: usize| -> Result<String> {
            let v = field(k);
            if v.is_empty() {
                return Err(Error::Row { line, message: format!("empty `{}`", COLUMNS[k]) });
            }
            Ok(v.trim_matches('"').to_string())
        };
        let number = |k: usize| -> Result<f64> {
            let v = field(k);
            v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::Row {
                line,
                message: format!("cannot parse `{}` value {v:?} as a number", COLUMNS[k]),
            })
        };
        rows.push(LawRow { race: text(0)?, sex: text(1)?, lsat: number(2)?, ugpa: number(3)?, zfya: number(4)? });
    }
    Ok(Dataset { rows })
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_csv(data, File::create(path).map_err(Error::at_path(path))?)
}

pub fn write_csv<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in &data.rows {
        w.write_record([r.race.clone(), r.sex.clone(), r.lsat.to_string(), r.ugpa.to_string(), r.zfya.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Noise level of the synthetic outcome; gives an in-sample OLS R^2 of
/// about 0.2 on large samples.
pub const SYNTH_DEFAULT_NOISE_SD: f64 = 0.9;

const SYNTH_RACES: [(&str, f64, f64); 5] = [
    // level, probability, mean LSAT
    ("Asian", 0.08, 36.0),
    ("Black", 0.12, 29.0),
    ("Hispanic", 0.08, 32.0),
    ("Other", 0.04, 34.0),
    ("White", 0.68, 37.0),
];
const SYNTH_RACE_EFFECT: [f64; 5] = [0.0, -0.3, -0.15, -0.1, 0.05];
const SYNTH_MALE_EFFECT: f64 = 0.05;
const SYNTH_INTERCEPT: f64 = -3.2;
const SYNTH_LSAT: f64 = 0.07;
const SYNTH_UGPA: f64 = 0.3;

/// The generating coefficients of [`synth_lawschool`], in the column layout
/// [`ols_fit`] produces for a dataset containing every level.
pub fn synth_generating_model() -> LinearModel {
    let design = DesignSpec {
        race_levels: SYNTH_RACES.iter().map(|r| r.0.to_string()).collect(),
        sex_levels: vec!["Female".into(), "Male".into()],
    };
    let mut coefficients = vec![SYNTH_INTERCEPT];
    coefficients.extend(&SYNTH_RACE_EFFECT[1..]);
    coefficients.extend([SYNTH_MALE_EFFECT, SYNTH_LSAT, SYNTH_UGPA]);
    let p = coefficients.len();
    LinearModel {
        columns: design.columns(),
        coefficients,
        standard_errors: vec![0.0; p],
        r_squared: f64::NAN,
        n: 0,
        design,
    }
}

/// Categorical race and sex, correlated LSAT and UGPA, and
/// `ZFYA = linear signal + N(0, noise_sd^2)`.
pub fn synth_lawschool(n: usize, seed: u64, noise_sd: f64) -> Result<Dataset> {
    if n < 10 {
        return Err(Error::input("synthetic dataset needs n >= 10"));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::input("noise_sd must be finite and non-negative"));
    }
    let mut rng = seeded(seed);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rand::Rng::random(&mut rng);
        let mut k = 0;
        let mut acc = SYNTH_RACES[0].1;
        while u >= acc && k + 1 < SYNTH_RACES.len() {
            k += 1;
            acc += SYNTH_RACES[k].1;
        }
        let male = rand::Rng::random_bool(&mut rng, 0.55);
        let lsat = SYNTH_RACES[k].2 + 5.0 * std.sample(&mut rng);
        let ugpa = 3.2 + 0.03 * (lsat - 35.0) + 0.35 * std.sample(&mut rng);
        let signal = SYNTH_INTERCEPT
            + SYNTH_RACE_EFFECT[k]
            + if male { SYNTH_MALE_EFFECT } else { 0.0 }
            + SYNTH_LSAT * lsat
            + SYNTH_UGPA * ugpa;
        let noise = noise_sd * std.sample(&mut rng);
        rows.push(LawRow {
            race: SYNTH_RACES[k].0.to_string(),
            sex: if male { "Male" } else { "Female" }.to_string(),
            lsat,
            ugpa,
            zfya: signal + noise,
        });
    }
    Ok(Dataset { rows })
}

/// One-hot layout: intercept, race levels but the first, sex levels but the
/// first, LSAT, UGPA. Levels are sorted, so the alphabetically first one is
/// the reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub race_levels: Vec<String>,
    pub sex_levels: Vec<String>,
}

impl DesignSpec {
    pub fn from_data(data: &Dataset) -> Self {
        let race: BTreeSet<&str> = data.rows.iter().map(|r| r.race.as_str()).collect();
        let sex: BTreeSet<&str> = data.rows.iter().map(|r| r.sex.as_str()).collect();
        Self {
            race_levels: race.into_iter().map(String::from).collect(),
            sex_levels: sex.into_iter().map(String::from).collect(),
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["(Intercept)".to_string()];
        cols.extend(self.race_levels.iter().skip(1).map(|l| format!("race{l}")));
        cols.extend(self.sex_levels.iter().skip(1).map(|l| format!("sex{l}")));
        cols.push("LSAT".into());
        cols.push("UGPA".into());
        cols
    }

    pub fn row(&self, r: &LawRow) -> Result<Vec<f64>> {
        let mut x = vec![1.0];
        one_hot(&mut x, &self.race_levels, &r.race, "race")?;
        one_hot(&mut x, &self.sex_levels, &r.sex, "sex")?;
        x.push(r.lsat);
        x.push(r.ugpa);
        Ok(x)
    }

    pub fn matrix(&self, data: &Dataset) -> Result<DMatrix<f64>> {
        let p = self.columns().len();
        let mut values = Vec::with_capacity(data.len() * p);
        for r in &data.rows {
            values.extend(self.row(r)?);
        }
        Ok(DMatrix::from_row_slice(data.len(), p, &values))
    }
}

fn one_hot(x: &mut Vec<f64>, levels: &[String], value: &str, column: &str) -> Result<()> {
    let k = levels
        .iter()
        .position(|l| l == value)
        .ok_or_else(|| Error::input(format!("{column} level `{value}` was not seen when fitting")))?;
    x.extend((1..levels.len()).map(|j| if j == k { 1.0 } else { 0.0 }));
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub design: DesignSpec,
    pub columns: Vec<String>,
    /// First entry is the intercept.
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub r_squared: f64,
    pub n: usize,
}

impl LinearModel {
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn coefficient(&self, column: &str) -> Option<f64> {
        self.columns.iter().position(|c| c == column).map(|k| self.coefficients[k])
    }

    pub fn predict_row(&self, r: &LawRow) -> Result<f64> {
        Ok(self.design.row(r)?.iter().zip(&self.coefficients).map(|(x, b)| x * b).sum())
    }

    pub fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        data.rows.iter().map(|r| self.predict_row(r)).collect()
    }
}

/// Least squares of ZFYA on race + sex + LSAT + UGPA via Householder QR.
pub fn ols_fit(data: &Dataset) -> Result<LinearModel> {
    let design = DesignSpec::from_data(data);
    let columns = design.columns();
    let p = columns.len();
    let n = data.len();
    if n < p + 1 {
        return Err(Error::Fit(format!("{n} rows cannot fit {p} design columns")));
    }
    let x = design.matrix(data)?;
    let y = DVector::from_iterator(n, data.rows.iter().map(|r| r.zfya));

    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|j| x.column(j).norm()).fold(0.0, f64::max);
    let collinear: Vec<&str> = (0..p)
        .filter(|&j| r[(j, j)].abs() <= 1e-10 * scale.max(1.0))
        .map(|j| columns[j].as_str())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::Fit(format!("rank-deficient design; collinear columns: {}", collinear.join(", "))));
    }
    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Fit("triangular solve failed".into()))?;

    let residuals = &y - &x * &beta;
    let rss = residuals.norm_squared();
    let y_mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let sigma2 = rss / (n - p) as f64;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Fit("triangular inverse failed".into()))?;
    // diag((X'X)^-1) = row norms of R^-1
    let standard_errors = (0..p).map(|j| (sigma2 * r_inv.row(j).norm_squared()).sqrt()).collect();

    Ok(LinearModel {
        design,
        columns,
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 1.0 },
        n,
    })
}

/// Average ranks, 1-based.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let order = sorted_order(xs);
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Ranks with ties broken by position, 1-based (a permutation of `1..=n`).
pub fn first_occurrence_ranks(xs: &[f64]) -> Vec<usize> {
    let mut ranks = vec![0; xs.len()];
    for (r, &k) in sorted_order(xs).iter().enumerate() {
        ranks[k] = r + 1;
    }
    ranks
}

fn sorted_order(xs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    order
}

/// Pearson correlation of the average-rank vectors.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::input(format!("length mismatch: {} vs {}", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::input("spearman needs at least two pairs"));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::input("spearman input contains NaN"));
    }
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let (mx, my) = (crate::stats::mean(&rx), crate::stats::mean(&ry));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::input("spearman is undefined for constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub const RANK_METHODS: [&str; 4] = ["True", "Listing2T", "Listing2F", "Full"];

/// Rows are methods from the bottom of the plot to the top; column `j` of
/// every row refers to the same unit, and columns are sorted by the bottom
/// row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankGrid {
    pub method_names: Vec<String>,
    pub units: Vec<usize>,
    pub ranks: Vec<Vec<usize>>,
}

impl RankGrid {
    /// Build from per-method scores over the same units.
    pub fn from_scores(method_names: &[&str], units: &[usize], scores: &[Vec<f64>]) -> Result<Self> {
        if method_names.len() != scores.len() || method_names.is_empty() {
            return Err(Error::input("one score vector per method is required"));
        }
        if scores.iter().any(|s| s.len() != units.len()) {
            return Err(Error::input("every method must score every unit"));
        }
        let raw: Vec<Vec<usize>> = scores.iter().map(|s| first_occurrence_ranks(s)).collect();
        let mut order: Vec<usize> = (0..units.len()).collect();
        order.sort_by_key(|&k| raw[0][k]);
        Ok(Self {
            method_names: method_names.iter().map(|s| s.to_string()).collect(),
            units: order.iter().map(|&k| units[k]).collect(),
            ranks: raw.iter().map(|row| order.iter().map(|&k| row[k]).collect()).collect(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.units.len();
        if self.ranks.len() != self.method_names.len() {
            return Err(Error::input("rank grid has mismatched row labels"));
        }
        for (name, row) in self.method_names.iter().zip(&self.ranks) {
            let mut seen = vec![false; n + 1];
            if row.len() != n || row.iter().any(|&r| r == 0 || r > n || std::mem::replace(&mut seen[r], true)) {
                return Err(Error::input(format!("row `{name}` is not a permutation of 1..{n}")));
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.units.len() * self.ranks.len()
    }

    pub fn n_segments(&self) -> usize {
        self.units.len() * self.ranks.len().saturating_sub(1)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["unit".to_string()];
        header.extend(self.method_names.iter().cloned());
        w.write_record(&header)?;
        for (j, unit) in self.units.iter().enumerate() {
            let mut rec = vec![unit.to_string()];
            rec.extend(self.ranks.iter().map(|row| row[j].to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

const CELL: f64 = 20.0;
const ROW_GAP: f64 = 80.0;
const LEFT: f64 = 100.0;
const TOP: f64 = 30.0;

/// Self-contained SVG: one circle per (unit, method), one line per unit and
/// pair of consecutive rows.
pub fn render_rank_plot(grid: &RankGrid) -> Result<String> {
    grid.validate()?;
    let n = grid.units.len();
    let m = grid.ranks.len();
    let width = LEFT + CELL * (n as f64 + 1.0);
    let height = 2.0 * TOP + ROW_GAP * (m as f64 - 1.0) + 30.0;
    let x = |rank: usize| LEFT + CELL * rank as f64;
    let y = |row: usize| TOP + ROW_GAP * (m - 1 - row) as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, name) in grid.method_names.iter().enumerate() {
        let _ = writeln!(svg, r#"<text x="10" y="{}" dominant-baseline="middle">{}</text>"#, y(i), escape(name));
    }
    let _ = writeln!(svg, r#"<g stroke="black" stroke-width="1">"#);
    for j in 0..n {
        for i in 0..m - 1 {
            let _ = writeln!(
                svg,
                r#"<line class="link" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                x(grid.ranks[i][j]),
                y(i),
                x(grid.ranks[i + 1][j]),
                y(i + 1)
            );
        }
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g fill="white" stroke="black">"#);
    for (i, row) in grid.ranks.iter().enumerate() {
        for &r in row {
            let _ = writeln!(svg, r#"<circle class="point" cx="{}" cy="{}" r="4"/>"#, x(r), y(i));
        }
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">rank</text>"#,
        LEFT + CELL * (n as f64 + 1.0) / 2.0,
        height - 10.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_rank_plot(grid: &RankGrid, out_path: impl AsRef<Path>) -> Result<()> {
    let out_path = out_path.as_ref();
    std::fs::write(out_path, render_rank_plot(grid)?).map_err(Error::at_path(out_path))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanReport {
    pub full_vs_true: f64,
    pub listing2f_vs_true: f64,
    pub listing2t_vs_true: f64,
    pub listing2f_vs_full: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankExperiment {
    pub seed: u64,
    pub subgroup: (String, String),
    pub n_rows: usize,
    pub n_train: usize,
    pub n_test_subgroup: usize,
    pub r_squared: f64,
    /// Scores of the sampled units in sampling order, keyed like
    /// [`RANK_METHODS`].
    pub scores: Vec<Vec<f64>>,
    pub units: Vec<usize>,
    pub spearman: SpearmanReport,
    pub grid: RankGrid,
}

/// Half/half split, OLS on the training half, repair of the fitted values
/// (Listing2F) and of the true outcome (Listing2T) with arms given by the
/// subgroup column, then `n_test` subgroup units from the test half.
pub fn rank_experiment(data: &Dataset, subgroup: (&str, &str), n_test: usize, seed: u64) -> Result<RankExperiment> {
    let (column, value) = subgroup;
    let n = data.len();
    if n < 4 {
        return Err(Error::Experiment(format!("dataset has only {n} rows")));
    }
    if n_test < 2 {
        return Err(Error::input("n_test must be at least 2"));
    }
    let mut rng: Rng = seeded(seed);
    let n_train = (n as f64 / 2.0).round_ties_even() as usize;
    let mut is_train = vec![false; n];
    let train_idx = index::sample(&mut rng, n, n_train).into_vec();
    for &i in &train_idx {
        is_train[i] = true;
    }
    let mut arm = Vec::with_capacity(n);
    for i in 0..n {
        arm.push(data.categorical(i, column)?.to_string());
    }
    if !arm.iter().any(|a| a == value) {
        return Err(Error::Experiment(format!("no rows with {column} = {value}")));
    }

    let train = data.select(&train_idx);
    let model = ols_fit(&train)?;
    let fitted = model.predict(&train)?;

    let scored = |s: &dyn Fn(usize, usize) -> f64| -> Vec<(String, f64)> {
        train_idx.iter().enumerate().map(|(k, &i)| (arm[i].clone(), s(k, i))).collect()
    };
    let repair_f = fit_repair(&scored(&|k, _| fitted[k]), RepairMode::Empirical)?;
    let repair_t = fit_repair(&scored(&|_, i| data.rows[i].zfya), RepairMode::Empirical)?;

    let pool: Vec<usize> = (0..n).filter(|&i| !is_train[i] && arm[i] == value).collect();
    if pool.len() < n_test {
        return Err(Error::Experiment(format!(
            "subgroup {column} = {value} has {} test rows (of {} test rows, {} in the subgroup overall); {n_test} needed",
            pool.len(),
            n - n_train,
            arm.iter().filter(|a| *a == value).count()
        )));
    }
    let units: Vec<usize> = index::sample(&mut rng, pool.len(), n_test).into_iter().map(|k| pool[k]).collect();

    let key = value.to_string();
    let mut truth = Vec::with_capacity(n_test);
    let mut full = Vec::with_capacity(n_test);
    for &i in &units {
        truth.push(data.rows[i].zfya);
        full.push(model.predict_row(&data.rows[i])?);
    }
    let listing2f = full.iter().map(|&y| repair_f.repair_score(&key, y)).collect::<Result<Vec<_>>>()?;
    let listing2t = truth.iter().map(|&y| repair_t.repair_score(&key, y)).collect::<Result<Vec<_>>>()?;

    let spearman = SpearmanReport {
        full_vs_true: spearman(&full, &truth)?,
        listing2f_vs_true: spearman(&listing2f, &truth)?,
        listing2t_vs_true: spearman(&listing2t, &truth)?,
        listing2f_vs_full: spearman(&listing2f, &full)?,
    };
    let scores = vec![truth, listing2t, listing2f, full];
    let grid = RankGrid::from_scores(&RANK_METHODS, &units, &scores)?;
    Ok(RankExperiment {
        seed,
        subgroup: (column.to_string(), value.to_string()),
        n_rows: n,
        n_train,
        n_test_subgroup: pool.len(),
        r_squared: model.r_squared,
        scores,
        units,
        spearman,
        grid,
    })
}

/// File names written by [`write_rank_outputs`].
pub const RANKS_CSV: &str = "ranks.csv";
pub const SPEARMAN_JSON: &str = "spearman.json";
pub const RANK_PLOT_SVG: &str = "rankplot.svg";

pub fn write_rank_outputs(result: &RankExperiment, out_dir: impl AsRef<Path>) -> Result<()> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(Error::at_path(dir))?;
    let ranks = dir.join(RANKS_CSV);
    result.grid.write_csv(File::create(&ranks).map_err(Error::at_path(&ranks))?)?;
    let json = serde_json::json!({
        "seed": result.seed,
        "subgroup": { "column": result.subgroup.0, "value": result.subgroup.1 },
        "n_rows": result.n_rows,
        "n_train": result.n_train,
        "n_test": result.units.len(),
        "r_squared": result.r_squared,
        "spearman": result.spearman,
    });
    let summary = dir.join(SPEARMAN_JSON);
    std::fs::write(&summary, serde_json::to_string_pretty(&json)? + "\n").map_err(Error::at_path(&summary))?;
    emit_rank_plot(&result.grid, dir.join(RANK_PLOT_SVG))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_micro_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(), 0.8);
        let xs = [0.3, -1.0, 2.0, 5.0];
        assert_eq!(spearman(&xs, &xs).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn rank_conventions() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
        assert_eq!(first_occurrence_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2, 4, 3, 1]);
    }

    #[test]
    fn grid_counts_and_fan() {
        let units: Vec<usize> = (0..5).collect();
        let up: Vec<f64> = (0..5).map(|v| v as f64).collect();
        let down: Vec<f64> = up.iter().rev().copied().collect();
        let g = RankGrid::from_scores(&["a", "b"], &units, &[up.clone(), down]).unwrap();
        assert_eq!(g.ranks[0], vec![1, 2, 3, 4, 5]);
        assert_eq!(g.ranks[1], vec![5, 4, 3, 2, 1]);
        let svg = render_rank_plot(&g).unwrap();
        assert_eq!(svg.matches("<circle").count(), 10);
        assert_eq!(svg.matches("<line").count(), 5);

        let g = RankGrid::from_scores(&["a", "b", "c"], &units, &[up.clone(), up.clone(), up]).unwrap();
        assert!(g.ranks.iter().all(|r| *r == vec![1, 2, 3, 4, 5]));
    }

    #[test]
    fn csv_schema_errors() {
        let err = read_csv("race,sex,LSAT,UGPA\nWhite,1,30,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema(ref c) if c == "ZFYA"));
        let err = read_csv("race,sex,lsat,ugpa,zfya\nWhite,1,30,3,0.1\nBlack,2,x,3,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Row { line: 3, .. }));
        let ok = read_csv(",race,sex,LSAT,UGPA,region_first,ZFYA\n1,White,1,39,3.1,GL,-0.98\n".as_bytes()).unwrap();
        assert_eq!(ok.rows[0].zfya, -0.98);
        assert_eq!(ok.rows[0].sex, "1");
    }

    #[test]
    fn noiseless_fit_recovers_generator() {
        let data = synth_lawschool(2000, 5, 0.0).unwrap();
        let fit = ols_fit(&data).unwrap();
        let truth = synth_generating_model();
        assert_eq!(fit.columns, truth.columns);
        for (b, t) in fit.coefficients.iter().zip(&truth.coefficients) {
            assert!((b - t).abs() < 1e-6, "{b} vs {t}");
        }
    }

    #[test]
    fn collinear_design_is_reported() {
        let rows = (0..10)
            .map(|i| LawRow {
                race: "A".into(),
                sex: if i % 2 == 0 { "F" } else { "M" }.into(),
                lsat: i as f64,
                ugpa: 2.0 * i as f64,
                zfya: i as f64,
            })
            .collect();
        let err = ols_fit(&Dataset { rows }).unwrap_err();
        assert!(matches!(err, Error::Fit(ref m) if m.contains("UGPA")), "{err}");
    }
}
