//! Group-order-preserving demographic-parity repair.
//!
//! A preliminary score `y_bar` observed in group `a` is mapped to its quantile
//! within that group and then to the same quantile of the pooled training
//! scores: `y_hat = g(F^{-1}(F_a(y_bar)))`, with `g` the identity unless a
//! monotone map is supplied.
//!
//! The empirical mode reproduces the reference lookup rule exactly:
//! `index = round(n * F_a(y_bar))` with ties rounded to even, an index of 0
//! bumped to 1, and the 1-based `index`-th smallest pooled training score
//! returned. The gaussian mode replaces each `F_a` by a fitted normal cdf.

use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{self, phi};

/// Right-continuous empirical cdf over a sorted multiset of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted_values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("empirical cdf needs at least one value"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::input("empirical cdf values must not be NaN"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted_values: values })
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn min(&self) -> f64 {
        self.sorted_values[0]
    }

    pub fn max(&self) -> f64 {
        *self.sorted_values.last().unwrap()
    }

    /// `#{values <= v} / n`.
    pub fn eval(&self, v: f64) -> f64 {
        let count = self.sorted_values.partition_point(|&s| s <= v);
        count as f64 / self.len() as f64
    }

    /// Generalized inverse `inf { v : eval(v) >= p }`, for `p` in `(0, 1]`;
    /// `p <= 0` returns the minimum.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.len();
        let k = (p * n as f64).ceil().clamp(1.0, n as f64) as usize;
        self.sorted_values[k - 1]
    }

    /// The reference lookup: `round(n * q)` (ties to even), 0 bumped to 1,
    /// indices above `n` clamped to `n`, then the 1-based order statistic.
    pub fn lookup_rounded(&self, q: f64) -> f64 {
        self.sorted_values[rounded_index(self.len(), q) - 1]
    }
}

/// 1-based index `round(n * q)` with the 0 -> 1 and > n -> n clamps.
pub fn rounded_index(n: usize, q: f64) -> usize {
    let raw = (n as f64 * q).round_ties_even();
    if raw < 1.0 {
        1
    } else if raw > n as f64 {
        n
    } else {
        raw as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairMode {
    Empirical,
    Gaussian,
}

impl std::str::FromStr for RepairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empirical" => Ok(RepairMode::Empirical),
            "gaussian" => Ok(RepairMode::Gaussian),
            other => Err(Error::input(format!("unknown repair mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ArmCdf {
    Empirical(EmpiricalCdf),
    Gaussian { mean: f64, sd: f64 },
}

impl ArmCdf {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            ArmCdf::Empirical(e) => e.eval(v),
            ArmCdf::Gaussian { mean, sd } => phi((v - mean) / sd),
        }
    }
}

/// Per-group cdfs plus the pooled training scores they map into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairModel<K: Ord> {
    pub mode: RepairMode,
    pub per_arm: BTreeMap<K, ArmCdf>,
    pub marginal: EmpiricalCdf,
}

/// Build per-group cdfs from `(group, score)` training pairs.
pub fn fit_repair<K>(training_scores: &[(K, f64)], mode: RepairMode) -> Result<RepairModel<K>>
where
    K: Ord + Clone + Display,
{
    if training_scores.len() < 2 {
        return Err(Error::Fit("need at least two pooled training scores".into()));
    }
    let mut groups: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for (k, v) in training_scores {
        if !v.is_finite() {
            return Err(Error::Fit(format!("non-finite training score in arm `{k}`")));
        }
        groups.entry(k.clone()).or_default().push(*v);
    }
    let per_arm = groups
        .into_iter()
        .map(|(k, vals)| {
            let cdf = match mode {
                RepairMode::Empirical => ArmCdf::Empirical(EmpiricalCdf::new(vals)?),
                RepairMode::Gaussian => {
                    if vals.len() < 2 {
                        return Err(Error::Fit(format!(
                            "arm `{k}` needs at least two scores for a gaussian fit"
                        )));
                    }
                    let sd = stats::variance(&vals).sqrt();
                    if !(sd > 0.0) {
                        return Err(Error::Fit(format!("arm `{k}` has zero spread")));
                    }
                    ArmCdf::Gaussian { mean: stats::mean(&vals), sd }
                }
            };
            Ok((k, cdf))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let marginal = EmpiricalCdf::new(training_scores.iter().map(|(_, v)| *v).collect())?;
    Ok(RepairModel { mode, per_arm, marginal })
}

impl<K: Ord + Display + Debug> RepairModel<K> {
    /// The group's cdf, or a fit error naming the group if it had no
    /// training scores.
    pub fn arm(&self, arm: &K) -> Result<&ArmCdf> {
        self.per_arm
            .get(arm)
            .ok_or_else(|| Error::input(format!("unknown arm `{arm}`")))
    }

    /// Quantile of `y_bar` within its group.
    pub fn quantile_in_arm(&self, arm: &K, y_bar: f64) -> Result<f64> {
        Ok(self.arm(arm)?.eval(y_bar))
    }

    pub fn repair_score(&self, arm: &K, y_bar: f64) -> Result<f64> {
        let q = self.quantile_in_arm(arm, y_bar)?;
        Ok(self.marginal.lookup_rounded(q))
    }

    /// As [`RepairModel::repair_score`] followed by a monotone map `g`.
    pub fn repair_score_with(&self, arm: &K, y_bar: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
        self.repair_score(arm, y_bar).map(g)
    }

    pub fn repair_batch(&self, rows: &[(K, f64)]) -> Result<Vec<f64>> {
        rows.iter().map(|(k, y)| self.repair_score(k, *y)).collect()
    }
}

/// Convenience wrappers matching the free-function surface.
pub fn repair_score<K: Ord + Display + Debug>(model: &RepairModel<K>, arm: &K, y_bar: f64) -> Result<f64> {
    model.repair_score(arm, y_bar)
}

pub fn repair_batch<K: Ord + Display + Debug>(model: &RepairModel<K>, rows: &[(K, f64)]) -> Result<Vec<f64>> {
    model.repair_batch(rows)
}

#[derive(Debug, Deserialize)]
struct ScoreRow {
    a: String,
    y_bar: f64,
}

/// Read `a,y_bar` rows. Group labels are kept as strings.
pub fn read_scores_csv<R: Read>(input: R) -> Result<Vec<(String, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers()?.clone();
    for col in ["a", "y_bar"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Schema(col.into()));
        }
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<ScoreRow>().enumerate() {
        let row = rec.map_err(|e| Error::Row { line: i as u64 + 2, message: e.to_string() })?;
        out.push((row.a, row.y_bar));
    }
    Ok(out)
}

/// Write `a,y_bar,y_hat` rows.
pub fn write_repaired_csv<W: Write>(rows: &[(String, f64)], repaired: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "y_bar", "y_hat"])?;
    for ((a, y_bar), y_hat) in rows.iter().zip(repaired) {
        w.write_record([a.clone(), y_bar.to_string(), y_hat.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_arm() -> RepairModel<u8> {
        fit_repair(&[(0u8, 1.0), (0, 2.0), (1, 3.0), (1, 4.0)], RepairMode::Empirical).unwrap()
    }

    #[test]
    fn ecdf_basics() {
        let e = EmpiricalCdf::new(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(e.sorted_values(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(2.0), 0.75);
        assert_eq!(e.eval(3.0), 1.0);
        assert_eq!(e.quantile(0.5), 2.0);
        assert_eq!(e.quantile(0.76), 3.0);
        assert_eq!(e.quantile(0.0), 1.0);
        assert!(EmpiricalCdf::new(vec![]).is_err());
    }

    #[test]
    fn rounding_follows_ties_to_even() {
        assert_eq!(rounded_index(4, 0.0), 1);
        assert_eq!(rounded_index(4, 1.0), 4);
        assert_eq!(rounded_index(4, 0.625), 2); // 2.5 -> 2
        assert_eq!(rounded_index(4, 0.875), 4); // 3.5 -> 4
        assert_eq!(rounded_index(4, 2.0), 4);
    }

    #[test]
    fn hand_traced_lookups() {
        let m = two_arm();
        assert_eq!(m.marginal.sorted_values(), &[1.0, 2.0, 3.0, 4.0]);
        // q = 1.0 -> index 4
        assert_eq!(m.repair_score(&0, 2.0).unwrap(), 4.0);
        // q = 0 -> index 0 bumped to 1
        assert_eq!(m.repair_score(&0, 0.5).unwrap(), 1.0);
        // q = 0.5 -> index 2
        assert_eq!(m.repair_score(&1, 3.0).unwrap(), 2.0);
    }

    #[test]
    fn single_stratum_is_identity_on_training_scores() {
        let scores = [1.0, 2.0, 3.0];
        let m = fit_repair(&scores.map(|v| ("g", v)), RepairMode::Empirical).unwrap();
        assert_eq!(m.arm(&"g").unwrap(), &ArmCdf::Empirical(m.marginal.clone()));
        for v in scores {
            assert_eq!(m.repair_score(&"g", v).unwrap(), v);
        }
    }

    #[test]
    fn identical_multisets_give_identical_cdfs() {
        let m = fit_repair(&[(0u8, 2.0), (1, 1.0), (0, 1.0), (1, 2.0)], RepairMode::Empirical).unwrap();
        assert_eq!(m.per_arm[&0], m.per_arm[&1]);
    }

    #[test]
    fn errors() {
        let m = two_arm();
        assert!(matches!(m.repair_score(&7, 1.0), Err(Error::Input(_))));
        assert!(matches!(fit_repair(&[(0u8, 1.0)], RepairMode::Empirical), Err(Error::Fit(_))));
        let e = fit_repair(&[(0u8, 1.0), (1, 2.0), (1, 3.0)], RepairMode::Gaussian).unwrap_err();
        assert!(e.to_string().contains("arm `0`"));
    }

    #[test]
    fn batch_constant_inputs() {
        let m = two_arm();
        let out = m.repair_batch(&[(1, 3.5), (1, 3.5), (1, 3.5)]).unwrap();
        assert!(out.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn monotone_map_hook() {
        let m = two_arm();
        assert_eq!(m.repair_score_with(&0, 2.0, |v| 2.0 * v + 1.0).unwrap(), 9.0);
    }

    #[test]
    fn csv_io() {
        let rows = read_scores_csv("a,y_bar\n0,1.5\n1, 2\n".as_bytes()).unwrap();
        assert_eq!(rows, vec![("0".into(), 1.5), ("1".into(), 2.0)]);
        assert!(matches!(read_scores_csv("a,score\n0,1\n".as_bytes()), Err(Error::Schema(c)) if c == "y_bar"));
        assert!(matches!(read_scores_csv("a,y_bar\n0,x\n".as_bytes()), Err(Error::Row { line: 2, .. })));
        let mut buf = Vec::new();
        write_repaired_csv(&rows, &[1.0, 2.0], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("a,y_bar,y_hat\n0,1.5,1\n"));
    }
}
