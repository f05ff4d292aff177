//! Cross-world generative models.
//!
//! [`BinaryTreatmentGaussianModel`] is the bivariate-Gaussian family of
//! potential outcomes `(X0, X1)` with a binary, ignorable treatment. Its
//! observational law of `(A, X)` does not depend on the cross-world
//! correlation `rho`, which is therefore invisible to any experiment.
//!
//! [`GpTreatmentModel`] realizes `X = a + eps_a` with `{eps_a}` a stationary
//! squared-exponential Gaussian process on a finite treatment grid, the
//! counterpart of the one-dimensional-error model `X = a + eps`.
//!
//! [`CancellationScm`] is the three-equation SCM `A = U_a`, `X = -A + U_x`,
//! `Y = A + X + U_y`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::config::{check_keys, get_f64, parse_kv, KeyValues};
use crate::error::{Error, Result};
use crate::rng::{seeded, substream, Rng};
use crate::stats::{self, Gaussian};

/// Treatment arm, 0 or 1.
pub type Arm = u8;

pub(crate) fn check_arm(a: Arm) -> Result<Arm> {
    if a <= 1 {
        Ok(a)
    } else {
        Err(Error::input(format!("arm must be 0 or 1, got {a}")))
    }
}

/// Jointly Gaussian potential outcomes `(X0, X1)` with a Bernoulli(`p1`)
/// treatment independent of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryTreatmentGaussianModel {
    pub mu0: f64,
    pub mu1: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub rho: f64,
    pub p1: f64,
}

impl Default for BinaryTreatmentGaussianModel {
    fn default() -> Self {
        Self { mu0: 0.0, mu1: 0.0, sigma0: 1.0, sigma1: 1.0, rho: 0.0, p1: 0.5 }
    }
}

impl BinaryTreatmentGaussianModel {
    pub fn new(mu0: f64, mu1: f64, sigma0: f64, sigma1: f64, rho: f64, p1: f64) -> Result<Self> {
        let m = Self { mu0, mu1, sigma0, sigma1, rho, p1 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu0, self.mu1, self.sigma0, self.sigma1, self.rho, self.p1];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::model("parameters must be finite"));
        }
        if self.sigma0 <= 0.0 || self.sigma1 <= 0.0 {
            return Err(Error::model("sigma0 and sigma1 must be positive"));
        }
        if self.rho.abs() > 1.0 {
            return Err(Error::model(format!("|rho| must be <= 1, got {}", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.p1) {
            return Err(Error::model(format!("p1 must lie in [0, 1], got {}", self.p1)));
        }
        let [[a, b], [_, d]] = self.covariance();
        if a < 0.0 || d < 0.0 || a * d - b * b < -1e-12 * a * d {
            return Err(Error::model("covariance matrix is not positive semi-definite"));
        }
        Ok(())
    }

    /// Same model with a different cross-world correlation.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        let m = Self { rho, ..*self };
        m.validate()?;
        Ok(m)
    }

    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let c = self.rho * self.sigma0 * self.sigma1;
        [[self.sigma0 * self.sigma0, c], [c, self.sigma1 * self.sigma1]]
    }

    /// `(mu_a, sigma_a)`.
    pub fn arm(&self, a: Arm) -> (f64, f64) {
        if a == 0 {
            (self.mu0, self.sigma0)
        } else {
            (self.mu1, self.sigma1)
        }
    }

    /// Marginal law of `X_a`, equal to the law of `X` given `A = a`.
    pub fn marginal(&self, a: Arm) -> Gaussian {
        let (mu, sigma) = self.arm(a);
        Gaussian::new(mu, sigma * sigma)
    }

    /// Parse `mu0=.. mu1=.. sigma0=.. sigma1=.. rho=.. p1=..`. Missing keys
    /// fall back to [`Default`] (standard arms, `rho = 0`, `p1 = 0.5`).
    pub fn from_kv_str(text: &str) -> Result<Self> {
        Self::from_kv(&parse_kv(text)?)
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        check_keys(kv, &["mu0", "mu1", "sigma0", "sigma1", "rho", "p1"])?;
        let d = Self::default();
        Self::new(
            get_f64(kv, "mu0", Some(d.mu0))?,
            get_f64(kv, "mu1", Some(d.mu1))?,
            get_f64(kv, "sigma0", Some(d.sigma0))?,
            get_f64(kv, "sigma1", Some(d.sigma1))?,
            get_f64(kv, "rho", Some(d.rho))?,
            get_f64(kv, "p1", Some(d.p1))?,
        )
    }

    pub fn to_kv(&self) -> KeyValues {
        [
            ("mu0", self.mu0),
            ("mu1", self.mu1),
            ("sigma0", self.sigma0),
            ("sigma1", self.sigma1),
            ("rho", self.rho),
            ("p1", self.p1),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
    }

    /// Draw one unit. The factual outcome is driven by `z1` and the
    /// counterfactual one by `rho * z1 + sqrt(1 - rho^2) * z2`, so for a fixed
    /// seed the observed `(A, X)` stream is identical across every `rho`.
    pub fn draw(&self, rng: &mut Rng) -> PotentialOutcomeDraw {
        let a: Arm = rng.random_bool(self.p1) as Arm;
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let zc = self.rho * z1 + (1.0 - self.rho * self.rho).max(0.0).sqrt() * z2;
        let (zf0, zf1) = if a == 0 { (z1, zc) } else { (zc, z1) };
        let x0 = self.mu0 + self.sigma0 * zf0;
        let x1 = self.mu1 + self.sigma1 * zf1;
        PotentialOutcomeDraw { a, x0, x1, x: if a == 0 { x0 } else { x1 } }
    }
}

/// One unit: treatment, both potential outcomes and the factual outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialOutcomeDraw {
    pub a: Arm,
    pub x0: f64,
    pub x1: f64,
    pub x: f64,
}

impl PotentialOutcomeDraw {
    /// Potential outcome under arm `a`.
    pub fn outcome(&self, a: Arm) -> f64 {
        if a == 0 {
            self.x0
        } else {
            self.x1
        }
    }

    /// The same unit seen in the world where `A` is set to `a`.
    pub fn in_world(&self, a: Arm) -> Self {
        Self { a, x: self.outcome(a), ..*self }
    }

    pub fn is_consistent(&self) -> bool {
        self.x == self.outcome(self.a)
    }
}

/// `n` iid units from the cross-world model.
pub fn sample_cross_world(
    model: &BinaryTreatmentGaussianModel,
    n: usize,
    seed: u64,
) -> Result<Vec<PotentialOutcomeDraw>> {
    model.validate()?;
    if n == 0 {
        return Err(Error::input("n must be at least 1"));
    }
    let mut rng = seeded(seed);
    Ok((0..n).map(|_| model.draw(&mut rng)).collect())
}

/// Dump draws as CSV with header `a,x0,x1,x`.
pub fn write_draws_csv<W: Write>(draws: &[PotentialOutcomeDraw], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "x0", "x1", "x"])?;
    for d in draws {
        w.write_record([d.a.to_string(), d.x0.to_string(), d.x1.to_string(), d.x.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Law of the unobserved potential outcome `X_{1-a}` given `X_a = x`, which
/// under ignorability is also its law given `(A = a, X = x)`.
///
/// For `|rho| = 1` the result is a point mass.
pub fn counterfactual_posterior(
    model: &BinaryTreatmentGaussianModel,
    observed_arm: Arm,
    x: f64,
) -> Result<Gaussian> {
    model.validate()?;
    let a = check_arm(observed_arm)?;
    let (mu_a, s_a) = model.arm(a);
    let (mu_c, s_c) = model.arm(1 - a);
    let rho = model.rho;
    let mean = mu_c + rho * (s_c / s_a) * (x - mu_a);
    let variance = if rho.abs() == 1.0 { 0.0 } else { s_c * s_c * (1.0 - rho * rho) };
    Ok(Gaussian::new(mean, variance))
}

/// Squared-exponential kernel `variance * exp(-d^2 / (2 length_scale^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquaredExponential {
    pub variance: f64,
    pub length_scale: f64,
}

impl SquaredExponential {
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        self.variance * (-d * d / (2.0 * self.length_scale * self.length_scale)).exp()
    }
}

/// Structural equation `X = a + eps_a` where `eps` is a zero-mean stationary
/// Gaussian process over the treatment levels in `grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpTreatmentModel {
    pub kernel: SquaredExponential,
    pub grid: Vec<f64>,
}

const GRAM_JITTER: f64 = 1e-9;

impl GpTreatmentModel {
    pub fn new(variance: f64, length_scale: f64, grid: Vec<f64>) -> Result<Self> {
        let m = Self { kernel: SquaredExponential { variance, length_scale }, grid };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.kernel;
        if !(k.variance > 0.0 && k.variance.is_finite()) {
            return Err(Error::model("kernel variance must be positive"));
        }
        if !(k.length_scale > 0.0 && k.length_scale.is_finite()) {
            return Err(Error::model("kernel length_scale must be positive"));
        }
        if self.grid.is_empty() {
            return Err(Error::model("treatment grid is empty"));
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) || self.grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::model("treatment grid must be finite and strictly increasing"));
        }
        Ok(())
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.grid.len();
        DMatrix::from_fn(n, n, |i, j| self.kernel.eval(self.grid[i], self.grid[j]))
    }

    fn gram_factor(&self) -> Result<DMatrix<f64>> {
        let n = self.grid.len();
        let jittered = self.gram() + DMatrix::identity(n, n) * (GRAM_JITTER * self.kernel.variance);
        jittered
            .cholesky()
            .map(|c| c.l())
            .ok_or_else(|| Error::model("Gram matrix is not positive semi-definite"))
    }

    /// `n` joint draws of `(eps_a)` over the grid; row `i` is one unit.
    pub fn sample_errors(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        let l = self.gram_factor()?;
        let mut rng = seeded(seed);
        let k = self.grid.len();
        Ok((0..n)
            .map(|_| {
                let z = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
                (&l * z).iter().copied().collect()
            })
            .collect())
    }

    /// The two-level restriction as a binary-treatment Gaussian model:
    /// `mu_a = level_a`, `sigma_a^2 = variance`, `rho = k(l0 - l1) / k(0)`.
    pub fn restricted_to(&self, level0: f64, level1: f64, p1: f64) -> Result<BinaryTreatmentGaussianModel> {
        let sd = self.kernel.variance.sqrt();
        BinaryTreatmentGaussianModel::new(
            level0,
            level1,
            sd,
            sd,
            gp_cross_world_correlation(self, level0, level1)?,
            p1,
        )
    }
}

/// Correlation of `X_a` and `X_{a'}` in the GP-error model,
/// `k(a - a') / k(0)`.
pub fn gp_cross_world_correlation(model: &GpTreatmentModel, a: f64, a_prime: f64) -> Result<f64> {
    model.validate()?;
    Ok(model.kernel.eval(a, a_prime) / model.kernel.variance)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub level: f64,
    /// Two-sample KS between `a + eps` and `a + eps_a`.
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossWorldComparison {
    pub a: f64,
    pub a_prime: f64,
    /// Always 1: a shared error makes every pair of potential outcomes
    /// perfectly correlated.
    pub one_dimensional: f64,
    pub gp_kernel: f64,
    pub gp_sample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpEquivalenceReport {
    pub n: usize,
    pub seed: u64,
    pub levels: Vec<LevelComparison>,
    pub cross_world: Vec<CrossWorldComparison>,
}

impl GpEquivalenceReport {
    pub fn max_ks(&self) -> f64 {
        self.levels.iter().map(|l| l.ks).fold(0.0, f64::max)
    }
}

/// Compare `X = a + eps` (one error shared by every level, variance equal to
/// the kernel variance) against `X = a + eps_a` (GP) level by level, and
/// expose how differently the two couple their potential outcomes.
pub fn gp_observational_equivalence_check(
    gp: &GpTreatmentModel,
    n: usize,
    seed: u64,
) -> Result<GpEquivalenceReport> {
    gp.validate()?;
    if n < 2 {
        return Err(Error::input("n must be at least 2"));
    }
    let sd = gp.kernel.variance.sqrt();
    let mut rng = seeded(substream(seed, 0));
    let shared_normal = Normal::new(0.0, sd).map_err(|e| Error::model(e.to_string()))?;
    let shared: Vec<f64> = (0..n).map(|_| shared_normal.sample(&mut rng)).collect();
    let gp_draws = gp.sample_errors(n, substream(seed, 1))?;

    let levels = gp
        .grid
        .iter()
        .enumerate()
        .map(|(j, &level)| {
            let one_dim: Vec<f64> = shared.iter().map(|e| level + e).collect();
            let gp_x: Vec<f64> = gp_draws.iter().map(|row| level + row[j]).collect();
            LevelComparison { level, ks: stats::ks_two_sample(&one_dim, &gp_x) }
        })
        .collect();

    let mut cross_world = Vec::new();
    for i in 0..gp.grid.len() {
        for j in (i + 1)..gp.grid.len() {
            let ei: Vec<f64> = gp_draws.iter().map(|r| r[i]).collect();
            let ej: Vec<f64> = gp_draws.iter().map(|r| r[j]).collect();
            cross_world.push(CrossWorldComparison {
                a: gp.grid[i],
                a_prime: gp.grid[j],
                one_dimensional: 1.0,
                gp_kernel: gp_cross_world_correlation(gp, gp.grid[i], gp.grid[j])?,
                gp_sample: stats::correlation(&ei, &ej),
            });
        }
    }
    Ok(GpEquivalenceReport { n, seed, levels, cross_world })
}

/// Distribution of an exogenous error term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ErrorLaw {
    Gaussian { mean: f64, sd: f64 },
    Uniform { low: f64, high: f64 },
}

impl ErrorLaw {
    pub const STANDARD_GAUSSIAN: ErrorLaw = ErrorLaw::Gaussian { mean: 0.0, sd: 1.0 };

    fn sample(&self, rng: &mut Rng) -> Result<f64> {
        match *self {
            ErrorLaw::Gaussian { mean, sd } => Normal::new(mean, sd)
                .map(|d| d.sample(rng))
                .map_err(|e| Error::model(e.to_string())),
            ErrorLaw::Uniform { low, high } => Uniform::new(low, high)
                .map(|d| d.sample(rng))
                .map_err(|e| Error::model(e.to_string())),
        }
    }
}

/// `A = U_a` with `U_a` uniform on `{0, 1}`, `X = -A + U_x`,
/// `Y = A + X + U_y`; errors mutually independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationScm {
    pub u_x: ErrorLaw,
    pub u_y: ErrorLaw,
}

impl Default for CancellationScm {
    fn default() -> Self {
        Self { u_x: ErrorLaw::STANDARD_GAUSSIAN, u_y: ErrorLaw::STANDARD_GAUSSIAN }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationOutcome {
    pub y0: f64,
    pub y1: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationDraw {
    pub a: Arm,
    pub u_x: f64,
    pub u_y: f64,
    pub outcome: CancellationOutcome,
}

/// A linear form `c_a * A + c_x * U_x + c_y * U_y`. Structural equations are
/// composed symbolically; the `A` terms of `Y` cancel to an exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LinearForm {
    c_a: f64,
    c_x: f64,
    c_y: f64,
}

impl LinearForm {
    const A: LinearForm = LinearForm { c_a: 1.0, c_x: 0.0, c_y: 0.0 };
    const U_X: LinearForm = LinearForm { c_a: 0.0, c_x: 1.0, c_y: 0.0 };
    const U_Y: LinearForm = LinearForm { c_a: 0.0, c_x: 0.0, c_y: 1.0 };

    fn plus(self, o: LinearForm) -> LinearForm {
        LinearForm { c_a: self.c_a + o.c_a, c_x: self.c_x + o.c_x, c_y: self.c_y + o.c_y }
    }

    fn neg(self) -> LinearForm {
        LinearForm { c_a: -self.c_a, c_x: -self.c_x, c_y: -self.c_y }
    }

    fn eval(&self, a: f64, u_x: f64, u_y: f64) -> f64 {
        let exogenous = self.c_x * u_x + self.c_y * u_y;
        if self.c_a == 0.0 {
            exogenous
        } else {
            self.c_a * a + exogenous
        }
    }
}

/// Evaluate the structural equations for one unit in the factual world and
/// in both intervened worlds.
pub fn cancellation_cross_world(a: Arm, u_x: f64, u_y: f64) -> CancellationOutcome {
    let x = LinearForm::A.neg().plus(LinearForm::U_X);
    let y = LinearForm::A.plus(x).plus(LinearForm::U_Y);
    let af = a as f64;
    CancellationOutcome {
        y0: y.eval(0.0, u_x, u_y),
        y1: y.eval(1.0, u_x, u_y),
        x: x.eval(af, u_x, u_y),
        y: y.eval(af, u_x, u_y),
    }
}

impl CancellationScm {
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<CancellationDraw>> {
        let mut rng = seeded(seed);
        (0..n)
            .map(|_| {
                let a: Arm = rng.random_bool(0.5) as Arm;
                let u_x = self.u_x.sample(&mut rng)?;
                let u_y = self.u_y.sample(&mut rng)?;
                Ok(CancellationDraw { a, u_x, u_y, outcome: cancellation_cross_world(a, u_x, u_y) })
            })
            .collect()
    }
}

/// Abduct `U_x` from an observed `(A, X)`.
pub fn cancellation_abduct_u_x(a: Arm, x: f64) -> f64 {
    x + a as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_model(rho: f64) -> BinaryTreatmentGaussianModel {
        BinaryTreatmentGaussianModel::new(1.0, 1.0, 1.0, 1.0, rho, 0.5).unwrap()
    }

    #[test]
    fn validation() {
        assert!(BinaryTreatmentGaussianModel::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.5).is_err());
        assert!(BinaryTreatmentGaussianModel::new(0.0, 0.0, 1.0, 1.0, 1.01, 0.5).is_err());
        assert!(BinaryTreatmentGaussianModel::new(0.0, 0.0, 1.0, 1.0, 0.0, 1.5).is_err());
        assert!(BinaryTreatmentGaussianModel::new(0.0, 0.0, 1.0, 1.0, -1.0, 0.0).is_ok());
        assert!(matches!(
            sample_cross_world(&unit_model(0.0), 0, 1),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn kv_round_trip() {
        let m = BinaryTreatmentGaussianModel::from_kv_str(
            "mu0=1.0 mu1=1.0 sigma0=1.0 sigma1=1.0 rho=0.5 p1=0.5",
        )
        .unwrap();
        assert_eq!(m, unit_model(0.5));
        assert_eq!(BinaryTreatmentGaussianModel::from_kv(&m.to_kv()).unwrap(), m);
        assert!(BinaryTreatmentGaussianModel::from_kv_str("mu2=1").is_err());
    }

    #[test]
    fn perfectly_correlated_identical_arms() {
        for d in sample_cross_world(&unit_model(1.0), 1000, 3).unwrap() {
            assert_eq!(d.x0, d.x1);
            assert!(d.is_consistent());
        }
    }

    #[test]
    fn independent_arms_are_uncorrelated() {
        let n = 20_000;
        let draws = sample_cross_world(&unit_model(0.0), n, 11).unwrap();
        let x0: Vec<f64> = draws.iter().map(|d| d.x0).collect();
        let x1: Vec<f64> = draws.iter().map(|d| d.x1).collect();
        assert!(stats::correlation(&x0, &x1).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn factual_stream_does_not_depend_on_rho() {
        let a = sample_cross_world(&unit_model(-0.7), 500, 9).unwrap();
        let b = sample_cross_world(&unit_model(0.9), 500, 9).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_eq!((u.a, u.x), (v.a, v.x));
        }
    }

    #[test]
    fn posterior_closed_form() {
        let g = counterfactual_posterior(&unit_model(0.5), 0, 2.0).unwrap();
        assert!((g.mean - 1.5).abs() < 1e-12);
        assert!((g.variance - 0.75).abs() < 1e-12);
        // P(X1 <= 2 | X0 = 2) = Phi(0.5 / sqrt(0.75))
        assert!((g.cdf(2.0) - 0.7181).abs() < 1e-4);

        let ind = counterfactual_posterior(
            &BinaryTreatmentGaussianModel::new(0.0, 3.0, 1.0, 2.0, 0.0, 0.5).unwrap(),
            0,
            -5.0,
        )
        .unwrap();
        assert_eq!((ind.mean, ind.variance), (3.0, 4.0));

        let pm = counterfactual_posterior(&unit_model(1.0), 1, 0.37).unwrap();
        assert!(pm.is_degenerate());
        assert!((pm.mean - 0.37).abs() < 1e-15);
        assert!(counterfactual_posterior(&unit_model(0.0), 2, 0.0).is_err());
    }

    #[test]
    fn gp_correlation_values() {
        let gp = GpTreatmentModel::new(1.0, 1.0, vec![0.0, 1.0]).unwrap();
        assert_eq!(gp_cross_world_correlation(&gp, 0.3, 0.3).unwrap(), 1.0);
        assert!((gp_cross_world_correlation(&gp, 0.0, 1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        let far = gp_cross_world_correlation(&gp, 0.0, 10.0).unwrap();
        assert!(far < 1e-21 && far > 0.0);
        assert!(GpTreatmentModel::new(1.0, 0.0, vec![0.0]).is_err());
        assert!(GpTreatmentModel::new(1.0, 1.0, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn gram_is_symmetric_psd_and_stationary() {
        let gp = GpTreatmentModel::new(2.0, 0.7, vec![-1.0, 0.0, 0.5, 3.0]).unwrap();
        let k = gp.gram();
        assert_eq!(k, k.transpose());
        let eig = k.clone().symmetric_eigen().eigenvalues;
        assert!(eig.iter().all(|&e| e > -1e-9));
        let shifted = GpTreatmentModel::new(2.0, 0.7, vec![4.0, 5.0, 5.5, 8.0]).unwrap();
        assert!((shifted.gram() - k).abs().max() < 1e-15);
    }

    #[test]
    fn gp_restriction_matches_kernel() {
        let gp = GpTreatmentModel::new(1.0, 1.0, vec![0.0, 1.0]).unwrap();
        let m = gp.restricted_to(0.0, 1.0, 0.5).unwrap();
        assert!((m.rho - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!((m.mu0, m.mu1, m.sigma0, m.sigma1), (0.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn cancellation_hand_values() {
        let o = cancellation_cross_world(1, 0.3, -0.2);
        assert!((o.x + 0.7).abs() < 1e-15);
        assert!((o.y - 0.1).abs() < 1e-15);
        assert!((o.y0 - 0.1).abs() < 1e-15 && (o.y1 - 0.1).abs() < 1e-15);
        let z = cancellation_cross_world(0, 0.0, 0.0);
        assert_eq!((z.x, z.y, z.y0, z.y1), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn csv_dump_header() {
        let draws = sample_cross_world(&unit_model(0.5), 2, 1).unwrap();
        let mut buf = Vec::new();
        write_draws_csv(&draws, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("a,x0,x1,x\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
