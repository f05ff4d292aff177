//! Predictor constructions.
//!
//! Each [`Predictor`] variant scores a unit of the binary-treatment model
//! (a [`PotentialOutcomeDraw`]) except [`Predictor::PathSpecific`], which
//! lives on its own three-variable structural model and is scored with
//! [`path_specific_score`].

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::causal_models::{check_arm, Arm, BinaryTreatmentGaussianModel, PotentialOutcomeDraw};
use crate::config::{check_keys, get_f64, parse_kv, KeyValues};
use crate::error::{Error, Result};
use crate::repair::EmpiricalCdf;
use crate::rng::Rng;
use crate::stats::{phi, probit};

/// Per-arm location and scale, `(mu_a, sigma_a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmMoments {
    pub mu0: f64,
    pub sigma0: f64,
    pub mu1: f64,
    pub sigma1: f64,
}

impl ArmMoments {
    pub fn of(model: &BinaryTreatmentGaussianModel) -> Self {
        Self { mu0: model.mu0, sigma0: model.sigma0, mu1: model.mu1, sigma1: model.sigma1 }
    }

    pub fn arm(&self, a: Arm) -> (f64, f64) {
        if a == 0 {
            (self.mu0, self.sigma0)
        } else {
            (self.mu1, self.sigma1)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sigma0 > 0.0 && self.sigma1 > 0.0 {
            Ok(())
        } else {
            Err(Error::model("standardized predictor needs positive sigma_a"))
        }
    }
}

/// `F_{x|a}` for both arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CdfFamily {
    Gaussian(ArmMoments),
    /// Empirical per-arm cdfs; strictly increasing on the sample only, so
    /// points outside `[min, max]` are clamped and flagged.
    Empirical { arm0: EmpiricalCdf, arm1: EmpiricalCdf },
}

impl CdfFamily {
    /// `(F_{x|a}(x), outside_support)`.
    pub fn eval(&self, a: Arm, x: f64) -> (f64, bool) {
        match self {
            CdfFamily::Gaussian(m) => {
                let (mu, s) = m.arm(a);
                (phi((x - mu) / s), false)
            }
            CdfFamily::Empirical { arm0, arm1 } => {
                let cdf = if a == 0 { arm0 } else { arm1 };
                let outside = x < cdf.min() || x > cdf.max();
                (cdf.eval(x), outside)
            }
        }
    }
}

/// Monotone map applied to the probability-integral transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputMap {
    Identity,
    /// Standard-normal quantile function.
    Probit,
}

impl OutputMap {
    pub fn apply(&self, u: f64) -> f64 {
        match self {
            OutputMap::Identity => u,
            OutputMap::Probit => probit(u),
        }
    }
}

/// Linear structural function `X = a_coef * A + u_coef * U_x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFx {
    pub a_coef: f64,
    pub u_coef: f64,
    pub intercept: f64,
}

/// Linear structural function `Z = a_coef * A + x_coef * X + u_coef * U_z + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFz {
    pub a_coef: f64,
    pub x_coef: f64,
    pub u_coef: f64,
    pub intercept: f64,
}

/// Predictor over the graph `{A -> X -> Z, A -> Z}` that lets information
/// flow along `A -> X -> Z` but cuts the direct edge `A -> Z` by evaluating
/// `f_Z` at a fixed baseline arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpecificSpec {
    pub f_x: LinearFx,
    pub f_z: LinearFz,
    pub baseline: f64,
    /// Aggregation `weight_x * x + weight_z * z*`; both 1 by default.
    pub weight_x: f64,
    pub weight_z: f64,
}

impl PathSpecificSpec {
    /// `X = A + U_x`, `Z = A + X + U_z`, baseline 0, sum aggregation.
    pub fn additive(baseline: f64) -> Self {
        Self {
            f_x: LinearFx { a_coef: 1.0, u_coef: 1.0, intercept: 0.0 },
            f_z: LinearFz { a_coef: 1.0, x_coef: 1.0, u_coef: 1.0, intercept: 0.0 },
            baseline,
            weight_x: 1.0,
            weight_z: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "predictor", rename_all = "snake_case")]
pub enum Predictor {
    /// `(X - mu_A) / sigma_A`.
    Standardized(ArmMoments),
    /// `lambda1 * A + lambda2 * X + lambda3`.
    LinearAx { lambda1: f64, lambda2: f64, lambda3: f64 },
    /// `lambda1 * X0 + lambda2 * X1`.
    PoLinear { lambda1: f64, lambda2: f64 },
    /// `h(F_{x|A}(X))`.
    Rosenblatt { family: CdfFamily, h: OutputMap },
    /// Bernoulli(p), independent of the unit.
    CoinFlip { p: f64 },
    PathSpecific(PathSpecificSpec),
}

impl Predictor {
    pub fn standardized(model: &BinaryTreatmentGaussianModel) -> Self {
        Predictor::Standardized(ArmMoments::of(model))
    }

    /// `Yhat = X`.
    pub fn identity() -> Self {
        Predictor::LinearAx { lambda1: 0.0, lambda2: 1.0, lambda3: 0.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Predictor::Standardized(_) => "standardized",
            Predictor::LinearAx { .. } => "linear_ax",
            Predictor::PoLinear { .. } => "po_linear",
            Predictor::Rosenblatt { .. } => "rosenblatt",
            Predictor::CoinFlip { .. } => "coin_flip",
            Predictor::PathSpecific(_) => "path_specific",
        }
    }

    /// Whether the score is a deterministic function of the unit.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Predictor::CoinFlip { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Predictor::Standardized(m) => m.validate(),
            Predictor::Rosenblatt { family: CdfFamily::Gaussian(m), .. } => m.validate(),
            Predictor::CoinFlip { p } if !(0.0..=1.0).contains(p) => {
                Err(Error::input(format!("coin-flip p must lie in [0, 1], got {p}")))
            }
            Predictor::LinearAx { lambda1, lambda2, lambda3 }
                if ![lambda1, lambda2, lambda3].iter().all(|v| v.is_finite()) =>
            {
                Err(Error::input("linear coefficients must be finite"))
            }
            Predictor::PoLinear { lambda1, lambda2 } if !(lambda1.is_finite() && lambda2.is_finite()) => {
                Err(Error::input("potential-outcome coefficients must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// Score one unit of the binary-treatment model in its own world.
    ///
    /// `rng` is consulted only by the coin flip.
    pub fn score(&self, unit: &PotentialOutcomeDraw, rng: &mut Rng) -> Result<f64> {
        match self {
            Predictor::Standardized(m) => Ok(standardized_score_with(m, unit.a, unit.x)),
            Predictor::LinearAx { lambda1, lambda2, lambda3 } => {
                Ok(lambda1 * unit.a as f64 + lambda2 * unit.x + lambda3)
            }
            Predictor::PoLinear { lambda1, lambda2 } => {
                Ok(potential_outcome_score(*lambda1, *lambda2, unit.x0, unit.x1))
            }
            Predictor::Rosenblatt { family, h } => Ok(rosenblatt_dp_score(family, unit.a, unit.x, *h).value),
            Predictor::CoinFlip { p } => Ok(coin_flip_draw(*p, rng)),
            Predictor::PathSpecific(_) => Err(Error::input(
                "path-specific predictor is not defined on binary-treatment units",
            )),
        }
    }

    /// Parse `predictor=<kind> key=value ...`. Kinds: `standardized`,
    /// `identity`, `linear_ax`, `po_linear`, `rosenblatt` (`h=identity|probit`),
    /// `coin_flip`. Standardized and Rosenblatt read their arm moments from
    /// `model`.
    pub fn from_kv(kv: &KeyValues, model: &BinaryTreatmentGaussianModel) -> Result<Self> {
        let kind = kv
            .get("predictor")
            .ok_or_else(|| Error::input("missing `predictor`"))?
            .as_str();
        let p = match kind {
            "standardized" => {
                check_keys(kv, &["predictor"])?;
                Predictor::standardized(model)
            }
            "identity" => {
                check_keys(kv, &["predictor"])?;
                Predictor::identity()
            }
            "linear_ax" => {
                check_keys(kv, &["predictor", "lambda1", "lambda2", "lambda3"])?;
                Predictor::LinearAx {
                    lambda1: get_f64(kv, "lambda1", None)?,
                    lambda2: get_f64(kv, "lambda2", Some(1.0))?,
                    lambda3: get_f64(kv, "lambda3", Some(0.0))?,
                }
            }
            "po_linear" => {
                check_keys(kv, &["predictor", "lambda1", "lambda2"])?;
                Predictor::PoLinear {
                    lambda1: get_f64(kv, "lambda1", Some(1.0))?,
                    lambda2: get_f64(kv, "lambda2", Some(1.0))?,
                }
            }
            "rosenblatt" => {
                check_keys(kv, &["predictor", "h"])?;
                let h = match kv.get("h").map(String::as_str).unwrap_or("identity") {
                    "identity" => OutputMap::Identity,
                    "probit" => OutputMap::Probit,
                    other => return Err(Error::input(format!("unknown output map `{other}`"))),
                };
                Predictor::Rosenblatt { family: CdfFamily::Gaussian(ArmMoments::of(model)), h }
            }
            "coin_flip" => {
                check_keys(kv, &["predictor", "p"])?;
                Predictor::CoinFlip { p: get_f64(kv, "p", Some(0.5))? }
            }
            other => return Err(Error::input(format!("unknown predictor `{other}`"))),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_kv_str(text: &str, model: &BinaryTreatmentGaussianModel) -> Result<Self> {
        Self::from_kv(&parse_kv(text)?, model)
    }
}

fn standardized_score_with(m: &ArmMoments, a: Arm, x: f64) -> f64 {
    let (mu, s) = m.arm(a);
    (x - mu) / s
}

/// `(x - mu_a) / sigma_a`.
pub fn standardized_score(model: &BinaryTreatmentGaussianModel, a: Arm, x: f64) -> Result<f64> {
    model.validate()?;
    check_arm(a)?;
    Ok(standardized_score_with(&ArmMoments::of(model), a, x))
}

/// Coefficients `(lambda1, lambda2)` of `lambda1 * A + lambda2 * X` with
/// `lambda2 = 1` and zero covariance with `A`.
pub fn linear_cancellation_coefficients(cov_aa: f64, cov_ax: f64) -> Result<(f64, f64)> {
    if !(cov_aa > 0.0) || !cov_aa.is_finite() || !cov_ax.is_finite() {
        return Err(Error::input(format!("cov_aa must be positive and finite, got {cov_aa}")));
    }
    Ok((-cov_ax / cov_aa, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RosenblattScore {
    pub value: f64,
    /// The probability-integral transform `F_{x|a}(x)`.
    pub u: f64,
    /// `x` fell outside the support of `F_{x|a}` and `u` was clamped.
    pub clamped: bool,
}

/// `h(F_{x|a}(x))`.
pub fn rosenblatt_dp_score(family: &CdfFamily, a: Arm, x: f64, h: OutputMap) -> RosenblattScore {
    let (u, outside) = family.eval(a, x);
    let u = u.clamp(0.0, 1.0);
    RosenblattScore { value: h.apply(u), u, clamped: outside }
}

/// `lambda1 * x0 + lambda2 * x1`: a function of the potential-outcome
/// vector alone, never of the realized arm.
pub fn potential_outcome_score(lambda1: f64, lambda2: f64, x0: f64, x1: f64) -> f64 {
    lambda1 * x0 + lambda2 * x1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpecificScore {
    pub x: f64,
    /// `f_Z(baseline, x, u_z)`.
    pub z_star: f64,
    pub score: f64,
}

/// `x = f_X(a, u_x)` is used as is; the direct edge into `Z` is replaced by
/// the baseline arm, `z* = f_Z(baseline, x, u_z)`.
pub fn path_specific_score(spec: &PathSpecificSpec, a: f64, u_x: f64, u_z: f64) -> PathSpecificScore {
    let x = spec.f_x.a_coef * a + spec.f_x.u_coef * u_x + spec.f_x.intercept;
    let z_star = spec.f_z.a_coef * spec.baseline + spec.f_z.x_coef * x + spec.f_z.u_coef * u_z + spec.f_z.intercept;
    PathSpecificScore { x, z_star, score: spec.weight_x * x + spec.weight_z * z_star }
}

/// Factual `Z = f_Z(a, f_X(a, u_x), u_z)` for the same structural model.
pub fn path_specific_factual_z(spec: &PathSpecificSpec, a: f64, u_x: f64, u_z: f64) -> f64 {
    let x = spec.f_x.a_coef * a + spec.f_x.u_coef * u_x + spec.f_x.intercept;
    spec.f_z.a_coef * a + spec.f_z.x_coef * x + spec.f_z.u_coef * u_z + spec.f_z.intercept
}

fn coin_flip_draw(p: f64, rng: &mut Rng) -> f64 {
    if rng.random_bool(p) {
        1.0
    } else {
        0.0
    }
}

/// `n` Bernoulli(`p`) draws, independent of any unit data.
pub fn coin_flip_score(p: f64, n: usize, seed: u64) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("p must lie in [0, 1], got {p}")));
    }
    let mut rng = crate::rng::seeded(seed);
    Ok((0..n).map(|_| rng.random_bool(p) as u8).collect())
}
