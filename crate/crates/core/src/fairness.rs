//! Demographic parity (an observational property of `(A, Yhat)`) against
//! counterfactual fairness (a cross-world property given `(A = a, X = x)`).
//!
//! [`dp_gap`] compares the score law across arms. [`cf_gap`] compares the
//! factual score law given `(A = a, X = x)` with the law of the score in the
//! world where `A` is set to the other arm, via the counterfactual posterior.
//! [`adversary_rho`] sweeps the unidentified cross-world correlation: every
//! `rho` explains the observed data equally well, yet the gap moves.

use serde::{Deserialize, Serialize};

use crate::causal_models::{
    check_arm, counterfactual_posterior, gp_observational_equivalence_check, sample_cross_world, Arm,
    BinaryTreatmentGaussianModel, GpEquivalenceReport, GpTreatmentModel,
};
use crate::error::{Error, Result};
use crate::predictors::{linear_cancellation_coefficients, CdfFamily, OutputMap, Predictor};
use crate::rng::{seeded, substream};
use crate::stats::{self, ks_point_mass_vs_gaussian, phi, w1_point_mass_vs_gaussian, Gaussian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    #[default]
    KolmogorovSmirnov,
    Wasserstein1,
}

impl std::str::FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ks" | "kolmogorov_smirnov" => Ok(DistanceKind::KolmogorovSmirnov),
            "w1" | "wasserstein1" => Ok(DistanceKind::Wasserstein1),
            other => Err(Error::input(format!("unknown distance `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionDistance {
    pub kind: DistanceKind,
    pub value: f64,
}

impl DistributionDistance {
    fn new(kind: DistanceKind, value: f64) -> Self {
        debug_assert!(value >= 0.0);
        debug_assert!(kind != DistanceKind::KolmogorovSmirnov || value <= 1.0 + 1e-12);
        Self { kind, value }
    }

    fn between_samples(kind: DistanceKind, a: &[f64], b: &[f64]) -> Self {
        let v = match kind {
            DistanceKind::KolmogorovSmirnov => stats::ks_two_sample(a, b),
            DistanceKind::Wasserstein1 => stats::wasserstein1_two_sample(a, b),
        };
        Self::new(kind, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    MonteCarlo,
}

/// Observed point `(A = a, X = x)` at which counterfactual fairness is probed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditioningPoint {
    pub x: f64,
    pub a: Arm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub dp_gap: DistributionDistance,
    pub cf_gap: DistributionDistance,
    pub conditioning_point: ConditioningPoint,
    pub method: Method,
    pub n_samples: usize,
    pub seed: u64,
}

const MAX_RESAMPLES: u64 = 16;

/// Two-sample KS distance between `{score | A = 0}` and `{score | A = 1}`.
pub fn dp_gap(predictor: &Predictor, model: &BinaryTreatmentGaussianModel, n: usize, seed: u64) -> Result<DistributionDistance> {
    dp_gap_with(predictor, model, n, seed, DistanceKind::KolmogorovSmirnov)
}

pub fn dp_gap_with(
    predictor: &Predictor,
    model: &BinaryTreatmentGaussianModel,
    n: usize,
    seed: u64,
    kind: DistanceKind,
) -> Result<DistributionDistance> {
    predictor.validate()?;
    model.validate()?;
    if model.p1 == 0.0 || model.p1 == 1.0 {
        return Err(Error::input("demographic parity is undefined when one arm has probability 0"));
    }
    // an empty arm in a small sample triggers a resample on the next sub-stream
    for attempt in 0..MAX_RESAMPLES {
        let stream = if attempt == 0 { seed } else { substream(seed, attempt) };
        let draws = sample_cross_world(model, n, stream)?;
        let mut score_rng = seeded(substream(stream, u64::MAX));
        let (mut s0, mut s1) = (Vec::new(), Vec::new());
        for d in &draws {
            let s = predictor.score(d, &mut score_rng)?;
            if d.a == 0 {
                s0.push(s);
            } else {
                s1.push(s);
            }
        }
        if !s0.is_empty() && !s1.is_empty() {
            return Ok(DistributionDistance::between_samples(kind, &s0, &s1));
        }
    }
    Err(Error::input(format!("an arm stayed empty after {MAX_RESAMPLES} resamples of n = {n}")))
}

/// Closed-form counterfactual-fairness gap at `(A = a, X = x)` in KS.
pub fn cf_gap(
    predictor: &Predictor,
    model: &BinaryTreatmentGaussianModel,
    x: f64,
    a: Arm,
) -> Result<DistributionDistance> {
    cf_gap_with(predictor, model, x, a, DistanceKind::KolmogorovSmirnov)
}

/// Closed-form gap between the factual score law (a point mass for
/// deterministic per-arm predictors) and the pushforward of the
/// counterfactual posterior through the other arm's score.
pub fn cf_gap_with(
    predictor: &Predictor,
    model: &BinaryTreatmentGaussianModel,
    x: f64,
    a: Arm,
    kind: DistanceKind,
) -> Result<DistributionDistance> {
    predictor.validate()?;
    let a = check_arm(a)?;
    let other = 1 - a;
    let posterior = counterfactual_posterior(model, a, x)?;

    let point_vs = |at: f64, law: &Gaussian| match kind {
        DistanceKind::KolmogorovSmirnov => ks_point_mass_vs_gaussian(at, law),
        DistanceKind::Wasserstein1 => w1_point_mass_vs_gaussian(at, law),
    };

    let value = match predictor {
        // both worlds evaluate the same function of (X0, X1), or an
        // independent coin with the same bias
        Predictor::PoLinear { .. } | Predictor::CoinFlip { .. } => 0.0,
        Predictor::Standardized(m) => {
            let (mu_a, s_a) = m.arm(a);
            let (mu_c, s_c) = m.arm(other);
            point_vs((x - mu_a) / s_a, &posterior.affine(1.0 / s_c, -mu_c / s_c))
        }
        Predictor::LinearAx { lambda1, lambda2, lambda3 } => {
            let factual = lambda1 * a as f64 + lambda2 * x + lambda3;
            let law = posterior.affine(*lambda2, lambda1 * other as f64 + lambda3);
            point_vs(factual, &law)
        }
        Predictor::Rosenblatt { family: CdfFamily::Gaussian(m), h } => {
            let (mu_a, s_a) = m.arm(a);
            let (mu_c, s_c) = m.arm(other);
            let z_factual = (x - mu_a) / s_a;
            let z_law = posterior.affine(1.0 / s_c, -mu_c / s_c);
            match (kind, h) {
                // KS is invariant under the strictly increasing h o Phi
                (DistanceKind::KolmogorovSmirnov, _) | (DistanceKind::Wasserstein1, OutputMap::Probit) => {
                    point_vs(z_factual, &z_law)
                }
                (DistanceKind::Wasserstein1, OutputMap::Identity) => {
                    expected_abs_phi_deviation(phi(z_factual), &z_law)
                }
            }
        }
        Predictor::Rosenblatt { family: CdfFamily::Empirical { .. }, .. } => {
            return Err(Error::input(
                "no closed form for empirical Rosenblatt predictors; use the Monte-Carlo gap",
            ))
        }
        Predictor::PathSpecific(_) => {
            return Err(Error::input("path-specific predictor is not defined per arm of this model"))
        }
    };
    Ok(DistributionDistance::new(kind, value))
}

/// `E|Phi(Z) - u|` for `Z ~ law`, by Simpson's rule over `mean ± 12 sd`.
fn expected_abs_phi_deviation(u: f64, law: &Gaussian) -> f64 {
    if law.is_degenerate() {
        let d = (phi(law.mean) - u).abs();
        return if d <= 1e-12 { 0.0 } else { d };
    }
    let (m, s) = (law.mean, law.sd());
    let steps = 4000;
    let h = 24.0 / steps as f64;
    let f = |t: f64| (phi(m + s * t) - u).abs() * stats::phi_density(t);
    let mut acc = f(-12.0) + f(12.0);
    for i in 1..steps {
        let t = -12.0 + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
    }
    acc * h / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloGap {
    pub distance: DistributionDistance,
    pub n_samples: usize,
    pub n_accepted: usize,
    pub window: f64,
    pub seed: u64,
}

/// Rejection-sampling estimate of the counterfactual-fairness gap: keep the
/// joint draws whose `X_a` falls within `x ± window`, then compare the
/// predictor in the factual world with the predictor in the world where
/// `A` is set to the other arm, unit by unit.
#[allow(clippy::too_many_arguments)]
pub fn cf_gap_monte_carlo(
    predictor: &Predictor,
    model: &BinaryTreatmentGaussianModel,
    x: f64,
    a: Arm,
    n: usize,
    seed: u64,
    window: f64,
    kind: DistanceKind,
) -> Result<MonteCarloGap> {
    predictor.validate()?;
    model.validate()?;
    let a = check_arm(a)?;
    if !(window > 0.0) {
        return Err(Error::input("rejection window must be positive"));
    }
    let mut rng = seeded(seed);
    let mut score_rng = seeded(substream(seed, 1));
    let (mut factual, mut counterfactual) = (Vec::new(), Vec::new());
    for _ in 0..n {
        let d = model.draw(&mut rng);
        if (d.outcome(a) - x).abs() > window {
            continue;
        }
        factual.push(predictor.score(&d.in_world(a), &mut score_rng)?);
        counterfactual.push(predictor.score(&d.in_world(1 - a), &mut score_rng)?);
    }
    if factual.is_empty() {
        return Err(Error::input(format!(
            "no draws landed within {window} of x = {x}; increase n or the window"
        )));
    }
    Ok(MonteCarloGap {
        distance: DistributionDistance::between_samples(kind, &factual, &counterfactual),
        n_samples: n,
        n_accepted: factual.len(),
        window,
        seed,
    })
}

/// Closed-form gap averaged over `n_points` draws of `(A, X)` from the
/// factual law.
pub fn cf_gap_aggregate(
    predictor: &Predictor,
    model: &BinaryTreatmentGaussianModel,
    n_points: usize,
    seed: u64,
    kind: DistanceKind,
) -> Result<DistributionDistance> {
    let draws = sample_cross_world(model, n_points, seed)?;
    let mut total = 0.0;
    for d in &draws {
        total += cf_gap_with(predictor, model, d.x, d.a, kind)?.value;
    }
    Ok(DistributionDistance::new(kind, total / n_points as f64))
}

/// Both gaps for one predictor: DP by simulation, CF in closed form at the
/// given conditioning point.
pub fn fairness_report(
    predictor: &Predictor,
    model: &BinaryTreatmentGaussianModel,
    point: ConditioningPoint,
    n: usize,
    seed: u64,
    kind: DistanceKind,
) -> Result<FairnessReport> {
    Ok(FairnessReport {
        dp_gap: dp_gap_with(predictor, model, n, seed, kind)?,
        cf_gap: cf_gap_with(predictor, model, point.x, point.a, kind)?,
        conditioning_point: point,
        method: Method::ClosedForm,
        n_samples: n,
        seed,
    })
}

/// How each grid point's gap is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GapEvaluation {
    ClosedForm,
    /// Grid point `i` uses sub-stream `i` of `seed`.
    MonteCarlo { n: usize, seed: u64, window: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoGap {
    pub rho: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryResult {
    pub rho_star: f64,
    pub gap_star: f64,
    pub profile: Vec<RhoGap>,
}

/// Evaluate the counterfactual gap at `(x, a)` in every world `base.with_rho(rho)`
/// for `rho` in `grid` and return the worst one. Ties go to the smallest
/// `|rho|`, then to the earlier grid entry.
pub fn adversary_rho(
    predictor: &Predictor,
    base: &BinaryTreatmentGaussianModel,
    x: f64,
    a: Arm,
    grid: &[f64],
    kind: DistanceKind,
    eval: GapEvaluation,
) -> Result<AdversaryResult> {
    if grid.is_empty() {
        return Err(Error::input("rho grid is empty"));
    }
    if let Some(r) = grid.iter().find(|r| !(r.abs() <= 1.0)) {
        return Err(Error::input(format!("rho grid value {r} outside [-1, 1]")));
    }
    let profile = grid
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let world = base.with_rho(rho)?;
            let gap = match eval {
                GapEvaluation::ClosedForm => cf_gap_with(predictor, &world, x, a, kind)?.value,
                GapEvaluation::MonteCarlo { n, seed, window } => {
                    cf_gap_monte_carlo(predictor, &world, x, a, n, substream(seed, i as u64), window, kind)?
                        .distance
                        .value
                }
            };
            Ok(RhoGap { rho, gap })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = profile[0];
    for p in &profile[1..] {
        let tie = (p.gap - best.gap).abs() <= 1e-12;
        if (!tie && p.gap > best.gap) || (tie && p.rho.abs() < best.rho.abs()) {
            best = *p;
        }
    }
    Ok(AdversaryResult { rho_star: best.rho, gap_star: best.gap, profile })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeGap {
    pub x: f64,
    pub a: Arm,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldCheck {
    pub model: BinaryTreatmentGaussianModel,
    pub dp_gap: f64,
    pub cf_gaps: Vec<ProbeGap>,
    pub max_cf_gap: f64,
    pub coin_flip_max_cf_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongAssumptionReport {
    pub n: usize,
    pub seed: u64,
    /// `(lambda1, lambda2)` of `Yhat = lambda1 * A + lambda2 * X`.
    pub coefficients: (f64, f64),
    /// `X = A + eps` with one shared error.
    pub one_dimensional: WorldCheck,
    /// `X = A + eps_A`, GP errors on the grid `{0, 1}`, length scale 1.
    pub gp_world: WorldCheck,
    pub observational_equivalence: GpEquivalenceReport,
}

const PROBE_POINTS: usize = 20;

fn check_world(
    predictor: &Predictor,
    model: BinaryTreatmentGaussianModel,
    n: usize,
    seed: u64,
) -> Result<WorldCheck> {
    let probes = sample_cross_world(&model, PROBE_POINTS, substream(seed, 7))?;
    let coin = Predictor::CoinFlip { p: 0.5 };
    let mut cf_gaps = Vec::with_capacity(probes.len());
    let mut coin_max: f64 = 0.0;
    for d in &probes {
        cf_gaps.push(ProbeGap { x: d.x, a: d.a, gap: cf_gap(predictor, &model, d.x, d.a)?.value });
        coin_max = coin_max.max(cf_gap(&coin, &model, d.x, d.a)?.value);
    }
    let max_cf_gap = cf_gaps.iter().map(|p| p.gap).fold(0.0, f64::max);
    Ok(WorldCheck {
        model,
        dp_gap: dp_gap(predictor, &model, n, seed)?.value,
        cf_gaps,
        max_cf_gap,
        coin_flip_max_cf_gap: coin_max,
    })
}

/// Under `X = A + eps` the parity-enforcing `Yhat = X - A` is a function of
/// `eps` alone and hence counterfactually fair; under the GP-error world with
/// identical observational law the same predictor is not.
pub fn strong_assumption_implication_check(n: usize, seed: u64) -> Result<StrongAssumptionReport> {
    let one_dim = BinaryTreatmentGaussianModel::new(0.0, 1.0, 1.0, 1.0, 1.0, 0.5)?;
    // population moments of (A, X): eps is independent of A
    let cov_aa = one_dim.p1 * (1.0 - one_dim.p1);
    let cov_ax = (one_dim.mu1 - one_dim.mu0) * cov_aa;
    let (lambda1, lambda2) = linear_cancellation_coefficients(cov_aa, cov_ax)?;
    let predictor = Predictor::LinearAx { lambda1, lambda2, lambda3: 0.0 };

    let gp = GpTreatmentModel::new(1.0, 1.0, vec![0.0, 1.0])?;
    let gp_binary = gp.restricted_to(0.0, 1.0, one_dim.p1)?;

    Ok(StrongAssumptionReport {
        n,
        seed,
        coefficients: (lambda1, lambda2),
        one_dimensional: check_world(&predictor, one_dim, n, substream(seed, 0))?,
        gp_world: check_world(&predictor, gp_binary, n, substream(seed, 1))?,
        observational_equivalence: gp_observational_equivalence_check(&gp, n, substream(seed, 2))?,
    })
}
