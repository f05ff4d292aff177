//! Distribution helpers shared across modules: the standard normal, a
//! possibly-degenerate univariate Gaussian, two-sample distances and moments.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Standard normal cdf.
pub fn phi(z: f64) -> f64 {
    standard_normal().cdf(z)
}

/// Standard normal density.
pub fn phi_density(z: f64) -> f64 {
    standard_normal().pdf(z)
}

/// Standard normal quantile. `probit(0) = -inf`, `probit(1) = +inf`.
pub fn probit(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        standard_normal().inverse_cdf(p)
    }
}

/// A univariate Gaussian law. A zero variance denotes a point mass at `mean`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub variance: f64,
}

impl Gaussian {
    pub fn new(mean: f64, variance: f64) -> Self {
        debug_assert!(variance >= 0.0);
        Self { mean, variance: variance.max(0.0) }
    }

    pub fn point_mass(at: f64) -> Self {
        Self { mean: at, variance: 0.0 }
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.variance == 0.0
    }

    /// Right-continuous cdf; a step at `mean` for the degenerate case.
    pub fn cdf(&self, y: f64) -> f64 {
        if self.is_degenerate() {
            if y >= self.mean {
                1.0
            } else {
                0.0
            }
        } else {
            phi((y - self.mean) / self.sd())
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if self.is_degenerate() {
            self.mean
        } else {
            self.mean + self.sd() * probit(p)
        }
    }

    /// Law of `scale * Y + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Gaussian {
        Gaussian::new(scale * self.mean + shift, scale * scale * self.variance)
    }
}

/// Two point masses closer than this are treated as the same atom.
pub(crate) fn atoms_coincide(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Kolmogorov-Smirnov distance between a point mass at `at` and `law`.
pub fn ks_point_mass_vs_gaussian(at: f64, law: &Gaussian) -> f64 {
    if law.is_degenerate() {
        return if atoms_coincide(at, law.mean) { 0.0 } else { 1.0 };
    }
    let below = law.cdf(at);
    below.max(1.0 - below)
}

/// Wasserstein-1 distance between a point mass at `at` and `law`,
/// i.e. `E|Y - at|` for `Y ~ law`.
pub fn w1_point_mass_vs_gaussian(at: f64, law: &Gaussian) -> f64 {
    if law.is_degenerate() {
        let d = (at - law.mean).abs();
        return if atoms_coincide(at, law.mean) { 0.0 } else { d };
    }
    let s = law.sd();
    let d = (law.mean - at) / s;
    s * (2.0 * phi_density(d) + d * (2.0 * phi(d) - 1.0))
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_y |F_a(y) - F_b(y)|`.
///
/// Returns 0 when either sample is empty.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // advance past every copy of the smaller value in both samples
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous cdf.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let s = sorted(sample);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Wasserstein-1 distance between two empirical laws, `∫ |F_a - F_b|`.
pub fn wasserstein1_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        total += (next - prev) * (i as f64 / na - j as f64 / nb).abs();
        while i < a.len() && a[i] <= next {
            i += 1;
        }
        while j < b.len() && b[j] <= next {
            j += 1;
        }
        prev = next;
    }
    total
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    covariance(xs, xs)
}

/// Pearson correlation; NaN when either input is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / (variance(xs) * variance(ys)).sqrt()
}
