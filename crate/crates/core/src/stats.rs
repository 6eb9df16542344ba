//! Compensated accumulators, moment sums and the goodness-of-fit tests used
//! by the estimators and the sampler validation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Count, sum and sum of squares of a scalar sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    s: KahanSum,
    ss: KahanSum,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.s.add(x);
        self.ss.add(x * x);
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.s.merge(&other.s);
        self.ss.merge(&other.ss);
    }

    pub fn mean(&self) -> f64 {
        self.s.value() / self.n as f64
    }

    pub fn variance(&self) -> f64 {
        centered(self.ss.value(), self.s.value(), self.s.value(), self.n).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Sums of `x`, `y`, `x²`, `y²` and `xy` over paired samples.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairedMoments {
    pub n: u64,
    sx: KahanSum,
    sy: KahanSum,
    sxx: KahanSum,
    syy: KahanSum,
    sxy: KahanSum,
}

impl PairedMoments {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sx.add(x);
        self.sy.add(y);
        self.sxx.add(x * x);
        self.syy.add(y * y);
        self.sxy.add(x * y);
    }

    pub fn merge(&mut self, other: &PairedMoments) {
        self.n += other.n;
        self.sx.merge(&other.sx);
        self.sy.merge(&other.sy);
        self.sxx.merge(&other.sxx);
        self.syy.merge(&other.syy);
        self.sxy.merge(&other.sxy);
    }

    pub fn mean_x(&self) -> f64 {
        self.sx.value() / self.n as f64
    }

    pub fn mean_y(&self) -> f64 {
        self.sy.value() / self.n as f64
    }

    /// Sample variance of `x` (Bessel-corrected).
    pub fn var_x(&self) -> f64 {
        centered(self.sxx.value(), self.sx.value(), self.sx.value(), self.n).max(0.0)
    }

    pub fn var_y(&self) -> f64 {
        centered(self.syy.value(), self.sy.value(), self.sy.value(), self.n).max(0.0)
    }

    pub fn cov_xy(&self) -> f64 {
        centered(self.sxy.value(), self.sx.value(), self.sy.value(), self.n)
    }

    /// Standard error of the mean of `x`.
    pub fn stderr_x(&self) -> f64 {
        (self.var_x() / self.n as f64).sqrt()
    }

    pub fn stderr_y(&self) -> f64 {
        (self.var_y() / self.n as f64).sqrt()
    }

    /// `ȳ/x̄` with its first-order (delta-method) standard error.
    pub fn ratio_y_over_x(&self) -> (f64, f64) {
        let (mx, my) = (self.mean_x(), self.mean_y());
        let r = my / mx;
        let var = (self.var_y() - 2.0 * r * self.cov_xy() + r * r * self.var_x()).max(0.0)
            / (self.n as f64 * mx * mx);
        (r, var.sqrt())
    }
}

fn centered(sab: f64, sa: f64, sb: f64, n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    (sab - sa * sb / nf) / (nf - 1.0)
}

/// Outcome of a goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let j = j as f64;
        let term = sign * (-2.0 * j * j * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (effective-size correction of Stephens).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientSamples("KS test on an empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    Ok(TestResult {
        statistic: d,
        p_value: kolmogorov_sf((en + 0.12 + 0.11 / en) * d),
    })
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestResult> {
    if sample.is_empty() {
        return Err(Error::InsufficientSamples("KS test on an empty sample".into()));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let d = s
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    let en = n.sqrt();
    Ok(TestResult {
        statistic: d,
        p_value: kolmogorov_sf((en + 0.12 + 0.11 / en) * d),
    })
}

/// Two-sample χ² homogeneity test on binned counts with possibly unequal
/// totals. Bins empty in both samples are dropped.
pub fn chi2_two_sample(a: &[u64], b: &[u64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let ta: f64 = a.iter().sum::<u64>() as f64;
    let tb: f64 = b.iter().sum::<u64>() as f64;
    if ta == 0.0 || tb == 0.0 {
        return Err(Error::InsufficientSamples("χ² test on an empty histogram".into()));
    }
    let (ka, kb) = ((tb / ta).sqrt(), (ta / tb).sqrt());
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        let d = ka * x as f64 - kb * y as f64;
        stat += d * d / (x + y) as f64;
        bins += 1;
    }
    if bins < 2 {
        return Err(Error::InsufficientSamples("χ² test needs two occupied bins".into()));
    }
    let dist = ChiSquared::new((bins - 1) as f64)
        .map_err(|e| Error::InvalidArgument(format!("χ² distribution: {e}")))?;
    Ok(TestResult {
        statistic: stat,
        p_value: dist.sf(stat),
    })
}

/// χ² goodness of fit of observed counts against expected probabilities.
pub fn chi2_goodness_of_fit(observed: &[u64], probs: &[f64]) -> Result<TestResult> {
    if observed.len() != probs.len() {
        return Err(Error::DimensionMismatch {
            expected: probs.len(),
            found: observed.len(),
        });
    }
    let total = observed.iter().sum::<u64>() as f64;
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64)
        .map_err(|e| Error::InvalidArgument(format!("χ² distribution: {e}")))?;
    Ok(TestResult {
        statistic: stat,
        p_value: dist.sf(stat),
    })
}

/// Equal-width histogram on `[lo, hi)`; values outside are clamped into the
/// edge bins.
pub fn histogram(values: impl IntoIterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for v in values {
        counts[bin_index(v, lo, hi, bins)] += 1;
    }
    counts
}

pub fn bin_index(v: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let t = ((v - lo) / (hi - lo) * bins as f64).floor();
    (t.max(0.0) as usize).min(bins - 1)
}
