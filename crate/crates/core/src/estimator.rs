//! Endpoint estimator for the Gumbel domain with finite right endpoint.
//!
//! Notation follows the usual order-statistics convention: for a sample of
//! size `n`, `X(n-j,n)` is the `(j+1)`-th largest value. [`SortedSample::top`]
//! gives direct access to it.
//!
//! ```text
//! q̂  = (X(n,n) − X(n-k,n)) + S
//! x̂F = X(n-k,n) + q̂ = X(n,n) + S
//! S  = Σ_{i=0}^{k-1} a(i,k) · (X(n-k,n) − X(n-k-i,n)) ≥ 0
//! ```
//!
//! `S` is evaluated as a sum of non-negative terms, which keeps `x̂F ≥ X(n,n)`
//! exact in floating point.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Ascending order statistics of an i.i.d. sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Wraps values that are already in ascending order.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        Self::check_len_and_finite(&values)?;
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(format!(
                "values are not ascending at index {}: {} > {}",
                i,
                values[i],
                values[i + 1]
            )));
        }
        Ok(Self { values })
    }

    /// Sorts the observations ascending.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        Self::check_len_and_finite(&values)?;
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    fn check_len_and_finite(values: &[f64]) -> Result<()> {
        if values.len() < 2 {
            return Err(Error::InsufficientSample {
                n: values.len(),
                required: 2,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "observation {} is not finite: {}",
                i, values[i]
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a sample holds at least two observations.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `X(n-j,n)`, the `(j+1)`-th largest observation. Panics if `j >= n`.
    #[inline]
    pub fn top(&self, j: usize) -> f64 {
        self.values[self.values.len() - 1 - j]
    }

    /// Sample maximum `X(n,n)`.
    pub fn max(&self) -> f64 {
        self.top(0)
    }

    /// Returns a new sample with `f` applied to every value.
    ///
    /// `f` must be non-decreasing, otherwise the result is rejected.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_sorted(self.values.iter().map(|&v| f(v)).collect())
    }
}

fn require_estimable(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    // X(n-2k+1,n) is the deepest order statistic used
    let required = 2 * k;
    if n < required {
        return Err(Error::InsufficientSample { n, required });
    }
    Ok(())
}

/// Weights `a(i,k) = (log(k+i+1) − log(k+i)) / log 2` for `i = 0..k`.
///
/// They telescope to `log(2k/k)/log 2 = 1`.
pub fn weights(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok((k..2 * k)
        .map(|j| (1.0 / j as f64).ln_1p() / LN_2)
        .collect())
}

/// Precomputed weights for one threshold index `k`.
///
/// Reusing one instance across many samples avoids recomputing `k`
/// logarithms per call, which matters in the simulation engine.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingWeights {
    k: usize,
    weights: Vec<f64>,
}

impl SpacingWeights {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self {
            k,
            weights: weights(k)?,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted spacing sum `S = Σ a(i,k)(X(n-k,n) − X(n-k-i,n))`.
    fn spacing_sum(&self, sample: &SortedSample) -> Result<f64> {
        require_estimable(sample.len(), self.k)?;
        let threshold = sample.top(self.k);
        // i = 0 contributes a zero spacing.
        Ok(self
            .weights
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, w)| w * (threshold - sample.top(self.k + i)))
            .sum())
    }

    /// Endpoint estimate `X(n,n) + S`, without the scale estimate.
    pub fn endpoint(&self, sample: &SortedSample) -> Result<f64> {
        Ok(sample.max() + self.spacing_sum(sample)?)
    }

    pub fn estimate(&self, sample: &SortedSample) -> Result<EndpointEstimate> {
        let spacing = self.spacing_sum(sample)?;
        let k = self.k;
        let max = sample.max();
        Ok(EndpointEstimate {
            k,
            kstar: 2 * k,
            qhat: (max - sample.top(k)) + spacing,
            xhat: max + spacing,
            ahat: ahat_mle(sample, k)?,
            ci: None,
        })
    }
}

/// Closed-form estimate of `q(n/k)`, the gap between `X(n-k,n)` and the endpoint.
///
/// Algebraically equal to `X(n,n) + (1/log 2) Σ log((k+i)/(k+i+1)) X(n-k-i,n)`,
/// rearranged into non-negative spacings. Requires `n ≥ 2k`.
pub fn qhat_closed(sample: &SortedSample, k: usize) -> Result<f64> {
    let w = SpacingWeights::new(k)?;
    Ok((sample.max() - sample.top(k)) + w.spacing_sum(sample)?)
}

/// Integral form `−(1/log 2) ∫₀¹ (X(n-[2ks],n) − X(n-[ks],n)) ds/s`.
///
/// The integrand is a step function with breakpoints at `s = j/(2k)`. On
/// `[j/(2k), (j+1)/(2k))` it equals `X(n-j,n) − X(n-⌊j/2⌋,n)`, so the integral
/// is summed exactly, piece by piece. The piece `j = 0` vanishes, and
/// `X(n-2k,n)` only enters at the single point `s = 1`, so `n ≥ 2k` suffices.
pub fn qhat_integral(sample: &SortedSample, k: usize) -> Result<f64> {
    require_estimable(sample.len(), k)?;
    let mut acc = 0.0;
    for j in 1..2 * k {
        let step = sample.top(j) - sample.top(j / 2);
        let width = ((j + 1) as f64).ln() - (j as f64).ln();
        acc += step * width;
    }
    Ok(-acc / LN_2)
}

/// Mean excess of the top `k` observations over `X(n-k,n)`.
///
/// This is the generalized Pareto scale MLE under a zero shape, and serves as
/// the estimate of the scale `a(n/k)`.
pub fn ahat_mle(sample: &SortedSample, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k >= sample.len() {
        return Err(Error::InsufficientSample {
            n: sample.len(),
            required: k + 1,
        });
    }
    let threshold = sample.top(k);
    let total: f64 = (0..k).map(|i| sample.top(i) - threshold).sum();
    Ok(total / k as f64)
}

/// Endpoint estimate for threshold index `k` (uses the top `2k` order statistics).
pub fn estimate_endpoint(sample: &SortedSample, k: usize) -> Result<EndpointEstimate> {
    SpacingWeights::new(k)?.estimate(sample)
}

/// Two-sided interval from the limiting law of `(x̂F − xF)/â`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl ConfidenceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointEstimate {
    pub k: usize,
    /// Number of top order statistics consumed, `2k`.
    pub kstar: usize,
    pub qhat: f64,
    pub xhat: f64,
    pub ahat: f64,
    pub ci: Option<ConfidenceInterval>,
}

/// Attaches a `1 − alpha` confidence interval to `est`.
///
/// `(x̂F − xF)/â` is asymptotically a standard Gumbel shifted by
/// `−log 2/2 − lambda/log 2`, so the bounds are
/// `x̂F − â·Q(1 − alpha/2)` and `x̂F − â·Q(alpha/2)` with `Q` that law's
/// quantile. `lambda` is the second-order bias constant; it cannot be
/// estimated from data and is supplied by the caller (0 if unknown).
///
/// A zero scale estimate gives the point interval `[x̂F, x̂F]`.
pub fn confidence_band(est: &EndpointEstimate, alpha: f64, lambda: f64) -> Result<EndpointEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    if !(est.ahat >= 0.0 && est.ahat.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "scale estimate must be finite and non-negative, got {}",
            est.ahat
        )));
    }
    let (lower, upper) = if est.ahat == 0.0 {
        (est.xhat, est.xhat)
    } else {
        let law = GumbelLaw::endpoint_limit(lambda);
        (
            est.xhat - est.ahat * law.quantile(1.0 - alpha / 2.0),
            est.xhat - est.ahat * law.quantile(alpha / 2.0),
        )
    };
    Ok(EndpointEstimate {
        ci: Some(ConfidenceInterval {
            lower,
            upper,
            alpha,
            lambda,
        }),
        ..*est
    })
}

/// Intermediate sequence `k = round((log n)^r)`, clamped so that `2k + 1 ≤ n`.
///
/// `r` must lie in `(0, 2]`.
pub fn suggest_k(n: usize, r: f64) -> Result<usize> {
    if !(r > 0.0 && r <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "r must lie in (0, 2], got {r}"
        )));
    }
    if n < 3 {
        return Err(Error::InsufficientSample { n, required: 3 });
    }
    let raw = (n as f64).ln().powf(r).round();
    let upper = (n - 1) / 2;
    Ok((raw as usize).clamp(1, upper))
}

/// Gumbel law `exp(−exp(−(x − location)/scale))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelLaw {
    location: f64,
    scale: f64,
}

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

impl GumbelLaw {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() || !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gumbel law needs finite location and positive scale, got ({location}, {scale})"
            )));
        }
        Ok(Self { location, scale })
    }

    pub fn standard() -> Self {
        Self {
            location: 0.0,
            scale: 1.0,
        }
    }

    /// Limit law of `(x̂F − xF)/a(n/k)`: standard Gumbel shifted by
    /// `−log 2/2 − lambda/log 2`.
    pub fn endpoint_limit(lambda: f64) -> Self {
        Self {
            location: -LN_2 / 2.0 - lambda / LN_2,
            scale: 1.0,
        }
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (-(-(x - self.location) / self.scale).exp()).exp()
    }

    /// Inverse of [`cdf`](Self::cdf); `p = 0` and `p = 1` map to `∓∞`.
    pub fn quantile(&self, p: f64) -> f64 {
        if p.is_nan() || !(0.0..=1.0).contains(&p) {
            return f64::NAN;
        }
        self.location - self.scale * (-p.ln()).ln()
    }

    pub fn mean(&self) -> f64 {
        self.location + self.scale * EULER_GAMMA
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn variance(&self) -> f64 {
        PI * PI / 6.0 * self.scale * self.scale
    }
}
