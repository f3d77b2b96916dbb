//! Parametric families with a finite right endpoint in the Gumbel domain.
//!
//! | family      | `1 − F(x)`                                          | `U(t)`                                   | `xF`   |
//! |-------------|-----------------------------------------------------|------------------------------------------|--------|
//! | `negfrechet`| `exp(−(xF − x)^(−β))`, `x ≤ xF`                     | `xF − (log t)^(−1/β)`                    | free   |
//! | `tanexp`    | `exp(−tan(x/β))`, `0 ≤ x < βπ/2`                    | `β·atan(log t)`                          | `βπ/2` |
//! | `arcsinexp` | `exp((π/2)^(−β) − asin(1 − x/β)^(−β))`, `0 ≤ x < β` | `β(1 − sin(((2/π)^β + log t)^(−1/β)))`   | `β`    |
//!
//! `U` is the tail quantile function, the inverse of `1/(1 − F)`. Most
//! routines work with `log t` directly, which keeps `t` up to `e^700` usable.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimator::SortedSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Negative Fréchet: `F(x) = 1 − exp(−(xF − x)^(−β))`.
    NegativeFrechet,
    /// `F(x) = 1 − exp(−tan(x/β))`.
    TanExp,
    /// `F(x) = 1 − exp((π/2)^(−β) − asin(1 − x/β)^(−β))`.
    ArcsinExp,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::NegativeFrechet, Family::TanExp, Family::ArcsinExp];

    /// Name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Family::NegativeFrechet => "negfrechet",
            Family::TanExp => "tanexp",
            Family::ArcsinExp => "arcsinexp",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown model '{s}', expected one of: negfrechet, tanexp, arcsinexp"
                ))
            })
    }
}

/// One family with its shape `β > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    family: Family,
    beta: f64,
    /// Location of the endpoint, only free for the negative Fréchet family.
    location: f64,
}

impl ModelSpec {
    pub fn new(family: Family, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        Ok(Self {
            family,
            beta,
            location: 1.0,
        })
    }

    pub fn negative_frechet(beta: f64) -> Result<Self> {
        Self::new(Family::NegativeFrechet, beta)
    }

    pub fn tan_exp(beta: f64) -> Result<Self> {
        Self::new(Family::TanExp, beta)
    }

    pub fn arcsin_exp(beta: f64) -> Result<Self> {
        Self::new(Family::ArcsinExp, beta)
    }

    /// Moves the endpoint of a negative Fréchet model (default 1).
    pub fn with_endpoint(self, endpoint: f64) -> Result<Self> {
        if self.family != Family::NegativeFrechet {
            return Err(Error::Unsupported(format!(
                "the endpoint of {} is fixed by beta",
                self.family
            )));
        }
        if !endpoint.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "endpoint must be finite, got {endpoint}"
            )));
        }
        Ok(Self {
            location: endpoint,
            ..self
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// True right endpoint `xF = U(∞)`.
    pub fn endpoint(&self) -> f64 {
        match self.family {
            Family::NegativeFrechet => self.location,
            Family::TanExp => self.beta * FRAC_PI_2,
            Family::ArcsinExp => self.beta,
        }
    }

    /// Distribution function; values outside the support map to 0 or 1.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::InvalidArgument("cdf evaluated at NaN".into()));
        }
        let b = self.beta;
        let xf = self.endpoint();
        if x >= xf {
            return Ok(1.0);
        }
        // F = 1 − exp(−h) with h the cumulative hazard
        let hazard = match self.family {
            Family::NegativeFrechet => (xf - x).powf(-b),
            Family::TanExp | Family::ArcsinExp if x <= 0.0 => return Ok(0.0),
            Family::TanExp => (x / b).tan(),
            Family::ArcsinExp => (1.0 - x / b).asin().powf(-b) - FRAC_PI_2.powf(-b),
        };
        Ok(-(-hazard).exp_m1())
    }

    /// Survival function `1 − F(x)`, accurate in the far tail.
    pub fn survival(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::InvalidArgument("survival evaluated at NaN".into()));
        }
        let b = self.beta;
        let xf = self.endpoint();
        if x >= xf {
            return Ok(0.0);
        }
        Ok(match self.family {
            Family::NegativeFrechet => (-(xf - x).powf(-b)).exp(),
            Family::TanExp | Family::ArcsinExp if x <= 0.0 => 1.0,
            Family::TanExp => (-(x / b).tan()).exp(),
            Family::ArcsinExp => (FRAC_PI_2.powf(-b) - (1.0 - x / b).asin().powf(-b)).exp(),
        })
    }

    /// Tail quantile `U(t)` for `t ≥ 1`.
    ///
    /// For the negative Fréchet family `U(1) = −∞`.
    pub fn tail_quantile(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail quantile needs t >= 1, got {t}"
            )));
        }
        Ok(self.tail_quantile_log(t.ln()))
    }

    /// `U(e^l)` for `l = log t ≥ 0`. `l = ∞` yields the endpoint.
    pub fn tail_quantile_log(&self, l: f64) -> f64 {
        let b = self.beta;
        match self.family {
            Family::NegativeFrechet => self.location - l.powf(-1.0 / b),
            Family::TanExp => b * l.atan(),
            Family::ArcsinExp => {
                let w = ((2.0 / PI).powf(b) + l).powf(-1.0 / b);
                b * (1.0 - w.sin())
            }
        }
    }

    /// Gap to the endpoint `U(∞) − U(e^l)`, without cancellation.
    pub fn tail_gap_log(&self, l: f64) -> f64 {
        let b = self.beta;
        match self.family {
            Family::NegativeFrechet => l.powf(-1.0 / b),
            Family::TanExp => b * l.recip().atan(),
            Family::ArcsinExp => b * ((2.0 / PI).powf(b) + l).powf(-1.0 / b).sin(),
        }
    }

    /// Draws `n` observations by inverse transform and sorts them.
    ///
    /// `X = U(1/V)` with `V` uniform on the open interval `(0, 1)`, computed
    /// as `U(e^E)` with `E = −log V`. The generator is ChaCha8 seeded through
    /// `seed_from_u64(seed)`, so a seed fixes the output on every platform.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SortedSample> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample size must be at least 2, got {n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n)
            .map(|_| {
                let v: f64 = rng.sample(Open01);
                self.tail_quantile_log(-v.ln())
            })
            .collect();
        SortedSample::from_unsorted(values)
    }

    /// Closed-form auxiliary functions for this model.
    pub fn aux_functions(&self) -> AuxFunctions {
        let b = self.beta;
        match self.family {
            Family::NegativeFrechet => AuxFunctions {
                a_log: Arc::new(move |l: f64| l.powf(-1.0 / b - 1.0) / b),
                q_log: Some(Arc::new(move |l: f64| l.powf(-1.0 / b))),
                second_order_log: Some(Arc::new(move |l: f64| -(1.0 + 1.0 / b) / l)),
            },
            // β/(1 + log² t) = dU/d(log t), the reciprocal hazard at U(t).
            Family::TanExp => AuxFunctions {
                a_log: Arc::new(move |l: f64| b / (1.0 + l * l)),
                q_log: None,
                second_order_log: None,
            },
            Family::ArcsinExp => AuxFunctions {
                a_log: Arc::new(move |l: f64| l.powf(-(1.0 / b + 1.0)) * l.powf(-1.0 / b).cos()),
                q_log: None,
                second_order_log: None,
            },
        }
    }

    /// Short label such as `negfrechet(beta=0.5)`.
    pub fn label(&self) -> String {
        match self.family {
            Family::NegativeFrechet if self.location != 1.0 => {
                format!("{}(beta={}, xF={})", self.family, self.beta, self.location)
            }
            _ => format!("{}(beta={})", self.family, self.beta),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Function of `l = log t`.
pub type LogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Auxiliary functions of a model, stored as functions of `log t`.
///
/// - `a`: first-order scale, `(U(tx) − U(t))/a(t) → log x`.
/// - `q(t) = ∫_t^∞ a(s) ds/s`, the gap `U(∞) − U(t)` to first order.
/// - `A`: second-order rate, `((U(tx) − U(t))/a(t) − log x)/A(t) → (log x)²/2`.
///
/// `q` and `A` are only available in closed form for the negative Fréchet
/// family; [`crate::asymptotics::q_by_quadrature`] computes `q` for the others.
#[derive(Clone)]
pub struct AuxFunctions {
    pub a_log: LogFn,
    pub q_log: Option<LogFn>,
    pub second_order_log: Option<LogFn>,
}

impl AuxFunctions {
    pub fn a(&self, t: f64) -> f64 {
        (self.a_log)(t.ln())
    }

    pub fn q(&self, t: f64) -> Option<f64> {
        self.q_log.as_ref().map(|f| f(t.ln()))
    }

    pub fn second_order(&self, t: f64) -> Option<f64> {
        self.second_order_log.as_ref().map(|f| f(t.ln()))
    }
}

impl fmt::Debug for AuxFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AuxFunctions")
            .field("q", &self.q_log.is_some())
            .field("second_order", &self.second_order_log.is_some())
            .finish_non_exhaustive()
    }
}
