//! Numerical residuals of the limit relations behind the estimator.
//!
//! Each residual tends to zero as `t → ∞` when the model satisfies the
//! relation. A [`ResidualReport`] evaluates one relation over a grid of `t`
//! and checks that the residual has shrunk between the first and last point.

use std::fmt;

use crate::error::{Error, Result};
use crate::models::{AuxFunctions, Family, ModelSpec};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

/// `t ∈ {1e2, 1e4, …, 1e12}`.
pub const DEFAULT_T_GRID: [f64; 6] = [1e2, 1e4, 1e6, 1e8, 1e10, 1e12];

fn quad_tolerance() -> Tolerance {
    Tolerance {
        abs: 0.0,
        rel: 1e-12,
        max_intervals: 4000,
    }
}

fn check_point(t: f64, x: f64, min_t: f64) -> Result<()> {
    if !(t > min_t) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must exceed {min_t}, got {t}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x must be positive, got {x}")));
    }
    if !(t * x > 1.0) {
        return Err(Error::InvalidArgument(format!("t·x must exceed 1, got {}", t * x)));
    }
    Ok(())
}

/// `(U(tx) − U(t))/a(t) − log x`.
pub fn pi_variation_residual(spec: &ModelSpec, t: f64, x: f64) -> Result<f64> {
    pi_variation_residual_with(spec, &spec.aux_functions(), t, x)
}

pub fn pi_variation_residual_with(spec: &ModelSpec, aux: &AuxFunctions, t: f64, x: f64) -> Result<f64> {
    check_point(t, x, 1.0)?;
    let (l, y) = (t.ln(), x.ln());
    let diff = spec.tail_quantile_log(l + y) - spec.tail_quantile_log(l);
    Ok(diff / (aux.a_log)(l) - y)
}

/// `((U(tx) − U(t))/a(t) − log x)/A(t) − (log x)²/2`, for `t > e`.
pub fn second_order_residual(spec: &ModelSpec, t: f64, x: f64) -> Result<f64> {
    second_order_residual_with(spec, &spec.aux_functions(), t, x)
}

pub fn second_order_residual_with(spec: &ModelSpec, aux: &AuxFunctions, t: f64, x: f64) -> Result<f64> {
    check_point(t, x, std::f64::consts::E)?;
    let rate = aux.second_order_log.as_ref().ok_or_else(|| {
        Error::Unsupported(format!("{spec} has no closed-form second-order function"))
    })?;
    let first = pi_variation_residual_with(spec, aux, t, x)?;
    let y = x.ln();
    Ok(first / rate(t.ln()) - 0.5 * y * y)
}

/// `q(t) = ∫_t^∞ a(s) ds/s`, computed as `∫_{log t}^∞ a(e^u) du`.
pub fn q_by_quadrature(spec: &ModelSpec, t: f64) -> Result<f64> {
    q_by_quadrature_with(&spec.aux_functions(), t)
}

pub fn q_by_quadrature_with(aux: &AuxFunctions, t: f64) -> Result<f64> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must exceed 1, got {t}")));
    }
    let a = &aux.a_log;
    integrate_to_infinity(|u| a(u), t.ln(), quad_tolerance()).map(|r| r.value)
}

/// Second-order rate `Q(t) = −1/(β log t)` of `∫_t^∞ (U(∞) − U(s)) ds/s`.
///
/// Only known for the negative Fréchet family.
pub fn integral_second_order(spec: &ModelSpec, t: f64) -> Result<f64> {
    match spec.family() {
        Family::NegativeFrechet => Ok(-1.0 / (spec.beta() * t.ln())),
        _ => Err(Error::Unsupported(format!(
            "{spec} has no closed-form integral second-order function"
        ))),
    }
}

/// Second-order residual of the integrated tail quantile:
///
/// ```text
/// (( ∫_t^{tx} (U(∞) − U(s)) ds/s ) / q(t) − log x) / Q(t) − (log x)²/2
/// ```
///
/// The inner integral is the difference `∫_t^∞ − ∫_{tx}^∞` of the centred
/// integrals, which are individually finite. Both it and `q(t)` come from
/// quadrature in `u = log s`.
pub fn second_order_q_residual(spec: &ModelSpec, t: f64, x: f64) -> Result<f64> {
    check_point(t, x, std::f64::consts::E)?;
    let rate = integral_second_order(spec, t)?;
    let (l, y) = (t.ln(), x.ln());
    let gap = integrate(|u| spec.tail_gap_log(u), l, l + y, quad_tolerance())?.value;
    let q = q_by_quadrature(spec, t)?;
    Ok((gap / q - y) / rate - 0.5 * y * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// [`pi_variation_residual`]
    PiVariation,
    /// [`second_order_residual`]
    SecondOrder,
    /// [`second_order_q_residual`]
    SecondOrderIntegral,
    /// `a(t)/q(t) → 0`, with `q` from quadrature.
    ScaleRatio,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::PiVariation,
        Relation::SecondOrder,
        Relation::SecondOrderIntegral,
        Relation::ScaleRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::PiVariation => "pi_variation_residual",
            Relation::SecondOrder => "second_order_residual",
            Relation::SecondOrderIntegral => "second_order_q_residual",
            Relation::ScaleRatio => "scale_ratio_a_over_q",
        }
    }

    pub fn supports(self, spec: &ModelSpec) -> bool {
        match self {
            Relation::PiVariation | Relation::ScaleRatio => true,
            Relation::SecondOrder | Relation::SecondOrderIntegral => {
                spec.family() == Family::NegativeFrechet
            }
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub relation: Relation,
    pub model: ModelSpec,
    /// Evaluation point `x` of the relation (unused by `ScaleRatio`).
    pub x: f64,
    pub t_grid: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl ResidualReport {
    /// `|last residual| ≤ |first residual|`.
    pub fn is_eventually_decreasing(&self) -> bool {
        match (self.residuals.first(), self.residuals.last()) {
            (Some(first), Some(last)) => last.abs() <= first.abs(),
            _ => false,
        }
    }
}

/// Evaluates `relation` for `spec` at every point of `t_grid`.
pub fn residual_report(spec: &ModelSpec, relation: Relation, t_grid: &[f64], x: f64) -> Result<ResidualReport> {
    residual_report_with(spec, &spec.aux_functions(), relation, t_grid, x)
}

/// As [`residual_report`], with caller-supplied auxiliary functions.
pub fn residual_report_with(
    spec: &ModelSpec,
    aux: &AuxFunctions,
    relation: Relation,
    t_grid: &[f64],
    x: f64,
) -> Result<ResidualReport> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("t grid must be non-empty and increasing".into()));
    }
    if !relation.supports(spec) {
        return Err(Error::Unsupported(format!("{relation} is not available for {spec}")));
    }
    let residuals = t_grid
        .iter()
        .map(|&t| match relation {
            Relation::PiVariation => pi_variation_residual_with(spec, aux, t, x),
            Relation::SecondOrder => second_order_residual_with(spec, aux, t, x),
            Relation::SecondOrderIntegral => second_order_q_residual(spec, t, x),
            Relation::ScaleRatio => Ok(aux.a(t) / q_by_quadrature_with(aux, t)?),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport {
        relation,
        model: *spec,
        x,
        t_grid: t_grid.to_vec(),
        residuals,
    })
}

/// Outcome of an exact identity check at one `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub model: ModelSpec,
    pub t: f64,
    pub relative_error: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.relative_error <= self.tolerance
    }
}

/// Relative gap between `−a(t)/q(t)` and `A(t)/(1 + β)` for the negative
/// Fréchet family, where the two agree exactly.
pub fn scale_identity_error(spec: &ModelSpec, t: f64) -> Result<f64> {
    let aux = spec.aux_functions();
    let (Some(q), Some(rate)) = (aux.q(t), aux.second_order(t)) else {
        return Err(Error::Unsupported(format!("{spec} lacks closed-form q and A")));
    };
    let lhs = -aux.a(t) / q;
    let rhs = rate / (1.0 + spec.beta());
    Ok(((lhs - rhs) / rhs).abs())
}

/// Relative gap between [`q_by_quadrature`] and the closed-form `q`.
pub fn quadrature_error(spec: &ModelSpec, t: f64) -> Result<f64> {
    let closed = spec
        .aux_functions()
        .q(t)
        .ok_or_else(|| Error::Unsupported(format!("{spec} has no closed-form q")))?;
    let numeric = q_by_quadrature(spec, t)?;
    Ok(((numeric - closed) / closed).abs())
}

/// Knobs for [`run_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Point `x` at which the relations are evaluated.
    pub x: f64,
    /// Test hook: flips the sign of the second-order function `A`, which
    /// must make the check fail.
    pub negate_second_order: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            x: 2.0,
            negate_second_order: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckSummary {
    pub reports: Vec<ResidualReport>,
    pub identities: Vec<IdentityCheck>,
    pub unsupported: Vec<(ModelSpec, Relation)>,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(ResidualReport::is_eventually_decreasing)
            && self.identities.iter().all(IdentityCheck::passed)
    }
}

/// Runs every supported relation for each model over [`DEFAULT_T_GRID`],
/// plus the negative Fréchet identity checks on `t = e², e⁴, …, e²⁴`.
pub fn run_check(models: &[ModelSpec], options: CheckOptions) -> Result<CheckSummary> {
    let mut summary = CheckSummary::default();
    for spec in models {
        let mut aux = spec.aux_functions();
        if options.negate_second_order {
            if let Some(rate) = aux.second_order_log.take() {
                aux.second_order_log = Some(std::sync::Arc::new(move |l| -rate(l)));
            }
        }
        for relation in Relation::ALL {
            if !relation.supports(spec) {
                summary.unsupported.push((*spec, relation));
                continue;
            }
            summary
                .reports
                .push(residual_report_with(spec, &aux, relation, &DEFAULT_T_GRID, options.x)?);
        }
        if spec.family() == Family::NegativeFrechet {
            for j in 1..=12 {
                let t = (2.0 * j as f64).exp();
                summary.identities.push(IdentityCheck {
                    name: "q_quadrature_vs_closed_form",
                    model: *spec,
                    t,
                    relative_error: quadrature_error(spec, t)?,
                    tolerance: 1e-8,
                });
                summary.identities.push(IdentityCheck {
                    name: "scale_identity_a_q_A",
                    model: *spec,
                    t,
                    relative_error: scale_identity_error(spec, t)?,
                    tolerance: 1e-12,
                });
            }
        }
    }
    Ok(summary)
}

/// The nine (family, β) cells with `β ∈ {1/4, 1/2, 1}`.
pub fn default_models() -> Vec<ModelSpec> {
    Family::ALL
        .into_iter()
        .flat_map(|f| [0.25, 0.5, 1.0].map(move |b| ModelSpec::new(f, b).expect("positive beta")))
        .collect()
}
