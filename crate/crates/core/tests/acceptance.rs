//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use endpointkit::asymptotics::{default_models, run_check, scale_identity_error, quadrature_error, CheckOptions};
use endpointkit::cli;
use endpointkit::estimator::{estimate_endpoint, qhat_closed, qhat_integral, suggest_k, weights};
use endpointkit::models::{Family, ModelSpec};
use endpointkit::montecarlo::{run_cell, standardized_errors, StudyConfig};
use endpointkit::SortedSample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within_budget(v: Verdict, elapsed: Duration, budget: Duration) -> Verdict {
    let over = elapsed > budget;
    Verdict {
        pass: v.pass && !over,
        detail: format!(
            "{}; {:.1}s of {}s{}",
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if over { " (over budget)" } else { "" }
        ),
    }
}

/// A random sample of size `n` drawn from one of a few shapes, including ties.
fn random_sample(rng: &mut ChaCha8Rng, n: usize) -> SortedSample {
    let shape = rng.gen_range(0..4);
    let values: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            match shape {
                0 => u,
                1 => -(1.0 - u).ln(),
                2 => 1e3 * (u - 0.5),
                _ => (u * 8.0).floor(),
            }
        })
        .collect();
    SortedSample::from_unsorted(values).unwrap()
}

fn form_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=1000);
        let sample = random_sample(&mut rng, n);
        let k = rng.gen_range(1..=n / 2);
        let closed = qhat_closed(&sample, k).unwrap();
        let integral = qhat_integral(&sample, k).unwrap();
        let scale = closed.abs().max(f64::MIN_POSITIVE);
        if closed != integral {
            worst = worst.max((closed - integral).abs() / scale);
        }
    }
    verdict(worst <= 1e-9, format!("max relative gap {worst:.3e} (tol 1e-9)"))
}

fn dominance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..100_000 {
        let n = rng.gen_range(2..=200);
        let sample = random_sample(&mut rng, n);
        let k = rng.gen_range(1..=n / 2);
        if estimate_endpoint(&sample, k).unwrap().xhat < sample.max() {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("{violations} violations in 100000 instances"))
}

fn weight_normalization() -> Verdict {
    let worst = (1..=500)
        .map(|k| (weights(k).unwrap().iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(worst <= 1e-12, format!("max |sum - 1| = {worst:.3e} for k <= 500 (tol 1e-12)"))
}

fn k_rule() -> Verdict {
    let k = suggest_k(1000, 2.0).unwrap();
    verdict(k == 48 && 2 * k == 96, format!("suggest_k(1000, 2) = {k}, k* = {}", 2 * k))
}

fn model_identities() -> Verdict {
    let mut worst_q: f64 = 0.0;
    let mut worst_id: f64 = 0.0;
    for beta in [0.25, 0.5, 1.0] {
        let spec = ModelSpec::negative_frechet(beta).unwrap();
        for j in 1..=12 {
            let t = (2.0 * j as f64).exp();
            worst_q = worst_q.max(quadrature_error(&spec, t).unwrap());
            worst_id = worst_id.max(scale_identity_error(&spec, t).unwrap());
        }
    }
    verdict(
        worst_q <= 1e-8 && worst_id <= 1e-12,
        format!("(a) quadrature q max rel err {worst_q:.3e} (tol 1e-8); (b) -a/q = A/(1+beta) max rel err {worst_id:.3e} (tol 1e-12)"),
    )
}

fn consistency_trend() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for spec in [ModelSpec::negative_frechet(0.5).unwrap(), ModelSpec::tan_exp(1.0).unwrap()] {
        let rows: Vec<_> = [100, 1000, 10_000]
            .into_iter()
            .map(|n| {
                let kstar = 2 * suggest_k(n, 2.0).unwrap();
                run_cell(&StudyConfig::new(spec, n, 500, 2024), kstar).unwrap()
            })
            .collect();
        let mse_down = rows.windows(2).all(|w| w[1].mse_xhat < w[0].mse_xhat);
        let bias_down = rows[2].bias.abs() < rows[0].bias.abs();
        pass &= mse_down && bias_down;
        let mse: Vec<String> = rows.iter().map(|r| format!("{:.4e}", r.mse_xhat)).collect();
        parts.push(format!(
            "{}: mse [{}] {}, |bias| {:.4} -> {:.4} {}",
            spec.label(),
            mse.join(", "),
            if mse_down { "decreasing" } else { "NOT decreasing" },
            rows[0].bias.abs(),
            rows[2].bias.abs(),
            if bias_down { "shrinks" } else { "does NOT shrink" },
        ));
    }
    verdict(pass, parts.join("; "))
}

fn distribution_shape() -> Verdict {
    let spec = ModelSpec::negative_frechet(0.5).unwrap();
    let config = StudyConfig::new(spec, 10_000, 1000, 2024).collecting_standardized();
    let errs = standardized_errors(&config, 96).unwrap();
    let m = errs.values.len() as f64;
    let mean = errs.values.iter().sum::<f64>() / m;
    let var = errs.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let m3 = errs.values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / m;
    let skew = m3 / var.powf(1.5);
    let gumbel_var = PI * PI / 6.0;
    let ratio = var / gumbel_var;
    let pass = (0.7..=1.3).contains(&ratio) && skew > 0.0;
    verdict(
        pass,
        format!(
            "variance {var:.4} = {ratio:.3} x pi^2/6 (band [0.7, 1.3]), skewness {skew:.3} (must be > 0), {} replicates dropped",
            errs.missing
        ),
    )
}

/// One-sample Kolmogorov–Smirnov statistic of sorted `xs` against `cdf`.
fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

fn sampler_validity() -> Verdict {
    let n = 50_000;
    let bound = 1.63 / (n as f64).sqrt();
    let mut worst = (0.0, String::new());
    let mut pass = true;
    for (i, spec) in default_models().iter().enumerate() {
        let sample = spec.sample(n, 800 + i as u64).unwrap();
        let d = ks_statistic(sample.values(), |x| spec.cdf(x).unwrap());
        pass &= d < bound;
        if d > worst.0 {
            worst = (d, spec.label());
        }
    }
    verdict(pass, format!("max D = {:.5} ({}) vs bound {bound:.5}", worst.0, worst.1))
}

fn simulate_output(threads: &str) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        [
            "endpointkit", "simulate", "--model", "arcsinexp", "--beta", "0.5", "--n", "1000", "--reps", "300",
            "--seed", "99", "--threads", threads,
        ],
        &mut out,
        &mut err,
    );
    (code, out)
}

fn determinism() -> Verdict {
    let (c1, a) = simulate_output("1");
    let (c2, b) = simulate_output("1");
    let (c3, c) = simulate_output("4");
    let ok = c1 == 0 && c2 == 0 && c3 == 0;
    verdict(
        ok && a == b && a == c,
        format!(
            "repeat run identical: {}, 1 vs 4 workers identical: {} ({} bytes)",
            a == b,
            a == c,
            a.len()
        ),
    )
}

fn residual_convergence() -> Verdict {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(["endpointkit", "check"], &mut out, &mut err);
    let summary = run_check(&default_models(), CheckOptions::default()).unwrap();
    let bad = summary
        .reports
        .iter()
        .filter(|r| r.residuals.last().unwrap().abs() > r.residuals[0].abs())
        .count();
    let tanexp_reports = summary.reports.iter().filter(|r| r.model.family() == Family::TanExp).count();
    verdict(
        code == 0 && bad == 0,
        format!(
            "check exit code {code}; {} reports ({tanexp_reports} tanexp), {bad} with |last| > |first|",
            summary.reports.len()
        ),
    )
}

/// Name, check and optional runtime budget in seconds.
type Criterion = (&'static str, fn() -> Verdict, Option<u64>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 form equivalence", form_equivalence, Some(10)),
        ("2 dominance", dominance, Some(30)),
        ("3 weight normalization", weight_normalization, None),
        ("4 k-rule reproduction", k_rule, None),
        ("5 model identities", model_identities, None),
        ("6 consistency trend", consistency_trend, Some(300)),
        ("7 asymptotic-distribution shape", distribution_shape, Some(180)),
        ("8 sampler validity", sampler_validity, None),
        ("9 determinism", determinism, None),
        ("10 residual convergence", residual_convergence, None),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let mut v = check();
        if let Some(secs) = budget {
            v = within_budget(v, start.elapsed(), Duration::from_secs(secs));
        }
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
