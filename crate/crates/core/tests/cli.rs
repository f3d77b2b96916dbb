use std::fs;
use std::path::Path;

use endpointkit::cli::{self, ESTIMATE_HEADER, SIMULATE_HEADER};
use endpointkit::models::ModelSpec;
use endpointkit::montecarlo::replicate_seed;
use endpointkit::estimator::{confidence_band, estimate_endpoint};
use tempfile::TempDir;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("endpointkit").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

#[test]
fn estimate_reproduces_worked_example() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "x.txt", "1\n3\n4\n5\n");
    let r = run(&["estimate", "--input", &input, "--kstar", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("# max=5"));
    assert_eq!(lines.next(), Some(ESTIMATE_HEADER));
    let rows = data_rows(&r.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "4");
    assert_eq!(rows[0][1], "2");
    assert_eq!(rows[0][2], "5.830074999");
}

#[test]
fn estimate_on_tied_sample_gives_point_interval() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "x.txt", "2.5\n2.5\n2.5\n2.5\n");
    let r = run(&["estimate", "--input", &input, "--kstar", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let row = &data_rows(&r.stdout)[0];
    assert_eq!(row[2], "2.5");
    assert_eq!(row[4], "0");
    assert_eq!(row[5], "2.5");
    assert_eq!(row[6], "2.5");
}

#[test]
fn kstar_two_returns_file_maximum() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "x.txt", "# header comment\n0.3\n\n-1.25\n0.71\n0.2\n0.69\n");
    let r = run(&["estimate", "--input", &input, "--kstar", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(data_rows(&r.stdout)[0][2], "0.71");
}

#[test]
fn estimate_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.txt", "1\n2\nthree\n4\n");
    let r = run(&["estimate", "--input", &bad]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);

    let missing = dir.path().join("missing.txt");
    let r = run(&["estimate", "--input", missing.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("cannot read"), "{}", r.stderr);

    let small = write(dir.path(), "small.txt", "1\n2\n3\n4\n5\n");
    let r = run(&["estimate", "--input", &small, "--kstar", "8"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("infeasible"), "{}", r.stderr);

    let r = run(&["estimate", "--input", &small, "--kstar", "3"]);
    assert_eq!(r.code, 2);
}

#[test]
fn estimate_round_trips_to_library_values() {
    let dir = TempDir::new().unwrap();
    let sample = ModelSpec::negative_frechet(0.5).unwrap().sample(400, 11).unwrap();
    let text: String = sample.values().iter().map(|v| format!("{v:e}\n")).collect();
    let input = write(dir.path(), "x.txt", &text);
    let output = dir.path().join("est.csv");
    let r = run(&[
        "estimate",
        "--input",
        &input,
        "--kstar",
        "2,10,40,96",
        "--alpha",
        "0.1",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let csv = fs::read_to_string(&output).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4);
    for row in rows {
        let k: usize = row[1].parse().unwrap();
        let est = confidence_band(&estimate_endpoint(&sample, k).unwrap(), 0.1, 0.0).unwrap();
        let ci = est.ci.unwrap();
        let parsed: Vec<f64> = row[2..].iter().map(|v| v.parse().unwrap()).collect();
        let direct = [est.xhat, est.qhat, est.ahat, ci.lower, ci.upper, 0.1, 0.0];
        for (p, d) in parsed.iter().zip(direct) {
            assert!(rel_close(*p, d, 5e-10) || (*p == 0.0 && d == 0.0), "{p} vs {d}");
        }
    }
}

#[test]
fn simulate_kstar_two_is_mean_of_maxima() {
    let r = run(&[
        "simulate", "--model", "negfrechet", "--beta", "0.5", "--n", "1000", "--reps", "10", "--seed", "7",
        "--kstar", "2",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().next(), Some(SIMULATE_HEADER));
    let row = &data_rows(&r.stdout)[0];
    let model = ModelSpec::negative_frechet(0.5).unwrap();
    let mean_max = (0..10)
        .map(|rep| {
            model.sample(1000, replicate_seed(7, rep)).unwrap().max()
        })
        .sum::<f64>()
        / 10.0;
    let reported: f64 = row[4].parse().unwrap();
    assert!(rel_close(reported, mean_max, 5e-10), "{reported} vs {mean_max}");
    assert_eq!(row[7], "10");
    assert_eq!(row[8], "7");
}

#[test]
fn simulate_is_repeatable() {
    let args = ["simulate", "--model", "tanexp", "--beta", "1", "--n", "500", "--reps", "40", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_rejects_unknown_model() {
    let r = run(&["simulate", "--model", "weibull", "--beta", "1", "--n", "100"]);
    assert_eq!(r.code, 2);
    for name in ["negfrechet", "tanexp", "arcsinexp"] {
        assert!(r.stderr.contains(name), "{}", r.stderr);
    }
}

#[test]
fn full_grid_emits_every_cell() {
    let r = run(&["simulate", "--full-grid", "--reps", "2", "--seed", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().filter(|l| l.starts_with("# cell")).count(), 27);
    assert_eq!(r.stdout.matches(SIMULATE_HEADER).count(), 1);
}

#[test]
fn plot_single_row() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "one.csv",
        &format!("{SIMULATE_HEADER}\nnegfrechet,1,100,2,0.9,0.01,-0.1,10,0\n"),
    );
    let r = run(&["plot", "--input", &input, "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let svg = fs::read_to_string(dir.path().join("negfrechet_beta1_n100.svg")).unwrap();
    assert_eq!(svg.matches("<g class=\"panel\">").count(), 2);
    assert_eq!(svg.matches("<circle").count(), 2);
    assert!(svg.contains(r#"class="reference" data-value="1""#));
}

#[test]
fn plot_model_one_grid() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::new();
    for n in ["100", "1000", "10000"] {
        let r = run(&[
            "simulate", "--model", "negfrechet", "--beta", "1", "--n", n, "--reps", "5", "--seed", "4",
            "--kstar", "2,4,8",
        ]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        if csv.is_empty() {
            csv.push_str(&r.stdout);
        } else {
            csv.extend(r.stdout.lines().skip(1).map(|l| format!("{l}\n")));
        }
    }
    let input = write(dir.path(), "grid.csv", &csv);
    let figs = dir.path().join("figs");
    let r = run(&["plot", "--input", &input, "--output-dir", figs.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().count(), 3);
    let mut first = Vec::new();
    for n in ["100", "1000", "10000"] {
        let svg = fs::read_to_string(figs.join(format!("negfrechet_beta1_n{n}.svg"))).unwrap();
        assert!(svg.contains(r#"class="reference" data-value="1""#), "n={n}");
        first.push(svg);
    }

    let again = dir.path().join("again");
    let r = run(&["plot", "--input", &input, "--output-dir", again.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    for (n, svg) in ["100", "1000", "10000"].iter().zip(first) {
        assert_eq!(fs::read_to_string(again.join(format!("negfrechet_beta1_n{n}.svg"))).unwrap(), svg);
    }
}

#[test]
fn plot_estimate_csv() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "x.txt", "1\n3\n4\n5\n2\n2.2\n4.4\n");
    let est = dir.path().join("est.csv");
    let r = run(&["estimate", "--input", &input, "--kstar", "2,4,6", "--output", est.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = run(&["plot", "--input", est.to_str().unwrap(), "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let svg = fs::read_to_string(dir.path().join("estimate.svg")).unwrap();
    assert!(svg.contains(r#"class="reference" data-value="5""#));
}

#[test]
fn plot_rejects_malformed_csv() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "bad.csv",
        &format!("{SIMULATE_HEADER}\nnegfrechet,1,100,2,0.9,0.01,-0.1,10,0\nnegfrechet,1,100,4,oops,0.01,-0.1,10,0\n"),
    );
    let r = run(&["plot", "--input", &input, "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("oops"), "{}", r.stderr);

    let ragged = write(dir.path(), "ragged.csv", &format!("{SIMULATE_HEADER}\nnegfrechet,1\n"));
    let r = run(&["plot", "--input", &ragged, "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 2);
}

#[test]
fn check_default_passes() {
    let r = run(&["check"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.ends_with("check passed\n"));
    assert!(!r.stdout.contains("FAIL "));
}

#[test]
fn check_negated_second_order_fails() {
    let r = run(&["check", "--model", "negfrechet", "--negate-second-order"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("FAIL second_order_residual"), "{}", r.stdout);
    assert!(r.stderr.contains("second_order_residual"), "{}", r.stderr);
}

#[test]
fn check_tanexp_marks_unsupported() {
    let r = run(&["check", "--model", "tanexp", "--beta", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("UNSUPPORTED second_order_residual"), "{}", r.stdout);
    assert!(r.stdout.contains("PASS scale_ratio_a_over_q"), "{}", r.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).code, 2);
    assert_eq!(run(&["simulate", "--full-grid", "--model", "tanexp"]).code, 2);
    assert_eq!(run(&["simulate", "--model", "tanexp", "--beta", "1", "--n", "100", "--threads", "0"]).code, 2);
}
