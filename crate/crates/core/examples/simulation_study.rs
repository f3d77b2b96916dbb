// A small Monte Carlo study: mean and MSE of the estimator against k*.

use endpointkit::cli::format_study_row;
use endpointkit::models::ModelSpec;
use endpointkit::montecarlo::{run_study, StudyConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = ModelSpec::arcsin_exp(1.0)?;
    let config = StudyConfig::new(model, 1000, 200, 2024).with_grid(vec![2, 10, 20, 50, 100, 200]);
    let rows = run_study(&config)?;
    println!("{}", endpointkit::cli::SIMULATE_HEADER);
    for row in &rows {
        println!("{}", format_study_row(row));
    }

    let best = rows
        .iter()
        .min_by(|a, b| a.mse_xhat.total_cmp(&b.mse_xhat))
        .expect("non-empty grid");
    println!("smallest MSE at k* = {} (mean sample maximum {:.6})", best.kstar, best.mean_max);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
