// Confidence intervals from the Gumbel limit of the standardized error.

use endpointkit::estimator::{confidence_band, estimate_endpoint};
use endpointkit::models::ModelSpec;
use endpointkit::GumbelLaw;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let limit = GumbelLaw::endpoint_limit(0.0);
    println!(
        "limit law: location {:.4}, median {:.4}, 95% quantile {:.4}",
        limit.location(),
        limit.median(),
        limit.quantile(0.95)
    );

    let model = ModelSpec::tan_exp(1.0)?;
    let sample = model.sample(5000, 7)?;
    for alpha in [0.1, 0.05, 0.01] {
        let est = confidence_band(&estimate_endpoint(&sample, 50)?, alpha, 0.0)?;
        let ci = est.ci.expect("band attached");
        println!(
            "alpha {alpha:<5} [{:.5}, {:.5}] width {:.5} covers {:.5}: {}",
            ci.lower,
            ci.upper,
            ci.width(),
            model.endpoint(),
            ci.contains(model.endpoint())
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
