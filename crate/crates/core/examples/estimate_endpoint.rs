// Endpoint estimates across a range of thresholds for a simulated sample.

use endpointkit::estimator::{estimate_endpoint, suggest_k};
use endpointkit::models::ModelSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = ModelSpec::negative_frechet(0.5)?;
    let sample = model.sample(2000, 42)?;
    println!("true endpoint {}, sample maximum {:.6}", model.endpoint(), sample.max());

    for k in [5, 20, 60, 150] {
        let est = estimate_endpoint(&sample, k)?;
        assert!(est.xhat >= sample.max());
        println!("k* = {:4}  xhat = {:.6}  qhat = {:.6}  ahat = {:.6}", est.kstar, est.xhat, est.qhat, est.ahat);
    }

    let k = suggest_k(sample.len(), 2.0)?;
    let est = estimate_endpoint(&sample, k)?;
    println!("log-rule k = {k}: xhat = {:.6}", est.xhat);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
