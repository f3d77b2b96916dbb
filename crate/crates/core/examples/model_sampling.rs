// The three simulation families: endpoints, tail quantiles and samples.

use endpointkit::models::{Family, ModelSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for family in Family::ALL {
        let model = ModelSpec::new(family, 0.5)?;
        let sample = model.sample(10_000, 1)?;
        let aux = model.aux_functions();
        let t = 1e6;
        println!(
            "{model}: endpoint {:.6}, U(1e6) = {:.6}, a(1e6) = {:.3e}, max of 10000 = {:.6}",
            model.endpoint(),
            model.tail_quantile(t)?,
            aux.a(t),
            sample.max()
        );
        let median = sample.values()[sample.len() / 2];
        println!("  empirical F(median) = {:.4}", model.cdf(median)?);
    }

    let shifted = ModelSpec::negative_frechet(1.0)?.with_endpoint(10.0)?;
    println!("{shifted}: endpoint {}", shifted.endpoint());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
