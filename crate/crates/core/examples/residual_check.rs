// Residuals of the first- and second-order limit relations along a t grid.

use endpointkit::asymptotics::{residual_report, Relation, DEFAULT_T_GRID};
use endpointkit::models::ModelSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let models = [ModelSpec::negative_frechet(0.5)?, ModelSpec::arcsin_exp(1.0)?];
    for model in models {
        for relation in Relation::ALL {
            if !relation.supports(&model) {
                println!("{model} {}: unsupported", relation.name());
                continue;
            }
            let report = residual_report(&model, relation, &DEFAULT_T_GRID, 2.0)?;
            let values: Vec<String> = report.residuals.iter().map(|r| format!("{r:.3e}")).collect();
            println!("{model} {}: [{}]", relation.name(), values.join(", "));
            assert!(report.is_eventually_decreasing());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
