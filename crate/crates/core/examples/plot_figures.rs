// Study table to SVG through the command-line entry point.

use std::fs;

use endpointkit::cli;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("endpointkit-plot-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let table = dir.join("study.csv");
    let table = table.to_str().ok_or("non-UTF-8 temp path")?;

    let mut out = Vec::new();
    let mut err = Vec::new();
    let simulate = [
        "endpointkit", "simulate", "--model", "negfrechet", "--beta", "1", "--n", "1000", "--reps", "100",
        "--seed", "5", "--output", table,
    ];
    if cli::run(simulate, &mut out, &mut err) != 0 {
        return Err(String::from_utf8_lossy(&err).into_owned().into());
    }

    let plot = ["endpointkit", "plot", "--input", table, "--output-dir", dir.to_str().ok_or("non-UTF-8 temp path")?];
    if cli::run(plot, &mut out, &mut err) != 0 {
        return Err(String::from_utf8_lossy(&err).into_owned().into());
    }
    print!("{}", String::from_utf8(out)?);
    fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
