//! Runs every acceptance criterion and prints one line each. Exits nonzero
//! unless `acceptance::acceptable` holds.

use std::process::ExitCode;

use polymoment::acceptance;

fn main() -> ExitCode {
    let results = acceptance::run_all();
    for r in &results {
        println!("{r}");
    }
    let red: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("red: {red:?}; known unattainable: {:?}", acceptance::KNOWN_UNATTAINABLE);
    if acceptance::acceptable(&results) {
        ExitCode::SUCCESS
    } else {
        println!("acceptance failed");
        ExitCode::FAILURE
    }
}
