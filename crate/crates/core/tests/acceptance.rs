//! Acceptance criteria 1-11, one line per criterion.

use std::process::ExitCode;

use vpmcf::harness::verify::{run_suite, Suite};

fn main() -> ExitCode {
    let results = run_suite(Suite::All, |r| println!("{r}"));
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("acceptance: {}/{} criteria passed", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
