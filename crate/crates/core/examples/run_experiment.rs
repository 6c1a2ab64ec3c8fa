//! Running a harness experiment in-process instead of through the `ngt` binary.

use ngt::harness::config::{resolve, Experiment};
use ngt::harness::run;

fn main() {
    let flags = vec![("pairs".to_string(), "25".to_string())];
    let cfg = resolve(Experiment::HydroGroup, &[], &flags).unwrap();
    let (report, artifacts) = run(&cfg).unwrap();
    for c in &report.checks {
        println!("{:<36} {:>10.3e}  {}", c.name, c.value, if c.passed { "pass" } else { "FAIL" });
    }
    println!("artifacts: {}", artifacts.iter().map(|a| a.name.as_str()).collect::<Vec<_>>().join(", "));
}
