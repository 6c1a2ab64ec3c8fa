//! Applying the principal-branch map with lambda = 3/2 twice versus once with
//! the composed parameters (9/4, 0).

use std::f64::consts::PI;

use ngt::gauge::counterexample_report;

fn main() {
    let report = counterexample_report(1.5, 0.0, &[PI / 4.0, 3.0 * PI / 4.0]);
    println!("arg/pi   single/pi   double/pi   direct/pi   equal");
    for p in &report.points {
        println!(
            "{:6.4}   {:9.4}   {:9.4}   {:9.4}   {}",
            p.arg_in / PI,
            p.arg_single / PI,
            p.arg_double / PI,
            p.arg_direct / PI,
            p.equal
        );
    }
    println!("max deviation: {:.6}", report.max_deviation);
}
