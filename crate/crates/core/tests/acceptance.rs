//! Acceptance suite with its own harness, so the PASS/FAIL line of every
//! criterion is always printed. Criteria 2, 3 and 5 carry constants that do
//! not hold as stated: they must still FAIL, and their corrected diagnostic
//! line must hold. Any other outcome fails the target.

use std::process::ExitCode;

use ivpcount::acceptance::{run, CriterionReport, Settings};

/// Criteria expected to fail literally.
const KNOWN_FAILING: [u8; 3] = [2, 3, 5];

fn trailing_number(line: &str) -> f64 {
    line.rsplit(' ').next().and_then(|s| s.parse().ok()).unwrap_or(f64::INFINITY)
}

/// The corrected check printed as a diagnostic holds.
fn diagnostic_holds(r: &CriterionReport) -> bool {
    let diag: Vec<&String> = r.details.iter().filter(|d| d.starts_with("diagnostic")).collect();
    let Some(line) = diag.first() else { return false };
    match r.id {
        2 => line.ends_with("(matches)"),
        // the plain sum phi^-2n check must hold as well
        3 => trailing_number(line) <= 1e-20 && trailing_number(&r.details[0]) <= 1e-20,
        // a witness exists even though (0,2,1) is not one
        5 => line.ends_with("Inside") && !r.details[0].starts_with("d=2: 0 "),
        _ => false,
    }
}

fn main() -> ExitCode {
    let settings = Settings::default();
    let mut unexpected = Vec::new();
    for id in 1..=12u8 {
        let r = run(id, &settings).expect("criterion ids are in range");
        println!("{}", r.line());
        for d in &r.details {
            println!("    {d}");
        }
        let expected = if KNOWN_FAILING.contains(&id) { !r.passed && diagnostic_holds(&r) } else { r.passed };
        if !expected {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected ({} known literal failures: {KNOWN_FAILING:?})", KNOWN_FAILING.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
