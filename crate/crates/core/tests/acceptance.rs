//! The full acceptance suite at its stated sizes, one line per criterion.
//! `GEOEXTREMES_SCALE=smoke` runs a reduced version.

use std::process::ExitCode;

use geoextremes::experiment::{run_acceptance, Scale};

fn main() -> ExitCode {
    let scale = match std::env::var("GEOEXTREMES_SCALE").as_deref() {
        Ok("smoke") => Scale::Smoke,
        Ok("desk") => Scale::Desk,
        _ => Scale::Full,
    };
    println!("acceptance suite ({scale:?})");
    let outcomes = run_acceptance(scale, |o| println!("{o}"));
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("{}/{} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
