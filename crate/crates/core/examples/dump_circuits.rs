//! Writes the built-in schemes as circuit JSON files into the given directory.

use std::f64::consts::FRAC_PI_4;

use linopt::experiments::{four_photon_circuit, generalized_circuit, telecloning_circuit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "circuits".into());
    std::fs::create_dir_all(&dir)?;
    let files = [
        ("four_photon.json", four_photon_circuit(FRAC_PI_4)),
        ("telecloning.json", telecloning_circuit(false)),
        ("telecloning_chained.json", telecloning_circuit(true)),
        ("generalized_3.json", generalized_circuit(3)?),
    ];
    for (name, spec) in files {
        std::fs::write(format!("{dir}/{name}"), spec.to_json() + "\n")?;
    }
    Ok(())
}
