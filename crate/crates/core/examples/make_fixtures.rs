//! Regenerate the data files shipped under `configs/`.
//!
//! cargo run -p memassoc --example make_fixtures -- configs

use std::path::PathBuf;

use memassoc::fit::{simulate_current, IvTrace};
use memassoc::vision::synthetic::SyntheticSuite;
use memassoc::DeviceParams;

pub const IV_AMPLITUDE_V: f64 = 0.5;
pub const IV_FREQUENCY_HZ: f64 = 10.0;
pub const IV_DURATION_S: f64 = 0.3;
pub const VISION_SEED: u64 = 42;
pub const VISION_NOISE: f64 = 0.1;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "configs".into()).into();
    std::fs::create_dir_all(&dir)?;

    let drive = IvTrace::sinusoid(IV_AMPLITUDE_V, IV_FREQUENCY_HZ, IV_DURATION_S, 1e-4)?;
    let iv = simulate_current(&DeviceParams::default(), &drive)?;
    std::fs::write(dir.join("iv_synthetic.csv"), iv.to_csv())?;

    let vision = dir.join("vision_synth");
    if vision.exists() {
        std::fs::remove_dir_all(&vision)?;
    }
    SyntheticSuite::generate(VISION_SEED, VISION_NOISE).write_to(&vision)?;
    println!("wrote {}", dir.display());
    Ok(())
}
