//! A small estimation sweep configured from TOML and written as CSV.

use m2m_cogmac::experiments::{estimation_sweep, io, ExperimentConfig};

const CONFIG: &str = r#"
kind = "estimation-sweep"
seed = 3
reps = 200

[estimation]
types = 4
q_from = 0.1
q_to = 0.5
q_step = 0.2
"#;

fn main() -> m2m_cogmac::Result<()> {
    let config = ExperimentConfig::from_toml_str(CONFIG)?;
    config.check()?;
    let rows = estimation_sweep(&config)?;
    let dir = std::env::temp_dir().join("cogmac-example");
    std::fs::create_dir_all(&dir)?;
    io::write_estimation(&dir, &config, &rows)?;
    for r in &rows {
        println!("q={:.2} {:<12} {:>6.2} ± {:.2}", r.q, r.protocol, r.mean_slots, r.ci95_half_width);
    }
    println!("written to {}", dir.join("estimation_sweep.csv").display());
    Ok(())
}
