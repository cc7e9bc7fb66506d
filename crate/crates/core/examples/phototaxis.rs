//! Light-gradient climbing from `conf/phototaxis.yaml`: robots move
//! towards the lamp and stop above the configured threshold.
//!
//! cargo run --release --example phototaxis

use std::path::Path;

use pogosim::config::load_config_file;
use pogosim::controllers::program_by_name;
use pogosim::recorder::Value;
use pogosim::runtime::{run_simulation, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut config = load_config_file(&root.join("conf/phototaxis.yaml"))?;
    config.save_video_period = -1.0;
    config.save_data_period = 10.0;

    let out = run_simulation(config, &program_by_name("phototaxis").unwrap(), RunOptions::in_memory().arena_dir(root))?;
    let times = out.table.f64s("time").unwrap();
    let light = out.table.f64s("light_level").unwrap();
    let stopped = out.table.column("stopped").unwrap();
    let mut t0 = times[0];
    let (mut sum, mut n, mut halted) = (0.0, 0, 0);
    for i in 0..=times.len() {
        if i == times.len() || times[i] != t0 {
            println!("t={t0:>6.1}s  mean light {:>8.0}  stopped {halted:>2}/{n}", sum / n as f64);
            if i == times.len() {
                break;
            }
            (t0, sum, n, halted) = (times[i], 0.0, 0, 0);
        }
        sum += light[i];
        n += 1;
        halted += (stopped.get(i) == Value::Bool(true)) as usize;
    }
    Ok(())
}
