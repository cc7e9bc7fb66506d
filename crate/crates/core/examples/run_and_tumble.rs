//! One run-and-tumble simulation from `conf/simple.yaml`, reporting the
//! swarm's mean squared displacement and writing the result file.
//!
//! cargo run --release --example run_and_tumble

use std::path::Path;

use pogosim::config::load_config_file;
use pogosim::controllers::program_by_name;
use pogosim::optim::{msd_per_agent, objective_default};
use pogosim::recorder::write_ipc;
use pogosim::runtime::{run_simulation, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut config = load_config_file(&root.join("conf/simple.yaml"))?;
    config.simulation_time = 60.0;

    let program = program_by_name("run_and_tumble").unwrap();
    let out = run_simulation(config, &program, RunOptions::in_memory().arena_dir(root))?;

    let msd = msd_per_agent(&out.table);
    println!("{} rows, {} robots, {} physics steps", out.table.num_rows(), msd.len(), out.steps);
    println!("mean MSD {:.1} mm^2", objective_default(&[&out.table]));

    let path = std::env::temp_dir().join("run_and_tumble.feather");
    write_ipc(&out.table, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
