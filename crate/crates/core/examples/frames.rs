//! Stepping a simulation by hand and saving PNG snapshots of the arena
//! every few seconds.
//!
//! cargo run --release --example frames

use std::path::Path;

use pogosim::config::load_config_file;
use pogosim::controllers::program_by_name;
use pogosim::recorder::{format_frame_name, save_frame};
use pogosim::runtime::{RunOptions, Simulation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut config = load_config_file(&root.join("conf/simple.yaml"))?;
    config.simulation_time = 20.0;
    let out_dir = std::env::temp_dir().join("pogosim-frames-example");

    let program = program_by_name("run_and_tumble").unwrap();
    let mut sim = Simulation::new(config, &program, RunOptions::in_memory().arena_dir(root))?;
    let mut next = 0.0;
    while !sim.is_finished() {
        if sim.time() + 1e-9 >= next {
            let name = format_frame_name("f{:08.3f}.png", sim.time())?;
            let path = out_dir.join(name);
            save_frame(&sim.frame_scene(), &path)?;
            println!("{}", path.display());
            next += 4.0;
        }
        sim.step()?;
    }
    Ok(())
}
