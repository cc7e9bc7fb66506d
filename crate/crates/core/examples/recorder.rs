//! Result files: write a simulation record to Arrow IPC, read it back and
//! recover the configuration it was produced with.
//!
//! cargo run --example recorder

use pogosim::config::{load_config, parse_tree, SimConfig};
use pogosim::controllers::program_by_name;
use pogosim::recorder::{read_ipc, write_ipc, CONFIGURATION_KEY};
use pogosim::runtime::{run_simulation, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = load_config(
        r#"
arena_surface: 300000
seed: 2
simulation_time: 5.0
time_step: 0.01
save_data_period: 1.0
objects:
    robots:
        type: pogobot
        nb: 6
        radius: 26.5
"#,
    )?;
    let out = run_simulation(config.clone(), &program_by_name("hanabi").unwrap(), RunOptions::in_memory())?;
    let path = std::env::temp_dir().join("pogosim-recorder-example.feather");
    write_ipc(&out.table, &path)?;

    let back = read_ipc(&path)?;
    println!("{}: {} rows", path.display(), back.num_rows());
    for c in &back.columns {
        println!("  {:<18} {:?}", c.name, c.data.column_type());
    }
    let embedded = &back.metadata[CONFIGURATION_KEY];
    let recovered = SimConfig::from_tree(&parse_tree(embedded)?)?;
    println!("configuration recovered: {}", recovered == config);
    println!("--- embedded configuration ---\n{embedded}");
    Ok(())
}
