//! Colour consensus in a static packed cluster: every robot adopts the
//! highest colour index it hears. Prints the number of distinct colours
//! over time.
//!
//! cargo run --release --example hanabi

use std::collections::BTreeMap;

use pogosim::config::load_config;
use pogosim::controllers::program_by_name;
use pogosim::runtime::{run_simulation, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = load_config(
        r#"
arena_surface: 1.0e6
seed: 3
simulation_time: 2.0
time_step: 0.01
save_data_period: 0.1
initial_formation: disk
objects:
    robots:
        type: pogobot
        nb: 100
        radius: 26.5
        communication_radius: 80.0
        msg_success_rate: {type: static, rate: 0.9}
"#,
    )?;
    let out = run_simulation(config, &program_by_name("hanabi").unwrap(), RunOptions::in_memory())?;

    let times = out.table.f64s("time").unwrap();
    let colors = out.table.f64s("rgb_colors_index").unwrap();
    let mut per_time: BTreeMap<i64, (Vec<i64>, i64)> = BTreeMap::new();
    for (t, c) in times.iter().zip(&colors) {
        let e = per_time.entry((t * 1000.0).round() as i64).or_default();
        if !e.0.contains(&(*c as i64)) {
            e.0.push(*c as i64);
        }
        e.1 = e.1.max(*c as i64);
    }
    for (ms, (distinct, max)) in per_time {
        println!("t={:>5.1}s  distinct colours {:>3}  max index {max}", ms as f64 / 1000.0, distinct.len());
    }
    Ok(())
}
