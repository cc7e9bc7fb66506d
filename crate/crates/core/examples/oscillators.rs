//! Coupled phase oscillators on moving robots: the Kuramoto order
//! parameter rises as neighbours pull their phases together.
//!
//! cargo run --release --example oscillators

use std::collections::BTreeMap;

use pogosim::config::load_config;
use pogosim::controllers::{order_parameter, program_by_name};
use pogosim::runtime::{run_simulation, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = load_config(
        r#"
arena_surface: 400000
seed: 8
simulation_time: 60.0
time_step: 0.01
save_data_period: 5.0
objects:
    robots:
        type: pogobot
        nb: 40
        radius: 26.5
        communication_radius: 120.0
        msg_success_rate: {type: dynamic}
parameters:
    natural_frequency: 3.14159
    coupling: 2.0
    run_duration_min: 500
    run_duration_max: 2000
    tumble_duration_min: 100
    tumble_duration_max: 600
"#,
    )?;
    let out = run_simulation(config, &program_by_name("moving_oscillators").unwrap(), RunOptions::in_memory())?;

    let mut phases: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for (t, p) in out.table.f64s("time").unwrap().into_iter().zip(out.table.f64s("phase").unwrap()) {
        phases.entry((t * 1000.0).round() as i64).or_default().push(p);
    }
    for (ms, ph) in phases {
        println!("t={:>5.1}s  order parameter {:.3}", ms as f64 / 1000.0, order_parameter(&ph));
    }
    Ok(())
}
