//! Distributed averaging by push-sum gossip: robot `i` starts with value
//! `i`, and every estimate converges to the swarm mean.
//!
//! cargo run --example push_sum

use pogosim::config::load_config;
use pogosim::controllers::program_by_name;
use pogosim::runtime::{run_simulation, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nb = 20;
    let config = load_config(&format!(
        r#"
arena_surface: 1.0e6
seed: 4
simulation_time: 4.0
time_step: 0.01
save_data_period: 0.25
initial_formation: disk
objects:
    robots:
        type: pogobot
        nb: {nb}
        radius: 26.5
        communication_radius: 80.0
        msg_success_rate: {{type: static, rate: 1.0}}
parameters:
    percent_msgs_sent_per_ticks: 100
"#
    ))?;
    let out = run_simulation(config, &program_by_name("push_sum").unwrap(), RunOptions::in_memory())?;
    let mean = (0..nb).sum::<u32>() as f64 / nb as f64;

    let times = out.table.f64s("time").unwrap();
    let estimates = out.table.f64s("estimate").unwrap();
    let mut t0 = f64::NAN;
    let mut worst = 0.0f64;
    for (t, e) in times.iter().zip(&estimates) {
        if *t != t0 {
            if !t0.is_nan() {
                println!("t={t0:>5.2}s  max |estimate - {mean}| = {worst:.3e}");
            }
            t0 = *t;
            worst = 0.0;
        }
        worst = worst.max((e - mean).abs());
    }
    println!("t={t0:>5.2}s  max |estimate - {mean}| = {worst:.3e}");
    Ok(())
}
