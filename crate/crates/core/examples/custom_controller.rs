//! A hand-written controller: robots count the distinct neighbours they
//! have heard from, blink while they are alone and export the count as a
//! custom column.
//!
//! cargo run --example custom_controller

use std::collections::BTreeSet;

use pogosim::comm::{EmitterDir, Message};
use pogosim::config::load_config;
use pogosim::recorder::{DataRow, SchemaBuilder};
use pogosim::runtime::{run_simulation, Controller, HookResult, Program, RobotApi, RunOptions};

#[derive(Default)]
struct NeighbourCounter {
    heard: BTreeSet<u16>,
}

impl Controller for NeighbourCounter {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        api.set_main_loop_hz(30.0)?;
        api.set_percent_msgs_sent_per_ticks(20);
        Ok(())
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        let lit = self.heard.is_empty() && api.ticks() % 30 < 15;
        api.set_led(0, if lit { [255, 0, 0] } else { [0, 80, 0] })?;
        api.set_motors(400, 420);
        Ok(())
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, msg: &Message) -> HookResult {
        self.heard.insert(msg.sender_id);
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        api.send_short(EmitterDir::Omni, &api.id().to_le_bytes())?;
        Ok(true)
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_int32("neighbours_heard")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_int32("neighbours_heard", self.heard.len() as i32)?;
        Ok(())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = load_config(
        r#"
arena_surface: 600000
seed: 21
simulation_time: 30.0
time_step: 0.01
save_data_period: 10.0
objects:
    robots:
        type: pogobot
        nb: 25
        radius: 26.5
        communication_radius: 80.0
"#,
    )?;
    let out = run_simulation(config, &Program::new(NeighbourCounter::default), RunOptions::in_memory())?;
    let times = out.table.f64s("time").unwrap();
    let heard = out.table.f64s("neighbours_heard").unwrap();
    for t in [10.0, 20.0, 30.0] {
        let at: Vec<f64> = times.iter().zip(&heard).filter(|(s, _)| (**s - t).abs() < 1e-6).map(|(_, h)| *h).collect();
        let mean = at.iter().sum::<f64>() / at.len() as f64;
        println!("t={t:>4}: mean distinct neighbours heard {mean:.2}");
    }
    Ok(())
}
