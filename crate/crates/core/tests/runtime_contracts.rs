mod common;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use common::config;
use pogosim::comm::{EmitterDir, Message};
use pogosim::recorder::{DataRow, SchemaBuilder, Value};
use pogosim::runtime::{run_simulation, Controller, HookResult, Program, RobotApi, RunOptions};

const SWARM: &str = r#"
arena_surface: 200000
seed: 9
simulation_time: 10.0
time_step: 0.01
save_data_period: 0.5
initial_formation: disk
objects:
    robots:
        type: pogobot
        nb: 12
        radius: 26.5
        communication_radius: 200.0
        msg_success_rate: {type: static, rate: 1.0}
"#;

/// Writes its own sentinel every tick, broadcasts it, and scribbles over
/// anything it can reach from incoming messages.
#[derive(Default)]
struct Adversary {
    sentinel: Option<u64>,
    foreign_seen: u32,
}

fn sentinel_for(id: u16, tick: u32) -> u64 {
    (id as u64) << 32 | tick as u64
}

impl Controller for Adversary {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        api.set_percent_msgs_sent_per_ticks(100);
        api.set_max_nb_processed_msg_per_tick(32);
        Ok(())
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        if let Some(s) = self.sentinel {
            // the last value written by this robot, one tick earlier
            if s != sentinel_for(api.id(), api.ticks().wrapping_sub(1)) {
                return Err(format!("robot {} sees foreign sentinel {s:#x}", api.id()).into());
            }
        }
        self.sentinel = Some(sentinel_for(api.id(), api.ticks()));
        Ok(())
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, msg: &Message) -> HookResult {
        let bytes: [u8; 8] = msg.payload[..8].try_into().unwrap();
        let theirs = u64::from_le_bytes(bytes);
        if Some(theirs) != self.sentinel {
            self.foreign_seen += 1;
        }
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        let s = self.sentinel.unwrap_or(0);
        api.send_short(EmitterDir::Omni, &s.to_le_bytes())?;
        Ok(true)
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_int32("foreign_seen")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_int32("foreign_seen", self.foreign_seen as i32)?;
        Ok(())
    }
}

#[test]
fn robot_state_is_private() {
    let out = run_simulation(config(SWARM), &Program::new(Adversary::default), RunOptions::in_memory()).unwrap();
    // messages flowed, yet no robot's own sentinel was ever disturbed
    assert!(out.comm.delivered > 1000);
    let seen = out.table.f64s("foreign_seen").unwrap();
    assert!(seen.iter().any(|&n| n > 0.0));
}

/// Counts `on_message` calls per pogotick.
struct Budgeted {
    budget: u32,
    this_tick: u32,
    worst: Arc<AtomicU64>,
    total: Arc<AtomicU64>,
}

impl Controller for Budgeted {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        api.set_percent_msgs_sent_per_ticks(100);
        api.set_max_nb_processed_msg_per_tick(self.budget);
        Ok(())
    }

    fn step(&mut self, _api: &mut RobotApi<'_>) -> HookResult {
        self.worst.fetch_max(self.this_tick as u64, Ordering::SeqCst);
        self.this_tick = 0;
        Ok(())
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, _msg: &Message) -> HookResult {
        self.this_tick += 1;
        self.total.fetch_add(1, Ordering::SeqCst);
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        api.send_short(EmitterDir::Omni, &[1, 2, 3])?;
        Ok(true)
    }
}

#[test]
fn receive_budget_is_respected() {
    for budget in [1u32, 3, 5] {
        let worst = Arc::new(AtomicU64::new(0));
        let total = Arc::new(AtomicU64::new(0));
        let (w, t) = (worst.clone(), total.clone());
        let program =
            Program::new(move || Budgeted { budget, this_tick: 0, worst: w.clone(), total: t.clone() });
        run_simulation(config(SWARM), &program, RunOptions::in_memory()).unwrap();
        // eleven neighbours each send every tick, so the budget is saturated
        assert_eq!(worst.load(Ordering::SeqCst), budget as u64, "budget {budget}");
        assert!(total.load(Ordering::SeqCst) > 0);
    }
}

/// Counts `on_send` calls against pogoticks.
struct SendCounter {
    sends: Arc<AtomicU64>,
    ticks: Arc<AtomicU64>,
}

impl Controller for SendCounter {
    fn step(&mut self, _api: &mut RobotApi<'_>) -> HookResult {
        self.ticks.fetch_add(1, Ordering::SeqCst);
        Ok(())
    }

    fn on_send(&mut self, _api: &mut RobotApi<'_>) -> HookResult<bool> {
        self.sends.fetch_add(1, Ordering::SeqCst);
        Ok(false)
    }
}

#[test]
fn send_hook_follows_percentage() {
    let sends = Arc::new(AtomicU64::new(0));
    let ticks = Arc::new(AtomicU64::new(0));
    let (s, t) = (sends.clone(), ticks.clone());
    let program = Program::new(move || SendCounter { sends: s.clone(), ticks: t.clone() });
    run_simulation(config(SWARM), &program, RunOptions::in_memory()).unwrap();
    let (n, k) = (ticks.load(Ordering::SeqCst) as f64, sends.load(Ordering::SeqCst) as f64);
    // default 50 %: binomial(n, 0.5), allow five standard deviations
    let sd = (n * 0.25).sqrt();
    assert!((k - 0.5 * n).abs() < 5.0 * sd, "{k} sends over {n} ticks");
}

#[test]
fn rows_carry_fixed_columns() {
    let out = run_simulation(config(SWARM), &Program::new(Adversary::default), RunOptions::in_memory()).unwrap();
    for name in ["time", "robot_category", "robot_id", "pogobot_ticks", "x", "y", "angle"] {
        assert!(out.table.column(name).is_some(), "missing {name}");
    }
    assert_eq!(out.table.num_rows(), 12 * 20);
    assert!(matches!(out.table.column("robot_id").unwrap().get(0), Value::UInt16(_)));
}
