use super::*;
use crate::comm::EmitterDir;
use crate::config::load_config;
use crate::recorder::write_ipc_bytes;

fn config(nb: u32, time: f64, extra: &str) -> SimConfig {
    let text = format!(
        "seed: 4\nsimulation_time: {time}\ntime_step: 0.01\nsave_data_period: 1.0\n{extra}\nobjects:\n  light:\n    type: static_light\n    geometry: global\n    value: 200\n  robots:\n    type: pogobot\n    nb: {nb}\n    radius: 26.5\n    communication_radius: 80\n"
    );
    load_config(&text).unwrap()
}

#[derive(Default)]
struct Counter {
    steps: u32,
    received: u32,
}

impl Controller for Counter {
    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        self.steps += 1;
        if self.steps != api.ticks() + 1 {
            return Err("private counter diverged from ticks".into());
        }
        api.set_motors(600, 700);
        Ok(())
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, _msg: &Message) -> HookResult {
        self.received += 1;
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        api.send_short(EmitterDir::Omni, &[api.id() as u8])?;
        Ok(true)
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_int32("received")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_int32("received", self.received as i32)?;
        Ok(())
    }
}

#[test]
fn ticks_follow_main_loop_frequency() {
    let out = run_simulation(config(10, 50.0, ""), &Program::new(Counter::default), RunOptions::in_memory()).unwrap();
    assert_eq!(out.steps, 5000);
    for a in out.agents.iter().filter(|a| a.kind == ObjectKind::Pogobot) {
        assert_eq!(a.ticks, 3000);
    }
    assert_eq!(out.table.num_rows(), 10 * 50);
    assert_eq!(out.table.chunks.len(), 50);
    let times = out.table.f64s("time").unwrap();
    assert!((times[0] - 1.0).abs() < 1e-9);
    assert!((times.last().unwrap() - 50.0).abs() < 1e-9);
}

#[test]
fn zero_time_gives_empty_record() {
    let out = run_simulation(config(3, 0.0, ""), &Program::new(Counter::default), RunOptions::in_memory()).unwrap();
    assert_eq!(out.steps, 0);
    assert_eq!(out.table.num_rows(), 0);
    assert!(out.table.metadata.contains_key(CONFIGURATION_KEY));
    assert!(out.agents.iter().all(|a| a.ticks == 0));
}

#[test]
fn same_seed_same_bytes() {
    let run = || {
        let out = run_simulation(config(20, 5.0, ""), &Program::new(Counter::default), RunOptions::in_memory()).unwrap();
        write_ipc_bytes(&out.table).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn messages_are_received() {
    let out = run_simulation(config(30, 5.0, ""), &Program::new(Counter::default), RunOptions::in_memory()).unwrap();
    assert!(out.comm.delivered > 0);
    let received = out.table.column("received").unwrap();
    assert!((0..received.len()).any(|r| matches!(received.get(r), Value::Int32(n) if n > 0)));
}

struct Sensors;

impl Controller for Sensors {
    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        if api.read_photosensors() != [200; 3] {
            return Err(format!("photosensors {:?}", api.read_photosensors()).into());
        }
        let imu = api.read_imu();
        if (imu.accel[2] - GRAVITY).abs() > 1e-9 || imu.temperature != 25.0 {
            return Err("imu".into());
        }
        if (api.time() - api.ticks() as f64 / 60.0).abs() > 0.01 + 1e-9 {
            return Err(format!("time {} at tick {}", api.time(), api.ticks()).into());
        }
        Ok(())
    }
}

#[test]
fn sensors_see_global_light() {
    run_simulation(config(5, 2.0, ""), &Program::new(|| Sensors), RunOptions::in_memory()).unwrap();
}

struct Failing;

impl Controller for Failing {
    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        if api.ticks() == 7 && api.id() == 2 {
            return Err("boom".into());
        }
        Ok(())
    }
}

#[test]
fn hook_errors_carry_robot_and_tick() {
    let err = run_simulation(config(5, 2.0, ""), &Program::new(|| Failing), RunOptions::in_memory()).unwrap_err();
    match err {
        RuntimeError::Hook { id, tick, hook, message, .. } => {
            assert_eq!((id, tick, hook, message.as_str()), (2, 7, "step", "boom"));
        }
        other => panic!("{other}"),
    }
}

#[test]
fn robot_category_needs_a_controller() {
    let err = Simulation::new(config(2, 1.0, ""), &Program::default(), RunOptions::in_memory()).err().unwrap();
    assert!(matches!(err, RuntimeError::MissingController(c) if c == "robots"));
}

#[test]
fn legacy_loss_model_is_rejected_at_build() {
    let mut cfg = config(2, 1.0, "");
    cfg.objects["robots"].msg_success_rate = Some(crate::config::MsgSuccessRate {
        kind: crate::config::CommModelKind::Dynamic,
        rate: None,
        alpha: Some(1e-6),
        beta: Some(3.07),
        gamma: Some(2.32),
        delta: Some(1.19),
        zeta: None,
        theta: None,
    });
    let err = Simulation::new(cfg, &Program::new(Counter::default), RunOptions::in_memory()).err().unwrap();
    assert!(err.to_string().contains("4-coefficient"), "{err}");
}

#[test]
fn duplicate_columns_across_programs_fail() {
    let mut cfg = config(2, 1.0, "");
    let mut other = cfg.objects["robots"].clone();
    other.nb = 1;
    cfg.objects.insert("others".into(), other);
    let program = Program::new(Counter::default).with_category("others", Counter::default);
    let err = Simulation::new(cfg, &program, RunOptions::in_memory()).err().unwrap();
    assert!(matches!(err, RuntimeError::Hook { hook: "create_data_schema", .. }), "{err}");
}

struct Quiet;

impl Controller for Quiet {
    fn step(&mut self, _api: &mut RobotApi<'_>) -> HookResult {
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.disable_export();
        Ok(())
    }
}

#[test]
fn disabled_rows_are_skipped() {
    let out = run_simulation(config(4, 3.0, ""), &Program::new(|| Quiet), RunOptions::in_memory()).unwrap();
    assert_eq!(out.table.num_rows(), 0);
    assert!(out.table.chunks.is_empty());
}

#[test]
fn files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let extra = "save_video_period: 1.0\nenable_console_logging: true";
    let out = run_simulation(config(3, 2.0, extra), &Program::new(Counter::default), RunOptions::with_files(dir.path()))
        .unwrap();
    let data = out.data_file.unwrap();
    assert!(data.exists());
    let back = crate::recorder::read_ipc(&data).unwrap();
    assert_eq!(back.num_rows(), out.table.num_rows());
    assert_eq!(out.frames.len(), 2);
    assert!(out.frames.iter().all(|f| f.exists()));
    assert!(out.console_file.unwrap().exists());
}

#[test]
fn random_phase_spreads_first_ticks() {
    let out = run_simulation(config(10, 1.0, "pogotick_phase: random"), &Program::new(Counter::default), RunOptions::in_memory())
        .unwrap();
    for a in out.agents.iter().filter(|a| a.kind == ObjectKind::Pogobot) {
        assert!((59..=61).contains(&a.ticks), "{}", a.ticks);
    }
}
