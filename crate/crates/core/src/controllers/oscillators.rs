use std::f64::consts::TAU;

use rand::Rng;

use super::{apply_loop_parameters, hue_to_rgb, Mode, RunTumble};
use crate::comm::{EmitterDir, Message};
use crate::recorder::{DataRow, SchemaBuilder};
use crate::runtime::{Controller, HookResult, RobotApi};

/// Kuramoto order parameter `|mean(exp(i phase))|`.
pub fn order_parameter(phases: &[f64]) -> f64 {
    if phases.is_empty() {
        return 0.0;
    }
    let (c, s) = phases.iter().fold((0.0, 0.0), |(c, s), p| (c + p.cos(), s + p.sin()));
    (c * c + s * s).sqrt() / phases.len() as f64
}

/// Kuramoto-coupled phase oscillator on a run-and-tumble robot.
///
/// Each pogotick the phase advances by
/// `(natural_frequency + coupling * mean sin(phase_j - phase))` times the
/// tick period, where `phase_j` are the neighbour phases heard since the
/// previous tick, advanced at the natural frequency by the pogoticks elapsed
/// since they were sent. The LED hue shows the phase.
///
/// Parameters: `natural_frequency` (rad/s, default π), `coupling` (default
/// 1.0), `initial_phase` (rad, default uniform random), `oscillator_moving`
/// (bool, default true) plus the run-and-tumble durations.
#[derive(Debug, Default)]
pub struct MovingOscillator {
    pub phase: f64,
    pub natural_frequency: f64,
    pub coupling: f64,
    heard: Vec<(f64, u32)>,
    motion: Option<RunTumble>,
}

impl MovingOscillator {
    fn payload(&self, ticks: u32) -> [u8; 12] {
        let mut b = [0u8; 12];
        b[..8].copy_from_slice(&self.phase.to_le_bytes());
        b[8..].copy_from_slice(&ticks.to_le_bytes());
        b
    }
}

impl Controller for MovingOscillator {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        apply_loop_parameters(api)?;
        self.natural_frequency = api.param_f64_or("natural_frequency", std::f64::consts::PI)?;
        self.coupling = api.param_f64_or("coupling", 1.0)?;
        self.phase = if api.has_parameter("initial_phase") {
            api.param_f64("initial_phase")?.rem_euclid(TAU)
        } else {
            api.rng().random_range(0.0..TAU)
        };
        if api.param_bool_or("oscillator_moving", true)? {
            let mut m = RunTumble::from_parameters(api)?;
            m.show_mode = false;
            m.enter(api, Mode::Run)?;
            self.motion = Some(m);
        }
        api.set_led(0, hue_to_rgb(self.phase / TAU))
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        let now = api.ticks();
        let period = 1.0 / api.main_loop_hz();
        let mut drive = self.natural_frequency;
        if !self.heard.is_empty() {
            let sum: f64 = self
                .heard
                .iter()
                .map(|&(p, t)| (p + self.natural_frequency * now.wrapping_sub(t) as f64 * period - self.phase).sin())
                .sum();
            drive += self.coupling * sum / self.heard.len() as f64;
            self.heard.clear();
        }
        self.phase = (self.phase + drive * period).rem_euclid(TAU);
        match self.motion.as_mut() {
            Some(m) => m.step(api)?,
            None => api.stop(),
        }
        api.set_led(0, hue_to_rgb(self.phase / TAU))
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, msg: &Message) -> HookResult {
        if msg.payload.len() >= 12 {
            let p = f64::from_le_bytes(msg.payload[..8].try_into().expect("8 bytes"));
            let t = u32::from_le_bytes(msg.payload[8..12].try_into().expect("4 bytes"));
            self.heard.push((p, t));
        }
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        let payload = self.payload(api.ticks());
        api.send_short(EmitterDir::Omni, &payload)?;
        Ok(true)
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_float64("phase")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_float64("phase", self.phase)?;
        Ok(())
    }
}
