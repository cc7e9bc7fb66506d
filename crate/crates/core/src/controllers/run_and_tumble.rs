use rand::Rng;

use super::apply_loop_parameters;
use crate::physics::MOTOR_FULL;
use crate::runtime::{Controller, HookResult, RobotApi};

pub const RUN_COLOR: [u8; 3] = [0, 255, 0];
pub const TUMBLE_COLOR: [u8; 3] = [255, 0, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Tumble,
}

/// Uniform duration in `[min, max]` ms, at least 1 ms.
pub fn draw_duration<R: Rng + ?Sized>(rng: &mut R, min: f64, max: f64) -> u32 {
    let d = if max > min { rng.random_range(min..=max) } else { min };
    (d.round() as u32).max(1)
}

/// Run-and-tumble motion, reusable by other controllers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTumble {
    pub run_duration: (f64, f64),
    pub tumble_duration: (f64, f64),
    pub enable_backward_dir: bool,
    /// Show the mode on the main LED.
    pub show_mode: bool,
    mode: Mode,
    deadline_ms: u32,
    tumble_motors: (i16, i16),
}

impl Default for RunTumble {
    fn default() -> Self {
        Self {
            run_duration: (1000.0, 5000.0),
            tumble_duration: (100.0, 1100.0),
            enable_backward_dir: true,
            show_mode: true,
            mode: Mode::Run,
            deadline_ms: 0,
            tumble_motors: (0, 0),
        }
    }
}

impl RunTumble {
    /// Reads `run_duration_min/max`, `tumble_duration_min/max` (ms) and
    /// `enable_backward_dir`, falling back to the defaults.
    pub fn from_parameters(api: &RobotApi<'_>) -> HookResult<Self> {
        let d = Self::default();
        let range = |lo: &str, hi: &str, def: (f64, f64)| -> HookResult<(f64, f64)> {
            let a = api.param_f64_or(lo, def.0)?;
            let b = api.param_f64_or(hi, def.1)?;
            if !(a >= 0.0 && b >= a && b.is_finite()) {
                return Err(format!("need 0 <= {lo} <= {hi}, got {a} and {b}").into());
            }
            Ok((a, b))
        };
        Ok(Self {
            run_duration: range("run_duration_min", "run_duration_max", d.run_duration)?,
            tumble_duration: range("tumble_duration_min", "tumble_duration_max", d.tumble_duration)?,
            enable_backward_dir: api.param_bool_or("enable_backward_dir", d.enable_backward_dir)?,
            ..d
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn deadline_ms(&self) -> u32 {
        self.deadline_ms
    }

    /// Enters `mode` now and draws its duration.
    pub fn enter(&mut self, api: &mut RobotApi<'_>, mode: Mode) -> HookResult {
        let (lo, hi) = match mode {
            Mode::Run => self.run_duration,
            Mode::Tumble => self.tumble_duration,
        };
        let now = api.current_time_milliseconds();
        let rng = api.rng();
        self.deadline_ms = now + draw_duration(rng, lo, hi);
        if mode == Mode::Tumble {
            let duty = if self.enable_backward_dir && rng.random_bool(0.5) { -MOTOR_FULL } else { MOTOR_FULL };
            self.tumble_motors = if rng.random_bool(0.5) { (duty, 0) } else { (0, duty) };
        }
        self.mode = mode;
        self.apply(api)
    }

    fn apply(&self, api: &mut RobotApi<'_>) -> HookResult {
        match self.mode {
            Mode::Run => api.set_motors(MOTOR_FULL, MOTOR_FULL),
            Mode::Tumble => api.set_motors(self.tumble_motors.0, self.tumble_motors.1),
        }
        if self.show_mode {
            api.set_led(0, if self.mode == Mode::Run { RUN_COLOR } else { TUMBLE_COLOR })?;
        }
        Ok(())
    }

    pub fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        if api.current_time_milliseconds() >= self.deadline_ms {
            let next = if self.mode == Mode::Run { Mode::Tumble } else { Mode::Run };
            self.enter(api, next)
        } else {
            self.apply(api)
        }
    }
}

/// Alternates straight runs and one-wheel tumbles of random durations.
#[derive(Debug, Default)]
pub struct RunAndTumble {
    pub motion: RunTumble,
}

impl Controller for RunAndTumble {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        apply_loop_parameters(api)?;
        self.motion = RunTumble::from_parameters(api)?;
        self.motion.enter(api, Mode::Run)
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        self.motion.step(api)
    }
}
