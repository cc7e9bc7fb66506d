use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::comm::{CommModelParams, EmitterDir, Emission, Message, MessageKind, Source};
use crate::config::{ConfigError, ObjectKind, Scalar, SimConfig};
use crate::geometry::Vec2;
use crate::physics::{MotorCommand, MOTOR_FULL};
use crate::world::{sample_light, LightField};

use super::HookResult;

/// Standard gravity in mm/s², reported on the IMU z axis.
pub const GRAVITY: f64 = 9806.65;
/// Number of LEDs: index 0 is the main LED, 1 to 4 the lateral ones.
pub const LED_COUNT: usize = 5;
/// Photosensor headings relative to the robot front.
pub const PHOTOSENSOR_OFFSETS: [f64; 3] = [0.0, 2.0 * std::f64::consts::PI / 3.0, -2.0 * std::f64::consts::PI / 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Motor {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotorDir {
    Forward,
    Backward,
    Stop,
}

/// Accelerometer (mm/s², body frame), gyroscope (rad/s) and temperature (°C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuReading {
    pub accel: [f64; 3],
    pub gyro: [f64; 3],
    pub temperature: f64,
}

/// Per-robot scheduler and actuator state. Controllers only see it
/// through [`RobotApi`].
#[derive(Debug, Clone)]
pub struct RobotState {
    pub id: u16,
    pub category: String,
    pub kind: ObjectKind,
    pub ticks: u32,
    pub main_loop_hz: f64,
    pub max_nb_processed_msg_per_tick: u32,
    pub percent_msgs_sent_per_ticks: u8,
    pub leds: [[u8; 3]; LED_COUNT],
    pub motors: MotorCommand,
    pub(crate) rng: ChaCha8Rng,
    pub(crate) next_tick: f64,
    pub(crate) comm_radius: f64,
    pub(crate) comm_params: CommModelParams,
}

impl RobotState {
    pub(crate) fn new(id: u16, category: &str, kind: ObjectKind, rng: ChaCha8Rng) -> Self {
        Self {
            id,
            category: category.to_string(),
            kind,
            ticks: 0,
            main_loop_hz: 60.0,
            max_nb_processed_msg_per_tick: 3,
            percent_msgs_sent_per_ticks: 50,
            leds: [[0; 3]; LED_COUNT],
            motors: MotorCommand::default(),
            rng,
            next_tick: 0.0,
            comm_radius: 0.0,
            comm_params: CommModelParams::default(),
        }
    }
}

/// Physical state visible to sensors, captured before the hook runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyView {
    pub position: Vec2,
    pub angle: f64,
    pub radius: f64,
    pub velocity: Vec2,
    pub angular_velocity: f64,
    pub acceleration: Vec2,
}

/// Read-only simulation context shared by all hooks of one slice.
pub struct HookEnv<'a> {
    pub time: f64,
    pub config: &'a SimConfig,
    pub lights: &'a [LightField],
}

/// Everything a controller may do. Only obtainable inside a hook, and the
/// borrow ends with the hook, so a controller cannot keep it:
///
/// ```compile_fail
/// use pogosim::runtime::{Controller, HookResult, RobotApi};
///
/// struct Leaky {
///     saved: Option<&'static mut RobotApi<'static>>,
/// }
///
/// impl Controller for Leaky {
///     fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
///         self.saved = Some(api);
///         Ok(())
///     }
/// }
/// ```
pub struct RobotApi<'a> {
    pub(crate) state: &'a mut RobotState,
    pub(crate) env: &'a HookEnv<'a>,
    pub(crate) body: Option<BodyView>,
    pub(crate) source: &'a dyn Fn() -> Source,
    pub(crate) outbox: &'a mut Vec<Emission>,
    pub(crate) console: Option<&'a mut Vec<String>>,
}

impl<'a> RobotApi<'a> {
    pub fn id(&self) -> u16 {
        self.state.id
    }

    pub fn category(&self) -> &str {
        &self.state.category
    }

    pub fn kind(&self) -> ObjectKind {
        self.state.kind
    }

    pub fn ticks(&self) -> u32 {
        self.state.ticks
    }

    /// Simulated time in seconds.
    pub fn time(&self) -> f64 {
        self.env.time
    }

    pub fn current_time_milliseconds(&self) -> u32 {
        (self.env.time * 1000.0).round() as u32
    }

    pub fn main_loop_hz(&self) -> f64 {
        self.state.main_loop_hz
    }

    /// Takes effect from the next pogotick.
    pub fn set_main_loop_hz(&mut self, hz: f64) -> HookResult {
        if !(hz > 0.0 && hz.is_finite()) {
            return Err(format!("main_loop_hz must be > 0, got {hz}").into());
        }
        self.state.main_loop_hz = hz;
        Ok(())
    }

    pub fn set_max_nb_processed_msg_per_tick(&mut self, n: u32) {
        self.state.max_nb_processed_msg_per_tick = n;
    }

    pub fn set_percent_msgs_sent_per_ticks(&mut self, percent: u8) {
        self.state.percent_msgs_sent_per_ticks = percent.min(100);
    }

    pub fn percent_msgs_sent_per_ticks(&self) -> u8 {
        self.state.percent_msgs_sent_per_ticks
    }

    /// `duty` is clamped to `0..=1023`.
    pub fn set_motor(&mut self, motor: Motor, duty: u16, dir: MotorDir) {
        let d = duty.min(MOTOR_FULL as u16) as i16;
        let signed = match dir {
            MotorDir::Forward => d,
            MotorDir::Backward => -d,
            MotorDir::Stop => 0,
        };
        match motor {
            Motor::Left => self.state.motors.left = signed,
            Motor::Right => self.state.motors.right = signed,
        }
    }

    /// Signed duties, clamped to `-1023..=1023`.
    pub fn set_motors(&mut self, left: i16, right: i16) {
        self.state.motors = MotorCommand {
            left: left.clamp(-MOTOR_FULL, MOTOR_FULL),
            right: right.clamp(-MOTOR_FULL, MOTOR_FULL),
        };
    }

    pub fn motors(&self) -> MotorCommand {
        self.state.motors
    }

    pub fn stop(&mut self) {
        self.state.motors = MotorCommand::default();
    }

    pub fn set_led(&mut self, index: usize, rgb: [u8; 3]) -> HookResult {
        let slot = self
            .state
            .leds
            .get_mut(index)
            .ok_or_else(|| format!("LED index {index} out of range"))?;
        *slot = rgb;
        Ok(())
    }

    pub fn led(&self, index: usize) -> Option<[u8; 3]> {
        self.state.leds.get(index).copied()
    }

    /// Light levels at the three rim photosensors, `0..=32767`.
    pub fn read_photosensors(&self) -> [u16; 3] {
        let (p, a, r) = match self.body {
            Some(b) => (b.position, b.angle, b.radius),
            None => (Vec2::ZERO, 0.0, 0.0),
        };
        PHOTOSENSOR_OFFSETS.map(|off| sample_light(self.env.lights, p + Vec2::from_angle(a + off) * r, self.env.time))
    }

    /// Accelerometer and gyroscope with `imu_noise_stddev` Gaussian noise.
    pub fn read_imu(&mut self) -> ImuReading {
        let b = self.body.unwrap_or(BodyView {
            position: Vec2::ZERO,
            angle: 0.0,
            radius: 0.0,
            velocity: Vec2::ZERO,
            angular_velocity: 0.0,
            acceleration: Vec2::ZERO,
        });
        let local = b.acceleration.rotated(-b.angle);
        let sd = self.env.config.imu_noise_stddev;
        let mut noise = || if sd > 0.0 { sd * self.state.rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
        ImuReading {
            accel: [local.x + noise(), local.y + noise(), GRAVITY + noise()],
            gyro: [noise(), noise(), b.angular_velocity + noise()],
            temperature: self.env.config.arena_temperature,
        }
    }

    /// Queues a message for delivery at the end of the current slice.
    pub fn send(&mut self, kind: MessageKind, dir: EmitterDir, payload: &[u8]) -> HookResult {
        let message = Message::new(kind, self.state.id, dir, payload.to_vec())?;
        self.outbox.push(Emission {
            source: (self.source)(),
            message,
            comm_radius: self.state.comm_radius,
            params: self.state.comm_params,
            p_send: self.state.percent_msgs_sent_per_ticks as f64 / 100.0,
        });
        Ok(())
    }

    pub fn send_short(&mut self, dir: EmitterDir, payload: &[u8]) -> HookResult {
        self.send(MessageKind::Short, dir, payload)
    }

    pub fn send_long(&mut self, dir: EmitterDir, payload: &[u8]) -> HookResult {
        self.send(MessageKind::Long, dir, payload)
    }

    /// This robot's private random stream.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.state.rng
    }

    pub fn parameter(&self, name: &str) -> Result<&Scalar, ConfigError> {
        self.env.config.parameter(name)
    }

    pub fn param_f64(&self, name: &str) -> HookResult<f64> {
        let v = self.parameter(name)?;
        v.as_f64().ok_or_else(|| format!("parameter `{name}` is a {}, expected a number", v.type_name()).into())
    }

    pub fn param_i64(&self, name: &str) -> HookResult<i64> {
        let v = self.parameter(name)?;
        v.as_i64().ok_or_else(|| format!("parameter `{name}` is a {}, expected an integer", v.type_name()).into())
    }

    pub fn param_bool(&self, name: &str) -> HookResult<bool> {
        let v = self.parameter(name)?;
        v.as_bool().ok_or_else(|| format!("parameter `{name}` is a {}, expected a bool", v.type_name()).into())
    }

    pub fn has_parameter(&self, name: &str) -> bool {
        self.env.config.parameters.contains_key(name)
    }

    /// Optional parameter with a fallback when absent.
    pub fn param_f64_or(&self, name: &str, default: f64) -> HookResult<f64> {
        if self.env.config.parameters.contains_key(name) {
            self.param_f64(name)
        } else {
            Ok(default)
        }
    }

    pub fn param_i64_or(&self, name: &str, default: i64) -> HookResult<i64> {
        if self.has_parameter(name) {
            self.param_i64(name)
        } else {
            Ok(default)
        }
    }

    pub fn param_bool_or(&self, name: &str, default: bool) -> HookResult<bool> {
        if self.env.config.parameters.contains_key(name) {
            self.param_bool(name)
        } else {
            Ok(default)
        }
    }

    /// Writes a line to the console log (when enabled) as `[robot <id>] text`.
    pub fn log(&mut self, text: &str) {
        let line = format!("[robot {}] {}", self.state.id, text);
        log::debug!("{line}");
        if let Some(c) = self.console.as_mut() {
            c.push(line);
        }
    }
}
