//! Reference controllers.
//!
//! Every controller reads its settings from the `parameters:` block of the
//! configuration. The loop settings `main_loop_hz`,
//! `max_nb_processed_msg_per_tick` and `percent_msgs_sent_per_ticks` may also
//! be given there to override a controller's defaults.

mod hanabi;
mod helloworld;
mod oscillators;
mod phototaxis;
mod push_sum;
mod run_and_tumble;
mod walls;

pub use hanabi::{color_of, Hanabi};
pub use helloworld::HelloWorld;
pub use oscillators::{order_parameter, MovingOscillator};
pub use phototaxis::Phototaxis;
pub use push_sum::{PushSum, PushSumMessage, NO_TARGET};
pub use run_and_tumble::{draw_duration, Mode, RunAndTumble, RunTumble};
pub use walls::{WallAware, WallBeacon, WALL_TAG};

use crate::runtime::{HookResult, Program, RobotApi};

/// Names accepted by [`program_by_name`].
pub const CONTROLLER_NAMES: [&str; 7] =
    ["helloworld", "run_and_tumble", "hanabi", "phototaxis", "push_sum", "moving_oscillators", "walls"];

/// The program registered under `name`.
pub fn program_by_name(name: &str) -> Option<Program> {
    Some(match name {
        "helloworld" => Program::new(HelloWorld::default),
        "run_and_tumble" => Program::new(RunAndTumble::default),
        "hanabi" => Program::new(Hanabi::default),
        "phototaxis" => Program::new(Phototaxis::default),
        "push_sum" => Program::new(PushSum::default),
        "moving_oscillators" => Program::new(MovingOscillator::default),
        "walls" => Program::new(WallAware::default).with_walls(WallBeacon::default),
        _ => return None,
    })
}

/// Applies loop settings found in `parameters:`.
pub fn apply_loop_parameters(api: &mut RobotApi<'_>) -> HookResult {
    if api.has_parameter("main_loop_hz") {
        let hz = api.param_f64("main_loop_hz")?;
        api.set_main_loop_hz(hz)?;
    }
    if api.has_parameter("max_nb_processed_msg_per_tick") {
        let n = api.param_i64("max_nb_processed_msg_per_tick")?;
        let n = u32::try_from(n).map_err(|_| format!("max_nb_processed_msg_per_tick must be >= 0, got {n}"))?;
        api.set_max_nb_processed_msg_per_tick(n);
    }
    if api.has_parameter("percent_msgs_sent_per_ticks") {
        let p = api.param_i64("percent_msgs_sent_per_ticks")?;
        if !(0..=100).contains(&p) {
            return Err(format!("percent_msgs_sent_per_ticks must lie in [0, 100], got {p}").into());
        }
        api.set_percent_msgs_sent_per_ticks(p as u8);
    }
    Ok(())
}

/// Hue in `[0, 1)` to a saturated RGB triple.
pub fn hue_to_rgb(hue: f64) -> [u8; 3] {
    let h = hue.rem_euclid(1.0) * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [(r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8]
}
