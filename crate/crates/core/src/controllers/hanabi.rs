use rand::Rng;

use super::{apply_loop_parameters, hue_to_rgb, Mode, RunTumble};
use crate::comm::{EmitterDir, Message};
use crate::recorder::{DataRow, SchemaBuilder};
use crate::runtime::{Controller, HookResult, RobotApi};

/// LED colour shown for a colour index.
pub fn color_of(index: u8) -> [u8; 3] {
    // golden-ratio hue steps keep neighbouring indices distinguishable
    hue_to_rgb(index as f64 * 0.618_033_988_75)
}

/// Colour diffusion: every robot broadcasts its colour index and adopts any
/// larger one it hears, so the swarm settles on the maximum.
///
/// Parameters: `hanabi_moving` (bool, default false) adds run-and-tumble motion.
#[derive(Debug, Default)]
pub struct Hanabi {
    pub color: u8,
    /// Pogoticks since the current colour was adopted.
    pub age: u32,
    motion: Option<RunTumble>,
}

impl Hanabi {
    /// Adopts `color` when it takes precedence. Returns whether it changed.
    pub fn hear(&mut self, color: u8) -> bool {
        if color > self.color {
            self.color = color;
            self.age = 0;
            true
        } else {
            false
        }
    }
}

impl Controller for Hanabi {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        apply_loop_parameters(api)?;
        self.color = api.rng().random();
        self.age = 0;
        if api.param_bool_or("hanabi_moving", false)? {
            let mut m = RunTumble::from_parameters(api)?;
            m.show_mode = false;
            m.enter(api, Mode::Run)?;
            self.motion = Some(m);
        }
        api.set_led(0, color_of(self.color))
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        if let Some(m) = self.motion.as_mut() {
            m.step(api)?;
        } else {
            api.stop();
        }
        self.age += 1;
        api.set_led(0, color_of(self.color))
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, msg: &Message) -> HookResult {
        if let Some(&c) = msg.payload.first() {
            self.hear(c);
        }
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        api.send_short(EmitterDir::Omni, &[self.color])?;
        Ok(true)
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_int32("rgb_colors_index")?;
        schema.add_int32("age")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_int32("rgb_colors_index", self.color as i32)?;
        row.set_int32("age", self.age as i32)?;
        Ok(())
    }
}
