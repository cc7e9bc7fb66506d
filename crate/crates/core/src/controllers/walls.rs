use super::{apply_loop_parameters, Mode, RunTumble};
use crate::comm::{EmitterDir, Message};
use crate::recorder::{DataRow, SchemaBuilder};
use crate::runtime::{Controller, HookResult, RobotApi};

/// First payload byte of messages emitted by walls and membranes.
pub const WALL_TAG: u8 = 0x57;

pub const WALL_DETECTED_COLOR: [u8; 3] = [0, 0, 255];

/// Controller for pogowalls and membranes: broadcasts [`WALL_TAG`] from
/// every segment or link.
#[derive(Debug, Default)]
pub struct WallBeacon;

impl Controller for WallBeacon {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        apply_loop_parameters(api)
    }

    fn step(&mut self, _api: &mut RobotApi<'_>) -> HookResult {
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        api.send_short(EmitterDir::Omni, &[WALL_TAG])?;
        Ok(true)
    }
}

/// Run-and-tumble robot that stops for good once it hears a wall.
#[derive(Debug, Default)]
pub struct WallAware {
    pub wall_seen: bool,
    motion: RunTumble,
}

impl Controller for WallAware {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        apply_loop_parameters(api)?;
        self.motion = RunTumble::from_parameters(api)?;
        self.motion.enter(api, Mode::Run)
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        if self.wall_seen {
            api.stop();
            api.set_led(0, WALL_DETECTED_COLOR)
        } else {
            self.motion.step(api)
        }
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, msg: &Message) -> HookResult {
        if msg.payload.first() == Some(&WALL_TAG) {
            self.wall_seen = true;
        }
        Ok(())
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_bool("wall_seen")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_bool("wall_seen", self.wall_seen)?;
        Ok(())
    }
}
