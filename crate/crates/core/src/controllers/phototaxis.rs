use super::{apply_loop_parameters, Mode, RunTumble};
use crate::recorder::{DataRow, SchemaBuilder};
use crate::runtime::{Controller, HookResult, RobotApi};

pub const STOPPED_COLOR: [u8; 3] = [255, 255, 0];

/// Run-and-tumble until any photosensor reads above `light_threshold`
/// (default 10000), then stand still.
#[derive(Debug, Default)]
pub struct Phototaxis {
    pub threshold: f64,
    pub level: u16,
    pub stopped: bool,
    motion: RunTumble,
}

impl Controller for Phototaxis {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        apply_loop_parameters(api)?;
        self.threshold = api.param_f64_or("light_threshold", 10000.0)?;
        self.motion = RunTumble::from_parameters(api)?;
        self.motion.enter(api, Mode::Run)
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        self.level = api.read_photosensors().into_iter().max().unwrap_or(0);
        self.stopped = self.level as f64 > self.threshold;
        if self.stopped {
            api.stop();
            api.set_led(0, STOPPED_COLOR)
        } else {
            self.motion.step(api)
        }
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_int32("light_level")?;
        schema.add_bool("stopped")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_int32("light_level", self.level as i32)?;
        row.set_bool("stopped", self.stopped)?;
        Ok(())
    }
}
