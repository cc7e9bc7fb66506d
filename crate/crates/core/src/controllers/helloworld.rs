use super::apply_loop_parameters;
use crate::comm::{EmitterDir, Message};
use crate::physics::MOTOR_FULL;
use crate::runtime::{Controller, HookResult, RobotApi};

/// Heartbeat demo: broadcasts its id, logs the ids it hears, and alternates
/// one second forward with one second turning. The LED colour follows the
/// movement phase.
#[derive(Debug, Default)]
pub struct HelloWorld {
    pub heard: u32,
}

impl Controller for HelloWorld {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        apply_loop_parameters(api)
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        let second = api.current_time_milliseconds() / 1000;
        if second % 2 == 0 {
            api.set_motors(MOTOR_FULL, MOTOR_FULL);
            api.set_led(0, [0, 0, 255])
        } else {
            api.set_motors(0, MOTOR_FULL);
            api.set_led(0, [255, 0, 0])
        }
    }

    fn on_message(&mut self, api: &mut RobotApi<'_>, msg: &Message) -> HookResult {
        if msg.payload.len() >= 2 {
            let sender = u16::from_le_bytes([msg.payload[0], msg.payload[1]]);
            self.heard += 1;
            api.log(&format!("Received message from neighbor: {sender}"));
        }
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        let id = api.id().to_le_bytes();
        api.send_short(EmitterDir::Omni, &id)?;
        Ok(true)
    }
}
