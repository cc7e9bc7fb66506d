use std::collections::BTreeSet;

use rand::Rng;

use super::apply_loop_parameters;
use crate::comm::{EmitterDir, Message, INBOX_CAPACITY};
use crate::recorder::{DataRow, SchemaBuilder};
use crate::runtime::{Controller, HookResult, RobotApi};

/// Target id of a discovery beacon carrying no mass.
pub const NO_TARGET: u16 = u16::MAX;

/// Wire format: sender, target, ack, s, w (little endian, 22 bytes).
/// `ack` names one robot the sender has heard, which tells that robot the
/// link back to the sender works.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushSumMessage {
    pub sender: u16,
    pub target: u16,
    pub ack: u16,
    pub s: f64,
    pub w: f64,
}

impl PushSumMessage {
    pub const SIZE: usize = 22;

    pub fn encode(&self) -> [u8; Self::SIZE] {
        let mut b = [0u8; Self::SIZE];
        b[0..2].copy_from_slice(&self.sender.to_le_bytes());
        b[2..4].copy_from_slice(&self.target.to_le_bytes());
        b[4..6].copy_from_slice(&self.ack.to_le_bytes());
        b[6..14].copy_from_slice(&self.s.to_le_bytes());
        b[14..22].copy_from_slice(&self.w.to_le_bytes());
        b
    }

    pub fn decode(b: &[u8]) -> Option<Self> {
        if b.len() < Self::SIZE {
            return None;
        }
        Some(Self {
            sender: u16::from_le_bytes([b[0], b[1]]),
            target: u16::from_le_bytes([b[2], b[3]]),
            ack: u16::from_le_bytes([b[4], b[5]]),
            s: f64::from_le_bytes(b[6..14].try_into().ok()?),
            w: f64::from_le_bytes(b[14..22].try_into().ok()?),
        })
    }
}

/// Push-sum averaging. Each transmission halves `(s, w)` and addresses the
/// other half to one neighbour known to hear this robot; the estimate
/// `s / w` tends to the mean of the initial values.
///
/// IR links need not be symmetric, so mass is only sent to neighbours that
/// acknowledged hearing us. Until one exists the robot sends massless
/// beacons.
///
/// Parameters: `push_sum_value` (initial value, default the robot id).
/// Robots are immobile and process up to a full inbox per pogotick.
#[derive(Debug, Clone, PartialEq)]
pub struct PushSum {
    pub id: u16,
    pub s: f64,
    pub w: f64,
    /// Robots heard so far.
    pub heard: BTreeSet<u16>,
    /// Robots that acknowledged hearing us.
    pub confirmed: BTreeSet<u16>,
    ack_cursor: usize,
}

impl Default for PushSum {
    fn default() -> Self {
        Self::new(0, 0.0)
    }
}

impl PushSum {
    pub fn new(id: u16, value: f64) -> Self {
        Self { id, s: value, w: 1.0, heard: BTreeSet::new(), confirmed: BTreeSet::new(), ack_cursor: 0 }
    }

    pub fn estimate(&self) -> f64 {
        self.s / self.w
    }

    /// Outgoing message: half the mass to a random confirmed neighbour, plus
    /// an acknowledgement cycling through the robots heard.
    pub fn emit<R: Rng + ?Sized>(&mut self, rng: &mut R) -> PushSumMessage {
        let ack = if self.heard.is_empty() {
            NO_TARGET
        } else {
            self.ack_cursor = (self.ack_cursor + 1) % self.heard.len();
            *self.heard.iter().nth(self.ack_cursor).expect("index in range")
        };
        if self.confirmed.is_empty() {
            return PushSumMessage { sender: self.id, target: NO_TARGET, ack, s: 0.0, w: 0.0 };
        }
        let k = rng.random_range(0..self.confirmed.len());
        let target = *self.confirmed.iter().nth(k).expect("index in range");
        self.s /= 2.0;
        self.w /= 2.0;
        PushSumMessage { sender: self.id, target, ack, s: self.s, w: self.w }
    }

    pub fn absorb(&mut self, m: &PushSumMessage) {
        if m.sender == self.id {
            return;
        }
        self.heard.insert(m.sender);
        if m.ack == self.id {
            self.confirmed.insert(m.sender);
        }
        if m.target == self.id {
            self.s += m.s;
            self.w += m.w;
        }
    }
}

impl Controller for PushSum {
    fn init(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        api.set_max_nb_processed_msg_per_tick(INBOX_CAPACITY as u32);
        apply_loop_parameters(api)?;
        let value = api.param_f64_or("push_sum_value", api.id() as f64)?;
        *self = PushSum::new(api.id(), value);
        api.stop();
        Ok(())
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult {
        api.stop();
        Ok(())
    }

    fn on_message(&mut self, _api: &mut RobotApi<'_>, msg: &Message) -> HookResult {
        if let Some(m) = PushSumMessage::decode(&msg.payload) {
            self.absorb(&m);
        }
        Ok(())
    }

    fn on_send(&mut self, api: &mut RobotApi<'_>) -> HookResult<bool> {
        let m = self.emit(api.rng());
        api.send_short(EmitterDir::Omni, &m.encode())?;
        Ok(true)
    }

    fn create_data_schema(&self, schema: &mut SchemaBuilder) -> HookResult {
        schema.add_float64("s")?;
        schema.add_float64("w")?;
        schema.add_float64("estimate")?;
        Ok(())
    }

    fn export_data(&mut self, row: &mut DataRow<'_>) -> HookResult {
        row.set_float64("s", self.s)?;
        row.set_float64("w", self.w)?;
        row.set_float64("estimate", self.estimate())?;
        Ok(())
    }
}
