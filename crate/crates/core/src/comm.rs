//! Directional infrared messaging.
//!
//! Robots carry four emitters on their rim (front, left, back, right) and
//! receive through eight 45° sectors. A receiver hears an emitter when its
//! body edge is within the sender's `communication_radius` of the emitter, the
//! receiver lies on the emitting side of the sender's body, and (unless
//! occlusions are ignored) no other body or wall segment cuts the ray.
//! Pogowalls emit from their segments, membranes from their link centres.
//!
//! Each (emission, receiver) pair succeeds independently with the probability
//! given by [`reception_probability`].

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;

use crate::config::{CommModelKind, MsgSuccessRate};
use crate::geometry::{segment_point_distance, wrap_angle, Aabb, Segment, SpatialGrid, Vec2};

pub const SHORT_HEADER_SIZE: usize = 3;
pub const LONG_HEADER_SIZE: usize = 12;
pub const MAX_SHORT_PAYLOAD: usize = 29;
pub const MAX_LONG_PAYLOAD: usize = 64;
pub const INBOX_CAPACITY: usize = 32;
pub const RECEIVER_SECTORS: u8 = 8;

pub const DEFAULT_ALPHA: f64 = 1.03215183;
pub const DEFAULT_BETA: f64 = 0.00073859;
pub const DEFAULT_GAMMA: f64 = 3.14782227;
pub const DEFAULT_DELTA: f64 = 3.52543753;
pub const DEFAULT_ZETA: f64 = 0.05720136;
pub const DEFAULT_THETA: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CommError {
    #[error(
        "msg_success_rate gives only alpha, beta, gamma and delta: that is the older 4-coefficient \
         formula 1/(1 + alpha*msg_size^beta*p_send^gamma*cluster_size^delta), which is ambiguous \
         with the 6-coefficient dynamic model; give alpha, beta, gamma, delta, zeta and theta \
         (or none of them for the defaults)"
    )]
    LegacyFormula,
    #[error("msg_success_rate is missing coefficient(s) {0}; give all six or none")]
    PartialCoefficients(String),
    #[error("msg_success_rate: {0}")]
    InvalidParameter(String),
    #[error("reception probability is not finite (p_send={p_send}, cluster_size={cluster_size}, msg_size={msg_size})")]
    NonFinite {
        p_send: f64,
        cluster_size: u32,
        msg_size: usize,
    },
    #[error("payload of {len} bytes exceeds the {max}-byte maximum for {kind:?} messages")]
    PayloadTooLarge { kind: MessageKind, len: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    Short,
    Long,
}

impl MessageKind {
    pub fn header_size(self) -> usize {
        match self {
            MessageKind::Short => SHORT_HEADER_SIZE,
            MessageKind::Long => LONG_HEADER_SIZE,
        }
    }

    pub fn max_payload(self) -> usize {
        match self {
            MessageKind::Short => MAX_SHORT_PAYLOAD,
            MessageKind::Long => MAX_LONG_PAYLOAD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EmitterDir {
    Front,
    Left,
    Back,
    Right,
    Omni,
}

impl EmitterDir {
    pub const ALL: [EmitterDir; 4] = [EmitterDir::Front, EmitterDir::Left, EmitterDir::Back, EmitterDir::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Heading offset from the robot's angle, `None` for omni.
    pub fn heading(self) -> Option<f64> {
        match self {
            EmitterDir::Omni => None,
            d => Some(d.index() as f64 * FRAC_PI_2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub kind: MessageKind,
    pub sender_id: u16,
    pub emitter_dir: EmitterDir,
    pub payload: Vec<u8>,
    /// Receiving sector, `0` = front, counter-clockwise; set at delivery.
    pub receiver_dir: u8,
}

impl Message {
    pub fn new(kind: MessageKind, sender_id: u16, emitter_dir: EmitterDir, payload: Vec<u8>) -> Result<Self, CommError> {
        if payload.len() > kind.max_payload() {
            return Err(CommError::PayloadTooLarge { kind, len: payload.len(), max: kind.max_payload() });
        }
        Ok(Self { kind, sender_id, emitter_dir, payload, receiver_dir: 0 })
    }

    pub fn header_size(&self) -> usize {
        self.kind.header_size()
    }

    pub fn payload_length(&self) -> usize {
        self.payload.len()
    }

    pub fn msg_size(&self) -> usize {
        self.header_size() + self.payload_length()
    }
}

/// Resolved loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CommModelParams {
    Static { rate: f64 },
    Dynamic { alpha: f64, beta: f64, gamma: f64, delta: f64, zeta: f64, theta: f64 },
}

impl Default for CommModelParams {
    fn default() -> Self {
        CommModelParams::Dynamic {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            delta: DEFAULT_DELTA,
            zeta: DEFAULT_ZETA,
            theta: DEFAULT_THETA,
        }
    }
}

impl CommModelParams {
    /// Converts a config block; `None` selects the dynamic model defaults.
    pub fn from_spec(spec: Option<&MsgSuccessRate>) -> Result<Self, CommError> {
        let Some(spec) = spec else {
            return Ok(Self::default());
        };
        match spec.kind {
            CommModelKind::Static => {
                let rate = spec
                    .rate
                    .ok_or_else(|| CommError::InvalidParameter("static model needs `rate`".into()))?;
                if !(0.0..=1.0).contains(&rate) {
                    return Err(CommError::InvalidParameter(format!("rate {rate} is outside [0, 1]")));
                }
                Ok(CommModelParams::Static { rate })
            }
            CommModelKind::Dynamic => {
                let named = [
                    ("alpha", spec.alpha),
                    ("beta", spec.beta),
                    ("gamma", spec.gamma),
                    ("delta", spec.delta),
                    ("zeta", spec.zeta),
                    ("theta", spec.theta),
                ];
                let given = named.iter().filter(|(_, v)| v.is_some()).count();
                if given == 0 {
                    return Ok(Self::default());
                }
                if given == 4 && spec.zeta.is_none() && spec.theta.is_none() {
                    return Err(CommError::LegacyFormula);
                }
                if given < 6 {
                    let missing: Vec<&str> = named.iter().filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
                    return Err(CommError::PartialCoefficients(missing.join(", ")));
                }
                let v = |i: usize| named[i].1.expect("all present");
                let params = CommModelParams::Dynamic {
                    alpha: v(0),
                    beta: v(1),
                    gamma: v(2),
                    delta: v(3),
                    zeta: v(4),
                    theta: v(5),
                };
                if named.iter().any(|(_, x)| !x.expect("present").is_finite()) {
                    return Err(CommError::InvalidParameter("coefficients must be finite".into()));
                }
                if v(0) <= 0.0 {
                    return Err(CommError::InvalidParameter("alpha must be > 0".into()));
                }
                Ok(params)
            }
        }
    }
}

/// Inputs of the dynamic loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryContext {
    /// Per-pogotick send probability in `[0, 1]`.
    pub p_send: f64,
    /// One plus the number of receivers in range of the sender.
    pub cluster_size: u32,
    /// Header plus payload, bytes.
    pub msg_size: usize,
}

/// Probability that one receiver gets one emission.
pub fn reception_probability(params: &CommModelParams, ctx: &DeliveryContext) -> Result<f64, CommError> {
    match *params {
        CommModelParams::Static { rate } => Ok(rate.clamp(0.0, 1.0)),
        CommModelParams::Dynamic { alpha, beta, gamma, delta, zeta, theta } => {
            let p = ctx.p_send;
            let c = ctx.cluster_size as f64;
            let m = ctx.msg_size as f64;
            let denom = alpha + beta * p.powf(gamma) * c.powf(delta) * (zeta * m).exp() + theta * p * c;
            let prob = 1.0 / denom;
            if !prob.is_finite() || !denom.is_finite() {
                return Err(CommError::NonFinite { p_send: p, cluster_size: ctx.cluster_size, msg_size: ctx.msg_size });
            }
            Ok(prob.clamp(0.0, 1.0))
        }
    }
}

/// A body visible to the messaging layer.
#[derive(Debug, Clone, PartialEq)]
pub struct CommNode {
    pub id: u16,
    pub position: Vec2,
    pub angle: f64,
    pub radius: f64,
    /// Robots receive; membrane links only occlude.
    pub receiver: bool,
    /// Nodes of the same group never occlude each other's emissions.
    pub group: Option<u32>,
}

/// Where an emission originates.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Rim emitters of node `0`.
    Robot(usize),
    /// Point emitters (membrane links).
    Points { points: Vec<Vec2>, group: Option<u32> },
    /// Segment emitters (pogowalls).
    Segments(Vec<Segment>),
}

/// One sender→receiver connection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub receiver: usize,
    pub receiver_dir: u8,
    pub emitter_index: usize,
    pub distance: f64,
}

/// Frozen positions used for all emissions of one time slice.
#[derive(Debug, Clone)]
pub struct CommScene {
    pub nodes: Vec<CommNode>,
    pub walls: Vec<Segment>,
    grid: SpatialGrid,
    max_radius: f64,
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

/// Proper crossing only: touching endpoints do not count.
fn crosses(p1: Vec2, p2: Vec2, s: &Segment) -> bool {
    let d1 = orient(s.a, s.b, p1);
    let d2 = orient(s.a, s.b, p2);
    let d3 = orient(p1, p2, s.a);
    let d4 = orient(p1, p2, s.b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Eight-sector quantisation of the bearing from `receiver` to `from`.
pub fn receiver_sector(receiver_pos: Vec2, receiver_angle: f64, from: Vec2) -> u8 {
    let bearing = wrap_angle((from - receiver_pos).angle() - receiver_angle);
    let sector = ((bearing + FRAC_PI_4 / 2.0).rem_euclid(2.0 * PI) / FRAC_PI_4).floor() as u8;
    sector % RECEIVER_SECTORS
}

impl CommScene {
    pub fn new(nodes: Vec<CommNode>, walls: Vec<Segment>, bounds: Aabb) -> Self {
        let max_radius = nodes.iter().map(|n| n.radius).fold(0.0, f64::max);
        let mut grid = SpatialGrid::new(bounds.inflated(1.0), 100.0);
        for (i, n) in nodes.iter().enumerate() {
            grid.insert(i, n.position);
        }
        Self { nodes, walls, grid, max_radius }
    }

    fn occluded(&self, from: Vec2, to: Vec2, skip: &[usize], group: Option<u32>, scratch: &mut Vec<usize>) -> bool {
        let bounds = Aabb::from_points(&[from, to]).inflated(self.max_radius);
        self.grid.query_box(bounds, scratch);
        for &k in scratch.iter() {
            if skip.contains(&k) {
                continue;
            }
            let n = &self.nodes[k];
            if group.is_some() && n.group == group {
                continue;
            }
            if segment_point_distance(from, to, n.position) < n.radius {
                return true;
            }
        }
        self.walls.iter().any(|s| crosses(from, to, s))
    }

    /// Receivers reached by `source` through `dir`, one link per receiver
    /// (the nearest usable emitter), sorted by receiver index.
    pub fn links(&self, source: &Source, dir: EmitterDir, comm_radius: f64, ignore_occlusions: bool) -> Vec<Link> {
        let mut emitters: Vec<(usize, Vec2, Option<Vec2>)> = Vec::new();
        let mut segments: &[Segment] = &[];
        let mut sender: Option<usize> = None;
        let mut group = None;
        match source {
            Source::Robot(i) => {
                let n = &self.nodes[*i];
                sender = Some(*i);
                group = n.group;
                for d in EmitterDir::ALL {
                    if dir != EmitterDir::Omni && dir != d {
                        continue;
                    }
                    let facing = Vec2::from_angle(n.angle + d.heading().expect("directional"));
                    emitters.push((d.index(), n.position + facing * n.radius, Some(facing)));
                }
            }
            Source::Points { points, group: g } => {
                group = *g;
                emitters.extend(points.iter().enumerate().map(|(k, p)| (k, *p, None)));
            }
            Source::Segments(s) => segments = s,
        }

        let mut best: BTreeMap<usize, Link> = BTreeMap::new();
        let mut candidates = Vec::new();
        let mut scratch = Vec::new();
        let reach = comm_radius + self.max_radius;
        let consider = |best: &mut BTreeMap<usize, Link>, scratch: &mut Vec<usize>, r: usize, emitter_index: usize, e: Vec2| {
            let node = &self.nodes[r];
            let dist = e.distance(node.position);
            if dist - node.radius > comm_radius {
                return;
            }
            if best.get(&r).is_some_and(|l| l.distance <= dist) {
                return;
            }
            if !ignore_occlusions {
                let mut skip = vec![r];
                skip.extend(sender);
                let start = e + (node.position - e) * 1e-9;
                if self.occluded(start, node.position, &skip, group, scratch) {
                    return;
                }
            }
            best.insert(
                r,
                Link {
                    receiver: r,
                    receiver_dir: receiver_sector(node.position, node.angle, e),
                    emitter_index,
                    distance: dist,
                },
            );
        };

        for &(idx, e, facing) in &emitters {
            self.grid.query(e, reach, &mut candidates);
            candidates.sort_unstable();
            for &r in &candidates {
                let node = &self.nodes[r];
                if !node.receiver || Some(r) == sender || (group.is_some() && node.group == group) {
                    continue;
                }
                if let Some(f) = facing {
                    // the sender's own body blocks the rear half-plane of each emitter
                    if (node.position - e).dot(f) < 0.0 {
                        continue;
                    }
                }
                consider(&mut best, &mut scratch, r, idx, e);
            }
        }
        for (idx, s) in segments.iter().enumerate() {
            let bounds = Aabb::from_points(&[s.a, s.b]).inflated(reach);
            self.grid.query_box(bounds, &mut candidates);
            candidates.sort_unstable();
            for &r in &candidates {
                if !self.nodes[r].receiver {
                    continue;
                }
                let e = s.closest_point(self.nodes[r].position);
                consider(&mut best, &mut scratch, r, idx, e);
            }
        }
        best.into_values().collect()
    }
}

/// Bounded FIFO; the oldest message is dropped on overflow.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inbox {
    queue: VecDeque<Message>,
}

impl Inbox {
    /// Returns `true` when a message had to be dropped.
    pub fn push(&mut self, m: Message) -> bool {
        let overflow = self.queue.len() >= INBOX_CAPACITY;
        if overflow {
            self.queue.pop_front();
        }
        self.queue.push_back(m);
        overflow
    }

    pub fn pop(&mut self) -> Option<Message> {
        self.queue.pop_front()
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn clear(&mut self) {
        self.queue.clear();
    }
}

/// One message waiting for delivery at the end of the slice.
#[derive(Debug, Clone)]
pub struct Emission {
    pub source: Source,
    pub message: Message,
    pub comm_radius: f64,
    pub params: CommModelParams,
    pub p_send: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommStats {
    pub emissions: u64,
    pub attempts: u64,
    pub delivered: u64,
    pub lost: u64,
    pub inbox_overflows: u64,
    /// `(sender id, receiver id) -> (attempts, successes)` when enabled.
    pub per_link: Option<BTreeMap<(u16, u16), (u64, u64)>>,
}

impl CommStats {
    pub fn with_link_tracking() -> Self {
        Self { per_link: Some(BTreeMap::new()), ..Self::default() }
    }
}

/// Resolves every pending emission against `scene`, appending successes to
/// `inboxes` (indexed like `scene.nodes`). Emissions are processed in
/// (sender id, emitter index) order; the queue is drained.
pub fn deliver<R: Rng>(
    scene: &CommScene,
    emissions: &mut Vec<Emission>,
    inboxes: &mut [Inbox],
    ignore_occlusions: bool,
    rng: &mut R,
    stats: &mut CommStats,
) -> Result<(), CommError> {
    emissions.sort_by_key(|e| (e.message.sender_id, e.message.emitter_dir.index()));
    for em in emissions.drain(..) {
        stats.emissions += 1;
        let links = scene.links(&em.source, em.message.emitter_dir, em.comm_radius, ignore_occlusions);
        let in_range = if em.message.emitter_dir == EmitterDir::Omni {
            links.len()
        } else {
            scene.links(&em.source, EmitterDir::Omni, em.comm_radius, ignore_occlusions).len()
        };
        let ctx = DeliveryContext {
            p_send: em.p_send,
            cluster_size: 1 + in_range as u32,
            msg_size: em.message.msg_size(),
        };
        let prob = reception_probability(&em.params, &ctx)?;
        for link in links {
            stats.attempts += 1;
            let ok = rng.random::<f64>() < prob;
            if let Some(map) = stats.per_link.as_mut() {
                let entry = map.entry((em.message.sender_id, scene.nodes[link.receiver].id)).or_insert((0, 0));
                entry.0 += 1;
                entry.1 += ok as u64;
            }
            if !ok {
                stats.lost += 1;
                continue;
            }
            stats.delivered += 1;
            let mut m = em.message.clone();
            m.receiver_dir = link.receiver_dir;
            if inboxes[link.receiver].push(m) {
                stats.inbox_overflows += 1;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn robot(id: u16, x: f64, y: f64, angle: f64) -> CommNode {
        CommNode { id, position: Vec2::new(x, y), angle, radius: 26.5, receiver: true, group: None }
    }

    fn scene(nodes: Vec<CommNode>, walls: Vec<Segment>) -> CommScene {
        let b = Aabb { min: Vec2::new(-1000.0, -1000.0), max: Vec2::new(1000.0, 1000.0) };
        CommScene::new(nodes, walls, b)
    }

    fn ctx(p_send: f64, cluster_size: u32, msg_size: usize) -> DeliveryContext {
        DeliveryContext { p_send, cluster_size, msg_size }
    }

    #[test]
    fn static_rate_passthrough() {
        let p = CommModelParams::Static { rate: 0.9 };
        assert_eq!(reception_probability(&p, &ctx(0.3, 7, 20)).unwrap(), 0.9);
    }

    #[test]
    fn zero_send_rate_gives_inverse_alpha() {
        let p = CommModelParams::default();
        let got = reception_probability(&p, &ctx(0.0, 50, 40)).unwrap();
        assert_eq!(got, 1.0 / DEFAULT_ALPHA);
        assert_relative_eq!(got, 0.968850, epsilon = 1e-6);
    }

    #[test]
    fn mid_range_point_matches_hand_evaluation() {
        // beta * 0.5^gamma * 10^delta * e^(10 zeta) and theta * 0.5 * 10, separately
        let t1 = DEFAULT_BETA * 0.5f64.powf(DEFAULT_GAMMA) * 10f64.powf(DEFAULT_DELTA) * (10.0 * DEFAULT_ZETA).exp();
        let t2 = DEFAULT_THETA * 5.0;
        assert!((t1 - 0.495).abs() < 0.01, "{t1}");
        let got = reception_probability(&CommModelParams::default(), &ctx(0.5, 10, 10)).unwrap();
        assert_relative_eq!(got, 1.0 / (DEFAULT_ALPHA + t1 + t2), max_relative = 1e-14);
        assert!((got - 0.65).abs() < 0.01);
    }

    #[test]
    fn absurd_message_size_is_an_error() {
        let err = reception_probability(&CommModelParams::default(), &ctx(1.0, 1000, 100_000)).unwrap_err();
        assert!(matches!(err, CommError::NonFinite { .. }));
    }

    #[test]
    fn legacy_and_partial_coefficients_rejected() {
        let mut spec = MsgSuccessRate::fixed(0.5);
        spec.kind = CommModelKind::Dynamic;
        spec.rate = None;
        assert_eq!(CommModelParams::from_spec(Some(&spec)).unwrap(), CommModelParams::default());
        spec.alpha = Some(1e-6);
        spec.beta = Some(3.0708);
        spec.gamma = Some(2.3234);
        spec.delta = Some(1.1897);
        let err = CommModelParams::from_spec(Some(&spec)).unwrap_err();
        assert_eq!(err, CommError::LegacyFormula);
        assert!(err.to_string().contains("4-coefficient"));
        spec.zeta = Some(0.05);
        assert!(matches!(CommModelParams::from_spec(Some(&spec)), Err(CommError::PartialCoefficients(m)) if m == "theta"));
        spec.theta = Some(0.001);
        assert!(CommModelParams::from_spec(Some(&spec)).is_ok());
        assert_eq!(CommModelParams::from_spec(None).unwrap(), CommModelParams::default());
    }

    #[test]
    fn message_sizes() {
        let m = Message::new(MessageKind::Short, 1, EmitterDir::Omni, vec![0; 7]).unwrap();
        assert_eq!(m.msg_size(), 10);
        let m = Message::new(MessageKind::Long, 1, EmitterDir::Omni, vec![0; 64]).unwrap();
        assert_eq!(m.msg_size(), 76);
        assert!(Message::new(MessageKind::Short, 1, EmitterDir::Front, vec![0; 30]).is_err());
    }

    #[test]
    fn far_robots_are_not_linked() {
        let s = scene(vec![robot(0, 0.0, 0.0, 0.0), robot(1, 200.0, 0.0, 0.0)], vec![]);
        assert!(s.links(&Source::Robot(0), EmitterDir::Omni, 80.0, false).is_empty());
    }

    #[test]
    fn close_robots_are_linked_with_consistent_sector() {
        // receiver faces +x; sender sits in front of it
        let s = scene(vec![robot(0, 50.0, 0.0, PI), robot(1, 0.0, 0.0, 0.0)], vec![]);
        let links = s.links(&Source::Robot(0), EmitterDir::Omni, 80.0, false);
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].receiver, 1);
        assert_eq!(links[0].emitter_index, EmitterDir::Front.index());
        assert_eq!(links[0].receiver_dir, 0);
        // sender on the receiver's left
        let s = scene(vec![robot(0, 0.0, 50.0, 0.0), robot(1, 0.0, 0.0, 0.0)], vec![]);
        let links = s.links(&Source::Robot(0), EmitterDir::Omni, 80.0, false);
        assert_eq!(links[0].receiver_dir, 2);
        assert_eq!(links[0].emitter_index, EmitterDir::Right.index());
    }

    #[test]
    fn directional_emitters_cover_their_half_plane() {
        let s = scene(vec![robot(0, 0.0, 0.0, 0.0), robot(1, 60.0, 0.0, 0.0)], vec![]);
        assert_eq!(s.links(&Source::Robot(0), EmitterDir::Front, 80.0, false).len(), 1);
        assert!(s.links(&Source::Robot(0), EmitterDir::Back, 80.0, false).is_empty());
    }

    #[test]
    fn wall_and_body_occlusion() {
        let wall = Segment { a: Vec2::new(40.0, -100.0), b: Vec2::new(40.0, 100.0) };
        let s = scene(vec![robot(0, 0.0, 0.0, 0.0), robot(1, 80.0, 0.0, 0.0)], vec![wall]);
        assert!(s.links(&Source::Robot(0), EmitterDir::Omni, 80.0, false).is_empty());
        assert_eq!(s.links(&Source::Robot(0), EmitterDir::Omni, 80.0, true).len(), 1);

        let mut blocker = robot(2, 60.0, 0.0, 0.0);
        blocker.receiver = false;
        blocker.radius = 5.0;
        let s = scene(vec![robot(0, 0.0, 0.0, 0.0), robot(1, 120.0, 0.0, 0.0), blocker], vec![]);
        assert!(s.links(&Source::Robot(0), EmitterDir::Omni, 80.0, false).is_empty());
    }

    #[test]
    fn segment_sources_reach_nearby_robots() {
        let wall = Segment { a: Vec2::new(-100.0, 0.0), b: Vec2::new(100.0, 0.0) };
        let s = scene(vec![robot(0, 10.0, 60.0, 0.0), robot(1, 0.0, 300.0, 0.0)], vec![wall]);
        let links = s.links(&Source::Segments(vec![wall]), EmitterDir::Omni, 80.0, false);
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].receiver, 0);
        // wall lies at -y of a receiver facing +x: right-hand sector
        assert_eq!(links[0].receiver_dir, 6);
    }

    #[test]
    fn lossless_delivery_arrives_once() {
        let s = scene(vec![robot(0, 0.0, 0.0, 0.0), robot(1, 60.0, 0.0, 0.0)], vec![]);
        let mut inboxes = vec![Inbox::default(), Inbox::default()];
        let mut stats = CommStats::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..10u8 {
            let mut q = vec![Emission {
                source: Source::Robot(0),
                message: Message::new(MessageKind::Short, 0, EmitterDir::Omni, vec![k]).unwrap(),
                comm_radius: 80.0,
                params: CommModelParams::Static { rate: 1.0 },
                p_send: 1.0,
            }];
            deliver(&s, &mut q, &mut inboxes, false, &mut rng, &mut stats).unwrap();
        }
        assert_eq!(inboxes[1].len(), 10);
        assert!(inboxes[0].is_empty());
        assert_eq!(inboxes[1].pop().unwrap().payload, vec![0]);
    }

    #[test]
    fn inbox_drops_oldest() {
        let mut inbox = Inbox::default();
        let mut overflows = 0;
        for k in 0..40u8 {
            let m = Message::new(MessageKind::Short, 0, EmitterDir::Omni, vec![k]).unwrap();
            overflows += inbox.push(m) as usize;
        }
        assert_eq!(overflows, 8);
        assert_eq!(inbox.len(), INBOX_CAPACITY);
        assert_eq!(inbox.pop().unwrap().payload, vec![8]);
    }

    #[test]
    fn static_rate_binomial() {
        let s = scene(vec![robot(0, 0.0, 0.0, 0.0), robot(1, 60.0, 0.0, 0.0)], vec![]);
        let mut inboxes = vec![Inbox::default(), Inbox::default()];
        let mut stats = CommStats::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        for _ in 0..n {
            let mut q = vec![Emission {
                source: Source::Robot(0),
                message: Message::new(MessageKind::Short, 0, EmitterDir::Omni, vec![]).unwrap(),
                comm_radius: 80.0,
                params: CommModelParams::Static { rate: 0.9 },
                p_send: 0.5,
            }];
            deliver(&s, &mut q, &mut inboxes, false, &mut rng, &mut stats).unwrap();
            inboxes[1].clear();
        }
        let frac = stats.delivered as f64 / n as f64;
        let sigma = (0.9f64 * 0.1 / n as f64).sqrt();
        assert!((frac - 0.9).abs() <= 3.0 * sigma, "{frac}");
    }

    proptest::proptest! {
        #[test]
        fn probability_bounded_and_monotone(
            p in 0.0f64..=1.0, dp in 0.0f64..0.5,
            c in 1u32..200, dc in 0u32..50,
            m in 3usize..80, dm in 0usize..20,
        ) {
            let params = CommModelParams::default();
            let base = reception_probability(&params, &ctx(p, c, m)).unwrap();
            proptest::prop_assert!((0.0..=1.0).contains(&base));
            let p2 = (p + dp).min(1.0);
            proptest::prop_assert!(reception_probability(&params, &ctx(p2, c, m)).unwrap() <= base);
            proptest::prop_assert!(reception_probability(&params, &ctx(p, c + dc, m)).unwrap() <= base);
            proptest::prop_assert!(reception_probability(&params, &ctx(p, c, m + dm)).unwrap() <= base);
        }

        #[test]
        fn links_symmetric_without_occlusion(
            x in -160.0f64..160.0, y in -160.0f64..160.0,
            a0 in -PI..PI, a1 in -PI..PI,
        ) {
            // Rim emitters make reach depend on heading for centre distances in
            // (R + 1.29 r, R + 2 r]; outside that band links are symmetric.
            let b = robot(1, x, y, a1);
            let d = b.position.length();
            proptest::prop_assume!(d >= 53.0 && (d < 80.0 + 1.29 * 26.5 || d > 80.0 + 2.0 * 26.5));
            let s = scene(vec![robot(0, 0.0, 0.0, a0), b], vec![]);
            let ab = !s.links(&Source::Robot(0), EmitterDir::Omni, 80.0, true).is_empty();
            let ba = !s.links(&Source::Robot(1), EmitterDir::Omni, 80.0, true).is_empty();
            proptest::prop_assert_eq!(ab, ba);
        }
    }
}
