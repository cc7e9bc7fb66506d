//! Simulation scheduler and controller interface.
//!
//! Time advances in slices of `time_step`. In each slice every robot whose
//! next pogotick is due runs, in ascending id order: up to
//! `max_nb_processed_msg_per_tick` received messages, then (with probability
//! `percent_msgs_sent_per_ticks / 100`) the send hook, then `step`. Messages
//! queued during the slice are delivered at its end, physics advances by one
//! `time_step`, and rows are sampled every `save_data_period` seconds.

mod api;

pub use api::{
    BodyView, HookEnv, ImuReading, Motor, MotorDir, RobotApi, RobotState, GRAVITY, LED_COUNT, PHOTOSENSOR_OFFSETS,
};

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comm::{deliver, CommError, CommModelParams, CommNode, CommScene, CommStats, Emission, Inbox, Message, Source};
use crate::config::{ConfigError, ObjectKind, PogotickPhase, SimConfig};
use crate::geometry::{polygon_centroid, Segment, Vec2};
use crate::physics::{Body, BodyParams, Chain, DriveParams, PhysicsWorld, Wall};
use crate::recorder::{
    format_frame_name, save_frame, write_ipc, DataRow, FixedRow, FrameObject, FrameScene, RecordSchema, RecorderError,
    SchemaBuilder, Table, Value, CONFIGURATION_KEY,
};
use crate::world::{ObjectShape, World, WorldError, WorldObject, MEMBRANE_LINK_RADIUS};

const STREAM_PLACEMENT: u64 = 0;
const STREAM_PHYSICS: u64 = 1;
const STREAM_COMM: u64 = 2;
const STREAM_SCHEDULER: u64 = 3;
const STREAM_ROBOT_BASE: u64 = 1000;

/// Error raised by a controller hook.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ControllerError(pub String);

impl From<String> for ControllerError {
    fn from(s: String) -> Self {
        ControllerError(s)
    }
}

impl From<&str> for ControllerError {
    fn from(s: &str) -> Self {
        ControllerError(s.to_string())
    }
}

impl From<CommError> for ControllerError {
    fn from(e: CommError) -> Self {
        ControllerError(e.to_string())
    }
}

impl From<ConfigError> for ControllerError {
    fn from(e: ConfigError) -> Self {
        ControllerError(e.to_string())
    }
}

impl From<RecorderError> for ControllerError {
    fn from(e: RecorderError) -> Self {
        ControllerError(e.to_string())
    }
}

pub type HookResult<T = ()> = Result<T, ControllerError>;

/// The user program run by every robot of a category. Each robot owns its
/// own instance, so struct fields are private per-robot state.
pub trait Controller: Send {
    fn init(&mut self, _api: &mut RobotApi<'_>) -> HookResult {
        Ok(())
    }

    fn step(&mut self, api: &mut RobotApi<'_>) -> HookResult;

    fn on_message(&mut self, _api: &mut RobotApi<'_>, _msg: &Message) -> HookResult {
        Ok(())
    }

    /// Called with probability `percent_msgs_sent_per_ticks / 100` each
    /// pogotick; returns whether something was sent.
    fn on_send(&mut self, _api: &mut RobotApi<'_>) -> HookResult<bool> {
        Ok(false)
    }

    /// Declares extra result columns. Called once per registered program.
    fn create_data_schema(&self, _schema: &mut SchemaBuilder) -> HookResult {
        Ok(())
    }

    /// Fills custom columns (or suppresses the row) at a sampling instant.
    fn export_data(&mut self, _row: &mut DataRow<'_>) -> HookResult {
        Ok(())
    }
}

pub type ControllerFactory = Arc<dyn Fn() -> Box<dyn Controller> + Send + Sync>;

/// Maps object categories to controller factories.
#[derive(Clone, Default)]
pub struct Program {
    entries: Vec<ControllerFactory>,
    robots: Option<usize>,
    walls: Option<usize>,
    categories: Vec<(String, usize)>,
}

impl Program {
    /// Runs `factory` on every pogobot and pogobject category.
    pub fn new<C: Controller + 'static>(factory: impl Fn() -> C + Send + Sync + 'static) -> Self {
        Self::default().with_robots(factory)
    }

    pub fn with_robots<C: Controller + 'static>(mut self, factory: impl Fn() -> C + Send + Sync + 'static) -> Self {
        self.entries.push(Arc::new(move || Box::new(factory())));
        self.robots = Some(self.entries.len() - 1);
        self
    }

    /// Controller for pogowall and membrane categories.
    pub fn with_walls<C: Controller + 'static>(mut self, factory: impl Fn() -> C + Send + Sync + 'static) -> Self {
        self.entries.push(Arc::new(move || Box::new(factory())));
        self.walls = Some(self.entries.len() - 1);
        self
    }

    /// Controller for one named category, overriding the defaults.
    pub fn with_category<C: Controller + 'static>(
        mut self,
        category: &str,
        factory: impl Fn() -> C + Send + Sync + 'static,
    ) -> Self {
        self.entries.push(Arc::new(move || Box::new(factory())));
        self.categories.push((category.to_string(), self.entries.len() - 1));
        self
    }

    /// Uses an already boxed factory for robot categories.
    pub fn from_factory(factory: ControllerFactory) -> Self {
        Self { entries: vec![factory], robots: Some(0), ..Self::default() }
    }

    fn entry_for(&self, category: &str, kind: ObjectKind) -> Option<usize> {
        if let Some((_, e)) = self.categories.iter().find(|(c, _)| c == category) {
            return Some(*e);
        }
        match kind {
            ObjectKind::Pogobot | ObjectKind::Pogobject => self.robots,
            ObjectKind::Pogowall | ObjectKind::Membrane => self.walls,
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RuntimeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("category `{category}`: {source}")]
    Comm {
        category: String,
        #[source]
        source: CommError,
    },
    #[error(transparent)]
    Delivery(CommError),
    #[error("no controller registered for category `{0}`")]
    MissingController(String),
    #[error("robot {id} ({category}) failed in {hook} at tick {tick}: {message}")]
    Hook {
        id: u16,
        category: String,
        tick: u32,
        hook: &'static str,
        message: String,
    },
    #[error(transparent)]
    Recorder(#[from] RecorderError),
    #[error("cannot remove `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Where and whether to write files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Base for relative output paths (current directory when `None`).
    pub output_dir: Option<PathBuf>,
    /// Base for relative `arena_file` paths.
    pub arena_dir: PathBuf,
    /// Write the data file, console log and frames configured in the file.
    pub write_files: bool,
    /// Keep per-link delivery counts in [`CommStats::per_link`].
    pub track_links: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { output_dir: None, arena_dir: PathBuf::from("."), write_files: false, track_links: false }
    }
}

impl RunOptions {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_files(output_dir: impl Into<PathBuf>) -> Self {
        Self { output_dir: Some(output_dir.into()), write_files: true, ..Self::default() }
    }

    pub fn arena_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.arena_dir = dir.into();
        self
    }

    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        match &self.output_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }
}

/// Final state of one object.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub id: u16,
    pub category: String,
    pub kind: ObjectKind,
    pub ticks: u32,
    pub position: Vec2,
    pub angle: f64,
    pub leds: [[u8; 3]; LED_COUNT],
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub table: Table,
    pub agents: Vec<AgentSummary>,
    pub comm: CommStats,
    pub data_file: Option<PathBuf>,
    pub console_file: Option<PathBuf>,
    pub frames: Vec<PathBuf>,
    pub console: Vec<String>,
    pub steps: u64,
}

struct Agent {
    object: usize,
    state: RobotState,
    controller: Option<Box<dyn Controller>>,
    program: Option<usize>,
    body: Option<usize>,
    links: Vec<usize>,
    segments: Vec<Segment>,
    group: Option<u32>,
}

/// A single simulation instance.
pub struct Simulation {
    config: SimConfig,
    options: RunOptions,
    world: World,
    physics: PhysicsWorld,
    body_owner: Vec<usize>,
    acceleration: Vec<Vec2>,
    occluders: Vec<Segment>,
    agents: Vec<Agent>,
    order: Vec<usize>,
    inboxes: Vec<Inbox>,
    outbox: Vec<Emission>,
    schema: RecordSchema,
    table: Table,
    rng_physics: ChaCha8Rng,
    rng_comm: ChaCha8Rng,
    rng_scheduler: ChaCha8Rng,
    slice: u64,
    total_slices: u64,
    next_sample: u64,
    next_frame: u64,
    stats: CommStats,
    console: Option<Vec<String>>,
    frames: Vec<PathBuf>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn hook_error(state: &RobotState, hook: &'static str, e: ControllerError) -> RuntimeError {
    RuntimeError::Hook { id: state.id, category: state.category.clone(), tick: state.ticks, hook, message: e.0 }
}

impl Simulation {
    pub fn new(config: SimConfig, program: &Program, options: RunOptions) -> Result<Self, RuntimeError> {
        config.validate()?;
        let mut rng_place = stream(config.seed, STREAM_PLACEMENT);
        let world = World::build(&config, &options.arena_dir, &mut rng_place)?;

        let mut physics = PhysicsWorld::new(world.arena.bounds());
        physics.add_wall(Wall::boundary(world.arena.boundary.clone()));
        let mut occluders = world.arena.wall_segments.clone();
        let mut body_owner = Vec::new();
        let mut agents = Vec::new();
        let mut next_group = 0u32;

        for (index, obj) in world.objects.iter().enumerate() {
            let spec = &config.objects[&obj.category];
            let mut agent = Agent {
                object: index,
                state: RobotState::new(
                    obj.id,
                    &obj.category,
                    obj.kind,
                    stream(config.seed, STREAM_ROBOT_BASE + index as u64),
                ),
                controller: None,
                program: None,
                body: None,
                links: Vec::new(),
                segments: Vec::new(),
                group: None,
            };
            let params = BodyParams {
                radius: spec.radius,
                density: spec.body_density,
                friction: spec.body_friction,
                restitution: spec.body_restitution,
                linear_damping: spec.body_linear_damping,
                angular_damping: spec.body_angular_damping,
                drive: obj.kind.is_robot().then_some(DriveParams {
                    max_linear_speed: spec.max_linear_speed,
                    max_angular_speed: spec.max_angular_speed,
                    linear_noise_stddev: spec.linear_noise_stddev,
                    angular_noise_stddev: spec.angular_noise_stddev,
                }),
                group: None,
            };
            match &obj.shape {
                ObjectShape::Disk { .. } => {
                    agent.body = Some(physics.add_body(Body::new(obj.pose.position, obj.pose.angle, &params)));
                    body_owner.push(agents.len());
                }
                ObjectShape::Chain { link_radius, links } => {
                    let group = next_group;
                    next_group += 1;
                    let link_params = BodyParams { radius: *link_radius, drive: None, group: Some(group), ..params };
                    for p in links {
                        agent.links.push(physics.add_body(Body::new(*p, 0.0, &link_params)));
                        body_owner.push(agents.len());
                    }
                    let n = links.len();
                    let rest = if n > 1 { links[0].distance(links[1]) } else { 2.0 * MEMBRANE_LINK_RADIUS };
                    physics.add_chain(Chain { links: agent.links.clone(), rest_length: rest });
                    agent.group = Some(group);
                }
                ObjectShape::Polygon { vertices } => {
                    physics.add_wall(Wall::obstacle(vertices.clone()));
                    agent.segments = obj.wall_segments(&world.arena);
                    occluders.extend(agent.segments.iter().copied());
                }
                ObjectShape::Boundary => {
                    agent.segments = obj.wall_segments(&world.arena);
                }
            }
            if obj.kind != ObjectKind::PassiveObject {
                agent.state.comm_radius = spec.communication_radius;
                agent.state.comm_params = CommModelParams::from_spec(spec.msg_success_rate.as_ref())
                    .map_err(|source| RuntimeError::Comm { category: obj.category.clone(), source })?;
            }
            if let Some(e) = program.entry_for(&obj.category, obj.kind) {
                agent.controller = Some((program.entries[e])());
                agent.program = Some(e);
            } else if obj.kind.is_robot() {
                return Err(RuntimeError::MissingController(obj.category.clone()));
            }
            agents.push(agent);
        }

        let mut order: Vec<usize> = (0..agents.len()).filter(|&i| agents[i].controller.is_some()).collect();
        order.sort_by_key(|&i| (agents[i].state.id, i));

        let n_bodies = physics.bodies.len();
        let mut sim = Self {
            total_slices: config.step_count(),
            rng_physics: stream(config.seed, STREAM_PHYSICS),
            rng_comm: stream(config.seed, STREAM_COMM),
            rng_scheduler: stream(config.seed, STREAM_SCHEDULER),
            stats: if options.track_links { CommStats::with_link_tracking() } else { CommStats::default() },
            console: config.enable_console_logging.then(Vec::new),
            inboxes: vec![Inbox::default(); n_bodies],
            acceleration: vec![Vec2::ZERO; n_bodies],
            config,
            options,
            world,
            physics,
            body_owner,
            occluders,
            agents,
            order,
            outbox: Vec::new(),
            schema: RecordSchema::default(),
            table: Table::default(),
            slice: 0,
            next_sample: 1,
            next_frame: 1,
            frames: Vec::new(),
        };
        sim.prepare_outputs()?;
        sim.run_init_hooks()?;
        sim.build_schema()?;
        Ok(sim)
    }

    fn prepare_outputs(&mut self) -> Result<(), RuntimeError> {
        if !(self.options.write_files && self.config.delete_old_files) {
            return Ok(());
        }
        let remove = |p: &Path| -> Result<(), RuntimeError> {
            match std::fs::remove_file(p) {
                Ok(()) => Ok(()),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
                Err(source) => Err(RuntimeError::Io { path: p.display().to_string(), source }),
            }
        };
        remove(&self.options.resolve(&self.config.data_filename))?;
        remove(&self.options.resolve(&self.config.console_filename))?;
        // frames share the template's directory, prefix and suffix
        let template = self.options.resolve(&self.config.frames_name);
        let name = template.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if let (Some(dir), Some(open), Some(close)) = (template.parent(), name.find('{'), name.rfind('}')) {
            let (prefix, suffix) = (&name[..open], &name[close + 1..]);
            if let Ok(entries) = std::fs::read_dir(dir) {
                for entry in entries.flatten() {
                    let f = entry.file_name().to_string_lossy().into_owned();
                    if f.starts_with(prefix) && f.ends_with(suffix) && f.len() > prefix.len() + suffix.len() {
                        remove(&entry.path())?;
                    }
                }
            }
        }
        Ok(())
    }

    fn body_view(&self, b: usize) -> BodyView {
        let body = &self.physics.bodies[b];
        BodyView {
            position: body.position,
            angle: body.angle,
            radius: body.radius,
            velocity: body.velocity,
            angular_velocity: body.angular_velocity,
            acceleration: self.acceleration[b],
        }
    }

    fn run_init_hooks(&mut self) -> Result<(), RuntimeError> {
        for k in 0..self.order.len() {
            let i = self.order[k];
            self.with_api(i, 0.0, |ctrl, api| ctrl.init(api)).map_err(|(s, e)| hook_error(&s, "init", e))?;
            let phase = match self.config.pogotick_phase {
                PogotickPhase::Aligned => 0.0,
                PogotickPhase::Random => self.rng_scheduler.random::<f64>() / self.agents[i].state.main_loop_hz,
            };
            self.agents[i].state.next_tick = phase;
        }
        Ok(())
    }

    fn build_schema(&mut self) -> Result<(), RuntimeError> {
        let mut builder = SchemaBuilder::new();
        let mut seen = Vec::new();
        for &i in &self.order {
            let a = &self.agents[i];
            let Some(p) = a.program else { continue };
            if seen.contains(&p) {
                continue;
            }
            seen.push(p);
            if let Some(c) = a.controller.as_ref() {
                c.create_data_schema(&mut builder).map_err(|e| hook_error(&a.state, "create_data_schema", e))?;
            }
        }
        self.schema = builder.finish();
        self.table = Table::with_schema(&self.schema);
        self.table.metadata.insert(CONFIGURATION_KEY.into(), self.config.to_yaml());
        Ok(())
    }

    /// Runs `f` with the controller of agent `i` and a fresh API handle.
    fn with_api<T>(
        &mut self,
        i: usize,
        time: f64,
        f: impl FnOnce(&mut dyn Controller, &mut RobotApi<'_>) -> HookResult<T>,
    ) -> Result<T, (RobotState, ControllerError)> {
        let body = self.agents[i].body.map(|b| self.body_view(b));
        let Self { agents, physics, outbox, console, config, world, .. } = self;
        let agent = &mut agents[i];
        let mut ctrl = agent.controller.take().expect("scheduled agents have controllers");
        let bodies = &physics.bodies;
        let (links, segments, group, body_index) = (&agent.links, &agent.segments, agent.group, agent.body);
        let source = move || -> Source {
            if let Some(b) = body_index {
                Source::Robot(b)
            } else if !links.is_empty() {
                Source::Points { points: links.iter().map(|&l| bodies[l].position).collect(), group }
            } else {
                Source::Segments(segments.clone())
            }
        };
        let env = HookEnv { time, config, lights: &world.lights };
        let mut api = RobotApi {
            state: &mut agent.state,
            env: &env,
            body,
            source: &source,
            outbox,
            console: console.as_mut(),
        };
        let result = f(ctrl.as_mut(), &mut api);
        agent.controller = Some(ctrl);
        result.map_err(|e| (agent.state.clone(), e))
    }

    fn tick(&mut self, i: usize, time: f64) -> Result<(), RuntimeError> {
        let inbox = self.agents[i].body;
        let max_rx = self.agents[i].state.max_nb_processed_msg_per_tick;
        if let Some(b) = inbox {
            for _ in 0..max_rx {
                let Some(msg) = self.inboxes[b].pop() else { break };
                self.with_api(i, time, |c, api| c.on_message(api, &msg)).map_err(|(s, e)| hook_error(&s, "on_message", e))?;
            }
        }
        let p = self.agents[i].state.percent_msgs_sent_per_ticks as f64 / 100.0;
        if self.rng_scheduler.random::<f64>() < p {
            self.with_api(i, time, |c, api| c.on_send(api)).map_err(|(s, e)| hook_error(&s, "on_send", e))?;
        }
        self.with_api(i, time, |c, api| c.step(api)).map_err(|(s, e)| hook_error(&s, "step", e))?;
        let st = &mut self.agents[i].state;
        st.ticks += 1;
        st.next_tick += 1.0 / st.main_loop_hz;
        Ok(())
    }

    fn comm_scene(&self) -> CommScene {
        let nodes = self
            .physics
            .bodies
            .iter()
            .enumerate()
            .map(|(b, body)| CommNode {
                id: self.agents[self.body_owner[b]].state.id,
                position: body.position,
                angle: body.angle,
                radius: body.radius,
                receiver: body.drive.is_some(),
                group: body.group,
            })
            .collect();
        CommScene::new(nodes, self.occluders.clone(), self.world.arena.bounds())
    }

    pub fn time(&self) -> f64 {
        self.slice as f64 * self.config.time_step
    }

    pub fn is_finished(&self) -> bool {
        self.slice >= self.total_slices
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn bodies(&self) -> &[Body] {
        &self.physics.bodies
    }

    pub fn physics(&self) -> &PhysicsWorld {
        &self.physics
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn comm_stats(&self) -> &CommStats {
        &self.stats
    }

    /// Advances one `time_step`.
    pub fn step(&mut self) -> Result<(), RuntimeError> {
        let dt = self.config.time_step;
        let t = self.time();
        for k in 0..self.order.len() {
            let i = self.order[k];
            if self.agents[i].state.next_tick <= t + 1e-9 {
                self.tick(i, t)?;
            }
        }
        if !self.outbox.is_empty() {
            let scene = self.comm_scene();
            deliver(
                &scene,
                &mut self.outbox,
                &mut self.inboxes,
                self.config.communication_ignore_occlusions,
                &mut self.rng_comm,
                &mut self.stats,
            )
            .map_err(RuntimeError::Delivery)?;
        }
        for a in &self.agents {
            if let Some(b) = a.body {
                self.physics.bodies[b].motors = a.state.motors;
            }
        }
        let before: Vec<Vec2> = self.physics.bodies.iter().map(|b| b.velocity).collect();
        self.physics.step(dt, &mut self.rng_physics);
        for (acc, (b, v0)) in self.acceleration.iter_mut().zip(self.physics.bodies.iter().zip(before)) {
            *acc = (b.velocity - v0) / dt;
        }
        self.slice += 1;
        let t_after = self.time();
        let eps = 1e-9 * dt.max(1e-12) + 1e-12;
        let period = self.config.save_data_period;
        if period > 0.0 && t_after + eps >= self.next_sample as f64 * period {
            while self.next_sample as f64 * period <= t_after + eps {
                self.next_sample += 1;
            }
            self.sample(t_after)?;
        }
        let vperiod = self.config.save_video_period;
        if vperiod > 0.0 && t_after + eps >= self.next_frame as f64 * vperiod {
            while self.next_frame as f64 * vperiod <= t_after + eps {
                self.next_frame += 1;
            }
            if self.options.write_files {
                self.export_frame(t_after)?;
            }
        }
        Ok(())
    }

    fn object_pose(&self, a: &Agent) -> (Vec2, f64) {
        let obj: &WorldObject = &self.world.objects[a.object];
        if let Some(b) = a.body {
            let body = &self.physics.bodies[b];
            return (body.position, body.angle);
        }
        if !a.links.is_empty() {
            let pts: Vec<Vec2> = a.links.iter().map(|&l| self.physics.bodies[l].position).collect();
            let c = pts.iter().fold(Vec2::ZERO, |acc, p| acc + *p) / pts.len() as f64;
            return (c, f64::NAN);
        }
        (obj.pose.position, obj.pose.angle)
    }

    fn sample(&mut self, t: f64) -> Result<(), RuntimeError> {
        for i in 0..self.agents.len() {
            let (pos, angle) = self.object_pose(&self.agents[i]);
            let schema = &self.schema;
            let a = &mut self.agents[i];
            let mut row = DataRow::new(schema);
            if let Some(c) = a.controller.as_mut() {
                c.export_data(&mut row).map_err(|e| hook_error(&a.state, "export_data", e))?;
            }
            if !row.is_enabled() {
                continue;
            }
            let fixed = FixedRow {
                time: t,
                category: a.state.category.clone(),
                id: a.state.id,
                ticks: a.state.ticks,
                x: pos.x,
                y: pos.y,
                angle,
            };
            let values: Vec<Value> = fixed.into_values(row.into_values());
            self.table.push_row(values)?;
        }
        self.table.close_chunk();
        Ok(())
    }

    /// Current scene as drawn in frame images.
    pub fn frame_scene(&self) -> FrameScene {
        let mut objects = Vec::new();
        for a in &self.agents {
            let color = match a.state.kind {
                ObjectKind::PassiveObject => [150, 150, 150],
                ObjectKind::Membrane => [70, 110, 220],
                _ => a.state.leds[0],
            };
            for &b in a.body.iter().chain(&a.links) {
                let body = &self.physics.bodies[b];
                let angle = if a.body.is_some() { body.angle } else { f64::NAN };
                objects.push(FrameObject { position: body.position, radius: body.radius, angle, color });
            }
        }
        let walls = self
            .world
            .objects
            .iter()
            .filter_map(|o| match &o.shape {
                ObjectShape::Polygon { vertices } => Some(vertices.clone()),
                _ => None,
            })
            .collect();
        FrameScene {
            width: self.config.window_width,
            height: self.config.window_height,
            arena: self.world.arena.boundary.clone(),
            walls,
            objects,
            time: self.time(),
        }
    }

    fn export_frame(&mut self, t: f64) -> Result<(), RuntimeError> {
        let name = format_frame_name(&self.config.frames_name, t)?;
        let path = self.options.resolve(&name);
        save_frame(&self.frame_scene(), &path)?;
        self.frames.push(path);
        Ok(())
    }

    pub fn agent_summaries(&self) -> Vec<AgentSummary> {
        self.agents
            .iter()
            .map(|a| {
                let (position, angle) = self.object_pose(a);
                AgentSummary {
                    id: a.state.id,
                    category: a.state.category.clone(),
                    kind: a.state.kind,
                    ticks: a.state.ticks,
                    position,
                    angle,
                    leds: a.state.leds,
                }
            })
            .collect()
    }

    /// Runs to `simulation_time` and writes the configured outputs.
    pub fn run(mut self) -> Result<RunArtifacts, RuntimeError> {
        while !self.is_finished() {
            self.step()?;
        }
        self.finish()
    }

    /// Writes outputs for the state reached so far.
    pub fn finish(self) -> Result<RunArtifacts, RuntimeError> {
        let mut data_file = None;
        let mut console_file = None;
        if self.options.write_files {
            if self.config.enable_data_logging {
                let path = self.options.resolve(&self.config.data_filename);
                write_ipc(&self.table, &path)?;
                data_file = Some(path);
            }
            if let Some(lines) = &self.console {
                let path = self.options.resolve(&self.config.console_filename);
                let io = |source| RuntimeError::Io { path: path.display().to_string(), source };
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent).map_err(io)?;
                }
                let mut text = lines.join("\n");
                if !text.is_empty() {
                    text.push('\n');
                }
                std::fs::write(&path, text).map_err(io)?;
                console_file = Some(path);
            }
        }
        Ok(RunArtifacts {
            agents: self.agent_summaries(),
            steps: self.slice,
            table: self.table,
            comm: self.stats,
            data_file,
            console_file,
            frames: self.frames,
            console: self.console.unwrap_or_default(),
        })
    }
}

/// Builds and runs one simulation.
pub fn run_simulation(config: SimConfig, program: &Program, options: RunOptions) -> Result<RunArtifacts, RuntimeError> {
    Simulation::new(config, program, options)?.run()
}

/// Reference point used for static wall rows: the polygon centroid.
pub fn wall_reference(vertices: &[Vec2]) -> Vec2 {
    polygon_centroid(vertices)
}

#[cfg(test)]
mod tests;
