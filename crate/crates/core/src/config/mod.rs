//! YAML experiment configuration.
//!
//! A configuration file is first parsed into a raw [`serde_yaml::Value`]
//! tree. Sweep (`batch_options`) and optimization (`optimization_domain`)
//! annotations are resolved to their defaults, then the tree is deserialized
//! into a [`SimConfig`] and validated. Unknown keys are reported as warnings.
//!
//! Defaults for omitted keys follow the values of the reference example
//! configuration: damping 0.3, density 10.0, friction 0.3, restitution 0.5,
//! radius 26.5 mm, speed caps 100 mm/s and 2 rad/s, communication radius
//! 80 mm, `nb` 1, and every GUI/display flag `false`.

mod annotations;
mod scalar;

pub use annotations::{
    apply_optim_defaults, apply_sweep_defaults, extract_optim_domains, extract_sweeps, get_path,
    set_path, OptimAnnotation, OptimDomain, SweepAnnotation, BATCH_OPTIONS_KEY,
    DEFAULT_OPTION_KEY, OPTIMIZATION_DOMAIN_KEY,
};
pub use scalar::Scalar;

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize};
use serde_yaml::Value;

/// Highest photosensor / light level.
pub const MAX_LIGHT_LEVEL: f64 = 32767.0;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("YAML parse error{}: {message}", location_suffix(*.line, *.column))]
    Parse {
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("invalid configuration at `{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error("unknown parameter `{name}`; available parameters: [{}]", .available.join(", "))]
    MissingParameter { name: String, available: Vec<String> },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn location_suffix(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l} column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

impl ConfigError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialFormation {
    #[default]
    Random,
    Disk,
}

/// Phase of each robot's control loop relative to t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PogotickPhase {
    #[default]
    Aligned,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Pogobot,
    Pogobject,
    Pogowall,
    Membrane,
    PassiveObject,
    StaticLight,
}

impl ObjectKind {
    /// Robot-like objects with a head: they run controllers and receive IR.
    pub fn is_robot(self) -> bool {
        matches!(self, ObjectKind::Pogobot | ObjectKind::Pogobject)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    #[default]
    Disk,
    Global,
    Polygon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LightMode {
    #[default]
    Static,
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommModelKind {
    Static,
    Dynamic,
}

/// The `msg_success_rate` block as written in the file. Conversion into a
/// usable loss model happens in [`crate::comm::CommModelParams::from_spec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsgSuccessRate {
    #[serde(rename = "type")]
    pub kind: CommModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl MsgSuccessRate {
    pub fn fixed(rate: f64) -> Self {
        Self {
            kind: CommModelKind::Static,
            rate: Some(rate),
            alpha: None,
            beta: None,
            gamma: None,
            delta: None,
            zeta: None,
            theta: None,
        }
    }
}

fn d_nb() -> u32 {
    1
}
fn d_radius() -> f64 {
    26.5
}
fn d_damping() -> f64 {
    0.3
}
fn d_density() -> f64 {
    10.0
}
fn d_friction() -> f64 {
    0.3
}
fn d_restitution() -> f64 {
    0.5
}
fn d_max_linear_speed() -> f64 {
    100.0
}
fn d_max_angular_speed() -> f64 {
    2.0
}
fn d_comm_radius() -> f64 {
    80.0
}
fn d_photo_start_at() -> f64 {
    -1.0
}
fn d_photo_start_value() -> f64 {
    MAX_LIGHT_LEVEL
}

/// One object category under `objects:`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    #[serde(rename = "type")]
    pub kind: ObjectKind,
    #[serde(default = "d_nb")]
    pub nb: u32,
    #[serde(default)]
    pub geometry: GeometryKind,
    #[serde(default = "d_radius")]
    pub radius: f64,
    /// Vertices (mm) for `geometry: polygon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    /// Center (mm) for disk-shaped lights; arena centroid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default = "d_damping")]
    pub body_linear_damping: f64,
    #[serde(default = "d_damping")]
    pub body_angular_damping: f64,
    #[serde(default = "d_density")]
    pub body_density: f64,
    #[serde(default = "d_friction")]
    pub body_friction: f64,
    #[serde(default = "d_restitution")]
    pub body_restitution: f64,
    #[serde(default = "d_max_linear_speed")]
    pub max_linear_speed: f64,
    #[serde(default = "d_max_angular_speed")]
    pub max_angular_speed: f64,
    #[serde(default)]
    pub linear_noise_stddev: f64,
    #[serde(default)]
    pub angular_noise_stddev: f64,
    #[serde(default = "d_comm_radius")]
    pub communication_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msg_success_rate: Option<MsgSuccessRate>,
    #[serde(default)]
    pub light_mode: LightMode,
    #[serde(default)]
    pub value: f64,
    #[serde(default = "d_photo_start_at")]
    pub photo_start_at: f64,
    #[serde(default)]
    pub photo_start_duration: f64,
    #[serde(default = "d_photo_start_value")]
    pub photo_start_value: f64,
}

impl ObjectSpec {
    /// A spec with every optional field at its default.
    pub fn new(kind: ObjectKind) -> Self {
        let v = serde_yaml::to_value(KindOnly { kind }).expect("serializable");
        serde_yaml::from_value(v).expect("defaults deserialize")
    }
}

#[derive(Serialize)]
struct KindOnly {
    #[serde(rename = "type")]
    kind: ObjectKind,
}

fn d_window() -> u32 {
    600
}
fn d_surface() -> f64 {
    1.0e6
}
fn d_temperature() -> f64 {
    25.0
}
fn d_sim_time() -> f64 {
    50.0
}
fn d_time_step() -> f64 {
    0.01
}
fn d_save_data_period() -> f64 {
    1.0
}
fn d_disabled_period() -> f64 {
    -1.0
}
fn d_data_filename() -> String {
    "frames/data.feather".into()
}
fn d_console_filename() -> String {
    "frames/console.txt".into()
}
fn d_frames_name() -> String {
    "frames/f{:010.4f}.png".into()
}
fn d_true() -> bool {
    true
}
fn d_speed_up() -> f64 {
    1.0
}

/// Accepts numbers and numeric strings such as `'1.0e5'`.
fn lenient_f64<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }
    match NumOrStr::deserialize(de)? {
        NumOrStr::Num(v) => Ok(v),
        NumOrStr::Str(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| serde::de::Error::custom(format!("expected a number, found `{s}`"))),
    }
}

/// A fully parsed and validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default = "d_window")]
    pub window_width: u32,
    #[serde(default = "d_window")]
    pub window_height: u32,
    /// Polygon CSV file; a built-in 64-gon disk when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arena_file: Option<String>,
    #[serde(default = "d_surface", deserialize_with = "lenient_f64")]
    pub arena_surface: f64,
    #[serde(default = "d_temperature")]
    pub arena_temperature: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_sim_time")]
    pub simulation_time: f64,
    #[serde(default = "d_time_step")]
    pub time_step: f64,
    #[serde(default = "d_save_data_period")]
    pub save_data_period: f64,
    #[serde(default = "d_disabled_period")]
    pub save_video_period: f64,
    #[serde(default = "d_data_filename")]
    pub data_filename: String,
    #[serde(default = "d_console_filename")]
    pub console_filename: String,
    #[serde(default = "d_frames_name")]
    pub frames_name: String,
    #[serde(default)]
    pub initial_formation: InitialFormation,
    #[serde(default = "d_true")]
    pub enable_data_logging: bool,
    #[serde(default)]
    pub enable_console_logging: bool,
    #[serde(default)]
    pub delete_old_files: bool,
    #[serde(default)]
    pub show_communication_channels: bool,
    #[serde(default)]
    pub show_communication_channels_above_all: bool,
    #[serde(default, rename = "show_lateral_LEDs")]
    pub show_lateral_leds: bool,
    #[serde(default)]
    pub show_light_levels: bool,
    #[serde(default, rename = "GUI")]
    pub gui: bool,
    #[serde(default = "d_speed_up", rename = "GUI_speed_up")]
    pub gui_speed_up: f64,
    #[serde(default)]
    pub communication_ignore_occlusions: bool,
    #[serde(default)]
    pub pogotick_phase: PogotickPhase,
    #[serde(default)]
    pub imu_noise_stddev: f64,
    #[serde(default)]
    pub objects: IndexMap<String, ObjectSpec>,
    #[serde(default)]
    pub parameters: IndexMap<String, Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result_filename_format: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub result_new_columns: Vec<String>,
}

/// Parses YAML text into a raw tree, keeping line information on failure.
pub fn parse_tree(text: &str) -> Result<Value, ConfigError> {
    let tree: Value = serde_yaml::from_str(text).map_err(|e| {
        let loc = e.location();
        ConfigError::Parse {
            line: loc.as_ref().map(|l| l.line()),
            column: loc.as_ref().map(|l| l.column()),
            message: e.to_string(),
        }
    })?;
    Ok(match tree {
        Value::Null => Value::Mapping(Default::default()),
        other => other,
    })
}

/// Parses and validates a configuration. Unknown keys are logged as warnings.
pub fn load_config(yaml_text: &str) -> Result<SimConfig, ConfigError> {
    let (config, warnings) = load_config_with_warnings(yaml_text)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(config)
}

/// Like [`load_config`] but returns the warnings instead of logging them.
pub fn load_config_with_warnings(yaml_text: &str) -> Result<(SimConfig, Vec<String>), ConfigError> {
    SimConfig::from_tree_with_warnings(&parse_tree(yaml_text)?)
}

pub fn load_config_file(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_config(&text)
}

pub fn read_tree_file(path: &Path) -> Result<Value, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_tree(&text)
}

/// Directory that relative `arena_file` paths resolve against: the working
/// directory when the arena exists there, else the configuration's own
/// directory.
pub fn arena_base_dir(config_path: &Path, tree: &Value) -> std::path::PathBuf {
    let mut candidates: Vec<String> = Vec::new();
    match tree.get("arena_file") {
        Some(Value::String(s)) => candidates.push(s.clone()),
        Some(Value::Mapping(m)) => {
            for v in m.values() {
                match v {
                    Value::String(s) => candidates.push(s.clone()),
                    Value::Sequence(seq) => candidates.extend(seq.iter().filter_map(|v| v.as_str().map(String::from))),
                    _ => {}
                }
            }
        }
        _ => {}
    }
    let parent = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let relative: Vec<&String> = candidates.iter().filter(|c| Path::new(c.as_str()).is_relative()).collect();
    if relative.is_empty() || relative.iter().any(|c| Path::new(c.as_str()).exists()) {
        std::path::PathBuf::from(".")
    } else {
        parent
    }
}

/// Returns the named parameter with its YAML typing preserved.
pub fn resolve_parameter<'a>(config: &'a SimConfig, name: &str) -> Result<&'a Scalar, ConfigError> {
    config.parameters.get(name).ok_or_else(|| ConfigError::MissingParameter {
        name: name.to_string(),
        available: config.parameters.keys().cloned().collect(),
    })
}

impl SimConfig {
    pub fn from_tree(tree: &Value) -> Result<Self, ConfigError> {
        let (config, warnings) = Self::from_tree_with_warnings(tree)?;
        for w in warnings {
            log::warn!("{w}");
        }
        Ok(config)
    }

    pub fn from_tree_with_warnings(tree: &Value) -> Result<(Self, Vec<String>), ConfigError> {
        let resolved = apply_optim_defaults(&apply_sweep_defaults(tree)?)?;
        let resolved = match resolved {
            Value::Null => Value::Mapping(Default::default()),
            other => other,
        };
        let mut ignored = Vec::new();
        let mut track = serde_path_to_error::Track::new();
        let de = serde_path_to_error::Deserializer::new(resolved, &mut track);
        let parsed: Result<SimConfig, _> =
            serde_ignored::deserialize(de, |path| ignored.push(path.to_string()));
        let config = parsed.map_err(|e| {
            let path = track.path().to_string();
            ConfigError::invalid(if path.is_empty() { ".".into() } else { path }, e.to_string())
        })?;
        config.validate()?;
        let warnings = ignored
            .into_iter()
            .map(|p| format!("unknown configuration key `{p}` ignored"))
            .collect();
        Ok((config, warnings))
    }

    /// Canonical YAML form: every default filled in, keys in declaration order.
    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("SimConfig always serializes")
    }

    pub fn to_tree(&self) -> Value {
        serde_yaml::to_value(self).expect("SimConfig always serializes")
    }

    pub fn parameter(&self, name: &str) -> Result<&Scalar, ConfigError> {
        resolve_parameter(self, name)
    }

    /// Number of fixed-size integration slices in the run.
    pub fn step_count(&self) -> u64 {
        if self.simulation_time <= 0.0 {
            0
        } else {
            (self.simulation_time / self.time_step).round() as u64
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |path: &str, msg: String| Err(ConfigError::invalid(path, msg));
        if !(self.time_step > 0.0) || !self.time_step.is_finite() {
            return bad("time_step", format!("must be > 0 (got {})", self.time_step));
        }
        if !(self.simulation_time >= 0.0) || !self.simulation_time.is_finite() {
            return bad("simulation_time", format!("must be >= 0 (got {})", self.simulation_time));
        }
        if self.simulation_time > 0.0 && self.simulation_time < self.time_step {
            return bad(
                "simulation_time",
                format!("must be >= time_step ({} < {})", self.simulation_time, self.time_step),
            );
        }
        if self.save_data_period != -1.0 && !(self.save_data_period >= self.time_step) {
            return bad(
                "save_data_period",
                format!("must be -1 or >= time_step (got {})", self.save_data_period),
            );
        }
        if self.save_video_period != -1.0 && !(self.save_video_period > 0.0) {
            return bad(
                "save_video_period",
                format!("must be -1 or > 0 (got {})", self.save_video_period),
            );
        }
        if !(self.arena_surface > 0.0) || !self.arena_surface.is_finite() {
            return bad("arena_surface", format!("must be > 0 (got {})", self.arena_surface));
        }
        if self.window_width == 0 || self.window_height == 0 {
            return bad("window_width", "window dimensions must be positive".into());
        }
        if self.objects.is_empty() {
            return bad("objects", "no object categories".into());
        }
        for (name, spec) in &self.objects {
            if name.contains('.') || name.is_empty() {
                return bad(&format!("objects.{name}"), "category names must be non-empty and contain no '.'".into());
            }
            validate_object(&format!("objects.{name}"), spec)?;
        }
        Ok(())
    }
}

fn validate_object(path: &str, spec: &ObjectSpec) -> Result<(), ConfigError> {
    let field = |f: &str| format!("{path}.{f}");
    let non_negative = [
        ("max_linear_speed", spec.max_linear_speed),
        ("max_angular_speed", spec.max_angular_speed),
        ("body_linear_damping", spec.body_linear_damping),
        ("body_angular_damping", spec.body_angular_damping),
        ("body_friction", spec.body_friction),
        ("linear_noise_stddev", spec.linear_noise_stddev),
        ("angular_noise_stddev", spec.angular_noise_stddev),
        ("communication_radius", spec.communication_radius),
        ("photo_start_duration", spec.photo_start_duration),
    ];
    for (name, v) in non_negative {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(ConfigError::invalid(field(name), format!("must be >= 0 (got {v})")));
        }
    }
    if spec.nb < 1 {
        return Err(ConfigError::invalid(field("nb"), "must be >= 1"));
    }
    if spec.geometry == GeometryKind::Disk && !(spec.radius > 0.0) {
        return Err(ConfigError::invalid(field("radius"), format!("must be > 0 for disk geometry (got {})", spec.radius)));
    }
    if spec.geometry == GeometryKind::Polygon {
        let n = spec.points.as_ref().map_or(0, Vec::len);
        if n < 3 {
            return Err(ConfigError::invalid(field("points"), "polygon geometry needs at least 3 points"));
        }
    }
    if !(spec.body_density > 0.0) {
        return Err(ConfigError::invalid(field("body_density"), "must be > 0"));
    }
    if !(0.0..=1.0).contains(&spec.body_restitution) {
        return Err(ConfigError::invalid(field("body_restitution"), "must lie in [0, 1]"));
    }
    for (name, v) in [("value", spec.value), ("photo_start_value", spec.photo_start_value)] {
        if !(0.0..=MAX_LIGHT_LEVEL).contains(&v) {
            return Err(ConfigError::invalid(
                field(name),
                format!("light level must be between 0 and 32767 (got {v})"),
            ));
        }
    }
    if let Some(rate) = &spec.msg_success_rate {
        if rate.kind == CommModelKind::Static {
            match rate.rate {
                Some(r) if (0.0..=1.0).contains(&r) => {}
                Some(r) => {
                    return Err(ConfigError::invalid(
                        field("msg_success_rate.rate"),
                        format!("must lie in [0, 1] (got {r})"),
                    ))
                }
                None => {
                    return Err(ConfigError::invalid(
                        field("msg_success_rate.rate"),
                        "static model needs a `rate`",
                    ))
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const REFERENCE_EXAMPLE: &str = include_str!("../../conf/reference.yaml");

    #[test]
    fn reference_example_loads() {
        let (cfg, warnings) = load_config_with_warnings(REFERENCE_EXAMPLE).unwrap();
        assert_eq!(cfg.simulation_time, 50.0);
        assert_eq!(cfg.time_step, 0.01);
        assert_eq!(cfg.objects["robots"].nb, 100);
        assert_eq!(cfg.objects["robots"].radius, 26.5);
        assert_eq!(cfg.objects["global_light"].value, 200.0);
        assert_eq!(cfg.initial_formation, InitialFormation::Random);
        assert!(cfg.gui);
        assert!(warnings.is_empty(), "{warnings:?}");
    }

    #[test]
    fn empty_objects_rejected() {
        let err = load_config("objects: {}\n").unwrap_err();
        assert!(err.to_string().contains("no object categories"), "{err}");
        let err = load_config("").unwrap_err();
        assert!(err.to_string().contains("no object categories"), "{err}");
    }

    #[test]
    fn light_value_out_of_range() {
        let text = "objects:\n  l:\n    type: static_light\n    geometry: global\n    value: 40000\n";
        let err = load_config(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("objects.l.value") && msg.contains("32767"), "{msg}");
    }

    #[test]
    fn parse_error_has_line() {
        let err = load_config("a: 1\nb: [1, 2\n").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert!(line.is_some()),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn type_error_names_dotted_path() {
        let text = "objects:\n  robots:\n    type: pogobot\n    nb: lots\n";
        let err = load_config(text).unwrap_err();
        assert!(err.to_string().contains("objects.robots.nb"), "{err}");
    }

    #[test]
    fn unknown_keys_warn() {
        let text = "frobnicate: 3\nobjects:\n  r:\n    type: pogobot\n    wheel_count: 2\n";
        let (_, warnings) = load_config_with_warnings(text).unwrap();
        assert_eq!(warnings.len(), 2, "{warnings:?}");
        assert!(warnings.iter().any(|w| w.contains("objects.r.wheel_count")));
    }

    #[test]
    fn surface_as_string() {
        let text = "arena_surface: '1.0e5'\nobjects:\n  r: {type: pogobot}\n";
        assert_eq!(load_config(text).unwrap().arena_surface, 1.0e5);
    }

    #[test]
    fn parameters_keep_typing() {
        let cfg = load_config(REFERENCE_EXAMPLE).unwrap();
        assert_eq!(resolve_parameter(&cfg, "run_duration_min").unwrap(), &Scalar::Int(1000));
        assert_eq!(resolve_parameter(&cfg, "enable_backward_dir").unwrap(), &Scalar::Bool(true));
        let err = resolve_parameter(&cfg, "foo").unwrap_err();
        assert!(err.to_string().contains("run_duration_max"), "{err}");
    }

    #[test]
    fn canonical_round_trip() {
        let cfg = load_config(REFERENCE_EXAMPLE).unwrap();
        let again = load_config(&cfg.to_yaml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_yaml(), again.to_yaml());
    }

    #[test]
    fn zero_time_step_rejected() {
        let err = load_config("time_step: 0\nobjects:\n  r: {type: pogobot}\n").unwrap_err();
        assert!(err.to_string().contains("time_step"));
        let err = load_config("save_data_period: 0.001\nobjects:\n  r: {type: pogobot}\n").unwrap_err();
        assert!(err.to_string().contains("save_data_period"));
    }

    #[test]
    fn duplicate_category_rejected() {
        let text = "objects:\n  r: {type: pogobot}\n  r: {type: pogobot}\n";
        assert!(load_config(text).is_err());
    }

    #[test]
    fn object_spec_defaults() {
        let spec = ObjectSpec::new(ObjectKind::Pogobot);
        assert_eq!(spec.nb, 1);
        assert_eq!(spec.body_linear_damping, 0.3);
        assert_eq!(spec.body_density, 10.0);
        assert_eq!(spec.body_friction, 0.3);
        assert_eq!(spec.body_restitution, 0.5);
    }
}
