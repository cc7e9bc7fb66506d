//! `batch_options` and `optimization_domain` annotations embedded in raw
//! configuration trees, plus dotted-path addressing helpers.

use serde_yaml::{Mapping, Value};

use super::{ConfigError, Scalar};

pub const BATCH_OPTIONS_KEY: &str = "batch_options";
pub const DEFAULT_OPTION_KEY: &str = "default_option";
pub const OPTIMIZATION_DOMAIN_KEY: &str = "optimization_domain";

/// A config leaf that should be swept over several values by the batch runner.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAnnotation {
    pub path: String,
    pub options: Vec<Value>,
    pub default_option: Option<Value>,
}

impl SweepAnnotation {
    /// Value used when the file is run directly rather than through a sweep.
    pub fn effective_default(&self) -> &Value {
        self.default_option.as_ref().unwrap_or(&self.options[0])
    }
}

/// Search domain of one optimizable parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimDomain {
    Int { min: i64, max: i64 },
    Float { min: f64, max: f64 },
    Categorical { choices: Vec<Scalar> },
}

impl OptimDomain {
    pub fn kind_name(&self) -> &'static str {
        match self {
            OptimDomain::Int { .. } => "int",
            OptimDomain::Float { .. } => "float",
            OptimDomain::Categorical { .. } => "categorical",
        }
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        match self {
            OptimDomain::Int { min, max } => v.as_i64().is_some_and(|i| i >= *min && i <= *max),
            OptimDomain::Float { min, max } => v.as_f64().is_some_and(|f| f >= *min && f <= *max),
            OptimDomain::Categorical { choices } => choices.contains(v),
        }
    }
}

/// A parameter under `parameters:` carrying an `optimization_domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimAnnotation {
    pub path: String,
    pub domain: OptimDomain,
    pub init: Option<Scalar>,
}

impl OptimAnnotation {
    /// Value used when the file is run directly: `init`, else the domain midpoint
    /// (first choice for categoricals).
    pub fn effective_default(&self) -> Scalar {
        if let Some(init) = &self.init {
            return init.clone();
        }
        match &self.domain {
            OptimDomain::Int { min, max } => Scalar::Int(min + (max - min) / 2),
            OptimDomain::Float { min, max } => Scalar::Float(0.5 * (min + max)),
            OptimDomain::Categorical { choices } => choices[0].clone(),
        }
    }
}

fn key_str(k: &Value) -> Option<String> {
    match k {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn walk<'a>(value: &'a Value, prefix: &str, visit: &mut dyn FnMut(&str, &'a Mapping) -> bool) {
    if let Value::Mapping(map) = value {
        if visit(prefix, map) {
            return;
        }
        for (k, v) in map {
            if let Some(key) = key_str(k) {
                walk(v, &join(prefix, &key), visit);
            }
        }
    }
}

/// Every node carrying `batch_options`, in document order.
pub fn extract_sweeps(tree: &Value) -> Result<Vec<SweepAnnotation>, ConfigError> {
    let mut out = Vec::new();
    let mut err = None;
    walk(tree, "", &mut |path, map| {
        let Some(options) = map.get(BATCH_OPTIONS_KEY) else {
            return false;
        };
        match options {
            Value::Sequence(seq) if !seq.is_empty() => out.push(SweepAnnotation {
                path: path.to_string(),
                options: seq.clone(),
                default_option: map.get(DEFAULT_OPTION_KEY).cloned(),
            }),
            _ => {
                err.get_or_insert(ConfigError::invalid(
                    join(path, BATCH_OPTIONS_KEY),
                    "batch_options must be a non-empty list",
                ));
            }
        }
        true
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn scalar_field(map: &Mapping, key: &str) -> Option<Scalar> {
    map.get(key).and_then(Scalar::from_yaml)
}

fn parse_domain(path: &str, node: &Value) -> Result<OptimAnnotation, ConfigError> {
    let dpath = join(path, OPTIMIZATION_DOMAIN_KEY);
    let map = node
        .as_mapping()
        .ok_or_else(|| ConfigError::invalid(&dpath, "optimization_domain must be a mapping"))?;
    let kind = map
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| ConfigError::invalid(&dpath, "missing `type` (int, float or categorical)"))?;
    let init = scalar_field(map, "init");
    let domain = match kind {
        "int" => {
            let min = scalar_field(map, "min").and_then(|s| s.as_i64());
            let max = scalar_field(map, "max").and_then(|s| s.as_i64());
            let (Some(min), Some(max)) = (min, max) else {
                return Err(ConfigError::invalid(&dpath, "int domain needs integer `min` and `max`"));
            };
            if min >= max {
                return Err(ConfigError::invalid(&dpath, format!("min ({min}) must be < max ({max})")));
            }
            OptimDomain::Int { min, max }
        }
        "float" => {
            let min = scalar_field(map, "min").and_then(|s| s.as_f64());
            let max = scalar_field(map, "max").and_then(|s| s.as_f64());
            let (Some(min), Some(max)) = (min, max) else {
                return Err(ConfigError::invalid(&dpath, "float domain needs numeric `min` and `max`"));
            };
            if !(min < max) {
                return Err(ConfigError::invalid(&dpath, format!("min ({min}) must be < max ({max})")));
            }
            OptimDomain::Float { min, max }
        }
        "categorical" => {
            let choices: Vec<Scalar> = map
                .get("choices")
                .and_then(Value::as_sequence)
                .map(|seq| seq.iter().filter_map(Scalar::from_yaml).collect())
                .unwrap_or_default();
            if choices.is_empty() {
                return Err(ConfigError::invalid(&dpath, "categorical domain needs non-empty `choices`"));
            }
            OptimDomain::Categorical { choices }
        }
        other => {
            return Err(ConfigError::invalid(
                &dpath,
                format!("unknown domain type `{other}` (expected int, float or categorical)"),
            ))
        }
    };
    if let Some(init) = &init {
        if !domain.contains(init) {
            return Err(ConfigError::invalid(&dpath, format!("init value {init} lies outside the domain")));
        }
    }
    Ok(OptimAnnotation {
        path: path.to_string(),
        domain,
        init,
    })
}

/// Every node carrying `optimization_domain`. Only keys under `parameters` may.
pub fn extract_optim_domains(tree: &Value) -> Result<Vec<OptimAnnotation>, ConfigError> {
    let mut out = Vec::new();
    let mut err = None;
    walk(tree, "", &mut |path, map| {
        let Some(node) = map.get(OPTIMIZATION_DOMAIN_KEY) else {
            return false;
        };
        if err.is_some() {
            return true;
        }
        if !path.starts_with("parameters.") {
            err = Some(ConfigError::invalid(
                join(path, OPTIMIZATION_DOMAIN_KEY),
                "optimization_domain is only allowed under `parameters`",
            ));
            return true;
        }
        match parse_domain(path, node) {
            Ok(a) => out.push(a),
            Err(e) => err = Some(e),
        }
        true
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Looks up a dotted path. Category names cannot contain '.', so no escaping.
pub fn get_path<'a>(tree: &'a Value, path: &str) -> Option<&'a Value> {
    let mut node = tree;
    for part in path.split('.') {
        node = node.as_mapping()?.get(part)?;
    }
    Some(node)
}

/// Replaces (or creates) the node at a dotted path.
pub fn set_path(tree: &mut Value, path: &str, value: Value) -> Result<(), ConfigError> {
    let parts: Vec<&str> = path.split('.').collect();
    let mut node = tree;
    for (i, part) in parts.iter().enumerate() {
        if !node.is_mapping() {
            if node.is_null() {
                *node = Value::Mapping(Mapping::new());
            } else {
                return Err(ConfigError::invalid(
                    parts[..i].join("."),
                    format!("cannot descend into a non-mapping node to set `{path}`"),
                ));
            }
        }
        let map = node.as_mapping_mut().expect("checked mapping");
        let key = Value::String((*part).to_string());
        if i + 1 == parts.len() {
            map.insert(key, value);
            return Ok(());
        }
        node = map.entry(key).or_insert(Value::Null);
    }
    Ok(())
}

/// Replaces every sweep node by its `default_option` (or first option).
pub fn apply_sweep_defaults(tree: &Value) -> Result<Value, ConfigError> {
    let mut out = tree.clone();
    for a in extract_sweeps(tree)? {
        set_path(&mut out, &a.path, a.effective_default().clone())?;
    }
    Ok(out)
}

/// Replaces every optimization node by its effective default value.
pub fn apply_optim_defaults(tree: &Value) -> Result<Value, ConfigError> {
    let mut out = tree.clone();
    for a in extract_optim_domains(tree)? {
        set_path(&mut out, &a.path, a.effective_default().to_yaml())?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BATCH_EXAMPLE: &str = r#"
arena_file:
    batch_options: ["arenas/disk.csv", "arenas/arena8.csv"]
    default_option: arenas/disk.csv
objects:
    robots:
        type: pogobot
        nb:
            batch_options: [100, 200]
            default_option: arenas/disk.csv
        geometry: disk
        radius: 26.5
result_filename_format: "result_{objects.robots.nb}.feather"
result_new_columns: ["arena_file"]
"#;

    const OPTIM_EXAMPLE: &str = r#"
parameters:
    run_duration_min: 0
    run_duration_max:
        optimization_domain: {type: int, min: 10, max: 1000, init: 50}
    tumble_duration_min: 100
    tumble_duration_max: 1100
"#;

    fn tree(text: &str) -> Value {
        serde_yaml::from_str(text).unwrap()
    }

    #[test]
    fn batch_example_has_two_annotations() {
        let t = tree(BATCH_EXAMPLE);
        let sweeps = extract_sweeps(&t).unwrap();
        assert_eq!(sweeps.len(), 2);
        assert_eq!(sweeps[0].path, "arena_file");
        assert_eq!(sweeps[0].options.len(), 2);
        assert_eq!(sweeps[1].path, "objects.robots.nb");
        assert_eq!(sweeps[1].options, vec![Value::from(100), Value::from(200)]);
        // default_option need not be one of the options
        assert_eq!(sweeps[1].default_option, Some(Value::from("arenas/disk.csv")));
        for s in &sweeps {
            assert!(get_path(&t, &s.path).is_some());
        }
    }

    #[test]
    fn no_annotations_gives_empty_list() {
        let t = tree("seed: 3\nobjects: {}\n");
        assert!(extract_sweeps(&t).unwrap().is_empty());
        assert!(extract_optim_domains(&t).unwrap().is_empty());
    }

    #[test]
    fn empty_batch_options_is_error() {
        let t = tree("seed:\n  batch_options: []\n");
        let err = extract_sweeps(&t).unwrap_err();
        assert!(err.to_string().contains("seed.batch_options"), "{err}");
    }

    #[test]
    fn defaults_remove_every_batch_options_key() {
        let t = apply_sweep_defaults(&tree(BATCH_EXAMPLE)).unwrap();
        assert!(extract_sweeps(&t).unwrap().is_empty());
        assert_eq!(get_path(&t, "arena_file"), Some(&Value::from("arenas/disk.csv")));
        let only_first = apply_sweep_defaults(&tree("seed:\n  batch_options: [4, 5]\n")).unwrap();
        assert_eq!(get_path(&only_first, "seed"), Some(&Value::from(4)));
    }

    #[test]
    fn optim_example_annotation() {
        let a = extract_optim_domains(&tree(OPTIM_EXAMPLE)).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].path, "parameters.run_duration_max");
        assert_eq!(a[0].domain, OptimDomain::Int { min: 10, max: 1000 });
        assert_eq!(a[0].init, Some(Scalar::Int(50)));
        let applied = apply_optim_defaults(&tree(OPTIM_EXAMPLE)).unwrap();
        assert_eq!(get_path(&applied, "parameters.run_duration_max"), Some(&Value::from(50)));
    }

    #[test]
    fn float_domain_round_trips_through_yaml() {
        let t = tree("parameters:\n  gain:\n    optimization_domain: {type: float, min: 0.0, max: 1.0}\n");
        let a = extract_optim_domains(&t).unwrap();
        assert_eq!(a[0].domain, OptimDomain::Float { min: 0.0, max: 1.0 });
        let text = serde_yaml::to_string(&t).unwrap();
        let again = extract_optim_domains(&tree(&text)).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn optim_outside_parameters_rejected() {
        let t = tree("seed:\n  optimization_domain: {type: int, min: 0, max: 3}\n");
        assert!(extract_optim_domains(&t).is_err());
    }

    #[test]
    fn bad_bounds_and_init_rejected() {
        let t = tree("parameters:\n  a:\n    optimization_domain: {type: int, min: 5, max: 5}\n");
        assert!(extract_optim_domains(&t).is_err());
        let t = tree("parameters:\n  a:\n    optimization_domain: {type: float, min: 0, max: 1, init: 2.0}\n");
        assert!(extract_optim_domains(&t).is_err());
    }

    #[test]
    fn set_path_creates_nested_nodes() {
        let mut t = tree("a: 1\n");
        set_path(&mut t, "b.c.d", Value::from(3)).unwrap();
        assert_eq!(get_path(&t, "b.c.d"), Some(&Value::from(3)));
        assert!(set_path(&mut t, "a.x", Value::from(1)).is_err());
    }
}
