//! Result files read by an independent Arrow implementation (pyarrow).
//! Skipped when `python3 -c "import pyarrow"` fails.

mod common;

use std::process::Command;

use common::{config, crate_dir};
use pogosim::config::{parse_tree, SimConfig};
use pogosim::controllers::program_by_name;
use pogosim::optim::msd_per_agent;
use pogosim::recorder::{write_ipc, CONFIGURATION_KEY};
use pogosim::runtime::{run_simulation, RunOptions};

const READER: &str = r#"
import json, sys
import pyarrow as pa
import pyarrow.ipc as ipc
t = ipc.open_file(sys.argv[1]).read_all()
meta = {k.decode(): v.decode() for k, v in (t.schema.metadata or {}).items()}
cols = t.to_pydict()
first, msd = {}, {}
for i in range(t.num_rows):
    key = (cols["robot_category"][i], cols["robot_id"][i])
    x, y = cols["x"][i], cols["y"][i]
    first.setdefault(key, (x, y))
    fx, fy = first[key]
    msd.setdefault(key, []).append((x - fx) ** 2 + (y - fy) ** 2)
print(json.dumps({
    "rows": t.num_rows,
    "columns": t.schema.names,
    "types": [str(f.type) for f in t.schema],
    "configuration": meta.get("configuration"),
    "msd": [sum(v) / len(v) for _, v in sorted(msd.items())],
}))
"#;

fn pyarrow_available() -> bool {
    Command::new("python3")
        .args(["-c", "import pyarrow"])
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn pyarrow_reads_results_and_configuration() {
    if !pyarrow_available() {
        eprintln!("pyarrow not available, skipping");
        return;
    }
    let cfg = config(
        r#"
arena_surface: 500000
seed: 5
simulation_time: 8.0
time_step: 0.01
save_data_period: 0.5
objects:
    robots:
        type: pogobot
        nb: 15
        radius: 26.5
parameters:
    run_duration_min: 300
    run_duration_max: 900
    tumble_duration_min: 100
    tumble_duration_max: 300
"#,
    );
    let out = run_simulation(cfg.clone(), &program_by_name("run_and_tumble").unwrap(), RunOptions::in_memory().arena_dir(crate_dir()))
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("result.feather");
    write_ipc(&out.table, &path).unwrap();

    let py = Command::new("python3").arg("-c").arg(READER).arg(&path).output().unwrap();
    assert!(py.status.success(), "{}", String::from_utf8_lossy(&py.stderr));
    let seen: serde_json::Value = serde_json::from_slice(&py.stdout).unwrap();

    assert_eq!(seen["rows"], out.table.num_rows());
    let names: Vec<&str> = seen["columns"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(&names[..4], ["time", "robot_category", "robot_id", "pogobot_ticks"]);
    let types: Vec<&str> = seen["types"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(&types[..4], ["double", "string", "uint16", "uint32"]);

    let text = seen["configuration"].as_str().unwrap();
    assert_eq!(text, out.table.metadata[CONFIGURATION_KEY]);
    assert_eq!(SimConfig::from_tree(&parse_tree(text).unwrap()).unwrap(), cfg);

    let ours = msd_per_agent(&out.table);
    let theirs: Vec<f64> = seen["msd"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(ours.len(), theirs.len());
    for (a, b) in ours.iter().zip(&theirs) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }
}
