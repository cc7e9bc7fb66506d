#![allow(dead_code)]

use std::path::PathBuf;

use pogosim::config::{parse_tree, SimConfig};

/// Directory holding `conf/` and `arenas/`.
pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn config(yaml: &str) -> SimConfig {
    SimConfig::from_tree(&parse_tree(yaml).expect("yaml")).expect("valid config")
}

/// Prints the verdict line and fails the test on a miss.
pub fn report(name: &str, result: Result<String, String>) {
    match result {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => {
            println!("FAIL {name}: {detail}");
            panic!("{name}: {detail}");
        }
    }
}

/// Per-robot values of `column` at the last sample not after `tick`.
pub fn last_values_by_tick(table: &pogosim::recorder::Table, column: &str, tick: u32) -> Vec<(u16, f64)> {
    use std::collections::BTreeMap;
    let ids = table.u16s("robot_id").unwrap();
    let ticks = table.column("pogobot_ticks").unwrap();
    let vals = table.f64s(column).unwrap();
    let mut last: BTreeMap<u16, (u32, f64)> = BTreeMap::new();
    for r in 0..table.num_rows() {
        let pogosim::recorder::Value::UInt32(t) = ticks.get(r) else { continue };
        if t <= tick {
            let e = last.entry(ids[r]).or_insert((t, vals[r]));
            if t >= e.0 {
                *e = (t, vals[r]);
            }
        }
    }
    last.into_iter().map(|(id, (_, v))| (id, v)).collect()
}
