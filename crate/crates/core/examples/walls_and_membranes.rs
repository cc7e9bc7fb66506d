//! Walls that broadcast, membranes that drift: runs
//! `conf/walls_and_membranes.yaml` and reports how many robots have heard
//! a wall beacon and how the arena's reserved ids appear in the record.
//!
//! cargo run --release --example walls_and_membranes

use std::collections::BTreeMap;
use std::path::Path;

use pogosim::config::load_config_file;
use pogosim::controllers::program_by_name;
use pogosim::recorder::Value;
use pogosim::runtime::{run_simulation, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut config = load_config_file(&root.join("conf/walls_and_membranes.yaml"))?;
    config.save_video_period = -1.0;
    config.save_data_period = 15.0;

    let out = run_simulation(config, &program_by_name("walls").unwrap(), RunOptions::in_memory().arena_dir(root))?;
    let cats = out.table.texts("robot_category").unwrap();
    let ids = out.table.u16s("robot_id").unwrap();
    let times = out.table.f64s("time").unwrap();
    let seen = out.table.column("wall_seen").unwrap();

    let mut per_cat: BTreeMap<&str, BTreeMap<u16, ()>> = BTreeMap::new();
    for (c, id) in cats.iter().zip(&ids) {
        per_cat.entry(c).or_default().insert(*id, ());
    }
    for (c, ids) in &per_cat {
        println!("category {c:<10} ids {:?}", ids.keys().take(5).collect::<Vec<_>>());
    }

    let mut heard: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for r in 0..times.len() {
        if cats[r] != "robots" {
            continue;
        }
        let e = heard.entry(times[r].round() as i64).or_default();
        e.1 += 1;
        e.0 += (seen.get(r) == Value::Bool(true)) as usize;
    }
    for (t, (yes, n)) in heard {
        println!("t={t:>3}s  robots that heard a wall: {yes}/{n}");
    }
    println!("{} messages delivered", out.comm.delivered);
    Ok(())
}
