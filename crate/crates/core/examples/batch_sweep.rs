//! Parameter sweep: every combination of the `batch_options` lists runs
//! several seeds in-process and lands in one result file per name.
//!
//! cargo run --release --example batch_sweep

use std::path::Path;

use pogosim::batch::{plan_combinations, run_batch, BatchPlan, Runner};
use pogosim::config::parse_tree;
use pogosim::controllers::program_by_name;
use pogosim::recorder::read_ipc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = parse_tree(
        r#"
arena_file:
    batch_options: [arenas/disk.csv, arenas/arena8.csv]
arena_surface: 1.0e6
seed: 0
simulation_time: 20.0
time_step: 0.01
save_data_period: 5.0
objects:
    robots:
        type: pogobot
        nb:
            batch_options: [20, 40]
        radius: 26.5
result_filename_format: "sweep_{objects.robots.nb}.feather"
result_new_columns: [arena_file]
"#,
    )?;
    let out_dir = std::env::temp_dir().join("pogosim-batch-example");
    let plan = BatchPlan {
        combinations: plan_combinations(&tree)?,
        runs: 3,
        temp_dir: out_dir.join("tmp"),
        output_dir: out_dir.join("results"),
        config_dir: Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf(),
        parallelism: None,
        runner: Runner::Embedded(program_by_name("hanabi").unwrap()),
    };
    for c in &plan.combinations {
        println!("{} <- {:?}", c.output_name, c.choices);
    }
    let report = run_batch(&plan)?;
    for o in &report.outputs {
        let t = read_ipc(&o.path)?;
        let arenas = t.texts("arena_file").unwrap();
        let mut distinct = arenas.clone();
        distinct.sort();
        distinct.dedup();
        println!("{}: {} rows, arenas {distinct:?}", o.path.display(), o.rows);
    }
    Ok(())
}
