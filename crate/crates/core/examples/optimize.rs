//! Tunes `run_duration_max` of run-and-tumble with CMA-ES to maximise the
//! mean squared displacement, evaluating every candidate on several runs.
//!
//! cargo run --release --example optimize [max_evals]

use std::path::Path;

use pogosim::batch::Runner;
use pogosim::config::read_tree_file;
use pogosim::controllers::program_by_name;
use pogosim::optim::{optimize, Method, SearchSpace, Settings, SimEvaluator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_evals: usize = std::env::args().nth(1).map_or(Ok(10), |s| s.parse())?;
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tree = read_tree_file(&root.join("conf/optim/simple.yaml"))?;
    let space = SearchSpace::from_tree(&tree)?;
    for d in &space.dims {
        println!("searching {} over {:?}", d.path, d.domain);
    }

    let work = std::env::temp_dir().join("pogosim-optim-example");
    let runner = Runner::Embedded(program_by_name("run_and_tumble").unwrap());
    let evaluator = SimEvaluator::new(tree, space.clone(), 5, runner, root, &work)?;
    let result = optimize(&space, &evaluator, &Settings::new(Method::CmaEs, max_evals, 0))?;

    for g in &result.generations {
        println!("generation {}: pop {} best {:.0} mean {:.0}", g.number, g.pop, g.best, g.mean);
    }
    println!("best {} with fitness {:.0}", space.describe(&result.best.values), result.best.fitness);
    Ok(())
}
