//! Quality-diversity search on a toy problem: MAP-Elites keeps the best
//! candidate in each cell of a 2-D feature grid.
//!
//! cargo run --example map_elites

use pogosim::config::{OptimAnnotation, OptimDomain};
use pogosim::optim::{optimize, ArchiveSpec, FnEvaluator, Method, Outcome, SearchSpace, Settings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SearchSpace::new(
        ["parameters.a", "parameters.b", "parameters.c"]
            .into_iter()
            .map(|p| OptimAnnotation { path: p.into(), domain: OptimDomain::Float { min: -1.0, max: 1.0 }, init: None })
            .collect(),
    );
    // features are the first two coordinates, fitness prefers a small third
    let evaluator = FnEvaluator(|x: &[f64]| Outcome::new(-x[2] * x[2] - 0.1 * (x[0] * x[1]).abs(), vec![x[0], x[1]]));
    let mut settings = Settings::new(Method::MapElites, 2000, 1);
    settings.archive = ArchiveSpec { bounds: vec![(-1.0, 1.0), (-1.0, 1.0)], resolution: vec![8, 8] };

    let result = optimize(&space, &evaluator, &settings)?;
    let archive = result.archive.unwrap();
    println!("coverage {:.2} ({} of 64 cells)", archive.coverage(), archive.len());
    for row in (0..8).rev() {
        let line: String = (0..8)
            .map(|col| match archive.cells.get(&vec![col, row]) {
                Some(e) if e.fitness > -0.02 => '#',
                Some(_) => '+',
                None => '.',
            })
            .collect();
        println!("  {line}");
    }
    Ok(())
}
