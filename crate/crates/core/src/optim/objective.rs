//! Default fitness and feature descriptors, and the script plugin protocol.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use crate::batch::RUN_COLUMN;
use crate::recorder::{Table, Value};
use crate::world::{MEMBRANE_ID, WALL_ID};

/// Mean squared displacement of every agent from its first sampled
/// position, averaged over that agent's samples.
///
/// Agents are keyed by (`run`, category, id). A key whose time goes
/// backwards starts a new agent, so tables appended from several
/// combinations stay separate. Wall and membrane rows are skipped.
pub fn msd_per_agent(table: &Table) -> Vec<f64> {
    let (Some(time), Some(cat), Some(ids), Some(xs), Some(ys)) = (
        table.column("time"),
        table.column("robot_category"),
        table.column("robot_id"),
        table.column("x"),
        table.column("y"),
    ) else {
        return Vec::new();
    };
    let run = table.column(RUN_COLUMN);
    // key -> (agent index, last time)
    let mut current: HashMap<(i64, String, u16), (usize, f64)> = HashMap::new();
    // per agent: origin, sum of squared displacement, count
    let mut agents: Vec<(f64, f64, f64, usize)> = Vec::new();
    for r in 0..table.num_rows() {
        let (Value::UInt16(id), Value::Float64(t), Value::Float64(x), Value::Float64(y)) =
            (ids.get(r), time.get(r), xs.get(r), ys.get(r))
        else {
            continue;
        };
        if id == WALL_ID || id == MEMBRANE_ID || !x.is_finite() || !y.is_finite() {
            continue;
        }
        let run_id = match run.map(|c| c.get(r)) {
            Some(Value::Int32(v)) => v as i64,
            Some(Value::UInt32(v)) => v as i64,
            _ => 0,
        };
        let category = match cat.get(r) {
            Value::Text(s) => s,
            _ => String::new(),
        };
        let key = (run_id, category, id);
        let agent = match current.get_mut(&key) {
            Some((a, last)) if t > *last => {
                *last = t;
                *a
            }
            _ => {
                agents.push((x, y, 0.0, 0));
                current.insert(key, (agents.len() - 1, t));
                agents.len() - 1
            }
        };
        let a = &mut agents[agent];
        let (dx, dy) = (x - a.0, y - a.1);
        a.2 += dx * dx + dy * dy;
        a.3 += 1;
    }
    agents.into_iter().map(|(_, _, sum, n)| sum / n as f64).collect()
}

/// Mean per-agent MSD; `-inf` when there is nothing to score.
pub fn objective_default(tables: &[&Table]) -> f64 {
    let msd: Vec<f64> = tables.iter().flat_map(|t| msd_per_agent(t)).collect();
    if msd.is_empty() {
        log::warn!("Default MSD objective: empty input produced no MSD values; returning -inf");
        return f64::NEG_INFINITY;
    }
    msd.iter().sum::<f64>() / msd.len() as f64
}

/// (max, population standard deviation) of per-agent MSD; zeros when empty.
pub fn features_default(tables: &[&Table]) -> Vec<f64> {
    let msd: Vec<f64> = tables.iter().flat_map(|t| msd_per_agent(t)).collect();
    if msd.is_empty() {
        return vec![0.0, 0.0];
    }
    let n = msd.len() as f64;
    let mean = msd.iter().sum::<f64>() / n;
    let var = msd.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n;
    vec![msd.iter().copied().fold(f64::NEG_INFINITY, f64::max), var.sqrt()]
}

#[derive(Debug, thiserror::Error)]
pub enum ScriptError {
    #[error("cannot launch objective script {script}: {source}")]
    Launch {
        script: String,
        #[source]
        source: std::io::Error,
    },
    #[error("objective script {script} failed ({status}): {stderr}")]
    Failed { script: String, status: String, stderr: String },
    #[error("objective script {script} printed `{line}` on line {number}, expected a float")]
    BadOutput { script: String, number: usize, line: String },
    #[error("objective script {script} printed nothing")]
    Empty { script: String },
}

/// Parses plugin output: the fitness on the first non-empty line, then one
/// feature value per line. `inf`, `-inf` and `nan` are accepted.
pub fn parse_script_output(script: &str, stdout: &str) -> Result<(f64, Vec<f64>), ScriptError> {
    let mut values = Vec::new();
    for (i, line) in stdout.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| ScriptError::BadOutput {
            script: script.to_string(),
            number: i + 1,
            line: line.to_string(),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(ScriptError::Empty { script: script.to_string() });
    }
    let fitness = values.remove(0);
    Ok((fitness, values))
}

/// Runs `<script> <result file>` and parses its output.
pub fn run_objective_script(script: &Path, result_file: &Path) -> Result<(f64, Vec<f64>), ScriptError> {
    let name = script.display().to_string();
    let out = Command::new(script)
        .arg(result_file)
        .output()
        .map_err(|source| ScriptError::Launch { script: name.clone(), source })?;
    if !out.status.success() {
        return Err(ScriptError::Failed {
            script: name,
            status: out.status.to_string(),
            stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
        });
    }
    parse_script_output(&name, &String::from_utf8_lossy(&out.stdout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recorder::{FixedRow, RecordSchema};

    fn table(rows: &[(u16, f64, f64, f64)]) -> Table {
        let mut t = Table::with_schema(&RecordSchema::default());
        for &(id, time, x, y) in rows {
            let row = FixedRow { time, category: "robots".into(), id, ticks: 0, x, y, angle: 0.0 };
            t.push_row(row.into_values(vec![])).unwrap();
        }
        t
    }

    #[test]
    fn stationary_swarm_scores_zero() {
        let t = table(&[(0, 1.0, 5.0, 5.0), (1, 1.0, 0.0, 0.0), (0, 2.0, 5.0, 5.0), (1, 2.0, 0.0, 0.0)]);
        assert_eq!(objective_default(&[&t]), 0.0);
        assert_eq!(features_default(&[&t]), vec![0.0, 0.0]);
    }

    #[test]
    fn constant_velocity_closed_form() {
        let (v, total) = (20.0, 30.0);
        for n in [100usize, 1000, 10000] {
            let rows: Vec<_> = (0..=n).map(|k| {
                let t = total * k as f64 / n as f64;
                (0u16, t, v * t, 0.0)
            }).collect();
            let msd = objective_default(&[&table(&rows)]);
            let exact_discrete = v * v * total * total * (n as f64 * (2.0 * n as f64 + 1.0)) / (6.0 * n as f64 * n as f64);
            assert!((msd - exact_discrete).abs() < 1e-9 * exact_discrete);
            let limit = v * v * total * total / 3.0;
            assert!((msd - limit).abs() / limit < 2.0 / n as f64);
        }
    }

    #[test]
    fn two_agents_features() {
        // agent 1 is 4 away at its second sample: MSD (0 + 16) / 2 = 8
        let t = table(&[(0, 1.0, 0.0, 0.0), (1, 1.0, 0.0, 0.0), (0, 2.0, 0.0, 0.0), (1, 2.0, 4.0, 0.0)]);
        assert_eq!(features_default(&[&t]), vec![8.0, 4.0]);
        assert_eq!(objective_default(&[&t]), 4.0);
    }

    #[test]
    fn empty_is_minus_infinity() {
        let t = table(&[]);
        assert_eq!(objective_default(&[&t]), f64::NEG_INFINITY);
        assert_eq!(objective_default(&[]), f64::NEG_INFINITY);
        assert_eq!(features_default(&[&t]), vec![0.0, 0.0]);
    }

    #[test]
    fn repeated_keys_split_agents() {
        // the same id restarting at an earlier time is a different agent
        let t = table(&[(0, 1.0, 0.0, 0.0), (0, 2.0, 2.0, 0.0), (0, 1.0, 0.0, 0.0), (0, 2.0, 0.0, 0.0)]);
        assert_eq!(msd_per_agent(&t), vec![2.0, 0.0]);
    }

    #[test]
    fn walls_are_ignored() {
        let t = table(&[(WALL_ID, 1.0, 0.0, 0.0), (WALL_ID, 2.0, 9.0, 0.0)]);
        assert!(msd_per_agent(&t).is_empty());
    }

    #[test]
    fn script_output_protocol() {
        assert_eq!(parse_script_output("s", "1.5\n2\n-3e2\n").unwrap(), (1.5, vec![2.0, -300.0]));
        assert_eq!(parse_script_output("s", "-inf\n").unwrap().0, f64::NEG_INFINITY);
        assert!(parse_script_output("s", "\n\n").is_err());
        assert!(parse_script_output("s", "1.0\nabc\n").is_err());
    }
}
