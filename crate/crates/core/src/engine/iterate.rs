//! Repeated speedup with optional label merges between steps.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::labels::LabelId;
use crate::problem::{zero_round_solvable, LabelMap, Problem, ProblemJson, Side};

use super::{merge_labels, speedup_with, EngineError, LabelPoset, SpeedupOptions, SpeedupResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergePolicy {
    None,
    /// Pairwise merges kept while the problem stays unsolvable in zero
    /// rounds; pairs adjacent in the strength order are tried first.
    Greedy,
    /// Explicit maps, one per step. Labels missing from a map keep their
    /// name; a step without a map is left unmerged.
    Manual(Vec<LabelMap>),
}

impl std::str::FromStr for MergePolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(MergePolicy::None),
            "greedy" => Ok(MergePolicy::Greedy),
            _ => Err(format!("unknown merge policy {s:?} (expected none, greedy or a script)")),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MergeDecision {
    pub labels: Vec<String>,
    pub into: String,
    pub kept: bool,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub speedup_ms: f64,
    pub merge_ms: f64,
}

/// One trace line.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub op: &'static str,
    pub input_hash: String,
    pub output_hash: String,
    pub output_problem: ProblemJson,
    /// Speedup labels before merging, name to member names.
    pub dictionary: BTreeMap<String, Vec<String>>,
    pub labels_before_merge: usize,
    pub merges: Vec<MergeDecision>,
    pub timings: Timings,
}

#[derive(Clone, Debug)]
pub struct IterateOutcome {
    pub results: Vec<SpeedupResult>,
    /// Problem after each step's merges.
    pub problems: Vec<Problem>,
    pub records: Vec<StepRecord>,
    /// Steps where the policy could not act, as messages.
    pub policy_notes: Vec<String>,
}

impl IterateOutcome {
    pub fn last(&self) -> Option<&Problem> {
        self.problems.last()
    }

    /// The trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("trace record serializes") + "\n").collect()
    }
}

pub fn iterate_speedup(
    p: &Problem,
    steps: usize,
    policy: &MergePolicy,
    opts: &SpeedupOptions,
) -> Result<IterateOutcome, EngineError> {
    let mut out = IterateOutcome { results: Vec::new(), problems: Vec::new(), records: Vec::new(), policy_notes: Vec::new() };
    let mut current = p.clone();
    for step in 1..=steps {
        let input_hash = current.digest();
        let t0 = Instant::now();
        let result = speedup_with(&current, opts)?;
        let speedup_ms = t0.elapsed().as_secs_f64() * 1e3;
        let t1 = Instant::now();
        let labels_before_merge = result.problem.alphabet().len();
        let (merged, merges) = match policy {
            MergePolicy::None => (result.problem.clone(), Vec::new()),
            MergePolicy::Greedy => greedy_merge(&result.problem, opts)?,
            MergePolicy::Manual(script) => match script.get(step - 1) {
                Some(map) => manual_merge(&result.problem, map)?,
                None => (result.problem.clone(), Vec::new()),
            },
        };
        if matches!(policy, MergePolicy::Greedy) && !merges.iter().any(|m| m.kept) && labels_before_merge > 1 {
            out.policy_notes.push(format!("step {step}: no safe merge found"));
        }
        let merge_ms = t1.elapsed().as_secs_f64() * 1e3;
        tracing::info!(step, labels = merged.alphabet().len(), "speedup step");
        out.records.push(StepRecord {
            step,
            op: "speedup",
            input_hash,
            output_hash: merged.digest(),
            output_problem: ProblemJson::from(&merged),
            dictionary: result.dictionary_map(),
            labels_before_merge,
            merges,
            timings: Timings { speedup_ms, merge_ms },
        });
        out.results.push(result);
        out.problems.push(merged.clone());
        current = merged;
    }
    Ok(out)
}

fn manual_merge(p: &Problem, map: &LabelMap) -> Result<(Problem, Vec<MergeDecision>), EngineError> {
    if let Some(bad) = map.keys().find(|k| p.label_id(k).is_none()) {
        return Err(EngineError::Script(format!("label {bad:?} not in the alphabet")));
    }
    let full: LabelMap = p
        .alphabet()
        .iter()
        .map(|n| (n.clone(), map.get(n).cloned().unwrap_or_else(|| n.clone())))
        .collect();
    let merged = merge_labels(p, &full)?;
    let mut groups: BTreeMap<&String, Vec<String>> = BTreeMap::new();
    for (k, v) in &full {
        groups.entry(v).or_default().push(k.clone());
    }
    let decisions = groups
        .into_iter()
        .filter(|(into, labels)| labels.len() > 1 || labels[0] != **into)
        .map(|(into, labels)| MergeDecision { labels, into: into.clone(), kept: true, reason: "script".into() })
        .collect();
    Ok((merged, decisions))
}

/// Pairs of labels in trial order: covering pairs of the passive strength
/// order, then other comparable pairs, then the rest.
fn merge_candidates(p: &Problem) -> Vec<(LabelId, LabelId)> {
    let n = p.alphabet().len();
    let poset = LabelPoset::of_constraint(p.passive(), n);
    let hasse = poset.hasse_edges();
    let mut pairs: Vec<(u8, LabelId, LabelId)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let rank = if hasse.contains(&(a, b)) || hasse.contains(&(b, a)) {
                0
            } else if poset.leq(a, b) || poset.leq(b, a) {
                1
            } else {
                2
            };
            pairs.push((rank, a, b));
        }
    }
    pairs.sort();
    pairs.into_iter().map(|(_, a, b)| (a, b)).collect()
}

fn greedy_merge(p: &Problem, opts: &SpeedupOptions) -> Result<(Problem, Vec<MergeDecision>), EngineError> {
    let mut current = p.clone();
    let mut decisions = Vec::new();
    let mut rejected: std::collections::HashSet<(String, String)> = std::collections::HashSet::new();
    'outer: loop {
        if opts.cancel.as_ref().is_some_and(|c| c.load(std::sync::atomic::Ordering::Relaxed)) {
            return Err(EngineError::Cancelled);
        }
        for (a, b) in merge_candidates(&current) {
            let (na, nb) = (current.label_name(a).to_string(), current.label_name(b).to_string());
            if rejected.contains(&(na.clone(), nb.clone())) {
                continue;
            }
            let into = format!("{na}+{nb}");
            if current.label_id(&into).is_some() {
                continue;
            }
            let map: LabelMap = current
                .alphabet()
                .iter()
                .map(|n| (n.clone(), if *n == na || *n == nb { into.clone() } else { n.clone() }))
                .collect();
            let merged = merge_labels(&current, &map)?;
            let solvable = zero_round_solvable(&merged, Side::Active).solvable;
            decisions.push(MergeDecision {
                labels: vec![na.clone(), nb.clone()],
                into,
                kept: !solvable,
                reason: if solvable { "becomes zero-round solvable".into() } else { "stays unsolvable in zero rounds".into() },
            });
            if !solvable {
                current = merged;
                continue 'outer;
            }
            rejected.insert((na, nb));
        }
        break;
    }
    Ok((current, decisions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn fixed_point_is_stable() {
        let p = parse_problem("white: A A\nblack: A A").unwrap();
        let out = iterate_speedup(&p, 1, &MergePolicy::None, &SpeedupOptions::default()).unwrap();
        assert_eq!(out.problems[0].to_string(), "white: <A>^2\nblack: <A>^2\n");
        assert_eq!(out.trace_jsonl().lines().count(), 1);
    }

    #[test]
    fn manual_script_renames() {
        let p = parse_problem("white: A A\nblack: A A").unwrap();
        let script = vec![[("<A>".to_string(), "A".to_string())].into_iter().collect()];
        let out = iterate_speedup(&p, 1, &MergePolicy::Manual(script), &SpeedupOptions::default()).unwrap();
        assert_eq!(out.problems[0], p);
    }
}
