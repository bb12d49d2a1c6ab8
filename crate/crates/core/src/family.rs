//! Maximal matching and its relaxation family `Pi(delta, x, y)`.
//!
//! With `d = delta - x - y`, active words are `(M O^(d-1) | P^d) O^y X^x`
//! and passive words are `([MX] [POX]^(d-1) | [OX]^d) [POX]^y [MPOX]^x`.
//! For `x = 0` the label `X` is left out of the alphabet, which gives the
//! plain matching encoding over `{M, O, P}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{find_relaxation_mapping, speedup_with, EngineError, RelaxationSearch, SpeedupOptions};
use crate::problem::{parse_problem_with_alphabet, LabelMap, Problem, RelaxationTranscript};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("delta must be at least 1")]
    ZeroDelta,
    #[error("x + y = {sum} exceeds delta = {delta}")]
    TooLarge { delta: u32, sum: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyParams {
    pub delta: u32,
    pub x: u32,
    pub y: u32,
}

impl FamilyParams {
    /// Accepts `x + y <= delta`, so `d = 0` is allowed: those problems
    /// arise as the targets of speedup steps at the edge of the range.
    pub fn new(delta: u32, x: u32, y: u32) -> Result<Self, FamilyError> {
        if delta == 0 {
            return Err(FamilyError::ZeroDelta);
        }
        if x + y > delta {
            return Err(FamilyError::TooLarge { delta, sum: x + y });
        }
        Ok(FamilyParams { delta, x, y })
    }

    pub fn d(&self) -> u32 {
        self.delta - self.x - self.y
    }

    /// Condition under which one speedup step is known to lead to the
    /// next member: `delta >= 2x + y + 1`.
    pub fn step_hypothesis(&self) -> bool {
        self.delta > 2 * self.x + self.y
    }

    /// Zero-round unsolvability is known at `delta = x + y + 2`.
    pub fn at_base(&self) -> bool {
        self.delta == self.x + self.y + 2
    }
}

impl std::fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Pi_{}({},{})", self.delta, self.x, self.y)
    }
}

/// `(x, y) -> (x + 1, y + x)`. The flag reports whether the step
/// hypothesis held; the step is computed either way.
pub fn param_step(params: FamilyParams) -> (FamilyParams, bool) {
    let next = FamilyParams { delta: params.delta, x: params.x + 1, y: params.y + params.x };
    (next, params.step_hypothesis())
}

/// Closed form of `t` steps: `x + t` and `y + t*x + t*(t-1)/2`.
pub fn param_after(params: FamilyParams, t: u64) -> (u64, u64) {
    let (x, y) = (params.x as u64, params.y as u64);
    (x + t, y + t * x + t * (t.saturating_sub(1)) / 2)
}

fn term(label: &str, exp: u32) -> Option<String> {
    match exp {
        0 => None,
        1 => Some(label.to_string()),
        e => Some(format!("{label}^{e}")),
    }
}

fn join(terms: impl IntoIterator<Item = Option<String>>) -> String {
    terms.into_iter().flatten().collect::<Vec<_>>().join(" ")
}

/// The family member as a problem.
pub fn make_pi(params: FamilyParams) -> Problem {
    let FamilyParams { x, y, .. } = params;
    let d = params.d();
    let with_x = x > 0;
    let (mx, pox, ox, mpox) = if with_x { ("[MX]", "[OPX]", "[OX]", "[MOPX]") } else { ("M", "[OP]", "O", "[MOP]") };

    let tail_w = [term("O", y), term("X", x)];
    let tail_b = [term(pox, y), term(mpox, x)];
    let (white, black) = if d == 0 {
        (join(tail_w), join(tail_b))
    } else {
        let w1 = join([term("M", 1), term("O", d - 1)].into_iter().chain(tail_w.clone()));
        let w2 = join([term("P", d)].into_iter().chain(tail_w));
        let b1 = join([term(mx, 1), term(pox, d - 1)].into_iter().chain(tail_b.clone()));
        let b2 = join([term(ox, d)].into_iter().chain(tail_b));
        (format!("{w1} | {w2}"), format!("{b1} | {b2}"))
    };
    let mut alphabet: Vec<String> = ["M", "O", "P"].iter().map(|s| s.to_string()).collect();
    if with_x {
        alphabet.push("X".into());
    }
    parse_problem_with_alphabet(&format!("white: {white}\nblack: {black}\n"), &alphabet)
        .expect("family text is well formed")
        .with_meta(params.to_string())
}

/// Result of checking one speedup step of the family concretely.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub params: FamilyParams,
    pub next: FamilyParams,
    pub hypothesis_holds: bool,
    pub speedup_labels: usize,
    pub speedup: Option<Problem>,
    /// Speedup labels to their member labels.
    pub dictionary: BTreeMap<String, Vec<String>>,
    pub target: Option<Problem>,
    pub mapping: Option<LabelMap>,
    pub transcript: Option<RelaxationTranscript>,
    pub message: String,
}

impl LemmaReport {
    pub fn success(&self) -> bool {
        self.mapping.is_some()
    }
}

/// Speeds up `make_pi(params)` and searches for a relaxation into the next
/// family member.
pub fn certify_lemma(params: FamilyParams, opts: &SpeedupOptions) -> Result<LemmaReport, EngineError> {
    let (next, hypothesis_holds) = param_step(params);
    if !hypothesis_holds {
        tracing::warn!(%params, "step hypothesis delta >= 2x + y + 1 does not hold");
    }
    let p = make_pi(params);
    let sp = speedup_with(&p, opts)?;
    let mut report = LemmaReport {
        params,
        next,
        hypothesis_holds,
        speedup_labels: sp.problem.alphabet().len(),
        speedup: Some(sp.problem.clone()),
        dictionary: sp.dictionary_map(),
        target: None,
        mapping: None,
        transcript: None,
        message: String::new(),
    };
    if FamilyParams::new(next.delta, next.x, next.y).is_err() {
        report.message = format!("{next} is outside the family (x + y > delta)");
        return Ok(report);
    }
    let target = make_pi(next);
    match find_relaxation_mapping(&sp.problem, &target, &RelaxationSearch::default())? {
        Some(t) => {
            let map: LabelMap = sp
                .problem
                .alphabet()
                .iter()
                .zip(&t.map)
                .map(|(a, &b)| (a.clone(), target.label_name(b).to_string()))
                .collect();
            report.message = format!("speedup of {params} relaxes to {next}");
            report.mapping = Some(map);
            report.transcript = Some(t);
        }
        None => report.message = format!("no relaxation from the speedup of {params} to {next}"),
    }
    report.target = Some(target);
    Ok(report)
}

/// Parameters used for k-matching bounds: `x = floor(sqrt(delta))` and the
/// round threshold `sqrt(delta) / 16`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KMatchingParams {
    pub delta: u64,
    pub x: u64,
    pub t_threshold: f64,
}

pub fn k_matching_lower_bound_params(delta: u64) -> KMatchingParams {
    let x = delta.isqrt();
    KMatchingParams { delta, x, t_threshold: (delta as f64).sqrt() / 16.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Side;

    #[test]
    fn matching_encoding() {
        let p = make_pi(FamilyParams::new(3, 0, 0).unwrap());
        assert_eq!(p.to_string(), "white: M O^2 | P^3\nblack: M [OP]^2 | O^3\n");
    }

    #[test]
    fn degenerate_delta_one() {
        let p = make_pi(FamilyParams::new(1, 0, 0).unwrap());
        assert_eq!(p.constraint_text(Side::Active), "M | P");
        assert_eq!(p.constraint_text(Side::Passive), "M | O");
    }

    #[test]
    fn seven_one_one() {
        let p = make_pi(FamilyParams::new(7, 1, 1).unwrap());
        assert_eq!(p.constraint_text(Side::Active), "M O^5 X | O P^5 X");
        assert_eq!(p.constraint_text(Side::Passive), "[MX] [OPX]^5 [MOPX] | [OX]^5 [OPX] [MOPX]");
    }

    #[test]
    fn closed_form_steps() {
        let p = FamilyParams::new(1000, 0, 0).unwrap();
        let mut cur = p;
        for t in 1..=5 {
            cur = param_step(cur).0;
            assert_eq!(param_after(p, t), (cur.x as u64, cur.y as u64));
        }
        assert_eq!(param_after(p, 2), (2, 1));
    }

    #[test]
    fn k_matching_arithmetic() {
        let k = k_matching_lower_bound_params(16);
        assert_eq!((k.x, k.t_threshold), (4, 0.25));
        assert_eq!(k_matching_lower_bound_params(65536).t_threshold, 16.0);
    }
}
