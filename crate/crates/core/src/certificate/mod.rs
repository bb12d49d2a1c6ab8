//! Lower-bound certificates for maximal matching.
//!
//! A certificate chains speedup steps through the family, starting at the
//! matching problem. Each step records the problem, its speedup with the
//! set dictionary, the map into the next member and every active upgrade.
//! The last member carries a zero-round refutation. A body digest makes
//! any edit detectable; [`verify_certificate`] rechecks everything from the
//! recorded data without calling the engine.

mod verify;

pub use verify::{verify_certificate, VerifiedClaim, VerifyError};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, SpeedupOptions};
use crate::family::{certify_lemma, make_pi, param_step, FamilyParams};
use crate::hash::sha256_json;
use crate::problem::{format_problem, zero_round_solvable, LabelMap, Problem, Side};

pub const CERTIFICATE_SCHEMA: &str = "relim-certificate/1";

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("delta must be at least 1")]
    ZeroDelta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub problem: String,
    pub delta: u32,
    /// Rounds that white algorithms provably cannot achieve: no algorithm
    /// runs in this many rounds or fewer. `None` when nothing is proved.
    pub rounds_exceeded: Option<u32>,
    pub model: String,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeedupBlock {
    pub problem: String,
    pub dictionary: BTreeMap<String, Vec<String>>,
    pub trace_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpgradeEntry {
    pub word: Vec<String>,
    pub upgraded: Vec<String>,
    pub image: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub config: String,
    pub image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStep {
    pub index: u32,
    pub params: FamilyParams,
    pub problem: String,
    pub speedup: SpeedupBlock,
    pub target_params: FamilyParams,
    pub target: String,
    pub mapping: LabelMap,
    pub upgrades: Vec<UpgradeEntry>,
    pub passive_images: Vec<ImageEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationEntry {
    pub support: Vec<String>,
    pub bad: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalCheck {
    pub params: FamilyParams,
    pub problem: String,
    pub zero_round_solvable: bool,
    pub refutations: Vec<RefutationEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBody {
    pub schema: String,
    pub claim: Claim,
    pub delta: u32,
    pub max_t: u32,
    pub steps: Vec<CertStep>,
    #[serde(rename = "final")]
    pub final_check: FinalCheck,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub body: CertificateBody,
    /// SHA-256 of the canonical JSON of `body`.
    pub digest: String,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn rounds_exceeded(&self) -> Option<u32> {
        self.body.claim.rounds_exceeded
    }
}

/// Hash binding a speedup output to its origin.
pub fn trace_hash(origin: &str, speedup: &str, dictionary: &BTreeMap<String, Vec<String>>) -> String {
    sha256_json(&(origin, speedup, dictionary))
}

fn names(p: &Problem, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&i| p.label_name(i).to_string()).collect()
}

/// Walks the family from the matching problem at `delta` for at most
/// `max_t` steps. A step is taken while the step hypothesis holds and the
/// next member still lies in the range `x + y + 2 <= delta` where
/// zero-round refutations exist. The claim uses the longest prefix of the
/// chain whose last member is refuted.
pub fn build_certificate(delta: u32, max_t: u32, opts: &SpeedupOptions) -> Result<Certificate, CertificateError> {
    let start = FamilyParams::new(delta, 0, 0).map_err(|_| CertificateError::ZeroDelta)?;
    let mut notes = Vec::new();
    let mut steps: Vec<CertStep> = Vec::new();
    let mut finals = vec![final_check(start)];
    let mut cur = start;
    while (steps.len() as u32) < max_t {
        let (next, hypothesis) = param_step(cur);
        if !hypothesis {
            notes.push(format!("stopped at {cur}: delta < 2x + y + 1"));
            break;
        }
        if next.x + next.y + 2 > delta {
            notes.push(format!("stopped at {cur}: {next} is beyond the zero-round range"));
            break;
        }
        let report = match certify_lemma(cur, opts) {
            Ok(r) => r,
            Err(EngineError::AlphabetCap { size, cap }) => {
                notes.push(format!("truncated at {cur}: alphabet of {size} labels exceeds the cap of {cap}"));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let (Some(sp), Some(target), Some(mapping), Some(t)) =
            (report.speedup.as_ref(), report.target.as_ref(), report.mapping.clone(), report.transcript.as_ref())
        else {
            notes.push(format!("truncated at {cur}: {}", report.message));
            break;
        };
        let origin = make_pi(cur);
        let dictionary = report.dictionary.clone();
        let origin_text = format_problem(&origin);
        let sp_text = format_problem(sp);
        steps.push(CertStep {
            index: steps.len() as u32 + 1,
            params: cur,
            problem: origin_text.clone(),
            speedup: SpeedupBlock {
                trace_hash: trace_hash(&origin_text, &sp_text, &dictionary),
                problem: sp_text,
                dictionary,
            },
            target_params: next,
            target: format_problem(target),
            mapping,
            upgrades: t
                .active
                .iter()
                .map(|u| UpgradeEntry {
                    word: names(sp, u.word.ids()),
                    upgraded: names(sp, u.upgraded.ids()),
                    image: names(target, u.image.ids()),
                })
                .collect(),
            passive_images: t
                .passive
                .iter()
                .map(|pi| ImageEntry { config: sp.config_text(&pi.config), image: target.config_text(&pi.image) })
                .collect(),
        });
        finals.push(final_check(next));
        cur = next;
    }
    // longest prefix ending at a refuted member
    let keep = (0..finals.len()).rev().find(|&k| !finals[k].zero_round_solvable);
    let (rounds, final_check) = match keep {
        Some(k) => {
            if k < steps.len() {
                notes.push(format!("dropped {} trailing step(s) without a refutation", steps.len() - k));
                steps.truncate(k);
            }
            (Some(k as u32), finals.swap_remove(k))
        }
        None => {
            notes.push("no member of the chain is refuted in zero rounds".into());
            (None, finals.pop().unwrap())
        }
    };
    let statement = match rounds {
        Some(t) => format!(
            "every white algorithm for maximal matching on {delta}-regular bipartite graphs of large girth in the port-numbering model needs more than {t} round(s)"
        ),
        None => "no lower bound certified".into(),
    };
    let body = CertificateBody {
        schema: CERTIFICATE_SCHEMA.into(),
        claim: Claim {
            problem: "maximal matching".into(),
            delta,
            rounds_exceeded: rounds,
            model: "port-numbering, white algorithms".into(),
            statement,
        },
        delta,
        max_t,
        steps,
        final_check,
        notes,
    };
    let digest = sha256_json(&body);
    Ok(Certificate { body, digest })
}

fn final_check(params: FamilyParams) -> FinalCheck {
    let p = make_pi(params);
    let report = zero_round_solvable(&p, Side::Active);
    FinalCheck {
        params,
        problem: format_problem(&p),
        zero_round_solvable: report.solvable,
        refutations: report
            .refutations
            .iter()
            .map(|r| RefutationEntry { support: p.set_names(r.support), bad: names(&p, r.bad.ids()) })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_regular_two_rounds_verifies() {
        let cert = build_certificate(5, 2, &SpeedupOptions::default()).unwrap();
        assert_eq!(cert.rounds_exceeded(), Some(2));
        let json = cert.to_json();
        let claim = verify_certificate(&json).unwrap();
        assert_eq!(claim.rounds_exceeded, Some(2));
        assert_eq!(claim.steps, 2);
    }

    #[test]
    fn edits_are_detected() {
        let cert = build_certificate(4, 1, &SpeedupOptions::default()).unwrap();
        let json = cert.to_json().replacen("\"delta\": 4", "\"delta\": 5", 1);
        assert!(matches!(verify_certificate(&json), Err(VerifyError::Digest { .. })));

        // re-signed edits are caught by the content checks
        let mut forged = cert.clone();
        forged.body.claim.rounds_exceeded = Some(3);
        forged.digest = sha256_json(&forged.body);
        assert!(matches!(verify_certificate(&forged.to_json()), Err(VerifyError::Claim(_))));

        let mut forged = cert.clone();
        let step = &mut forged.body.steps[0];
        let key = step.mapping.keys().next().unwrap().clone();
        let other = if step.mapping[&key] == "M" { "P" } else { "M" };
        step.mapping.insert(key, other.into());
        forged.digest = sha256_json(&forged.body);
        assert!(matches!(verify_certificate(&forged.to_json()), Err(VerifyError::Step { index: 1, .. })));
    }
}
