//! Label identification.

use crate::labels::LabelId;
use crate::problem::{Constraint, LabelMap, Problem, ProblemError};

/// Replaces every label by its image under `map`. The result's alphabet is
/// the set of images, so unmapped labels are an error rather than dropped.
pub fn merge_labels(p: &Problem, map: &LabelMap) -> Result<Problem, ProblemError> {
    let mut images: Vec<String> = Vec::with_capacity(p.alphabet().len());
    for name in p.alphabet() {
        let image = map.get(name).ok_or_else(|| ProblemError::MapNotTotal(name.clone()))?;
        images.push(image.clone());
    }
    let mut alphabet = images.clone();
    alphabet.sort();
    alphabet.dedup();
    let f: Vec<LabelId> = images.iter().map(|n| alphabet.binary_search(n).unwrap()).collect();
    merge_ids(p, &f, alphabet)
}

/// Id-level merge: `f[x]` indexes into `alphabet`.
pub fn merge_ids(p: &Problem, f: &[LabelId], alphabet: Vec<String>) -> Result<Problem, ProblemError> {
    if f.len() != p.alphabet().len() {
        return Err(match p.alphabet().get(f.len()) {
            Some(name) => ProblemError::MapNotTotal(name.clone()),
            None => ProblemError::UnknownLabelId(p.alphabet().len()),
        });
    }
    if let Some(&bad) = f.iter().find(|&&y| y >= alphabet.len()) {
        return Err(ProblemError::UnknownLabelId(bad));
    }
    let active: Constraint = p.active().map(f);
    let passive: Constraint = p.passive().map(f);
    let mut out = Problem::new(alphabet, active, passive, None)?;
    if let Some(meta) = p.meta() {
        out = out.with_meta(meta);
    }
    Ok(out)
}
