//! Certificate checking by direct enumeration.
//!
//! Nothing here calls the engine. Problems are read from their text and
//! expanded into plain word sets; family members are regenerated from
//! their parameters by a separate writer; speedup steps are rechecked by
//! enumerating every slot family over every nonempty label subset.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use super::{trace_hash, CertStep, Certificate, CERTIFICATE_SCHEMA};
use crate::family::FamilyParams;
use crate::hash::sha256_json;
use crate::problem::{parse_problem, Problem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("digest mismatch: recorded {recorded}, computed {computed}")]
    Digest { recorded: String, computed: String },
    #[error("unsupported schema {0:?}")]
    Schema(String),
    #[error("step {index}: {reason}")]
    Step { index: usize, reason: String },
    #[error("final problem: {0}")]
    Final(String),
    #[error("claim: {0}")]
    Claim(String),
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct VerifiedClaim {
    pub delta: u32,
    pub rounds_exceeded: Option<u32>,
    pub steps: usize,
    pub statement: String,
}

type Plain = Vec<usize>;

/// A problem as explicit word sets.
struct Expanded {
    names: Vec<String>,
    active: HashSet<Plain>,
    passive: HashSet<Plain>,
    adeg: usize,
    pdeg: usize,
}

impl Expanded {
    fn from_problem(p: &Problem) -> Self {
        let words = |side: &crate::problem::Constraint| -> HashSet<Plain> {
            let mut out = HashSet::new();
            for c in side.configs() {
                let slots: Vec<Vec<usize>> = c
                    .groups()
                    .iter()
                    .flat_map(|g| std::iter::repeat_n(g.members.iter().collect::<Vec<_>>(), g.exp as usize))
                    .collect();
                let mut cur = Vec::with_capacity(slots.len());
                product(&slots, &mut cur, &mut out);
            }
            out
        };
        Expanded {
            names: p.alphabet().to_vec(),
            active: words(p.active()),
            passive: words(p.passive()),
            adeg: p.active().degree(),
            pdeg: p.passive().degree(),
        }
    }

    fn parse(text: &str) -> Result<(Problem, Self), String> {
        let p = parse_problem(text).map_err(|e| e.to_string())?;
        let e = Expanded::from_problem(&p);
        Ok((p, e))
    }

    fn id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn ids(&self, names: &[String]) -> Option<Plain> {
        let mut v = names.iter().map(|n| self.id(n)).collect::<Option<Vec<_>>>()?;
        v.sort_unstable();
        Some(v)
    }

    fn same_as(&self, other: &Expanded) -> bool {
        self.names == other.names
            && self.active == other.active
            && self.passive == other.passive
            && self.adeg == other.adeg
            && self.pdeg == other.pdeg
    }
}

fn product(slots: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut HashSet<Plain>) {
    if cur.len() == slots.len() {
        let mut w = cur.clone();
        w.sort_unstable();
        out.insert(w);
        return;
    }
    for &x in &slots[cur.len()] {
        cur.push(x);
        product(slots, cur, out);
        cur.pop();
    }
}

/// All non-decreasing sequences of length `k` over `0..n`.
fn multisets(n: usize, k: usize) -> Vec<Plain> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Plain, out: &mut Vec<Plain>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Perfect matching between two equally long lists (Kuhn's algorithm).
fn perfect_match(n: usize, ok: impl Fn(usize, usize) -> bool) -> bool {
    fn try_left(i: usize, n: usize, ok: &dyn Fn(usize, usize) -> bool, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..n {
            if ok(i, j) && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| try_left(k, n, ok, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; n];
    (0..n).all(|i| try_left(i, n, &ok, &mut vec![false; n], &mut owner))
}

/// Family member text, written independently of the library generator.
fn family_text(params: FamilyParams) -> String {
    let FamilyParams { delta, x, y } = params;
    let d = delta - x - y;
    let rep = |s: &str, k: u32| vec![s.to_string(); k as usize];
    let (mx, pox, ox, mpox) = if x == 0 { ("M", "[PO]", "O", "[MPO]") } else { ("[MX]", "[POX]", "[OX]", "[MPOX]") };
    let mut wt = rep("O", y);
    wt.extend(rep("X", x));
    let mut bt = rep(pox, y);
    bt.extend(rep(mpox, x));
    let mut white = Vec::new();
    let mut black = Vec::new();
    if d >= 1 {
        let mut w1 = vec!["M".to_string()];
        w1.extend(rep("O", d - 1));
        w1.extend(wt.clone());
        let mut w2 = rep("P", d);
        w2.extend(wt.clone());
        white = vec![w1.join(" "), w2.join(" ")];
        let mut b1 = vec![mx.to_string()];
        b1.extend(rep(pox, d - 1));
        b1.extend(bt.clone());
        let mut b2 = rep(ox, d);
        b2.extend(bt.clone());
        black = vec![b1.join(" "), b2.join(" ")];
    } else {
        white.push(wt.join(" "));
        black.push(bt.join(" "));
    }
    let labels = if x == 0 { "M O P" } else { "M O P X" };
    format!("labels: {labels}\nwhite: {}\nblack: {}\n", white.join(" | "), black.join(" | "))
}

fn family_expanded(params: FamilyParams) -> Result<Expanded, String> {
    if params.delta == 0 || params.x + params.y > params.delta {
        return Err(format!("invalid family parameters {params:?}"));
    }
    Ok(Expanded::parse(&family_text(params))?.1)
}

/// Checks a certificate given as JSON text.
pub fn verify_certificate(json: &str) -> Result<VerifiedClaim, VerifyError> {
    let cert: Certificate = serde_json::from_str(json).map_err(|e| VerifyError::Malformed(e.to_string()))?;
    let computed = sha256_json(&cert.body);
    if computed != cert.digest {
        return Err(VerifyError::Digest { recorded: cert.digest.clone(), computed });
    }
    let body = &cert.body;
    if body.schema != CERTIFICATE_SCHEMA {
        return Err(VerifyError::Schema(body.schema.clone()));
    }
    if body.claim.delta != body.delta {
        return Err(VerifyError::Claim("claim and body disagree on delta".into()));
    }
    let mut expected = FamilyParams { delta: body.delta, x: 0, y: 0 };
    for (k, step) in body.steps.iter().enumerate() {
        let index = k + 1;
        let fail = |reason: String| VerifyError::Step { index, reason };
        if step.index as usize != index {
            return Err(fail(format!("recorded index {}", step.index)));
        }
        if step.params != expected {
            return Err(fail(format!("parameters {:?}, expected {:?}", step.params, expected)));
        }
        let next = FamilyParams { delta: expected.delta, x: expected.x + 1, y: expected.y + expected.x };
        if step.target_params != next {
            return Err(fail(format!("target parameters {:?}, expected {:?}", step.target_params, next)));
        }
        check_step(step).map_err(fail)?;
        expected = next;
    }

    let fin = &body.final_check;
    if fin.params != expected {
        return Err(VerifyError::Final(format!("parameters {:?}, expected {:?}", fin.params, expected)));
    }
    let (_, recorded) = Expanded::parse(&fin.problem).map_err(VerifyError::Final)?;
    let own = family_expanded(fin.params).map_err(VerifyError::Final)?;
    if !recorded.same_as(&own) {
        return Err(VerifyError::Final("problem text is not the family member".into()));
    }
    for r in &fin.refutations {
        let bad = own.ids(&r.bad).ok_or_else(|| VerifyError::Final("refutation uses unknown labels".into()))?;
        let support = own.ids(&r.support).ok_or_else(|| VerifyError::Final("refutation uses unknown labels".into()))?;
        if bad.len() != own.pdeg || own.passive.contains(&bad) || !bad.iter().all(|b| support.contains(b)) {
            return Err(VerifyError::Final(format!("refutation {:?} does not refute", r.bad)));
        }
    }
    let solvable = zero_round_solvable(&own);
    if solvable != fin.zero_round_solvable {
        return Err(VerifyError::Final(format!("recorded zero-round solvability {} is wrong", fin.zero_round_solvable)));
    }
    let proved = (!solvable).then_some(body.steps.len() as u32);
    if proved != body.claim.rounds_exceeded {
        return Err(VerifyError::Claim(format!(
            "claims {:?} rounds, the transcript supports {:?}",
            body.claim.rounds_exceeded, proved
        )));
    }
    Ok(VerifiedClaim {
        delta: body.delta,
        rounds_exceeded: proved,
        steps: body.steps.len(),
        statement: body.claim.statement.clone(),
    })
}

/// Some active word such that every passive-degree multiset over its
/// labels is a passive word.
fn zero_round_solvable(p: &Expanded) -> bool {
    p.active.iter().any(|w| {
        let mut support = w.clone();
        support.dedup();
        multisets(support.len(), p.pdeg).iter().all(|m| {
            let word: Plain = m.iter().map(|&i| support[i]).collect();
            p.passive.contains(&word)
        })
    })
}

fn check_step(step: &CertStep) -> Result<(), String> {
    let (_, origin) = Expanded::parse(&step.problem)?;
    if !origin.same_as(&family_expanded(step.params)?) {
        return Err("problem text is not the family member".into());
    }
    let (_, target) = Expanded::parse(&step.target)?;
    if !target.same_as(&family_expanded(step.target_params)?) {
        return Err("target text is not the family member".into());
    }
    let (sp_problem, sp) = Expanded::parse(&step.speedup.problem)?;
    let hash = trace_hash(&step.problem, &step.speedup.problem, &step.speedup.dictionary);
    if hash != step.speedup.trace_hash {
        return Err("speedup trace hash mismatch".into());
    }
    if sp.adeg != origin.pdeg || sp_problem.passive().degree() != origin.adeg {
        return Err("speedup degrees do not swap the origin degrees".into());
    }
    if target.adeg != sp.adeg || target.pdeg != sp.pdeg {
        return Err("target degrees differ from the speedup degrees".into());
    }

    // set-label dictionary over the origin alphabet
    let dict_names: Vec<&String> = step.speedup.dictionary.keys().collect();
    if dict_names.iter().map(|s| s.as_str()).ne(sp.names.iter().map(|s| s.as_str())) {
        return Err("dictionary keys differ from the speedup alphabet".into());
    }
    let mut sets: Vec<u32> = Vec::with_capacity(sp.names.len());
    for name in &sp.names {
        let members = &step.speedup.dictionary[name];
        let mut mask = 0u32;
        for m in members {
            let id = origin.id(m).ok_or_else(|| format!("dictionary member {m:?} not in the origin alphabet"))?;
            mask |= 1 << id;
        }
        if mask == 0 || sets.contains(&mask) {
            return Err(format!("dictionary entry {name:?} is empty or repeated"));
        }
        sets.push(mask);
    }

    check_completeness(&origin, &sp, &sets)?;
    let good = existential_good(&origin, &sets, sp_problem.passive().degree());
    check_relaxation(step, &sp, &target, &good)
}

/// Every family of label subsets whose choice words are all origin passive
/// words is covered slot by slot by some active word of the speedup.
fn check_completeness(origin: &Expanded, sp: &Expanded, sets: &[u32]) -> Result<(), String> {
    let n = origin.names.len();
    let k = origin.pdeg;
    let mut prefixes: HashSet<Plain> = HashSet::new();
    for w in &origin.passive {
        for mask in 0u32..(1 << w.len()) {
            let sub: Plain = (0..w.len()).filter(|&i| mask & (1 << i) != 0).map(|i| w[i]).collect();
            prefixes.insert(sub);
        }
    }
    let families: Vec<Vec<u32>> =
        sp.active.iter().map(|w| w.iter().map(|&i| sets[i]).collect()).collect();
    let subsets: Vec<u32> = (1u32..(1 << n)).collect();

    struct Walk<'a> {
        subsets: &'a [u32],
        prefixes: &'a HashSet<Plain>,
        families: &'a [Vec<u32>],
        k: usize,
        checked: usize,
    }
    impl Walk<'_> {
        fn go(&mut self, start: usize, chosen: &mut Vec<u32>, words: &HashSet<Plain>) -> Result<(), String> {
            if chosen.len() == self.k {
                self.checked += 1;
                let covered = self.families.iter().any(|g| perfect_match(self.k, |i, j| chosen[i] & !g[j] == 0));
                return if covered { Ok(()) } else { Err(format!("good family {chosen:?} is not covered")) };
            }
            for s in start..self.subsets.len() {
                let set = self.subsets[s];
                let mut next = HashSet::new();
                let mut ok = true;
                'grow: for w in words {
                    for x in 0..32 {
                        if set & (1 << x) != 0 {
                            let mut e = w.clone();
                            e.push(x);
                            e.sort_unstable();
                            if !self.prefixes.contains(&e) {
                                ok = false;
                                break 'grow;
                            }
                            next.insert(e);
                        }
                    }
                }
                if ok {
                    chosen.push(set);
                    self.go(s, chosen, &next)?;
                    chosen.pop();
                }
            }
            Ok(())
        }
    }
    let mut walk = Walk { subsets: &subsets, prefixes: &prefixes, families: &families, k, checked: 0 };
    let start: HashSet<Plain> = std::iter::once(Vec::new()).collect();
    walk.go(0, &mut Vec::new(), &start)
}

/// Multisets of speedup labels of the given size with at least one choice
/// word that is an origin active word.
fn existential_good(origin: &Expanded, sets: &[u32], degree: usize) -> HashSet<Plain> {
    multisets(sets.len(), degree)
        .into_iter()
        .filter(|m| {
            origin.active.iter().any(|w| w.len() == m.len() && perfect_match(m.len(), |i, j| sets[m[i]] & (1 << w[j]) != 0))
        })
        .collect()
}

fn check_relaxation(step: &CertStep, sp: &Expanded, target: &Expanded, good: &HashSet<Plain>) -> Result<(), String> {
    let mut f = Vec::with_capacity(sp.names.len());
    for name in &sp.names {
        let image = step.mapping.get(name).ok_or_else(|| format!("mapping has no image for {name:?}"))?;
        f.push(target.id(image).ok_or_else(|| format!("image {image:?} not in the target alphabet"))?);
    }
    if step.mapping.len() != sp.names.len() {
        return Err("mapping has labels outside the speedup alphabet".into());
    }
    let map_word = |w: &Plain| -> Plain {
        let mut v: Plain = w.iter().map(|&x| f[x]).collect();
        v.sort_unstable();
        v
    };

    // x -> y is safe when it keeps every good multiset good
    let n = sp.names.len();
    let mut safe = vec![vec![false; n]; n];
    for (x, row) in safe.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            *cell = x == y
                || good.iter().filter(|m| m.contains(&x)).all(|m| {
                    let mut r = m.clone();
                    let pos = r.iter().position(|&z| z == x).unwrap();
                    r[pos] = y;
                    r.sort_unstable();
                    good.contains(&r)
                });
        }
    }

    let mut covered: HashMap<Plain, ()> = HashMap::new();
    for u in &step.upgrades {
        let word = sp.ids(&u.word).ok_or("upgrade word uses unknown labels")?;
        let up = sp.ids(&u.upgraded).ok_or("upgraded word uses unknown labels")?;
        let image = target.ids(&u.image).ok_or("upgrade image uses unknown labels")?;
        if !sp.active.contains(&word) {
            return Err(format!("upgrade entry {:?} is not an active word", u.word));
        }
        if up.len() != word.len() || !perfect_match(word.len(), |i, j| safe[word[i]][up[j]]) {
            return Err(format!("{:?} cannot be raised to {:?}", u.word, u.upgraded));
        }
        if map_word(&up) != image {
            return Err(format!("image of {:?} is not {:?}", u.upgraded, u.image));
        }
        if !target.active.contains(&image) {
            return Err(format!("image {:?} is not a target active word", u.image));
        }
        covered.insert(word, ());
    }
    if let Some(missing) = sp.active.iter().find(|w| !covered.contains_key(*w)) {
        let names: Vec<&String> = missing.iter().map(|&i| &sp.names[i]).collect();
        return Err(format!("active word {names:?} has no upgrade entry"));
    }
    let mut sorted: BTreeMap<Plain, ()> = BTreeMap::new();
    for m in good {
        sorted.insert(m.clone(), ());
    }
    for m in sorted.keys() {
        if !target.passive.contains(&map_word(m)) {
            let names: Vec<&String> = m.iter().map(|&i| &sp.names[i]).collect();
            return Err(format!("passive multiset {names:?} maps outside the target"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_family_text_matches_encoding() {
        let e = family_expanded(FamilyParams { delta: 3, x: 0, y: 0 }).unwrap();
        assert_eq!(e.active.len(), 2);
        assert_eq!(e.passive.len(), 4);
        assert!(!zero_round_solvable(&e));
    }

    #[test]
    fn kuhn_needs_rerouting() {
        assert!(perfect_match(2, |i, j| matches!((i, j), (0, 0) | (0, 1) | (1, 0))));
        assert!(!perfect_match(2, |_, j| j == 0));
    }
}
