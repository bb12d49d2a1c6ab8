//! Error-probability arithmetic for randomized lower bounds.
//!
//! Every quantity is stored as `log2` of its value, so thresholds such as
//! `2^(-delta^(2T+2))` stay representable. Inputs outside the range where
//! an inequality is known to hold are still evaluated; the result carries
//! a [`Flag`] instead.

use num_bigint::BigUint;
use num_traits::Float;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// `p > 4^-(delta+1)`: amplification is only known below that.
    AboveAmplificationRange,
    /// The value exceeds 1.
    NotAProbability,
    /// `delta < 8`.
    DeltaBelowHypothesis,
    /// `T > sqrt(delta) / 16`.
    RoundsAboveHypothesis,
}

/// A nonnegative real kept as its base-2 logarithm; zero is `-inf`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorBound<F: Float> {
    pub log2: F,
    /// Formula the value came from.
    pub formula: &'static str,
    pub flags: Vec<Flag>,
}

fn c<F: Float>(v: f64) -> F {
    F::from(v).expect("representable constant")
}

impl<F: Float> ErrorBound<F> {
    pub fn from_log2(log2: F, formula: &'static str) -> Self {
        ErrorBound { log2, formula, flags: Vec::new() }
    }

    pub fn from_value(p: F) -> Self {
        Self::from_log2(p.log2(), "input")
    }

    pub fn zero() -> Self {
        Self::from_log2(F::neg_infinity(), "input")
    }

    pub fn is_zero(&self) -> bool {
        self.log2 == F::neg_infinity()
    }

    /// The plain value; underflows to zero for tiny bounds.
    pub fn value(&self) -> F {
        self.log2.exp2()
    }

    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    fn flag(mut self, f: Flag, when: bool) -> Self {
        if when && !self.flags.contains(&f) {
            self.flags.push(f);
        }
        self
    }

    fn check_probability(self) -> Self {
        let over = self.log2 > F::zero();
        self.flag(Flag::NotAProbability, over)
    }
}

fn log2_of<F: Float>(v: f64) -> F {
    c::<F>(v).log2()
}

/// One amplification step: `q = 5 * delta * p^(1/(delta+1))`.
pub fn amplified_error<F: Float>(p: &ErrorBound<F>, delta: u32) -> ErrorBound<F> {
    if p.is_zero() {
        return ErrorBound::from_log2(F::neg_infinity(), "5*delta*p^(1/(delta+1))");
    }
    let d = c::<F>(delta as f64);
    let log2 = log2_of::<F>(5.0 * delta as f64) + p.log2 / (d + F::one());
    let above = p.log2 > -c::<F>(2.0) * (d + F::one());
    ErrorBound::from_log2(log2, "5*delta*p^(1/(delta+1))")
        .flag(Flag::AboveAmplificationRange, above)
        .check_probability()
}

/// Closed form after `t` steps: `(5 delta)^2 * p^(1/(delta+1)^t)`.
pub fn iterated_error<F: Float>(p: &ErrorBound<F>, delta: u32, t: u32) -> ErrorBound<F> {
    let scale = c::<F>(delta as f64 + 1.0).powi(t as i32);
    let log2 = c::<F>(2.0) * log2_of::<F>(5.0 * delta as f64) + p.log2 / scale;
    ErrorBound::from_log2(log2, "(5*delta)^2*p^(1/(delta+1)^T)").check_probability()
}

/// Error allowed for zero-round algorithms: `delta^-delta`.
pub fn base_threshold<F: Float>(delta: u32) -> ErrorBound<F> {
    let d = c::<F>(delta as f64);
    ErrorBound::from_log2(-d * d.log2(), "delta^-delta").flag(Flag::DeltaBelowHypothesis, delta < 8)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiRound<F: Float> {
    /// `2^(-delta^(2T+2))`.
    pub threshold: ErrorBound<F>,
    /// `log2` of `((5 delta)^2 delta^delta)^((delta+1)^T)`.
    pub chain_log2: F,
    /// The chain value is below `2^(delta^(2T+2))`, i.e. the threshold is
    /// the weaker requirement.
    pub chain_holds: bool,
    /// The same comparison on integers; `None` when the numbers are too
    /// large to build.
    pub chain_holds_exact: Option<bool>,
}

/// Largest integer, in bits, built for the exact comparison.
const EXACT_BIT_LIMIT: f64 = 200_000.0;

/// `2^(-delta^(2T+2))`, together with the comparison against the bound
/// obtained by running [`iterated_error`] back from [`base_threshold`].
pub fn multi_round_threshold<F: Float>(delta: u32, t: u32) -> MultiRound<F> {
    let d = c::<F>(delta as f64);
    let e = d.powi(2 * t as i32 + 2);
    let beyond = (t as f64) > (delta as f64).sqrt() / 16.0;
    let threshold = ErrorBound::from_log2(-e, "2^-(delta^(2T+2))")
        .flag(Flag::RoundsAboveHypothesis, beyond)
        .flag(Flag::DeltaBelowHypothesis, delta < 8);
    // p <= delta^-delta after T steps back means p^(1/(delta+1)^T) * (5 delta)^2 <= delta^-delta
    let base = c::<F>(2.0) * log2_of::<F>(5.0 * delta as f64) + d * d.log2();
    let chain_log2 = base * (d + F::one()).powi(t as i32);
    MultiRound { threshold, chain_log2, chain_holds: chain_log2 < e, chain_holds_exact: chain_exact(delta, t) }
}

fn chain_exact(delta: u32, t: u32) -> Option<bool> {
    let approx_bits = (delta as f64 + 1.0).powi(t as i32) * (2.0 * (5.0 * delta as f64).log2() + delta as f64 * (delta as f64).log2());
    if approx_bits > EXACT_BIT_LIMIT || delta == 0 {
        return None;
    }
    let d = BigUint::from(delta);
    let base = BigUint::from(5 * delta as u64).pow(2) * d.pow(delta);
    let power = (delta as u64 + 1).checked_pow(t)?;
    let lhs = base.pow(u32::try_from(power).ok()?);
    let exponent = (delta as u64).checked_pow(2 * t + 2)?;
    // lhs < 2^e iff lhs has at most e bits
    Some(lhs.bits() <= exponent)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureVsN<F: Float> {
    /// `log2` of `2^(-delta^(2T+2))`.
    pub threshold_log2: F,
    /// `log2(1/n)`.
    pub inverse_n_log2: F,
    /// `2^(-delta^(2T+2)) > 1/n`.
    pub holds: bool,
}

/// Whether the multi-round threshold still beats `1/n`.
pub fn failure_vs_n<F: Float>(delta: u32, t: u32, n: u64) -> FailureVsN<F> {
    let threshold_log2 = -c::<F>(delta as f64).powi(2 * t as i32 + 2);
    let inverse_n_log2 = -c::<F>(n as f64).log2();
    FailureVsN { threshold_log2, inverse_n_log2, holds: threshold_log2 > inverse_n_log2 }
}

/// `sqrt(delta)` under the coupling `sqrt(delta) = log log n / log log log n`
/// (base 2), for callers that want to tie `delta` to `n`.
pub fn coupled_sqrt_delta(n: f64) -> Option<f64> {
    let ll = n.log2().log2();
    let lll = ll.log2();
    (lll > 0.0).then(|| ll / lll)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntermediateStep<F: Float> {
    /// `-delta^(2T+2)`.
    pub threshold_log2: F,
    /// `-2^(sqrt(delta) log2(sqrt(delta)) / 3)`.
    pub bound_log2: F,
    pub holds: bool,
}

/// The comparison `2^(-delta^(2T+2)) > 2^(-2^(sqrt(delta) log2(sqrt(delta)) / 3))`.
pub fn intermediate_inequality<F: Float>(delta: u32, t: u32) -> IntermediateStep<F> {
    let d = c::<F>(delta as f64);
    let s = d.sqrt();
    let threshold_log2 = -d.powi(2 * t as i32 + 2);
    let bound_log2 = -(s * s.log2() / c::<F>(3.0)).exp2();
    IntermediateStep { threshold_log2, bound_log2, holds: threshold_log2 > bound_log2 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdCount<F: Float> {
    /// `delta^T`, the size bound on a radius-T neighborhood.
    pub neighborhood_log2: F,
    /// `delta^delta`, the size of the construction.
    pub n_estimate_log2: F,
    /// Both values exactly, when small enough to build.
    #[serde(serialize_with = "decimal_pair")]
    pub exact: Option<(BigUint, BigUint)>,
    pub neighborhood_smaller: bool,
}

fn decimal_pair<S: serde::Serializer>(v: &Option<(BigUint, BigUint)>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(|(a, b)| (a.to_string(), b.to_string())).serialize(s)
}

pub fn id_count_bound<F: Float>(delta: u32, t: u32) -> IdCount<F> {
    let d = c::<F>(delta as f64);
    let neighborhood_log2 = c::<F>(t as f64) * d.log2();
    let n_estimate_log2 = d * d.log2();
    let bits = (t.max(delta) as f64) * (delta as f64).log2();
    let exact = (bits <= EXACT_BIT_LIMIT).then(|| {
        let b = BigUint::from(delta);
        (b.pow(t), b.pow(delta))
    });
    let neighborhood_smaller = match &exact {
        Some((a, b)) => a < b,
        None => neighborhood_log2 < n_estimate_log2,
    };
    IdCount { neighborhood_log2, n_estimate_log2, exact, neighborhood_smaller }
}

/// `T`-fold composition of [`amplified_error`].
pub fn compose_amplified<F: Float>(p: &ErrorBound<F>, delta: u32, t: u32) -> ErrorBound<F> {
    let mut cur = p.clone();
    for _ in 0..t {
        cur = amplified_error(&cur, delta);
    }
    cur
}

/// Relative closeness used when comparing log-domain values.
pub fn close<F: Float>(a: F, b: F, rel: F) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(F::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplification_at_the_boundary() {
        let p = ErrorBound::<f64>::from_value(4f64.powi(-4));
        let q = amplified_error(&p, 3);
        assert!((q.value() - 3.75).abs() < 1e-12);
        assert_eq!(q.flags, vec![Flag::NotAProbability]);
        assert!(amplified_error(&ErrorBound::<f64>::zero(), 3).is_zero());
    }

    #[test]
    fn tiny_inputs_stay_exact() {
        let p = ErrorBound::<f64>::from_log2(-1000.0, "input");
        let q = amplified_error(&p, 7);
        assert!((q.log2 - (35f64.log2() - 125.0)).abs() < 1e-12);
    }

    #[test]
    fn thresholds() {
        assert_eq!(base_threshold::<f64>(8).log2, -24.0);
        assert!(base_threshold::<f64>(2).is_flagged());
        assert_eq!(multi_round_threshold::<f64>(8, 0).threshold.log2, -64.0);
        assert_eq!(multi_round_threshold::<f64>(9, 1).threshold.log2, -6561.0);
    }

    #[test]
    fn failure_against_n() {
        assert!(!failure_vs_n::<f64>(2, 0, 2).holds);
        assert!(failure_vs_n::<f64>(2, 0, 1 << 20).holds);
    }

    #[test]
    fn id_counts() {
        let r = id_count_bound::<f64>(3, 2);
        assert_eq!(r.exact, Some((BigUint::from(9u32), BigUint::from(27u32))));
        let r = id_count_bound::<f64>(10, 10);
        assert_eq!(r.exact.as_ref().map(|e| e.0 == e.1), Some(true));
        assert!(!r.neighborhood_smaller);
    }

    #[test]
    fn single_precision_agrees() {
        let a = iterated_error(&ErrorBound::<f32>::from_log2(-40.0, "input"), 4, 2);
        let b = iterated_error(&ErrorBound::<f64>::from_log2(-40.0, "input"), 4, 2);
        assert!((a.log2 as f64 - b.log2).abs() < 1e-5);
    }
}
