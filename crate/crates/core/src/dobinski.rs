//! Dobiński-type limsup sets `D = limsup_n D(n, κ_n)`.
//!
//! Every symbolic family is reduced to the normal form
//! `κ_n = ⌈C n^β 2^{γ n}⌉` with rational `C > 0`, `β` and `γ ≥ 0`, and the
//! positivity / vanishing conditions are decided by exact comparison of the
//! growth exponents:
//!
//! | branch   | positive if                       | zero if                          |
//! |----------|----------------------------------|----------------------------------|
//! | `ap = 1` | (i) `limsup κ_n^{-(p-1)} 2^n > 0` | (ii) `Σ κ_n^{-(p-1)} 2^n < ∞`    |
//! | `ap < 1` | (a) `limsup (apn-(1-ap)κ_n) > -∞` | (b) `Σ 2^{apn-(1-ap)κ_n} < ∞`    |
//!
//! Sequences are indexed from `n = 1`.

use crate::error::{Error, Result};
use crate::exponents::{format_rational, rational_serde, rational_to_f64, Branch, Exponents, Rational};
use crate::logvalue::LogValue;
use crate::phi::{biguint_f64, biguint_log2, cap_component, full_tree_capacity, BoundKind, CapacityReport, Method};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Number of leading terms recorded as evidence by [`classify`].
pub const EVIDENCE_TERMS: u64 = 32;

/// A sequence `κ_n` of positive integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `κ_n = ⌈2^n / m⌉`
    Geometric { m: u64 },
    /// `κ_n = ⌈C n^β⌉`
    Power {
        #[serde(with = "rational_serde")]
        c: Rational,
        #[serde(with = "rational_serde")]
        beta: Rational,
    },
    /// `κ_n = ⌈C n⌉`
    Linear {
        #[serde(with = "rational_serde")]
        c: Rational,
    },
    /// `κ_n = ⌈C n^β 2^{γ n}⌉`, the common normal form.
    ExpPoly {
        #[serde(with = "rational_serde")]
        c: Rational,
        #[serde(with = "rational_serde")]
        beta: Rational,
        #[serde(with = "rational_serde")]
        gamma: Rational,
    },
    /// Explicit `(n, κ_n)` values overriding a symbolic tail rule.
    Custom { table: Vec<(u64, u64)>, tail_rule: Box<SequenceSpec> },
}

/// `κ_n = ⌈C n^β 2^{γ n}⌉`.
#[derive(Debug, Clone, PartialEq)]
pub struct Growth {
    pub c: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

fn int(k: i64) -> Rational {
    Rational::from_integer(k.into())
}

impl SequenceSpec {
    pub fn geometric(m: u64) -> SequenceSpec {
        SequenceSpec::Geometric { m }
    }

    pub fn constant(k: u64) -> SequenceSpec {
        SequenceSpec::Power { c: Rational::from_integer(k.into()), beta: int(0) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::Custom { table, tail_rule } => {
                if matches!(**tail_rule, SequenceSpec::Custom { .. }) {
                    return Err(Error::Sequence("a custom tail rule must be symbolic".into()));
                }
                if let Some((n, k)) = table.iter().find(|(n, k)| *n == 0 || *k == 0) {
                    return Err(Error::Sequence(format!("table entry ({n}, {k}): need n >= 1 and kappa >= 1")));
                }
                tail_rule.growth().map(|_| ())
            }
            _ => self.growth().map(|_| ()),
        }
    }

    /// The symbolic normal form of the tail.
    pub fn growth(&self) -> Result<Growth> {
        let g = match self {
            SequenceSpec::Geometric { m } => {
                if *m == 0 {
                    return Err(Error::Sequence("geometric family needs m >= 1".into()));
                }
                Growth { c: Rational::new(1.into(), (*m).into()), beta: int(0), gamma: int(1) }
            }
            SequenceSpec::Power { c, beta } => Growth { c: c.clone(), beta: beta.clone(), gamma: int(0) },
            SequenceSpec::Linear { c } => Growth { c: c.clone(), beta: int(1), gamma: int(0) },
            SequenceSpec::ExpPoly { c, beta, gamma } => {
                Growth { c: c.clone(), beta: beta.clone(), gamma: gamma.clone() }
            }
            SequenceSpec::Custom { tail_rule, .. } => return tail_rule.growth(),
        };
        if !g.c.is_positive() {
            return Err(Error::Sequence(format!("coefficient must be positive, got {}", format_rational(&g.c))));
        }
        if g.gamma.is_negative() {
            return Err(Error::Sequence(format!("gamma must be >= 0, got {}", format_rational(&g.gamma))));
        }
        Ok(g)
    }

    /// Last index fixed by a custom table (0 for symbolic families).
    pub fn table_end(&self) -> u64 {
        match self {
            SequenceSpec::Custom { table, .. } => table.iter().map(|(n, _)| *n).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// The exact term `κ_n`, `n >= 1`.
    pub fn kappa(&self, n: u64) -> Result<BigUint> {
        if n == 0 {
            return Err(Error::Sequence("sequences are indexed from n = 1".into()));
        }
        if let SequenceSpec::Custom { table, tail_rule } = self {
            if let Some((_, k)) = table.iter().rev().find(|(m, _)| *m == n) {
                if *k == 0 {
                    return Err(Error::Sequence(format!("kappa_{n} = 0")));
                }
                return Ok(BigUint::from(*k));
            }
            return tail_rule.kappa(n);
        }
        let k = self.growth()?.kappa(n);
        if k.is_zero() {
            return Err(Error::Sequence(format!("kappa_{n} = 0")));
        }
        Ok(k)
    }
}

impl Growth {
    /// Smallest integer `k` with `k >= C n^β 2^{γ n}`, computed exactly by
    /// raising both sides to the common denominator of `β` and `γ`.
    pub fn kappa(&self, n: u64) -> BigUint {
        let l = self.beta.denom().lcm(self.gamma.denom());
        let l_u32 = l.to_u32().expect("exponent denominators fit in u32");
        let beta_l = (&self.beta * Rational::from_integer(l.clone())).to_integer();
        let gamma_nl = (&self.gamma * Rational::from_integer(l.clone()) * Rational::from_integer(n.into())).to_integer();
        let mut target = pow_rational(&self.c, l_u32);
        let n_big = BigInt::from(n);
        let n_pow = num_traits::pow(n_big, beta_l.abs().to_usize().expect("small beta"));
        if beta_l.is_negative() {
            target /= Rational::from_integer(n_pow);
        } else {
            target *= Rational::from_integer(n_pow);
        }
        target *= Rational::from_integer(BigInt::one() << gamma_nl.to_usize().expect("shift fits"));
        ceil_root(&target, l_u32)
    }

    /// Lower envelope `log2(C n^β 2^{γn})` in floating point.
    fn log2_envelope(&self, n: f64) -> f64 {
        rational_to_f64(&self.c).log2() + rational_to_f64(&self.beta) * n.log2() + rational_to_f64(&self.gamma) * n
    }
}

fn pow_rational(r: &Rational, k: u32) -> Rational {
    Rational::new(num_traits::pow(r.numer().clone(), k as usize), num_traits::pow(r.denom().clone(), k as usize))
}

/// Smallest `k >= 0` with `k^l >= t` for `t > 0`.
fn ceil_root(t: &Rational, l: u32) -> BigUint {
    let ceil = t.ceil().to_integer().to_biguint().unwrap_or_default();
    let mut k = ceil.nth_root(l);
    let pow_ge = |k: &BigUint| Rational::from_integer(BigInt::from(num_traits::pow(k.clone(), l as usize))) >= *t;
    while !pow_ge(&k) {
        k += 1u32;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Positive,
    Zero,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "(i)")]
    I,
    #[serde(rename = "(ii)")]
    II,
    #[serde(rename = "(a)")]
    A,
    #[serde(rename = "(b)")]
    B,
}

/// One term of the condition series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub n: u64,
    pub kappa_log2: f64,
    /// `κ_n^{-(p-1)} 2^n` or `2^{apn-(1-ap)κ_n}`.
    pub term_log2: f64,
    pub partial_sum_log2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub condition: Option<Condition>,
    pub reason: String,
    pub evidence: Vec<EvidenceRow>,
}

/// `log2` of the condition series term at `n`.
pub fn condition_term_log2(kappa: &BigUint, n: u64, e: &Exponents) -> f64 {
    match e.branch() {
        Branch::Critical => n as f64 - (e.p_f64() - 1.0) * biguint_log2(kappa),
        Branch::Subcritical => e.ap_f64() * n as f64 - e.one_minus_ap_f64() * biguint_f64(kappa),
    }
}

fn evidence(spec: &SequenceSpec, e: &Exponents) -> Result<Vec<EvidenceRow>> {
    let end = EVIDENCE_TERMS.max(spec.table_end());
    let mut sum = LogValue::ZERO;
    (1..=end)
        .map(|n| {
            let k = spec.kappa(n)?;
            let term = condition_term_log2(&k, n, e);
            sum = sum.add(LogValue::from_log2(term));
            Ok(EvidenceRow { n, kappa_log2: biguint_log2(&k), term_log2: term, partial_sum_log2: sum.log2() })
        })
        .collect()
}

fn decide(g: &Growth, e: &Exponents) -> (Outcome, Option<Condition>, String) {
    let zero = Rational::zero();
    let one = Rational::one();
    let p_minus_1 = e.p() - &one;
    let f = format_rational;
    match e.branch() {
        Branch::Critical => {
            // log2 of the term is (1-(p-1)γ) n - (p-1)β log2 n + O(1)
            let rate = &one - &p_minus_1 * &g.gamma;
            let s = &p_minus_1 * &g.beta;
            match rate.cmp(&zero) {
                Ordering::Greater => (
                    Outcome::Positive,
                    Some(Condition::I),
                    format!("term grows like 2^({} n)", f(&rate)),
                ),
                Ordering::Less => (
                    Outcome::Zero,
                    Some(Condition::II),
                    format!("term decays like 2^({} n), series converges", f(&rate)),
                ),
                Ordering::Equal => {
                    if s <= zero {
                        (
                            Outcome::Positive,
                            Some(Condition::I),
                            format!("term behaves like n^({}), limsup > 0", f(&-s)),
                        )
                    } else if s > one {
                        (
                            Outcome::Zero,
                            Some(Condition::II),
                            format!("term behaves like n^(-{}), series converges", f(&s)),
                        )
                    } else {
                        (
                            Outcome::Indeterminate,
                            None,
                            format!("term behaves like n^(-{}): tends to 0 but series diverges", f(&s)),
                        )
                    }
                }
            }
        }
        Branch::Subcritical => {
            let b = &one - e.ap();
            if g.gamma.is_positive() {
                return (
                    Outcome::Zero,
                    Some(Condition::B),
                    "kappa grows exponentially, apn-(1-ap)kappa -> -inf superlinearly".into(),
                );
            }
            match g.beta.cmp(&one) {
                Ordering::Less => (
                    Outcome::Positive,
                    Some(Condition::A),
                    format!("kappa ~ n^{} is sublinear, apn-(1-ap)kappa -> +inf", f(&g.beta)),
                ),
                Ordering::Greater => (
                    Outcome::Zero,
                    Some(Condition::B),
                    format!("kappa ~ n^{} is superlinear, series converges", f(&g.beta)),
                ),
                Ordering::Equal => {
                    let slope = e.ap() - &b * &g.c;
                    if slope >= zero {
                        (
                            Outcome::Positive,
                            Some(Condition::A),
                            format!("apn-(1-ap)kappa = {} n + O(1) is bounded below", f(&slope)),
                        )
                    } else {
                        (
                            Outcome::Zero,
                            Some(Condition::B),
                            format!("apn-(1-ap)kappa = {} n + O(1), geometric series converges", f(&slope)),
                        )
                    }
                }
            }
        }
    }
}

/// Decides positivity or vanishing of `cap_{a,p}(D)` from the tail of `κ_n`.
pub fn classify(spec: &SequenceSpec, e: &Exponents) -> Result<Verdict> {
    spec.validate()?;
    let (outcome, condition, reason) = decide(&spec.growth()?, e);
    Ok(Verdict { outcome, condition, reason, evidence: evidence(spec, e)? })
}

/// Number of `m` values probed by [`dobinski_full`]; the symbolic verdict of
/// `Geometric(m)` does not depend on `m`.
pub const DOBINSKI_M_PROBE: u64 = 8;

/// Classifies the full Dobiński set as the union over `m` of the runs-of-0
/// and runs-of-1 halves built from `κ_n = ⌈2^n/m⌉`.
///
/// Positive if some half is positive, zero if every half is zero.
pub fn dobinski_full(e: &Exponents) -> Result<Verdict> {
    let mut verdicts = Vec::new();
    for m in 1..=DOBINSKI_M_PROBE {
        // bit-flip symmetry: the runs-of-1 half has the same sequence and value
        let v = classify(&SequenceSpec::geometric(m), e)?;
        verdicts.push(v.clone());
        verdicts.push(v);
    }
    let pick = |o: Outcome| verdicts.iter().find(|v| v.outcome == o).cloned();
    let (outcome, base) = if let Some(v) = pick(Outcome::Positive) {
        (Outcome::Positive, v)
    } else if verdicts.iter().all(|v| v.outcome == Outcome::Zero) {
        (Outcome::Zero, verdicts[0].clone())
    } else {
        (Outcome::Indeterminate, pick(Outcome::Indeterminate).unwrap())
    };
    Ok(Verdict {
        outcome,
        condition: if outcome == Outcome::Indeterminate { None } else { base.condition },
        reason: format!("both halves, m = 1..={DOBINSKI_M_PROBE}: {}", base.reason),
        evidence: base.evidence,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperBound {
    Bound(CapacityReport),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBounds {
    pub lower: CapacityReport,
    pub upper: UpperBound,
    pub outcome: Outcome,
    /// First index `m` of the tail sum `Σ_{n>=m} cap D(n, κ_n)`.
    pub tail_start: u64,
    pub terms_summed: u64,
    /// Bound on the part of the tail beyond the summed terms.
    /// `None` when the upper bound is unbounded.
    pub remainder: Option<LogValue>,
}

const TAIL_RELATIVE_CUTOFF: f64 = -80.0;
const TAIL_MIN_TERMS: u64 = 4096;
const TAIL_MAX_TERMS: u64 = 100_000;

/// Bound on `Σ_{n > last} cap D(n, κ_n)` from the symbolic envelope
/// `κ_n >= C n^β 2^{γn}`, or `None` if the envelope gives no geometric or
/// integral bound starting at `last`.
///
/// Uses `cap D(n,κ) <= κ^{-(p-1)} 2^n` for `ap = 1` and
/// `cap D(n,κ) <= c 2^{apn-(1-ap)κ}` for `ap < 1`.
fn tail_remainder(g: &Growth, e: &Exponents, last: u64) -> Option<LogValue> {
    let big_n = last as f64;
    let next = big_n + 1.0;
    match e.branch() {
        Branch::Critical => {
            let pm1 = e.p_f64() - 1.0;
            let rate = 1.0 - pm1 * rational_to_f64(&g.gamma);
            let s = pm1 * rational_to_f64(&g.beta);
            let log2_k = -pm1 * rational_to_f64(&g.c).log2();
            let u_next = log2_k - s * next.log2() + rate * next;
            if rate < 0.0 {
                let growth = if s >= 0.0 { 1.0 } else { ((next + 1.0) / next).powf(-s) };
                let rho = growth * rate.exp2();
                (rho < 1.0).then(|| LogValue::from_log2(u_next - (1.0 - rho).log2()))
            } else if rate == 0.0 && s > 1.0 && last >= 1 {
                Some(LogValue::from_log2(log2_k + (1.0 - s) * big_n.log2() - (s - 1.0).log2()))
            } else {
                None
            }
        }
        Branch::Subcritical => {
            let beta = rational_to_f64(&g.beta);
            let gamma = rational_to_f64(&g.gamma);
            let convex_from = if beta <= 0.0 || beta >= 1.0 {
                0.0
            } else if gamma > 0.0 {
                beta.sqrt() / (gamma * std::f64::consts::LN_2)
            } else {
                return None;
            };
            if next < convex_from {
                return None;
            }
            let b = e.one_minus_ap_f64();
            let y = |x: f64| e.ap_f64() * x - b * g.log2_envelope(x).exp2();
            let c = full_tree_capacity(e).value;
            let (y1, y2) = (y(next), y(next + 1.0));
            if y1 == f64::NEG_INFINITY {
                return Some(LogValue::ZERO);
            }
            let delta = y2 - y1;
            (delta < 0.0).then(|| c.mul(LogValue::from_log2(y1 - crate::logvalue::log2_1m_exp2(delta))))
        }
    }
}

/// Bracket on `cap_{a,p}(D)` from the components `D(n, κ_n)`.
///
/// The upper bound is the tail sum `Σ_{n>=n_max} cap D(n, κ_n)` (the tails
/// decrease in their starting index, so this is the infimum over starting
/// points up to `n_max`), with the terms summed until they fall below
/// `2^{-80}` of the running sum and the rest bounded through the symbolic
/// envelope. It is `Unbounded` unless the set is classified zero, since the
/// tail sums then diverge.
///
/// The lower bound is `max_{n<=n_max} cap D(n, κ_n)`, a finite-horizon
/// proxy for `limsup_n cap D(n, κ_n)`; for sets classified zero it is `0`.
pub fn capacity_bounds(spec: &SequenceSpec, e: &Exponents, n_max: u64) -> Result<CapacityBounds> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be >= 1".into()));
    }
    let verdict = classify(spec, e)?;
    let mut lower = LogValue::ZERO;
    if verdict.outcome != Outcome::Zero {
        for n in 1..=n_max {
            lower = lower.max(cap_component(n, &spec.kappa(n)?, e).value);
        }
    }
    let lower = CapacityReport { value: lower, method: Method::ClosedForm, bound_kind: BoundKind::Lower };

    if verdict.outcome != Outcome::Zero {
        return Ok(CapacityBounds {
            lower,
            upper: UpperBound::Unbounded,
            outcome: verdict.outcome,
            tail_start: n_max,
            terms_summed: 0,
            remainder: None,
        });
    }

    let growth = spec.growth()?;
    let mut sum = LogValue::ZERO;
    let mut n = n_max;
    loop {
        let term = cap_component(n, &spec.kappa(n)?, e).value;
        sum = sum.add(term);
        let summed = n - n_max + 1;
        let small = term.is_zero() || term.log2() - sum.log2() < TAIL_RELATIVE_CUTOFF;
        if n >= spec.table_end() && (small || summed >= TAIL_MIN_TERMS) {
            if let Some(rest) = tail_remainder(&growth, e, n) {
                let upper = CapacityReport { value: sum.add(rest), method: Method::ClosedForm, bound_kind: BoundKind::Upper };
                return Ok(CapacityBounds {
                    lower,
                    upper: UpperBound::Bound(upper),
                    outcome: verdict.outcome,
                    tail_start: n_max,
                    terms_summed: summed,
                    remainder: Some(rest),
                });
            }
        }
        if summed >= TAIL_MAX_TERMS {
            return Err(Error::Sequence(format!("tail sum did not close within {TAIL_MAX_TERMS} terms")));
        }
        n += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: u64,
    pub kappa_log2: f64,
    pub capacity_log2: f64,
    pub comparison_log2: f64,
    pub ratio_log2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityTable {
    pub rows: Vec<RatioRow>,
    pub min_ratio_log2: f64,
    pub max_ratio_log2: f64,
}

/// Ratios `cap D(n, κ_n) / Q_n` with `Q_n = κ_n^{-(p-1)} 2^n` (`ap = 1`) or
/// `Q_n = 2^{apn-(1-ap)κ_n}` (`ap < 1`), for `n` in `start..=end`.
pub fn comparability_report(e: &Exponents, start: u64, end: u64, spec: &SequenceSpec) -> Result<ComparabilityTable> {
    spec.validate()?;
    if start < 1 || start > end || end > 10_000 {
        return Err(Error::Domain(format!("n range {start}..={end} must lie in 1..=10000")));
    }
    let rows: Vec<RatioRow> = (start..=end)
        .into_par_iter()
        .map(|n| {
            let k = spec.kappa(n)?;
            let cap = cap_component(n, &k, e).value.log2();
            let cmp = condition_term_log2(&k, n, e);
            Ok(RatioRow { n, kappa_log2: biguint_log2(&k), capacity_log2: cap, comparison_log2: cmp, ratio_log2: cap - cmp })
        })
        .collect::<Result<_>>()?;
    let min_ratio_log2 = rows.iter().map(|r| r.ratio_log2).fold(f64::INFINITY, f64::min);
    let max_ratio_log2 = rows.iter().map(|r| r.ratio_log2).fold(f64::NEG_INFINITY, f64::max);
    Ok(ComparabilityTable { rows, min_ratio_log2, max_ratio_log2 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionPoint {
    pub exponents: Exponents,
    #[serde(with = "rational_serde")]
    pub one_minus_ap: Rational,
    pub outcome: Outcome,
}

/// `[sup{1-ap : positive}, sup{1-ap : not zero}]` over a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionBracket {
    #[serde(with = "rational_serde")]
    pub lower: Rational,
    #[serde(with = "rational_serde")]
    pub upper: Rational,
    pub points: Vec<DimensionPoint>,
}

/// Exponent pairs `(ap/p, p)` for every `ap` and `p` given.
pub fn ap_grid(aps: &[Rational], ps: &[Rational]) -> Result<Vec<Exponents>> {
    let mut grid = Vec::new();
    for p in ps {
        for ap in aps {
            grid.push(Exponents::new(ap / p, p.clone())?);
        }
    }
    Ok(grid)
}

/// Bracket on the Hausdorff dimension of `D` via `dim = sup{1-ap : cap > 0}`.
/// An empty supremum is `0`.
pub fn dimension_profile(spec: &SequenceSpec, grid: &[Exponents]) -> Result<DimensionBracket> {
    if grid.is_empty() {
        return Err(Error::Domain("empty parameter grid".into()));
    }
    let points: Vec<DimensionPoint> = grid
        .iter()
        .map(|e| {
            let v = classify(spec, e)?;
            Ok(DimensionPoint { exponents: e.clone(), one_minus_ap: Rational::one() - e.ap(), outcome: v.outcome })
        })
        .collect::<Result<_>>()?;
    let sup = |keep: &dyn Fn(Outcome) -> bool| {
        points
            .iter()
            .filter(|pt| keep(pt.outcome))
            .map(|pt| pt.one_minus_ap.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    };
    Ok(DimensionBracket {
        lower: sup(&|o| o == Outcome::Positive),
        upper: sup(&|o| o != Outcome::Zero),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::parse_rational;
    use crate::phi::capacity_recursive;
    use crate::tree::CylinderSet;

    fn ex(a: &str, p: &str) -> Exponents {
        Exponents::parse(a, p).unwrap()
    }
    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn kappa_values() {
        let g = SequenceSpec::geometric(3);
        let ks: Vec<u64> = (1..=6).map(|n| g.kappa(n).unwrap().to_u64().unwrap()).collect();
        assert_eq!(ks, [1, 2, 3, 6, 11, 22]);
        let pw = SequenceSpec::Power { c: q("3/2"), beta: q("1/2") };
        // ⌈1.5 √n⌉ for n = 1..6
        let ks: Vec<u64> = (1..=6).map(|n| pw.kappa(n).unwrap().to_u64().unwrap()).collect();
        let expect: Vec<u64> = (1..=6).map(|n| (1.5 * (n as f64).sqrt()).ceil() as u64).collect();
        assert_eq!(ks, expect);
        // perfect squares land exactly: ⌈2 · 4^{1/2}⌉ = 4
        assert_eq!(SequenceSpec::Power { c: q("2"), beta: q("1/2") }.kappa(4).unwrap(), BigUint::from(4u32));
        let ep = SequenceSpec::ExpPoly { c: q("1"), beta: q("1"), gamma: q("1") };
        assert_eq!(ep.kappa(5).unwrap(), BigUint::from(160u32));
        let neg = SequenceSpec::Power { c: q("5"), beta: q("-1") };
        assert_eq!(neg.kappa(10).unwrap(), BigUint::from(1u32));
        assert_eq!(neg.kappa(2).unwrap(), BigUint::from(3u32));
        assert_eq!(SequenceSpec::geometric(1).kappa(200).unwrap(), BigUint::one() << 200u32);
        assert!(g.kappa(0).is_err());
    }

    #[test]
    fn custom_tables() {
        let spec = SequenceSpec::Custom { table: vec![(2, 9)], tail_rule: Box::new(SequenceSpec::geometric(1)) };
        assert_eq!(spec.kappa(2).unwrap(), BigUint::from(9u32));
        assert_eq!(spec.kappa(3).unwrap(), BigUint::from(8u32));
        let bad = SequenceSpec::Custom { table: vec![(2, 0)], tail_rule: Box::new(SequenceSpec::geometric(1)) };
        assert!(bad.validate().is_err());
        let nested = SequenceSpec::Custom { table: vec![], tail_rule: Box::new(spec) };
        assert!(nested.validate().is_err());
        assert!(SequenceSpec::geometric(0).validate().is_err());
        assert!(SequenceSpec::Linear { c: q("-1") }.validate().is_err());
    }

    #[test]
    fn json_schema() {
        let spec: SequenceSpec = serde_json::from_str(r#"{"family": "geometric", "m": 3}"#).unwrap();
        assert_eq!(spec, SequenceSpec::geometric(3));
        let spec: SequenceSpec =
            serde_json::from_str(r#"{"family":"power","c":"1","beta":1}"#).unwrap();
        assert_eq!(spec, SequenceSpec::Power { c: q("1"), beta: q("1") });
        let custom: SequenceSpec = serde_json::from_str(
            r#"{"family":"custom","table":[[1,4],[2,4]],"tail_rule":{"family":"exp_poly","c":"1","beta":"1","gamma":"1"}}"#,
        )
        .unwrap();
        let back: SequenceSpec = serde_json::from_str(&serde_json::to_string(&custom).unwrap()).unwrap();
        assert_eq!(back, custom);
    }

    #[test]
    fn classify_examples() {
        let v = classify(&SequenceSpec::geometric(3), &ex("1/2", "2")).unwrap();
        assert_eq!((v.outcome, v.condition), (Outcome::Positive, Some(Condition::I)));
        // κ_n^{-1} 2^n → 3
        assert!((v.evidence.last().unwrap().term_log2 - 3f64.log2()).abs() < 1e-6);
        let v = classify(&SequenceSpec::geometric(3), &ex("1/3", "3")).unwrap();
        assert_eq!((v.outcome, v.condition), (Outcome::Zero, Some(Condition::II)));
        let gap = SequenceSpec::Custom {
            table: vec![],
            tail_rule: Box::new(SequenceSpec::ExpPoly { c: q("1"), beta: q("1"), gamma: q("1") }),
        };
        let v = classify(&gap, &ex("1/2", "2")).unwrap();
        assert_eq!((v.outcome, v.condition), (Outcome::Indeterminate, None));
    }

    #[test]
    fn linear_balance() {
        // κ_n = n: positive for ap >= 1/2, zero below
        let spec = SequenceSpec::Power { c: q("1"), beta: q("1") };
        for (a, p, outcome) in [
            ("1/4", "2", Outcome::Positive),
            ("1/3", "2", Outcome::Positive),
            ("1/5", "2", Outcome::Zero),
            ("1/6", "3", Outcome::Positive),
            ("1/7", "3", Outcome::Zero),
        ] {
            assert_eq!(classify(&spec, &ex(a, p)).unwrap().outcome, outcome, "{a} {p}");
        }
    }

    #[test]
    fn full_set() {
        assert_eq!(dobinski_full(&ex("1/2", "2")).unwrap().outcome, Outcome::Positive);
        assert_eq!(dobinski_full(&ex("1/3", "3")).unwrap().outcome, Outcome::Zero);
        let v = dobinski_full(&ex("49/100", "2")).unwrap();
        assert_eq!((v.outcome, v.condition), (Outcome::Zero, Some(Condition::B)));
    }

    #[test]
    fn halves_are_symmetric() {
        let e = ex("1/3", "3");
        for n in 0..5 {
            for k in 1..5 {
                let zeros = capacity_recursive(&CylinderSet::dobinski_component(n, k, false), &e).value;
                let ones = capacity_recursive(&CylinderSet::dobinski_component(n, k, true), &e).value;
                assert!(zeros.rel_diff(ones) < 1e-14);
            }
        }
    }

    #[test]
    fn jump_at_two() {
        for (num, den) in [(11, 10), (3, 2), (7, 4), (2, 1), (201, 100), (5, 2), (3, 1), (9, 2), (5, 1)] {
            let p = Rational::new(num.into(), den.into());
            let expected = if p <= q("2") { Outcome::Positive } else { Outcome::Zero };
            let e = Exponents::critical(p.clone()).unwrap();
            assert_eq!(classify(&SequenceSpec::geometric(5), &e).unwrap().outcome, expected, "{p}");
        }
    }

    #[test]
    fn monotone_in_kappa() {
        let rank = |o: Outcome| match o {
            Outcome::Zero => 0,
            Outcome::Indeterminate => 1,
            Outcome::Positive => 2,
        };
        // each list is pointwise nondecreasing in κ_n
        let ladders = vec![
            vec![
                SequenceSpec::constant(1),
                SequenceSpec::Power { c: q("1"), beta: q("1/2") },
                SequenceSpec::Linear { c: q("1") },
                SequenceSpec::Linear { c: q("3") },
                SequenceSpec::Power { c: q("1"), beta: q("2") },
                SequenceSpec::geometric(4),
                SequenceSpec::geometric(1),
                SequenceSpec::ExpPoly { c: q("1"), beta: q("1"), gamma: q("1") },
                SequenceSpec::ExpPoly { c: q("1"), beta: q("3"), gamma: q("1") },
                SequenceSpec::ExpPoly { c: q("1"), beta: q("0"), gamma: q("2") },
            ],
        ];
        let grid = [ex("1/2", "2"), ex("1/3", "3"), ex("2/3", "3/2"), ex("1/4", "2"), ex("1/3", "2"), ex("1/5", "3")];
        for ladder in &ladders {
            for e in &grid {
                let ranks: Vec<i32> = ladder.iter().map(|s| rank(classify(s, e).unwrap().outcome)).collect();
                assert!(ranks.windows(2).all(|w| w[0] >= w[1]), "{e}: {ranks:?}");
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let b = capacity_bounds(&SequenceSpec::geometric(1), &ex("1/2", "2"), 30).unwrap();
        assert!(b.lower.value.to_f64() >= 1.0 / 3.0 - 1e-12);
        assert_eq!(b.upper, UpperBound::Unbounded);

        let e = ex("1/3", "3");
        let mut prev = f64::INFINITY;
        for n_max in [1, 5, 10, 20, 30] {
            let b = capacity_bounds(&SequenceSpec::geometric(1), &e, n_max).unwrap();
            let UpperBound::Bound(up) = b.upper else { panic!("expected a finite bound") };
            let up = up.value.to_f64();
            assert!(up < prev);
            prev = up;
        }
        assert!(prev < 1e-4);

        let spec = SequenceSpec::Linear { c: q("1") };
        let e = ex("1/4", "2");
        let b = capacity_bounds(&spec, &e, 1).unwrap();
        assert_eq!(b.outcome, Outcome::Positive);
        assert_eq!(b.lower.value, cap_component(1, &spec.kappa(1).unwrap(), &e).value);
    }

    #[test]
    fn upper_bounds_brute_force() {
        // compare with a long direct sum of the same terms
        let cases = [
            (SequenceSpec::geometric(2), ex("1/3", "3")),
            (SequenceSpec::ExpPoly { c: q("1"), beta: q("3"), gamma: q("1") }, ex("1/2", "2")),
            (SequenceSpec::Power { c: q("1"), beta: q("2") }, ex("1/4", "2")),
            (SequenceSpec::Linear { c: q("3") }, ex("1/4", "2")),
        ];
        for (spec, e) in cases {
            let b = capacity_bounds(&spec, &e, 3).unwrap();
            let UpperBound::Bound(up) = b.upper else { panic!() };
            let direct = (3..3000).fold(LogValue::ZERO, |acc, n| acc.add(cap_component(n, &spec.kappa(n).unwrap(), &e).value));
            assert!(up.value >= direct, "{spec:?}");
            assert!(up.value.rel_diff(direct) < 1e-3, "{spec:?} {up:?} {direct:?}");
            assert!(b.lower.value <= up.value);
        }
    }

    #[test]
    fn ratio_examples() {
        let e = ex("1/2", "2");
        let t = comparability_report(&e, 1, 200, &SequenceSpec::geometric(1)).unwrap();
        for r in &t.rows {
            assert!((r.ratio_log2.exp2() - 1.0 / 3.0).abs() < 1e-12);
        }
        let t = comparability_report(&e, 1, 30, &SequenceSpec::constant(1)).unwrap();
        for r in &t.rows {
            let expect = 1.0 / (2f64.powi(r.n as i32 + 1) + 1.0);
            assert!((r.ratio_log2.exp2() / expect - 1.0).abs() < 1e-12);
        }
        let t = comparability_report(&ex("1/4", "2"), 1, 100, &SequenceSpec::Power { c: q("1"), beta: q("1") }).unwrap();
        assert!(t.max_ratio_log2 - t.min_ratio_log2 < 2.0 * 10f64.log2());
    }

    #[test]
    fn dimension_examples() {
        let aps = [q("1/4"), q("1/2"), q("3/4"), q("1")];
        let grid = ap_grid(&aps, &[q("2"), q("3")]).unwrap();
        let b = dimension_profile(&SequenceSpec::geometric(2), &grid).unwrap();
        assert_eq!((b.lower.clone(), b.upper.clone()), (q("0"), q("0")));
        let b = dimension_profile(&SequenceSpec::Power { c: q("1"), beta: q("1") }, &grid).unwrap();
        assert_eq!(b.lower, q("1/2"));
        let small = ap_grid(&[q("1/100"), q("1/2"), q("1")], &[q("2")]).unwrap();
        let b = dimension_profile(&SequenceSpec::constant(1), &small).unwrap();
        assert_eq!((b.lower, b.upper), (q("99/100"), q("99/100")));
    }
}
