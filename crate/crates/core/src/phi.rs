//! The one-step combination map Φ, the full-tree constant, the exact
//! recursion engine for cylinder sets and the closed forms for `D(n, κ)`.
//!
//! For a node `x` with children values `s₋, s₊` the rooted capacity is
//!
//! ```text
//! cap(E, x) = S / (1 + (S / π(x))^{p'-1})^{p-1},   S = s₋ + s₊,
//! ```
//!
//! which is `Φ_r(S)` with `r = π(x)^{-(p'-1)}` and
//! `Φ_r(x) = x / (1 + r x^{p'-1})^{p-1}`.

use crate::exponents::{Branch, Exponents};
use crate::logvalue::{log2_1m_exp2, log2_exp2_m1, LogValue};
use crate::tree::{depth_weight, CylinderSet};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Recursion,
    ClosedForm,
    Oracle,
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Exact,
    Upper,
    Lower,
}

/// A capacity value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    #[serde(flatten)]
    pub value: LogValue,
    pub method: Method,
    pub bound_kind: BoundKind,
}

impl CapacityReport {
    pub fn exact(value: LogValue, method: Method) -> CapacityReport {
        CapacityReport { value, method, bound_kind: BoundKind::Exact }
    }
}

/// `Φ_r(x) = x / (1 + r x^{p'-1})^{p-1}` in the log domain.
pub fn phi_apply(r: LogValue, x: LogValue, e: &Exponents) -> LogValue {
    if x.is_zero() || r.is_zero() {
        return x;
    }
    let inner = r.mul(x.powf(e.q_f64()));
    x.div(inner.one_plus().powf(e.p_f64() - 1.0))
}

/// One step of the recursion at a node of weight `w`: `Φ_{w^{-(p'-1)}}(S)`.
pub fn combine_children(sum: LogValue, weight: LogValue, e: &Exponents) -> LogValue {
    phi_apply(weight.powf(-e.q_f64()), sum, e)
}

/// Log2 of the closed-form `c = 2^{-ap} (2^{ap(p'-1)} - 1)^{p-1}`.
fn full_tree_log2(e: &Exponents) -> f64 {
    let ap = e.ap_f64();
    -ap + (e.p_f64() - 1.0) * log2_exp2_m1(ap * e.q_f64())
}

/// `c = cap(∂T)`, the positive fixed point of `c = Φ_1(2^{ap} c)`.
pub fn full_tree_capacity(e: &Exponents) -> CapacityReport {
    CapacityReport::exact(LogValue::from_log2(full_tree_log2(e)), Method::FixedPoint)
}

/// Iterates `c ← Φ_1(2^{ap} c)` from `c = 1` until the relative change drops
/// below `1e-13`. Returns the last iterate and the number of steps.
///
/// The contraction rate at the fixed point is `2^{-ap(p'-1)}`, so for small
/// `ap` the stopping rule leaves an error of order `1e-13 / (1 - rate)`.
pub fn full_tree_capacity_iterated(e: &Exponents) -> (LogValue, usize) {
    let scale = LogValue::pow2(e.ap_f64());
    let mut c = LogValue::ONE;
    for k in 1..=10_000_000 {
        let next = phi_apply(LogValue::ONE, scale.mul(c), e);
        let change = next.rel_diff(c);
        c = next;
        if change < 1e-13 {
            return (c, k);
        }
    }
    (c, 10_000_000)
}

/// Capacity of the depth-`n` truncated tree with every depth-`n` leaf
/// required; a leaf alone has capacity `π(leaf)`.
pub fn truncated_tree_capacity(e: &Exponents, n: usize) -> LogValue {
    let mut v = depth_weight(n as f64, e);
    for d in (0..n).rev() {
        v = combine_children(v.add(v), depth_weight(d as f64, e), e);
    }
    v
}

/// Generic bottom-up evaluation over the spanning tree of `set`.
///
/// `base` gives the value at a generator and `weight` the node weight used by
/// the combination step; both receive the bit path of the node.
pub fn recursion_with<B, W>(set: &CylinderSet, e: &Exponents, base: B, weight: W) -> LogValue
where
    B: Fn(&[bool]) -> LogValue,
    W: Fn(&[bool]) -> LogValue,
{
    fn walk<B, W>(gens: &[crate::tree::Word], depth: usize, e: &Exponents, base: &B, weight: &W) -> LogValue
    where
        B: Fn(&[bool]) -> LogValue,
        W: Fn(&[bool]) -> LogValue,
    {
        // walk down single-child chains iteratively, then fold back up
        let mut depth = depth;
        let mut chain: Vec<usize> = Vec::new();
        loop {
            if gens.is_empty() {
                return LogValue::ZERO;
            }
            let first = gens[0].bits();
            if gens.len() == 1 && first.len() == depth {
                let mut v = base(first);
                for &d in chain.iter().rev() {
                    v = combine_children(v, weight(&first[..d]), e);
                }
                return v;
            }
            let split = gens.partition_point(|g| !g.bits()[depth]);
            if split == 0 || split == gens.len() {
                chain.push(depth);
                depth += 1;
                continue;
            }
            let s = walk(&gens[..split], depth + 1, e, base, weight)
                .add(walk(&gens[split..], depth + 1, e, base, weight));
            let mut v = combine_children(s, weight(&first[..depth]), e);
            for &d in chain.iter().rev() {
                v = combine_children(v, weight(&first[..d]), e);
            }
            return v;
        }
    }
    walk(set.generators(), 0, e, &base, &weight)
}

/// Exact `cap_π(E)` for a finite union of cylinders.
///
/// A generator `x` contributes `π(x) c`: the cylinder below it is a full
/// subtree whose weights are those of the root tree scaled by `π(x)`.
pub fn capacity_recursive(set: &CylinderSet, e: &Exponents) -> CapacityReport {
    let c = full_tree_capacity(e).value;
    let value = recursion_with(
        set,
        e,
        |x| depth_weight(x.len() as f64, e).mul(c),
        |x| depth_weight(x.len() as f64, e),
    );
    CapacityReport::exact(value, Method::Recursion)
}

/// Capacity of a finite tree in which each generator is a single leaf node.
///
/// This is the finite-depth analogue used to check the convex oracle.
pub fn capacity_finite<W>(leaves: &CylinderSet, e: &Exponents, weight: W) -> LogValue
where
    W: Fn(&[bool]) -> LogValue,
{
    recursion_with(leaves, e, &weight, &weight)
}

/// `log2 k` for `k` of any size.
pub fn biguint_log2(k: &BigUint) -> f64 {
    let bits = k.bits();
    if bits <= 1000 {
        return k.to_f64().map_or(f64::INFINITY, f64::log2);
    }
    let shift = bits - 64;
    let top = (k >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// `k` as a double, `inf` past the range.
pub fn biguint_f64(k: &BigUint) -> f64 {
    k.to_f64().unwrap_or(f64::INFINITY)
}

/// The Φ index `σ(n, κ)` of the composition producing `cap D(n, κ)`:
///
/// ```text
/// σ = Σ_{m=1}^{n} 2^{(p'-1)[(n+1-m) + (m-1)(1-ap)]} + Σ_{m=n+1}^{n+κ} 2^{(p'-1)(m-1)(1-ap)},
/// ```
///
/// evaluated by the branch's geometric-sum closed form.
pub fn sigma(n: u64, kappa: &BigUint, e: &Exponents) -> LogValue {
    let q = e.q_f64();
    let nf = n as f64;
    match e.branch() {
        Branch::Critical => {
            // (2^{nq} - 1) / (1 - 2^{-q}) + κ
            let head = if n == 0 {
                LogValue::ZERO
            } else {
                LogValue::from_log2(log2_exp2_m1(nf * q) - log2_1m_exp2(-q))
            };
            head.add(LogValue::from_log2(biguint_log2(kappa)))
        }
        Branch::Subcritical => {
            let ap = e.ap_f64();
            let b = e.one_minus_ap_f64();
            // 2^{nq} (1 - 2^{-nqap}) / (1 - 2^{-qap})
            let head = if n == 0 {
                LogValue::ZERO
            } else {
                LogValue::from_log2(nf * q + log2_1m_exp2(-nf * q * ap) - log2_1m_exp2(-q * ap))
            };
            // 2^{nqb} (2^{κqb} - 1) / (2^{qb} - 1)
            let k = biguint_f64(kappa);
            let tail = LogValue::from_log2(nf * q * b + log2_exp2_m1(k * q * b) - log2_exp2_m1(q * b));
            head.add(tail)
        }
    }
}

/// `σ(n, κ)` by summing its terms one at a time.
pub fn sigma_direct(n: u64, kappa: u64, e: &Exponents) -> LogValue {
    let q = e.q_f64();
    let b = e.one_minus_ap_f64();
    let nf = n as f64;
    let head = (1..=n).fold(LogValue::ZERO, |acc, m| {
        let m = m as f64;
        acc.add(LogValue::pow2(q * ((nf + 1.0 - m) + (m - 1.0) * b)))
    });
    (n + 1..=n + kappa).fold(head, |acc, m| acc.add(LogValue::pow2(q * (m as f64 - 1.0) * b)))
}

/// `cap D(n, κ)` from the closed form.
///
/// With `X = apn - (1-ap)κ` and `τ = σ π(n+κ)^{p'-1}` this is
/// `2^X c / (1 + c^{p'-1} τ)^{p-1}`, i.e. `2^n Φ_σ(π(n+κ) c)`, written so that
/// no intermediate quantity leaves the double exponent range.
pub fn cap_component(n: u64, kappa: &BigUint, e: &Exponents) -> CapacityReport {
    let c = full_tree_capacity(e).value;
    let q = e.q_f64();
    let nf = n as f64;
    let value = match e.branch() {
        Branch::Critical => {
            let s = sigma(n, kappa, e);
            phi_apply(s, c, e).mul(LogValue::pow2(nf))
        }
        Branch::Subcritical => {
            let ap = e.ap_f64();
            let b = e.one_minus_ap_f64();
            let k = biguint_f64(kappa);
            let x = ap * nf - b * k;
            if x == f64::NEG_INFINITY {
                LogValue::ZERO
            } else {
                let head = if n == 0 {
                    LogValue::ZERO
                } else {
                    LogValue::from_log2(q * x + log2_1m_exp2(-q * ap * nf) - log2_1m_exp2(-q * ap))
                };
                let tail = LogValue::from_log2(log2_1m_exp2(-q * b * k) - log2_exp2_m1(q * b));
                let tau = head.add(tail);
                LogValue::pow2(x).mul(phi_apply(tau, c, e))
            }
        }
    };
    CapacityReport::exact(value, Method::ClosedForm)
}

/// The literal composition `2^n Φ_σ(π(n+κ) c)`; finite only while `σ` and
/// `π(n+κ)` stay within range.
pub fn cap_component_composed(n: u64, kappa: &BigUint, e: &Exponents) -> LogValue {
    let c = full_tree_capacity(e).value;
    let depth = n as f64 + biguint_f64(kappa);
    let base = depth_weight(depth, e).mul(c);
    phi_apply(sigma(n, kappa, e), base, e).mul(LogValue::pow2(n as f64))
}
