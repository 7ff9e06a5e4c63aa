//! The circle `𝕋 = [0,1)`: digit run lengths, the tangent product, and Riesz
//! potentials for the chord distance `|x - y| = 2|sin π(x - y)|`.

use crate::error::{Error, Result};
use crate::exponents::{format_rational, rational_to_f64, Exponents, Rational};
use crate::quadrature::integrate;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Unknown digits after the end of an explicit list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Censored,
    Periodic(Vec<bool>),
}

/// A binary expansion `x = 0.a₁a₂…`.
///
/// Dyadic rationals use the terminating expansion, except `x = 1 = 0.111…`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigitStream {
    Rational(#[serde(with = "crate::exponents::rational_serde")] Rational),
    Digits { prefix: Vec<bool>, tail: Tail },
}

/// `sₙ`, the length of the constant digit run starting at `aₙ`, minus one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunLength {
    Finite(u64),
    Infinite,
    /// The run reaches the end of the known digits; the value is a lower bound.
    Censored(u64),
}

impl DigitStream {
    pub fn rational(x: Rational) -> Result<DigitStream> {
        if x.is_negative() || x > Rational::one() {
            return Err(Error::Domain(format!("x = {} is outside [0, 1]", format_rational(&x))));
        }
        Ok(DigitStream::Rational(x))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DigitStream::Rational(x) => DigitStream::rational(x.clone()).map(|_| ()),
            DigitStream::Digits { tail: Tail::Periodic(p), .. } if p.is_empty() => {
                Err(Error::Domain("periodic tail must be nonempty".into()))
            }
            DigitStream::Digits { .. } => Ok(()),
        }
    }

    pub fn is_dyadic(&self) -> bool {
        match self {
            DigitStream::Rational(x) => is_dyadic(x),
            DigitStream::Digits { tail: Tail::Periodic(p), .. } => p.iter().all(|&d| d == p[0]),
            DigitStream::Digits { tail: Tail::Censored, .. } => false,
        }
    }

    /// The first `len` digits, or fewer if the stream is a censored list, and
    /// the position from which the digits are constant forever, if any.
    fn digits(&self, len: usize) -> (Vec<bool>, Option<usize>) {
        match self {
            DigitStream::Rational(x) => {
                if x.is_one() {
                    return (vec![true; len], Some(1));
                }
                let den = x.denom().clone();
                let mut k = x.numer().clone();
                let mut out = Vec::with_capacity(len);
                let mut constant_from = None;
                for i in 0..len {
                    if k.is_zero() {
                        constant_from = Some(i + 1);
                        out.resize(len, false);
                        break;
                    }
                    k <<= 1;
                    let bit = k >= den;
                    if bit {
                        k -= &den;
                    }
                    out.push(bit);
                }
                if constant_from.is_none() && k.is_zero() {
                    constant_from = Some(len + 1);
                }
                (out, constant_from)
            }
            DigitStream::Digits { prefix, tail } => match tail {
                Tail::Censored => (prefix.iter().copied().take(len).collect(), None),
                Tail::Periodic(p) => {
                    let out: Vec<bool> = prefix.iter().chain(p.iter().cycle()).copied().take(len).collect();
                    let constant_from = self.is_dyadic().then(|| {
                        let d = p[0];
                        prefix.iter().rposition(|&b| b != d).map_or(1, |i| i + 2)
                    });
                    (out, constant_from)
                }
            },
        }
    }

    /// Digits needed beyond position `n` to settle every finite run starting
    /// at or before `n`.
    fn lookahead(&self) -> usize {
        match self {
            // a run of r equal digits puts 2^k x within 2^{-r} of an integer
            DigitStream::Rational(x) => x.denom().bits() as usize + 2,
            DigitStream::Digits { prefix, tail: Tail::Periodic(p) } => prefix.len() + p.len() + 1,
            DigitStream::Digits { .. } => 0,
        }
    }
}

fn is_dyadic(x: &Rational) -> bool {
    let d = x.denom();
    (d & (d - BigInt::one())).is_zero()
}

/// `s₁, …, s_N`.
pub fn run_lengths(x: &DigitStream, big_n: u64) -> Result<Vec<RunLength>> {
    if big_n < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    x.validate()?;
    let n = big_n as usize;
    let (digits, constant_from) = x.digits(n + x.lookahead());
    let mut out = Vec::with_capacity(n);
    // run end (exclusive, 0-based) for each start, computed right to left
    let mut end = vec![0usize; digits.len() + 1];
    for i in (0..digits.len()).rev() {
        end[i] = if i + 1 < digits.len() && digits[i + 1] == digits[i] { end[i + 1] } else { i + 1 };
    }
    for pos in 1..=n {
        if constant_from.is_some_and(|c| pos >= c) {
            out.push(RunLength::Infinite);
            continue;
        }
        let i = pos - 1;
        if i >= digits.len() {
            out.push(RunLength::Censored(0));
            continue;
        }
        let len = (end[i] - i) as u64;
        if end[i] == digits.len() {
            out.push(RunLength::Censored(len - 1));
        } else {
            out.push(RunLength::Finite(len - 1));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Score {
    Finite { value: f64 },
    Infinite,
}

impl Score {
    pub fn value(&self) -> f64 {
        match self {
            Score::Finite { value } => *value,
            Score::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub score: Score,
    pub horizon: u64,
    /// Index attaining the score.
    pub argmax: Option<u64>,
    pub note: String,
}

pub const MEMBERSHIP_NOTE: &str =
    "finite-horizon proxy for limsup s_n/2^n; membership in the Dobinski set is a tail property and cannot be decided from finitely many digits";

/// `max_{n ≤ N} sₙ / 2ⁿ` over uncensored run lengths; `∞` for dyadic points.
pub fn membership_score(x: &DigitStream, big_n: u64) -> Result<Membership> {
    let runs = run_lengths(x, big_n)?;
    let note = MEMBERSHIP_NOTE.to_string();
    if x.is_dyadic() {
        return Ok(Membership { score: Score::Infinite, horizon: big_n, argmax: None, note });
    }
    let mut best = (0.0, None);
    for (i, r) in runs.iter().enumerate() {
        if let RunLength::Finite(s) = r {
            let v = *s as f64 * (-(i as f64 + 1.0)).exp2();
            if v > best.0 {
                best = (v, Some(i as u64 + 1));
            }
        }
    }
    Ok(Membership { score: Score::Finite { value: best.0 }, horizon: big_n, argmax: best.1, note })
}

pub const PRODUCT_MAX_TERMS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductIdentity {
    pub terms: u64,
    /// `∏_{n<N} |tan 2ⁿπx|^{2^{-n}}`
    pub lhs: f64,
    /// `(2 sin πx)²`
    pub rhs: f64,
    pub lhs_log2: f64,
}

/// Partial tangent product along the exact doubling orbit of `x`.
pub fn product_identity(x: &Rational, big_n: u64) -> Result<ProductIdentity> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(Error::Domain(format!("x = {} is outside (0, 1)", format_rational(x))));
    }
    if big_n > PRODUCT_MAX_TERMS {
        return Err(Error::Domain(format!("N = {big_n} exceeds {PRODUCT_MAX_TERMS}")));
    }
    if is_dyadic(x) {
        return Err(Error::DyadicTangentPole(format_rational(x)));
    }
    let den = x.denom().clone();
    let mut k = x.numer().clone();
    let mut sum = 0.0;
    for n in 0..big_n {
        let frac = rational_to_f64(&Rational::new(k.clone(), den.clone()));
        sum += (-(n as f64)).exp2() * (PI * frac).tan().abs().log2();
        k = (k << 1usize).mod_floor(&den);
    }
    let s = (PI * rational_to_f64(x)).sin();
    Ok(ProductIdentity { terms: big_n, lhs: sum.exp2(), rhs: 4.0 * s * s, lhs_log2: sum })
}

/// A nonnegative density, constant on each of the `2^depth` dyadic arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicDensity {
    pub depth: u32,
    pub values: Vec<f64>,
}

pub const MAX_DENSITY_DEPTH: u32 = 16;

impl DyadicDensity {
    pub fn new(depth: u32, values: Vec<f64>) -> Result<DyadicDensity> {
        let f = DyadicDensity { depth, values };
        f.validate()?;
        Ok(f)
    }

    pub fn constant(c: f64) -> DyadicDensity {
        DyadicDensity { depth: 0, values: vec![c] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth > MAX_DENSITY_DEPTH {
            return Err(Error::Domain(format!("density depth {} exceeds {MAX_DENSITY_DEPTH}", self.depth)));
        }
        if self.values.len() != 1usize << self.depth {
            return Err(Error::Domain(format!(
                "depth {} needs {} values, got {}",
                self.depth,
                1usize << self.depth,
                self.values.len()
            )));
        }
        if let Some(v) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!("density value {v} is not finite and nonnegative")));
        }
        Ok(())
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// A quadrature result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

pub const DEFAULT_TOL: f64 = 1e-10;

fn check_a(a: &Rational) -> Result<f64> {
    if !a.is_positive() || *a >= Rational::one() {
        return Err(Error::Domain(format!("a = {} is outside (0, 1)", format_rational(a))));
    }
    Ok(rational_to_f64(a))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Domain(format!("tolerance {tol} is outside (0, 1e-3]")));
    }
    Ok(())
}

/// `∫_α^β (2 sin πu)^{a-1} du` for `0 ≤ α < β ≤ 1/2`.
///
/// With `v = u^a` the integrand becomes `(2π)^{a-1}/a · g(v^{1/a})` where
/// `g(u) = (sin πu / πu)^{a-1}` is smooth and about 1 near the origin.
fn kernel_half(a: f64, alpha: f64, beta: f64, tol: f64) -> Estimate {
    let scale = (2.0 * PI).powf(a - 1.0) / a;
    let g = |v: f64| {
        let z = PI * v.powf(1.0 / a);
        let sinc = if z < 1e-4 { 1.0 - z * z / 6.0 } else { z.sin() / z };
        sinc.powf(a - 1.0)
    };
    let q = integrate(g, alpha.powf(a), beta.powf(a), tol / scale);
    Estimate { value: scale * q.value, error: scale * q.error }
}

/// `∫_α^β (2|sin πu|)^{a-1} du` for `0 ≤ α < β ≤ 1`.
fn kernel_unit(a: f64, alpha: f64, beta: f64, tol: f64) -> Estimate {
    let mut out = Estimate { value: 0.0, error: 0.0 };
    let mut add = |e: Estimate| {
        out.value += e.value;
        out.error += e.error;
    };
    if alpha < 0.5 {
        add(kernel_half(a, alpha, beta.min(0.5), tol));
    }
    if beta > 0.5 {
        add(kernel_half(a, 1.0 - beta, (1.0 - alpha).min(0.5), tol));
    }
    out
}

/// `∫_lo^hi (2|sin π(t - y)|)^{a-1} dt` for an arc of length at most 1.
fn kernel_arc(a: f64, y: f64, lo: f64, hi: f64, tol: f64) -> Estimate {
    let width = hi - lo;
    let alpha = (lo - y).rem_euclid(1.0);
    let beta = alpha + width;
    if beta <= 1.0 {
        kernel_unit(a, alpha, beta, tol)
    } else {
        let (l, r) = (kernel_unit(a, alpha, 1.0, tol), kernel_unit(a, 0.0, beta - 1.0, tol));
        Estimate { value: l.value + r.value, error: l.error + r.error }
    }
}

/// `I_a f(y) = ∫₀¹ f(t) (2|sin π(y - t)|)^{a-1} dt` to relative tolerance `tol`.
pub fn riesz_potential_tol(f: &DyadicDensity, y: f64, a: &Rational, tol: f64) -> Result<Estimate> {
    let af = check_a(a)?;
    check_tol(tol)?;
    f.validate()?;
    if !(0.0..1.0).contains(&y) {
        return Err(Error::Domain(format!("y = {y} is outside [0, 1)")));
    }
    let width = (-(f.depth as f64)).exp2();
    let mut out = Estimate { value: 0.0, error: 0.0 };
    for (j, &v) in f.values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let lo = j as f64 * width;
        // the kernel is at least 2^{a-1} >= 1/2, so this is relative per arc
        let arc = kernel_arc(af, y, lo, lo + width, 0.5 * tol * width);
        out.value += v * arc.value;
        out.error += v * arc.error;
    }
    Ok(out)
}

pub fn riesz_potential(f: &DyadicDensity, y: f64, a: &Rational) -> Result<Estimate> {
    riesz_potential_tol(f, y, a, DEFAULT_TOL)
}

/// Potentials at several points, evaluated in parallel.
pub fn riesz_potentials(f: &DyadicDensity, ys: &[f64], a: &Rational, tol: f64) -> Result<Vec<Estimate>> {
    ys.par_iter().map(|&y| riesz_potential_tol(f, y, a, tol)).collect()
}

/// `∫₀¹ (2 sin πt)^{a-1} dt`.
pub fn kernel_integral(a: &Rational, tol: f64) -> Result<Estimate> {
    let af = check_a(a)?;
    check_tol(tol)?;
    let half = kernel_half(af, 0.0, 0.5, 0.5 * tol);
    Ok(Estimate { value: 2.0 * half.value, error: 2.0 * half.error })
}

/// `R_{a,p}(𝕋) = (∫₀¹ (2 sin πt)^{a-1} dt)^{-p}` for `0 < a < 1`, `p > 1`.
///
/// Unlike the tree side this does not need `ap ≤ 1`.
pub fn circle_full_capacity_tol(a: &Rational, p: &Rational, tol: f64) -> Result<Estimate> {
    if *p <= Rational::one() {
        return Err(Error::Domain(format!("p = {} must exceed 1", format_rational(p))));
    }
    let k = kernel_integral(a, tol)?;
    let p = rational_to_f64(p);
    let value = k.value.powf(-p);
    Ok(Estimate { value, error: value * p * k.error / k.value })
}

pub fn circle_full_capacity(a: &Rational, p: &Rational) -> Result<Estimate> {
    circle_full_capacity_tol(a, p, DEFAULT_TOL)
}

/// [`circle_full_capacity`] for a tree-side exponent pair.
pub fn circle_capacity_of(e: &Exponents) -> Result<Estimate> {
    circle_full_capacity(e.a(), e.p())
}

/// Preperiod and period of the binary expansion of a non-dyadic rational.
pub fn expansion_period(x: &Rational) -> Option<(u64, u64)> {
    if is_dyadic(x) || x.is_negative() || *x > Rational::one() {
        return None;
    }
    let den = x.denom().clone();
    let twos = den.trailing_zeros().unwrap_or(0);
    let odd = &den >> twos as usize;
    let mut order = 1u64;
    let mut r = BigInt::from(2).mod_floor(&odd);
    while !r.is_one() {
        r = (r << 1usize).mod_floor(&odd);
        order += 1;
        if order > 1 << 24 {
            return None;
        }
    }
    Some((twos, order.to_u64()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::parse_rational;
    use statrs::function::gamma::gamma;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }
    fn stream(s: &str) -> DigitStream {
        DigitStream::rational(q(s)).unwrap()
    }

    #[test]
    fn run_length_examples() {
        assert!(run_lengths(&stream("1/3"), 50).unwrap().iter().all(|r| *r == RunLength::Finite(0)));
        let r = run_lengths(&stream("7/16"), 10).unwrap();
        assert_eq!(&r[..4], &[RunLength::Finite(0), RunLength::Finite(2), RunLength::Finite(1), RunLength::Finite(0)]);
        assert!(r[4..].iter().all(|r| *r == RunLength::Infinite));
        assert!(run_lengths(&stream("0"), 10).unwrap().iter().all(|r| *r == RunLength::Infinite));
        assert!(run_lengths(&stream("1"), 10).unwrap().iter().all(|r| *r == RunLength::Infinite));
        let r = run_lengths(&stream("1/2"), 3).unwrap();
        assert_eq!(r, [RunLength::Finite(0), RunLength::Infinite, RunLength::Infinite]);
        assert!(run_lengths(&stream("1/3"), 0).is_err());
        assert!(DigitStream::rational(q("3/2")).is_err());
    }

    #[test]
    fn censored_lists() {
        let x = DigitStream::Digits { prefix: vec![false, false, true, true, true], tail: Tail::Censored };
        let r = run_lengths(&x, 7).unwrap();
        assert_eq!(
            r,
            [
                RunLength::Finite(1),
                RunLength::Finite(0),
                RunLength::Censored(2),
                RunLength::Censored(1),
                RunLength::Censored(0),
                RunLength::Censored(0),
                RunLength::Censored(0),
            ]
        );
        let m = membership_score(&x, 7).unwrap();
        assert_eq!(m.score, Score::Finite { value: 0.5 });
    }

    #[test]
    fn periodic_lists_match_rationals() {
        // 1/5 = 0.(0011), 7/16 = 0.0111(0)
        let x = DigitStream::Digits { prefix: vec![], tail: Tail::Periodic(vec![false, false, true, true]) };
        assert_eq!(run_lengths(&x, 40).unwrap(), run_lengths(&stream("1/5"), 40).unwrap());
        let y = DigitStream::Digits { prefix: vec![false, true, true, true], tail: Tail::Periodic(vec![false]) };
        assert!(y.is_dyadic());
        assert_eq!(run_lengths(&y, 12).unwrap(), run_lengths(&stream("7/16"), 12).unwrap());
    }

    #[test]
    fn membership_examples() {
        assert_eq!(membership_score(&stream("1/3"), 40).unwrap().score, Score::Finite { value: 0.0 });
        assert_eq!(membership_score(&stream("1/2"), 40).unwrap().score, Score::Infinite);
        let m = membership_score(&stream("1/5"), 32).unwrap();
        assert_eq!((m.score, m.argmax), (Score::Finite { value: 0.5 }, Some(1)));
        assert!(m.note.contains("tail property"));
    }

    #[test]
    fn run_lengths_share_the_period() {
        for d in 1u64..=64 {
            for k in 0..=d {
                let x = Rational::new(k.into(), d.into());
                let s = run_lengths(&DigitStream::Rational(x.clone()), 200).unwrap();
                let Some((pre, per)) = expansion_period(&x) else {
                    assert!(s.iter().skip(7).all(|r| *r == RunLength::Infinite), "{x}");
                    continue;
                };
                assert!(s.iter().all(|r| matches!(r, RunLength::Finite(_))));
                for n in pre as usize..200 - per as usize {
                    assert_eq!(s[n], s[n + per as usize], "{x} at {}", n + 1);
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let p = product_identity(&q("1/3"), 40).unwrap();
        assert!((p.lhs - 3.0).abs() < 1e-9 && (p.rhs - 3.0).abs() < 1e-12);
        let p = product_identity(&q("1/5"), 40).unwrap();
        assert!((p.rhs - (5.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((p.lhs - p.rhs).abs() < 1e-6);
        assert!(matches!(product_identity(&q("1/2"), 10), Err(Error::DyadicTangentPole(_))));
        assert!(matches!(product_identity(&q("3/8"), 10), Err(Error::DyadicTangentPole(_))));
        assert!(product_identity(&q("1/3"), 65).is_err());
        assert!(product_identity(&q("0"), 5).is_err());
    }

    #[test]
    fn product_tail_contracts_per_period() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 20 {
            let d: u64 = rng.random_range(3..=10_000);
            let k: u64 = rng.random_range(1..d);
            let x = Rational::new(k.into(), d.into());
            let Some((pre, per)) = expansion_period(&x) else { continue };
            done += 1;
            let gap = |n: u64| {
                let p = product_identity(&x, n).unwrap();
                (p.lhs - p.rhs).abs()
            };
            assert!(gap(48) < 1e-5, "{x}: {}", gap(48));
            // the log-gap is an exact geometric tail: T_{N+P} = 2^{-P} T_N
            let mut n = pre + 1;
            while n + per <= 48 {
                assert!(gap(n + per) <= gap(n) * (1.0 + 1e-9) + 1e-14, "{x} at {n}");
                n += 1;
            }
        }
    }

    #[test]
    fn kernel_integral_closed_form() {
        for a in ["1/2", "1/4", "1/10", "3/4", "255/256", "1/3"] {
            let af = rational_to_f64(&q(a));
            let exact = gamma(af) / gamma((af + 1.0) / 2.0).powi(2);
            let k = kernel_integral(&q(a), DEFAULT_TOL).unwrap();
            assert!((k.value / exact - 1.0).abs() < 1e-10, "{a}: {} vs {exact}", k.value);
        }
    }

    #[test]
    fn capacity_examples() {
        let half = circle_capacity_of(&Exponents::parse("1/2", "2").unwrap()).unwrap().value;
        let exact = (gamma(0.5) / gamma(0.75).powi(2)).powi(-2);
        assert!((half / exact - 1.0).abs() < 1e-10);
        assert!((half - 0.717_7).abs() < 1e-3);
        let near_one = circle_full_capacity(&q("255/256"), &q("2")).unwrap().value;
        assert!((near_one - 1.0).abs() < 0.02);
        let quarter = circle_full_capacity(&q("1/4"), &q("2")).unwrap().value;
        assert!(quarter < half);
        assert!(circle_full_capacity_tol(&q("1/2"), &q("2"), 0.0).is_err());
        assert!(circle_full_capacity(&q("1/2"), &q("1")).is_err());
    }

    #[test]
    fn tolerance_halving() {
        for (a, p) in [("1/2", "2"), ("1/3", "3"), ("1/8", "2"), ("1/2", "3/2"), ("9/10", "4")] {
            let v = circle_full_capacity_tol(&q(a), &q(p), 1e-8).unwrap().value;
            let w = circle_full_capacity_tol(&q(a), &q(p), 5e-9).unwrap().value;
            assert!((v / w - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn potentials() {
        let a = q("1/2");
        let zero = DyadicDensity::new(3, vec![0.0; 8]).unwrap();
        assert_eq!(riesz_potential(&zero, 0.3, &a).unwrap().value, 0.0);
        let k = kernel_integral(&a, DEFAULT_TOL).unwrap().value;
        let ys: Vec<f64> = (0..64).map(|i| (i as f64 + 0.37) / 64.0).collect();
        let c = DyadicDensity::new(2, vec![2.5; 4]).unwrap();
        for v in riesz_potentials(&c, &ys, &a, DEFAULT_TOL).unwrap() {
            assert!((v.value - 2.5 * k).abs() < 1e-7);
        }
        let left = DyadicDensity::new(1, vec![1.0, 0.0]).unwrap();
        let right = DyadicDensity::new(1, vec![0.0, 1.0]).unwrap();
        for y in [0.0, 0.25, 0.5, 0.7, 0.999] {
            let s = riesz_potential(&left, y, &a).unwrap().value + riesz_potential(&right, y, &a).unwrap().value;
            assert!((s - k).abs() < 1e-8, "{y}");
        }
    }

    #[test]
    fn density_rejects() {
        assert!(DyadicDensity::new(2, vec![1.0; 3]).is_err());
        assert!(DyadicDensity::new(1, vec![1.0, -1.0]).is_err());
        assert!(DyadicDensity::new(1, vec![1.0, f64::NAN]).is_err());
        assert_eq!(DyadicDensity::new(2, vec![1.0, 2.0, 3.0, 2.0]).unwrap().integral(), 2.0);
        let f = DyadicDensity::constant(1.0);
        assert!(riesz_potential(&f, 0.5, &q("1")).is_err());
        assert!(riesz_potential(&f, 1.0, &q("1/2")).is_err());
    }
}
