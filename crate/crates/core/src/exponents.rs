//! The exponent pair `(a, p)` in exact rational arithmetic.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

pub type Rational = BigRational;

/// Parses `"num/den"` or a plain integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse { what: "rational", input: s.to_string() };
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Hölder conjugate `p / (p - 1)`.
pub fn conjugate(p: &Rational) -> Result<Rational> {
    if *p <= Rational::one() {
        return Err(Error::Domain(format!("conjugate needs p > 1, got {}", format_rational(p))));
    }
    Ok(p / (p - Rational::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `a p = 1`
    Critical,
    /// `a p < 1`
    Subcritical,
}

/// Validated exponents with `a > 0`, `p > 1` and `a p <= 1`.
///
/// Floating-point copies of the derived quantities are cached; the branch
/// flag is decided on the exact rationals.
#[derive(Clone, PartialEq)]
pub struct Exponents {
    a: Rational,
    p: Rational,
    p_prime: Rational,
    ap: Rational,
    branch: Branch,
    af: f64,
    pf: f64,
    qf: f64,
    apf: f64,
    one_minus_apf: f64,
}

impl Exponents {
    pub fn new(a: Rational, p: Rational) -> Result<Exponents> {
        if !a.is_positive() {
            return Err(Error::Domain(format!("a must be positive, got {}", format_rational(&a))));
        }
        let p_prime = conjugate(&p)?;
        let ap = &a * &p;
        let branch = match ap.cmp(&Rational::one()) {
            std::cmp::Ordering::Equal => Branch::Critical,
            std::cmp::Ordering::Less => Branch::Subcritical,
            std::cmp::Ordering::Greater => {
                return Err(Error::Domain(format!(
                    "need a*p <= 1, got a*p = {}",
                    format_rational(&ap)
                )))
            }
        };
        let q = &p_prime - Rational::one();
        let one_minus_ap = Rational::one() - &ap;
        Ok(Exponents {
            af: rational_to_f64(&a),
            pf: rational_to_f64(&p),
            qf: rational_to_f64(&q),
            apf: rational_to_f64(&ap),
            one_minus_apf: rational_to_f64(&one_minus_ap),
            a,
            p,
            p_prime,
            ap,
            branch,
        })
    }

    /// Parses both exponents from `"num/den"` strings.
    pub fn parse(a: &str, p: &str) -> Result<Exponents> {
        Exponents::new(parse_rational(a)?, parse_rational(p)?)
    }

    /// The critical pair `(1/p, p)`.
    pub fn critical(p: Rational) -> Result<Exponents> {
        if p.is_zero() {
            return Err(Error::Domain("p must be nonzero".into()));
        }
        Exponents::new(p.recip(), p)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }
    pub fn p(&self) -> &Rational {
        &self.p
    }
    pub fn p_prime(&self) -> &Rational {
        &self.p_prime
    }
    pub fn ap(&self) -> &Rational {
        &self.ap
    }
    pub fn branch(&self) -> Branch {
        self.branch
    }
    pub fn is_critical(&self) -> bool {
        self.branch == Branch::Critical
    }

    pub fn a_f64(&self) -> f64 {
        self.af
    }
    pub fn p_f64(&self) -> f64 {
        self.pf
    }
    /// `p' - 1 = 1/(p - 1)`.
    pub fn q_f64(&self) -> f64 {
        self.qf
    }
    pub fn ap_f64(&self) -> f64 {
        self.apf
    }
    pub fn one_minus_ap_f64(&self) -> f64 {
        self.one_minus_apf
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponents(a={}, p={})", format_rational(&self.a), format_rational(&self.p))
    }
}

impl fmt::Display for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={} p={}", format_rational(&self.a), format_rational(&self.p))
    }
}

#[derive(Serialize, Deserialize)]
struct ExponentsRepr {
    a: String,
    p: String,
    #[serde(default, skip_deserializing)]
    p_prime: String,
    #[serde(default, skip_deserializing)]
    branch: Option<Branch>,
}

impl Serialize for Exponents {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExponentsRepr {
            a: format_rational(&self.a),
            p: format_rational(&self.p),
            p_prime: format_rational(&self.p_prime),
            branch: Some(self.branch),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exponents {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ExponentsRepr::deserialize(d)?;
        Exponents::parse(&repr.a, &repr.p).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing a [`Rational`] as a `"num/den"` string.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Literal {
        Text(String),
        Int(i64),
    }

    /// Accepts `"num/den"` strings and bare JSON integers.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        match Literal::deserialize(d)? {
            Literal::Text(s) => parse_rational(&s).map_err(serde::de::Error::custom),
            Literal::Int(i) => Ok(Rational::from_integer(i.into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(&q("2")).unwrap(), q("2"));
        assert_eq!(conjugate(&q("3")).unwrap(), q("3/2"));
        assert_eq!(conjugate(&q("4/3")).unwrap(), q("4"));
        assert!(matches!(conjugate(&q("1")), Err(Error::Domain(_))));
        assert!(matches!(conjugate(&q("1/2")), Err(Error::Domain(_))));
    }

    #[test]
    fn parsing() {
        assert_eq!(q(" 6/4 "), q("3/2"));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn branch_and_domain() {
        assert_eq!(Exponents::parse("1/2", "2").unwrap().branch(), Branch::Critical);
        assert_eq!(Exponents::parse("1/4", "2").unwrap().branch(), Branch::Subcritical);
        assert!(Exponents::parse("3/4", "2").is_err());
        assert!(Exponents::parse("0", "2").is_err());
        assert!(Exponents::parse("1/2", "1").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let e = Exponents::parse("1/3", "3").unwrap();
        let js = serde_json::to_string(&e).unwrap();
        assert_eq!(js, r#"{"a":"1/3","p":"3","p_prime":"3/2","branch":"Critical"}"#);
        let back: Exponents = serde_json::from_str(&js).unwrap();
        assert_eq!(back, e);
    }

    proptest! {
        #[test]
        fn conjugate_identities(n in 2i64..400, d in 1i64..200) {
            prop_assume!(n > d);
            let p = Rational::new(n.into(), d.into());
            let pp = conjugate(&p).unwrap();
            prop_assert_eq!((&p - Rational::one()) * (&pp - Rational::one()), Rational::one());
            prop_assert_eq!(conjugate(&pp).unwrap(), p);
        }

        #[test]
        fn critical_flag_is_exact(n in 2i64..400, d in 1i64..200, en in 1i64..1000, ed in 1000i64..1_000_000) {
            prop_assume!(n > d);
            let p = Rational::new(n.into(), d.into());
            let e = Exponents::critical(p.clone()).unwrap();
            prop_assert_eq!(e.branch(), Branch::Critical);
            let eps = Rational::new(en.into(), ed.into());
            let below = Exponents::new(p.recip() - &eps, p.clone());
            if let Ok(below) = below {
                prop_assert_eq!(below.branch(), Branch::Subcritical);
            }
            prop_assert!(Exponents::new(p.recip() + eps, p).is_err());
        }
    }
}
