//! Finite binary words, the boundary metric, the map to `[0, 1]` and finite
//! unions of cylinders.

use crate::error::{Error, Result};
use crate::exponents::{Exponents, Rational};
use crate::logvalue::LogValue;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A vertex of the dyadic tree: a finite word over `{0, 1}`.
///
/// The empty word is the root. Words order lexicographically with a prefix
/// before its extensions.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    bits: Vec<bool>,
}

impl Word {
    pub fn root() -> Word {
        Word::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Word {
        Word { bits }
    }

    /// The word of length `len` spelling `k` in binary, most significant
    /// bit first.
    pub fn from_index(k: u64, len: usize) -> Word {
        assert!(len >= 64 || k < (1u64 << len), "{k} does not fit in {len} bits");
        let bits = (0..len)
            .map(|i| {
                let shift = len - 1 - i;
                shift < 64 && (k >> shift) & 1 == 1
            })
            .collect();
        Word { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_root(&self) -> bool {
        self.bits.is_empty()
    }

    /// Same as [`Word::is_root`].
    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    pub fn child(&self, bit: bool) -> Word {
        let mut bits = self.bits.clone();
        bits.push(bit);
        Word { bits }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Word { bits }
    }

    /// `self <= other` in the tree order: `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// Longest common prefix `x ∧ y`.
    pub fn meet(&self, other: &Word) -> Word {
        let k = self.bits.iter().zip(&other.bits).take_while(|(a, b)| a == b).count();
        Word { bits: self.bits[..k].to_vec() }
    }

    /// `d(x, y) = 2^{-|x ∧ y|}`.
    pub fn metric(&self, other: &Word) -> LogValue {
        LogValue::pow2(-(self.meet(other).len() as f64))
    }

    /// The bit string read as a binary integer.
    pub fn index(&self) -> BigInt {
        self.bits
            .iter()
            .fold(BigInt::zero(), |acc, &b| (acc << 1u32) + if b { 1 } else { 0 })
    }

    /// The dyadic interval `[k 2^{-|x|}, (k+1) 2^{-|x|}]` covered by the
    /// cylinder below `x`.
    pub fn lambda_interval(&self) -> (Rational, Rational) {
        let den = BigInt::one() << self.len();
        let k = self.index();
        (
            Rational::new(k.clone(), den.clone()),
            Rational::new(k + 1, den),
        )
    }

    /// The weight `π(x) = 2^{-|x|(1-ap)}`.
    pub fn weight(&self, e: &Exponents) -> LogValue {
        depth_weight(self.len() as f64, e)
    }

    /// Flips every bit.
    pub fn complement(&self) -> Word {
        Word { bits: self.bits.iter().map(|b| !b).collect() }
    }
}

/// `π` at depth `d`.
pub fn depth_weight(depth: f64, e: &Exponents) -> LogValue {
    if e.is_critical() {
        LogValue::ONE
    } else {
        LogValue::pow2(-depth * e.one_minus_ap_f64())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            write!(f, "Word(e)")
        } else {
            write!(f, "Word({self})")
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts a bit string; `""` and `"e"` denote the root.
    fn from_str(s: &str) -> Result<Word> {
        if s == "e" {
            return Ok(Word::root());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse { what: "bit string", input: s.to_string() }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word::from_bits)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite union of boundary cylinders, stored as a sorted antichain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CylinderSet {
    generators: Vec<Word>,
}

impl CylinderSet {
    pub fn empty() -> CylinderSet {
        CylinderSet::default()
    }

    /// The whole boundary `∂T`.
    pub fn full() -> CylinderSet {
        CylinderSet { generators: vec![Word::root()] }
    }

    /// Drops every word that has a proper prefix in the input.
    pub fn canonicalize<I: IntoIterator<Item = Word>>(words: I) -> CylinderSet {
        let mut words: Vec<Word> = words.into_iter().collect();
        words.sort();
        words.dedup();
        let mut generators: Vec<Word> = Vec::with_capacity(words.len());
        for w in words {
            // in sorted order every extension of a kept word follows it directly
            if generators.last().is_some_and(|last| last.is_prefix_of(&w)) {
                continue;
            }
            generators.push(w);
        }
        CylinderSet { generators }
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn union(&self, other: &CylinderSet) -> CylinderSet {
        CylinderSet::canonicalize(self.generators.iter().chain(&other.generators).cloned())
    }

    /// Whether the cylinder below `w` lies inside the set.
    pub fn covers(&self, w: &Word) -> bool {
        self.generators.iter().any(|g| g.is_prefix_of(w))
    }

    /// Whether every cylinder of `other` lies inside `self`.
    pub fn contains_set(&self, other: &CylinderSet) -> bool {
        other.generators.iter().all(|w| self.covers(w))
    }

    pub fn complement_bits(&self) -> CylinderSet {
        CylinderSet::canonicalize(self.generators.iter().map(Word::complement))
    }

    /// `D(n, κ)`: boundary points whose digits `n+1, ..., n+κ` are all
    /// equal to `bit`, as `2^n` cylinders of length `n + κ`.
    pub fn dobinski_component(n: usize, kappa: usize, bit: bool) -> CylinderSet {
        assert!(n < 63, "explicit D(n, kappa) needs n < 63");
        let generators = (0..1u64 << n)
            .map(|k| {
                let mut w = Word::from_index(k, n);
                w.bits.extend(std::iter::repeat_n(bit, kappa));
                w
            })
            .collect();
        CylinderSet { generators }
    }
}

impl<'de> Deserialize<'de> for CylinderSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let words = Vec::<Word>::deserialize(d)?;
        Ok(CylinderSet::canonicalize(words))
    }
}
