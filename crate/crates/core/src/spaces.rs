//! Product probability spaces: the weighted cube `V_n(p_1, ..., p_n)` and the
//! three-point space on `{-1, 0, 1}^n`.
//!
//! Configurations are ranked mixed-radix little-endian: coordinate 0 is the
//! least significant digit, and a ternary value `v` is the digit `v + 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};
use crate::stats::item_rng;

/// Largest number of points any exhaustive computation will visit.
pub const MAX_ENUMERATION: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// `{0, 1}`
    Binary,
    /// `{-1, 0, 1}`
    Ternary,
}

impl Alphabet {
    pub fn radix(self) -> usize {
        match self {
            Alphabet::Binary => 2,
            Alphabet::Ternary => 3,
        }
    }

    /// Values in increasing order.
    pub fn values(self) -> &'static [i8] {
        match self {
            Alphabet::Binary => &[0, 1],
            Alphabet::Ternary => &[-1, 0, 1],
        }
    }

    pub fn digit(self, v: i8) -> Option<usize> {
        match (self, v) {
            (Alphabet::Binary, 0 | 1) => Some(v as usize),
            (Alphabet::Ternary, -1..=1) => Some((v + 1) as usize),
            _ => None,
        }
    }

    pub fn value(self, digit: usize) -> i8 {
        match self {
            Alphabet::Binary => digit as i8,
            Alphabet::Ternary => digit as i8 - 1,
        }
    }

    pub fn top(self) -> i8 {
        1
    }

    pub fn bottom(self) -> i8 {
        match self {
            Alphabet::Binary => 0,
            Alphabet::Ternary => -1,
        }
    }

    /// `radix^n`, or `None` on overflow.
    pub fn size(self, n: usize) -> Option<usize> {
        self.radix().checked_pow(u32::try_from(n).ok()?)
    }

    /// `radix^n` if it does not exceed [`MAX_ENUMERATION`].
    pub fn enumerable_size(self, n: usize) -> Result<usize> {
        match self.size(n) {
            Some(size) if size <= MAX_ENUMERATION => Ok(size),
            _ => Err(Error::SizeLimit(format!(
                "{}^{n} points exceeds the enumeration limit {MAX_ENUMERATION}",
                self.radix()
            ))),
        }
    }

    /// Writes the digits of `rank` into `out` as alphabet values.
    pub fn decode_into(self, mut rank: usize, out: &mut [i8]) {
        let radix = self.radix();
        for slot in out.iter_mut() {
            *slot = self.value(rank % radix);
            rank /= radix;
        }
    }
}

/// A point of `{0,1}^n` or `{-1,0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    values: Vec<i8>,
}

impl Configuration {
    pub fn new(values: Vec<i8>) -> Self {
        Self { values }
    }

    pub fn from_rank(alphabet: Alphabet, n: usize, rank: usize) -> Self {
        let mut values = vec![0; n];
        alphabet.decode_into(rank, &mut values);
        Self { values }
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self, alphabet: Alphabet, n: usize) -> Result<()> {
        if self.values.len() != n {
            return Err(Error::AlphabetMismatch(format!(
                "length {} but the space has {n} coordinates",
                self.values.len()
            )));
        }
        if let Some(bad) = self.values.iter().find(|v| alphabet.digit(**v).is_none()) {
            return Err(Error::AlphabetMismatch(format!(
                "value {bad} is not in the {alphabet:?} alphabet"
            )));
        }
        Ok(())
    }

    pub fn rank(&self, alphabet: Alphabet) -> Result<usize> {
        self.validate(alphabet, self.values.len())?;
        let radix = alphabet.radix();
        Ok(self
            .values
            .iter()
            .rev()
            .fold(0usize, |acc, v| acc * radix + alphabet.digit(*v).unwrap_or(0)))
    }

    /// Coordinatewise order `self <= other`.
    pub fn le(&self, other: &Configuration) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A finite product measure.
pub trait ProductSpace<F: Scalar>: Send + Sync {
    fn n(&self) -> usize;

    fn alphabet(&self) -> Alphabet;

    /// `Pr(x_k = v)`.
    fn marginal(&self, k: usize, v: i8) -> F;

    fn point_mass(&self, x: &Configuration) -> Result<F> {
        x.validate(self.alphabet(), self.n())?;
        Ok(x
            .values()
            .iter()
            .enumerate()
            .fold(F::one(), |acc, (k, v)| acc * self.marginal(k, *v)))
    }

    /// Masses of every configuration, indexed by rank.
    fn mass_table(&self) -> Result<Vec<F>> {
        let alphabet = self.alphabet();
        let size = alphabet.enumerable_size(self.n())?;
        let radix = alphabet.radix();
        let mut table = Vec::with_capacity(size);
        table.push(F::one());
        for k in 0..self.n() {
            let stride = table.len();
            let mut next = vec![F::zero(); stride * radix];
            for d in 0..radix {
                let w = self.marginal(k, alphabet.value(d));
                for (r, m) in table.iter().enumerate() {
                    next[r + d * stride] = *m * w;
                }
            }
            table = next;
        }
        Ok(table)
    }

    /// Total mass by exact enumeration with compensated summation.
    fn total_mass(&self) -> Result<F> {
        let mut acc = CompensatedSum::new();
        for m in self.mass_table()? {
            acc.add(m);
        }
        Ok(acc.value())
    }

    /// Maps a uniform variate to a coordinate value. Monotone in the sense
    /// that raising `Pr(+1)` or lowering `Pr(-1)` never lowers the output.
    fn coordinate_from_uniform(&self, k: usize, u: f64) -> i8 {
        match self.alphabet() {
            Alphabet::Binary => i8::from(u < self.marginal(k, 1).as_f64()),
            Alphabet::Ternary => {
                if u < self.marginal(k, -1).as_f64() {
                    -1
                } else if u >= 1.0 - self.marginal(k, 1).as_f64() {
                    1
                } else {
                    0
                }
            }
        }
    }

    /// `count` independent draws; draw `i` uses its own stream under `seed`.
    fn sample(&self, seed: u64, count: usize) -> Vec<Configuration> {
        (0..count)
            .map(|i| {
                let mut rng = item_rng(seed, i as u64);
                Configuration::new(
                    (0..self.n())
                        .map(|k| self.coordinate_from_uniform(k, rng.random::<f64>()))
                        .collect(),
                )
            })
            .collect()
    }
}

fn check_open_unit<F: Scalar>(name: &'static str, p: F) -> Result<()> {
    if p > F::zero() && p < F::one() {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            name,
            value: p.as_f64(),
            reason: "must lie strictly between 0 and 1",
        })
    }
}

/// `V_n(p_1, ..., p_n)`: independent bits with `Pr(x_k = 1) = p_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointSpace<F> {
    probs: Vec<F>,
}

impl<F: Scalar> TwoPointSpace<F> {
    pub fn new(probs: Vec<F>) -> Result<Self> {
        for p in &probs {
            check_open_unit("p", *p)?;
        }
        Ok(Self { probs })
    }

    /// The weighted cube `V_n(p)`.
    pub fn uniform(n: usize, p: F) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    pub fn p(&self, k: usize) -> F {
        self.probs[k]
    }

    /// The common probability if all coordinates share one.
    pub fn common_p(&self) -> Option<F> {
        let first = *self.probs.first()?;
        self.probs.iter().all(|p| *p == first).then_some(first)
    }
}

impl<F: Scalar> ProductSpace<F> for TwoPointSpace<F> {
    fn n(&self) -> usize {
        self.probs.len()
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Binary
    }

    fn marginal(&self, k: usize, v: i8) -> F {
        match v {
            1 => self.probs[k],
            0 => F::one() - self.probs[k],
            _ => F::zero(),
        }
    }
}

/// `W^n_{p-, p+}`: independent coordinates in `{-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreePointSpace<F> {
    n: usize,
    p_minus: F,
    p_plus: F,
}

impl<F: Scalar> ThreePointSpace<F> {
    pub fn new(n: usize, p_minus: F, p_plus: F) -> Result<Self> {
        check_open_unit("p_minus", p_minus)?;
        check_open_unit("p_plus", p_plus)?;
        if p_minus + p_plus >= F::one() {
            return Err(Error::InvalidProbability {
                name: "p_minus + p_plus",
                value: (p_minus + p_plus).as_f64(),
                reason: "must be below 1",
            });
        }
        Ok(Self { n, p_minus, p_plus })
    }

    pub fn p_minus(&self) -> F {
        self.p_minus
    }

    pub fn p_plus(&self) -> F {
        self.p_plus
    }

    pub fn pmax(&self) -> F {
        self.p_minus.max(self.p_plus)
    }

    /// Moves `h` of mass from `-1` to `+1`: `(p- - h, p+ + h)`.
    pub fn perturb(&self, h: F) -> Result<Self> {
        if h < F::zero() {
            return Err(Error::OutOfRange(format!("perturbation h = {h} is negative")));
        }
        self.shift(h)
    }

    /// Like [`perturb`](Self::perturb) but also accepts negative `h`, as long
    /// as the result is a valid space. Used for two-sided finite differences.
    pub fn shift(&self, h: F) -> Result<Self> {
        let p_minus = self.p_minus - h;
        let p_plus = self.p_plus + h;
        if !(p_minus > F::zero() && p_plus > F::zero()) {
            return Err(Error::OutOfRange(format!(
                "shift by {h} leaves (p-, p+) = ({p_minus}, {p_plus})"
            )));
        }
        Self::new(self.n, p_minus, p_plus)
            .map_err(|e| Error::OutOfRange(format!("shift by {h}: {e}")))
    }

    /// Exclusive upper end of the admissible perturbation range.
    pub fn perturb_limit(&self) -> F {
        self.p_minus
    }
}

impl<F: Scalar> ProductSpace<F> for ThreePointSpace<F> {
    fn n(&self) -> usize {
        self.n
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Ternary
    }

    fn marginal(&self, _k: usize, v: i8) -> F {
        match v {
            -1 => self.p_minus,
            1 => self.p_plus,
            0 => F::one() - self.p_minus - self.p_plus,
            _ => F::zero(),
        }
    }
}

/// Either kind of space, as produced from a [`SpaceSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum AnySpace<F> {
    Two(TwoPointSpace<F>),
    Three(ThreePointSpace<F>),
}

impl<F: Scalar> ProductSpace<F> for AnySpace<F> {
    fn n(&self) -> usize {
        match self {
            AnySpace::Two(s) => s.n(),
            AnySpace::Three(s) => s.n(),
        }
    }

    fn alphabet(&self) -> Alphabet {
        match self {
            AnySpace::Two(_) => Alphabet::Binary,
            AnySpace::Three(_) => Alphabet::Ternary,
        }
    }

    fn marginal(&self, k: usize, v: i8) -> F {
        match self {
            AnySpace::Two(s) => s.marginal(k, v),
            AnySpace::Three(s) => s.marginal(k, v),
        }
    }
}

/// Compact form, parseable back by [`SpaceSpec`].
impl<F: Scalar> fmt::Display for AnySpace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnySpace::Two(s) => match s.common_p() {
                Some(p) => write!(f, "v:n={},p={p}", s.n()),
                None => {
                    let probs: Vec<String> = s.probs().iter().map(|p| p.to_string()).collect();
                    write!(f, "v:probs={}", probs.join(";"))
                }
            },
            AnySpace::Three(s) => write!(f, "w:n={},pm={},pp={}", s.n(), s.p_minus(), s.p_plus()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    TwoPoint,
    ThreePoint,
}

/// Space description as it appears in experiment config files:
/// `{kind: "two_point"|"three_point", n, p | probs | p_minus/p_plus}`.
///
/// The compact string form accepted by [`FromStr`] is `v:n=3,p=0.25`,
/// `v:probs=0.125;0.5` or `w:n=2,pm=0.1,pp=0.2`; `n` may be omitted and
/// supplied later from the function arity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_plus: Option<f64>,
}

impl SpaceSpec {
    /// Builds the space, taking `n` from the spec or else from `default_n`.
    pub fn build<F: Scalar>(&self, default_n: Option<usize>) -> Result<AnySpace<F>> {
        let n = self.n.or(default_n);
        match self.kind {
            SpaceKind::TwoPoint => {
                let probs: Vec<f64> = match (&self.probs, self.p) {
                    (Some(probs), None) => {
                        if let Some(n) = n {
                            if n != probs.len() {
                                return Err(Error::ArityMismatch {
                                    expected: n,
                                    actual: probs.len(),
                                });
                            }
                        }
                        probs.clone()
                    }
                    (None, Some(p)) => {
                        let n = n.ok_or_else(|| Error::Parse("two-point space needs n".into()))?;
                        vec![p; n]
                    }
                    _ => return Err(Error::Parse("two-point space needs exactly one of p, probs".into())),
                };
                Ok(AnySpace::Two(TwoPointSpace::new(
                    probs.into_iter().map(F::lit).collect(),
                )?))
            }
            SpaceKind::ThreePoint => {
                let n = n.ok_or_else(|| Error::Parse("three-point space needs n".into()))?;
                let (Some(pm), Some(pp)) = (self.p_minus, self.p_plus) else {
                    return Err(Error::Parse("three-point space needs p_minus and p_plus".into()));
                };
                Ok(AnySpace::Three(ThreePointSpace::new(n, F::lit(pm), F::lit(pp))?))
            }
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = match head.trim() {
            "v" | "two_point" => SpaceKind::TwoPoint,
            "w" | "three_point" => SpaceKind::ThreePoint,
            other => return Err(Error::Parse(format!("unknown space kind {other:?}"))),
        };
        let mut spec = SpaceSpec {
            kind,
            n: None,
            p: None,
            probs: None,
            p_minus: None,
            p_plus: None,
        };
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {v:?} in space {s:?}")))
        };
        for item in rest.split(',').filter(|i| !i.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            match key.trim() {
                "n" => {
                    spec.n = Some(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad n {value:?}")))?,
                    )
                }
                "p" => spec.p = Some(num(value)?),
                "probs" => spec.probs = Some(value.split(';').map(num).collect::<Result<_>>()?),
                "pm" | "p_minus" => spec.p_minus = Some(num(value)?),
                "pp" | "p_plus" => spec.p_plus = Some(num(value)?),
                other => return Err(Error::Parse(format!("unknown space key {other:?}"))),
            }
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_examples() {
        let v2 = TwoPointSpace::<f64>::uniform(2, 0.5).unwrap();
        assert_eq!(v2.point_mass(&Configuration::new(vec![1, 1])).unwrap(), 0.25);

        let w2 = ThreePointSpace::<f64>::new(2, 0.1, 0.2).unwrap();
        let m = w2.point_mass(&Configuration::new(vec![1, -1])).unwrap();
        assert!((m - 0.02).abs() < 1e-15);

        let mixed = TwoPointSpace::<f64>::new(vec![0.25, 0.5]).unwrap();
        let masses: Vec<f64> = (0..4)
            .map(|r| mixed.point_mass(&Configuration::from_rank(Alphabet::Binary, 2, r)).unwrap())
            .collect();
        assert_eq!(masses.iter().sum::<f64>(), 1.0);
        assert_eq!(mixed.point_mass(&Configuration::new(vec![0, 1])).unwrap(), 0.375);
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let v2 = TwoPointSpace::<f64>::uniform(2, 0.5).unwrap();
        assert!(matches!(
            v2.point_mass(&Configuration::new(vec![-1, 0])),
            Err(Error::AlphabetMismatch(_))
        ));
        assert!(v2.point_mass(&Configuration::new(vec![0])).is_err());
    }

    #[test]
    fn degenerate_and_invalid_probabilities_rejected() {
        assert!(ThreePointSpace::<f64>::new(1, 0.0, 0.0).is_err());
        assert!(ThreePointSpace::<f64>::new(1, 0.6, 0.5).is_err());
        assert!(TwoPointSpace::<f64>::uniform(3, 1.0).is_err());
        assert!(TwoPointSpace::<f64>::uniform(3, 0.0).is_err());
    }

    #[test]
    fn perturb_examples() {
        let w = ThreePointSpace::<f64>::new(3, 0.3, 0.1).unwrap();
        assert_eq!(w.perturb(0.0).unwrap(), w);
        let moved = w.perturb(0.05).unwrap();
        assert!((moved.p_minus() - 0.25).abs() < 1e-15);
        assert!((moved.p_plus() - 0.15).abs() < 1e-15);
        assert!(w.perturb(0.31).is_err());
        assert!(w.perturb(-0.01).is_err());
        assert!(w.shift(-0.01).is_ok());
    }

    #[test]
    fn masses_sum_to_one() {
        let v = TwoPointSpace::<f64>::new(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.15, 0.25, 0.35])
            .unwrap();
        assert!((v.total_mass().unwrap() - 1.0).abs() <= 1e-12);
        let w = ThreePointSpace::<f64>::new(8, 0.17, 0.29).unwrap();
        assert!((w.total_mass().unwrap() - 1.0).abs() <= 1e-12);
        let w32 = ThreePointSpace::<f32>::new(4, 0.17f32, 0.29f32).unwrap();
        assert!((w32.total_mass().unwrap() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn mass_table_matches_point_mass() {
        let w = ThreePointSpace::<f64>::new(3, 0.2, 0.3).unwrap();
        let table = w.mass_table().unwrap();
        for (r, m) in table.iter().enumerate() {
            let x = Configuration::from_rank(Alphabet::Ternary, 3, r);
            assert_eq!(x.rank(Alphabet::Ternary).unwrap(), r);
            assert!((w.point_mass(&x).unwrap() - m).abs() < 1e-16);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_calibrated() {
        let v = TwoPointSpace::<f64>::uniform(1, 0.5).unwrap();
        let a = v.sample(11, 100_000);
        assert_eq!(a, v.sample(11, 100_000));
        let ones = a.iter().filter(|x| x.values()[0] == 1).count() as f64 / 1e5;
        assert!((ones - 0.5).abs() < 0.01, "fraction {ones}");

        let w = ThreePointSpace::<f64>::new(1, 0.2, 0.3).unwrap();
        let draws = w.sample(5, 50_000);
        let plus = draws.iter().filter(|x| x.values()[0] == 1).count() as f64 / 5e4;
        let minus = draws.iter().filter(|x| x.values()[0] == -1).count() as f64 / 5e4;
        assert!((plus - 0.3).abs() < 0.01 && (minus - 0.2).abs() < 0.01);
    }

    #[test]
    fn spec_strings_parse() {
        let s: SpaceSpec = "v:p=0.5".parse().unwrap();
        match s.build::<f64>(Some(3)).unwrap() {
            AnySpace::Two(v) => assert_eq!(v.probs(), &[0.5, 0.5, 0.5]),
            _ => panic!(),
        }
        let s: SpaceSpec = "w:n=2,pm=0.1,pp=0.2".parse().unwrap();
        assert!(matches!(s.build::<f64>(None).unwrap(), AnySpace::Three(_)));
        let s: SpaceSpec = "v:probs=0.125;0.5".parse().unwrap();
        assert_eq!(s.build::<f64>(None).unwrap().n(), 2);
        assert!("v:p=1.5".parse::<SpaceSpec>().unwrap().build::<f64>(Some(1)).is_err());
        assert!("q:p=0.5".parse::<SpaceSpec>().is_err());
    }

    #[test]
    fn order_is_coordinatewise() {
        let a = Configuration::new(vec![-1, 0, 1]);
        let b = Configuration::new(vec![0, 0, 1]);
        assert!(a.le(&b) && !b.le(&a) && a.le(&a));
    }
}
