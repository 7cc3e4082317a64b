//! Coordinate influences (exact and Monte Carlo) and the dyadic embedding of
//! `V_1(p)` into a uniform cube.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::{symmetry_order, BooleanFunction, SymmetryGroup};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, CompensatedSum, Scalar};
use crate::spaces::{Alphabet, ProductSpace};
use crate::stats::{item_rng, wilson_half_width, Z95};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfluenceMethod {
    Exact,
    MonteCarlo { trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceReport<F> {
    pub per_coordinate: Vec<F>,
    /// Sum of `per_coordinate`.
    pub total: F,
    pub max: F,
    pub method: InfluenceMethod,
    /// 95% half-widths; zero for exact reports.
    pub half_width: Vec<F>,
}

impl<F: Scalar> InfluenceReport<F> {
    pub fn new(per_coordinate: Vec<F>, method: InfluenceMethod, half_width: Vec<F>) -> Self {
        let total = compensated_sum(per_coordinate.iter().copied());
        let max = per_coordinate.iter().copied().fold(F::zero(), F::max);
        Self {
            per_coordinate,
            total,
            max,
            method,
            half_width,
        }
    }

    fn exact(per_coordinate: Vec<F>) -> Self {
        let n = per_coordinate.len();
        Self::new(per_coordinate, InfluenceMethod::Exact, vec![F::zero(); n])
    }

    pub fn n(&self) -> usize {
        self.per_coordinate.len()
    }
}

fn check_compatible<F: Scalar, S: ProductSpace<F> + ?Sized>(
    f: &BooleanFunction,
    space: &S,
) -> Result<()> {
    if f.arity() != space.n() {
        return Err(Error::ArityMismatch {
            expected: space.n(),
            actual: f.arity(),
        });
    }
    if f.alphabet() != space.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "function over {:?}, space over {:?}",
            f.alphabet(),
            space.alphabet()
        )));
    }
    Ok(())
}

/// Which pivotality rule to apply at a coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pivotal {
    /// Some other value of the coordinate changes `f`.
    AnyAlternative,
    /// `f` differs between the bottom and top values of the coordinate.
    Extremal,
}

fn influences_with<F: Scalar, S: ProductSpace<F> + ?Sized>(
    f: &BooleanFunction,
    space: &S,
    rule: Pivotal,
    coords: &[usize],
) -> Result<Vec<F>> {
    check_compatible(f, space)?;
    let table = f.require_table()?;
    let masses = space.mass_table()?;
    let radix = f.alphabet().radix();
    let mut acc = vec![CompensatedSum::<F>::new(); coords.len()];
    for (r, (&value, &mass)) in table.iter().zip(&masses).enumerate() {
        for (slot, &k) in coords.iter().enumerate() {
            let stride = radix.pow(k as u32);
            let digit = (r / stride) % radix;
            let base = r - digit * stride;
            let pivotal = match rule {
                Pivotal::AnyAlternative => {
                    (0..radix).any(|d| d != digit && table[base + d * stride] != value)
                }
                Pivotal::Extremal => table[base] != table[base + (radix - 1) * stride],
            };
            if pivotal {
                acc[slot].add(mass);
            }
        }
    }
    Ok(acc.iter().map(CompensatedSum::value).collect())
}

/// `I_f(k)`: the measure of configurations at which changing coordinate `k`
/// alone (to any other value) can change `f`.
pub fn influence_exact<F: Scalar, S: ProductSpace<F> + ?Sized>(
    f: &BooleanFunction,
    space: &S,
) -> Result<InfluenceReport<F>> {
    let coords: Vec<usize> = (0..f.arity()).collect();
    Ok(InfluenceReport::exact(influences_with(
        f,
        space,
        Pivotal::AnyAlternative,
        &coords,
    )?))
}

/// Influences under the bottom-vs-top pivotal rule. Agrees with
/// [`influence_exact`] for increasing functions.
pub fn influence_exact_extremal<F: Scalar, S: ProductSpace<F> + ?Sized>(
    f: &BooleanFunction,
    space: &S,
) -> Result<InfluenceReport<F>> {
    let coords: Vec<usize> = (0..f.arity()).collect();
    Ok(InfluenceReport::exact(influences_with(f, space, Pivotal::Extremal, &coords)?))
}

/// Exact influences for a function preserved by `group`, computed once per
/// orbit. Requires identical marginals within each orbit.
pub fn influence_exact_symmetric<F: Scalar, S: ProductSpace<F> + ?Sized>(
    f: &BooleanFunction,
    space: &S,
    group: &SymmetryGroup,
) -> Result<InfluenceReport<F>> {
    symmetry_order(f, group)?;
    let alphabet = space.alphabet();
    for orbit in group.orbits() {
        let first = orbit[0];
        for &k in &orbit[1..] {
            if alphabet
                .values()
                .iter()
                .any(|v| space.marginal(k, *v) != space.marginal(first, *v))
            {
                return Err(Error::Hypothesis(format!(
                    "coordinates {first} and {k} share an orbit but not a marginal"
                )));
            }
        }
    }
    let reps: Vec<usize> = group.orbits().iter().map(|o| o[0]).collect();
    let rep_values = influences_with(f, space, Pivotal::AnyAlternative, &reps)?;
    let per = (0..f.arity())
        .map(|k| rep_values[group.orbit_of(k)])
        .collect();
    Ok(InfluenceReport::exact(per))
}

/// Counts of pivotal configurations for coordinate `k`, keyed by how many
/// coordinates take each alphabet value. Two coordinates with equal profiles
/// have equal influence under every product measure with identical
/// marginals, so this gives an exact integer test of influence equality.
pub fn pivotal_profile(f: &BooleanFunction, k: usize) -> Result<BTreeMap<Vec<usize>, u64>> {
    let table = f.require_table()?;
    if k >= f.arity() {
        return Err(Error::OutOfRange(format!("coordinate {k} >= n = {}", f.arity())));
    }
    let alphabet = f.alphabet();
    let radix = alphabet.radix();
    let stride = radix.pow(k as u32);
    let mut profile = BTreeMap::new();
    for (r, &value) in table.iter().enumerate() {
        let digit = (r / stride) % radix;
        let base = r - digit * stride;
        if (0..radix).any(|d| d != digit && table[base + d * stride] != value) {
            let mut counts = vec![0usize; radix];
            let mut rest = r;
            for _ in 0..f.arity() {
                counts[rest % radix] += 1;
                rest /= radix;
            }
            *profile.entry(counts).or_insert(0) += 1;
        }
    }
    Ok(profile)
}

/// Monte Carlo influences. Each trial draws one configuration from its own
/// stream and tests every alternative value of every coordinate, so counts
/// are identical for any worker count.
pub fn influence_mc<F: Scalar, S: ProductSpace<F> + ?Sized>(
    f: &BooleanFunction,
    space: &S,
    seed: u64,
    trials: u64,
) -> Result<InfluenceReport<F>> {
    check_compatible(f, space)?;
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let n = f.arity();
    let values = f.alphabet().values();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; n], vec![0i8; n]),
            |(mut counts, mut x), t| {
                let mut rng = item_rng(seed, t);
                for (k, slot) in x.iter_mut().enumerate() {
                    *slot = space.coordinate_from_uniform(k, rng.random::<f64>());
                }
                let value = f.eval_values(&x);
                for k in 0..n {
                    let original = x[k];
                    let pivotal = values.iter().any(|&v| {
                        if v == original {
                            return false;
                        }
                        x[k] = v;
                        let flipped = f.eval_values(&x) != value;
                        x[k] = original;
                        flipped
                    });
                    counts[k] += u64::from(pivotal);
                }
                (counts, x)
            },
        )
        .map(|(c, _)| c)
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let per = counts
        .iter()
        .map(|&c| F::lit(c as f64 / trials as f64))
        .collect();
    let half = counts
        .iter()
        .map(|&c| F::lit(wilson_half_width(c, trials, Z95)))
        .collect();
    Ok(InfluenceReport::new(
        per,
        InfluenceMethod::MonteCarlo { trials },
        half,
    ))
}

/// Largest block width accepted by the embedding.
pub const MAX_EMBEDDING_BITS: u32 = 24;

/// Replacement of `V_1(p)`, `p = a / 2^m`, by the uniform cube `{0,1}^m`:
/// a block whose binary value is below `boundary_rank = (1 - p) 2^m` maps to
/// 0, the rest to 1. Within a block the lowest bit is least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicEmbedding {
    numerator: u64,
    m: u32,
    boundary_rank: u64,
}

/// `p = a / 2^m` in lowest terms.
pub fn embed_dyadic(p: Ratio<u64>) -> Result<DyadicEmbedding> {
    let (a, denom) = (*p.numer(), *p.denom());
    if a == 0 || a >= denom || !denom.is_power_of_two() {
        return Err(Error::NotDyadic(format!("{a}/{denom}")));
    }
    let m = denom.trailing_zeros();
    if m > MAX_EMBEDDING_BITS {
        return Err(Error::SizeLimit(format!("2^{m} points per block")));
    }
    Ok(DyadicEmbedding {
        numerator: a,
        m,
        boundary_rank: denom - a,
    })
}

impl DyadicEmbedding {
    /// Exact dyadic value of a float, if it has one with at most
    /// [`MAX_EMBEDDING_BITS`] bits.
    pub fn from_f64(p: f64) -> Result<Self> {
        let scaled = p * f64::from(1u32 << MAX_EMBEDDING_BITS);
        if !(p > 0.0 && p < 1.0) || scaled.fract() != 0.0 {
            return Err(Error::NotDyadic(format!("{p}")));
        }
        embed_dyadic(Ratio::new(scaled as u64, 1u64 << MAX_EMBEDDING_BITS))
    }

    /// Embedding of `p` with a prescribed block width `m >= ` the minimal one.
    pub fn with_bits(p: f64, m: u32) -> Result<Self> {
        let base = Self::from_f64(p)?;
        if m < base.m || m > MAX_EMBEDDING_BITS {
            return Err(Error::NotDyadic(format!("{p} with {m} bits")));
        }
        let shift = m - base.m;
        Ok(Self {
            numerator: base.numerator << shift,
            m,
            boundary_rank: base.boundary_rank << shift,
        })
    }

    pub fn p(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, 1 << self.m)
    }

    pub fn p_f64(&self) -> f64 {
        self.numerator as f64 / (1u64 << self.m) as f64
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn boundary_rank(&self) -> u64 {
        self.boundary_rank
    }

    /// The coordinate value a block maps to.
    pub fn lift_block(&self, block: u64) -> i8 {
        i8::from(block >= self.boundary_rank)
    }
}

/// Truth table of `f` composed with the per-coordinate embedding, on the
/// uniform cube `{0,1}^{n m}`; coordinate `i` reads bits `i m .. (i+1) m`.
pub fn lift_table(f: &BooleanFunction, embedding: &DyadicEmbedding) -> Result<Vec<bool>> {
    if f.alphabet() != Alphabet::Binary {
        return Err(Error::AlphabetMismatch("embedding lifts functions on {0,1}^n".into()));
    }
    let m = embedding.m() as usize;
    let bits = f.arity() * m;
    if bits > MAX_EMBEDDING_BITS as usize {
        return Err(Error::SizeLimit(format!("lifted cube has 2^{bits} points")));
    }
    f.require_table()?;
    let mask = (1u64 << m) - 1;
    let mut x = vec![0i8; f.arity()];
    Ok((0..1u64 << bits)
        .map(|y| {
            for (i, slot) in x.iter_mut().enumerate() {
                *slot = embedding.lift_block((y >> (i * m)) & mask);
            }
            f.eval_values(&x)
        })
        .collect())
}

/// Total influence of a table on the uniform cube `{0,1}^bits`, exactly.
pub fn uniform_total_influence(table: &[bool]) -> Ratio<u64> {
    let size = table.len() as u64;
    let bits = size.trailing_zeros();
    let flips: u64 = (0..bits)
        .map(|j| {
            (0..table.len())
                .filter(|&y| table[y] != table[y ^ (1 << j)])
                .count() as u64
        })
        .sum();
    Ratio::new(flips, size)
}

/// `w(f)`: total influence of the lift of `f: V_1(p) -> {0,1}` on `{0,1}^m`.
pub fn w_embedded(f: &BooleanFunction, embedding: &DyadicEmbedding) -> Result<Ratio<u64>> {
    if f.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            actual: f.arity(),
        });
    }
    Ok(uniform_total_influence(&lift_table(f, embedding)?))
}

/// `E f` under `V_n(p)`, exactly, for dyadic `p`.
pub fn weighted_mean_exact(f: &BooleanFunction, embedding: &DyadicEmbedding) -> Result<Ratio<u128>> {
    let table = f.require_table()?;
    let n = f.arity();
    let a = u128::from(embedding.numerator);
    let b = (1u128 << embedding.m) - a;
    if (embedding.m as usize) * n > 120 {
        return Err(Error::SizeLimit("exact mean overflows".into()));
    }
    let mut numer = 0u128;
    for (r, &value) in table.iter().enumerate() {
        if value {
            let ones = (r as u64).count_ones();
            numer += a.pow(ones) * b.pow(n as u32 - ones);
        }
    }
    Ok(Ratio::new(numer, 1u128 << (embedding.m as usize * n)))
}

/// Mean of the lifted function on the uniform cube, exactly.
pub fn lifted_mean_exact(f: &BooleanFunction, embedding: &DyadicEmbedding) -> Result<Ratio<u128>> {
    let table = lift_table(f, embedding)?;
    let ones = table.iter().filter(|b| **b).count() as u128;
    Ok(Ratio::new(ones, table.len() as u128))
}
