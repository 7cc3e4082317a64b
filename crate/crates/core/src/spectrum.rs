//! Walsh-Fourier analysis on the uniform cube and on block-embedded weighted
//! cubes, spectral concentration reports, and the `Delta_i` norms.
//!
//! Characters are `chi_S(x) = prod_{i in S} (1 - 2 x_i)` and coefficients are
//! `f^(S) = 2^{-N} sum_x f(x) chi_S(x)`, so `f = sum_S f^(S) chi_S`.

use num_traits::{FromPrimitive, Num};
use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};
use crate::influence::{lift_table, DyadicEmbedding, InfluenceReport};
use crate::scalar::{compensated_sum, x_log_inv, CompensatedSum, Scalar};
use crate::spaces::{Alphabet, ProductSpace, TwoPointSpace};

pub const MAX_TRANSFORM_BITS: usize = 24;
/// Full coefficient tables are kept on [`BlockSpectrum`] up to this many bits.
pub const KEEP_COEFFICIENTS_BITS: usize = 16;

fn check_len(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::OutOfRange(format!("table length {len} is not a power of two")));
    }
    let bits = len.trailing_zeros() as usize;
    if bits > MAX_TRANSFORM_BITS {
        return Err(Error::SizeLimit(format!("2^{bits} point transform")));
    }
    Ok(bits)
}

fn butterfly<T: Clone + Num>(data: &mut [T]) {
    let mut h = 1;
    while h < data.len() {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let sum = a.clone() + b.clone();
                let diff = a.clone() - b.clone();
                *a = sum;
                *b = diff;
            }
        }
        h *= 2;
    }
}

/// Walsh coefficients of `values` (indexed by `x` in `{0,1}^N`), in
/// `O(N 2^N)`. Works for floats and for exact rationals.
pub fn walsh_transform<T: Clone + Num + FromPrimitive>(values: &[T]) -> Result<Vec<T>> {
    check_len(values.len())?;
    let mut out = values.to_vec();
    butterfly(&mut out);
    let scale = T::from_usize(values.len())
        .ok_or_else(|| Error::OutOfRange("scale not representable".into()))?;
    for c in &mut out {
        *c = c.clone() / scale.clone();
    }
    Ok(out)
}

/// `f(x) = sum_S f^(S) chi_S(x)`.
pub fn inverse_walsh<T: Clone + Num>(coefficients: &[T]) -> Result<Vec<T>> {
    check_len(coefficients.len())?;
    let mut out = coefficients.to_vec();
    butterfly(&mut out);
    Ok(out)
}

pub fn indicator_values<F: Scalar>(table: &[bool]) -> Vec<F> {
    table.iter().map(|b| if *b { F::one() } else { F::zero() }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalCheck<F> {
    /// `Pr(f = 1)`.
    pub t: F,
    /// `t (1 - t)`.
    pub lhs: F,
    /// `sum_{S != {}} f^(S)^2`.
    pub rhs: F,
    pub error: F,
}

fn parseval_from_table<F: Scalar>(table: &[bool]) -> Result<ParsevalCheck<F>> {
    let coeffs = walsh_transform(&indicator_values::<F>(table))?;
    let t = coeffs[0];
    let lhs = t * (F::one() - t);
    let rhs = compensated_sum(coeffs[1..].iter().map(|c| *c * *c));
    Ok(ParsevalCheck {
        t,
        lhs,
        rhs,
        error: (lhs - rhs).abs(),
    })
}

/// Checks `t(1 - t) = ||f - E f||_2^2` through the Walsh spectrum, either on
/// the uniform cube (`embedding = None`) or on the lift of `f` from `V_n(p)`.
pub fn parseval_check<F: Scalar>(
    f: &BooleanFunction,
    embedding: Option<&DyadicEmbedding>,
) -> Result<ParsevalCheck<F>> {
    if f.alphabet() != Alphabet::Binary {
        return Err(Error::AlphabetMismatch("Walsh analysis needs {0,1}^n".into()));
    }
    match embedding {
        None => parseval_from_table(f.require_table()?),
        Some(e) => parseval_from_table(&lift_table(f, e)?),
    }
}

/// Squared Fourier weight of a lifted function grouped by total degree
/// `s = |S_1| + ... + |S_n|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSpectrum<F> {
    pub n: usize,
    pub m: usize,
    /// Entry `s` is the weight at level `s`; entry 0 is `f^({})^2 = t^2`.
    pub weights_by_level: Vec<F>,
    pub weight_nonconstant: F,
    #[serde(skip)]
    pub coefficients: Option<Vec<F>>,
}

impl<F: Scalar> BlockSpectrum<F> {
    pub fn levels(&self) -> usize {
        self.n * self.m
    }
}

pub fn block_spectrum<F: Scalar>(
    f: &BooleanFunction,
    embedding: &DyadicEmbedding,
) -> Result<BlockSpectrum<F>> {
    let table = lift_table(f, embedding)?;
    let coeffs = walsh_transform(&indicator_values::<F>(&table))?;
    let bits = table.len().trailing_zeros() as usize;
    let mut levels = vec![CompensatedSum::<F>::new(); bits + 1];
    for (s, c) in coeffs.iter().enumerate() {
        levels[s.count_ones() as usize].add(*c * *c);
    }
    let weights_by_level: Vec<F> = levels.iter().map(CompensatedSum::value).collect();
    let weight_nonconstant = compensated_sum(weights_by_level[1..].iter().copied());
    Ok(BlockSpectrum {
        n: f.arity(),
        m: embedding.m() as usize,
        weights_by_level,
        weight_nonconstant,
        coefficients: (bits <= KEEP_COEFFICIENTS_BITS).then_some(coeffs),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRow<F> {
    pub s: usize,
    pub weight: F,
    pub first_bound_holds: bool,
    pub second_bound_holds: bool,
}

/// Where the nonconstant spectral mass sits relative to the two level
/// bounds used in the influence lower-bound argument:
///
/// * first: `0 < s <= 3 c1 (t(1-t))^{-1} p log(1/p) sum_k delta_k`
/// * second: `s 3^{-s} <= c2^{-1} (t(1-t))^{-1} sum_k delta_k^{3/2}`
///
/// with `delta_k` the influences on `V_n(p)`. The empty multi-index is never
/// counted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport<F> {
    pub degenerate: bool,
    pub t: F,
    pub variance: F,
    pub c1: F,
    pub c2: F,
    pub first_bound: F,
    pub second_bound: F,
    pub mass_first: F,
    pub mass_second: F,
    pub mass_both: F,
    pub first_over_half: bool,
    pub second_over_half: bool,
    pub both_over_half: bool,
    /// Heaviest level at which both bounds hold.
    pub witness_level: Option<usize>,
    pub levels: Vec<LevelRow<F>>,
}

pub fn concentration_report<F: Scalar>(
    spectrum: &BlockSpectrum<F>,
    influences: &InfluenceReport<F>,
    t: F,
    p: F,
    c1: F,
    c2: F,
) -> Result<ConcentrationReport<F>> {
    if influences.n() != spectrum.n {
        return Err(Error::ArityMismatch {
            expected: spectrum.n,
            actual: influences.n(),
        });
    }
    let variance = t * (F::one() - t);
    let mut report = ConcentrationReport {
        degenerate: true,
        t,
        variance,
        c1,
        c2,
        first_bound: F::zero(),
        second_bound: F::zero(),
        mass_first: F::zero(),
        mass_second: F::zero(),
        mass_both: F::zero(),
        first_over_half: false,
        second_over_half: false,
        both_over_half: false,
        witness_level: None,
        levels: Vec::new(),
    };
    if !(variance > F::zero()) {
        return Ok(report);
    }
    report.degenerate = false;
    let three = F::lit(3.0);
    let sum_delta = compensated_sum(influences.per_coordinate.iter().copied());
    let sum_delta_32 = compensated_sum(influences.per_coordinate.iter().map(|d| *d * d.sqrt()));
    report.first_bound = three * c1 / variance * x_log_inv(p) * sum_delta;
    report.second_bound = sum_delta_32 / (c2 * variance);
    let (mut first, mut second, mut both) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    let mut witness: Option<(usize, F)> = None;
    for (s, &weight) in spectrum.weights_by_level.iter().enumerate().skip(1) {
        let level = F::from_usize(s).unwrap_or_else(F::infinity);
        let first_holds = level <= report.first_bound;
        let second_holds = level * three.powi(-(s as i32)) <= report.second_bound;
        if first_holds {
            first.add(weight);
        }
        if second_holds {
            second.add(weight);
        }
        if first_holds && second_holds {
            both.add(weight);
            if weight > F::zero() && witness.is_none_or(|(_, w)| weight > w) {
                witness = Some((s, weight));
            }
        }
        report.levels.push(LevelRow {
            s,
            weight,
            first_bound_holds: first_holds,
            second_bound_holds: second_holds,
        });
    }
    let half = variance / F::lit(2.0);
    report.mass_first = first.value();
    report.mass_second = second.value();
    report.mass_both = both.value();
    report.first_over_half = report.mass_first > half;
    report.second_over_half = report.mass_second > half;
    report.both_over_half = report.mass_both > half;
    report.witness_level = witness.map(|(s, _)| s);
    Ok(report)
}

/// Finds constants `(c1, c2)` under which more than half the nonconstant
/// mass satisfies both bounds. Each candidate is a level window `[lo, hi]`:
/// `c1` is the smallest value admitting `hi` under the first bound and `c2`
/// the largest admitting `lo` under the second. The narrowest window with
/// more than half the mass wins, ties going to the lower window.
pub fn concentration_search<F: Scalar>(
    spectrum: &BlockSpectrum<F>,
    influences: &InfluenceReport<F>,
    t: F,
    p: F,
) -> Result<Option<ConcentrationReport<F>>> {
    let variance = t * (F::one() - t);
    if !(variance > F::zero()) {
        return Ok(None);
    }
    let sum_delta = compensated_sum(influences.per_coordinate.iter().copied());
    let sum_delta_32 = compensated_sum(influences.per_coordinate.iter().map(|d| *d * d.sqrt()));
    if !(sum_delta > F::zero()) {
        return Ok(None);
    }
    let levels = spectrum.levels();
    let half = variance / F::lit(2.0);
    let slack = F::lit(1e-9);
    for width in 0..levels {
        for lo in 1..=levels - width {
            let hi = lo + width;
            let mass = compensated_sum(spectrum.weights_by_level[lo..=hi].iter().copied());
            if mass <= half {
                continue;
            }
            let hi_f = F::from_usize(hi).unwrap_or_else(F::infinity);
            let lo_f = F::from_usize(lo).unwrap_or_else(F::infinity);
            let c1 = hi_f * variance / (F::lit(3.0) * x_log_inv(p) * sum_delta) * (F::one() + slack);
            let c2 = sum_delta_32 / (variance * lo_f * F::lit(3.0).powi(-(lo as i32)))
                * (F::one() - slack);
            let report = concentration_report(spectrum, influences, t, p, c1, c2)?;
            if report.both_over_half {
                return Ok(Some(report));
            }
        }
    }
    Ok(None)
}

/// `(||Delta_i f||_2, ||Delta_i f||_1)` for each coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaNorms<F> {
    pub per_coordinate: Vec<(F, F)>,
}

/// Direct computation of the `Delta_i` norms of a real function on
/// `V_n(p_1, ..., p_n)`, where `Delta_i f(x) = (1 - p_i)(f(x) - f(U_i x))`
/// if `x_i = 1` and `p_i (f(x) - f(U_i x))` if `x_i = 0`.
pub fn delta_norms<F: Scalar>(values: &[F], space: &TwoPointSpace<F>) -> Result<DeltaNorms<F>> {
    let n = space.n();
    let size = Alphabet::Binary.enumerable_size(n)?;
    if values.len() != size {
        return Err(Error::ArityMismatch {
            expected: size,
            actual: values.len(),
        });
    }
    let masses = space.mass_table()?;
    let per_coordinate = (0..n)
        .map(|i| {
            let p = space.p(i);
            let (mut l2, mut l1) = (CompensatedSum::new(), CompensatedSum::new());
            for (x, (&fx, &mass)) in values.iter().zip(&masses).enumerate() {
                let weight = if x >> i & 1 == 1 { F::one() - p } else { p };
                let d = (weight * (fx - values[x ^ (1 << i)])).abs();
                l2.add(mass * d * d);
                l1.add(mass * d);
            }
            (l2.value().sqrt(), l1.value())
        })
        .collect();
    Ok(DeltaNorms { per_coordinate })
}

/// `1_A - Pr(A)` as a real table.
pub fn centered_indicator<F: Scalar>(f: &BooleanFunction, space: &TwoPointSpace<F>) -> Result<Vec<F>> {
    let table = f.require_table()?;
    let masses = space.mass_table()?;
    if masses.len() != table.len() {
        return Err(Error::ArityMismatch {
            expected: space.n(),
            actual: f.arity(),
        });
    }
    let t = compensated_sum(table.iter().zip(&masses).filter(|(b, _)| **b).map(|(_, m)| *m));
    Ok(indicator_values::<F>(table).into_iter().map(|v| v - t).collect())
}

pub fn delta_norms_indicator<F: Scalar>(
    f: &BooleanFunction,
    space: &TwoPointSpace<F>,
) -> Result<DeltaNorms<F>> {
    if f.alphabet() != Alphabet::Binary {
        return Err(Error::AlphabetMismatch("Delta norms are defined on {0,1}^n".into()));
    }
    delta_norms(&centered_indicator(f, space)?, space)
}

/// `I (p (1 - p)^q + (1 - p) p^q)`, the closed form of `||Delta_i 1_A||_q^q`.
pub fn delta_norm_identity<F: Scalar>(influence: F, p: F, q: i32) -> F {
    let one = F::one();
    influence * (p * (one - p).powi(q) + (one - p) * p.powi(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::builtin::*;
    use crate::influence::{embed_dyadic, influence_exact};
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn bits(x: usize, n: usize) -> Vec<i64> {
        (0..n).map(|i| (x >> i & 1) as i64).collect()
    }

    /// Direct inner products `2^{-N} sum_x f(x) chi_S(x)`, exact.
    fn naive_coefficients(values: &[R]) -> Vec<R> {
        let n = values.len().trailing_zeros() as usize;
        (0..values.len())
            .map(|s| {
                let sum = values.iter().enumerate().fold(R::from_integer(0), |acc, (x, v)| {
                    let chi: i64 = bits(x, n)
                        .iter()
                        .zip(bits(s, n))
                        .filter(|(_, si)| *si == 1)
                        .map(|(xi, _)| 1 - 2 * xi)
                        .product();
                    acc + *v * chi
                });
                sum / R::from_integer(values.len() as i64)
            })
            .collect()
    }

    #[test]
    fn transform_examples() {
        // chi_{1} itself.
        let chi: Vec<R> = (0..4).map(|x| R::from_integer(1 - 2 * (x & 1) as i64)).collect();
        let c = walsh_transform(&chi).unwrap();
        assert_eq!(c, vec![0.into(), 1.into(), 0.into(), 0.into()]);

        let and: Vec<R> = (0..4).map(|x| R::from_integer(i64::from(x == 3))).collect();
        let c = walsh_transform(&and).unwrap();
        assert_eq!(c, naive_coefficients(&and));
        assert_eq!(c[0], R::new(1, 4));
        for s in 1..4 {
            assert_eq!(c[s] * c[s], R::new(1, 16));
        }
        let one: Vec<R> = vec![R::from_integer(1); 8];
        let c = walsh_transform(&one).unwrap();
        assert_eq!(c[0], R::from_integer(1));
        assert!(c[1..].iter().all(|x| *x == R::from_integer(0)));
        assert!(walsh_transform(&[1.0f64, 2.0, 3.0]).is_err());
    }

    #[test]
    fn transform_agrees_with_inner_products_on_all_3_bit_functions() {
        for bitsf in 0u32..256 {
            let vals: Vec<R> = (0..8).map(|x| R::from_integer((bitsf >> x & 1) as i64)).collect();
            let fast = walsh_transform(&vals).unwrap();
            assert_eq!(fast, naive_coefficients(&vals));
            assert_eq!(inverse_walsh(&fast).unwrap(), vals);
        }
    }

    #[test]
    fn parseval_examples() {
        let and = and_all(Alphabet::Binary, 2).unwrap();
        let chk = parseval_check::<f64>(&and, None).unwrap();
        assert_eq!((chk.t, chk.lhs, chk.rhs), (0.25, 0.1875, 0.1875));
        let c = parseval_check::<f64>(&constant(Alphabet::Binary, 3, true).unwrap(), None).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        let d = parseval_check::<f64>(&dictator(Alphabet::Binary, 3, 1).unwrap(), None).unwrap();
        assert_eq!((d.lhs, d.rhs), (0.25, 0.25));
        let e = embed_dyadic(Ratio::new(1, 4)).unwrap();
        let l = parseval_check::<f64>(&and, Some(&e)).unwrap();
        assert_eq!(l.t, 1.0 / 16.0);
        assert!(l.error < 1e-15);
    }

    #[test]
    fn block_spectrum_examples() {
        let d = dictator(Alphabet::Binary, 2, 0).unwrap();
        let half = embed_dyadic(Ratio::new(1, 2)).unwrap();
        let bs = block_spectrum::<f64>(&d, &half).unwrap();
        assert_eq!(bs.weights_by_level, vec![0.25, 0.25, 0.0]);

        let quarter = embed_dyadic(Ratio::new(1, 4)).unwrap();
        let d1 = dictator(Alphabet::Binary, 1, 0).unwrap();
        let bs = block_spectrum::<f64>(&d1, &quarter).unwrap();
        // Lift is AND of two bits: levels 1 and 2 carry 1/8 and 1/16.
        assert_eq!(bs.weights_by_level, vec![1.0 / 16.0, 0.125, 0.0625]);
        assert_eq!(bs.weight_nonconstant, 3.0 / 16.0);

        let and = and_all(Alphabet::Binary, 2).unwrap();
        let bs = block_spectrum::<f64>(&and, &quarter).unwrap();
        assert!((bs.weight_nonconstant - 15.0 / 256.0).abs() < 1e-15);
        assert_eq!(bs.weights_by_level.len(), 5);
    }

    #[test]
    fn concentration_examples() {
        let v = TwoPointSpace::<f64>::uniform(3, 0.5).unwrap();
        let maj = majority(Alphabet::Binary, 3).unwrap();
        let infl = influence_exact(&maj, &v).unwrap();
        let half = embed_dyadic(Ratio::new(1, 2)).unwrap();
        let bs = block_spectrum::<f64>(&maj, &half).unwrap();
        // Majority-of-3: f^ = 1/2 at {}, +-1/4 at singletons and the triple.
        assert_eq!(bs.weights_by_level, vec![0.25, 0.1875, 0.0, 0.0625]);
        let rep = concentration_report(&bs, &infl, 0.5, 0.5, 1.0, 1.0).unwrap();
        assert!(!rep.degenerate);
        // First bound: 3 * 4 * 0.5 ln 2 * 1.5 = 6.24 >= 3, second: 4 * 3 * (1/2)^1.5 = 4.24.
        assert!(rep.first_over_half && rep.second_over_half && rep.both_over_half);
        assert_eq!(rep.mass_both, 0.25);
        assert_eq!(rep.witness_level, Some(1));

        let c = constant(Alphabet::Binary, 3, true).unwrap();
        let bs = block_spectrum::<f64>(&c, &half).unwrap();
        let infl = influence_exact(&c, &v).unwrap();
        assert!(concentration_report(&bs, &infl, 1.0, 0.5, 1.0, 1.0).unwrap().degenerate);
    }

    #[test]
    fn delta_norm_examples() {
        let v = TwoPointSpace::<f64>::uniform(1, 0.5).unwrap();
        let d = delta_norms_indicator(&dictator(Alphabet::Binary, 1, 0).unwrap(), &v).unwrap();
        assert_eq!(d.per_coordinate, vec![(0.5, 0.5)]);

        let v3 = TwoPointSpace::<f64>::uniform(3, 0.5).unwrap();
        let d = delta_norms_indicator(&dictator(Alphabet::Binary, 3, 0).unwrap(), &v3).unwrap();
        assert_eq!(d.per_coordinate[1], (0.0, 0.0));

        let d = delta_norms_indicator(&majority(Alphabet::Binary, 3).unwrap(), &v3).unwrap();
        for (l2, l1) in d.per_coordinate {
            assert!((l2 * l2 - 0.125).abs() < 1e-15);
            assert!(l1 <= l2);
        }
    }
}
