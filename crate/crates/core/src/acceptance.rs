//! The acceptance battery: eight end-to-end checks with stated tolerances and
//! runtime limits, shared by the `acceptance` test target and the CLI.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::builtin::{self, at_least};
use crate::boolfn::{enumerate_monotone, BooleanFunction, SymmetryGroup};
use crate::error::Result;
use crate::ineqlab::{build_family, constant_search, default_family, InequalityId, VarianceForm};
use crate::influence::{embed_dyadic, influence_exact, w_embedded, DyadicEmbedding};
use crate::jmperc::{critical_marks, crossing, rasterize, sample_jm_trial, Direction, RectSpec, SweepParams, sweep};
use crate::spaces::{Alphabet, ThreePointSpace, TwoPointSpace};
use crate::spectrum::{block_spectrum, concentration_search, delta_norm_identity, delta_norms_indicator, parseval_check};
use crate::stats::{wilson_half_width, Z95};
use crate::threshold::{
    event_probability, min_c3_search, russo_check, tight_params, verify_sharp_threshold, EndpointSpec,
    VerifyOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct AcceptanceOptions {
    /// Smaller Monte Carlo batteries; exact criteria are unchanged.
    pub quick: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {} {:<28} {:>8.2}s / {:>4}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

type Check = fn(AcceptanceOptions) -> Result<(bool, String)>;

const CRITERIA: [(u8, &str, u64, Check); 8] = [
    (1, "parseval", 10, parseval),
    (2, "delta-norm identity", 30, delta_identity),
    (3, "russo slope", 120, russo),
    (4, "embedding bound", 1, embedding),
    (5, "constant frontiers", 300, frontiers),
    (6, "threshold certificates", 180, certificates),
    (7, "jm sharp threshold", 600, jm_threshold),
    (8, "spectral concentration", 60, concentration),
];

pub fn criterion_ids() -> impl Iterator<Item = u8> {
    CRITERIA.iter().map(|c| c.0)
}

pub fn run_criterion(id: u8, options: AcceptanceOptions) -> Option<CriterionOutcome> {
    let &(id, name, limit, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = check(options);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit);
    let (ok, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > limit {
        detail.push_str("; over the time limit");
    }
    Some(CriterionOutcome {
        id,
        name,
        passed: ok && elapsed <= limit,
        detail,
        elapsed,
        limit,
    })
}

pub fn run_all(options: AcceptanceOptions) -> Vec<CriterionOutcome> {
    criterion_ids().filter_map(|id| run_criterion(id, options)).collect()
}

fn builtin_functions() -> Result<Vec<BooleanFunction>> {
    let b = Alphabet::Binary;
    let mut fs = vec![
        builtin::constant(b, 3, false)?,
        builtin::constant(b, 3, true)?,
        builtin::dictator(b, 3, 1)?,
        builtin::tribes(b, 2, 3)?,
        builtin::tribes(b, 3, 3)?,
        builtin::cyclic_run(b, 8, 2)?,
        builtin::at_least(b, 8, 2)?,
        builtin::and_all(b, 6)?,
        builtin::or_all(b, 6)?,
    ];
    for n in [3, 5, 7] {
        fs.push(builtin::majority(b, n)?);
    }
    for n in 2..=6 {
        fs.push(builtin::parity(n)?);
    }
    Ok(fs)
}

fn monotone_binary(n_max: usize) -> Result<Vec<BooleanFunction>> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        out.extend(enumerate_monotone(Alphabet::Binary, n, true)?);
    }
    Ok(out)
}

fn parseval(_: AcceptanceOptions) -> Result<(bool, String)> {
    let mut fs = builtin_functions()?;
    fs.extend(monotone_binary(4)?);
    let embeddings = [embed_dyadic(Ratio::new(1, 4))?, embed_dyadic(Ratio::new(1, 8))?];
    let (mut worst, mut checks) = (0f64, 0usize);
    for f in &fs {
        worst = worst.max(parseval_check::<f64>(f, None)?.error);
        checks += 1;
        for e in &embeddings {
            if f.arity() * e.m() as usize <= 24 {
                worst = worst.max(parseval_check::<f64>(f, Some(e))?.error);
                checks += 1;
            }
        }
    }
    Ok((worst <= 1e-12, format!("{checks} spectra, max |t(1-t) - sum| = {worst:.2e}")))
}

fn delta_identity(_: AcceptanceOptions) -> Result<(bool, String)> {
    let fs = monotone_binary(4)?;
    let mut worst = 0f64;
    let mut checks = 0usize;
    for f in &fs {
        for p in [0.125f64, 0.25, 0.5] {
            let space = TwoPointSpace::uniform(f.arity(), p)?;
            let infl = influence_exact(f, &space)?;
            let norms = delta_norms_indicator(f, &space)?;
            for (i, &(l2, l1)) in norms.per_coordinate.iter().enumerate() {
                let ii = infl.per_coordinate[i];
                worst = worst.max((l1 - delta_norm_identity(ii, p, 1)).abs());
                worst = worst.max((l2 * l2 - delta_norm_identity(ii, p, 2)).abs());
                checks += 2;
            }
        }
    }
    Ok((worst <= 1e-12, format!("{checks} norms, max error {worst:.2e}")))
}

fn russo(_: AcceptanceOptions) -> Result<(bool, String)> {
    let mut events = Vec::new();
    for n in 1..=3 {
        events.extend(enumerate_monotone(Alphabet::Ternary, n, true)?);
    }
    let grid = [0.0, 0.05, 0.1, 0.15, 0.2];
    let outcomes = events
        .par_iter()
        .map(|e| {
            let space = ThreePointSpace::new(e.arity(), 0.3, 0.1)?;
            let mut worst = f64::INFINITY;
            for h in grid {
                worst = worst.min(russo_check(e, &space, h, 1e-4)?.margin);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = outcomes.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((
        worst >= -1e-6,
        format!("{} events x {} h values, min(slope - I_f) = {worst:.2e}", events.len(), grid.len()),
    ))
}

/// Total influence of the AND of `k` uniform bits, counted directly.
fn and_total_influence(k: u32) -> Ratio<u64> {
    let size = 1u64 << k;
    let and = |x: u64| x == size - 1;
    let mut pivotal = 0u64;
    for i in 0..k {
        pivotal += (0..size).filter(|&x| and(x) != and(x ^ (1 << i))).count() as u64;
    }
    Ratio::new(pivotal, size)
}

fn embedding(_: AcceptanceOptions) -> Result<(bool, String)> {
    let identity = builtin::dictator(Alphabet::Binary, 1, 0)?;
    let bound = 2.0 / std::f64::consts::LN_2;
    let mut ok = true;
    let mut worst_ratio = 0f64;
    for k in 1..=6u32 {
        let e: DyadicEmbedding = embed_dyadic(Ratio::new(1, 1u64 << k))?;
        let w = w_embedded(&identity, &e)?;
        let closed = Ratio::new(u64::from(k) * 2, 1u64 << k);
        ok &= w == closed && w == and_total_influence(k);
        let p = e.p_f64();
        let ratio = (*w.numer() as f64 / *w.denom() as f64) / (p * (1.0 / p).ln());
        worst_ratio = worst_ratio.max(ratio);
    }
    ok &= worst_ratio <= bound + 1e-12;
    Ok((ok, format!("w = k 2^(1-k) exactly for k = 1..6, max w/(p log 1/p) = {worst_ratio:.6}")))
}

fn frontiers(_: AcceptanceOptions) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in InequalityId::ALL {
        let family = build_family::<f64>(&default_family(id))?;
        let a = constant_search(id, &family, VarianceForm::Product)?;
        let b = constant_search(id, &family, VarianceForm::Product)?;
        let reproducible = a.value.to_bits() == b.value.to_bits() && a.witness == b.witness;
        let good = a.value.is_finite() && a.value > 0.0;
        ok &= reproducible && good;
        parts.push(format!("{id}={:.4}", a.value));
    }
    Ok((ok, parts.join(" ")))
}

fn certificates(_: AcceptanceOptions) -> Result<(bool, String)> {
    let eta = 0.2;
    let start = EndpointSpec { p_minus: 0.35, p_plus: 0.06 };
    let family: Vec<(BooleanFunction, SymmetryGroup)> = [4, 5, 6]
        .iter()
        .map(|&n| Ok((at_least(Alphabet::Ternary, n, 1)?, SymmetryGroup::cyclic(n))))
        .collect::<Result<_>>()?;
    let search = min_c3_search(&family, eta, start)?;
    let mut ok = true;
    for (e, group) in &family {
        let m = group.min_orbit_size();
        let Some(params) = tight_params(start, eta, search.c3, m) else {
            return Ok((false, format!("no admissible window for {} at c3 = {}", e.name(), search.c3)));
        };
        let cert = verify_sharp_threshold(e, group, params, VerifyOptions::default())?;
        ok &= cert.verdict && cert.orbit_constant && cert.forms_agree;
    }
    Ok((ok, format!("shared c3 = {:.6} over n = 4, 5, 6", search.c3)))
}

fn jm_threshold(options: AcceptanceOptions) -> Result<(bool, String)> {
    let trials = if options.quick { 100 } else { 400 };
    let params = |s: f64| SweepParams {
        s,
        lambda: 1.0,
        rect: RectSpec::Square,
        resolution: 8,
        trials,
        seed: 7,
    };
    // Direct crossings at three colour probabilities against the critical marks.
    let base = params(20.0);
    let rect = base.rect.resolve(base.s);
    let probes = [0.35, 0.5, 0.65];
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| {
            let config = sample_jm_trial(base.s, base.lambda, 0.5, base.seed, t)?;
            let raster = rasterize(&config, base.resolution)?;
            let marks = critical_marks(&raster, &config, rect)?;
            let mut direct = [false; 3];
            let mut consistent = true;
            for (k, &p) in probes.iter().enumerate() {
                let black: Vec<bool> = config.seeds.iter().map(|s| s.mark < p).collect();
                let colors = raster.colors(&black);
                direct[k] = crossing(&raster, &colors, rect, Direction::Horizontal, true)?;
                let white = crossing(&raster, &colors, rect, Direction::Vertical, false)?;
                consistent &= direct[k] == marks.black_crosses(p) && white == marks.white_crosses(p);
            }
            Ok((direct, consistent, marks))
        })
        .collect::<Result<Vec<_>>>()?;
    let coupled = rows.iter().all(|(d, c, _)| *c && d[0] <= d[1] && d[1] <= d[2]);
    let count = |k: usize| rows.iter().filter(|(d, _, _)| d[k]).count() as u64;
    let white_half = rows.iter().filter(|(_, _, m)| m.white_crosses(0.5)).count() as u64;
    let (low, mid, high) = (count(0), count(1), count(2));
    let gap = (mid as f64 - white_half as f64).abs() / trials as f64;
    let half_width = wilson_half_width(mid, trials, Z95).max(wilson_half_width(white_half, trials, Z95));
    let rising = low < high;
    let dual = gap <= 2.0 * half_width;

    let mut widths = Vec::new();
    for s in [10.0, 20.0, 40.0] {
        widths.push(sweep(params(s), &probes)?.window_width());
    }
    let shrinking = widths.windows(2).all(|w| w[1] < w[0]);
    let f = |c: u64| c as f64 / trials as f64;
    Ok((
        coupled && rising && dual && shrinking,
        format!(
            "{trials} trials: F(0.35) = {:.3} < F(0.65) = {:.3}, coupling {}, |black - white| at 1/2 = {gap:.3} <= {:.3}, widths {:.3} > {:.3} > {:.3}",
            f(low),
            f(high),
            if coupled { "exact" } else { "BROKEN" },
            2.0 * half_width,
            widths[0],
            widths[1],
            widths[2]
        ),
    ))
}

fn concentration(_: AcceptanceOptions) -> Result<(bool, String)> {
    let cases = [(Ratio::new(1u64, 2u64), 1u32), (Ratio::new(1, 2), 2), (Ratio::new(1, 4), 2)];
    let mut ok = true;
    let mut checked = 0;
    for n in 1..=2 {
        for f in enumerate_monotone(Alphabet::Binary, n, false)? {
            for &(p, m) in &cases {
                let emb = DyadicEmbedding::with_bits(*p.numer() as f64 / *p.denom() as f64, m)?;
                let pf = emb.p_f64();
                let space = TwoPointSpace::uniform(n, pf)?;
                let infl = influence_exact(&f, &space)?;
                let t = event_probability(&f, &space)?;
                let spectrum = block_spectrum::<f64>(&f, &emb)?;
                let found = concentration_search(&spectrum, &infl, t, pf)?;
                ok &= found.is_some_and(|r| {
                    r.both_over_half
                        && r.mass_both > 0.5 * spectrum.weight_nonconstant
                        && r.witness_level.is_some_and(|s| s >= 1)
                });
                checked += 1;
            }
        }
    }
    Ok((ok, format!("{checked} (f, p, m) cases with a witness level")))
}
