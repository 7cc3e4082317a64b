//! Sharp thresholds of increasing events on `{-1,0,1}^n`.
//!
//! Along the path `(r-, r+) = (p- - h, p+ + h)` the event probability
//! `g(h)` is nondecreasing with slope at least the total influence. The
//! verifier checks, on concrete instances, that an event with symmetry of
//! order `m` crosses from above `eta` to above `1 - eta` within
//! `c3 log(1/eta) pmax log(1/pmax) / log m`.

use rand::Rng;
use serde::Serialize;

use crate::boolfn::{is_increasing, symmetry_order, BooleanFunction, SymmetryGroup};
use crate::error::{Error, Result};
use crate::influence::{influence_exact, influence_exact_symmetric, pivotal_profile};
use crate::scalar::{x_log_inv, CompensatedSum, Scalar};
use crate::spaces::{Alphabet, ProductSpace, ThreePointSpace};
use crate::stats::{item_rng, wilson_interval, Z99};

/// Default number of grid points on `[0, hmax]`.
pub const DEFAULT_GRID_POINTS: usize = 33;
/// Finite-difference step as a fraction of `hmax`.
pub const DEFAULT_DH_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMethod {
    Exact,
    MonteCarlo { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample<F> {
    pub h: F,
    pub g: F,
    /// `log(g / (1 - g))`; `None` when `g` is 0 or 1.
    pub logit: Option<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCurve<F> {
    pub samples: Vec<CurveSample<F>>,
    pub hmax: F,
}

pub fn logit<F: Scalar>(g: F) -> Option<F> {
    (g > F::zero() && g < F::one()).then(|| (g / (F::one() - g)).ln())
}

/// `Pr(E)` by exact enumeration.
pub fn event_probability<F: Scalar, S: ProductSpace<F> + ?Sized>(
    e: &BooleanFunction,
    space: &S,
) -> Result<F> {
    if e.arity() != space.n() || e.alphabet() != space.alphabet() {
        return Err(Error::ArityMismatch {
            expected: space.n(),
            actual: e.arity(),
        });
    }
    let table = e.require_table()?;
    if table.iter().all(|b| *b) {
        return Ok(F::one());
    }
    if !table.iter().any(|b| *b) {
        return Ok(F::zero());
    }
    let mut acc = CompensatedSum::new();
    for (bit, mass) in table.iter().zip(space.mass_table()?) {
        if *bit {
            acc.add(mass);
        }
    }
    Ok(acc.value())
}

fn require_ternary(e: &BooleanFunction, space: &ThreePointSpace<impl Scalar>) -> Result<()> {
    if e.alphabet() != Alphabet::Ternary {
        return Err(Error::AlphabetMismatch("threshold events live on {-1,0,1}^n".into()));
    }
    if e.arity() != space.n() {
        return Err(Error::ArityMismatch {
            expected: space.n(),
            actual: e.arity(),
        });
    }
    Ok(())
}

fn require_increasing(e: &BooleanFunction) -> Result<()> {
    let m = is_increasing(e)?;
    if m.increasing {
        Ok(())
    } else {
        let (x, y) = m.witness.expect("violations carry a witness");
        Err(Error::NotIncreasing(format!("{} has E({x}) = 1 but E({y}) = 0", e.name())))
    }
}

/// Monte Carlo estimates of `Pr(E)` under several spaces with common random
/// numbers: trial `t` uses the same uniforms for every space, so per-trial
/// indicators are monotone along the perturbation path.
fn coupled_counts<F: Scalar>(
    e: &BooleanFunction,
    spaces: &[ThreePointSpace<F>],
    seed: u64,
    first_trial: u64,
    trials: u64,
) -> Vec<u64> {
    let n = e.arity();
    let mut counts = vec![0u64; spaces.len()];
    let mut u = vec![0f64; n];
    let mut x = vec![0i8; n];
    for t in first_trial..first_trial + trials {
        let mut rng = item_rng(seed, t);
        u.iter_mut().for_each(|v| *v = rng.random());
        for (space, count) in spaces.iter().zip(counts.iter_mut()) {
            for k in 0..n {
                x[k] = space.coordinate_from_uniform(k, u[k]);
            }
            *count += u64::from(e.eval_values(&x));
        }
    }
    counts
}

pub fn default_h_grid<F: Scalar>(hmax: F, points: usize) -> Vec<F> {
    match points {
        0 => Vec::new(),
        1 => vec![F::zero()],
        _ => {
            let last = F::from_usize(points - 1).expect("small integer");
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        hmax
                    } else {
                        hmax * F::from_usize(i).expect("small integer") / last
                    }
                })
                .collect()
        }
    }
}

/// `g(h) = Pr_{p- - h, p+ + h}(E)` along `h_grid`.
pub fn g_curve<F: Scalar>(
    e: &BooleanFunction,
    space: &ThreePointSpace<F>,
    h_grid: &[F],
    method: CurveMethod,
) -> Result<ThresholdCurve<F>> {
    require_ternary(e, space)?;
    let spaces = h_grid
        .iter()
        .map(|h| space.perturb(*h))
        .collect::<Result<Vec<_>>>()?;
    let gs: Vec<F> = match method {
        CurveMethod::Exact => {
            require_increasing(e)?;
            spaces
                .iter()
                .map(|s| event_probability(e, s))
                .collect::<Result<_>>()?
        }
        CurveMethod::MonteCarlo { seed, trials } => {
            if trials == 0 {
                return Err(Error::OutOfRange("trials must be at least 1".into()));
            }
            coupled_counts(e, &spaces, seed, 0, trials)
                .into_iter()
                .map(|c| F::lit(c as f64 / trials as f64))
                .collect()
        }
    };
    Ok(ThresholdCurve {
        samples: h_grid
            .iter()
            .zip(gs)
            .map(|(&h, g)| CurveSample { h, g, logit: logit(g) })
            .collect(),
        hmax: space.perturb_limit(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RussoCheck<F> {
    pub h: F,
    pub dh: F,
    /// Central difference `(g(h + dh) - g(h - dh)) / (2 dh)`.
    pub slope: F,
    /// Total influence in the space perturbed by `h`.
    pub total_influence: F,
    /// `slope - total_influence`.
    pub margin: F,
}

pub fn russo_check<F: Scalar>(
    e: &BooleanFunction,
    space: &ThreePointSpace<F>,
    h: F,
    dh: F,
) -> Result<RussoCheck<F>> {
    require_ternary(e, space)?;
    require_increasing(e)?;
    if !(dh > F::zero()) {
        return Err(Error::OutOfRange("dh must be positive".into()));
    }
    let at = space.perturb(h)?;
    let up = space.shift(h + dh)?;
    let down = space.shift(h - dh)?;
    let slope = (event_probability(e, &up)? - event_probability(e, &down)?) / (dh + dh);
    let total_influence = influence_exact(e, &at)?.total;
    Ok(RussoCheck {
        h,
        dh,
        slope,
        total_influence,
        margin: slope - total_influence,
    })
}

/// Inputs of one sharp-threshold instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdParams<F> {
    pub p_minus: F,
    pub p_plus: F,
    pub q_minus: F,
    pub q_plus: F,
    pub eta: F,
    pub c3: F,
}

impl<F: Scalar> ThresholdParams<F> {
    /// `min{q+ - p+, p- - q-}`.
    pub fn hmax(&self) -> F {
        (self.q_plus - self.p_plus).min(self.p_minus - self.q_minus)
    }

    /// `max{q+, p-}`.
    pub fn pmax(&self) -> F {
        self.q_plus.max(self.p_minus)
    }

    /// Required window `c3 log(1/eta) pmax log(1/pmax) / log m`.
    pub fn window_bound(&self, m: usize) -> F {
        let log_m = F::from_usize(m).expect("orbit size").ln();
        self.c3 * (F::one() / self.eta).ln() * x_log_inv(self.pmax()) / log_m
    }

    fn check_ranges(&self) -> Result<()> {
        let zero = F::zero();
        let inv_e = F::one() / F::E();
        let p = self;
        if !(zero < p.q_minus && p.q_minus < p.p_minus && p.p_minus < inv_e) {
            return Err(Error::Hypothesis(format!(
                "need 0 < q- < p- < 1/e, got q- = {}, p- = {}",
                p.q_minus, p.p_minus
            )));
        }
        if !(zero < p.p_plus && p.p_plus < p.q_plus && p.q_plus < inv_e) {
            return Err(Error::Hypothesis(format!(
                "need 0 < p+ < q+ < 1/e, got p+ = {}, q+ = {}",
                p.p_plus, p.q_plus
            )));
        }
        if !(zero < p.eta && p.eta <= F::lit(0.5)) {
            return Err(Error::Hypothesis(format!("need 0 < eta <= 1/2, got {}", p.eta)));
        }
        if !(p.c3 > zero) {
            return Err(Error::Hypothesis(format!("c3 must be positive, got {}", p.c3)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointMethod {
    Exact,
    /// Batches of `batch` coupled trials until the 99% Wilson interval clears
    /// the threshold or `cap` trials have run.
    Sequential { seed: u64, batch: u64, cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub grid_points: usize,
    pub endpoint: EndpointMethod,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            endpoint: EndpointMethod::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Branch<F> {
    /// Some influence is at least `m^{-1/2}`.
    LargeInfluence {
        coordinates_above: usize,
        total_at_least_sqrt_m: bool,
    },
    /// All influences below `m^{-1/2}`; `a = max_k I(k) / (pmax log(1/pmax))^2`.
    Corollary { a: F },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchRecord<F> {
    pub h: F,
    pub g: F,
    pub total_influence: F,
    pub max_influence: F,
    pub branch: Branch<F>,
    /// `I_f / (g (1 - g))`, a lower bound on the logit slope.
    pub logit_slope_bound: F,
    /// Required rate `2 log m / (c3 pmax log(1/pmax))`.
    pub required_rate: F,
    pub rate_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointEstimate<F> {
    pub g: F,
    /// Trials used; zero for exact evaluation.
    pub trials: u64,
    /// Whether the comparison was decided (always true when exact).
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpThresholdCertificate<F> {
    pub event: String,
    pub params: ThresholdParams<F>,
    pub n: usize,
    pub m: usize,
    pub hmax: F,
    pub pmax: F,
    pub window_bound: F,
    pub start: EndpointEstimate<F>,
    pub end: EndpointEstimate<F>,
    pub logit_start: Option<F>,
    pub logit_end: Option<F>,
    /// `g(0) <= eta`: the implication holds vacuously.
    pub vacuous: bool,
    /// `g(0) > eta` and `g(hmax) > 1 - eta`.
    pub verdict: bool,
    /// The probability-form and logit-form comparisons agree.
    pub forms_agree: bool,
    /// Influences are equal within every orbit, checked on exact integer
    /// pivotal profiles.
    pub orbit_constant: bool,
    pub rate_holds_everywhere: bool,
    pub trace: Vec<BranchRecord<F>>,
}

fn endpoint<F: Scalar>(
    e: &BooleanFunction,
    space: &ThreePointSpace<F>,
    threshold: F,
    method: EndpointMethod,
) -> Result<EndpointEstimate<F>> {
    match method {
        EndpointMethod::Exact => Ok(EndpointEstimate {
            g: event_probability(e, space)?,
            trials: 0,
            resolved: true,
        }),
        EndpointMethod::Sequential { seed, batch, cap } => {
            if batch == 0 || cap == 0 {
                return Err(Error::OutOfRange("sequential sampling needs batch, cap >= 1".into()));
            }
            let threshold = threshold.as_f64();
            let (mut hits, mut trials) = (0u64, 0u64);
            loop {
                let step = batch.min(cap - trials);
                hits += coupled_counts(e, std::slice::from_ref(space), seed, trials, step)[0];
                trials += step;
                let (lo, hi) = wilson_interval(hits, trials, Z99);
                let resolved = lo > threshold || hi <= threshold;
                if resolved || trials >= cap {
                    return Ok(EndpointEstimate {
                        g: F::lit(hits as f64 / trials as f64),
                        trials,
                        resolved,
                    });
                }
            }
        }
    }
}

/// Checks the sharp-threshold implication on one instance.
///
/// Hypothesis failures (ranges, monotonicity, symmetry, `m < 2`, the window
/// bound at `c3`) are errors; a failed implication is a certificate with
/// `verdict = false`.
pub fn verify_sharp_threshold<F: Scalar>(
    e: &BooleanFunction,
    group: &SymmetryGroup,
    params: ThresholdParams<F>,
    options: VerifyOptions,
) -> Result<SharpThresholdCertificate<F>> {
    params.check_ranges()?;
    if e.alphabet() != Alphabet::Ternary {
        return Err(Error::AlphabetMismatch("threshold events live on {-1,0,1}^n".into()));
    }
    require_increasing(e)?;
    let m = symmetry_order(e, group)?;
    if m < 2 {
        return Err(Error::Hypothesis(format!(
            "symmetry of order {m}: log m = 0 makes the window unbounded"
        )));
    }
    let hmax = params.hmax();
    let window_bound = params.window_bound(m);
    if !(hmax >= window_bound) {
        return Err(Error::Hypothesis(format!(
            "window {hmax} is below c3 log(1/eta) pmax log(1/pmax) / log m = {window_bound}"
        )));
    }
    let n = e.arity();
    let base = ThreePointSpace::new(n, params.p_minus, params.p_plus)?;
    let end_space = base.perturb(hmax)?;
    let eta = params.eta;
    let start = endpoint(e, &base, eta, options.endpoint)?;
    let end = endpoint(e, &end_space, F::one() - eta, options.endpoint)?;

    // Logit form drives the verdict; probability form is reported alongside.
    let logit_or_inf = |g: F| {
        logit(g).unwrap_or_else(|| if g <= F::zero() { F::neg_infinity() } else { F::infinity() })
    };
    let logit_eta = (eta / (F::one() - eta)).ln();
    let start_above_logit = logit_or_inf(start.g) > logit_eta;
    let end_above_logit = logit_or_inf(end.g) > -logit_eta;
    let start_above = start.g > eta;
    let end_above = end.g > F::one() - eta;
    let forms_agree = start_above == start_above_logit && end_above == end_above_logit;

    let orbit_constant = orbits_have_equal_profiles(e, group)?;
    let pmax = params.pmax();
    let log_m = F::from_usize(m).expect("orbit size").ln();
    let required_rate = (log_m + log_m) / (params.c3 * x_log_inv(pmax));
    let threshold = F::one() / F::from_usize(m).expect("orbit size").sqrt();
    let mut trace = Vec::with_capacity(options.grid_points);
    for h in default_h_grid(hmax, options.grid_points) {
        let space = base.perturb(h)?;
        let g = event_probability(e, &space)?;
        let infl = influence_exact_symmetric(e, &space, group)?;
        let branch = if infl.max >= threshold {
            let above = infl.per_coordinate.iter().filter(|i| **i >= threshold).count();
            Branch::LargeInfluence {
                coordinates_above: above,
                total_at_least_sqrt_m: infl.total >= F::from_usize(m).expect("orbit size").sqrt(),
            }
        } else {
            let scale = x_log_inv(pmax);
            Branch::Corollary {
                a: infl.max / (scale * scale),
            }
        };
        let variance = g * (F::one() - g);
        let logit_slope_bound = if variance > F::zero() {
            infl.total / variance
        } else {
            F::zero()
        };
        trace.push(BranchRecord {
            h,
            g,
            total_influence: infl.total,
            max_influence: infl.max,
            branch,
            logit_slope_bound,
            required_rate,
            rate_holds: variance > F::zero() && logit_slope_bound >= required_rate,
        });
    }
    let rate_holds_everywhere = !trace.is_empty() && trace.iter().all(|r| r.rate_holds);
    Ok(SharpThresholdCertificate {
        event: e.name().to_string(),
        params,
        n,
        m,
        hmax,
        pmax,
        window_bound,
        start,
        end,
        logit_start: logit(start.g),
        logit_end: logit(end.g),
        vacuous: !start_above_logit,
        verdict: start_above_logit && end_above_logit,
        forms_agree,
        orbit_constant,
        rate_holds_everywhere,
        trace,
    })
}

/// Exact check that pivotal profiles, hence influences under any product
/// measure with identical marginals, are constant on every orbit.
pub fn orbits_have_equal_profiles(e: &BooleanFunction, group: &SymmetryGroup) -> Result<bool> {
    for orbit in group.orbits() {
        let first = pivotal_profile(e, orbit[0])?;
        for &k in &orbit[1..] {
            if pivotal_profile(e, k)? != first {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Starting point of every instance in a constant search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointSpec<F> {
    pub p_minus: F,
    pub p_plus: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum C3InstanceStatus<F> {
    /// Smallest `c3` at which this instance alone passes.
    Included { critical_c3: F },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C3Instance<F> {
    pub event: String,
    pub m: usize,
    pub status: C3InstanceStatus<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C3Search<F> {
    pub c3: F,
    pub instances: Vec<C3Instance<F>>,
}

const BISECTION_STEPS: usize = 100;

/// Endpoints `q = (p- - h, p+ + h)` for the smallest `h` satisfying the window
/// bound at `c3`, or `None` if the admissible range is exhausted first.
pub fn tight_params<F: Scalar>(
    start: EndpointSpec<F>,
    eta: F,
    c3: F,
    m: usize,
) -> Option<ThresholdParams<F>> {
    let at = |h: F| ThresholdParams {
        p_minus: start.p_minus,
        p_plus: start.p_plus,
        q_minus: start.p_minus - h,
        q_plus: start.p_plus + h,
        eta,
        c3,
    };
    let ok = |params: &ThresholdParams<F>| {
        params.check_ranges().is_ok() && params.hmax() >= params.window_bound(m)
    };
    let limit = start.p_minus.min(F::one() / F::E() - start.p_plus);
    let (mut lo, mut hi) = (F::zero(), limit);
    // The bound grows more slowly than h, so the feasible set is an interval
    // ending just below the range limit.
    if !ok(&at(limit * (F::one() - F::lit(1e-12)))) {
        return None;
    }
    hi = hi * (F::one() - F::lit(1e-12));
    for _ in 0..BISECTION_STEPS {
        let mid = (lo + hi) / F::lit(2.0);
        if ok(&at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(at(hi))
}

struct Prepared<'a> {
    e: &'a BooleanFunction,
    m: usize,
}

fn passes<F: Scalar>(inst: &Prepared<'_>, start: EndpointSpec<F>, eta: F, c3: F) -> Result<Option<bool>> {
    let Some(params) = tight_params(start, eta, c3, inst.m) else {
        return Ok(None);
    };
    // Same construction as the verifier, so the frontier verdict agrees bit for bit.
    let space = ThreePointSpace::new(inst.e.arity(), params.p_minus, params.p_plus)?.perturb(params.hmax())?;
    Ok(Some(event_probability(inst.e, &space)? > F::one() - eta))
}

fn bisect_c3<F: Scalar>(
    family: &[Prepared<'_>],
    start: EndpointSpec<F>,
    eta: F,
) -> Result<F> {
    let all_pass = |c3: F| -> Result<Option<bool>> {
        let mut all = true;
        for inst in family {
            match passes(inst, start, eta, c3)? {
                None => return Ok(None),
                Some(p) => all &= p,
            }
        }
        Ok(Some(all))
    };
    // Window length grows with c3; find the largest c3 whose window still
    // fits in the admissible range, then bisect on the pass predicate below it.
    let feasible = |c3: F| family.iter().all(|inst| tight_params(start, eta, c3, inst.m).is_some());
    let (mut lo, mut hi) = (F::zero(), F::one());
    while feasible(hi) {
        lo = hi;
        hi = hi + hi;
        if hi > F::lit(1e12) {
            break;
        }
    }
    if feasible(hi) {
        lo = hi;
    } else {
        for _ in 0..BISECTION_STEPS {
            let mid = (lo + hi) / F::lit(2.0);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let mut hi = lo;
    if !(hi > F::zero()) || all_pass(hi)? != Some(true) {
        return Err(Error::Hypothesis(
            "no admissible window reaches 1 - eta for some instance".into(),
        ));
    }
    let mut lo = F::zero();
    for _ in 0..BISECTION_STEPS {
        let mid = (lo + hi) / F::lit(2.0);
        if all_pass(mid)? == Some(true) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `c3` for which every instance's certificate passes when the end
/// point sits exactly at the window bound. Instances with `g(0) <= eta`
/// are skipped: the implication holds vacuously for them.
pub fn min_c3_search<F: Scalar>(
    family: &[(BooleanFunction, SymmetryGroup)],
    eta: F,
    start: EndpointSpec<F>,
) -> Result<C3Search<F>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut prepared = Vec::new();
    let mut instances = Vec::new();
    for (e, group) in family {
        require_increasing(e)?;
        let m = symmetry_order(e, group)?;
        if m < 2 {
            return Err(Error::Hypothesis(format!("{} has symmetry of order {m}", e.name())));
        }
        let base = ThreePointSpace::new(e.arity(), start.p_minus, start.p_plus)?;
        let g0 = event_probability(e, &base)?;
        if g0 <= eta {
            instances.push(C3Instance {
                event: e.name().to_string(),
                m,
                status: C3InstanceStatus::Skipped {
                    reason: format!("g(0) = {g0} <= eta; implication is vacuous"),
                },
            });
            continue;
        }
        let single = [Prepared { e, m }];
        let critical_c3 = bisect_c3(&single, start, eta)?;
        instances.push(C3Instance {
            event: e.name().to_string(),
            m,
            status: C3InstanceStatus::Included { critical_c3 },
        });
        prepared.push(Prepared { e, m });
    }
    if prepared.is_empty() {
        return Err(Error::Hypothesis("every instance is vacuous".into()));
    }
    let c3 = bisect_c3(&prepared, start, eta)?;
    Ok(C3Search { c3, instances })
}
