//! Numerical checks of influence inequalities and empirical constant frontiers.
//!
//! Each inequality is evaluated on exact influences of a concrete instance
//! `(f, space)`. Lower-bound inequalities have the shape `lhs >= c * rhs(c)`;
//! the Delta inequality is an upper bound `||f||^2 <= K * rhs`. A frontier is the
//! extremal constant consistent with every informative instance of a family.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::{builtin, enumerate_monotone, BooleanFunction};
use crate::error::{Error, Result};
use crate::influence::influence_exact;
use crate::scalar::{compensated_sum, x_log_inv, Scalar};
use crate::spaces::{Alphabet, AnySpace, ProductSpace, ThreePointSpace, TwoPointSpace};
use crate::spectrum::{centered_indicator, delta_norms};
use crate::threshold::event_probability;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    L2elFirst,
    L2elSecond,
    CorollaryC,
    L1dif,
    T2,
    DeltaK,
    Bkkkl,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::L2elFirst,
        InequalityId::L2elSecond,
        InequalityId::CorollaryC,
        InequalityId::L1dif,
        InequalityId::T2,
        InequalityId::DeltaK,
        InequalityId::Bkkkl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::L2elFirst => "l2el1",
            InequalityId::L2elSecond => "l2el2",
            InequalityId::CorollaryC => "corollary_c",
            InequalityId::L1dif => "l1dif",
            InequalityId::T2 => "t2",
            InequalityId::DeltaK => "deltak",
            InequalityId::Bkkkl => "bkkkl",
        }
    }

    /// Whether the constant multiplies the right side of an upper bound.
    pub fn is_upper_bound(self) -> bool {
        self == InequalityId::DeltaK
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "l2el1" | "l2el_first" => InequalityId::L2elFirst,
            "l2el2" | "l2el_second" => InequalityId::L2elSecond,
            "c" | "corollary_c" | "corollary" => InequalityId::CorollaryC,
            "l1dif" => InequalityId::L1dif,
            "t2" => InequalityId::T2,
            "deltak" | "delta_k" | "delta" => InequalityId::DeltaK,
            "bkkkl" => InequalityId::Bkkkl,
            other => return Err(Error::Parse(format!("unknown inequality id {other:?}"))),
        })
    }
}

/// Which variance proxy multiplies the lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceForm {
    /// `t (1 - t)`.
    #[default]
    Product,
    /// `min{t, 1 - t}`.
    Min,
}

impl VarianceForm {
    fn apply<F: Scalar>(self, t: F) -> F {
        match self {
            VarianceForm::Product => t * (F::one() - t),
            VarianceForm::Min => t.min(F::one() - t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    /// Right side nonpositive (lower bounds) or nothing to bound.
    Vacuous,
    HypothesisNotMet,
}

/// A function together with the space it is measured in.
#[derive(Debug, Clone)]
pub struct Instance<F> {
    pub function: BooleanFunction,
    pub space: AnySpace<F>,
}

impl<F: Scalar> Instance<F> {
    pub fn new(function: BooleanFunction, space: AnySpace<F>) -> Result<Self> {
        if function.alphabet() != space.alphabet() || function.arity() != space.n() {
            return Err(Error::AlphabetMismatch(format!(
                "{} does not live on {space}",
                function.name()
            )));
        }
        Ok(Self { function, space })
    }

    pub fn label(&self) -> String {
        format!("{}@{}", self.function.name(), self.space)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceInfo<F> {
    pub label: String,
    pub n: usize,
    pub t: F,
    pub total_influence: F,
    pub max_influence: F,
    /// `p`, `pmax` or `max p_i log(1/p_i)` scale entering the bound.
    pub scale: Option<F>,
    /// `delta`, `a` or `eps` as used in the check.
    pub parameter: Option<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityVerdict<F> {
    pub id: InequalityId,
    pub instance: InstanceInfo<F>,
    pub constant: F,
    pub lhs: F,
    pub rhs: F,
    /// `lhs / rhs`; absent when `rhs <= 0`.
    pub ratio: Option<F>,
    pub pass: bool,
    pub status: Status,
    /// Extremal constant for this instance: largest passing `c` for lower
    /// bounds, smallest passing `K` for the upper bound.
    pub critical: Option<F>,
}

struct Facts<F> {
    label: String,
    n: usize,
    t: F,
    total: F,
    max: F,
}

fn facts<F: Scalar>(inst: &Instance<F>) -> Result<Facts<F>> {
    let t = event_probability(&inst.function, &inst.space)?;
    let report = influence_exact(&inst.function, &inst.space)?;
    Ok(Facts {
        label: inst.label(),
        n: inst.function.arity(),
        t,
        total: report.total,
        max: report.max,
    })
}

fn is_degenerate(f: &BooleanFunction) -> Result<bool> {
    let table = f.require_table()?;
    Ok(table.iter().all(|b| *b) || !table.iter().any(|b| *b))
}

/// Options for a single check.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CheckOptions<F> {
    /// `delta`, `a` or `eps`; the tightest value from exact influences when absent.
    pub parameter: Option<F>,
    pub variance: VarianceForm,
}

/// Largest `u > 1` with `u log u <= k`, to bisection precision.
fn solve_u_log_u<F: Scalar>(k: F) -> F {
    let f = |u: F| u * u.ln();
    let (mut lo, mut hi) = (F::one(), F::lit(2.0));
    while f(hi) < k {
        lo = hi;
        hi = hi + hi;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / F::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

struct Evaluated<F> {
    lhs: F,
    rhs: F,
    status: Status,
    critical: Option<F>,
    scale: Option<F>,
    parameter: Option<F>,
}

fn not_met<F: Scalar>(scale: Option<F>, parameter: Option<F>) -> Evaluated<F> {
    Evaluated {
        lhs: F::zero(),
        rhs: F::zero(),
        status: Status::HypothesisNotMet,
        critical: None,
        scale,
        parameter,
    }
}

fn lower_bound<F: Scalar>(lhs: F, rhs: F, critical: Option<F>, scale: Option<F>, parameter: Option<F>) -> Evaluated<F> {
    let status = if rhs <= F::zero() {
        Status::Vacuous
    } else if lhs >= rhs {
        Status::Holds
    } else {
        Status::Fails
    };
    Evaluated {
        lhs,
        rhs,
        status,
        critical,
        scale,
        parameter,
    }
}

fn half<F: Scalar>() -> F {
    F::lit(0.5)
}

/// Shared body of the l2el1 and l1dif bounds, with denominator `den`.
fn log_ratio_bound<F: Scalar>(facts: &Facts<F>, den: F, c: F, delta: Option<F>, form: VarianceForm) -> Evaluated<F> {
    let delta = delta.unwrap_or(facts.max);
    if delta < facts.max || !(delta > F::zero()) {
        return not_met(Some(den), Some(delta));
    }
    let var = form.apply(facts.t);
    let a = var / den;
    let b = var / (delta.sqrt() * facts.total);
    let arg = c * b;
    let rhs = if arg <= F::one() { F::zero() } else { c * a * arg.ln() };
    let critical = solve_u_log_u(den / delta.sqrt()) / b;
    lower_bound(facts.total, rhs, Some(critical), Some(den), Some(delta))
}

fn evaluate<F: Scalar>(
    id: InequalityId,
    inst: &Instance<F>,
    facts: &Facts<F>,
    c: F,
    opts: CheckOptions<F>,
) -> Result<Evaluated<F>> {
    let form = opts.variance;
    let var = form.apply(facts.t);
    let two_point = |what: &str| match &inst.space {
        AnySpace::Two(s) => Ok(s),
        AnySpace::Three(_) => Err(Error::AlphabetMismatch(format!("{what} is stated on two-point spaces"))),
    };
    let uniform = |what: &str| -> Result<F> {
        two_point(what)?
            .common_p()
            .ok_or_else(|| Error::OutOfRange(format!("{what} needs a uniform p")))
    };
    Ok(match id {
        InequalityId::L2elFirst => {
            let p = uniform("l2el1")?;
            if p > half() {
                return Ok(not_met(Some(p), opts.parameter));
            }
            log_ratio_bound(facts, x_log_inv(p), c, opts.parameter, form)
        }
        InequalityId::L1dif => {
            let s = two_point("l1dif")?;
            if s.probs().iter().any(|p| *p > half()) {
                return Ok(not_met(None, opts.parameter));
            }
            let den = s
                .probs()
                .iter()
                .map(|p| x_log_inv(*p))
                .fold(F::zero(), F::max);
            log_ratio_bound(facts, den, c, opts.parameter, form)
        }
        InequalityId::L2elSecond | InequalityId::CorollaryC => {
            let p = if id == InequalityId::L2elSecond {
                let p = uniform("l2el2")?;
                if p > half() {
                    return Ok(not_met(Some(p), opts.parameter));
                }
                p
            } else {
                let AnySpace::Three(s) = &inst.space else {
                    return Err(Error::AlphabetMismatch("corollary_c is stated on three-point spaces".into()));
                };
                let inv_e = F::one() / F::E();
                if s.p_minus() > inv_e || s.p_plus() > inv_e {
                    return Ok(not_met(Some(s.pmax()), opts.parameter));
                }
                s.pmax()
            };
            let scale = x_log_inv(p);
            let tight = facts.max / (scale * scale);
            let a = opts.parameter.unwrap_or(tight);
            if a > half() || a < tight || !(a > F::zero()) {
                return Ok(not_met(Some(p), Some(a)));
            }
            let log_inv_a = (F::one() / a).ln();
            let rhs = c * var / scale * log_inv_a;
            let critical = facts.total * scale / (var * log_inv_a);
            lower_bound(facts.total, rhs, Some(critical), Some(p), Some(a))
        }
        InequalityId::T2 => {
            let p = uniform("t2")?;
            let pq = p * (F::one() - p);
            let tight = pq * facts.max;
            let eps = opts.parameter.unwrap_or(tight);
            if eps < tight || !(eps > F::zero()) {
                return Ok(not_met(Some(p), Some(eps)));
            }
            let log_inv_eps = (F::one() / eps).ln();
            let den = pq * (F::lit(2.0) / pq).ln();
            let rhs = c * var / den * log_inv_eps;
            let critical = (log_inv_eps > F::zero()).then(|| facts.total * den / (var * log_inv_eps));
            lower_bound(facts.total, rhs, critical, Some(p), Some(eps))
        }
        InequalityId::Bkkkl => {
            if facts.n < 2 {
                return Ok(not_met(None, None));
            }
            let nf = F::from_usize(facts.n).expect("arity");
            let bound = var * nf.ln() / nf;
            lower_bound(facts.max, c * bound, Some(facts.max / bound), None, None)
        }
        InequalityId::DeltaK => unreachable!("handled by evaluate_delta"),
    })
}

fn evaluate_delta<F: Scalar>(inst: &Instance<F>, k: F) -> Result<Evaluated<F>> {
    let AnySpace::Two(space) = &inst.space else {
        return Err(Error::AlphabetMismatch("the Delta inequality is defined on two-point spaces".into()));
    };
    let values = centered_indicator(&inst.function, space)?;
    let masses = space.mass_table()?;
    let lhs = compensated_sum(values.iter().zip(&masses).map(|(v, m)| *m * *v * *v));
    let norms = delta_norms(&values, space)?;
    let sum = compensated_sum(norms.per_coordinate.iter().filter(|(l2, _)| *l2 > F::zero()).map(
        |&(l2, l1)| l2 * l2 / (F::E() * l2 / l1).ln(),
    ));
    let min_pq = space
        .probs()
        .iter()
        .map(|p| *p * (F::one() - *p))
        .fold(F::infinity(), F::min);
    let log_factor = (F::lit(2.0) / min_pq).ln();
    let rhs = k * log_factor * sum;
    if is_degenerate(&inst.function)? {
        return Ok(Evaluated {
            lhs,
            rhs,
            status: Status::Vacuous,
            critical: None,
            scale: Some(log_factor),
            parameter: None,
        });
    }
    assert!(sum > F::zero(), "nonconstant function with every Delta_i zero");
    Ok(Evaluated {
        lhs,
        rhs,
        status: if lhs <= rhs { Status::Holds } else { Status::Fails },
        critical: Some(lhs / (log_factor * sum)),
        scale: Some(log_factor),
        parameter: None,
    })
}

/// Evaluates inequality `id` on one instance at `constant`.
pub fn check<F: Scalar>(
    id: InequalityId,
    inst: &Instance<F>,
    constant: F,
    opts: CheckOptions<F>,
) -> Result<InequalityVerdict<F>> {
    let degenerate = is_degenerate(&inst.function)?;
    if degenerate && id != InequalityId::DeltaK {
        return Err(Error::Degenerate);
    }
    let facts = facts(inst)?;
    let ev = if id == InequalityId::DeltaK {
        evaluate_delta(inst, constant)?
    } else {
        evaluate(id, inst, &facts, constant, opts)?
    };
    let pass = matches!(ev.status, Status::Holds | Status::Vacuous);
    Ok(InequalityVerdict {
        id,
        instance: InstanceInfo {
            label: facts.label,
            n: facts.n,
            t: facts.t,
            total_influence: facts.total,
            max_influence: facts.max,
            scale: ev.scale,
            parameter: ev.parameter,
        },
        constant,
        lhs: ev.lhs,
        rhs: ev.rhs,
        ratio: (ev.rhs > F::zero()).then(|| ev.lhs / ev.rhs),
        pass,
        status: ev.status,
        critical: ev.critical,
    })
}

fn two_point<F: Scalar>(f: &BooleanFunction, probs: Vec<F>) -> Result<Instance<F>> {
    Instance::new(f.clone(), AnySpace::Two(TwoPointSpace::new(probs)?))
}

pub fn check_l2el_first<F: Scalar>(f: &BooleanFunction, p: F, c: F) -> Result<InequalityVerdict<F>> {
    let inst = two_point(f, vec![p; f.arity()])?;
    check(InequalityId::L2elFirst, &inst, c, CheckOptions::default())
}

pub fn check_l2el_second<F: Scalar>(f: &BooleanFunction, p: F, a: Option<F>, c: F) -> Result<InequalityVerdict<F>> {
    let inst = two_point(f, vec![p; f.arity()])?;
    let opts = CheckOptions { parameter: a, ..Default::default() };
    check(InequalityId::L2elSecond, &inst, c, opts)
}

pub fn check_corollary_c<F: Scalar>(
    f: &BooleanFunction,
    p_minus: F,
    p_plus: F,
    a: Option<F>,
    c: F,
) -> Result<InequalityVerdict<F>> {
    let space = ThreePointSpace::new(f.arity(), p_minus, p_plus)?;
    let inst = Instance::new(f.clone(), AnySpace::Three(space))?;
    let opts = CheckOptions { parameter: a, ..Default::default() };
    check(InequalityId::CorollaryC, &inst, c, opts)
}

pub fn check_l1dif<F: Scalar>(f: &BooleanFunction, probs: Vec<F>, delta: Option<F>, c: F) -> Result<InequalityVerdict<F>> {
    let inst = two_point(f, probs)?;
    let opts = CheckOptions { parameter: delta, ..Default::default() };
    check(InequalityId::L1dif, &inst, c, opts)
}

pub fn check_t2<F: Scalar>(f: &BooleanFunction, p: F, eps: Option<F>, c: F) -> Result<InequalityVerdict<F>> {
    let inst = two_point(f, vec![p; f.arity()])?;
    let opts = CheckOptions { parameter: eps, ..Default::default() };
    check(InequalityId::T2, &inst, c, opts)
}

pub fn check_delta_k<F: Scalar>(f: &BooleanFunction, probs: Vec<F>, k: F) -> Result<InequalityVerdict<F>> {
    check(InequalityId::DeltaK, &two_point(f, probs)?, k, CheckOptions::default())
}

pub fn check_bkkkl<F: Scalar>(
    f: &BooleanFunction,
    space: AnySpace<F>,
    c: F,
    variance: VarianceForm,
) -> Result<InequalityVerdict<F>> {
    let opts = CheckOptions { parameter: None, variance };
    check(InequalityId::Bkkkl, &Instance::new(f.clone(), space)?, c, opts)
}

/// Test families for constant searches.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FamilySpec {
    /// Nonconstant monotone functions on `{0,1}^k`, `1 <= k <= n_max`, at each `p`.
    Monotone { n_max: usize, ps: Vec<f64> },
    /// Nonconstant monotone functions on `{0,1}^k`, `2 <= k <= n_max`, at
    /// every non-uniform vector with entries from `ps`.
    Mixed { n_max: usize, ps: Vec<f64> },
    /// Nonconstant monotone events on `{-1,0,1}^k` at each `(p-, p+)`.
    Ternary { n_max: usize, endpoints: Vec<(f64, f64)> },
    /// Built-in functions at larger `n`, at each `p`.
    Builtin { ps: Vec<f64> },
}

pub const DEFAULT_PS: [f64; 3] = [0.125, 0.25, 0.5];
pub const DEFAULT_ENDPOINTS: [(f64, f64); 4] = [(0.1, 0.1), (0.05, 0.2), (0.2, 0.05), (0.3, 0.3)];

impl FamilySpec {
    pub fn instances<F: Scalar>(&self) -> Result<Vec<Instance<F>>> {
        let mut out = Vec::new();
        match self {
            FamilySpec::Monotone { n_max, ps } => {
                for n in 1..=*n_max {
                    for f in enumerate_monotone(Alphabet::Binary, n, false)? {
                        for &p in ps {
                            out.push(two_point(&f, vec![F::lit(p); n])?);
                        }
                    }
                }
            }
            FamilySpec::Mixed { n_max, ps } => {
                for n in 2..=*n_max {
                    let vectors = mixed_vectors(ps, n);
                    for f in enumerate_monotone(Alphabet::Binary, n, false)? {
                        for probs in &vectors {
                            out.push(two_point(&f, probs.iter().map(|p| F::lit(*p)).collect())?);
                        }
                    }
                }
            }
            FamilySpec::Ternary { n_max, endpoints } => {
                for n in 1..=*n_max {
                    for f in enumerate_monotone(Alphabet::Ternary, n, false)? {
                        for &(pm, pp) in endpoints {
                            let space = ThreePointSpace::new(n, F::lit(pm), F::lit(pp))?;
                            out.push(Instance::new(f.clone(), AnySpace::Three(space))?);
                        }
                    }
                }
            }
            FamilySpec::Builtin { ps } => {
                let b = Alphabet::Binary;
                let fs = [
                    builtin::majority(b, 5)?,
                    builtin::majority(b, 7)?,
                    builtin::tribes(b, 2, 3)?,
                    builtin::tribes(b, 3, 3)?,
                    builtin::and_all(b, 6)?,
                    builtin::or_all(b, 6)?,
                    builtin::at_least(b, 8, 2)?,
                    builtin::cyclic_run(b, 8, 2)?,
                ];
                for f in &fs {
                    for &p in ps {
                        out.push(two_point(f, vec![F::lit(p); f.arity()])?);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn mixed_vectors(ps: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                ps.iter().map(move |&p| {
                    let mut w = v.clone();
                    w.push(p);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|p| *p != v[0]));
    out
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// `monotone:n=3`, `monotone:n=4,p=0.125;0.5`, `mixed:n=3`,
    /// `ternary:n=3,ep=0.1/0.1;0.05/0.2`, `builtin:p=0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut n_max = None;
        let mut ps = None;
        let mut endpoints = None;
        let bad = |what: &str| Error::Parse(format!("family {s:?}: {what}"));
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match k.trim() {
                "n" => n_max = Some(v.trim().parse().map_err(|_| bad("bad n"))?),
                "p" => {
                    ps = Some(
                        v.split(';')
                            .map(|x| x.trim().parse::<f64>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| bad("bad p list"))?,
                    )
                }
                "ep" => {
                    let mut list = Vec::new();
                    for pair in v.split(';') {
                        let (a, b) = pair.split_once('/').ok_or_else(|| bad("endpoints are pm/pp"))?;
                        list.push((
                            a.trim().parse().map_err(|_| bad("bad pm"))?,
                            b.trim().parse().map_err(|_| bad("bad pp"))?,
                        ));
                    }
                    endpoints = Some(list);
                }
                other => return Err(bad(&format!("unknown key {other:?}"))),
            }
        }
        let ps = ps.unwrap_or_else(|| DEFAULT_PS.to_vec());
        Ok(match head.trim() {
            "monotone" => FamilySpec::Monotone { n_max: n_max.unwrap_or(3), ps },
            "mixed" => FamilySpec::Mixed { n_max: n_max.unwrap_or(3), ps },
            "ternary" => FamilySpec::Ternary {
                n_max: n_max.unwrap_or(3),
                endpoints: endpoints.unwrap_or_else(|| DEFAULT_ENDPOINTS.to_vec()),
            },
            "builtin" => FamilySpec::Builtin { ps },
            other => return Err(bad(&format!("unknown family kind {other:?}"))),
        })
    }
}

/// The families each inequality is searched over by default.
pub fn default_family(id: InequalityId) -> Vec<FamilySpec> {
    let ps = DEFAULT_PS.to_vec();
    match id {
        InequalityId::CorollaryC => vec![FamilySpec::Ternary {
            n_max: 3,
            endpoints: DEFAULT_ENDPOINTS.to_vec(),
        }],
        InequalityId::L1dif => vec![
            FamilySpec::Monotone { n_max: 3, ps: ps.clone() },
            FamilySpec::Mixed { n_max: 3, ps },
        ],
        InequalityId::DeltaK => vec![
            FamilySpec::Monotone { n_max: 4, ps: ps.clone() },
            FamilySpec::Mixed { n_max: 3, ps: ps.clone() },
            FamilySpec::Builtin { ps },
        ],
        _ => vec![
            FamilySpec::Monotone { n_max: 4, ps: ps.clone() },
            FamilySpec::Builtin { ps },
        ],
    }
}

pub fn build_family<F: Scalar>(specs: &[FamilySpec]) -> Result<Vec<Instance<F>>> {
    let mut out = Vec::new();
    for spec in specs {
        out.extend(spec.instances()?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierEntry<F> {
    pub label: String,
    pub status: Status,
    pub critical: Option<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frontier<F> {
    pub id: InequalityId,
    /// Largest constant passing every informative instance (smallest, for
    /// the upper bound).
    pub value: F,
    pub witness: String,
    pub informative: usize,
    pub excluded: usize,
    pub entries: Vec<FrontierEntry<F>>,
}

/// Extremal constant of `id` over `family`. Instances that are vacuous or
/// miss the hypotheses at every constant are excluded; ties between equal
/// critical values go to the lexicographically smallest label.
pub fn constant_search<F: Scalar>(
    id: InequalityId,
    family: &[Instance<F>],
    variance: VarianceForm,
) -> Result<Frontier<F>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let opts = CheckOptions { parameter: None, variance };
    let entries = family
        .par_iter()
        .map(|inst| {
            if id != InequalityId::DeltaK && is_degenerate(&inst.function)? {
                return Ok(FrontierEntry {
                    label: inst.label(),
                    status: Status::Vacuous,
                    critical: None,
                });
            }
            let v = check(id, inst, F::one(), opts)?;
            let status = match v.status {
                Status::HypothesisNotMet => Status::HypothesisNotMet,
                _ if v.critical.is_none() => Status::Vacuous,
                s => s,
            };
            Ok(FrontierEntry {
                label: v.instance.label,
                status,
                critical: v.critical,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let better = |a: (F, &str), b: (F, &str)| {
        let value_first = if id.is_upper_bound() { a.0 > b.0 } else { a.0 < b.0 };
        value_first || (a.0 == b.0 && a.1 < b.1)
    };
    let mut best: Option<(F, &str)> = None;
    let mut informative = 0;
    for e in &entries {
        if let Some(c) = e.critical {
            informative += 1;
            let cand = (c, e.label.as_str());
            if best.map_or(true, |b| better(cand, b)) {
                best = Some(cand);
            }
        }
    }
    let (value, witness) = best.ok_or(Error::EmptyFamily)?;
    let witness = witness.to_string();
    Ok(Frontier {
        id,
        value,
        witness,
        informative,
        excluded: entries.len() - informative,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::builtin::*;
    use crate::boolfn::FunctionSpec;

    const B: Alphabet = Alphabet::Binary;

    fn named(spec: &str, n: usize) -> BooleanFunction {
        spec.parse::<FunctionSpec>().unwrap().build(B, Some(n)).unwrap()
    }

    #[test]
    fn dictator_first_part() {
        let d = dictator(B, 1, 0).unwrap();
        let v = check_l2el_first(&d, 0.25f64, 0.1).unwrap();
        assert_eq!(v.lhs, 1.0);
        // t = 1/4, delta = 1: log argument 0.1 * 3/16 < 1, vacuous.
        assert_eq!(v.status, Status::Vacuous);
        assert!(v.pass && v.ratio.is_none());
        let crit = v.critical.unwrap();
        let at = check_l2el_first(&d, 0.25, crit).unwrap();
        assert!(at.pass && at.status == Status::Holds);
        assert!(!check_l2el_first(&d, 0.25, crit * 1.001).unwrap().pass);
    }

    #[test]
    fn majority_first_part() {
        let m = majority(B, 3).unwrap();
        let v = check_l2el_first(&m, 0.5f64, 0.1).unwrap();
        assert!((v.instance.total_influence - 1.5).abs() < 1e-15);
        assert!((v.instance.parameter.unwrap() - 0.5).abs() < 1e-15);
        assert!((v.instance.t - 0.5).abs() < 1e-15);
        assert!(v.pass);
        assert!(matches!(check_l2el_first(&constant(B, 2, true).unwrap(), 0.5f64, 0.1), Err(Error::Degenerate)));
    }

    #[test]
    fn second_part_hypothesis() {
        let and3 = and_all(B, 3).unwrap();
        let v = check_l2el_second(&and3, 0.125f64, None, 0.05).unwrap();
        assert!(v.instance.parameter.unwrap() <= 0.5 && v.pass);
        let v = check_l2el_second(&and3, 0.125f64, Some(0.5), 0.05).unwrap();
        let scale = x_log_inv(0.125f64);
        assert!((v.rhs - 0.05 * v.instance.t * (1.0 - v.instance.t) / scale * 2f64.ln()).abs() < 1e-15);
        let d = dictator(B, 2, 0).unwrap();
        assert_eq!(check_l2el_second(&d, 0.25f64, None, 0.05).unwrap().status, Status::HypothesisNotMet);
        let tribes = named("tribes(2,4)", 8);
        let v = check_l2el_second(&tribes, 0.5f64, None, 0.05).unwrap();
        assert_eq!(v.status, Status::HypothesisNotMet);
    }

    #[test]
    fn corollary_examples() {
        let e = at_least(Alphabet::Ternary, 4, 1).unwrap();
        assert_eq!(check_corollary_c(&e, 0.1f64, 0.5, None, 0.1).unwrap().status, Status::HypothesisNotMet);
        let e = and_all(Alphabet::Ternary, 3).unwrap();
        let v = check_corollary_c(&e, 0.1f64, 0.1, None, 0.1).unwrap();
        // Pivotal iff the other two are +1.
        assert!((v.instance.max_influence - 0.01).abs() < 1e-15);
        assert!(v.pass);
    }

    #[test]
    fn l1dif_reduces_to_first_part() {
        for f in enumerate_monotone(B, 3, false).unwrap() {
            for p in DEFAULT_PS {
                for c in [0.05, 0.5, 2.0] {
                    let a = check_l2el_first(&f, p, c).unwrap();
                    let b = check_l1dif(&f, vec![p; 3], None, c).unwrap();
                    assert_eq!((a.lhs, a.rhs, a.pass, a.critical), (b.lhs, b.rhs, b.pass, b.critical));
                }
            }
        }
        let or2 = or_all(B, 2).unwrap();
        let v = check_l1dif(&or2, vec![0.125f64, 0.5], None, 0.1).unwrap();
        assert!((v.instance.t - (1.0 - 0.875 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn t2_examples() {
        let m = majority(B, 3).unwrap();
        let v = check_t2(&m, 0.5f64, None, 0.1).unwrap();
        assert!((v.instance.parameter.unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(check_t2(&m, 0.5f64, Some(1.0), 0.1).unwrap().status, Status::Vacuous);
    }

    #[test]
    fn delta_examples() {
        let d = dictator(B, 1, 0).unwrap();
        let v = check_delta_k(&d, vec![0.5f64], 1.0).unwrap();
        assert!((v.lhs - 0.25).abs() < 1e-15);
        // Log factor 1, min p(1-p) = 1/4.
        assert!((v.rhs - 8f64.ln() * 0.25).abs() < 1e-15);
        let c = constant(B, 2, false).unwrap();
        let v = check_delta_k(&c, vec![0.5f64, 0.5], 1.0).unwrap();
        assert!(v.pass && v.lhs == 0.0 && v.status == Status::Vacuous);
    }

    #[test]
    fn bkkkl_examples() {
        let space = |n| AnySpace::Two(TwoPointSpace::uniform(n, 0.5f64).unwrap());
        let m = majority(B, 3).unwrap();
        let v = check_bkkkl(&m, space(3), 1.0, VarianceForm::Product).unwrap();
        assert!((v.critical.unwrap() - 0.5 / (0.25 * 3f64.ln() / 3.0)).abs() < 1e-12);
        let v = check_bkkkl(&parity(2).unwrap(), space(2), 1.0, VarianceForm::Min).unwrap();
        assert!((v.lhs - 1.0).abs() < 1e-15);
        assert!((v.critical.unwrap() - 1.0 / (0.5 * 2f64.ln() / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn frontier_basics() {
        let family: Vec<Instance<f64>> =
            FamilySpec::Monotone { n_max: 3, ps: DEFAULT_PS.to_vec() }.instances().unwrap();
        let fr = constant_search(InequalityId::L2elSecond, &family, VarianceForm::Product).unwrap();
        assert!(fr.value > 0.0);
        let witness = family.iter().find(|i| i.label() == fr.witness).unwrap();
        let opts = CheckOptions::default();
        assert!(check(InequalityId::L2elSecond, witness, fr.value / 2.0, opts).unwrap().pass);
        assert!(!check(InequalityId::L2elSecond, witness, fr.value * 2.0, opts).unwrap().pass);

        let single = vec![witness.clone()];
        let one = constant_search(InequalityId::L2elSecond, &single, VarianceForm::Product).unwrap();
        assert_eq!(one.value, fr.value);

        let mut reversed = family.clone();
        reversed.reverse();
        let again = constant_search(InequalityId::L2elSecond, &reversed, VarianceForm::Product).unwrap();
        assert_eq!((again.value, again.witness), (fr.value, fr.witness));

        assert!(matches!(
            constant_search::<f64>(InequalityId::T2, &[], VarianceForm::Product),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn family_parsing() {
        let f: FamilySpec = "monotone:n=2,p=0.25".parse().unwrap();
        assert_eq!(f.instances::<f64>().unwrap().len(), 1 + 4);
        let f: FamilySpec = "ternary:n=1,ep=0.1/0.2".parse().unwrap();
        assert_eq!(f.instances::<f64>().unwrap().len(), 2);
        assert_eq!(mixed_vectors(&DEFAULT_PS, 2).len(), 6);
        assert!("cubic:n=2".parse::<FamilySpec>().is_err());
    }
}
