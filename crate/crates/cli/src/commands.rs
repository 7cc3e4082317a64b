use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sharpthresh::acceptance::{self, AcceptanceOptions};
use sharpthresh::boolfn::{symmetry_order, BooleanFunction, FunctionSpec, SymmetryGroup};
use sharpthresh::ineqlab::{
    build_family, check, constant_search, default_family, CheckOptions, FamilySpec, InequalityId, Instance,
    VarianceForm,
};
use sharpthresh::influence::{influence_exact, influence_mc, DyadicEmbedding};
use sharpthresh::jmperc::{self, RectSpec, SweepParams, DEFAULT_RESOLUTION};
use sharpthresh::spaces::{AnySpace, SpaceKind, SpaceSpec};
use sharpthresh::spectrum::{block_spectrum, concentration_search, parseval_check};
use sharpthresh::threshold::{
    default_h_grid, event_probability, g_curve, min_c3_search, tight_params, verify_sharp_threshold, Branch,
    CurveMethod, EndpointMethod, EndpointSpec, ThresholdParams, VerifyOptions, DEFAULT_GRID_POINTS,
};
use sharpthresh::{Error, ThreePointSpace, TwoPointSpace};

use crate::output::{Cell, Report};
use crate::CliError;

type Outcome = Result<(Report, Value), CliError>;

const DEFAULT_MC_TRIALS: u64 = 100_000;

/// A space given either in compact text form or as a JSON object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceArg {
    Text(String),
    Spec(SpaceSpec),
}

impl FromStr for SpaceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(SpaceArg::Text(s.to_string()))
    }
}

impl SpaceArg {
    fn spec(&self) -> Result<SpaceSpec, CliError> {
        match self {
            SpaceArg::Text(s) => Ok(s.parse()?),
            SpaceArg::Spec(spec) => Ok(spec.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Exact,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Product,
    Min,
}

impl From<Variance> for VarianceForm {
    fn from(v: Variance) -> Self {
        match v {
            Variance::Product => VarianceForm::Product,
            Variance::Min => VarianceForm::Min,
        }
    }
}

fn required<T: Clone>(value: &Option<T>, name: &str) -> Result<T, CliError> {
    value.clone().ok_or_else(|| CliError::schema(format!("missing required value {name:?}")))
}

fn resolved<T: Serialize>(args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(map) = &mut v {
        map.retain(|_, x| !x.is_null());
    }
    crate::output::round_json(v)
}

/// Parses the function against the space's alphabet and builds both, the
/// space taking its length from the function when the spec omits it.
fn function_on(function: &str, space: &SpaceArg) -> Result<(BooleanFunction, AnySpace<f64>), CliError> {
    let spec = space.spec()?;
    let alphabet = match spec.kind {
        SpaceKind::TwoPoint => sharpthresh::spaces::Alphabet::Binary,
        SpaceKind::ThreePoint => sharpthresh::spaces::Alphabet::Ternary,
    };
    let n_hint = spec.n.or(spec.probs.as_ref().map(Vec::len));
    let f = FunctionSpec::from_str(function)?.build(alphabet, n_hint)?;
    let space = spec.build::<f64>(Some(f.arity()))?;
    Ok((f, space))
}

fn parse_group(text: &str, n: usize) -> Result<SymmetryGroup, CliError> {
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let nums = || -> Result<Vec<usize>, CliError> {
        rest.split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::schema(format!("group {text:?}"))))
            .collect()
    };
    let group = match head.trim() {
        "trivial" => SymmetryGroup::trivial(n),
        "cyclic" if rest.is_empty() => SymmetryGroup::cyclic(n),
        "cyclic" => match nums()?[..] {
            [k] => SymmetryGroup::cyclic_power(n, k),
            _ => return Err(CliError::schema(format!("group {text:?}: expected cyclic:k"))),
        },
        "translations" => match nums()?[..] {
            [w, h, l] if w * h * l == n => SymmetryGroup::planar_translations(w, h, l),
            [w, h, l] => {
                return Err(Error::ArityMismatch { expected: n, actual: w * h * l }.into());
            }
            _ => return Err(CliError::schema(format!("group {text:?}: expected translations:w,h,layers"))),
        },
        other => return Err(CliError::schema(format!("unknown group {other:?}"))),
    };
    Ok(group)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfluenceArgs {
    /// Function, e.g. majority3, tribes(2,3), at_least:k=1,n=4, hex:2:3:e8.
    #[arg(long)]
    pub function: Option<String>,
    /// Space, e.g. v:p=0.5, v:probs=0.1;0.4, w:n=3,pm=0.2,pp=0.1.
    #[arg(long)]
    pub space: Option<SpaceArg>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn influence(args: &InfluenceArgs) -> Outcome {
    let mut args = args.clone();
    let (f, space) = function_on(&required(&args.function, "function")?, &required(&args.space, "space")?)?;
    let method = *args.method.get_or_insert(Method::Exact);
    let report = match method {
        Method::Exact => {
            args.trials = None;
            args.seed = None;
            influence_exact(&f, &space)?
        }
        Method::Mc => {
            let trials = *args.trials.get_or_insert(DEFAULT_MC_TRIALS);
            influence_mc(&f, &space, *args.seed.get_or_insert(0), trials)?
        }
    };
    args.space = Some(SpaceArg::Text(space.to_string()));
    let mut out = Report::new(&["k", "influence", "half_width"]);
    for (k, (i, hw)) in report.per_coordinate.iter().zip(&report.half_width).enumerate() {
        out.row(vec![(k + 1).into(), (*i).into(), (*hw).into()]);
    }
    out.note("total", report.total);
    out.note("max", report.max);
    if f.is_dense() {
        out.note("t", event_probability(&f, &space)?);
    }
    Ok((out, resolved(&args)))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    /// Function on {0,1}^n.
    #[arg(long)]
    pub function: Option<String>,
    /// Dyadic bias of every coordinate.
    #[arg(long)]
    pub p: Option<f64>,
    /// Bits per coordinate in the lift; the fewest that represent p by default.
    #[arg(long)]
    pub m: Option<u32>,
}

pub fn spectrum(args: &SpectrumArgs) -> Outcome {
    let mut args = args.clone();
    let f = FunctionSpec::from_str(&required(&args.function, "function")?)?
        .build(sharpthresh::spaces::Alphabet::Binary, None)?;
    let p = *args.p.get_or_insert(0.5);
    let embedding = match args.m {
        Some(m) => DyadicEmbedding::with_bits(p, m)?,
        None => DyadicEmbedding::from_f64(p)?,
    };
    args.m = Some(embedding.m());
    let spectrum = block_spectrum::<f64>(&f, &embedding)?;
    let parseval = parseval_check::<f64>(&f, Some(&embedding))?;
    let space = TwoPointSpace::uniform(f.arity(), embedding.p_f64())?;
    let influences = influence_exact(&f, &space)?;
    let concentration = concentration_search(&spectrum, &influences, parseval.t, embedding.p_f64())?;

    let mut out = Report::new(&["s", "weight", "first_bound_holds", "second_bound_holds"]);
    out.row(vec![0usize.into(), spectrum.weights_by_level[0].into(), Cell::Empty, Cell::Empty]);
    for (s, &w) in spectrum.weights_by_level.iter().enumerate().skip(1) {
        let level = concentration.as_ref().map(|c| &c.levels[s - 1]);
        out.row(vec![
            s.into(),
            w.into(),
            level.map_or(Cell::Empty, |l| l.first_bound_holds.into()),
            level.map_or(Cell::Empty, |l| l.second_bound_holds.into()),
        ]);
    }
    out.note("t", parseval.t);
    out.note("variance", parseval.lhs);
    out.note("nonconstant_weight", parseval.rhs);
    out.note("parseval_error", parseval.error);
    out.note("total_influence", influences.total);
    match &concentration {
        Some(c) => {
            out.note("c1", c.c1);
            out.note("c2", c.c2);
            out.note("mass_both", c.mass_both);
            out.note("witness_level", c.witness_level.map_or(Cell::Empty, Cell::from));
        }
        None => out.note("concentration", "degenerate"),
    }
    out.detail = concentration.map(|c| serde_json::to_value(c).expect("report serializes"));
    Ok((out, resolved(&args)))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveArgs {
    /// Increasing event on {-1,0,1}^n.
    #[arg(long)]
    pub event: Option<String>,
    /// Three-point start, e.g. w:n=3,pm=0.3,pp=0.1.
    #[arg(long)]
    pub space: Option<SpaceArg>,
    /// Right end of the h grid; half of p- by default.
    #[arg(long)]
    pub hmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn three_point(space: &AnySpace<f64>) -> Result<ThreePointSpace, CliError> {
    match space {
        AnySpace::Three(s) => Ok(s.clone()),
        AnySpace::Two(_) => Err(CliError::schema("threshold curves need a three-point space (w:...)")),
    }
}

pub fn curve(args: &CurveArgs) -> Outcome {
    let mut args = args.clone();
    let (e, space) = function_on(&required(&args.event, "event")?, &required(&args.space, "space")?)?;
    let space = three_point(&space)?;
    let hmax = *args.hmax.get_or_insert(space.perturb_limit() / 2.0);
    let points = *args.points.get_or_insert(DEFAULT_GRID_POINTS);
    let method = match *args.method.get_or_insert(Method::Exact) {
        Method::Exact => {
            args.trials = None;
            args.seed = None;
            CurveMethod::Exact
        }
        Method::Mc => CurveMethod::MonteCarlo {
            seed: *args.seed.get_or_insert(0),
            trials: *args.trials.get_or_insert(DEFAULT_MC_TRIALS),
        },
    };
    args.space = Some(SpaceArg::Text(AnySpace::Three(space.clone()).to_string()));
    let curve = g_curve(&e, &space, &default_h_grid(hmax, points), method)?;
    let mut out = Report::new(&["h", "g", "logit"]);
    for s in &curve.samples {
        out.row(vec![s.h.into(), s.g.into(), s.logit.into()]);
    }
    out.note("perturb_limit", curve.hmax);
    Ok((out, resolved(&args)))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Increasing event on {-1,0,1}^n.
    #[arg(long)]
    pub event: Option<String>,
    /// Arity, when the event does not imply it.
    #[arg(long)]
    pub n: Option<usize>,
    /// cyclic, cyclic:k, trivial or translations:w,h,layers.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub pm: Option<f64>,
    #[arg(long)]
    pub pp: Option<f64>,
    /// End point q-; tight at the window bound when both q- and q+ are absent.
    #[arg(long)]
    pub qm: Option<f64>,
    #[arg(long)]
    pub qp: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Candidate constant; the smallest passing one when absent.
    #[arg(long)]
    pub c3: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub endpoint: Option<Endpoint>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub batch: Option<u64>,
    #[arg(long)]
    pub cap: Option<u64>,
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let mut args = args.clone();
    let e = FunctionSpec::from_str(&required(&args.event, "event")?)?
        .build(sharpthresh::spaces::Alphabet::Ternary, args.n)?;
    args.n = Some(e.arity());
    let group = parse_group(args.group.get_or_insert_with(|| "cyclic".into()), e.arity())?;
    let start = EndpointSpec {
        p_minus: required(&args.pm, "pm")?,
        p_plus: required(&args.pp, "pp")?,
    };
    let eta = *args.eta.get_or_insert(0.2);
    let mut out = Report::new(&[
        "h",
        "g",
        "total_influence",
        "max_influence",
        "branch",
        "a",
        "logit_slope_bound",
        "required_rate",
        "rate_holds",
    ]);
    let c3 = match args.c3 {
        Some(c3) => c3,
        None => {
            let search = min_c3_search(&[(e.clone(), group.clone())], eta, start)?;
            out.note("c3_source", "search");
            search.c3
        }
    };
    args.c3 = Some(c3);
    let params = match (args.qm, args.qp) {
        (Some(q_minus), Some(q_plus)) => ThresholdParams {
            p_minus: start.p_minus,
            p_plus: start.p_plus,
            q_minus,
            q_plus,
            eta,
            c3,
        },
        (None, None) => {
            let m = symmetry_order(&e, &group)?;
            tight_params(start, eta, c3, m).ok_or_else(|| {
                Error::Hypothesis(format!("no admissible end point satisfies the window bound at c3 = {c3}"))
            })?
        }
        _ => return Err(CliError::schema("give both qm and qp, or neither")),
    };
    args.qm = Some(params.q_minus);
    args.qp = Some(params.q_plus);
    let points = *args.points.get_or_insert(DEFAULT_GRID_POINTS);
    let endpoint = match *args.endpoint.get_or_insert(Endpoint::Exact) {
        Endpoint::Exact => {
            args.seed = None;
            args.batch = None;
            args.cap = None;
            EndpointMethod::Exact
        }
        Endpoint::Sequential => EndpointMethod::Sequential {
            seed: *args.seed.get_or_insert(0),
            batch: *args.batch.get_or_insert(10_000),
            cap: *args.cap.get_or_insert(1_000_000),
        },
    };
    let cert = verify_sharp_threshold(&e, &group, params, VerifyOptions { grid_points: points, endpoint })?;
    for r in &cert.trace {
        let (branch, a) = match r.branch {
            Branch::LargeInfluence { .. } => ("large_influence", Cell::Empty),
            Branch::Corollary { a } => ("corollary", a.into()),
        };
        out.row(vec![
            r.h.into(),
            r.g.into(),
            r.total_influence.into(),
            r.max_influence.into(),
            branch.into(),
            a,
            r.logit_slope_bound.into(),
            r.required_rate.into(),
            r.rate_holds.into(),
        ]);
    }
    out.note("m", cert.m);
    out.note("hmax", cert.hmax);
    out.note("window_bound", cert.window_bound);
    out.note("g_start", cert.start.g);
    out.note("g_end", cert.end.g);
    out.note("vacuous", cert.vacuous);
    out.note("verdict", cert.verdict);
    out.note("forms_agree", cert.forms_agree);
    out.note("orbit_constant", cert.orbit_constant);
    out.note("rate_holds_everywhere", cert.rate_holds_everywhere);
    Ok((out, resolved(&args)))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckArgs {
    /// l2el1, l2el2, corollary_c, l1dif, t2, deltak or bkkkl.
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub space: Option<SpaceArg>,
    /// Candidate constant.
    #[arg(long)]
    pub c: Option<f64>,
    /// delta, a or eps; the tightest admissible value when absent.
    #[arg(long)]
    pub param: Option<f64>,
    #[arg(long, value_enum)]
    pub variance: Option<Variance>,
}

pub fn ineq_check(args: &CheckArgs) -> Outcome {
    let mut args = args.clone();
    let id: InequalityId = required(&args.id, "id")?.parse()?;
    let (f, space) = function_on(&required(&args.function, "function")?, &required(&args.space, "space")?)?;
    args.space = Some(SpaceArg::Text(space.to_string()));
    let c = required(&args.c, "c")?;
    let opts = CheckOptions {
        parameter: args.param,
        variance: (*args.variance.get_or_insert(Variance::Product)).into(),
    };
    let v = check(id, &Instance::new(f, space)?, c, opts)?;
    let mut out = Report::new(&["id", "instance", "constant", "lhs", "rhs", "ratio", "status", "pass", "critical"]);
    out.row(vec![
        id.as_str().into(),
        v.instance.label.clone().into(),
        v.constant.into(),
        v.lhs.into(),
        v.rhs.into(),
        v.ratio.into(),
        status_text(&v.status).into(),
        v.pass.into(),
        v.critical.into(),
    ]);
    out.note("t", v.instance.t);
    out.note("total_influence", v.instance.total_influence);
    out.note("max_influence", v.instance.max_influence);
    if let Some(p) = v.instance.parameter {
        out.note("parameter", p);
    }
    Ok((out, resolved(&args)))
}

fn status_text<T: Serialize>(status: &T) -> String {
    match serde_json::to_value(status) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierArgs {
    #[arg(long)]
    pub id: Option<String>,
    /// Family spec, repeatable: monotone:n=3,p=0.25;0.5, mixed:n=3,
    /// ternary:n=2,ep=0.1/0.2, builtin. The inequality's default family when absent.
    #[arg(long)]
    #[serde(default)]
    pub family: Vec<String>,
    #[arg(long, value_enum)]
    pub variance: Option<Variance>,
}

pub fn frontier(args: &FrontierArgs) -> Outcome {
    let mut args = args.clone();
    let id: InequalityId = required(&args.id, "id")?.parse()?;
    let specs: Vec<FamilySpec> = if args.family.is_empty() {
        default_family(id)
    } else {
        args.family.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    args.family = specs.iter().map(family_text).collect();
    let family = build_family::<f64>(&specs)?;
    let variance = *args.variance.get_or_insert(Variance::Product);
    let frontier = constant_search(id, &family, variance.into())?;
    let mut out = Report::new(&["instance", "status", "critical"]);
    for e in &frontier.entries {
        out.row(vec![e.label.clone().into(), status_text(&e.status).into(), e.critical.into()]);
    }
    out.note("value", frontier.value);
    out.note("witness", frontier.witness.clone());
    out.note("informative", frontier.informative);
    out.note("excluded", frontier.excluded);
    Ok((out, resolved(&args)))
}

fn join(xs: impl Iterator<Item = String>) -> String {
    xs.collect::<Vec<_>>().join(";")
}

fn family_text(spec: &FamilySpec) -> String {
    let ps = |ps: &[f64]| join(ps.iter().map(|p| crate::output::fmt_num(*p)));
    match spec {
        FamilySpec::Monotone { n_max, ps: p } => format!("monotone:n={n_max},p={}", ps(p)),
        FamilySpec::Mixed { n_max, ps: p } => format!("mixed:n={n_max},p={}", ps(p)),
        FamilySpec::Ternary { n_max, endpoints } => format!(
            "ternary:n={n_max},ep={}",
            join(endpoints.iter().map(|(a, b)| format!(
                "{}/{}",
                crate::output::fmt_num(*a),
                crate::output::fmt_num(*b)
            )))
        ),
        FamilySpec::Builtin { ps: p } => format!("builtin:p={}", ps(p)),
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Torus side.
    #[arg(long)]
    pub s: Option<f64>,
    /// Seed intensity per unit area and unit time.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Colour probability grid, start:stop:step or a single value.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// square, wide, thin or x0,y0,w,h.
    #[arg(long)]
    pub rect: Option<String>,
    /// Pixels per unit length.
    #[arg(long)]
    pub resolution: Option<usize>,
}

pub fn sweep(args: &SweepArgs) -> Outcome {
    let mut args = args.clone();
    let rect: RectSpec = args.rect.get_or_insert_with(|| "wide".into()).parse()?;
    let params = SweepParams {
        s: *args.s.get_or_insert(20.0),
        lambda: *args.lambda.get_or_insert(1.0),
        rect,
        resolution: *args.resolution.get_or_insert(DEFAULT_RESOLUTION),
        trials: *args.trials.get_or_insert(400),
        seed: *args.seed.get_or_insert(7),
    };
    let grid = jmperc::parse_grid(args.p.get_or_insert_with(|| "0.30:0.70:0.02".into()))?;
    let table = jmperc::sweep(params, &grid)?;
    let mut out = Report::new(&["p", "crossing_freq", "wilson_low", "wilson_high", "white_freq"]);
    for r in &table.rows {
        out.row(vec![
            r.p.into(),
            r.frequency.into(),
            r.wilson_low.into(),
            r.wilson_high.into(),
            r.white_frequency.into(),
        ]);
    }
    out.note("window_width", table.window_width());
    out.note("rect", format!("{},{},{},{}", table.rect.x0, table.rect.y0, table.rect.w, table.rect.h));
    Ok((out, resolved(&args)))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderArgs {
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Colour probability.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub resolution: Option<usize>,
}

pub fn render(args: &RenderArgs) -> Result<Vec<u8>, CliError> {
    let mut args = args.clone();
    let config = jmperc::sample_jm(
        *args.s.get_or_insert(20.0),
        *args.lambda.get_or_insert(1.0),
        *args.p.get_or_insert(0.5),
        *args.seed.get_or_insert(7),
    )?;
    let raster = jmperc::rasterize(&config, *args.resolution.get_or_insert(DEFAULT_RESOLUTION))?;
    let image = jmperc::render_ppm(&raster, &config);
    let comment = format!("# config: {}\n", resolved(&args));
    let mut out = Vec::with_capacity(image.len() + comment.len());
    out.extend_from_slice(&image[..3]);
    out.extend_from_slice(comment.as_bytes());
    out.extend_from_slice(&image[3..]);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptArgs {
    /// Smaller Monte Carlo batteries.
    #[arg(long)]
    #[serde(default)]
    pub quick: bool,
    /// Run only these criteria (repeatable).
    #[arg(long = "criterion")]
    #[serde(default)]
    pub criteria: Vec<u8>,
}

pub fn accept(args: &AcceptArgs) -> Result<(Report, Value, bool), CliError> {
    let mut args = args.clone();
    let ids: Vec<u8> = acceptance::criterion_ids().collect();
    if let Some(bad) = args.criteria.iter().find(|c| !ids.contains(c)) {
        return Err(CliError::schema(format!("no criterion {bad}; known: 1..={}", ids.len())));
    }
    if args.criteria.is_empty() {
        args.criteria = ids;
    }
    let options = AcceptanceOptions { quick: args.quick };
    let mut out = Report::new(&["criterion", "name", "result", "seconds", "limit_seconds", "detail"]);
    let mut passed = true;
    for &id in &args.criteria {
        let o = acceptance::run_criterion(id, options).expect("known criterion");
        eprintln!("{}", o.line());
        passed &= o.passed;
        out.row(vec![
            u64::from(o.id).into(),
            o.name.into(),
            if o.passed { "PASS" } else { "FAIL" }.into(),
            o.elapsed.as_secs_f64().into(),
            o.limit.as_secs().into(),
            o.detail.into(),
        ]);
    }
    out.note("overall", if passed { "PASS" } else { "FAIL" });
    Ok((out, resolved(&args), passed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sharpthresh::spaces::ProductSpace;

    #[test]
    fn group_parsing() {
        assert_eq!(parse_group("cyclic", 4).unwrap().min_orbit_size(), 4);
        assert_eq!(parse_group("cyclic:2", 4).unwrap().min_orbit_size(), 2);
        assert_eq!(parse_group("trivial", 4).unwrap().min_orbit_size(), 1);
        assert_eq!(parse_group("translations:2,2,1", 4).unwrap().min_orbit_size(), 4);
        assert!(parse_group("translations:2,2,1", 5).is_err());
        assert!(parse_group("dihedral", 4).is_err());
    }

    #[test]
    fn space_defaults_to_function_arity() {
        let (f, space) = function_on("majority3", &SpaceArg::Text("v:p=0.5".into())).unwrap();
        assert_eq!(f.arity(), 3);
        assert_eq!(space.n(), 3);
        let (f, _) = function_on("at_least:k=1", &SpaceArg::Text("w:n=4,pm=0.2,pp=0.1".into())).unwrap();
        assert_eq!(f.arity(), 4);
    }

    #[test]
    fn family_text_round_trips() {
        for spec in default_family(InequalityId::DeltaK)
            .into_iter()
            .chain(default_family(InequalityId::CorollaryC))
        {
            assert_eq!(family_text(&spec).parse::<FamilySpec>().unwrap(), spec);
        }
    }
}
