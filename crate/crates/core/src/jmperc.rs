//! Johnson–Mehl tessellation percolation on the torus `T(s) x [0, s]`.
//!
//! Seeds arrive at Poisson points of space-time and grow at unit speed; a
//! point `y` of the torus belongs to the seed minimising `t_i + d(y, x_i)`.
//! Each seed carries a uniform mark and is black when the mark is below the
//! colour probability, so raising the probability only recolours white seeds.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;

use crate::boolfn::SymmetryGroup;
use crate::error::{Error, Result};
use crate::spaces::ThreePointSpace;
use crate::stats::{item_rng, quantile_sorted, wilson_interval, Z95};

pub const DEFAULT_RESOLUTION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Seed {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub mark: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JMConfiguration {
    pub s: f64,
    pub lambda: f64,
    pub color_p: f64,
    pub seeds: Vec<Seed>,
}

impl JMConfiguration {
    pub fn is_black(&self, i: usize) -> bool {
        self.seeds[i].mark < self.color_p
    }

    /// Same seeds recoloured at `color_p`.
    pub fn with_color_p(&self, color_p: f64) -> Self {
        Self {
            color_p,
            ..self.clone()
        }
    }

    /// Every seed moved by `(dx, dy)` on the torus; times and marks kept.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let wrap = |v: f64| {
            let w = (v % self.s + self.s) % self.s;
            if w >= self.s {
                0.0
            } else {
                w
            }
        };
        Self {
            seeds: self
                .seeds
                .iter()
                .map(|sd| Seed {
                    x: wrap(sd.x + dx),
                    y: wrap(sd.y + dy),
                    ..*sd
                })
                .collect(),
            ..self.clone()
        }
    }

    pub fn black_count(&self) -> usize {
        (0..self.seeds.len()).filter(|&i| self.is_black(i)).count()
    }
}

fn check_params(s: f64, lambda: f64, color_p: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::OutOfRange(format!("torus side must be positive, got {s}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::OutOfRange(format!("intensity must be positive, got {lambda}")));
    }
    if !(0.0..=1.0).contains(&color_p) {
        return Err(Error::InvalidProbability {
            name: "color_p",
            value: color_p,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

fn sample_with(s: f64, lambda: f64, color_p: f64, rng: &mut ChaCha8Rng) -> Result<JMConfiguration> {
    check_params(s, lambda, color_p)?;
    let mean = lambda * s * s * s;
    let count = Poisson::new(mean)
        .map_err(|e| Error::OutOfRange(format!("Poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    let seeds = (0..count)
        .map(|_| Seed {
            x: rng.random::<f64>() * s,
            y: rng.random::<f64>() * s,
            t: rng.random::<f64>() * s,
            mark: rng.random(),
        })
        .collect();
    Ok(JMConfiguration {
        s,
        lambda,
        color_p,
        seeds,
    })
}

pub fn sample_jm(s: f64, lambda: f64, color_p: f64, seed: u64) -> Result<JMConfiguration> {
    sample_jm_trial(s, lambda, color_p, seed, 0)
}

/// Configuration of trial `trial` in a seeded battery.
pub fn sample_jm_trial(s: f64, lambda: f64, color_p: f64, seed: u64, trial: u64) -> Result<JMConfiguration> {
    sample_with(s, lambda, color_p, &mut item_rng(seed, trial))
}

/// Owner seed of every pixel of an `width x width` raster of the torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasterColoring {
    pub resolution: usize,
    pub width: usize,
    /// Row-major, `owner[j * width + i]` for pixel column `i`, row `j`.
    pub owner: Vec<u32>,
}

impl RasterColoring {
    /// Colour per pixel given per-seed colours.
    pub fn colors(&self, black: &[bool]) -> Vec<bool> {
        self.owner.iter().map(|&o| black[o as usize]).collect()
    }

    pub fn marks(&self, config: &JMConfiguration) -> Vec<f64> {
        self.owner.iter().map(|&o| config.seeds[o as usize].mark).collect()
    }
}

pub fn torus_distance(s: f64, ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let mut dx = (ax - bx).abs();
    let mut dy = (ay - by).abs();
    dx = dx.min(s - dx);
    dy = dy.min(s - dy);
    (dx * dx + dy * dy).sqrt()
}

fn raster_width(s: f64, resolution: usize) -> Result<usize> {
    let w = s * resolution as f64;
    let rounded = w.round();
    if resolution == 0 || (w - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(Error::NonIntegralGrid(format!("s * r = {w} must be a positive integer")));
    }
    Ok(rounded as usize)
}

fn pixel_center(i: usize, resolution: usize) -> f64 {
    (i as f64 + 0.5) / resolution as f64
}

/// Growth-metric assignment with a spatial bucket index.
pub fn rasterize(config: &JMConfiguration, resolution: usize) -> Result<RasterColoring> {
    if config.seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    let s = config.s;
    let width = raster_width(s, resolution)?;
    let nb = (s.floor() as usize).max(1);
    let side = s / nb as f64;
    let bucket_of = |v: f64| ((v / side) as usize).min(nb - 1);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nb * nb];
    for (i, sd) in config.seeds.iter().enumerate() {
        buckets[bucket_of(sd.y) * nb + bucket_of(sd.x)].push(i as u32);
    }
    for b in &mut buckets {
        b.sort_by(|&a, &c| {
            let (sa, sc) = (&config.seeds[a as usize], &config.seeds[c as usize]);
            sa.t.total_cmp(&sc.t).then(a.cmp(&c))
        });
    }
    let max_ring = nb / 2 + 1;
    let owner = (0..width)
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut stamp = vec![usize::MAX; nb * nb];
            let buckets = &buckets;
            (0..width).map(move |i| {
                let (px, py) = (pixel_center(i, resolution), pixel_center(j, resolution));
                let (bx, by) = (bucket_of(px) as isize, bucket_of(py) as isize);
                let mut best = (f64::INFINITY, u32::MAX);
                for ring in 0..=max_ring as isize {
                    if ring >= 1 && (ring - 1) as f64 * side > best.0 {
                        break;
                    }
                    for dy in -ring..=ring {
                        for dx in -ring..=ring {
                            if dx.abs().max(dy.abs()) != ring {
                                continue;
                            }
                            let cx = (bx + dx).rem_euclid(nb as isize) as usize;
                            let cy = (by + dy).rem_euclid(nb as isize) as usize;
                            let b = cy * nb + cx;
                            if stamp[b] == i {
                                continue;
                            }
                            stamp[b] = i;
                            for &k in &buckets[b] {
                                let sd = &config.seeds[k as usize];
                                if sd.t > best.0 {
                                    break;
                                }
                                let v = sd.t + torus_distance(s, px, py, sd.x, sd.y);
                                if v < best.0 || (v == best.0 && k < best.1) {
                                    best = (v, k);
                                }
                            }
                        }
                    }
                }
                best.1
            })
        })
        .collect();
    Ok(RasterColoring {
        resolution,
        width,
        owner,
    })
}

/// Direct `O(pixels x seeds)` assignment, used as a reference.
pub fn rasterize_brute(config: &JMConfiguration, resolution: usize) -> Result<RasterColoring> {
    if config.seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    let width = raster_width(config.s, resolution)?;
    let mut owner = Vec::with_capacity(width * width);
    for j in 0..width {
        for i in 0..width {
            let (px, py) = (pixel_center(i, resolution), pixel_center(j, resolution));
            let mut best = (f64::INFINITY, u32::MAX);
            for (k, sd) in config.seeds.iter().enumerate() {
                let v = sd.t + torus_distance(config.s, px, py, sd.x, sd.y);
                if v < best.0 {
                    best = (v, k as u32);
                }
            }
            owner.push(best.1);
        }
    }
    Ok(RasterColoring {
        resolution,
        width,
        owner,
    })
}

/// Axis-aligned rectangle in torus units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
    pub h: f64,
}

/// Rectangle shapes relative to the torus side.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RectSpec {
    /// The whole fundamental domain, `s x s`.
    Square,
    /// `3s/4 x s/4`.
    #[default]
    Wide,
    /// `3s/4 x s/12`.
    Thin,
    Explicit(Rect),
}

impl RectSpec {
    pub fn resolve(self, s: f64) -> Rect {
        match self {
            RectSpec::Square => Rect { x0: 0.0, y0: 0.0, w: s, h: s },
            RectSpec::Wide => Rect { x0: 0.0, y0: 0.0, w: 0.75 * s, h: 0.25 * s },
            RectSpec::Thin => Rect { x0: 0.0, y0: 0.0, w: 0.75 * s, h: s / 12.0 },
            RectSpec::Explicit(r) => r,
        }
    }
}

impl FromStr for RectSpec {
    type Err = Error;

    /// `square`, `wide`, `thin`, or `x0,y0,w,h`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "square" => Ok(RectSpec::Square),
            "wide" | "3:1" => Ok(RectSpec::Wide),
            "thin" | "9:1" => Ok(RectSpec::Thin),
            other => {
                let v = other
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse(format!("rectangle {other:?}")))?;
                match v[..] {
                    [x0, y0, w, h] => Ok(RectSpec::Explicit(Rect { x0, y0, w, h })),
                    _ => Err(Error::Parse(format!("rectangle {other:?} needs x0,y0,w,h"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Left side to right side.
    Horizontal,
    /// Bottom side to top side.
    Vertical,
}

/// Pixel window of a rectangle: origin and size in pixels, wrapping mod width.
struct Window {
    i0: usize,
    j0: usize,
    cols: usize,
    rows: usize,
    width: usize,
}

impl Window {
    fn new(raster: &RasterColoring, rect: Rect) -> Result<Self> {
        let r = raster.resolution as f64;
        let width = raster.width;
        let s = width as f64 / r;
        if !(rect.w > 0.0 && rect.h > 0.0) || rect.w > s + 1e-9 || rect.h > s + 1e-9 {
            return Err(Error::DegenerateRect(format!(
                "{} x {} must be positive and fit in a torus of side {s}",
                rect.w, rect.h
            )));
        }
        let cols = ((rect.w * r).round() as usize).min(width);
        let rows = ((rect.h * r).round() as usize).min(width);
        if cols == 0 || rows == 0 {
            return Err(Error::DegenerateRect("rectangle is thinner than one pixel".into()));
        }
        let wrap = |v: f64| ((v * r).round() as isize).rem_euclid(width as isize) as usize;
        Ok(Self {
            i0: wrap(rect.x0),
            j0: wrap(rect.y0),
            cols,
            rows,
            width,
        })
    }

    fn pixel(&self, a: usize, b: usize) -> usize {
        let i = (self.i0 + a) % self.width;
        let j = (self.j0 + b) % self.width;
        j * self.width + i
    }

    fn len(&self) -> usize {
        self.cols * self.rows
    }
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a as usize].cmp(&self.rank[b as usize]) {
            std::cmp::Ordering::Less => self.parent[a as usize] = b,
            std::cmp::Ordering::Greater => self.parent[b as usize] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b as usize] = a;
                self.rank[a as usize] += 1;
            }
        }
    }
}

/// Incremental 4-connected crossing detector on a window. Cells are local
/// indices `b * cols + a`; the two extra nodes are the start and end sides.
struct Crossing<'w> {
    win: &'w Window,
    direction: Direction,
    uf: UnionFind,
    open: Vec<bool>,
}

impl<'w> Crossing<'w> {
    fn new(win: &'w Window, direction: Direction) -> Self {
        let n = win.len();
        Self {
            win,
            direction,
            uf: UnionFind::new(n + 2),
            open: vec![false; n],
        }
    }

    fn open(&mut self, cell: usize) {
        let cols = self.win.cols;
        let rows = self.win.rows;
        let (a, b) = (cell % cols, cell / cols);
        self.open[cell] = true;
        let c = cell as u32;
        let (start, end) = ((self.win.len()) as u32, (self.win.len() + 1) as u32);
        let (pos, last) = match self.direction {
            Direction::Horizontal => (a, cols - 1),
            Direction::Vertical => (b, rows - 1),
        };
        if pos == 0 {
            self.uf.union(c, start);
        }
        if pos == last {
            self.uf.union(c, end);
        }
        let mut link = |other: usize| {
            if self.open[other] {
                self.uf.union(c, other as u32);
            }
        };
        if a > 0 {
            link(cell - 1);
        }
        if a + 1 < cols {
            link(cell + 1);
        }
        if b > 0 {
            link(cell - cols);
        }
        if b + 1 < rows {
            link(cell + cols);
        }
    }

    fn crossed(&mut self) -> bool {
        let n = self.win.len() as u32;
        self.uf.find(n) == self.uf.find(n + 1)
    }
}

/// Whether pixels with `colors[pixel] == color` cross `rect` in `direction`.
pub fn crossing(
    raster: &RasterColoring,
    colors: &[bool],
    rect: Rect,
    direction: Direction,
    color: bool,
) -> Result<bool> {
    let win = Window::new(raster, rect)?;
    let mut cr = Crossing::new(&win, direction);
    for b in 0..win.rows {
        for a in 0..win.cols {
            if colors[win.pixel(a, b)] == color {
                cr.open(b * win.cols + a);
            }
        }
    }
    Ok(cr.crossed())
}

/// Per-trial critical marks on a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalMarks {
    /// Black horizontal crossing at `p` iff `p > black_horizontal`.
    pub black_horizontal: f64,
    /// White vertical crossing at `p` iff `p <= white_vertical`.
    pub white_vertical: f64,
}

impl CriticalMarks {
    pub fn black_crosses(&self, p: f64) -> bool {
        p > self.black_horizontal
    }

    pub fn white_crosses(&self, p: f64) -> bool {
        p <= self.white_vertical
    }
}

/// Opens pixels in mark order until the sides join; returns the mark at
/// which that happens.
fn sweep_open(win: &Window, marks: &[f64], direction: Direction, ascending: bool) -> f64 {
    let mut cells: Vec<(f64, usize)> = (0..win.rows)
        .flat_map(|b| (0..win.cols).map(move |a| (a, b)))
        .map(|(a, b)| (marks[win.pixel(a, b)], b * win.cols + a))
        .collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    if !ascending {
        cells.reverse();
    }
    let mut cr = Crossing::new(win, direction);
    let mut k = 0;
    while k < cells.len() {
        let level = cells[k].0;
        while k < cells.len() && cells[k].0 == level {
            cr.open(cells[k].1);
            k += 1;
        }
        if cr.crossed() {
            return level;
        }
    }
    unreachable!("a fully open window always crosses")
}

pub fn critical_marks(raster: &RasterColoring, config: &JMConfiguration, rect: Rect) -> Result<CriticalMarks> {
    let win = Window::new(raster, rect)?;
    let marks = raster.marks(config);
    Ok(CriticalMarks {
        black_horizontal: sweep_open(&win, &marks, Direction::Horizontal, true),
        white_vertical: sweep_open(&win, &marks, Direction::Vertical, false),
    })
}

/// Box discretisation of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteGrid {
    pub delta_box: f64,
    /// Boxes per side in each of the three axes.
    pub k: usize,
    /// `+1` if the earliest seed in the box is black, `-1` if white, `0` if
    /// empty; index `x + k (y + k layer)`.
    pub states: Vec<i8>,
    /// Model marginals: `color_p (1 - exp(-lambda delta^3))` and its white twin.
    pub p_plus: f64,
    pub p_minus: f64,
}

impl DiscreteGrid {
    /// Number of boxes, `(s / delta)^3`.
    pub fn box_count(&self) -> usize {
        self.k * self.k * self.k
    }

    /// Spatial translations; every orbit has size `(s / delta)^2`.
    pub fn translation_group(&self) -> SymmetryGroup {
        SymmetryGroup::planar_translations(self.k, self.k, self.k)
    }

    /// The product space with the model marginals.
    pub fn space(&self) -> Result<ThreePointSpace<f64>> {
        ThreePointSpace::new(self.box_count(), self.p_minus, self.p_plus)
    }
}

pub fn discretize(config: &JMConfiguration, delta_box: f64) -> Result<DiscreteGrid> {
    let ratio = config.s / delta_box;
    let k = ratio.round();
    if !(delta_box > 0.0) || (ratio - k).abs() > 1e-9 || k < 1.0 {
        return Err(Error::NonIntegralGrid(format!("s / delta = {ratio} must be a positive integer")));
    }
    let k = k as usize;
    let cell = |v: f64| ((v / delta_box) as usize).min(k - 1);
    let mut earliest = vec![(f64::INFINITY, 0i8); k * k * k];
    for (i, sd) in config.seeds.iter().enumerate() {
        let idx = cell(sd.x) + k * (cell(sd.y) + k * cell(sd.t));
        if sd.t < earliest[idx].0 {
            earliest[idx] = (sd.t, if config.is_black(i) { 1 } else { -1 });
        }
    }
    let occupied = 1.0 - (-config.lambda * delta_box.powi(3)).exp();
    Ok(DiscreteGrid {
        delta_box,
        k,
        states: earliest.into_iter().map(|(_, v)| v).collect(),
        p_plus: config.color_p * occupied,
        p_minus: (1.0 - config.color_p) * occupied,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepParams {
    pub s: f64,
    pub lambda: f64,
    pub rect: RectSpec,
    pub resolution: usize,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub black_horizontal: u64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub white_vertical: u64,
    pub white_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub params: SweepParams,
    pub rect: Rect,
    pub rows: Vec<SweepRow>,
    pub critical: Vec<CriticalMarks>,
}

impl SweepTable {
    /// Empirical `F^{-1}(0.75) - F^{-1}(0.25)` of the black-crossing
    /// probability `F(p) = Pr(critical < p)`.
    pub fn window_width(&self) -> f64 {
        let mut c: Vec<f64> = self.critical.iter().map(|m| m.black_horizontal).collect();
        c.sort_by(f64::total_cmp);
        quantile_sorted(&c, 0.75) - quantile_sorted(&c, 0.25)
    }

    pub fn row_at(&self, p: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| (r.p - p).abs() < 1e-12)
    }
}

/// Critical marks of trial `trial`; the configuration does not depend on `p`.
pub fn trial_marks(params: &SweepParams, trial: u64) -> Result<CriticalMarks> {
    let config = sample_jm_trial(params.s, params.lambda, 0.5, params.seed, trial)?;
    let rect = params.rect.resolve(params.s);
    if config.seeds.is_empty() {
        // No cells at all: nothing is ever coloured.
        return Ok(CriticalMarks {
            black_horizontal: 1.0,
            white_vertical: -1.0,
        });
    }
    let raster = rasterize(&config, params.resolution)?;
    critical_marks(&raster, &config, rect)
}

pub fn sweep(params: SweepParams, p_grid: &[f64]) -> Result<SweepTable> {
    if params.trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidProbability {
            name: "p",
            value: *p,
            reason: "must lie in [0, 1]",
        });
    }
    let rect = params.rect.resolve(params.s);
    let critical = (0..params.trials)
        .into_par_iter()
        .map(|t| trial_marks(&params, t))
        .collect::<Result<Vec<_>>>()?;
    let rows = p_grid
        .iter()
        .map(|&p| {
            let black = critical.iter().filter(|m| m.black_crosses(p)).count() as u64;
            let white = critical.iter().filter(|m| m.white_crosses(p)).count() as u64;
            let (lo, hi) = wilson_interval(black, params.trials, Z95);
            SweepRow {
                p,
                black_horizontal: black,
                frequency: black as f64 / params.trials as f64,
                wilson_low: lo,
                wilson_high: hi,
                white_vertical: white,
                white_frequency: white as f64 / params.trials as f64,
            }
        })
        .collect();
    Ok(SweepTable {
        params,
        rect,
        rows,
        critical,
    })
}

/// `start:stop:step` inclusive grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("grid {text:?}")))?;
    match parts[..] {
        [single] => Ok(vec![single]),
        [start, stop, step] if step > 0.0 && stop >= start => {
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + step * i as f64).collect())
        }
        _ => Err(Error::Parse(format!("grid {text:?} must be start:stop:step"))),
    }
}

/// Binary PPM (P6) of a coloured raster; black seeds dark, white light.
pub fn render_ppm(raster: &RasterColoring, config: &JMConfiguration) -> Vec<u8> {
    let w = raster.width;
    let mut out = format!("P6\n{w} {w}\n255\n").into_bytes();
    // Image rows run top to bottom, raster rows bottom to top.
    for j in (0..w).rev() {
        for i in 0..w {
            let o = raster.owner[j * w + i] as usize;
            let shade = (config.seeds[o].mark * 40.0) as u8;
            let rgb = if config.is_black(o) {
                [20 + shade, 20 + shade, 30 + shade]
            } else {
                [215 + shade / 2, 215 + shade / 2, 205 + shade / 2]
            };
            out.extend_from_slice(&rgb);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(seeds: &[(f64, f64, f64, f64)], s: f64, color_p: f64) -> JMConfiguration {
        JMConfiguration {
            s,
            lambda: 1.0,
            color_p,
            seeds: seeds.iter().map(|&(x, y, t, mark)| Seed { x, y, t, mark }).collect(),
        }
    }

    #[test]
    fn sampling_is_deterministic_and_coupled() {
        let a = sample_jm(4.0, 1.0, 0.3, 11).unwrap();
        let b = sample_jm(4.0, 1.0, 0.3, 11).unwrap();
        assert_eq!(a, b);
        let all = a.with_color_p(1.0);
        assert_eq!(all.black_count(), all.seeds.len());
        let higher = a.with_color_p(0.6);
        assert!((0..a.seeds.len()).all(|i| !a.is_black(i) || higher.is_black(i)));
        assert!(a.seeds.iter().all(|s| (0.0..4.0).contains(&s.x) && (0.0..=4.0).contains(&s.t)));
        assert!(sample_jm(0.0, 1.0, 0.5, 1).is_err());
        assert!(sample_jm(4.0, 1.0, 1.5, 1).is_err());
    }

    #[test]
    fn single_seed_owns_everything() {
        let c = config(&[(1.0, 1.0, 0.5, 0.2)], 2.0, 0.5);
        let r = rasterize(&c, 4).unwrap();
        assert!(r.owner.iter().all(|o| *o == 0));
        assert!(matches!(rasterize(&config(&[], 2.0, 0.5), 4), Err(Error::EmptySeedSet)));
    }

    #[test]
    fn bisector_between_equal_times() {
        let c = config(&[(1.0, 2.0, 0.0, 0.1), (3.0, 2.0, 0.0, 0.9)], 4.0, 0.5);
        let r = rasterize(&c, 4).unwrap();
        assert_eq!(r, rasterize_brute(&c, 4).unwrap());
        // Bisectors at x = 2 and, across the wrap, x = 0.
        for j in 0..16 {
            for i in 0..16 {
                let x = pixel_center(i, 4);
                assert_eq!(r.owner[j * 16 + i], if x < 2.0 { 0 } else { 1 });
            }
        }
    }

    #[test]
    fn late_seed_is_swallowed() {
        let c = config(&[(2.0, 2.0, 0.0, 0.1), (2.6, 2.0, 4.0, 0.9)], 4.0, 0.5);
        let r = rasterize(&c, 8).unwrap();
        assert!(r.owner.iter().all(|o| *o == 0));
    }

    #[test]
    fn bucketed_matches_brute_force() {
        for seed in 0..4 {
            let c = sample_jm(6.0, 1.0, 0.5, seed).unwrap();
            assert_eq!(rasterize(&c, 4).unwrap(), rasterize_brute(&c, 4).unwrap());
        }
    }

    #[test]
    fn crossing_fixtures() {
        let c = config(&[(1.0, 1.0, 0.0, 0.1)], 2.0, 0.5);
        let r = rasterize(&c, 4).unwrap();
        let rect = RectSpec::Square.resolve(2.0);
        assert!(crossing(&r, &vec![true; 64], rect, Direction::Horizontal, true).unwrap());
        assert!(!crossing(&r, &vec![false; 64], rect, Direction::Horizontal, true).unwrap());
        let band: Vec<bool> = (0..64).map(|p| p % 8 != 3).collect();
        assert!(!crossing(&r, &band, rect, Direction::Horizontal, true).unwrap());
        assert!(crossing(&r, &band, rect, Direction::Vertical, true).unwrap());
        let bad = Rect { x0: 0.0, y0: 0.0, w: 0.0, h: 1.0 };
        assert!(matches!(crossing(&r, &band, bad, Direction::Vertical, true), Err(Error::DegenerateRect(_))));
    }

    #[test]
    fn critical_marks_agree_with_direct_crossings() {
        let c = sample_jm(6.0, 1.0, 0.5, 3).unwrap();
        let r = rasterize(&c, 4).unwrap();
        let rect = RectSpec::Wide.resolve(6.0);
        let m = critical_marks(&r, &c, rect).unwrap();
        for p in [0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0, m.black_horizontal, m.white_vertical] {
            let black: Vec<bool> = (0..c.seeds.len()).map(|i| c.seeds[i].mark < p).collect();
            let colors = r.colors(&black);
            assert_eq!(crossing(&r, &colors, rect, Direction::Horizontal, true).unwrap(), m.black_crosses(p));
            assert_eq!(crossing(&r, &colors, rect, Direction::Vertical, false).unwrap(), m.white_crosses(p));
        }
    }

    #[test]
    fn discretization_examples() {
        let empty = config(&[], 4.0, 0.5);
        let g = discretize(&empty, 1.0).unwrap();
        assert!(g.states.iter().all(|v| *v == 0) && g.box_count() == 64);
        let one = config(&[(1.5, 2.5, 0.5, 0.1)], 4.0, 0.5);
        let g = discretize(&one, 1.0).unwrap();
        assert_eq!(g.states.iter().filter(|v| **v == 1).count(), 1);
        assert_eq!(g.states[1 + 4 * 2], 1);
        assert_eq!(g.translation_group().min_orbit_size(), 16);
        assert!(matches!(discretize(&one, 1.5), Err(Error::NonIntegralGrid(_))));
    }

    #[test]
    fn sweep_endpoints_and_grid() {
        let params = SweepParams {
            s: 4.0,
            lambda: 1.0,
            rect: RectSpec::Square,
            resolution: 4,
            trials: 20,
            seed: 5,
        };
        let t = sweep(params, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(t.row_at(0.0).unwrap().black_horizontal, 0);
        assert_eq!(t.row_at(1.0).unwrap().black_horizontal, 20);
        assert_eq!(parse_grid("0.3:0.7:0.1").unwrap().len(), 5);
        assert!(parse_grid("0.3:x").is_err());
    }

    #[test]
    fn ppm_header() {
        let c = config(&[(1.0, 1.0, 0.0, 0.1)], 2.0, 0.5);
        let r = rasterize(&c, 2).unwrap();
        let img = render_ppm(&r, &c);
        assert!(img.starts_with(b"P6\n4 4\n255\n"));
        assert_eq!(img.len(), 11 + 16 * 3);
    }
}
