use sharpthresh::jmperc::{
    critical_marks, discretize, rasterize, sample_jm, sample_jm_trial, sweep, Rect, RectSpec, SweepParams,
};
use sharpthresh::stats::{wilson_half_width, Z95};

#[test]
fn seed_counts_match_the_poisson_mean() {
    let (s, lambda) = (5.0, 1.0);
    let mean = lambda * s * s * s;
    let draws = 200;
    let total: usize = (0..draws).map(|k| sample_jm(s, lambda, 0.5, k).unwrap().seeds.len()).sum();
    let sigma = (mean / draws as f64).sqrt();
    assert!((total as f64 / draws as f64 - mean).abs() <= 3.0 * sigma);
}

#[test]
fn box_marginals_match_poisson_thinning() {
    let (s, delta, color_p) = (4.0, 1.0, 0.4);
    let mut plus = 0usize;
    let mut boxes = 0usize;
    let mut model = 0.0;
    for k in 0..500 {
        let grid = discretize(&sample_jm(s, 1.0, color_p, k).unwrap(), delta).unwrap();
        plus += grid.states.iter().filter(|v| **v == 1).count();
        boxes += grid.box_count();
        model = grid.p_plus;
    }
    let sigma = (model * (1.0 - model) / boxes as f64).sqrt();
    assert!((plus as f64 / boxes as f64 - model).abs() <= 3.0 * sigma);
}

#[test]
fn crossings_are_translation_invariant() {
    let s = 8.0;
    let (dx, dy) = (1.25, 2.5);
    for t in 0..20 {
        let c = sample_jm_trial(s, 1.0, 0.5, 21, t).unwrap();
        let rect = RectSpec::Wide.resolve(s);
        let moved = c.translated(dx, dy);
        let moved_rect = Rect { x0: rect.x0 + dx, y0: rect.y0 + dy, ..rect };
        let a = critical_marks(&rasterize(&c, 8).unwrap(), &c, rect).unwrap();
        let b = critical_marks(&rasterize(&moved, 8).unwrap(), &moved, moved_rect).unwrap();
        assert_eq!(a, b, "trial {t}");
    }
}

#[test]
fn self_duality_at_one_half() {
    let params = SweepParams { s: 10.0, lambda: 1.0, rect: RectSpec::Square, resolution: 8, trials: 500, seed: 31 };
    let table = sweep(params, &[0.5]).unwrap();
    let row = table.rows[0];
    let half = wilson_half_width(row.black_horizontal, 500, Z95).max(wilson_half_width(row.white_vertical, 500, Z95));
    assert!((row.frequency - row.white_frequency).abs() <= 2.0 * half, "{row:?}");
}

#[test]
fn raster_refinement_is_stable_off_criticality() {
    let rect = RectSpec::Square.resolve(10.0);
    let mut changed = 0;
    for t in 0..200 {
        let c = sample_jm_trial(10.0, 1.0, 0.5, 3, t).unwrap();
        let a = critical_marks(&rasterize(&c, 8).unwrap(), &c, rect).unwrap();
        let b = critical_marks(&rasterize(&c, 16).unwrap(), &c, rect).unwrap();
        for p in [0.35, 0.65] {
            changed += usize::from(a.black_crosses(p) != b.black_crosses(p));
        }
    }
    assert!(changed as f64 <= 0.02 * 400.0, "{changed} of 400 indicators changed");
}

#[test]
fn sweep_is_monotone_per_trial_and_reproducible() {
    let params = SweepParams { s: 6.0, lambda: 1.0, rect: RectSpec::Wide, resolution: 8, trials: 60, seed: 4 };
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let a = sweep(params, &grid).unwrap();
    let b = sweep(params, &grid).unwrap();
    assert_eq!(a, b);
    assert!(a.rows.windows(2).all(|w| w[0].black_horizontal <= w[1].black_horizontal));
    assert!(a.rows.windows(2).all(|w| w[0].white_vertical >= w[1].white_vertical));
}
