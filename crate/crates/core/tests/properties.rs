use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use sharpthresh::boolfn::{builtin, enumerate_monotone, BooleanFunction};
use sharpthresh::ineqlab::{check, CheckOptions, FamilySpec, InequalityId};
use sharpthresh::influence::{influence_exact, influence_mc};
use sharpthresh::spaces::{Alphabet, ProductSpace};
use sharpthresh::spectrum::{inverse_walsh, parseval_check, walsh_transform};
use sharpthresh::stats::{wilson_interval, Z95};
use sharpthresh::threshold::event_probability;
use sharpthresh::{ThreePointSpace, TwoPointSpace};

fn ternary_monotone(n: usize) -> Vec<BooleanFunction> {
    enumerate_monotone(Alphabet::Ternary, n, true).unwrap().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn masses_sum_to_one(probs in prop::collection::vec(0.01f64..0.99, 1..10)) {
        let space = TwoPointSpace::new(probs).unwrap();
        let total: f64 = space.mass_table().unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn three_point_masses_sum_to_one(n in 1usize..7, pm in 0.01f64..0.45, pp in 0.01f64..0.45) {
        let space = ThreePointSpace::new(n, pm, pp).unwrap();
        prop_assert!((space.total_mass().unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn perturbation_raises_increasing_events(
        pm in 0.05f64..0.4, pp in 0.05f64..0.4, a in 0.0f64..1.0, b in 0.0f64..1.0, pick in 0usize..20
    ) {
        let base = ThreePointSpace::new(2, pm, pp).unwrap();
        let limit = base.perturb_limit();
        let (h1, h2) = (a.min(b) * limit * 0.999, a.max(b) * limit * 0.999);
        let events = ternary_monotone(2);
        let e = &events[pick % events.len()];
        let g1 = event_probability(e, &base.perturb(h1).unwrap()).unwrap();
        let g2 = event_probability(e, &base.perturb(h2).unwrap()).unwrap();
        prop_assert!(g2 >= g1 - 1e-15);
    }

    #[test]
    fn parseval_on_random_tables(n in 0usize..7, bits in prop::collection::vec(any::<bool>(), 64)) {
        let f = BooleanFunction::from_table(Alphabet::Binary, n, bits[..1 << n].to_vec()).unwrap();
        prop_assert!(parseval_check::<f64>(&f, None).unwrap().error <= 1e-12);
    }

    #[test]
    fn walsh_round_trip(values in prop::collection::vec(-4.0f64..4.0, 32)) {
        let back = inverse_walsh(&walsh_transform(&values).unwrap()).unwrap();
        for (a, b) in values.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn hex_round_trip(n in 0usize..6, ternary in any::<bool>(), bits in prop::collection::vec(any::<bool>(), 243)) {
        let alphabet = if ternary { Alphabet::Ternary } else { Alphabet::Binary };
        let size = alphabet.size(n).unwrap();
        let f = BooleanFunction::from_table(alphabet, n, bits[..size].to_vec()).unwrap();
        let g = BooleanFunction::from_hex(&f.to_hex().unwrap()).unwrap();
        prop_assert_eq!(f.table(), g.table());
    }

    #[test]
    fn verdicts_are_monotone_in_the_constant(idx in 0usize..500, c in 0.01f64..10.0, which in 0usize..5) {
        let family = FamilySpec::Monotone { n_max: 3, ps: vec![0.125, 0.25, 0.5] }.instances::<f64>().unwrap();
        let inst = &family[idx % family.len()];
        let id = [InequalityId::L2elFirst, InequalityId::L2elSecond, InequalityId::T2, InequalityId::Bkkkl, InequalityId::DeltaK][which];
        let opts = CheckOptions::default();
        let at = check(id, inst, c, opts).unwrap();
        if id.is_upper_bound() {
            if at.pass { prop_assert!(check(id, inst, 2.0 * c, opts).unwrap().pass); }
        } else if at.pass {
            prop_assert!(check(id, inst, c / 2.0, opts).unwrap().pass);
        }
    }
}

#[test]
fn monte_carlo_influence_coverage() {
    let f = builtin::majority(Alphabet::Binary, 5).unwrap();
    let space = TwoPointSpace::uniform(5, 0.3).unwrap();
    let exact = influence_exact(&f, &space).unwrap();
    let trials = 2000;
    let (mut covered, mut total) = (0, 0);
    for seed in 0..100 {
        let mc = influence_mc(&f, &space, seed, trials).unwrap();
        for (k, est) in mc.per_coordinate.iter().enumerate() {
            let hits = (est * trials as f64).round() as u64;
            let (lo, hi) = wilson_interval(hits, trials, Z95);
            covered += usize::from(lo <= exact.per_coordinate[k] && exact.per_coordinate[k] <= hi);
            total += 1;
        }
    }
    assert!(covered as f64 >= 0.93 * total as f64, "coverage {covered}/{total}");
}

#[test]
fn monte_carlo_is_worker_independent() {
    let f = builtin::tribes(Alphabet::Binary, 2, 3).unwrap();
    let space = TwoPointSpace::uniform(6, 0.4).unwrap();
    let a = influence_mc(&f, &space, 9, 5000).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| influence_mc(&f, &space, 9, 5000).unwrap());
    assert_eq!(a, b);
}

#[test]
fn single_precision_paths_agree() {
    let e = builtin::at_least(Alphabet::Ternary, 3, 2).unwrap();
    let s32 = sharpthresh::spaces::ThreePointSpace::<f32>::new(3, 0.3, 0.1).unwrap();
    let s64 = ThreePointSpace::new(3, 0.3, 0.1).unwrap();
    let g32 = event_probability(&e, &s32).unwrap();
    let g64 = event_probability(&e, &s64).unwrap();
    assert_abs_diff_eq!(f64::from(g32), g64, epsilon = 1e-6);
    let i32_ = influence_exact(&e, &s32).unwrap();
    let i64_ = influence_exact(&e, &s64).unwrap();
    assert_abs_diff_eq!(f64::from(i32_.total), i64_.total, epsilon = 1e-5);
}

#[test]
fn every_monotone_event_has_nondecreasing_curve() {
    for n in 1..=3 {
        for e in ternary_monotone(n) {
            let base = ThreePointSpace::new(n, 0.3, 0.1).unwrap();
            let mut last = -1.0;
            for k in 0..6 {
                let g = event_probability(&e, &base.perturb(0.05 * k as f64).unwrap()).unwrap();
                assert!(g >= last - 1e-15, "{}", e.name());
                last = g;
            }
        }
    }
}
