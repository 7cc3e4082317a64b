use proptest::prelude::*;
use sharpthresh::boolfn::builtin::{at_least, cyclic_run, majority};
use sharpthresh::boolfn::SymmetryGroup;
use sharpthresh::spaces::Alphabet;
use sharpthresh::threshold::{
    min_c3_search, tight_params, verify_sharp_threshold, Branch, EndpointSpec, ThresholdParams, VerifyOptions,
};
use sharpthresh::Error;

const T: Alphabet = Alphabet::Ternary;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificate_arithmetic_is_consistent(
        n in 3usize..7,
        kind in 0usize..3,
        pm in 0.15f64..0.36,
        pp in 0.01f64..0.2,
        frac in 0.2f64..0.95,
        eta in 0.05f64..0.5,
        c3 in 0.01f64..4.0,
    ) {
        let e = match kind {
            0 => at_least(T, n, 1).unwrap(),
            1 => cyclic_run(T, n, 2).unwrap(),
            _ => majority(T, n).unwrap(),
        };
        let group = SymmetryGroup::cyclic(n);
        let h = frac * pm.min(1.0 / std::f64::consts::E - pp);
        let params = ThresholdParams { p_minus: pm, p_plus: pp, q_minus: pm - h, q_plus: pp + h, eta, c3 };
        match verify_sharp_threshold(&e, &group, params, VerifyOptions::default()) {
            Err(Error::Hypothesis(_)) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
            Ok(cert) => {
                prop_assert!(cert.forms_agree);
                prop_assert!(cert.orbit_constant);
                prop_assert!(cert.hmax >= cert.window_bound);
                prop_assert!(cert.trace.windows(2).all(|w| w[0].g <= w[1].g + 1e-15));
                if cert.rate_holds_everywhere && !cert.vacuous {
                    prop_assert!(cert.verdict, "rate bound held on the grid but the verdict failed");
                }
                for r in &cert.trace {
                    if let Branch::LargeInfluence { coordinates_above, total_at_least_sqrt_m } = r.branch {
                        prop_assert!(coordinates_above >= cert.m && total_at_least_sqrt_m);
                    }
                }
            }
        }
    }
}

#[test]
fn frontier_certificates_pass_for_the_cyclic_family() {
    let start = EndpointSpec { p_minus: 0.35, p_plus: 0.06 };
    let family: Vec<_> = [4, 5, 6].iter().map(|&n| (at_least(T, n, 1).unwrap(), SymmetryGroup::cyclic(n))).collect();
    let search = min_c3_search(&family, 0.2, start).unwrap();
    for (e, g) in &family {
        let params = tight_params(start, 0.2, search.c3, g.min_orbit_size()).unwrap();
        let cert = verify_sharp_threshold(e, g, params, VerifyOptions::default()).unwrap();
        assert!(cert.verdict && cert.orbit_constant);
    }
    // Below the frontier some instance must fail.
    let lower = search.c3 * 0.9;
    let fails = family.iter().any(|(e, g)| {
        let params = tight_params(start, 0.2, lower, g.min_orbit_size()).unwrap();
        !verify_sharp_threshold(e, g, params, VerifyOptions::default()).unwrap().verdict
    });
    assert!(fails);
}

#[test]
fn trivial_symmetry_is_a_hypothesis_failure() {
    let e = at_least(T, 4, 1).unwrap();
    let params = ThresholdParams { p_minus: 0.3, p_plus: 0.1, q_minus: 0.05, q_plus: 0.35, eta: 0.2, c3: 0.1 };
    let err = verify_sharp_threshold(&e, &SymmetryGroup::trivial(4), params, VerifyOptions::default());
    assert!(matches!(err, Err(Error::Hypothesis(_))));
}

#[test]
fn rate_bound_on_the_whole_grid_forces_the_verdict() {
    let e = at_least(T, 6, 1).unwrap();
    let params = ThresholdParams {
        p_minus: 0.2343,
        p_plus: 0.1276,
        q_minus: 0.0287,
        q_plus: 0.3332,
        eta: 0.4842,
        c3: 1.12,
    };
    let cert = verify_sharp_threshold(&e, &SymmetryGroup::cyclic(6), params, VerifyOptions::default()).unwrap();
    assert!(cert.rate_holds_everywhere && !cert.vacuous && cert.verdict);
}
