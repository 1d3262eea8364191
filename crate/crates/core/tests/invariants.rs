//! Physical invariants of the steady-state correlators.

use proptest::prelude::*;

use pairblock::model::ModelParams;
use pairblock::observables::{kappa_tau_grid, Correlator, SteadyStateEngine};

fn engine(p: &ModelParams) -> SteadyStateEngine {
    SteadyStateEngine::new(p).unwrap()
}

#[test]
fn exchanging_the_cavities_exchanges_g11_and_g22() {
    let p = ModelParams { lambda_2: 0.3, ..ModelParams::default() };
    let mut q = p.clone();
    std::mem::swap(&mut q.omega_1, &mut q.omega_2);
    std::mem::swap(&mut q.lambda_1, &mut q.lambda_2);
    let tau = kappa_tau_grid(p.kappa, 10.0, 41);
    let (a, b) = (engine(&p), engine(&q));
    for (x, y) in [(Correlator::G11, Correlator::G22), (Correlator::G22, Correlator::G11)] {
        let sa = a.correlator(x, &tau).unwrap();
        let sb = b.correlator(y, &tau).unwrap();
        for (u, v) in sa.values.iter().zip(&sb.values) {
            assert!((u - v).abs() < 1e-6, "{}: {u} vs {v}", x.name());
        }
    }
    // the swap turns g12(τ) into g21(τ); only the zero-delay values coincide
    let (u, v) = (a.direct_zero_delay(Correlator::G12).unwrap(), b.direct_zero_delay(Correlator::G12).unwrap());
    assert!((u - v).abs() < 1e-9 * u, "{u} vs {v}");
}

#[test]
fn correlators_factorize_at_long_delay() {
    let p = ModelParams::default();
    let e = engine(&p);
    let tau = kappa_tau_grid(p.kappa, 30.0, 61);
    for c in Correlator::ALL {
        let s = e.correlator(c, &tau).unwrap();
        let last = *s.values.last().unwrap();
        assert!((last - 1.0).abs() < 0.05, "{}(kappa tau = 30) = {last}", c.name());
    }
}

#[test]
fn regression_starts_at_the_direct_moment() {
    let e = engine(&ModelParams::default());
    let tau = [0.0, 1.0];
    for c in Correlator::ALL {
        let s = e.correlator(c, &tau).unwrap();
        let d = e.direct_zero_delay(c).unwrap();
        assert!((s.values[0] - d).abs() <= 1e-8 * d.abs().max(1.0));
        assert_eq!(s.zero_delay, s.values[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn correlators_are_nonnegative(gk in 0.02f64..1.0, lambda in 0.1f64..0.35, cutoff in 3usize..6) {
        let mut p = ModelParams::default().with_gamma_over_kappa(gk).with_cutoff(cutoff);
        p.lambda_1 = lambda;
        let e = engine(&p);
        let tau = kappa_tau_grid(p.kappa, 10.0, 21);
        for c in Correlator::ALL {
            let s = e.correlator(c, &tau).unwrap();
            for v in &s.values {
                prop_assert!(*v >= -1e-10, "{} = {v}", c.name());
            }
        }
    }

    #[test]
    fn pair_blockade_improves_as_gamma_falls(gk in 0.03f64..0.5, factor in 1.2f64..3.0) {
        let low = engine(&ModelParams::default().with_gamma_over_kappa(gk / factor));
        let high = engine(&ModelParams::default().with_gamma_over_kappa(gk));
        let a = low.direct_zero_delay(Correlator::G1212).unwrap();
        let b = high.direct_zero_delay(Correlator::G1212).unwrap();
        prop_assert!(a < b, "g1212(0): {a} at {} vs {b} at {gk}", gk / factor);
    }
}
