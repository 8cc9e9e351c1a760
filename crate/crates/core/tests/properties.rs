use bernstein_core::gaussian_linalg::{cholesky, identity_residual};
use bernstein_core::mehler_kernel::mehler_closed;
use bernstein_core::mixtures::{ln_mixture_weight, MixtureParams};
use bernstein_core::processes::{periodic_covariance, periodic_covariance_exp_form, ProcessSpec};
use bernstein_core::special_functions::MultiIndex;
use bernstein_core::{HarmonicParams, TimeGrid};
use proptest::prelude::*;

fn params(dim: usize) -> impl Strategy<Value = HarmonicParams> {
    (0.05f64..5.0, 0.1f64..3.0).prop_map(move |(l, t)| HarmonicParams::new(l, t, dim).unwrap())
}

/// Sorted fractions of the horizon with gaps above `1e-3`.
fn fractions(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 2..=max).prop_filter_map("gaps too small", |mut v| {
        v.sort_by(|a, b| a.total_cmp(b));
        let ok = v[0] > 1e-3 && v[v.len() - 1] < 1.0 - 1e-3 && v.windows(2).all(|w| w[1] - w[0] > 1e-3);
        ok.then_some(v)
    })
}

fn spec_of(kind: usize, p: HarmonicParams) -> ProcessSpec {
    match kind {
        0 => ProcessSpec::stationary(p),
        1 => ProcessSpec::pinned(p),
        2 => ProcessSpec::pinned_reversed(p),
        3 => ProcessSpec::bridge(p, vec![1.0; p.dim]).unwrap(),
        _ => ProcessSpec::periodic(p, 0.5).unwrap(),
    }
}

proptest! {
    #[test]
    fn kernel_is_symmetric_and_positive(
        p in params(2),
        t in 0.01f64..5.0,
        x in prop::array::uniform2(-3.0f64..3.0),
        y in prop::array::uniform2(-3.0f64..3.0),
    ) {
        let a = mehler_closed(&x, t, &y, &p).unwrap();
        let b = mehler_closed(&y, t, &x, &p).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a > 0.0);
    }

    #[test]
    fn stationary_covariance_is_shift_invariant(p in params(1), s in 0.0f64..1.0, t in 0.0f64..1.0, h in 0.0f64..1.0) {
        let spec = ProcessSpec::stationary(p);
        let big_t = p.horizon;
        let a = spec.covariance_scalar(s * big_t * 0.5, t * big_t * 0.5).unwrap();
        let b = spec.covariance_scalar((s + h) * big_t * 0.5, (t + h) * big_t * 0.5).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
    }

    #[test]
    fn reversal_is_exact(p in params(1), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let big_t = p.horizon;
        let (s, t) = (s * big_t, t * big_t);
        let forward = ProcessSpec::pinned(p).covariance_scalar(big_t - s, big_t - t).unwrap();
        let reversed = ProcessSpec::pinned_reversed(p).covariance_scalar(s, t).unwrap();
        prop_assert_eq!(forward, reversed);
    }

    #[test]
    fn precision_inverts_covariance(p in params(1), kind in 0usize..5, f in fractions(10)) {
        let spec = spec_of(kind, p);
        let grid = TimeGrid::new(f.iter().map(|v| v * p.horizon).collect()).unwrap();
        let cov = spec.covariance_matrix(&grid).unwrap();
        let prec = spec.precision_matrix(&grid).unwrap();
        prop_assert!(identity_residual(&cov, &prec).unwrap() <= 1e-8);
    }

    #[test]
    fn covariance_is_positive_definite(p in params(1), kind in 0usize..5, f in fractions(12)) {
        let spec = spec_of(kind, p);
        let grid = TimeGrid::new(f.iter().map(|v| v * p.horizon).collect()).unwrap();
        let cov = spec.covariance_matrix(&grid).unwrap();
        let factor = cholesky(&cov, 0.0);
        prop_assert!(factor.is_ok());
        prop_assert_eq!(factor.unwrap().jitter(), 0.0);
    }

    #[test]
    fn weights_decay_geometrically(p in params(2), theta in 0.05f64..3.0, a in 0usize..10, b in 0usize..10, axis in 0usize..2) {
        let mp = MixtureParams::new(p, theta).unwrap();
        let base = MultiIndex::new(vec![a, b]).unwrap();
        let mut raised = vec![a, b];
        raised[axis] += 1;
        let step = ln_mixture_weight(&MultiIndex::new(raised).unwrap(), &mp).unwrap()
            - ln_mixture_weight(&base, &mp).unwrap();
        let expected = -p.lambda * mp.period();
        prop_assert!((step - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn periodic_forms_agree(lambda in 0.01f64..20.0, period in 0.05f64..10.0, f in 0.0f64..1.0) {
        let tau = f * period;
        let a = periodic_covariance(lambda, period, tau);
        let b = periodic_covariance_exp_form(lambda, period, tau);
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn bridge_covariance_vanishes_at_endpoints(p in params(1), t in 0.0f64..1.0) {
        let spec = ProcessSpec::bridge(p, vec![0.0]).unwrap();
        let t = t * p.horizon;
        prop_assert_eq!(spec.covariance_scalar(0.0, t).unwrap(), 0.0);
        prop_assert_eq!(spec.covariance_scalar(t, p.horizon).unwrap(), 0.0);
    }
}
