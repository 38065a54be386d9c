use loopcount::dist::{chernoff_tails, pb_central_moments, pb_moments, pb_parity_split, pb_pmf};
use loopcount::{PoissonBinomialParams, Polynomial};
use proptest::prelude::*;

fn probs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 0..=max_len)
}

fn away_from_half(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.001f64..0.49, 0.51f64..0.999], 0..=max_len)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn pmf_is_a_distribution(p in probs(60)) {
        let law = pb_pmf(&PoissonBinomialParams::new(p)).unwrap();
        prop_assert!((law.total() - 1.0).abs() < 1e-12);
        prop_assert!(law.pmf.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn parity_split_matches_direct_sum(p in away_from_half(12), c in prop::collection::vec(-3.0f64..3.0, 1..=5), rho in 0u8..2) {
        let params = PoissonBinomialParams::new(p);
        let f = Polynomial::new(c).unwrap();
        let law = pb_pmf(&params).unwrap();
        let direct: f64 = law.pmf.iter().enumerate().filter(|(t, _)| t % 2 == rho as usize).map(|(t, q)| f.eval(t as f64) * q).sum();
        let split = pb_parity_split(&params, &f, rho).unwrap();
        prop_assert!(rel_close(split, direct, 1e-10), "{split} vs {direct}");
    }

    #[test]
    fn parity_split_degree_eight(p in away_from_half(12), c in prop::collection::vec(-1.0f64..1.0, 9)) {
        let params = PoissonBinomialParams::new(p);
        let f = Polynomial::new(c).unwrap();
        let law = pb_pmf(&params).unwrap();
        for rho in 0..2u8 {
            let direct: f64 = law.pmf.iter().enumerate().filter(|(t, _)| t % 2 == rho as usize).map(|(t, q)| f.eval(t as f64) * q).sum();
            prop_assert!(rel_close(pb_parity_split(&params, &f, rho).unwrap(), direct, 1e-10));
        }
    }

    #[test]
    fn parity_split_is_complete(p in away_from_half(12), c in prop::collection::vec(-3.0f64..3.0, 1..=5)) {
        let params = PoissonBinomialParams::new(p);
        let f = Polynomial::new(c).unwrap();
        let full = pb_pmf(&params).unwrap().expect(|t| f.eval(t as f64));
        let sum = pb_parity_split(&params, &f, 0).unwrap() + pb_parity_split(&params, &f, 1).unwrap();
        prop_assert!(rel_close(sum, full, 1e-12));
    }

    #[test]
    fn moment_closed_forms(p in probs(40)) {
        let params = PoissonBinomialParams::new(p);
        let law = pb_pmf(&params).unwrap();
        for k in 1..=4u32 {
            let direct = law.expect(|t| (t as f64).powi(k as i32));
            prop_assert!(rel_close(pb_moments(&params, k).unwrap(), direct, 1e-10), "k={}", k);
        }
        let m = law.mean();
        let c2 = law.expect(|t| (t as f64 - m).powi(2));
        let c4 = law.expect(|t| (t as f64 - m).powi(4));
        prop_assert!(rel_close(pb_central_moments(&params, 2).unwrap(), c2, 1e-10));
        prop_assert!(rel_close(pb_central_moments(&params, 4).unwrap(), c4, 1e-10));
    }

    #[test]
    fn cumulant_relation(p in probs(30)) {
        // μ₄ = κ₄ + 3κ₂², with κ₄ additive over independent summands
        let params = PoissonBinomialParams::new(p.clone());
        let k2: f64 = p.iter().map(|q| q * (1.0 - q)).sum();
        let k4: f64 = p.iter().map(|q| q - 7.0 * q * q + 12.0 * q.powi(3) - 6.0 * q.powi(4)).sum();
        prop_assert!(rel_close(pb_central_moments(&params, 4).unwrap(), k4 + 3.0 * k2 * k2, 1e-12));
    }

    #[test]
    fn varsum_matches_raw_variance(p in probs(40)) {
        let law = pb_pmf(&PoissonBinomialParams::new(p)).unwrap();
        prop_assert!(rel_close(law.variance(), law.variance_raw(), 1e-10));
    }

    #[test]
    fn chernoff_bounds_dominate(p in probs(200), grid in 0usize..40) {
        let params = PoissonBinomialParams::new(p);
        let law = pb_pmf(&params).unwrap();
        let mean = params.mean();
        let s = grid as f64 * 0.5;
        let (lo, hi) = chernoff_tails(&params, s).unwrap();
        prop_assert!(law.cdf(mean - s) <= lo * (1.0 + 1e-12) + 1e-15);
        prop_assert!(law.upper_tail(mean + s) <= hi * (1.0 + 1e-12) + 1e-15);
    }
}
