use proptest::prelude::*;

use rwre::cli::{ClassifyArgs, Command, ExperimentConfig};
use rwre::env::{kappa_root, sample_window, EnvLaw};
use rwre::exact::{absorption_oracle, cascade, hitting_prob};
use rwre::ladder::{gamma_root, tilt, StepLaw};
use rwre::stats::Moments;

fn two_point_law() -> impl Strategy<Value = EnvLaw> {
    (0.05f64..0.95, 0.02f64..0.98, 0.02f64..0.98)
        .prop_map(|(w, a, b)| EnvLaw::discrete(vec![(w, a), (1.0 - w, b)]).unwrap())
}

fn negative_drift_steps() -> impl Strategy<Value = StepLaw> {
    (0.05f64..0.45, 0.1f64..3.0, 0.1f64..3.0).prop_filter_map(
        "needs negative mean",
        |(p, up, down)| {
            let law = StepLaw::new(vec![(p, up), (1.0 - p, -down)]).ok()?;
            (law.mean() < -1e-3).then_some(law)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn law_text_round_trips(law in two_point_law()) {
        let back: EnvLaw = law.to_string().parse().unwrap();
        prop_assert_eq!(back, law);
    }

    #[test]
    fn config_round_trips(law in two_point_law(), seed in any::<u64>(), workers in 1usize..64) {
        let cfg = ExperimentConfig {
            seed,
            workers,
            out: Some("runs/x".into()),
            command: Command::Classify(ClassifyArgs { law }),
        };
        let json = cfg.to_json();
        let back = ExperimentConfig::from_json(&json).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), json);
    }

    #[test]
    fn hitting_probabilities_are_monotone_and_match_solver(law in two_point_law(), seed in any::<u64>()) {
        let env = sample_window(&law, seed, -8, 8).unwrap();
        let mut prev = 1.0;
        for x in -8..=8 {
            let (left, right) = hitting_prob(&env, x, -8, 8).unwrap();
            prop_assert!((left + right - 1.0).abs() < 1e-12);
            prop_assert!(left <= prev + 1e-15);
            prev = left;
            let (oracle, _) = absorption_oracle(&env, -8, 8, x).unwrap();
            prop_assert!((left - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn cascade_satisfies_backward_recursion(law in two_point_law(), seed in any::<u64>()) {
        // R_{i,j} = rho_i (1 + R_{i+1,j}).
        let env = sample_window(&law, seed, 0, 30).unwrap();
        for i in 0..29 {
            let (_, r) = cascade(&env, i, 30).unwrap();
            let (_, r_next) = cascade(&env, i + 1, 30).unwrap();
            let rho = (1.0 - env.omega[i as usize]) / env.omega[i as usize];
            prop_assert!((r - rho * (1.0 + r_next)).abs() <= 1e-9 * r.max(1.0));
        }
    }

    #[test]
    fn kappa_solves_moment_equation(law in two_point_law()) {
        prop_assume!(law.mean_log_rho() < -1e-3);
        if let Some(k) = kappa_root(&law, 1e-13).unwrap() {
            prop_assert!(k > 0.0);
            prop_assert!((law.moment_rho(k) - 1.0).abs() < 1e-9);
        } else {
            prop_assert!(law.moment_rho(64.0) <= 1.0);
        }
    }

    #[test]
    fn tilted_law_is_a_positive_drift_probability(step in negative_drift_steps()) {
        let g = gamma_root(&step, 0.0).unwrap();
        let q = tilt(&step, g).unwrap();
        prop_assert!((q.weight_sum() - 1.0).abs() < 1e-9);
        prop_assert!(q.mean() > 0.0);
        prop_assert!(step.mgf(g / 2.0) < 1.0);
    }

    #[test]
    fn moments_merge_is_split_invariant(xs in prop::collection::vec(-1e3f64..1e3, 2..200), cut in 0usize..200) {
        let cut = cut.min(xs.len());
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..cut].iter().for_each(|&x| a.push(x));
        xs[cut..].iter().for_each(|&x| b.push(x));
        let whole = Moments::from_slice(&xs);
        let merged = a.merge(&b);
        prop_assert_eq!(merged.n, whole.n);
        prop_assert!((merged.mean() - whole.mean()).abs() < 1e-9);
        prop_assert!((merged.variance() - whole.variance()).abs() < 1e-6 * whole.variance().max(1.0));
    }
}
