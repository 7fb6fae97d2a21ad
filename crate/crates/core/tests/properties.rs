use bdp_ldp::estimate::{accumulate, merge_batches, Method, Score};
use bdp_ldp::ldp::{decompose_bv, normalizer_psi, rate_functional, theta_from_parts, QuadratureSpec};
use bdp_ldp::model::{RateModel, ScalingScheme, SlowlyVarying, TargetFunction};
use bdp_ldp::pathspace::{
    functional_a, functional_a_window, in_tube, log_density, log_weight_from_functionals, sup_distance, JumpPath,
    ScaledPathView, Tube,
};
use proptest::prelude::*;
use rand::Rng;

fn factor() -> impl Strategy<Value = SlowlyVarying> {
    prop_oneof![
        (0.2f64..3.0).prop_map(|c| SlowlyVarying::constant(c).unwrap()),
        (0.2f64..3.0, -2.0f64..2.0).prop_map(|(c, b)| SlowlyVarying::log_power(c, b).unwrap()),
    ]
}

fn model() -> impl Strategy<Value = RateModel> {
    let exps = prop_oneof![Just((2.0, 1.0)), Just((1.0, 0.0)), Just((0.0, 1.0)), Just((1.5, 0.5)), Just((0.5, 2.0))];
    let overrides = prop::collection::vec((0u64..6, 0.1f64..4.0), 0..4);
    let mu_overrides = prop::collection::vec((1u64..6, 0.1f64..4.0), 0..4);
    (exps, factor(), factor(), overrides, mu_overrides, any::<bool>()).prop_map(|((l, m), y, z, lo, mo, yule)| {
        let base = if yule {
            RateModel::pure_birth(f64::max(l, 0.5), y).unwrap()
        } else {
            RateModel::new(l, m, y, z).unwrap().with_mu_overrides(mo).unwrap()
        };
        base.with_lambda_overrides(lo).unwrap()
    })
}

/// Paths that never step below 0. Under a pure-birth model they also
/// never step down.
fn admissible_path(up_only: bool) -> impl Strategy<Value = JumpPath> {
    (0.5f64..15.0, prop::collection::vec((0.0f64..1.0, any::<bool>()), 0..40)).prop_map(move |(horizon, raw)| {
        let mut times: Vec<f64> = raw.iter().map(|r| r.0 * horizon).filter(|&t| t > 0.0 && t < horizon).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let mut state = 0i64;
        let jumps: Vec<(f64, i8)> = times
            .iter()
            .zip(raw.iter().map(|r| r.1))
            .map(|(&t, up)| {
                let mark = if up || state == 0 || up_only { 1 } else { -1 };
                state += mark as i64;
                (t, mark)
            })
            .collect();
        JumpPath::new(horizon, jumps).unwrap()
    })
}

fn any_path() -> impl Strategy<Value = JumpPath> {
    (0.5f64..15.0, prop::collection::vec((0.0f64..1.0, any::<bool>()), 0..40)).prop_map(|(horizon, raw)| {
        let mut jumps: Vec<(f64, i8)> = raw
            .iter()
            .map(|&(u, up)| (u * horizon, if up { 1 } else { -1 }))
            .filter(|j| j.0 > 0.0 && j.0 < horizon)
            .collect();
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        jumps.dedup_by(|a, b| a.0 == b.0);
        JumpPath::new(horizon, jumps).unwrap()
    })
}

fn target() -> impl Strategy<Value = TargetFunction> {
    prop_oneof![
        (0.1f64..3.0, 0.3f64..2.5).prop_map(|(a, p)| TargetFunction::power(a, p).unwrap()),
        prop::collection::vec(0.05f64..3.0, 1..6).prop_map(|vals| {
            let k = vals.len();
            let mut nodes = vec![(0.0, 0.0)];
            nodes.extend(vals.iter().enumerate().map(|(i, &v)| ((i + 1) as f64 / k as f64, v)));
            TargetFunction::piecewise_linear(nodes).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn density_product_form_matches_functionals(
        (m, path) in model().prop_flat_map(|m| {
            let up_only = m.is_pure_birth();
            (Just(m), admissible_path(up_only))
        })
    ) {
        let product = log_density(&path, &m);
        let functionals = log_weight_from_functionals(&path, &m);
        prop_assert!(product.is_finite());
        let scale = product.abs().max(functionals.abs()).max(1.0);
        prop_assert!((product - functionals).abs() <= 1e-9 * scale, "{product} vs {functionals}");
    }

    #[test]
    fn inadmissible_paths_have_zero_density(m in model(), path in any_path()) {
        if !path.is_admissible() {
            prop_assert_eq!(log_density(&path, &m), f64::NEG_INFINITY);
        }
    }

    #[test]
    fn functional_a_is_additive(m in model(), path in admissible_path(false), split in 0.01f64..0.99) {
        let horizon = path.horizon();
        let s = split * horizon;
        prop_assume!(!path.jump_times().contains(&s));
        let whole = functional_a(&path, &m);
        let parts = functional_a_window(&path, &m, 0.0, s) + functional_a_window(&path, &m, s, horizon);
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(1.0));
        let prefix = path.prefix(s).unwrap();
        prop_assert!((functional_a(&prefix, &m) - functional_a_window(&path, &m, 0.0, s)).abs() <= 1e-12 * whole.max(1.0));
    }

    #[test]
    fn tube_is_monotone_in_epsilon(
        path in any_path(), f in target(), phi in 0.5f64..20.0, e1 in 0.01f64..3.0, extra in 0.0f64..3.0,
    ) {
        let view = ScaledPathView::new(&path, phi);
        if in_tube(&view, &f, e1, 257) {
            prop_assert!(in_tube(&view, &f, e1 + extra, 257));
        }
    }

    #[test]
    fn tube_membership_matches_sup_distance(
        path in any_path(), f in target(), phi in 0.5f64..20.0, eps in 0.01f64..3.0,
    ) {
        let view = ScaledPathView::new(&path, phi);
        let tube = Tube::new(f.clone(), phi, eps);
        prop_assert_eq!(tube.contains(&path), in_tube(&view, &f, eps, 1001));
        let d = sup_distance(&view, &f, 1001);
        prop_assert_eq!(tube.contains(&path), d < eps);
    }

    #[test]
    fn state_ceiling_is_unreachable_inside_tube(f in target(), phi in 0.5f64..20.0, eps in 0.01f64..3.0) {
        let tube = Tube::new(f.clone(), phi, eps);
        let top = tube.state_ceiling() as f64;
        prop_assert!(top / phi - f.sup() >= eps);
    }

    #[test]
    fn path_text_round_trips(path in any_path()) {
        let text = path.to_string();
        let back: JumpPath = text.parse().unwrap();
        prop_assert_eq!(&back, &path);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn decomposition_reconstructs_nodes(vals in prop::collection::vec(-3.0f64..3.0, 1..30)) {
        let k = vals.len();
        let mut nodes = vec![(0.0, 0.0)];
        nodes.extend(vals.iter().enumerate().map(|(i, &v)| ((i + 1) as f64 / k as f64, v)));
        let d = decompose_bv(&nodes).unwrap();
        for (i, &(_, g)) in nodes.iter().enumerate() {
            prop_assert!((d.plus()[i] - d.minus()[i] - g).abs() <= 1e-12);
        }
        prop_assert!(d.plus().windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(d.minus().windows(2).all(|w| w[1] >= w[0]));
        let tv: f64 = nodes.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum();
        prop_assert!((d.total_variation() - tv).abs() <= 1e-12);
    }

    #[test]
    fn nondecreasing_g_is_its_own_positive_part(incs in prop::collection::vec(0.0f64..2.0, 1..30)) {
        let k = incs.len();
        let mut nodes = vec![(0.0, 0.0)];
        let mut g = 0.0;
        for (i, inc) in incs.iter().enumerate() {
            g += inc;
            nodes.push(((i + 1) as f64 / k as f64, g));
        }
        let d = decompose_bv(&nodes).unwrap();
        prop_assert!(d.minus().iter().all(|&m| m == 0.0));
        prop_assert!(d.plus().iter().zip(&nodes).all(|(&p, n)| p == n.1));
    }

    #[test]
    fn psi_over_horizon_is_v_of_phi(m in model(), horizon in 1.01f64..1e4, alpha in 0.2f64..2.0) {
        for scheme in [ScalingScheme::Identity, ScalingScheme::LogDamped, ScalingScheme::power(1.5, alpha).unwrap()] {
            let psi = normalizer_psi(&scheme, &m, horizon);
            let v = m.eval_v(scheme.phi(horizon));
            prop_assert_eq!(psi, horizon * v);
            prop_assert!((psi / horizon - v).abs() <= 2.0 * f64::EPSILON * v);
        }
    }

    #[test]
    fn theta_identity(horizon in 1.0f64..1e4, phi in 1.01f64..1e3, v in 1e-3f64..1e6) {
        let theta = theta_from_parts(horizon, phi, v).unwrap();
        let lhs = theta * theta * phi.ln();
        let rhs = horizon * v * phi;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn rate_functional_power_closed_form(a in 0.1f64..3.0, p in 0.5f64..3.0, k in prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(3.0)]) {
        let f = TargetFunction::power(a, p).unwrap();
        let exact = a.powf(k) / (p * k + 1.0);
        let got = rate_functional(&f, k, QuadratureSpec::default());
        prop_assert!((got - exact).abs() <= 1e-6 * exact, "{got} vs {exact}");
    }

    #[test]
    fn split_batches_merge_to_the_whole(cut in 1u64..3000, seed in any::<u64>()) {
        let n = 3000;
        let score = |rng: &mut rand_chacha::ChaCha8Rng| {
            let u: f64 = rng.random();
            if u < 0.3 { Score::Miss } else { Score::LogWeight(200.0 * (u - 0.5)) }
        };
        let whole = accumulate(Method::IsReference, 9, seed, 0..n, score).to_record();
        let parts = [
            accumulate(Method::IsReference, 9, seed, 0..cut, score),
            accumulate(Method::IsReference, 9, seed, cut..n, score),
        ];
        let merged = merge_batches(&parts).unwrap();
        prop_assert_eq!(merged.n, whole.n);
        prop_assert_eq!(merged.hits, whole.hits);
        prop_assert!((merged.log_p_hat - whole.log_p_hat).abs() <= 1e-12 * whole.log_p_hat.abs());
    }
}
