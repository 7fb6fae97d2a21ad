use std::collections::BTreeMap;

use bdp_ldp::model::{RateModel, SlowlyVarying, TargetFunction};
use bdp_ldp::sim::{
    sample_bdp, sample_poisson_difference, sample_reference_as_difference, sample_reference_walk, GuidedProposal,
    RngStream, SampleOutcome, SampleStatus,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const N: u64 = 100_000;

fn unit() -> SlowlyVarying {
    SlowlyVarying::constant(1.0).unwrap()
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn within(got: f64, want: f64, stderr: f64) -> bool {
    (got - want).abs() <= 3.0 * stderr
}

fn draw(seed: u64, n: u64, f: impl Fn(&mut rand_chacha::ChaCha8Rng) -> SampleOutcome) -> Vec<SampleOutcome> {
    (0..n).map(|i| f(&mut RngStream::new(seed, i).rng())).collect()
}

#[test]
fn holding_time_at_zero_is_exponential() {
    let model = RateModel::new(1.0, 0.0, unit(), unit()).unwrap();
    assert_eq!(model.lambda(0), 1.0);
    let outs = draw(101, N, |rng| sample_bdp(&model, 1.0, rng, 1_000_000));
    let p = outs.iter().filter(|o| o.path.n_jumps() == 0).count() as f64 / N as f64;
    let want = (-1.0f64).exp();
    let se = (want * (1.0 - want) / N as f64).sqrt();
    assert!(within(p, want, se), "{p} vs {want}");
}

#[test]
fn zero_jump_cap_truncates_with_holding_probability() {
    let model = RateModel::new(1.0, 0.0, unit(), unit())
        .unwrap()
        .with_lambda_overrides([(0, 0.7)])
        .unwrap();
    let outs = draw(102, N, |rng| sample_bdp(&model, 2.0, rng, 0));
    assert!(outs.iter().all(|o| o.path.n_jumps() == 0));
    let p = outs.iter().filter(|o| o.status == SampleStatus::Truncated).count() as f64 / N as f64;
    let want = 1.0 - (-1.4f64).exp();
    let se = (want * (1.0 - want) / N as f64).sqrt();
    assert!(within(p, want, se), "{p} vs {want}");
}

#[test]
fn one_jump_probability_of_a_three_state_chain() {
    let (h0, h1, horizon) = (1.5, 1.1, 1.3);
    let model = RateModel::new(1.0, 0.0, unit(), unit())
        .unwrap()
        .with_lambda_overrides([(0, h0), (1, 0.8)])
        .unwrap()
        .with_mu_overrides([(1, h1 - 0.8)])
        .unwrap();
    let outs = draw(103, N, |rng| sample_bdp(&model, horizon, rng, 2));
    let p = outs
        .iter()
        .filter(|o| o.status == SampleStatus::Complete && o.path.n_jumps() == 1)
        .count() as f64
        / N as f64;
    // ∫₀ᵀ h0·e^{−h0·s}·e^{−h1·(T−s)} ds
    let want = h0 * ((-h1 * horizon).exp() - (-h0 * horizon).exp()) / (h0 - h1);
    let se = (want * (1.0 - want) / N as f64).sqrt();
    assert!(within(p, want, se), "{p} vs {want}");
}

#[test]
fn reference_walk_moments() {
    let horizon = 5.0;
    let outs = draw(104, N, |rng| sample_reference_walk(horizon, rng, 1_000_000));
    let counts: Vec<f64> = outs.iter().map(|o| o.path.n_jumps() as f64).collect();
    let ends: Vec<f64> = outs.iter().map(|o| o.path.terminal_value() as f64).collect();
    let (m, se) = mean_and_stderr(&counts);
    assert!(within(m, horizon, se), "mean N_T {m}");
    let (m, se) = mean_and_stderr(&ends);
    assert!(within(m, 0.0, se), "mean terminal {m}");
    let squares: Vec<f64> = ends.iter().map(|e| e * e).collect();
    let (v, se) = mean_and_stderr(&squares);
    assert!(within(v, horizon, se), "variance {v}");
}

#[test]
fn difference_construction_has_the_reference_law() {
    let horizon = 3.0;
    let a = draw(105, N, |rng| sample_reference_walk(horizon, rng, 1_000_000));
    let b = draw(106, N, |rng| sample_reference_as_difference(horizon, rng, 1_000_000));
    let tally = |outs: &[SampleOutcome]| {
        let mut m: BTreeMap<(usize, i64), u64> = BTreeMap::new();
        for o in outs {
            *m.entry((o.path.n_jumps(), o.path.terminal_value())).or_default() += 1;
        }
        m
    };
    let (ta, tb) = (tally(&a), tally(&b));
    let mut keys: Vec<(usize, i64)> = ta.keys().chain(tb.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    // Two-sample chi-square with equal sizes; cells with fewer than 10
    // pooled counts are lumped together.
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut rest_a, mut rest_b) = (0.0, 0.0);
    for k in keys {
        let x = *ta.get(&k).unwrap_or(&0) as f64;
        let y = *tb.get(&k).unwrap_or(&0) as f64;
        if x + y < 10.0 {
            rest_a += x;
            rest_b += y;
            continue;
        }
        stat += (x - y).powi(2) / (x + y);
        bins += 1;
    }
    if rest_a + rest_b > 0.0 {
        stat += (rest_a - rest_b).powi(2) / (rest_a + rest_b);
        bins += 1;
    }
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(stat < critical, "chi-square {stat} over {bins} bins, critical {critical}");
}

#[test]
fn suppressed_down_process_is_a_poisson_path() {
    let horizon = 4.0;
    let outs = draw(107, N, |rng| sample_poisson_difference(horizon, 0.5, 0.0, rng, 1_000_000));
    assert!(outs.iter().all(|o| o.path.marks().iter().all(|&m| m == 1)));
    let counts: Vec<f64> = outs.iter().map(|o| o.path.n_jumps() as f64).collect();
    let (m, se) = mean_and_stderr(&counts);
    assert!(within(m, horizon / 2.0, se), "{m}");
}

#[test]
fn guided_walk_tracks_the_target() {
    let f = TargetFunction::power(1.0, 1.0).unwrap();
    let g = GuidedProposal::new(&f, 10.0, 10.0, 1.0, 1000).unwrap();
    let outs = draw(108, 10_000, |rng| g.sample(rng, 1_000_000));
    let ends: Vec<f64> = outs.iter().map(|o| o.path.terminal_value() as f64 / 10.0).collect();
    let (m, _) = mean_and_stderr(&ends);
    assert!((m - 1.0).abs() < 0.1, "{m}");
}

#[test]
fn guided_weights_have_unit_mass() {
    let f = TargetFunction::power(1.0, 1.0).unwrap();
    let g = GuidedProposal::new(&f, 5.0, 5.0, 1.0, 1000).unwrap();
    let outs = draw(109, N, |rng| g.sample(rng, 1_000_000));
    let w: Vec<f64> = outs.iter().map(|o| (-o.log_proposal_offset).exp()).collect();
    let (m, se) = mean_and_stderr(&w);
    assert!(within(m, 1.0, se), "{m} ± {se}");
}

#[test]
fn guided_estimate_of_a_bounded_functional_matches_reference() {
    let horizon = 6.0;
    let event = |o: &SampleOutcome| o.path.terminal_value() >= 3;
    let reference = draw(110, N, |rng| sample_reference_walk(horizon, rng, 1_000_000));
    let plain: Vec<f64> = reference.iter().map(|o| event(o) as u8 as f64).collect();
    let f = TargetFunction::piecewise_linear(vec![(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)]).unwrap();
    let g = GuidedProposal::new(&f, 4.0, horizon, 0.8, 200).unwrap();
    let guided = draw(111, N, |rng| g.sample(rng, 1_000_000));
    let weighted: Vec<f64> = guided
        .iter()
        .map(|o| if event(o) { (-o.log_proposal_offset).exp() } else { 0.0 })
        .collect();
    let (a, sa) = mean_and_stderr(&plain);
    let (b, sb) = mean_and_stderr(&weighted);
    assert!((a - b).abs() <= 3.0 * (sa * sa + sb * sb).sqrt(), "{a} ± {sa} vs {b} ± {sb}");
}

#[test]
fn samples_are_bit_reproducible() {
    let model = RateModel::new(2.0, 1.0, unit(), unit()).unwrap();
    let f = TargetFunction::power(1.0, 1.0).unwrap();
    let g = GuidedProposal::new(&f, 3.0, 4.0, 1.0, 100).unwrap();
    for i in 0..50 {
        let s = RngStream::new(55, i);
        assert_eq!(sample_bdp(&model, 0.5, &mut s.rng(), 10_000), sample_bdp(&model, 0.5, &mut s.rng(), 10_000));
        assert_eq!(sample_reference_walk(4.0, &mut s.rng(), 100), sample_reference_walk(4.0, &mut s.rng(), 100));
        assert_eq!(g.sample(&mut s.rng(), 100), g.sample(&mut s.rng(), 100));
    }
}
