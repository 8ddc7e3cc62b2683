use degcrit_core::degset::DegreeSet;
use degcrit_core::sampler::{
    build_dp, defects, exact_last_degree_distribution, exact_sequence_probability, exact_total_weight,
    pair_configuration, sample_degree_sequence, trial_rng, Sampler,
};
use degcrit_core::Error;

const SETS: [&str; 3] = ["1,3", "1,2,3", "0,1,4,5"];

#[test]
fn dp_matches_enumeration_everywhere() {
    let mut compared = 0;
    for spec in SETS {
        let ds = DegreeSet::parse(spec).unwrap();
        for n in 1..=8usize {
            for two_m in 0..=16usize {
                let dp = match build_dp(&ds, n, two_m) {
                    Ok(dp) => dp,
                    Err(Error::Infeasible(_)) => {
                        assert_eq!(exact_total_weight(&ds, n, two_m).unwrap(), 0.0);
                        continue;
                    }
                    Err(e) => panic!("{e}"),
                };
                let total = exact_total_weight(&ds, n, two_m).unwrap();
                assert!((dp.log_weight(n, two_m).exp() / total - 1.0).abs() < 1e-12);
                // Every step of the recursion is the last-degree law of a smaller problem.
                for i in 1..=n {
                    for j in 0..=two_m {
                        if dp.log_weight(i, j) == f64::NEG_INFINITY {
                            continue;
                        }
                        let got = dp.last_degree_distribution(i, j).unwrap();
                        let want = exact_last_degree_distribution(&ds, i, j).unwrap();
                        assert_eq!(got.len(), want.len(), "{spec} ({i},{j})");
                        for (a, b) in got.iter().zip(&want) {
                            assert_eq!(a.0, b.0);
                            assert!((a.1 - b.1).abs() < 1e-12, "{spec} n={n} ({i},{j}) d={}: {} vs {}", a.0, a.1, b.1);
                        }
                        compared += 1;
                    }
                }
            }
        }
    }
    assert!(compared > 500);
}

#[test]
fn enumerated_probabilities_sum_to_one() {
    let ds = DegreeSet::parse("1,2,3").unwrap();
    let (n, m) = (5usize, 5usize);
    let mut sum = 0.0;
    let mut seq = vec![1u32; n];
    loop {
        sum += exact_sequence_probability(&ds, n, m, &seq).unwrap();
        let mut pos = 0;
        while pos < n && seq[pos] == 3 {
            seq[pos] = 1;
            pos += 1;
        }
        if pos == n {
            break;
        }
        seq[pos] += 1;
    }
    assert!((sum - 1.0).abs() < 1e-13);
    assert_eq!(exact_sequence_probability(&ds, 5, 5, &[4, 3, 1, 1, 1]).unwrap(), 0.0);
}

#[test]
fn sampled_sequences_follow_weights() {
    let ds = DegreeSet::parse("1,3").unwrap();
    let dp = build_dp(&ds, 4, 6).unwrap();
    let mut rng = trial_rng(2024, 0);
    let mut slot = [0u32; 4];
    let draws = 100_000;
    for _ in 0..draws {
        let seq = sample_degree_sequence(&dp, &mut rng).unwrap();
        assert_eq!(seq.iter().sum::<u32>(), 6);
        slot[seq.iter().position(|&d| d == 3).unwrap()] += 1;
    }
    let expected = draws as f64 / 4.0;
    let chi2: f64 = slot.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 3 degrees of freedom; 16.27 is the 0.999 quantile.
    assert!(chi2 < 16.27, "{slot:?} χ² = {chi2}");
}

/// All perfect matchings of `stubs` (vertex per stub).
fn matchings(stubs: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if stubs.is_empty() {
        out.push(acc.clone());
        return;
    }
    for k in 1..stubs.len() {
        let mut rest = stubs[1..].to_vec();
        let partner = rest.remove(k - 1);
        acc.push((stubs[0].min(partner), stubs[0].max(partner)));
        matchings(&rest, acc, out);
        acc.pop();
    }
}

#[test]
fn pairing_simplicity_rate_matches_matching_enumeration() {
    let seq = [3u32, 1, 1, 1];
    let stubs: Vec<usize> = seq.iter().enumerate().flat_map(|(v, &d)| std::iter::repeat_n(v, d as usize)).collect();
    let mut all = Vec::new();
    matchings(&stubs, &mut Vec::new(), &mut all);
    assert_eq!(all.len(), 15);
    let simple = all.iter().filter(|e| defects(e) == (0, 0)).count();
    assert_eq!(simple, 6);
    let p = simple as f64 / 15.0;
    let mut rng = trial_rng(5, 5);
    let draws = 100_000;
    let hits = (0..draws).filter(|_| defects(&pair_configuration(&seq, &mut rng)) == (0, 0)).count();
    let sd = (p * (1.0 - p) / draws as f64).sqrt();
    assert!((hits as f64 / draws as f64 - p).abs() < 5.0 * sd);
}

#[test]
fn samples_have_degrees_in_set_and_right_size() {
    for (spec, n, m) in [("1,3,5,7", 500usize, 360usize), ("1,2,3", 300, 310), ("0,1,4,5", 200, 180)] {
        let ds = DegreeSet::parse(spec).unwrap();
        let s = Sampler::new(&ds, n, m).unwrap();
        for t in 0..20 {
            let (g, attempts) = s.sample(&mut trial_rng(1, t)).unwrap();
            assert!(attempts >= 1);
            assert_eq!(g.m(), m);
            assert_eq!(g.n(), n);
            assert!(g.degrees().iter().all(|&d| ds.contains(d as u32)), "{spec}");
        }
    }
}

#[test]
fn large_tables_stay_finite() {
    let ds = DegreeSet::parse("1,3,5,7").unwrap();
    let dp = build_dp(&ds, 4096, 5896).unwrap();
    assert!(dp.log_weight(4096, 5896).is_finite());
    assert!(dp.cells() < 4097 * 5897);
}
