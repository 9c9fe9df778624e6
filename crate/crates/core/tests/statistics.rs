//! Slower statistical checks of the estimators against their closed-form
//! expectations, at desk-scale replication counts.

use proxy_td::aggregate::RuleId;
use proxy_td::domain::{
    dist_kendall_orders, proxy_distances, CategoricalAnswer, DistanceMatrix, Population,
    ProtoPopulation, ProtoShape, RankingAnswer,
};
use proxy_td::estimate::{ip_efl, EstimatorConfig};
use proxy_td::noise::{
    derive_seed, gen_ier, gen_mallows, rng_from_seed, sample_fault, sample_population,
};
use proxy_td::pipeline::{run_ip_td, run_p_td};
use rand::Rng;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Midrank-based Spearman correlation.
fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn midranks(xs: &[f64]) -> Vec<f64> {
        let n = xs.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap());
        let mut ranks = vec![0.0; n];
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && xs[idx[j + 1]] == xs[idx[i]] {
                j += 1;
            }
            let rank = (i + j) as f64 / 2.0;
            for &t in &idx[i..=j] {
                ranks[t] = rank;
            }
            i = j + 1;
        }
        ranks
    }
    let (ra, rb) = (midranks(a), midranks(b));
    let (ma, mb) = (mean(&ra), mean(&rb));
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// Weighted proxy distances concentrate at
/// `f_i + (1 - 2 f_i) * sum w f / sum w` over the other workers, for a
/// fixed population and fixed weights (binary labels).
#[test]
fn weighted_proxy_expectation_matches_closed_form() {
    let faults = [0.1, 0.3, 0.45, 0.25, 0.2, 0.35];
    let weights = [1.0, 0.7, 0.3, 1.2, 0.5, 0.9];
    let n = faults.len();
    let m = 2000;
    let reps = 300;
    let pop = Population::new(faults.to_vec()).unwrap();
    let mut rng = rng_from_seed(0x51);
    let mut sums = vec![0.0; n];
    for _ in 0..reps {
        let labels: Vec<usize> = (0..m).map(|_| rng.random_range(0..2)).collect();
        let truth = CategoricalAnswer::new(labels, 2).unwrap();
        let inst = gen_ier(&truth, &pop, &mut rng).unwrap();
        let dm = DistanceMatrix::from_instance(&inst).unwrap();
        for (s, p) in sums.iter_mut().zip(dm.weighted_proxy(&weights).unwrap()) {
            *s += p;
        }
    }
    for i in 0..n {
        let num: f64 =
            (0..n).filter(|&j| j != i).map(|j| weights[j] * faults[j]).sum();
        let den: f64 = (0..n).filter(|&j| j != i).map(|j| weights[j]).sum();
        let target = faults[i] + (1.0 - 2.0 * faults[i]) * num / den;
        let got = sums[i] / reps as f64;
        assert!((got - target).abs() <= 0.03, "worker {i}: {got} vs {target}");
    }
}

/// After iterations the weighted proxy suppresses its noise term: the
/// regression intercept of proxy distance on fault is no larger at T = 8
/// than at T = 1.
#[test]
fn iterating_shrinks_the_proxy_noise_intercept() {
    let proto =
        ProtoPopulation::new(ProtoShape::Normal { mean: 0.4, sd: 0.05 }, (0.0, 1.0)).unwrap();
    let (n, m, pops) = (30usize, 200usize, 500usize);
    let mut rng = rng_from_seed(0x52);
    let mut fs = Vec::with_capacity(n * pops);
    let mut pi1 = Vec::with_capacity(n * pops);
    let mut pi8 = Vec::with_capacity(n * pops);
    for _ in 0..pops {
        let labels: Vec<usize> = (0..m).map(|_| rng.random_range(0..2)).collect();
        let truth = CategoricalAnswer::new(labels, 2).unwrap();
        let pop = sample_population(&proto, n, &mut rng).unwrap();
        let inst = gen_ier(&truth, &pop, &mut rng).unwrap();
        fs.extend_from_slice(pop.faults());
        pi1.extend(ip_efl(&inst, &EstimatorConfig::default().with_iterations(1)).unwrap().values);
        pi8.extend(ip_efl(&inst, &EstimatorConfig::default().with_iterations(8)).unwrap().values);
    }
    let intercept = |pis: &[f64]| -> f64 {
        let fbar = mean(&fs);
        let pbar = mean(pis);
        let cov: f64 = fs.iter().zip(pis).map(|(f, p)| (f - fbar) * (p - pbar)).sum();
        let var: f64 = fs.iter().map(|f| (f - fbar).powi(2)).sum();
        pbar - (cov / var) * fbar
    };
    let (i1, i8v) = (intercept(&pi1), intercept(&pi8));
    println!("noise intercepts: T=1 {i1:.4}, T=8 {i8v:.4}");
    assert!(i8v <= i1 + 1e-6, "iterating should not grow the intercept: {i8v} vs {i1}");
}

/// The Kendall proxy estimate orders workers like their realized distance
/// to the true ranking on Mallows instances (rank correlation above 0.5).
#[test]
fn mallows_proxy_tracks_empirical_fault() {
    let (n, c, reps) = (30usize, 4usize, 200usize);
    let proto =
        ProtoPopulation::new(ProtoShape::Normal { mean: 0.85, sd: 0.15 }, (0.05, 3.0)).unwrap();
    let truth = RankingAnswer::identity(c).unwrap();
    let mut rng = rng_from_seed(0x53);
    let mut rho_sum = 0.0;
    for _ in 0..reps {
        let phis: Vec<f64> = (0..n).map(|_| sample_fault(&proto, &mut rng)).collect();
        let inst = gen_mallows(&truth, &phis, &mut rng).unwrap();
        let pi = proxy_distances::<f64>(&inst).unwrap();
        let empirical: Vec<f64> = match inst.answers() {
            proxy_td::domain::AnswerMatrix::Ranking(rows) => rows
                .iter()
                .map(|r| dist_kendall_orders::<f64>(r, &truth).unwrap())
                .collect(),
            _ => unreachable!(),
        };
        rho_sum += spearman(&pi, &empirical);
    }
    let rho = rho_sum / reps as f64;
    println!("mean Spearman correlation: {rho:.3}");
    assert!(rho > 0.5, "mean Spearman {rho} not above 0.5");
}

/// Iterating the proxy estimator does not hurt aggregation on the binary
/// benchmark (small slack for Monte Carlo noise).
#[test]
fn ip_td_does_not_lose_to_plain_p_td() {
    let spec = proxy_td::noise::NoiseModelSpec {
        kind: proxy_td::noise::NoiseKind::Ier,
        questions: Some(50),
        candidates: None,
        categories: Some(2),
        proto: proxy_td::noise::ProtoSpec {
            shape: proxy_td::noise::ProtoShapeSpec::Normal { mean: 0.45, sd: 0.1 },
            clip: Some((0.0, 1.0)),
        },
        truth: proxy_td::noise::TruthPolicy::Default,
    };
    let reps = 300;
    let (mut ip, mut p) = (Vec::new(), Vec::new());
    for rep in 0..reps {
        let seed = derive_seed(0x54, rep);
        let inst = spec.generate(40, seed).unwrap();
        ip.push(run_ip_td(&inst, 8, RuleId::Plurality, seed).unwrap().error.unwrap());
        p.push(run_p_td(&inst, 0.0, RuleId::Plurality, seed).unwrap().error.unwrap());
    }
    let (ip, p) = (mean(&ip), mean(&p));
    println!("ip-td {ip:.4} vs 0-p-td {p:.4}");
    assert!(ip <= p + 0.005, "ip-td {ip} vs 0-p-td {p}");
}
