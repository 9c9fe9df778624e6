//! Voting rules over rankings and pairwise-comparison profiles.

use rand::Rng;

use crate::domain::{
    pair_count, pairs, AnswerMatrix, Instance, PairwiseVector, RankingAnswer,
};
use crate::error::{Error, Result};
use crate::noise::{derive_seed, rng_from_seed};
use crate::scalar::Real;

use super::WeightVector;

/// Exact Kemeny search enumerates all `c!` rankings; above this candidate
/// count we refuse instead of silently approximating.
pub const KEMENY_CANDIDATE_CAP: usize = 8;

const PROJECTION_STREAM: u64 = 0x70726f6a; // per-voter projection sub-seeds

/// The ranking voting rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankingRule {
    Borda,
    Copeland,
    /// Exact Kemeny against the sign-majority vector.
    Kemeny,
    /// Exact Kemeny against the fractional weighted majority graph.
    KemenyWeightedGraph,
    PluralityRank,
    Veto,
    BestDictator,
    RandomDictator,
}

impl RankingRule {
    pub const ALL: [RankingRule; 8] = [
        RankingRule::Borda,
        RankingRule::Copeland,
        RankingRule::Kemeny,
        RankingRule::KemenyWeightedGraph,
        RankingRule::PluralityRank,
        RankingRule::Veto,
        RankingRule::BestDictator,
        RankingRule::RandomDictator,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RankingRule::Borda => "borda",
            RankingRule::Copeland => "copeland",
            RankingRule::Kemeny => "kemeny",
            RankingRule::KemenyWeightedGraph => "kemeny-weighted-graph",
            RankingRule::PluralityRank => "plurality-rank",
            RankingRule::Veto => "veto",
            RankingRule::BestDictator => "best-dictator",
            RankingRule::RandomDictator => "random-dictator",
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.id() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

/// A borrowed view of a ranking-domain profile in either representation.
#[derive(Debug, Clone, Copy)]
pub enum RankingVotes<'a> {
    Orders(&'a [RankingAnswer]),
    Pairwise(&'a [PairwiseVector]),
}

impl<'a> RankingVotes<'a> {
    pub fn from_instance<T: Real>(instance: &'a Instance<T>) -> Result<Self> {
        match instance.answers() {
            AnswerMatrix::Ranking(v) => Ok(RankingVotes::Orders(v)),
            AnswerMatrix::Pairwise(v) => Ok(RankingVotes::Pairwise(v)),
            _ => Err(Error::DomainMismatch {
                what: "ranking aggregation".into(),
                domain: instance.domain(),
            }),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            RankingVotes::Orders(v) => v.len(),
            RankingVotes::Pairwise(v) => v.len(),
        }
    }

    pub fn candidates(&self) -> usize {
        match self {
            RankingVotes::Orders(v) => v[0].candidates(),
            RankingVotes::Pairwise(v) => v[0].candidates(),
        }
    }

    /// Every vote as a pairwise vector.
    pub fn to_pairwise(&self) -> Vec<PairwiseVector> {
        match self {
            RankingVotes::Orders(v) => v.iter().map(RankingAnswer::pairwise).collect(),
            RankingVotes::Pairwise(v) => v.to_vec(),
        }
    }

    /// Every vote as a proper ranking. Cyclic pairwise votes are replaced
    /// by their Kemeny projection (the nearest ranking), with per-voter
    /// sub-seeds so positional rules see a deterministic profile.
    pub fn to_orders(&self, seed: u64) -> Result<Vec<RankingAnswer>> {
        match self {
            RankingVotes::Orders(v) => Ok(v.to_vec()),
            RankingVotes::Pairwise(v) => v
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    kemeny_projection(x, derive_seed(seed, PROJECTION_STREAM ^ (i as u64)))
                })
                .collect(),
        }
    }

    fn order_view(&self, voter: usize, seed: u64) -> Result<RankingAnswer> {
        match self {
            RankingVotes::Orders(v) => Ok(v[voter].clone()),
            RankingVotes::Pairwise(v) => kemeny_projection(
                &v[voter],
                derive_seed(seed, PROJECTION_STREAM ^ (voter as u64)),
            ),
        }
    }
}

/// Fraction-of-weight tallies `v(a, b)` over ordered candidate pairs, and
/// the induced beat relation `y`.
#[derive(Debug, Clone)]
pub struct WeightedMajorityGraph<T> {
    candidates: usize,
    /// `v(a, b)` for lexicographic pairs `a < b`; the flipped direction is
    /// `1 - v(a, b)` by construction.
    v: Vec<T>,
}

impl<T: Real> WeightedMajorityGraph<T> {
    pub fn candidates(&self) -> usize {
        self.candidates
    }

    /// Fraction of (normalized) weight preferring `a` over `b`.
    pub fn fraction(&self, a: usize, b: usize) -> T {
        use crate::domain::pair_index;
        if a < b {
            self.v[pair_index(self.candidates, a, b)]
        } else {
            T::one() - self.v[pair_index(self.candidates, b, a)]
        }
    }

    /// `y(a, b)`: does `a` beat `b` in a pairwise match?
    pub fn beats(&self, a: usize, b: usize) -> bool {
        self.fraction(a, b) > T::of(0.5)
    }
}

/// Build the weighted majority graph of a profile. Weights must be
/// non-negative with a positive total; the ranking pipeline clips negative
/// weights before calling in here.
pub fn majority_graph<T: Real>(
    votes: &RankingVotes<'_>,
    weights: &WeightVector<T>,
) -> Result<WeightedMajorityGraph<T>> {
    let total = check_ranking_weights(votes, weights)?;
    let c = votes.candidates();
    let pv = votes.to_pairwise();
    let mut v = vec![T::zero(); pair_count(c)];
    for (vote, &w) in pv.iter().zip(&weights.weights) {
        for (idx, &e) in vote.entries().iter().enumerate() {
            if e == 1 {
                v[idx] = v[idx] + w;
            }
        }
    }
    for x in &mut v {
        *x = *x / total;
    }
    Ok(WeightedMajorityGraph { candidates: c, v })
}

fn check_ranking_weights<T: Real>(
    votes: &RankingVotes<'_>,
    weights: &WeightVector<T>,
) -> Result<T> {
    if weights.len() != votes.n() {
        return Err(Error::Shape(format!(
            "{} weights for {} votes",
            weights.len(),
            votes.n()
        )));
    }
    if let Some(bad) = weights.weights.iter().find(|w| **w < T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "ranking rules need non-negative weights, got {bad}"
        )));
    }
    let total = weights.sum();
    if total.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DegenerateWeights(total.as_f64()));
    }
    Ok(total)
}

/// Run one voting rule over a profile. Every rule scores the candidates
/// and returns the ranking by ascending score; score ties and any internal
/// sign ties are broken uniformly under `seed`.
pub fn rule_score<T: Real>(
    rule: RankingRule,
    votes: &RankingVotes<'_>,
    weights: &WeightVector<T>,
    seed: u64,
) -> Result<RankingAnswer> {
    let total = check_ranking_weights(votes, weights)?;
    let c = votes.candidates();
    match rule {
        RankingRule::Borda => {
            let orders = votes.to_orders(seed)?;
            let mut scores = vec![T::zero(); c];
            for (order, &w) in orders.iter().zip(&weights.weights) {
                for (pos, &cand) in order.order().iter().enumerate() {
                    scores[cand] = scores[cand] + w * T::of(pos as f64);
                }
            }
            rank_by_score(&scores, seed)
        }
        RankingRule::Copeland => {
            let graph = majority_graph(votes, weights)?;
            let scores: Vec<T> = (0..c)
                .map(|cand| {
                    let losses =
                        (0..c).filter(|&other| other != cand && graph.beats(other, cand)).count();
                    T::of(losses as f64)
                })
                .collect();
            rank_by_score(&scores, seed)
        }
        RankingRule::Kemeny => {
            check_cap(c)?;
            let y0 = sign_majority_vector(votes, weights, seed)?;
            kemeny_closest_to_signs(c, &y0, seed)
        }
        RankingRule::KemenyWeightedGraph => {
            let graph = majority_graph(votes, weights)?;
            kemeny_closest_to_graph(&graph, seed)
        }
        RankingRule::PluralityRank => {
            let orders = votes.to_orders(seed)?;
            let mut scores = vec![T::zero(); c];
            for (order, &w) in orders.iter().zip(&weights.weights) {
                let top = order.order()[0];
                // more top votes = better, and scores rank ascending
                scores[top] = scores[top] - w;
            }
            rank_by_score(&scores, seed)
        }
        RankingRule::Veto => {
            let orders = votes.to_orders(seed)?;
            let mut scores = vec![T::zero(); c];
            for (order, &w) in orders.iter().zip(&weights.weights) {
                let bottom = order.order()[c - 1];
                scores[bottom] = scores[bottom] + w;
            }
            rank_by_score(&scores, seed)
        }
        RankingRule::BestDictator => {
            let mut rng = rng_from_seed(seed);
            let best = weights
                .weights
                .iter()
                .copied()
                .fold(T::neg_infinity(), T::max);
            let tied: Vec<usize> =
                (0..votes.n()).filter(|&i| weights.weights[i] == best).collect();
            let dictator = tied[rng.random_range(0..tied.len())];
            votes.order_view(dictator, seed)
        }
        RankingRule::RandomDictator => {
            let mut rng = rng_from_seed(seed);
            let mut draw = rng.random_range(T::zero()..total);
            let mut dictator = votes.n() - 1;
            for (i, &w) in weights.weights.iter().enumerate() {
                if draw < w {
                    dictator = i;
                    break;
                }
                draw = draw - w;
            }
            votes.order_view(dictator, seed)
        }
    }
}

/// Ranking by ascending score; tied scores are ordered by seeded coin flips.
fn rank_by_score<T: Real>(scores: &[T], seed: u64) -> Result<RankingAnswer> {
    let mut rng = rng_from_seed(derive_seed(seed, 0x7363_6f72));
    let salt: Vec<u64> = (0..scores.len()).map(|_| rng.random()).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .expect("scores are finite")
            .then(salt[a].cmp(&salt[b]))
            .then(a.cmp(&b))
    });
    RankingAnswer::new(order)
}

/// Per-pair sign of the weighted vote sum; exact zeros fall to a seeded coin.
fn sign_majority_vector<T: Real>(
    votes: &RankingVotes<'_>,
    weights: &WeightVector<T>,
    seed: u64,
) -> Result<Vec<i8>> {
    let c = votes.candidates();
    let pv = votes.to_pairwise();
    let mut rng = rng_from_seed(derive_seed(seed, 0x7369_676e));
    let mut out = Vec::with_capacity(pair_count(c));
    for idx in 0..pair_count(c) {
        let mut margin = T::zero();
        for (vote, &w) in pv.iter().zip(&weights.weights) {
            margin = margin + w * T::of(f64::from(vote.entries()[idx]));
        }
        let sign = if margin > T::zero() {
            1
        } else if margin < T::zero() {
            -1
        } else if rng.random_bool(0.5) {
            1
        } else {
            -1
        };
        out.push(sign);
    }
    Ok(out)
}

/// Visit every permutation of `0..c` (Heap's algorithm).
fn for_each_permutation(c: usize, mut visit: impl FnMut(&[usize])) {
    let mut order: Vec<usize> = (0..c).collect();
    visit(&order);
    let mut stack = vec![0usize; c];
    let mut i = 1;
    while i < c {
        if stack[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(stack[i], i);
            }
            visit(&order);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
}

fn check_cap(candidates: usize) -> Result<()> {
    if candidates > KEMENY_CANDIDATE_CAP {
        Err(Error::ExceedsExactSearch { candidates, cap: KEMENY_CANDIDATE_CAP })
    } else {
        Ok(())
    }
}

/// Exact minimizer over all rankings of an arbitrary per-ranking cost,
/// choosing uniformly (under `seed`) among exact minimizers.
fn minimize_over_rankings<C, F>(candidates: usize, seed: u64, cost: F) -> Result<RankingAnswer>
where
    C: PartialOrd + Copy,
    F: Fn(&[usize]) -> C,
{
    check_cap(candidates)?;
    let mut rng = rng_from_seed(derive_seed(seed, 0x6b65_6d79));
    let mut best_cost: Option<C> = None;
    let mut best_order: Vec<usize> = Vec::new();
    let mut ties = 0usize;
    for_each_permutation(candidates, |order| {
        let c = cost(order);
        match best_cost {
            Some(b) if c > b => {}
            Some(b) if c == b => {
                // reservoir-sample uniformly among minimizers
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best_order = order.to_vec();
                }
            }
            _ => {
                best_cost = Some(c);
                best_order = order.to_vec();
                ties = 1;
            }
        }
    });
    RankingAnswer::new(best_order)
}

fn ranks_of(order: &[usize]) -> Vec<usize> {
    let mut ranks = vec![0; order.len()];
    for (pos, &cand) in order.iter().enumerate() {
        ranks[cand] = pos;
    }
    ranks
}

/// Ranking minimizing the Hamming disagreement with a sign vector.
fn kemeny_closest_to_signs(c: usize, signs: &[i8], seed: u64) -> Result<RankingAnswer> {
    minimize_over_rankings(c, seed, |order| {
        let ranks = ranks_of(order);
        let mut disagreements = 0usize;
        for (idx, (a, b)) in pairs(c).enumerate() {
            let s = if ranks[a] < ranks[b] { 1 } else { -1 };
            if s != signs[idx] {
                disagreements += 1;
            }
        }
        disagreements
    })
}

/// Ranking minimizing the total weight of disagreeing voters, i.e. the l1
/// distance to the fractional majority graph. Equivalently this minimizes
/// the weighted sum of Kendall-tau distances to the profile.
fn kemeny_closest_to_graph<T: Real>(
    graph: &WeightedMajorityGraph<T>,
    seed: u64,
) -> Result<RankingAnswer> {
    let c = graph.candidates();
    minimize_over_rankings(c, seed, |order| {
        let ranks = ranks_of(order);
        let mut cost = T::zero();
        for (idx, (a, b)) in pairs(c).enumerate() {
            let va = graph.v[idx];
            cost = cost + if ranks[a] < ranks[b] { T::one() - va } else { va };
        }
        cost
    })
}

/// Nearest ranking to a pairwise vector: the decoded ranking when the
/// vector is transitive, otherwise the exact Hamming minimizer.
pub fn kemeny_projection(vector: &PairwiseVector, seed: u64) -> Result<RankingAnswer> {
    match vector.to_order() {
        Ok(order) => Ok(order),
        Err(Error::NonTransitive) => {
            kemeny_closest_to_signs(vector.candidates(), vector.entries(), seed)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::WeightPolicy;
    use approx::assert_relative_eq;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};

    fn order(o: &[usize]) -> RankingAnswer {
        RankingAnswer::new(o.to_vec()).unwrap()
    }

    fn wv(w: &[f64]) -> WeightVector<f64> {
        WeightVector { weights: w.to_vec(), policy: WeightPolicy::Uniform, clamp_eps: 0.0 }
    }

    fn uniform(n: usize) -> WeightVector<f64> {
        WeightVector::uniform(n)
    }

    #[test]
    fn majority_graph_unanimous() {
        let profile = vec![order(&[1, 0, 2]); 4];
        let g = majority_graph(&RankingVotes::Orders(&profile), &uniform(4)).unwrap();
        assert!(g.beats(1, 0) && g.beats(1, 2) && g.beats(0, 2));
    }

    #[test]
    fn majority_graph_condorcet_cycle() {
        let profile = vec![order(&[0, 1, 2]), order(&[1, 2, 0]), order(&[2, 0, 1])];
        let g = majority_graph(&RankingVotes::Orders(&profile), &uniform(3)).unwrap();
        assert!(g.beats(0, 1) && g.beats(1, 2) && g.beats(2, 0));
    }

    #[test]
    fn majority_graph_weighted() {
        let profile = vec![order(&[0, 1, 2]), order(&[2, 1, 0])];
        let g = majority_graph(&RankingVotes::Orders(&profile), &wv(&[0.6, 0.4])).unwrap();
        assert!(g.beats(0, 1) && g.beats(0, 2) && g.beats(1, 2));
        assert_relative_eq!(g.fraction(0, 1), 0.6);
    }

    #[test]
    fn majority_graph_fractions_sum_to_one_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.random_range(2..9);
            let c = rng.random_range(2..6);
            let profile: Vec<RankingAnswer> = (0..n)
                .map(|_| {
                    let mut o: Vec<usize> = (0..c).collect();
                    for i in (1..c).rev() {
                        let j = rng.random_range(0..=i);
                        o.swap(i, j);
                    }
                    order(&o)
                })
                .collect();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
            let g = majority_graph(&RankingVotes::Orders(&profile), &wv(&w)).unwrap();
            for a in 0..c {
                for b in 0..c {
                    if a != b {
                        assert_eq!(g.fraction(a, b) + g.fraction(b, a), 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn majority_graph_rejects_negative_weights() {
        let profile = vec![order(&[0, 1]), order(&[1, 0])];
        let err = majority_graph(&RankingVotes::Orders(&profile), &wv(&[1.0, -0.5]));
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn borda_hand_values() {
        let profile = vec![order(&[0, 1, 2]); 3];
        let z = rule_score(RankingRule::Borda, &RankingVotes::Orders(&profile), &uniform(3), 0)
            .unwrap();
        assert_eq!(z, order(&[0, 1, 2]));

        // {abc, abc, cab}: a has positions 0,0,1; b has 1,1,2; c has 2,2,0
        let profile = vec![order(&[0, 1, 2]), order(&[0, 1, 2]), order(&[2, 0, 1])];
        let z = rule_score(RankingRule::Borda, &RankingVotes::Orders(&profile), &uniform(3), 0)
            .unwrap();
        assert_eq!(z.order()[0], 0);
    }

    #[test]
    fn dictator_rules() {
        let profile = vec![order(&[0, 1, 2]), order(&[2, 1, 0])];
        let z = rule_score(
            RankingRule::BestDictator,
            &RankingVotes::Orders(&profile),
            &wv(&[0.1, 0.9]),
            1,
        )
        .unwrap();
        assert_eq!(z, order(&[2, 1, 0]));

        // a one-hot weight makes the random dictator deterministic
        let z = rule_score(
            RankingRule::RandomDictator,
            &RankingVotes::Orders(&profile),
            &wv(&[0.0, 1.0]),
            1,
        )
        .unwrap();
        assert_eq!(z, order(&[2, 1, 0]));
    }

    #[test]
    fn kemeny_transitive_majority() {
        let profile = vec![order(&[0, 1, 2]), order(&[0, 1, 2]), order(&[2, 0, 1])];
        for rule in [RankingRule::Kemeny, RankingRule::KemenyWeightedGraph] {
            let z =
                rule_score(rule, &RankingVotes::Orders(&profile), &uniform(3), 7).unwrap();
            assert_eq!(z, order(&[0, 1, 2]), "{rule:?}");
        }
    }

    #[test]
    fn kemeny_on_cycle_picks_a_nearest_ranking_by_seed() {
        // y0 is the 3-cycle a>b, b>c, c>a; the three rankings at Hamming
        // distance 1/3 are abc, bca, cab.
        let cycle = PairwiseVector::new(3, vec![1, -1, 1]).unwrap();
        let profile = vec![cycle.clone(), cycle];
        let nearest =
            [order(&[0, 1, 2]), order(&[1, 2, 0]), order(&[2, 0, 1])];
        let mut seen = std::collections::HashSet::new();
        for seed in 0..64 {
            let z = rule_score(
                RankingRule::Kemeny,
                &RankingVotes::Pairwise(&profile),
                &uniform(2),
                seed,
            )
            .unwrap();
            assert!(nearest.contains(&z));
            let again = rule_score(
                RankingRule::Kemeny,
                &RankingVotes::Pairwise(&profile),
                &uniform(2),
                seed,
            )
            .unwrap();
            assert_eq!(z, again);
            seen.insert(z.order().to_vec());
        }
        assert_eq!(seen.len(), 3, "all three minimizers should appear across seeds");
    }

    #[test]
    fn kemeny_matches_exhaustive_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let n = rng.random_range(3..9);
            let c = 4;
            let profile: Vec<RankingAnswer> = (0..n)
                .map(|_| {
                    let mut o: Vec<usize> = (0..c).collect();
                    for i in (1..c).rev() {
                        let j = rng.random_range(0..=i);
                        o.swap(i, j);
                    }
                    order(&o)
                })
                .collect();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..2.0)).collect();
            let votes = RankingVotes::Orders(&profile);
            let z = rule_score(RankingRule::KemenyWeightedGraph, &votes, &wv(&w), 5).unwrap();

            // oracle: minimize the weighted sum of Kendall-tau distances
            // over all 24 permutations, enumerated independently
            let score = |o: &RankingAnswer| -> f64 {
                profile
                    .iter()
                    .zip(&w)
                    .map(|(l, &wi)| {
                        wi * crate::domain::dist_kendall_orders::<f64>(o, l).unwrap()
                    })
                    .sum()
            };
            let best = (0..c)
                .permutations(c)
                .map(|o| score(&order(&o)))
                .fold(f64::INFINITY, f64::min);
            assert!(score(&z) <= best + 1e-12, "output must reach the oracle minimum");
        }
    }

    #[test]
    fn kemeny_minimality_by_enumeration_up_to_five() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for c in 3..=5 {
            for _ in 0..10 {
                let n = rng.random_range(3..8);
                let profile: Vec<PairwiseVector> = (0..n)
                    .map(|_| {
                        let entries =
                            (0..pair_count(c)).map(|_| if rng.random_bool(0.5) { 1 } else { -1 });
                        PairwiseVector::new(c, entries.collect()).unwrap()
                    })
                    .collect();
                let votes = RankingVotes::Pairwise(&profile);
                let w = uniform(n);
                let y0 = sign_majority_vector(&votes, &w, 3).unwrap();
                let z = kemeny_closest_to_signs(c, &y0, 3).unwrap();
                let dist = |o: &RankingAnswer| {
                    o.pairwise()
                        .entries()
                        .iter()
                        .zip(&y0)
                        .filter(|(a, b)| a != b)
                        .count()
                };
                let zd = dist(&z);
                for o in (0..c).permutations(c) {
                    assert!(zd <= dist(&order(&o)));
                }
            }
        }
    }

    #[test]
    fn projection_decodes_transitive_and_repairs_cycles() {
        let r = order(&[2, 0, 1]);
        assert_eq!(kemeny_projection(&r.pairwise(), 0).unwrap(), r);

        let cycle = PairwiseVector::new(3, vec![1, -1, 1]).unwrap();
        let repaired = kemeny_projection(&cycle, 4).unwrap();
        let d = repaired
            .pairwise()
            .entries()
            .iter()
            .zip(cycle.entries())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(d, 1, "a 3-cycle is one flip away from a ranking");
    }

    #[test]
    fn exact_search_cap_is_enforced() {
        let profile: Vec<RankingAnswer> =
            (0..3).map(|_| RankingAnswer::identity(9).unwrap()).collect();
        let err = rule_score(
            RankingRule::Kemeny,
            &RankingVotes::Orders(&profile),
            &uniform(3),
            0,
        );
        assert!(matches!(err, Err(Error::ExceedsExactSearch { candidates: 9, cap: 8 })));
    }

    #[test]
    fn rescaling_weights_leaves_every_rule_unchanged() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let profile: Vec<RankingAnswer> = (0..6)
            .map(|_| {
                let mut o: Vec<usize> = (0..4).collect();
                for i in (1..4).rev() {
                    let j = rng.random_range(0..=i);
                    o.swap(i, j);
                }
                order(&o)
            })
            .collect();
        let w: Vec<f64> = (0..6).map(|_| rng.random_range(0.1..1.0)).collect();
        let scaled: Vec<f64> = w.iter().map(|x| x * 4.0).collect();
        let votes = RankingVotes::Orders(&profile);
        for rule in RankingRule::ALL {
            let a = rule_score(rule, &votes, &wv(&w), 99).unwrap();
            let b = rule_score(rule, &votes, &wv(&scaled), 99).unwrap();
            assert_eq!(a, b, "{rule:?}");
        }
    }
}
