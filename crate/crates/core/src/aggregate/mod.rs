//! Weight transforms and weighted aggregation in all three domains.

mod ranking;

pub use ranking::{
    kemeny_projection, majority_graph, rule_score, RankingRule, RankingVotes,
    WeightedMajorityGraph, KEMENY_CANDIDATE_CAP,
};

use rand::Rng;

use crate::domain::{CategoricalAnswer, ContinuousAnswer, Domain};
use crate::error::{Error, Result};
use crate::noise::rng_from_seed;
use crate::scalar::Real;

/// How a weight vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightPolicy {
    InverseVariance,
    Grofman,
    GrofmanClipped,
    Uniform,
    Oracle,
}

/// Per-worker aggregation weights plus the policy and clamp that built them.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    pub weights: Vec<T>,
    pub policy: WeightPolicy,
    pub clamp_eps: T,
}

impl<T: Real> WeightVector<T> {
    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![T::one() / T::of(n as f64); n],
            policy: WeightPolicy::Uniform,
            clamp_eps: T::zero(),
        }
    }

    /// Re-tag the provenance (used when oracle pipelines reuse the
    /// standard transforms on true fault levels).
    pub fn tagged(mut self, policy: WeightPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// Inverse-variance weights `w_i = 1 / max(f_i, eps)`.
pub fn weights_inverse_variance<T: Real>(faults: &[T], eps: T) -> WeightVector<T> {
    let weights = faults.iter().map(|&f| T::one() / f.max(eps)).collect();
    WeightVector { weights, policy: WeightPolicy::InverseVariance, clamp_eps: eps }
}

/// Log-odds weights `w_i = ln((1-f_i)(k-1)/f_i)` on faults clamped into
/// `[eps, 1-eps]`. A coin-flip worker (`f = 1 - 1/k`) gets weight zero and
/// worse workers go negative; `clip_negative` zeroes those out, which is
/// what the ranking pipeline does.
pub fn weights_grofman<T: Real>(
    faults: &[T],
    k: usize,
    eps: T,
    clip_negative: bool,
) -> WeightVector<T> {
    let km1 = T::of((k - 1) as f64);
    let weights = faults
        .iter()
        .map(|&f| {
            let f = f.max(eps).min(T::one() - eps);
            let w = ((T::one() - f) * km1 / f).ln();
            if clip_negative {
                w.max(T::zero())
            } else {
                w
            }
        })
        .collect();
    let policy = if clip_negative { WeightPolicy::GrofmanClipped } else { WeightPolicy::Grofman };
    WeightVector { weights, policy, clamp_eps: eps }
}

/// Weighted mean, per question. Needs a strictly positive weight total.
pub fn agg_mean<T: Real>(
    answers: &[ContinuousAnswer<T>],
    weights: &WeightVector<T>,
) -> Result<ContinuousAnswer<T>> {
    check_len(answers.len(), weights)?;
    let total = weights.sum();
    if total.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DegenerateWeights(total.as_f64()));
    }
    let m = answers[0].len();
    let mut out = vec![T::zero(); m];
    for (answer, &w) in answers.iter().zip(&weights.weights) {
        for (o, &v) in out.iter_mut().zip(answer.values()) {
            *o = *o + w * v;
        }
    }
    for o in &mut out {
        *o = *o / total;
    }
    ContinuousAnswer::new(out)
}

/// Tie handling for score maximizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Deterministic: the lowest category index wins. Used inside
    /// estimation loops so fault estimates need no randomness.
    LowestIndex,
    /// Uniform choice among the tied maximizers, driven by this seed.
    Seeded(u64),
}

/// Weighted plurality, per question. Weights may be negative (a negative
/// weight votes against its holder's label); the winner is the label with
/// the highest signed tally.
pub fn agg_plurality<T: Real>(
    answers: &[CategoricalAnswer],
    weights: &WeightVector<T>,
    tie: TieBreak,
) -> Result<CategoricalAnswer> {
    check_len(answers.len(), weights)?;
    let m = answers[0].len();
    let k = answers[0].categories();
    let mut rng = match tie {
        TieBreak::LowestIndex => None,
        TieBreak::Seeded(seed) => Some(rng_from_seed(seed)),
    };
    let mut labels = Vec::with_capacity(m);
    let mut tally = vec![T::zero(); k];
    for j in 0..m {
        for t in tally.iter_mut() {
            *t = T::zero();
        }
        for (answer, &w) in answers.iter().zip(&weights.weights) {
            let x = answer.labels()[j];
            tally[x] = tally[x] + w;
        }
        let best = tally.iter().copied().fold(T::neg_infinity(), T::max);
        let winners: Vec<usize> =
            (0..k).filter(|&x| tally[x] == best).collect();
        let pick = match &mut rng {
            None => winners[0],
            Some(rng) => winners[rng.random_range(0..winners.len())],
        };
        labels.push(pick);
    }
    CategoricalAnswer::new(labels, k)
}

fn check_len<T: Real>(n: usize, weights: &WeightVector<T>) -> Result<()> {
    if n == 0 {
        return Err(Error::Shape("no answers to aggregate".into()));
    }
    if weights.len() != n {
        return Err(Error::Shape(format!("{} weights for {n} answers", weights.len())));
    }
    Ok(())
}

/// Stable identifiers for every aggregation rule the CLI and configs accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleId {
    Mean,
    Plurality,
    Ranking(RankingRule),
}

impl RuleId {
    pub fn id(self) -> &'static str {
        match self {
            RuleId::Mean => "mean",
            RuleId::Plurality => "plurality",
            RuleId::Ranking(r) => r.id(),
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        if s == "mean" {
            return Ok(RuleId::Mean);
        }
        if s == "plurality" {
            return Ok(RuleId::Plurality);
        }
        RankingRule::from_id(s).map(RuleId::Ranking)
    }

    pub fn domain(self) -> Domain {
        match self {
            RuleId::Mean => Domain::Continuous,
            RuleId::Plurality => Domain::Categorical,
            RuleId::Ranking(_) => Domain::Ranking,
        }
    }

    /// The unweighted-aggregation default for a domain (rankings have no
    /// canonical rule, so there is no default there).
    pub fn default_for(domain: Domain) -> Option<Self> {
        match domain {
            Domain::Continuous => Some(RuleId::Mean),
            Domain::Categorical => Some(RuleId::Plurality),
            Domain::Ranking => None,
        }
    }
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_id(s)
    }
}

impl serde::Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> serde::Deserialize<'de> for RuleId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RuleId::from_id(&s).map_err(serde::de::Error::custom)
    }
}
