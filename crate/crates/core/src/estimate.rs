//! Fault-level estimation.
//!
//! Two families: distance-from-outcome (aggregate first, then score each
//! worker by distance to the aggregate) and proxy-based (score each worker
//! by mean distance to the other workers, then invert the domain's linear
//! relation between expected proxy distance and fault level). Iterative
//! variants re-weight and repeat.

use crate::aggregate::{
    agg_mean, agg_plurality, rule_score, weights_grofman, RankingVotes, RuleId, TieBreak,
    WeightVector,
};
use crate::domain::{
    Answer, AnswerMatrix, DistanceMatrix, Domain, Instance, PairwiseVector,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which estimator produced a fault estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    DEfl,
    PEfl,
    IpEfl,
    IdTd,
}

impl EstimatorKind {
    pub fn id(self) -> &'static str {
        match self {
            EstimatorKind::DEfl => "d-efl",
            EstimatorKind::PEfl => "p-efl",
            EstimatorKind::IpEfl => "ip-efl",
            EstimatorKind::IdTd => "id-td",
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        match s {
            "d-efl" => Ok(EstimatorKind::DEfl),
            "p-efl" => Ok(EstimatorKind::PEfl),
            "ip-efl" => Ok(EstimatorKind::IpEfl),
            "id-td" => Ok(EstimatorKind::IdTd),
            _ => Err(Error::UnknownEstimator(s.to_string())),
        }
    }
}

/// Estimated fault levels with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultEstimate<T> {
    pub values: Vec<T>,
    pub estimator: EstimatorKind,
    /// The `u` parameter, when the estimator takes one.
    pub u: Option<T>,
    /// The estimated mean fault subtracted out, when one was used.
    pub mu_hat: Option<T>,
    /// Iteration count of the iterative estimators.
    pub iterations: Option<usize>,
    /// How many iterations fell back to uniform weights because the
    /// weighted proxy normalizer was not positive.
    pub uniform_fallbacks: usize,
}

impl<T: Real> FaultEstimate<T> {
    fn plain(values: Vec<T>, estimator: EstimatorKind) -> Self {
        Self { values, estimator, u: None, mu_hat: None, iterations: None, uniform_fallbacks: 0 }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// Shared estimator parameters. Defaults: `u = 0`, `iterations = 8`, and a
/// `1e-4` clamp keeping fault levels inside `(0, 1)` before any log-odds
/// weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig<T> {
    pub u: T,
    pub iterations: usize,
    pub clamp_eps: T,
}

impl<T: Real> Default for EstimatorConfig<T> {
    fn default() -> Self {
        Self { u: T::zero(), iterations: 8, clamp_eps: T::of(1e-4) }
    }
}

impl<T: Real> EstimatorConfig<T> {
    pub fn with_u(mut self, u: T) -> Self {
        self.u = u;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }
}

/// Default clamp used wherever a fault level feeds a log-odds weight.
pub fn default_clamp<T: Real>() -> T {
    T::of(1e-4)
}

/// Distance-from-outcome estimation: aggregate unweighted with `rule`,
/// then score every worker by her distance to the aggregate.
///
/// The rule must match the instance domain (mean for continuous answers,
/// plurality for categorical ones, any voting rule for rankings).
pub fn d_efl<T: Real>(instance: &Instance<T>, rule: RuleId, seed: u64) -> Result<FaultEstimate<T>> {
    let values = d_efl_values(instance, rule, seed)?;
    Ok(FaultEstimate::plain(values, EstimatorKind::DEfl))
}

fn d_efl_values<T: Real>(instance: &Instance<T>, rule: RuleId, seed: u64) -> Result<Vec<T>> {
    let outcome = unweighted_outcome(instance, rule, seed)?;
    (0..instance.n())
        .map(|i| crate::domain::report_distance(instance.answers(), i, &outcome))
        .collect()
}

/// Unweighted aggregate `r(S)` used as the reference outcome.
///
/// Plurality ties break to the lowest label index here so the estimation
/// path itself is deterministic; only final aggregation draws on the seed.
fn unweighted_outcome<T: Real>(
    instance: &Instance<T>,
    rule: RuleId,
    seed: u64,
) -> Result<Answer<T>> {
    let uniform = WeightVector::uniform(instance.n());
    match (instance.answers(), rule) {
        (AnswerMatrix::Continuous(v), RuleId::Mean) => {
            Ok(Answer::Continuous(agg_mean(v, &uniform)?))
        }
        (AnswerMatrix::Categorical(v), RuleId::Plurality) => {
            Ok(Answer::Categorical(agg_plurality(v, &uniform, TieBreak::LowestIndex)?))
        }
        (AnswerMatrix::Ranking(_) | AnswerMatrix::Pairwise(_), RuleId::Ranking(r)) => {
            let votes = RankingVotes::from_instance(instance)?;
            Ok(Answer::Ranking(rule_score(r, &votes, &uniform, seed)?))
        }
        _ => Err(Error::DomainMismatch {
            what: format!("aggregator `{}`", rule.id()),
            domain: instance.domain(),
        }),
    }
}

/// `mu_hat = u * sum_i f0_i` where `f0` is the distance-from-outcome
/// estimate under the domain's basic aggregator.
pub fn estimate_mu<T: Real>(instance: &Instance<T>, u: T) -> Result<T> {
    if u < T::zero() {
        return Err(Error::InvalidParameter(format!("u must be non-negative, got {u}")));
    }
    if u == T::zero() {
        return Ok(T::zero());
    }
    let f0 = baseline_fault_values(instance)?;
    Ok(u * f0.into_iter().sum())
}

/// `f0` under the domain's basic aggregator: mean for continuous answers,
/// plurality for categorical ones, and the per-pair sign majority for
/// rankings (their binary encoding's plurality).
fn baseline_fault_values<T: Real>(instance: &Instance<T>) -> Result<Vec<T>> {
    match instance.answers() {
        AnswerMatrix::Continuous(_) => d_efl_values(instance, RuleId::Mean, 0),
        AnswerMatrix::Categorical(_) => d_efl_values(instance, RuleId::Plurality, 0),
        AnswerMatrix::Ranking(_) | AnswerMatrix::Pairwise(_) => {
            let votes = RankingVotes::from_instance(instance)?;
            let pv = votes.to_pairwise();
            let majority = pairwise_sign_majority(&pv);
            Ok(pv
                .iter()
                .map(|v| {
                    let differing =
                        v.entries().iter().zip(&majority).filter(|(a, b)| *a != *b).count();
                    T::of(differing as f64) / T::of(majority.len() as f64)
                })
                .collect())
        }
    }
}

/// Unweighted per-pair sign majority; exact zero margins resolve to `+1`
/// (the lexicographically first direction), mirroring the lowest-index
/// plurality tie rule.
fn pairwise_sign_majority(votes: &[PairwiseVector]) -> Vec<i8> {
    let m = votes[0].entries().len();
    (0..m)
        .map(|idx| {
            let margin: i64 = votes.iter().map(|v| i64::from(v.entries()[idx])).sum();
            if margin >= 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Proxy-based estimation for continuous answers: `f_i = pi_i - mu_hat(u)`.
pub fn p_efl_continuous<T: Real>(instance: &Instance<T>, u: T) -> Result<FaultEstimate<T>> {
    if instance.domain() != Domain::Continuous {
        return Err(Error::DomainMismatch {
            what: "continuous proxy estimator".into(),
            domain: instance.domain(),
        });
    }
    let mu = estimate_mu(instance, u)?;
    let pi = crate::domain::proxy_distances(instance)?;
    let values = pi.into_iter().map(|p| p - mu).collect();
    Ok(FaultEstimate {
        values,
        estimator: EstimatorKind::PEfl,
        u: Some(u),
        mu_hat: Some(mu),
        iterations: None,
        uniform_fallbacks: 0,
    })
}

/// Proxy-based estimation for categorical answers, inverting the linear
/// relation `E[pi_i | f_i] = mu + (1 - (1+theta) mu) f_i` with
/// `theta = 1/(k-1)`: `f_i = (pi_i - mu_hat) / (1 - (1+theta) mu_hat)`.
pub fn p_efl_categorical<T: Real>(instance: &Instance<T>, u: T) -> Result<FaultEstimate<T>> {
    let Some(k) = instance.categories() else {
        return Err(Error::DomainMismatch {
            what: "categorical proxy estimator".into(),
            domain: instance.domain(),
        });
    };
    let pi = crate::domain::proxy_distances(instance)?;
    p_efl_from_proxies(instance, pi, u, k)
}

/// Proxy-based estimation for rankings: categorical estimation with
/// `k = 2` over the `C(c,2)` pairwise coordinates, i.e. the Kendall-tau
/// proxy distance. The default `u = 0` leaves `f_i = pi_i`.
pub fn p_efl_ranking<T: Real>(instance: &Instance<T>, u: T) -> Result<FaultEstimate<T>> {
    if instance.domain() != Domain::Ranking {
        return Err(Error::DomainMismatch {
            what: "ranking proxy estimator".into(),
            domain: instance.domain(),
        });
    }
    let pi = crate::domain::proxy_distances(instance)?;
    p_efl_from_proxies(instance, pi, u, 2)
}

fn p_efl_from_proxies<T: Real>(
    instance: &Instance<T>,
    pi: Vec<T>,
    u: T,
    k: usize,
) -> Result<FaultEstimate<T>> {
    let mu = estimate_mu(instance, u)?;
    let theta = T::one() / T::of((k - 1) as f64);
    let denom = T::one() - (T::one() + theta) * mu;
    if denom.abs() < T::of(1e-12) {
        return Err(Error::SingularInversion);
    }
    let values = pi.into_iter().map(|p| (p - mu) / denom).collect();
    Ok(FaultEstimate {
        values,
        estimator: EstimatorKind::PEfl,
        u: Some(u),
        mu_hat: Some(mu),
        iterations: None,
        uniform_fallbacks: 0,
    })
}

/// Proxy-based estimation dispatched on the instance domain.
pub fn p_efl<T: Real>(instance: &Instance<T>, u: T) -> Result<FaultEstimate<T>> {
    match instance.domain() {
        Domain::Continuous => p_efl_continuous(instance, u),
        Domain::Categorical => p_efl_categorical(instance, u),
        Domain::Ranking => p_efl_ranking(instance, u),
    }
}

/// Result of the iterative distance-from-outcome loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IdTdOutcome<T> {
    pub faults: FaultEstimate<T>,
    /// Post-loop weights, the ones the final plurality uses.
    pub weights: WeightVector<T>,
    /// The final weighted-plurality aggregate.
    pub answer: crate::domain::CategoricalAnswer,
}

/// Iterative distance-from-outcome truth discovery (categorical).
///
/// Starting from uniform weights, each iteration aggregates by weighted
/// plurality, scores every worker by Hamming distance to the aggregate,
/// and turns the scores into log-odds weights (negative weights are kept).
/// A single iteration is exactly distance-based truth discovery.
pub fn id_td_estimate<T: Real>(
    instance: &Instance<T>,
    config: &EstimatorConfig<T>,
    seed: u64,
) -> Result<IdTdOutcome<T>> {
    let EstimatorConfig { iterations, clamp_eps, .. } = *config;
    let AnswerMatrix::Categorical(answers) = instance.answers() else {
        return Err(Error::DomainMismatch {
            what: "iterative distance-from-outcome".into(),
            domain: instance.domain(),
        });
    };
    if iterations == 0 {
        return Err(Error::InvalidParameter("iterations must be >= 1".into()));
    }
    let k = answers[0].categories();
    let mut weights = WeightVector::uniform(instance.n());
    let mut faults: Vec<T> = Vec::new();
    for _ in 0..iterations {
        let outcome = agg_plurality(answers, &weights, TieBreak::LowestIndex)?;
        faults = answers
            .iter()
            .map(|s| crate::domain::dist_hamming(s, &outcome))
            .collect::<Result<_>>()?;
        weights = weights_grofman(&faults, k, clamp_eps, false);
    }
    let answer = agg_plurality(answers, &weights, TieBreak::Seeded(seed))?;
    let faults = FaultEstimate {
        values: faults,
        estimator: EstimatorKind::IdTd,
        u: None,
        mu_hat: None,
        iterations: Some(iterations),
        uniform_fallbacks: 0,
    };
    Ok(IdTdOutcome { faults, weights, answer })
}

/// Iterative proxy-based estimation (categorical or ranking).
///
/// Each iteration scores workers by their weight-normalized proxy distance
/// and refreshes the log-odds weights; no aggregation happens inside the
/// loop. Rankings are treated as binary questions over candidate pairs
/// (`k = 2`). Iterations whose weighted normalizer is not positive fall
/// back to uniform weights and are counted in the provenance.
pub fn ip_efl<T: Real>(
    instance: &Instance<T>,
    config: &EstimatorConfig<T>,
) -> Result<FaultEstimate<T>> {
    let EstimatorConfig { iterations, clamp_eps, .. } = *config;
    let k = match instance.domain() {
        Domain::Categorical => instance.categories().unwrap(),
        Domain::Ranking => 2,
        Domain::Continuous => {
            return Err(Error::DomainMismatch {
                what: "iterative proxy estimator".into(),
                domain: instance.domain(),
            })
        }
    };
    if iterations == 0 {
        return Err(Error::InvalidParameter("iterations must be >= 1".into()));
    }
    let dm = DistanceMatrix::from_instance(instance)?;
    let mut weights: Option<WeightVector<T>> = None; // None = uniform
    let mut fallbacks = 0usize;
    let mut pi: Vec<T> = Vec::new();
    for _ in 0..iterations {
        // equal weights reduce to the plain proxy distance; computing it
        // that way keeps the first iteration bit-identical to 0-P-EFL
        pi = match &weights {
            None => dm.proxy(),
            Some(w) => match dm.weighted_proxy(&w.weights) {
                Ok(p) => p,
                Err(Error::DegenerateWeights(_)) => {
                    fallbacks += 1;
                    dm.proxy()
                }
                Err(e) => return Err(e),
            },
        };
        weights = Some(weights_grofman(&pi, k, clamp_eps, false));
    }
    Ok(FaultEstimate {
        values: pi,
        estimator: EstimatorKind::IpEfl,
        u: None,
        mu_hat: None,
        iterations: Some(iterations),
        uniform_fallbacks: fallbacks,
    })
}

/// Empirical fault levels `d(s_i, z)` against a known ground truth.
pub fn empirical_faults<T: Real>(instance: &Instance<T>) -> Result<Vec<T>> {
    let truth = instance.truth().ok_or(Error::OracleUnavailable)?;
    (0..instance.n())
        .map(|i| crate::domain::report_distance(instance.answers(), i, truth))
        .collect()
}
