//! End-to-end truth-discovery methods: estimate fault levels, turn them
//! into weights, aggregate, and score against the ground truth when one is
//! known.

use serde::{Deserialize, Serialize};

use crate::aggregate::{
    agg_mean, agg_plurality, rule_score, weights_grofman, weights_inverse_variance, RankingVotes,
    RuleId, TieBreak, WeightPolicy, WeightVector,
};
use crate::domain::{answer_distance, Answer, AnswerMatrix, Domain, Instance};
use crate::error::{Error, Result};
use crate::estimate::{
    d_efl, default_clamp, empirical_faults, id_td_estimate, ip_efl, p_efl, EstimatorConfig,
    FaultEstimate,
};
use crate::scalar::Real;

/// The implemented truth-discovery methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Unweighted aggregation.
    Ua,
    /// Oracle aggregation from true (or empirical) fault levels.
    Oa,
    /// Distance-from-outcome estimation, then weighted aggregation.
    DTd,
    /// Proxy-distance estimation, then weighted aggregation.
    PTd,
    /// Iterative distance-from-outcome (categorical only).
    IdTd,
    /// Iterative proxy estimation, then weighted aggregation.
    IpTd,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Ua, Method::Oa, Method::DTd, Method::PTd, Method::IdTd, Method::IpTd];

    pub fn id(self) -> &'static str {
        match self {
            Method::Ua => "ua",
            Method::Oa => "oa",
            Method::DTd => "d-td",
            Method::PTd => "p-td",
            Method::IdTd => "id-td",
            Method::IpTd => "ip-td",
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// A fully specified method run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec<T> {
    pub method: Method,
    pub u: T,
    pub iterations: usize,
    pub rule: RuleId,
    pub seed: u64,
}

impl<T: Real> MethodSpec<T> {
    pub fn new(method: Method, rule: RuleId, seed: u64) -> Self {
        Self { method, u: T::zero(), iterations: 8, rule, seed }
    }

    pub fn with_u(mut self, u: T) -> Self {
        self.u = u;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }
}

/// Output of a method run.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult<T> {
    pub estimate: Answer<T>,
    pub faults: Option<FaultEstimate<T>>,
    pub weights: Option<WeightVector<T>>,
    /// `d(estimate, truth)`, present exactly when the instance has a truth.
    pub error: Option<T>,
}

impl<T: Real> MethodResult<T> {
    fn build(
        instance: &Instance<T>,
        estimate: Answer<T>,
        faults: Option<FaultEstimate<T>>,
        weights: Option<WeightVector<T>>,
    ) -> Result<Self> {
        let error = match instance.truth() {
            Some(truth) => Some(answer_distance(&estimate, truth)?),
            None => None,
        };
        Ok(Self { estimate, faults, weights, error })
    }
}

/// Aggregate with the given weights under the rule for this domain.
fn aggregate_with<T: Real>(
    instance: &Instance<T>,
    weights: &WeightVector<T>,
    rule: RuleId,
    seed: u64,
) -> Result<Answer<T>> {
    match (instance.answers(), rule) {
        (AnswerMatrix::Continuous(v), RuleId::Mean) => Ok(Answer::Continuous(agg_mean(v, weights)?)),
        (AnswerMatrix::Categorical(v), RuleId::Plurality) => {
            Ok(Answer::Categorical(agg_plurality(v, weights, TieBreak::Seeded(seed))?))
        }
        (AnswerMatrix::Ranking(_) | AnswerMatrix::Pairwise(_), RuleId::Ranking(r)) => {
            let votes = RankingVotes::from_instance(instance)?;
            Ok(Answer::Ranking(rule_score(r, &votes, weights, seed)?))
        }
        _ => Err(Error::DomainMismatch {
            what: format!("rule `{}`", rule.id()),
            domain: instance.domain(),
        }),
    }
}

/// Fault levels to aggregation weights, per domain: inverse variance for
/// continuous answers, log-odds for categorical ones (negative weights
/// kept), and log-odds with negatives clipped to zero for rankings.
///
/// When every ranking weight clips to zero (no worker beats a coin flip),
/// aggregation falls back to uniform weights.
fn fault_weights<T: Real>(instance: &Instance<T>, faults: &[T]) -> WeightVector<T> {
    let eps = default_clamp::<T>();
    match instance.domain() {
        Domain::Continuous => weights_inverse_variance(faults, eps),
        Domain::Categorical => {
            weights_grofman(faults, instance.categories().unwrap(), eps, false)
        }
        Domain::Ranking => {
            let w = weights_grofman(faults, 2, eps, true);
            if w.sum() > T::zero() {
                w
            } else {
                WeightVector::uniform(instance.n())
            }
        }
    }
}

/// Unweighted aggregation.
pub fn run_ua<T: Real>(instance: &Instance<T>, rule: RuleId, seed: u64) -> Result<MethodResult<T>> {
    let weights = WeightVector::uniform(instance.n());
    let estimate = aggregate_with(instance, &weights, rule, seed)?;
    MethodResult::build(instance, estimate, None, Some(weights))
}

/// Oracle aggregation: weights from the true fault levels when the
/// instance carries them, otherwise from the empirical distances to the
/// ground truth.
pub fn run_oa<T: Real>(instance: &Instance<T>, rule: RuleId, seed: u64) -> Result<MethodResult<T>> {
    let faults: Vec<T> = match instance.true_faults() {
        Some(f) => f.to_vec(),
        None => empirical_faults(instance)?,
    };
    let weights = fault_weights(instance, &faults).tagged(WeightPolicy::Oracle);
    let estimate = aggregate_with(instance, &weights, rule, seed)?;
    MethodResult::build(instance, estimate, None, Some(weights))
}

/// Proxy-based truth discovery.
pub fn run_p_td<T: Real>(
    instance: &Instance<T>,
    u: T,
    rule: RuleId,
    seed: u64,
) -> Result<MethodResult<T>> {
    let faults = p_efl(instance, u)?;
    let weights = fault_weights(instance, &faults.values);
    let estimate = aggregate_with(instance, &weights, rule, seed)?;
    MethodResult::build(instance, estimate, Some(faults), Some(weights))
}

/// Distance-from-outcome truth discovery. For rankings the reference
/// outcome is the same rule's unweighted output.
pub fn run_d_td<T: Real>(
    instance: &Instance<T>,
    rule: RuleId,
    seed: u64,
) -> Result<MethodResult<T>> {
    let base_rule = match instance.domain() {
        Domain::Continuous => RuleId::Mean,
        Domain::Categorical => RuleId::Plurality,
        Domain::Ranking => rule,
    };
    let faults = d_efl(instance, base_rule, seed)?;
    let weights = fault_weights(instance, &faults.values);
    let estimate = aggregate_with(instance, &weights, rule, seed)?;
    MethodResult::build(instance, estimate, Some(faults), Some(weights))
}

/// Iterative proxy-based truth discovery.
pub fn run_ip_td<T: Real>(
    instance: &Instance<T>,
    iterations: usize,
    rule: RuleId,
    seed: u64,
) -> Result<MethodResult<T>> {
    let faults = ip_efl(instance, &EstimatorConfig::default().with_iterations(iterations))?;
    let weights = fault_weights(instance, &faults.values);
    let estimate = aggregate_with(instance, &weights, rule, seed)?;
    MethodResult::build(instance, estimate, Some(faults), Some(weights))
}

/// Iterative distance-from-outcome truth discovery (categorical).
pub fn run_id_td<T: Real>(
    instance: &Instance<T>,
    iterations: usize,
    seed: u64,
) -> Result<MethodResult<T>> {
    let out =
        id_td_estimate(instance, &EstimatorConfig::default().with_iterations(iterations), seed)?;
    MethodResult::build(
        instance,
        Answer::Categorical(out.answer),
        Some(out.faults),
        Some(out.weights),
    )
}

/// Run any method from its spec.
pub fn run_method<T: Real>(instance: &Instance<T>, spec: &MethodSpec<T>) -> Result<MethodResult<T>> {
    match spec.method {
        Method::Ua => run_ua(instance, spec.rule, spec.seed),
        Method::Oa => run_oa(instance, spec.rule, spec.seed),
        Method::PTd => run_p_td(instance, spec.u, spec.rule, spec.seed),
        Method::DTd => run_d_td(instance, spec.rule, spec.seed),
        Method::IpTd => run_ip_td(instance, spec.iterations, spec.rule, spec.seed),
        Method::IdTd => run_id_td(instance, spec.iterations, spec.seed),
    }
}
