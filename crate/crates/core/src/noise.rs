//! Population sampling and synthetic instance generation.
//!
//! Four noise models are implemented. Given a worker's fault level `f`:
//! independent normal noise adds `N(0, f)` per real-valued question;
//! independent errors replace each label with probability `f` (wrong labels
//! uniform over the `k-1` alternatives); independent Condorcet noise flips
//! each pairwise comparison with probability `f`; and the Mallows model
//! draws a full ranking with density proportional to
//! `phi^(swap distance to the truth)`.
//!
//! Everything is deterministic given a spec and a 64-bit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    pair_count, Answer, AnswerMatrix, CategoricalAnswer, ContinuousAnswer, Domain, Instance,
    Population, ProtoPopulation, ProtoShape, RankingAnswer,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a sub-seed for stream `stream` from a master seed. The result
/// depends only on the two inputs, so parallel consumers agree on it
/// regardless of execution order.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

/// The deterministic generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw from the proto-population, clipped into its bounds.
pub fn sample_fault<T: Real, R: Rng + ?Sized>(proto: &ProtoPopulation<T>, rng: &mut R) -> T {
    let raw = match proto.shape() {
        ProtoShape::PointMass { value } => value,
        ProtoShape::Normal { mean, sd } => mean + sd * T::standard_normal(rng),
        ProtoShape::Uniform { lo, hi } => {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..hi)
            }
        }
        ProtoShape::Triangular { lo, mode, hi } => {
            if lo == hi {
                lo
            } else {
                let u: T = rng.random_range(T::zero()..T::one());
                let cut = (mode - lo) / (hi - lo);
                if u < cut {
                    lo + (u * (hi - lo) * (mode - lo)).sqrt()
                } else {
                    hi - ((T::one() - u) * (hi - lo) * (hi - mode)).sqrt()
                }
            }
        }
        ProtoShape::Bimodal { low, high, prob_low } => {
            if rng.random_range(T::zero()..T::one()) < prob_low {
                low
            } else {
                high
            }
        }
    };
    proto.clamp(raw)
}

/// Sample `n` independent fault levels from the proto-population.
pub fn sample_population<T: Real, R: Rng + ?Sized>(
    proto: &ProtoPopulation<T>,
    n: usize,
    rng: &mut R,
) -> Result<Population<T>> {
    if n < 2 {
        return Err(Error::InsufficientWorkers(n));
    }
    Population::new((0..n).map(|_| sample_fault(proto, rng)).collect())
}

/// Independent normal noise: worker `i` reports `z_j + N(0, f_i)` per question.
pub fn gen_inn<T: Real, R: Rng + ?Sized>(
    truth: &ContinuousAnswer<T>,
    population: &Population<T>,
    rng: &mut R,
) -> Result<Instance<T>> {
    for &f in population.faults() {
        if f <= T::zero() || !f.is_finite() {
            return Err(Error::InvalidFault { model: "inn", value: f.as_f64() });
        }
    }
    let answers = population
        .faults()
        .iter()
        .map(|&f| {
            let sd = f.sqrt();
            let values = truth
                .values()
                .iter()
                .map(|&z| z + sd * T::standard_normal(rng))
                .collect();
            ContinuousAnswer::new(values)
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(AnswerMatrix::Continuous(answers), Some(Answer::Continuous(truth.clone())))?
        .with_true_faults(population.faults().to_vec())
}

fn check_unit_fault<T: Real>(f: T, model: &'static str) -> Result<()> {
    if f >= T::zero() && f <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidFault { model, value: f.as_f64() })
    }
}

/// Independent errors: worker `i` corrupts each label with probability
/// `f_i`, choosing uniformly among the `k-1` wrong labels.
pub fn gen_ier<T: Real, R: Rng + ?Sized>(
    truth: &CategoricalAnswer,
    population: &Population<T>,
    rng: &mut R,
) -> Result<Instance<T>> {
    let k = truth.categories();
    let answers = population
        .faults()
        .iter()
        .map(|&f| {
            check_unit_fault(f, "ier")?;
            let labels = truth
                .labels()
                .iter()
                .map(|&z| {
                    if rng.random_range(T::zero()..T::one()) < f {
                        (z + 1 + rng.random_range(0..k - 1)) % k
                    } else {
                        z
                    }
                })
                .collect();
            CategoricalAnswer::new(labels, k)
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(AnswerMatrix::Categorical(answers), Some(Answer::Categorical(truth.clone())))?
        .with_true_faults(population.faults().to_vec())
}

/// Independent Condorcet noise: worker `i` flips each of the `C(c,2)`
/// pairwise comparisons of the true ranking with probability `f_i`. The
/// reported vectors may be cyclic.
pub fn gen_icn<T: Real, R: Rng + ?Sized>(
    truth: &RankingAnswer,
    population: &Population<T>,
    rng: &mut R,
) -> Result<Instance<T>> {
    let base = truth.pairwise();
    let m = pair_count(truth.candidates());
    let answers = population
        .faults()
        .iter()
        .map(|&f| {
            check_unit_fault(f, "icn")?;
            let mut v = base.clone();
            for idx in 0..m {
                if rng.random_range(T::zero()..T::one()) < f {
                    v.flip(idx);
                }
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(AnswerMatrix::Pairwise(answers), Some(Answer::Ranking(truth.clone())))?
        .with_true_faults(population.faults().to_vec())
}

/// One Mallows draw by repeated insertion: walking the true ranking from
/// best to worst, the candidate at true position `i` is inserted at
/// position `p` of the partial order with probability proportional to
/// `phi^(i-p)`, i.e. `phi^(number of inversions introduced)`.
pub fn sample_mallows_order<T: Real, R: Rng + ?Sized>(
    truth: &RankingAnswer,
    phi: T,
    rng: &mut R,
) -> Result<RankingAnswer> {
    if phi <= T::zero() || !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("mallows phi must be positive, got {phi}")));
    }
    let c = truth.candidates();
    let mut current: Vec<usize> = Vec::with_capacity(c);
    let mut weights: Vec<T> = Vec::with_capacity(c);
    for (i, &cand) in truth.order().iter().enumerate() {
        // weights[p] = phi^(i-p) for insertion position p in 0..=i
        weights.clear();
        let mut w = T::one();
        for _ in 0..=i {
            weights.push(w);
            w = w * phi;
        }
        weights.reverse();
        let total: T = weights.iter().copied().sum();
        let mut u = rng.random_range(T::zero()..total);
        let mut pos = i; // fall through to the bottom on rounding leftovers
        for (p, &wp) in weights.iter().enumerate() {
            if u < wp {
                pos = p;
                break;
            }
            u = u - wp;
        }
        current.insert(pos, cand);
    }
    RankingAnswer::new(current)
}

/// Mallows instance: worker `i` reports an exact Mallows draw with her own
/// dispersion `phi_i`. True fault levels are stored via [`fault_from_phi`].
pub fn gen_mallows<T: Real, R: Rng + ?Sized>(
    truth: &RankingAnswer,
    phis: &[T],
    rng: &mut R,
) -> Result<Instance<T>> {
    let answers = phis
        .iter()
        .map(|&phi| sample_mallows_order(truth, phi, rng))
        .collect::<Result<Vec<_>>>()?;
    let faults = phis.iter().map(|&phi| fault_from_phi(phi)).collect::<Result<Vec<_>>>()?;
    Instance::new(AnswerMatrix::Ranking(answers), Some(Answer::Ranking(truth.clone())))?
        .with_true_faults(faults)
}

/// Dispersion from fault level, `phi = (1-f)/f`, for `f` strictly inside `(0, 1)`.
pub fn phi_from_fault<T: Real>(f: T) -> Result<T> {
    if f > T::zero() && f < T::one() {
        Ok((T::one() - f) / f)
    } else {
        Err(Error::InvalidParameter(format!("fault {f} outside (0, 1)")))
    }
}

/// Inverse of [`phi_from_fault`]: `f = 1/(1+phi)` for `phi > 0`.
pub fn fault_from_phi<T: Real>(phi: T) -> Result<T> {
    if phi > T::zero() && phi.is_finite() {
        Ok(T::one() / (T::one() + phi))
    } else {
        Err(Error::InvalidParameter(format!("phi {phi} outside (0, inf)")))
    }
}

/// Which noise model a spec refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Inn,
    Ier,
    Icn,
    Mallows,
}

impl NoiseKind {
    pub fn domain(self) -> Domain {
        match self {
            NoiseKind::Inn => Domain::Continuous,
            NoiseKind::Ier => Domain::Categorical,
            NoiseKind::Icn | NoiseKind::Mallows => Domain::Ranking,
        }
    }
}

/// How the ground truth of a generated instance is chosen.
///
/// `Default` is the model's canonical choice: the zero vector for
/// continuous questions, uniform-random labels for categorical ones, and
/// the identity ranking. `Uniform` forces uniform-random truth where it
/// differs (a random permutation for rankings); the models are invariant
/// to this choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthPolicy {
    #[default]
    Default,
    Uniform,
}

/// Serializable proto-population description (JSON config block).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtoSpec {
    #[serde(flatten)]
    pub shape: ProtoShapeSpec,
    /// `[lo, hi]` bounds applied to every draw; omitted means unclipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProtoShapeSpec {
    PointMass { value: f64 },
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Triangular { lo: f64, mode: f64, hi: f64 },
    Bimodal { low: f64, high: f64, prob_low: f64 },
}

impl ProtoSpec {
    pub fn to_population(&self) -> Result<ProtoPopulation<f64>> {
        let shape = match self.shape {
            ProtoShapeSpec::PointMass { value } => ProtoShape::PointMass { value },
            ProtoShapeSpec::Normal { mean, sd } => ProtoShape::Normal { mean, sd },
            ProtoShapeSpec::Uniform { lo, hi } => ProtoShape::Uniform { lo, hi },
            ProtoShapeSpec::Triangular { lo, mode, hi } => ProtoShape::Triangular { lo, mode, hi },
            ProtoShapeSpec::Bimodal { low, high, prob_low } => {
                ProtoShape::Bimodal { low, high, prob_low }
            }
        };
        let clip = self.clip.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
        ProtoPopulation::new(shape, clip)
    }

    /// Smallest and largest values a clipped draw can take.
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = match self.shape {
            ProtoShapeSpec::PointMass { value } => (value, value),
            ProtoShapeSpec::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            ProtoShapeSpec::Uniform { lo, hi } => (lo, hi),
            ProtoShapeSpec::Triangular { lo, hi, .. } => (lo, hi),
            ProtoShapeSpec::Bimodal { low, high, .. } => (low.min(high), low.max(high)),
        };
        match self.clip {
            Some((clo, chi)) => (lo.max(clo).min(chi), hi.min(chi).max(clo)),
            None => (lo, hi),
        }
    }
}

/// A complete description of a synthetic instance distribution.
///
/// Serializes to/from the `noise` block of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct NoiseModelSpec {
    pub kind: NoiseKind,
    /// Question count `m` (inn, ier).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub questions: Option<usize>,
    /// Candidate count `c` (icn, mallows).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    /// Category count `k` (ier).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<usize>,
    /// For mallows the proto-population describes `phi`, not a fault level.
    pub proto: ProtoSpec,
    #[serde(default)]
    pub truth: TruthPolicy,
}

impl NoiseModelSpec {
    pub fn domain(&self) -> Domain {
        self.kind.domain()
    }

    /// Every problem with this spec, as human-readable messages.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self.kind {
            NoiseKind::Inn | NoiseKind::Ier => {
                match self.questions {
                    Some(0) | None => out.push("questions (m) must be >= 1".into()),
                    _ => {}
                }
                if self.candidates.is_some() {
                    out.push("candidates only applies to ranking models".into());
                }
            }
            NoiseKind::Icn | NoiseKind::Mallows => {
                match self.candidates {
                    Some(c) if c >= 2 => {}
                    _ => out.push("candidates (c) must be >= 2".into()),
                }
                if self.questions.is_some() {
                    out.push("questions only applies to inn/ier models".into());
                }
            }
        }
        match self.kind {
            NoiseKind::Ier => match self.categories {
                Some(k) if k >= 2 => {}
                _ => out.push("categories (k) must be >= 2".into()),
            },
            _ => {
                if self.categories.is_some() {
                    out.push("categories only applies to the ier model".into());
                }
            }
        }
        if let Err(e) = self.proto.to_population() {
            out.push(format!("proto: {e}"));
        }
        let (lo, hi) = self.proto.support();
        match self.kind {
            NoiseKind::Inn => {
                if lo <= 0.0 {
                    out.push("inn fault levels must stay positive; clip the proto above 0".into());
                }
            }
            NoiseKind::Ier | NoiseKind::Icn => {
                if lo < 0.0 || hi > 1.0 {
                    out.push("fault levels must stay in [0, 1]; clip the proto".into());
                }
            }
            NoiseKind::Mallows => {
                if lo <= 0.0 {
                    out.push("mallows phi must stay positive; clip the proto above 0".into());
                }
            }
        }
        if self.truth == TruthPolicy::Uniform && self.kind == NoiseKind::Inn {
            out.push("uniform truth is not defined for continuous questions".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    /// Draw the ground truth, the population, and the instance, in that
    /// order, from a single seeded stream. Bit-identical for identical
    /// `(spec, n, seed)`.
    pub fn generate(&self, n: usize, seed: u64) -> Result<Instance<f64>> {
        self.validate()?;
        if n < 2 {
            return Err(Error::InsufficientWorkers(n));
        }
        let mut rng = rng_from_seed(seed);
        let proto = self.proto.to_population()?;
        match self.kind {
            NoiseKind::Inn => {
                let m = self.questions.unwrap();
                let truth = ContinuousAnswer::new(vec![0.0; m])?;
                let pop = sample_population(&proto, n, &mut rng)?;
                gen_inn(&truth, &pop, &mut rng)
            }
            NoiseKind::Ier => {
                let m = self.questions.unwrap();
                let k = self.categories.unwrap();
                let labels = (0..m).map(|_| rng.random_range(0..k)).collect();
                let truth = CategoricalAnswer::new(labels, k)?;
                let pop = sample_population(&proto, n, &mut rng)?;
                gen_ier(&truth, &pop, &mut rng)
            }
            NoiseKind::Icn => {
                let truth = self.ranking_truth(&mut rng)?;
                let pop = sample_population(&proto, n, &mut rng)?;
                gen_icn(&truth, &pop, &mut rng)
            }
            NoiseKind::Mallows => {
                let truth = self.ranking_truth(&mut rng)?;
                let phis: Vec<f64> = (0..n).map(|_| sample_fault(&proto, &mut rng)).collect();
                gen_mallows(&truth, &phis, &mut rng)
            }
        }
    }

    fn ranking_truth<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RankingAnswer> {
        let c = self.candidates.unwrap();
        match self.truth {
            TruthPolicy::Default => RankingAnswer::identity(c),
            TruthPolicy::Uniform => {
                // Fisher-Yates
                let mut order: Vec<usize> = (0..c).collect();
                for i in (1..c).rev() {
                    let j = rng.random_range(0..=i);
                    order.swap(i, j);
                }
                RankingAnswer::new(order)
            }
        }
    }
}
