use crate::domain::{
    CategoricalAnswer, ContinuousAnswer, Domain, PairwiseVector, RankingAnswer,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A single answer in any domain; used for ground truths and aggregates.
#[derive(Debug, Clone, PartialEq)]
pub enum Answer<T> {
    Continuous(ContinuousAnswer<T>),
    Categorical(CategoricalAnswer),
    Ranking(RankingAnswer),
}

impl<T: Real> Answer<T> {
    pub fn domain(&self) -> Domain {
        match self {
            Answer::Continuous(_) => Domain::Continuous,
            Answer::Categorical(_) => Domain::Categorical,
            Answer::Ranking(_) => Domain::Ranking,
        }
    }

    pub fn as_continuous(&self) -> Option<&ContinuousAnswer<T>> {
        match self {
            Answer::Continuous(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&CategoricalAnswer> {
        match self {
            Answer::Categorical(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_ranking(&self) -> Option<&RankingAnswer> {
        match self {
            Answer::Ranking(a) => Some(a),
            _ => None,
        }
    }
}

/// All workers' answers, one variant per representation.
///
/// Ranking-domain instances come in two flavors: full orders, and raw
/// pairwise vectors that may contain cycles.
#[derive(Debug, Clone, PartialEq)]
pub enum AnswerMatrix<T> {
    Continuous(Vec<ContinuousAnswer<T>>),
    Categorical(Vec<CategoricalAnswer>),
    Ranking(Vec<RankingAnswer>),
    Pairwise(Vec<PairwiseVector>),
}

impl<T: Real> AnswerMatrix<T> {
    pub fn len(&self) -> usize {
        match self {
            AnswerMatrix::Continuous(v) => v.len(),
            AnswerMatrix::Categorical(v) => v.len(),
            AnswerMatrix::Ranking(v) => v.len(),
            AnswerMatrix::Pairwise(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> Domain {
        match self {
            AnswerMatrix::Continuous(_) => Domain::Continuous,
            AnswerMatrix::Categorical(_) => Domain::Categorical,
            AnswerMatrix::Ranking(_) | AnswerMatrix::Pairwise(_) => Domain::Ranking,
        }
    }
}

/// An answer matrix with an optional ground truth and, for synthetic data,
/// the true fault levels that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    answers: AnswerMatrix<T>,
    truth: Option<Answer<T>>,
    true_faults: Option<Vec<T>>,
}

impl<T: Real> Instance<T> {
    pub fn new(answers: AnswerMatrix<T>, truth: Option<Answer<T>>) -> Result<Self> {
        let n = answers.len();
        if n < 2 {
            return Err(Error::InsufficientWorkers(n));
        }
        check_homogeneous(&answers)?;
        if let Some(t) = &truth {
            check_truth_shape(&answers, t)?;
        }
        Ok(Self { answers, truth, true_faults: None })
    }

    /// Attach the generating fault levels (one per worker).
    pub fn with_true_faults(mut self, faults: Vec<T>) -> Result<Self> {
        if faults.len() != self.n() {
            return Err(Error::Shape(format!(
                "{} fault levels for {} workers",
                faults.len(),
                self.n()
            )));
        }
        self.true_faults = Some(faults);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.answers.len()
    }

    pub fn domain(&self) -> Domain {
        self.answers.domain()
    }

    pub fn answers(&self) -> &AnswerMatrix<T> {
        &self.answers
    }

    pub fn truth(&self) -> Option<&Answer<T>> {
        self.truth.as_ref()
    }

    pub fn true_faults(&self) -> Option<&[T]> {
        self.true_faults.as_deref()
    }

    /// Number of questions; for rankings this is the candidate count.
    pub fn width(&self) -> usize {
        match &self.answers {
            AnswerMatrix::Continuous(v) => v[0].len(),
            AnswerMatrix::Categorical(v) => v[0].len(),
            AnswerMatrix::Ranking(v) => v[0].candidates(),
            AnswerMatrix::Pairwise(v) => v[0].candidates(),
        }
    }

    /// Candidate count for ranking instances.
    pub fn candidates(&self) -> Option<usize> {
        match &self.answers {
            AnswerMatrix::Ranking(v) => Some(v[0].candidates()),
            AnswerMatrix::Pairwise(v) => Some(v[0].candidates()),
            _ => None,
        }
    }

    /// Category count for categorical instances.
    pub fn categories(&self) -> Option<usize> {
        match &self.answers {
            AnswerMatrix::Categorical(v) => Some(v[0].categories()),
            _ => None,
        }
    }
}

fn check_homogeneous<T: Real>(answers: &AnswerMatrix<T>) -> Result<()> {
    match answers {
        AnswerMatrix::Continuous(v) => {
            let m = v[0].len();
            if v.iter().any(|a| a.len() != m) {
                return Err(Error::Shape("workers answered different question counts".into()));
            }
        }
        AnswerMatrix::Categorical(v) => {
            let (m, k) = (v[0].len(), v[0].categories());
            if v.iter().any(|a| a.len() != m || a.categories() != k) {
                return Err(Error::Shape("workers disagree on question count or k".into()));
            }
        }
        AnswerMatrix::Ranking(v) => {
            let c = v[0].candidates();
            if v.iter().any(|a| a.candidates() != c) {
                return Err(Error::Shape("workers ranked different candidate sets".into()));
            }
        }
        AnswerMatrix::Pairwise(v) => {
            let c = v[0].candidates();
            if v.iter().any(|a| a.candidates() != c) {
                return Err(Error::Shape("workers compared different candidate sets".into()));
            }
        }
    }
    Ok(())
}

fn check_truth_shape<T: Real>(answers: &AnswerMatrix<T>, truth: &Answer<T>) -> Result<()> {
    let ok = match (answers, truth) {
        (AnswerMatrix::Continuous(v), Answer::Continuous(t)) => t.len() == v[0].len(),
        (AnswerMatrix::Categorical(v), Answer::Categorical(t)) => {
            t.len() == v[0].len() && t.categories() == v[0].categories()
        }
        (AnswerMatrix::Ranking(v), Answer::Ranking(t)) => t.candidates() == v[0].candidates(),
        (AnswerMatrix::Pairwise(v), Answer::Ranking(t)) => t.candidates() == v[0].candidates(),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Shape("ground truth does not match the answer matrix".into()))
    }
}

/// True fault levels of a sampled population.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<T> {
    faults: Vec<T>,
}

impl<T: Real> Population<T> {
    pub fn new(faults: Vec<T>) -> Result<Self> {
        if faults.len() < 2 {
            return Err(Error::InsufficientWorkers(faults.len()));
        }
        if let Some(bad) = faults.iter().find(|f| !f.is_finite() || **f < T::zero()) {
            return Err(Error::InvalidFault { model: "population", value: bad.as_f64() });
        }
        Ok(Self { faults })
    }

    pub fn n(&self) -> usize {
        self.faults.len()
    }

    pub fn faults(&self) -> &[T] {
        &self.faults
    }

    pub fn mean(&self) -> T {
        self.faults.iter().copied().sum::<T>() / T::of(self.n() as f64)
    }
}

/// Distribution shapes for fault levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtoShape<T> {
    PointMass { value: T },
    Normal { mean: T, sd: T },
    Uniform { lo: T, hi: T },
    Triangular { lo: T, mode: T, hi: T },
    /// Two-spike mixture: `low` with probability `prob_low`, else `high`.
    Bimodal { low: T, high: T, prob_low: T },
}

/// A distribution over fault levels, with clip bounds applied to every draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtoPopulation<T> {
    shape: ProtoShape<T>,
    clip: (T, T),
}

impl<T: Real> ProtoPopulation<T> {
    pub fn new(shape: ProtoShape<T>, clip: (T, T)) -> Result<Self> {
        if clip.0 > clip.1 || clip.0.is_nan() || clip.1.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "clip bounds [{}, {}] are not ordered",
                clip.0, clip.1
            )));
        }
        let ok = match shape {
            ProtoShape::PointMass { value } => value.is_finite(),
            ProtoShape::Normal { mean, sd } => mean.is_finite() && sd >= T::zero(),
            ProtoShape::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            ProtoShape::Triangular { lo, mode, hi } => {
                lo.is_finite() && hi.is_finite() && lo <= mode && mode <= hi
            }
            ProtoShape::Bimodal { low, high, prob_low } => {
                low.is_finite()
                    && high.is_finite()
                    && prob_low >= T::zero()
                    && prob_low <= T::one()
            }
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("bad proto-population shape {shape:?}")));
        }
        Ok(Self { shape, clip })
    }

    /// Unclipped draws.
    pub fn unclipped(shape: ProtoShape<T>) -> Result<Self> {
        Self::new(shape, (T::neg_infinity(), T::infinity()))
    }

    pub fn shape(&self) -> ProtoShape<T> {
        self.shape
    }

    pub fn clip(&self) -> (T, T) {
        self.clip
    }

    /// Mean of the unclipped shape.
    pub fn mean(&self) -> T {
        match self.shape {
            ProtoShape::PointMass { value } => value,
            ProtoShape::Normal { mean, .. } => mean,
            ProtoShape::Uniform { lo, hi } => (lo + hi) / T::of(2.0),
            ProtoShape::Triangular { lo, mode, hi } => (lo + mode + hi) / T::of(3.0),
            ProtoShape::Bimodal { low, high, prob_low } => {
                prob_low * low + (T::one() - prob_low) * high
            }
        }
    }

    /// Variance of the unclipped shape.
    pub fn variance(&self) -> T {
        match self.shape {
            ProtoShape::PointMass { .. } => T::zero(),
            ProtoShape::Normal { sd, .. } => sd * sd,
            ProtoShape::Uniform { lo, hi } => {
                let w = hi - lo;
                w * w / T::of(12.0)
            }
            ProtoShape::Triangular { lo, mode, hi } => {
                (lo * lo + mode * mode + hi * hi - lo * mode - lo * hi - mode * hi) / T::of(18.0)
            }
            ProtoShape::Bimodal { low, high, prob_low } => {
                let m = self.mean();
                prob_low * low * low + (T::one() - prob_low) * high * high - m * m
            }
        }
    }

    /// Clamp a raw draw into the clip bounds.
    pub(crate) fn clamp(&self, x: T) -> T {
        x.max(self.clip.0).min(self.clip.1)
    }
}
