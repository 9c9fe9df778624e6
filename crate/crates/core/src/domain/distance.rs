use crate::domain::answer::pairwise_hamming;
use crate::domain::{
    Answer, AnswerMatrix, CategoricalAnswer, ContinuousAnswer, Instance, PairwiseVector,
    RankingAnswer,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalized squared Euclidean distance, `(1/m) * sum_j (a_j - b_j)^2`.
pub fn dist_continuous<T: Real>(a: &ContinuousAnswer<T>, b: &ContinuousAnswer<T>) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("lengths {} vs {}", a.len(), b.len())));
    }
    let sum: T = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum();
    Ok(sum / T::of(a.len() as f64))
}

/// Normalized Hamming distance: the fraction of questions answered differently.
pub fn dist_hamming<T: Real>(a: &CategoricalAnswer, b: &CategoricalAnswer) -> Result<T> {
    if a.len() != b.len() || a.categories() != b.categories() {
        return Err(Error::Shape(format!(
            "categorical shapes (m={}, k={}) vs (m={}, k={})",
            a.len(),
            a.categories(),
            b.len(),
            b.categories()
        )));
    }
    Ok(hamming_fraction(a.labels(), b.labels()))
}

pub(crate) fn hamming_fraction<T: Real>(a: &[usize], b: &[usize]) -> T {
    let differing = a.iter().zip(b).filter(|(x, y)| x != y).count();
    T::of(differing as f64) / T::of(a.len() as f64)
}

/// Kendall-tau distance between two pairwise vectors: the fraction of
/// candidate pairs ordered differently. Accepts cyclic inputs.
pub fn dist_kendall<T: Real>(a: &PairwiseVector, b: &PairwiseVector) -> Result<T> {
    if a.candidates() != b.candidates() {
        return Err(Error::Shape(format!(
            "candidate counts {} vs {}",
            a.candidates(),
            b.candidates()
        )));
    }
    Ok(pairwise_hamming(a, b))
}

/// Kendall-tau distance between two rankings.
pub fn dist_kendall_orders<T: Real>(a: &RankingAnswer, b: &RankingAnswer) -> Result<T> {
    dist_kendall(&a.pairwise(), &b.pairwise())
}

/// Distance between two answers of the same domain, using that domain's kernel.
pub fn answer_distance<T: Real>(a: &Answer<T>, b: &Answer<T>) -> Result<T> {
    match (a, b) {
        (Answer::Continuous(x), Answer::Continuous(y)) => dist_continuous(x, y),
        (Answer::Categorical(x), Answer::Categorical(y)) => dist_hamming(x, y),
        (Answer::Ranking(x), Answer::Ranking(y)) => dist_kendall_orders(x, y),
        _ => Err(Error::Shape("answers come from different domains".into())),
    }
}

/// Distance from one worker's raw answer to a (transitive, in the ranking
/// case) reference answer. This is how empirical faults `d(s_i, z)` are
/// measured, including for cyclic pairwise reports.
pub fn report_distance<T: Real>(
    answers: &AnswerMatrix<T>,
    worker: usize,
    reference: &Answer<T>,
) -> Result<T> {
    match (answers, reference) {
        (AnswerMatrix::Continuous(v), Answer::Continuous(t)) => dist_continuous(&v[worker], t),
        (AnswerMatrix::Categorical(v), Answer::Categorical(t)) => dist_hamming(&v[worker], t),
        (AnswerMatrix::Ranking(v), Answer::Ranking(t)) => dist_kendall_orders(&v[worker], t),
        (AnswerMatrix::Pairwise(v), Answer::Ranking(t)) => {
            dist_kendall(&v[worker], &t.pairwise())
        }
        _ => Err(Error::Shape("reference answer does not match the matrix domain".into())),
    }
}

/// Symmetric matrix of all pairwise worker distances, computed once and
/// shared by the estimators.
#[derive(Debug, Clone)]
pub struct DistanceMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DistanceMatrix<T> {
    pub fn from_instance(instance: &Instance<T>) -> Result<Self> {
        let n = instance.n();
        let mut data = vec![T::zero(); n * n];
        match instance.answers() {
            AnswerMatrix::Continuous(v) => {
                fill(&mut data, n, |i, j| dist_continuous(&v[i], &v[j]))?
            }
            AnswerMatrix::Categorical(v) => {
                fill(&mut data, n, |i, j| dist_hamming(&v[i], &v[j]))?
            }
            AnswerMatrix::Ranking(v) => {
                let pv: Vec<PairwiseVector> = v.iter().map(RankingAnswer::pairwise).collect();
                fill(&mut data, n, |i, j| dist_kendall(&pv[i], &pv[j]))?
            }
            AnswerMatrix::Pairwise(v) => fill(&mut data, n, |i, j| dist_kendall(&v[i], &v[j]))?,
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Proxy distance of every worker: the mean distance to all others.
    pub fn proxy(&self) -> Vec<T> {
        let denom = T::of((self.n - 1) as f64);
        (0..self.n)
            .map(|i| {
                let sum: T = (0..self.n).filter(|&j| j != i).map(|j| self.get(i, j)).sum();
                sum / denom
            })
            .collect()
    }

    /// Weight-normalized proxy distances, `sum_{j!=i} w_j d_ij / sum_{j!=i} w_j`.
    ///
    /// Fails with [`Error::DegenerateWeights`] when some worker's
    /// normalizer is not strictly positive.
    pub fn weighted_proxy(&self, weights: &[T]) -> Result<Vec<T>> {
        if weights.len() != self.n {
            return Err(Error::Shape(format!(
                "{} weights for {} workers",
                weights.len(),
                self.n
            )));
        }
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut num = T::zero();
            let mut denom = T::zero();
            for (j, &w) in weights.iter().enumerate() {
                if j != i {
                    num = num + w * self.get(i, j);
                    denom = denom + w;
                }
            }
            if denom <= T::zero() {
                return Err(Error::DegenerateWeights(denom.as_f64()));
            }
            out.push(num / denom);
        }
        Ok(out)
    }
}

fn fill<T: Real>(
    data: &mut [T],
    n: usize,
    mut dist: impl FnMut(usize, usize) -> Result<T>,
) -> Result<()> {
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist(i, j)?;
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(())
}

/// Proxy distance of every worker in the instance (mean pairwise distance
/// to the other workers).
pub fn proxy_distances<T: Real>(instance: &Instance<T>) -> Result<Vec<T>> {
    Ok(DistanceMatrix::from_instance(instance)?.proxy())
}
