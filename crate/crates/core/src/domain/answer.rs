use crate::domain::{pair_count, pair_index, pairs};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real-valued answers to `m` questions.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousAnswer<T> {
    values: Vec<T>,
}

impl<T: Real> ContinuousAnswer<T> {
    /// Rejects empty vectors and non-finite entries.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("continuous answer needs at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite answer value {bad}"
            )));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Labels in `{0..k-1}` for `m` categorical questions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalAnswer {
    labels: Vec<usize>,
    k: usize,
}

impl CategoricalAnswer {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Shape("categorical answer needs at least one label".into()));
        }
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 categories, got {k}"
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Shape(format!("label {bad} out of range for k={k}")));
        }
        Ok(Self { labels, k })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn categories(&self) -> usize {
        self.k
    }
}

/// A strict ranking of `c` candidates, best first.
///
/// `order[p]` is the candidate at position `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingAnswer {
    order: Vec<usize>,
}

impl RankingAnswer {
    /// Rejects anything that is not a permutation of `0..c`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let c = order.len();
        if c < 2 {
            return Err(Error::Shape("ranking needs at least two candidates".into()));
        }
        let mut seen = vec![false; c];
        for &cand in &order {
            if cand >= c || seen[cand] {
                return Err(Error::Shape(format!(
                    "order {order:?} is not a permutation of 0..{c}"
                )));
            }
            seen[cand] = true;
        }
        Ok(Self { order })
    }

    /// Identity ranking `0, 1, .., c-1`.
    pub fn identity(candidates: usize) -> Result<Self> {
        Self::new((0..candidates).collect())
    }

    pub fn candidates(&self) -> usize {
        self.order.len()
    }

    /// Candidates from best to worst.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `ranks()[cand]` is the 0-based position of `cand` (0 = best).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (pos, &cand) in self.order.iter().enumerate() {
            ranks[cand] = pos;
        }
        ranks
    }

    /// The reversed ranking.
    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        Self { order }
    }

    /// Pairwise comparison vector of this ranking.
    pub fn pairwise(&self) -> PairwiseVector {
        PairwiseVector::from_order(self)
    }
}

/// One sign per candidate pair `(a, b)`, `a < b`, in lexicographic pair
/// order; `+1` means `a` is ranked above `b`.
///
/// Unlike [`RankingAnswer`] the relation may be cyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseVector {
    candidates: usize,
    entries: Vec<i8>,
}

impl PairwiseVector {
    pub fn new(candidates: usize, entries: Vec<i8>) -> Result<Self> {
        if candidates < 2 {
            return Err(Error::Shape("pairwise vector needs at least two candidates".into()));
        }
        if entries.len() != pair_count(candidates) {
            return Err(Error::Shape(format!(
                "expected {} pair entries for {candidates} candidates, got {}",
                pair_count(candidates),
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Shape("pairwise entries must be +1 or -1".into()));
        }
        Ok(Self { candidates, entries })
    }

    pub fn from_order(order: &RankingAnswer) -> Self {
        let c = order.candidates();
        let ranks = order.ranks();
        let entries = pairs(c)
            .map(|(a, b)| if ranks[a] < ranks[b] { 1 } else { -1 })
            .collect();
        Self { candidates: c, entries }
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Sign of "`a` above `b`" for any ordered pair of distinct candidates.
    pub fn sign(&self, a: usize, b: usize) -> i8 {
        debug_assert!(a != b);
        if a < b {
            self.entries[pair_index(self.candidates, a, b)]
        } else {
            -self.entries[pair_index(self.candidates, b, a)]
        }
    }

    /// Flip the entry for pair index `idx`.
    pub(crate) fn flip(&mut self, idx: usize) {
        self.entries[idx] = -self.entries[idx];
    }

    /// Decode back into a ranking.
    ///
    /// Fails with [`Error::NonTransitive`] when the relation contains a
    /// cycle; repair goes through the Kemeny projection in the aggregation
    /// module instead.
    pub fn to_order(&self) -> Result<RankingAnswer> {
        let c = self.candidates;
        let mut wins = vec![0usize; c];
        for (idx, (a, b)) in pairs(c).enumerate() {
            if self.entries[idx] == 1 {
                wins[a] += 1;
            } else {
                wins[b] += 1;
            }
        }
        let mut order: Vec<usize> = (0..c).collect();
        order.sort_by(|&x, &y| wins[y].cmp(&wins[x]).then(x.cmp(&y)));
        // A transitive relation is exactly one that agrees with its win-sorted order.
        let candidate = RankingAnswer { order };
        let ranks = candidate.ranks();
        for (idx, (a, b)) in pairs(c).enumerate() {
            let expected = if ranks[a] < ranks[b] { 1 } else { -1 };
            if self.entries[idx] != expected {
                return Err(Error::NonTransitive);
            }
        }
        Ok(candidate)
    }

    pub fn is_transitive(&self) -> bool {
        self.to_order().is_ok()
    }
}

/// Normalized Hamming distance between two equal-length pairwise vectors,
/// exposed here for reuse by the distance kernels.
pub(crate) fn pairwise_hamming<T: Real>(a: &PairwiseVector, b: &PairwiseVector) -> T {
    debug_assert_eq!(a.candidates, b.candidates);
    let differing = a
        .entries
        .iter()
        .zip(&b.entries)
        .filter(|(x, y)| x != y)
        .count();
    T::of(differing as f64) / T::of(a.entries.len() as f64)
}
