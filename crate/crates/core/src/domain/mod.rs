//! Answer representations, instances, populations, and distance kernels.

mod answer;
mod distance;
mod instance;

pub use answer::{CategoricalAnswer, ContinuousAnswer, PairwiseVector, RankingAnswer};
pub use distance::{
    answer_distance, dist_continuous, dist_hamming, dist_kendall, dist_kendall_orders,
    proxy_distances, report_distance, DistanceMatrix,
};
pub use instance::{Answer, AnswerMatrix, Instance, Population, ProtoPopulation, ProtoShape};

use std::fmt;

use serde::{Deserialize, Serialize};

/// The three answer domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Continuous,
    Categorical,
    Ranking,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Domain::Continuous => "continuous",
            Domain::Categorical => "categorical",
            Domain::Ranking => "ranking",
        };
        f.write_str(s)
    }
}

/// Number of unordered candidate pairs, `C(c, 2)`.
pub fn pair_count(candidates: usize) -> usize {
    candidates * (candidates - 1) / 2
}

/// Index of the pair `(a, b)` with `a < b` in lexicographic pair order.
pub fn pair_index(candidates: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < candidates);
    a * (candidates - 1) - a * (a + 1) / 2 + b - 1
}

/// Iterate candidate pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn pairs(candidates: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..candidates).flat_map(move |a| (a + 1..candidates).map(move |b| (a, b)))
}
