//! Entropy and mutual-information estimators.
//!
//! The Kozachenko-Leonenko estimator turns leave-one-out k-NN distances
//! `rho_i` into an entropy estimate:
//!
//! ```text
//! H_hat = mean_i log( N * rho_i^d * nu_d / e^psi(k) ),      N = n_points - 1
//! ```
//!
//! where `nu_d` is the unit-ball volume of the metric and `psi` the digamma
//! function. Mutual information composes three such estimates:
//! `I(X, Y) = H(X) + H(Y) - H(X, Y)`.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math::digamma;
use crate::metric::Metric;
use crate::neighbors::knn_distances;

/// Estimator parameters: neighbor rank `k` and the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorConfig {
    pub k: usize,
    pub metric: Metric,
}

/// An entropy estimate in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    /// The estimate: mean of the per-point log terms.
    pub value: f64,
    pub n_points: usize,
    /// Per-point terms `log Y_i` in point order, kept only on request.
    pub per_point_terms: Option<Vec<f64>>,
}

/// Sums in ascending order with pairwise recursion. Sorting first makes the
/// result invariant under permutations of the input, and the pairwise tree
/// keeps rounding error logarithmic in length.
pub(crate) fn stable_mean(terms: &[f64]) -> f64 {
    let mut sorted = terms.to_vec();
    sorted.sort_by(f64::total_cmp);
    pairwise_sum(&sorted) / terms.len() as f64
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn kl_entropy_impl(
    data: &Dataset,
    config: &EstimatorConfig,
    keep_terms: bool,
) -> Result<EntropyEstimate> {
    let knn = knn_distances(data, config.k, config.metric)?;
    let n_points = data.n_points();
    let big_n = (n_points - 1) as f64;
    let d = data.dim() as f64;
    let log_nu = config.metric.unit_ball_volume(data.dim()).ln();
    let psi_k = digamma(config.k as f64).expect("k >= 1 was validated");
    let offset = big_n.ln() + log_nu - psi_k;
    let terms: Vec<f64> = knn
        .distances
        .par_iter()
        .map(|rho| d * rho.ln() + offset)
        .collect();
    Ok(EntropyEstimate {
        value: stable_mean(&terms),
        n_points,
        per_point_terms: keep_terms.then_some(terms),
    })
}

/// The k-nearest-neighbor (Kozachenko-Leonenko) entropy estimate in nats.
///
/// Requires `k <= n_points - 1`. Duplicate points surface as
/// [`Error::DegenerateData`] because a zero neighbor distance has no finite
/// log. Deterministic given its inputs, independent of thread count.
pub fn kl_entropy(data: &Dataset, config: &EstimatorConfig) -> Result<EntropyEstimate> {
    kl_entropy_impl(data, config, false)
}

/// Same as [`kl_entropy`] but retains the per-point terms.
pub fn kl_entropy_with_terms(data: &Dataset, config: &EstimatorConfig) -> Result<EntropyEstimate> {
    kl_entropy_impl(data, config, true)
}

/// The infeasible plug-in estimate `-mean_i log f(X_i)`, usable when the
/// density is known. Serves as an oracle for the simulated processes.
pub fn plug_in_entropy(
    data: &Dataset,
    log_density: impl Fn(&[f64]) -> f64,
) -> Result<f64> {
    let mut terms = Vec::with_capacity(data.n_points());
    for (i, p) in data.points().enumerate() {
        let v = log_density(p);
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "log-density is not finite at point {i}"
            )));
        }
        terms.push(-v);
    }
    Ok(stable_mean(&terms))
}

/// Mutual information `I(X, Y) = H(X) + H(Y) - H(X, Y)` with each entropy
/// estimated by [`kl_entropy`] under the same `k` and metric.
///
/// The joint space concatenates coordinates. Internally the two blocks are
/// placed in a canonical order (coordinate permutations are isometries under
/// both metrics), which makes the result exactly symmetric in its arguments.
pub fn mutual_information(
    data_x: &Dataset,
    data_y: &Dataset,
    config: &EstimatorConfig,
) -> Result<f64> {
    if data_x.n_points() != data_y.n_points() {
        return Err(Error::Arity(format!(
            "length mismatch: {} vs {} points",
            data_x.n_points(),
            data_y.n_points()
        )));
    }
    let (first, second) = if block_order(data_x, data_y) == std::cmp::Ordering::Greater {
        (data_y, data_x)
    } else {
        (data_x, data_y)
    };
    let joint_dim = first.dim() + second.dim();
    let mut joint = Vec::with_capacity(data_x.n_points() * joint_dim);
    for i in 0..data_x.n_points() {
        joint.extend_from_slice(first.point(i));
        joint.extend_from_slice(second.point(i));
    }
    let joint = Dataset::from_flat(joint, joint_dim)?;

    let h_x = kl_entropy(data_x, config)?.value;
    let h_y = kl_entropy(data_y, config)?.value;
    let h_joint = kl_entropy(&joint, config)?.value;
    Ok(h_x + h_y - h_joint)
}

fn block_order(a: &Dataset, b: &Dataset) -> std::cmp::Ordering {
    a.dim().cmp(&b.dim()).then_with(|| {
        for (x, y) in a.points().flatten().zip(b.points().flatten()) {
            let ord = x.total_cmp(y);
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    })
}
