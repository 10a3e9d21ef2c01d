//! Leave-one-out k-nearest-neighbor distances and ball-count queries.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kdtree::KdTree;
use crate::metric::Metric;

/// Leave-one-out k-NN distances: entry `i` is the distance from point `i` to
/// its k-th nearest neighbor among the other points.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnResult {
    pub distances: Vec<f64>,
}

fn validate_k(data: &Dataset, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Arity("k must be at least 1".into()));
    }
    if k >= data.n_points() {
        return Err(Error::Arity(format!(
            "k = {k} requires at least k + 1 = {} points, dataset has {}",
            k + 1,
            data.n_points()
        )));
    }
    Ok(())
}

/// Exact leave-one-out k-NN distances via a bulk-built spatial tree.
///
/// Each point queries its `k + 1` nearest (which include the point itself)
/// and discards the self match. Ties are resolved by taking the k-th order
/// statistic of the distance multiset, so the returned values do not depend
/// on which tied neighbor wins. A zero distance at rank <= k means two points
/// coincide and is reported as [`Error::DegenerateData`].
pub fn knn_distances(data: &Dataset, k: usize, metric: Metric) -> Result<KnnResult> {
    validate_k(data, k)?;
    let tree = KdTree::build(data, metric);
    let per_point: Vec<Result<f64>> = (0..data.n_points())
        .into_par_iter()
        .map(|i| {
            let mut nb = tree.knn(data.point(i), k + 1);
            match nb.iter().position(|&(_, id)| id as usize == i) {
                Some(pos) => {
                    nb.remove(pos);
                }
                // Self missing means at least k + 1 other points are at
                // reduced distance zero; dropping the worst keeps the k
                // smallest of the leave-one-out multiset (all zero, caught
                // below).
                None => {
                    nb.pop();
                }
            }
            if nb[0].0 == 0.0 {
                return Err(Error::DegenerateData {
                    i,
                    j: nb[0].1 as usize,
                });
            }
            Ok(metric.reduced_to_distance(nb[k - 1].0))
        })
        .collect();
    collect_distances(per_point)
}

/// Brute-force O(N^2) leave-one-out k-NN distances. Same contract as
/// [`knn_distances`]; the two must agree bit for bit.
pub fn knn_distances_brute(data: &Dataset, k: usize, metric: Metric) -> Result<KnnResult> {
    validate_k(data, k)?;
    let n = data.n_points();
    let per_point: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = data.point(i);
            let mut rds: Vec<(f64, u32)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (metric.reduced_distance(p, data.point(j)), j as u32))
                .collect();
            rds.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0));
            if let Some(&(_, j)) = rds[..k].iter().find(|&&(rd, _)| rd == 0.0) {
                return Err(Error::DegenerateData { i, j: j as usize });
            }
            Ok(metric.reduced_to_distance(rds[k - 1].0))
        })
        .collect();
    collect_distances(per_point)
}

fn collect_distances(per_point: Vec<Result<f64>>) -> Result<KnnResult> {
    let mut distances = Vec::with_capacity(per_point.len());
    for r in per_point {
        distances.push(r?);
    }
    Ok(KnnResult { distances })
}

/// Number of points (excluding the center itself) strictly inside the open
/// ball of the given radius around point `center_index`.
pub fn count_in_ball(
    data: &Dataset,
    center_index: usize,
    radius: f64,
    metric: Metric,
) -> Result<usize> {
    if center_index >= data.n_points() {
        return Err(Error::Arity(format!(
            "center index {center_index} out of range for {} points",
            data.n_points()
        )));
    }
    if radius < 0.0 || radius.is_nan() {
        return Err(Error::Domain(format!(
            "radius must be nonnegative, got {radius}"
        )));
    }
    let center = data.point(center_index);
    Ok(data
        .points()
        .enumerate()
        .filter(|&(j, p)| j != center_index && metric.distance(center, p) < radius)
        .count())
}
