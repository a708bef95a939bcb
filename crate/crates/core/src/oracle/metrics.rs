// SPDX-License-Identifier: Apache-2.0

//! Locality metrics. Per-point terms may be computed in parallel; the final
//! sums always run in point order so results do not depend on scheduling.

use super::knn::{sq_dist, TopK};
use crate::exec::{self, Execution};
use crate::neighbors::NeighborTable;
use crate::{Error, PointCloud, Result};

fn ordered_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean over points of `|candidate_i ∩ truth_i| / |truth_i|`, rows taken as
/// sets. Exact KNN rows are distinct, so this is the usual hits / k.
pub fn recall_at_k(candidate: &NeighborTable, truth: &NeighborTable) -> Result<f64> {
    if candidate.len() != truth.len() || candidate.k() != truth.k() {
        return Err(Error::invalid(format!(
            "candidate table is {}x{}, truth is {}x{}",
            candidate.len(),
            candidate.k(),
            truth.len(),
            truth.k()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("recall of an empty table is undefined"));
    }
    let per_point = exec::map_range(Execution::default(), truth.len(), |i| {
        let t = truth.row(i);
        let c = candidate.row(i);
        let distinct = t
            .iter()
            .enumerate()
            .filter(|&(s, j)| !t[..s].contains(j))
            .count();
        let hits = c
            .iter()
            .enumerate()
            .filter(|&(s, j)| !c[..s].contains(j) && t.contains(j))
            .count();
        hits as f64 / distinct as f64
    });
    Ok(ordered_mean(&per_point))
}

/// Mean over points of the fraction of listed neighbors sharing the point's label.
pub fn label_purity(table: &NeighborTable, labels: Option<&[u16]>) -> Result<f64> {
    let labels = labels.ok_or_else(|| Error::invalid("label purity needs per-point labels"))?;
    if labels.len() != table.len() {
        return Err(Error::invalid(format!(
            "{} labels for a table over {} points",
            labels.len(),
            table.len()
        )));
    }
    if table.is_empty() {
        return Err(Error::invalid("purity of an empty table is undefined"));
    }
    let k = table.k() as f64;
    let per_point = exec::map_range(Execution::default(), table.len(), |i| {
        table
            .row(i)
            .iter()
            .filter(|&&j| labels[j] == labels[i])
            .count() as f64
            / k
    });
    Ok(ordered_mean(&per_point))
}

/// Mean Euclidean distance from each point to its listed neighbors.
pub fn mean_neighbor_distance(cloud: &PointCloud, table: &NeighborTable) -> Result<f64> {
    if table.len() != cloud.len() {
        return Err(Error::invalid(format!(
            "table over {} points, cloud has {}",
            table.len(),
            cloud.len()
        )));
    }
    if table.is_empty() {
        return Ok(0.0);
    }
    let k = table.k() as f64;
    let per_point = exec::map_range(Execution::default(), table.len(), |i| {
        let p = cloud.point(i);
        table
            .row(i)
            .iter()
            .map(|&j| sq_dist(p, cloud.point(j)).sqrt())
            .sum::<f64>()
            / k
    });
    Ok(ordered_mean(&per_point))
}

/// Union of each point's neighbors across `tables` (self dropped), cut back
/// to the `k` nearest by `(distance, index)` in `cloud`'s coordinates.
pub fn pooled_neighbors(
    cloud: &PointCloud,
    tables: &[NeighborTable],
    k: usize,
    exec: Execution,
) -> Result<NeighborTable> {
    if k == 0 {
        return Err(Error::invalid("neighbor count k must be at least 1"));
    }
    if tables.is_empty() {
        return Err(Error::invalid("no neighbor tables to pool"));
    }
    let n = cloud.len();
    if let Some(t) = tables.iter().find(|t| t.len() != n) {
        return Err(Error::invalid(format!(
            "table over {} points, cloud has {n}",
            t.len()
        )));
    }
    let rows = exec::map_range(exec, n, |i| {
        let p = cloud.point(i);
        let mut pool: Vec<usize> = tables
            .iter()
            .flat_map(|t| t.row(i).iter().copied())
            .filter(|&j| j != i)
            .collect();
        pool.sort_unstable();
        pool.dedup();
        let mut top = TopK::new(k);
        for j in pool {
            top.push(sq_dist(p, cloud.point(j)), j);
        }
        let row: Vec<usize> = top.indices().collect();
        (row.len() == k).then_some(row)
    });
    let mut data = Vec::with_capacity(n * k);
    for (i, row) in rows.into_iter().enumerate() {
        let row = row.ok_or_else(|| {
            Error::invalid(format!(
                "point {i} has fewer than {k} distinct pooled neighbors"
            ))
        })?;
        data.extend(row);
    }
    Ok(NeighborTable::from_flat_unchecked(k, data))
}
