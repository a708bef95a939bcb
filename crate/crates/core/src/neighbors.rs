// SPDX-License-Identifier: Apache-2.0

//! Sequence neighbors, neighbor-offset features and multi-view fusion.

use crate::exec::{self, Execution};
use crate::sfc::Permutation;
use crate::views::ViewSet;
use crate::{Error, PointCloud, Result};

/// `k` neighbor indices per point, row `i` belonging to original point `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTable {
    k: usize,
    data: Vec<usize>,
}

impl NeighborTable {
    /// Builds a table from flat row-major data; every index must be `< n`.
    pub fn from_flat(k: usize, data: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("neighbor count k must be at least 1"));
        }
        if !data.len().is_multiple_of(k) {
            return Err(Error::Mismatch(format!(
                "{} entries do not form rows of {k}",
                data.len()
            )));
        }
        let n = data.len() / k;
        if let Some(bad) = data.iter().find(|&&j| j >= n) {
            return Err(Error::invalid(format!(
                "neighbor index {bad} out of range for {n} points"
            )));
        }
        Ok(NeighborTable { k, data })
    }

    pub fn from_rows(k: usize, rows: &[Vec<usize>]) -> Result<Self> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(Error::Mismatch(format!(
                "row {i} has {} entries, expected {k}",
                r.len()
            )));
        }
        Self::from_flat(k, rows.concat())
    }

    pub(crate) fn from_flat_unchecked(k: usize, data: Vec<usize>) -> Self {
        NeighborTable { k, data }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.k
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.data.chunks_exact(self.k)
    }

    pub fn as_flat(&self) -> &[usize] {
        &self.data
    }
}

/// The `k` sequence positions nearest to `p` among `0..n`, nearest first,
/// the earlier position winning ties. Self-padded when `n <= k`.
fn window(p: usize, n: usize, k: usize, out: &mut [usize]) {
    let mut filled = 0;
    let mut d = 1;
    while filled < k && d < n {
        if d <= p {
            out[filled] = p - d;
            filled += 1;
            if filled == k {
                break;
            }
        }
        if p + d < n {
            out[filled] = p + d;
            filled += 1;
        }
        d += 1;
    }
    out[filled..].fill(p);
}

/// For each point, the `k` points closest to it in the sorted sequence.
///
/// Near either end of the sequence the window slides inward so every point
/// still gets `k` distinct neighbors; only when `n <= k` are the spare slots
/// filled with the point itself.
pub fn sequence_neighbors(perm: &Permutation, k: usize) -> Result<NeighborTable> {
    sequence_neighbors_with(perm, k, Execution::default())
}

pub fn sequence_neighbors_with(
    perm: &Permutation,
    k: usize,
    exec: Execution,
) -> Result<NeighborTable> {
    if k == 0 {
        return Err(Error::invalid("neighbor count k must be at least 1"));
    }
    let n = perm.len();
    let mut data = vec![0usize; n * k];
    exec::for_each_row(exec, &mut data, k, |i, row| {
        window(perm.position_of(i), n, k, row);
        for slot in row.iter_mut() {
            *slot = perm.point_at(*slot);
        }
    });
    Ok(NeighborTable::from_flat_unchecked(k, data))
}

/// Per-point feature rows, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    dim: usize,
    columns: Vec<String>,
    data: Vec<f64>,
}

impl FeatureBlock {
    pub fn new(columns: Vec<String>, data: Vec<f64>) -> Result<Self> {
        let dim = columns.len();
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::Mismatch(format!(
                "{} values do not form rows of {dim} columns",
                data.len()
            )));
        }
        Ok(FeatureBlock { dim, columns, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Rows in sequence order: row `p` of the result is row `perm.order()[p]`.
    pub fn gather(&self, perm: &Permutation) -> Result<FeatureBlock> {
        if perm.len() != self.len() {
            return Err(Error::Mismatch(format!(
                "permutation over {} points, block has {} rows",
                perm.len(),
                self.len()
            )));
        }
        let data = perm
            .order()
            .iter()
            .flat_map(|&i| self.row(i))
            .copied()
            .collect();
        Ok(FeatureBlock {
            dim: self.dim,
            columns: self.columns.clone(),
            data,
        })
    }

    /// Columns `[start, start + 3)` of row `i`: the `j`-th neighbor offset
    /// lives at `start = 3 + 3 * j`.
    pub fn triple(&self, i: usize, start: usize) -> [f64; 3] {
        let r = self.row(i);
        [r[start], r[start + 1], r[start + 2]]
    }
}

fn nee_columns(k: usize, intensity: bool) -> Vec<String> {
    let mut cols: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    for j in 1..=k {
        for a in ["dx", "dy", "dz"] {
            cols.push(format!("{a}{j}"));
        }
    }
    if intensity {
        cols.push("intensity".into());
    }
    cols
}

/// Position, offsets to each listed neighbor (`p_i - p_j`), then intensity
/// if the cloud has it: `3 + 3k + d_other` columns.
pub fn encode_nee(cloud: &PointCloud, table: &NeighborTable) -> Result<FeatureBlock> {
    encode_nee_with(cloud, table, Execution::default())
}

pub fn encode_nee_with(
    cloud: &PointCloud,
    table: &NeighborTable,
    exec: Execution,
) -> Result<FeatureBlock> {
    if table.len() != cloud.len() {
        return Err(Error::invalid(format!(
            "neighbor table covers {} points, cloud has {}",
            table.len(),
            cloud.len()
        )));
    }
    let k = table.k();
    let intensity = cloud.intensity();
    let columns = nee_columns(k, intensity.is_some());
    let dim = columns.len();
    let (x, y, z) = (cloud.x(), cloud.y(), cloud.z());
    let mut data = vec![0.0; cloud.len() * dim];
    exec::for_each_row(exec, &mut data, dim, |i, row| {
        row[..3].copy_from_slice(&[x[i], y[i], z[i]]);
        for (slot, &j) in table.row(i).iter().enumerate() {
            let o = 3 + 3 * slot;
            row[o] = x[i] - x[j];
            row[o + 1] = y[i] - y[j];
            row[o + 2] = z[i] - z[j];
        }
        if let Some(r) = intensity {
            row[dim - 1] = r[i] as f64;
        }
    });
    Ok(FeatureBlock { dim, columns, data })
}

/// Maps each view's sequence-ordered block back to original point order and
/// sums across views: output row `i` is the sum over views of that view's
/// row at `inverse[i]`.
pub fn fuse_views(views: &ViewSet, blocks: &[FeatureBlock]) -> Result<FeatureBlock> {
    let perms: Vec<&Permutation> = views.permutations().collect();
    fuse_sequences(&perms, blocks, Execution::default())
}

pub fn fuse_sequences(
    perms: &[&Permutation],
    blocks: &[FeatureBlock],
    exec: Execution,
) -> Result<FeatureBlock> {
    if perms.len() != blocks.len() || blocks.is_empty() {
        return Err(Error::invalid(format!(
            "{} views but {} feature blocks",
            perms.len(),
            blocks.len()
        )));
    }
    let first = &blocks[0];
    let (n, dim) = (first.len(), first.dim());
    for (v, (b, p)) in blocks.iter().zip(perms).enumerate() {
        if b.dim() != dim {
            return Err(Error::invalid(format!(
                "view {v} has feature dimension {}, expected {dim}",
                b.dim()
            )));
        }
        if b.len() != n || p.len() != n {
            return Err(Error::invalid(format!(
                "view {v} covers {} rows / {} points, expected {n}",
                b.len(),
                p.len()
            )));
        }
    }
    let mut data = vec![0.0; n * dim];
    exec::for_each_row(exec, &mut data, dim, |i, row| {
        for (b, p) in blocks.iter().zip(perms) {
            for (acc, v) in row.iter_mut().zip(b.row(p.position_of(i))) {
                *acc += v;
            }
        }
    });
    Ok(FeatureBlock {
        dim,
        columns: first.columns.clone(),
        data,
    })
}

/// Full feature path for a view set: per view, sequence neighbors and
/// offsets in that view's rotated frame, gathered into sequence order; then
/// inverse-sorted and summed.
pub fn multiview_features(views: &ViewSet, k: usize, exec: Execution) -> Result<FeatureBlock> {
    let blocks = views
        .views()
        .iter()
        .map(|v| {
            let table = sequence_neighbors_with(&v.perm, k, exec)?;
            encode_nee_with(&v.cloud, &table, exec)?.gather(&v.perm)
        })
        .collect::<Result<Vec<_>>>()?;
    let perms: Vec<&Permutation> = views.permutations().collect();
    fuse_sequences(&perms, &blocks, exec)
}
