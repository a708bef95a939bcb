// SPDX-License-Identifier: Apache-2.0

use crate::exec::{self, Execution};
use crate::neighbors::NeighborTable;
use crate::{Error, PointCloud, Result};

/// Squared Euclidean distance. Every KNN path and metric goes through this
/// so distance ties resolve identically everywhere.
#[inline(always)]
pub fn sq_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[inline]
fn precedes(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Best `k` candidates by `(distance, index)`, kept sorted ascending.
pub(crate) struct TopK {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        TopK {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    /// Current admission bound; candidates must beat it.
    #[inline]
    pub(crate) fn worst(&self) -> Option<(f64, usize)> {
        if self.items.len() < self.k {
            None
        } else {
            self.items.last().copied()
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, d2: f64, j: usize) {
        let cand = (d2, j);
        if let Some(w) = self.worst() {
            if !precedes(cand, w) {
                return;
            }
        }
        let pos = self.items.partition_point(|&a| precedes(a, cand));
        self.items.insert(pos, cand);
        self.items.truncate(self.k);
    }

    pub(crate) fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().map(|&(_, j)| j)
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("neighbor count k must be at least 1"));
    }
    if n <= k {
        return Err(Error::invalid(format!(
            "exact KNN needs more than k = {k} points, cloud has {n}"
        )));
    }
    Ok(())
}

const CHUNK: usize = 256;

/// Exact `k` nearest neighbors of every point, self excluded, nearer first,
/// equal distances broken by lower index. O(n^2).
pub fn knn_bruteforce(cloud: &PointCloud, k: usize) -> Result<NeighborTable> {
    knn_bruteforce_with(cloud, k, Execution::default())
}

pub fn knn_bruteforce_with(cloud: &PointCloud, k: usize, exec: Execution) -> Result<NeighborTable> {
    let n = cloud.len();
    check_k(n, k)?;
    let (x, y, z) = (cloud.x(), cloud.y(), cloud.z());
    let mut data = vec![0usize; n * k];
    exec::for_each_row(exec, &mut data, k, |i, row| {
        let q = cloud.point(i);
        let mut top = TopK::new(k);
        let mut buf = [0.0f64; CHUNK];
        let mut bound = f64::INFINITY;
        let mut start = 0;
        while start < n {
            let len = CHUNK.min(n - start);
            let (cx, cy, cz) = (
                &x[start..start + len],
                &y[start..start + len],
                &z[start..start + len],
            );
            for t in 0..len {
                buf[t] = sq_dist(q, [cx[t], cy[t], cz[t]]);
            }
            // candidates arrive in ascending index, so an equal distance never displaces
            for (t, &d2) in buf[..len].iter().enumerate() {
                if d2 < bound && start + t != i {
                    top.push(d2, start + t);
                    if let Some(w) = top.worst() {
                        bound = w.0;
                    }
                }
            }
            start += len;
        }
        for (slot, j) in row.iter_mut().zip(top.indices()) {
            *slot = j;
        }
    });
    Ok(NeighborTable::from_flat_unchecked(k, data))
}

/// Uniform voxel grid for exact KNN queries by expanding shells of cells.
///
/// Produces the same table as [`knn_bruteforce`], ties included.
pub struct GridIndex<'a> {
    cloud: &'a PointCloud,
    origin: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    /// Start of each cell's run in `points`, plus a final end marker.
    starts: Vec<usize>,
    points: Vec<usize>,
}

impl<'a> GridIndex<'a> {
    /// Cell size targets a handful of points per occupied cell; the total
    /// cell count is capped near `4n`.
    pub fn build(cloud: &'a PointCloud) -> Result<Self> {
        let (lo, hi) = cloud
            .bounds()
            .ok_or_else(|| Error::invalid("cannot index an empty cloud"))?;
        let n = cloud.len();
        let ext: Vec<f64> = (0..3).map(|a| (hi[a] - lo[a]).max(1e-9)).collect();
        let max_ext = ext.iter().cloned().fold(0.0, f64::max);
        let volume: f64 = ext.iter().map(|e| e.max(max_ext * 1e-3)).product();
        let mut cell = (2.0 * volume / n as f64).cbrt().max(max_ext * 1e-4);
        let dims_for =
            |cell: f64| -> [usize; 3] { [0, 1, 2].map(|a| (ext[a] / cell).floor() as usize + 1) };
        let mut dims = dims_for(cell);
        while dims.iter().product::<usize>() > 4 * n + 64 {
            cell *= 1.25;
            dims = dims_for(cell);
        }

        let mut index = GridIndex {
            cloud,
            origin: lo,
            cell,
            dims,
            starts: Vec::new(),
            points: Vec::new(),
        };
        let n_cells = dims.iter().product::<usize>();
        let cell_of: Vec<usize> = (0..n)
            .map(|i| index.flat(index.coords(cloud.point(i))))
            .collect();
        let mut counts = vec![0usize; n_cells + 1];
        for &c in &cell_of {
            counts[c + 1] += 1;
        }
        for c in 0..n_cells {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut points = vec![0usize; n];
        for (i, &c) in cell_of.iter().enumerate() {
            points[fill[c]] = i;
            fill[c] += 1;
        }
        index.starts = counts;
        index.points = points;
        Ok(index)
    }

    #[inline]
    fn coords(&self, p: [f64; 3]) -> [usize; 3] {
        [0, 1, 2].map(|a| {
            let c = ((p[a] - self.origin[a]) / self.cell).floor();
            (c.max(0.0) as usize).min(self.dims[a] - 1)
        })
    }

    #[inline]
    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    fn scan_cell(&self, c: [usize; 3], q: [f64; 3], i: usize, top: &mut TopK) {
        let f = self.flat(c);
        for &j in &self.points[self.starts[f]..self.starts[f + 1]] {
            if j != i {
                top.push(sq_dist(q, self.cloud.point(j)), j);
            }
        }
    }

    fn query(&self, i: usize, k: usize) -> TopK {
        let q = self.cloud.point(i);
        let home = self.coords(q);
        let mut top = TopK::new(k);
        let max_ring = *self.dims.iter().max().unwrap();
        for ring in 0..=max_ring {
            let lo = home.map(|h| h as isize - ring as isize);
            let hi = home.map(|h| h as isize + ring as isize);
            for cz in lo[2].max(0)..=hi[2].min(self.dims[2] as isize - 1) {
                for cy in lo[1].max(0)..=hi[1].min(self.dims[1] as isize - 1) {
                    let z_edge = cz == lo[2] || cz == hi[2];
                    let y_edge = cy == lo[1] || cy == hi[1];
                    if z_edge || y_edge {
                        for cx in lo[0].max(0)..=hi[0].min(self.dims[0] as isize - 1) {
                            self.scan_cell([cx as usize, cy as usize, cz as usize], q, i, &mut top);
                        }
                    } else {
                        for cx in [lo[0], hi[0]] {
                            if cx >= 0 && cx < self.dims[0] as isize {
                                self.scan_cell(
                                    [cx as usize, cy as usize, cz as usize],
                                    q,
                                    i,
                                    &mut top,
                                );
                            }
                        }
                    }
                }
            }
            // Anything beyond this ring is at least ring * cell away.
            if let Some((d2, _)) = top.worst() {
                let reach = ring as f64 * self.cell * (1.0 - 1e-12);
                if d2 < reach * reach {
                    break;
                }
            }
        }
        top
    }

    pub fn knn(&self, k: usize) -> Result<NeighborTable> {
        self.knn_with(k, Execution::default())
    }

    pub fn knn_with(&self, k: usize, exec: Execution) -> Result<NeighborTable> {
        let n = self.cloud.len();
        check_k(n, k)?;
        let mut data = vec![0usize; n * k];
        exec::for_each_row(exec, &mut data, k, |i, row| {
            let top = self.query(i, k);
            for (slot, j) in row.iter_mut().zip(top.indices()) {
                *slot = j;
            }
        });
        Ok(NeighborTable::from_flat_unchecked(k, data))
    }
}
