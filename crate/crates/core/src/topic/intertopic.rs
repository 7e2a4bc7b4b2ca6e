//! Intertopic distance map: Jensen-Shannon divergences between topic-word
//! distributions, embedded in 2-D by classical multidimensional scaling.

use serde::{Deserialize, Serialize};

use crate::topic::TopicModel;

/// Jensen-Shannon divergence (natural log, bounded by ln 2).
pub fn jensen_shannon(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut div = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            div += 0.5 * a * (a / m).ln();
        }
        if b > 0.0 {
            div += 0.5 * b * (b / m).ln();
        }
    }
    div.max(0.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntertopicMap {
    /// 2-D coordinates, one point per topic.
    pub coords: Vec<[f64; 2]>,
    /// Per-topic corpus share, sums to 1; used for circle sizing.
    pub marginal: Vec<f64>,
    /// Pairwise Jensen-Shannon divergences.
    pub distance_matrix: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigendecomposition for small symmetric matrices.
/// Returns (eigenvalues, eigenvectors as columns), unsorted.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    (values, v)
}

/// Classical MDS: double-center the squared distance matrix, take the top
/// two eigenpairs. Coordinate signs are fixed deterministically.
fn classical_mds_2d(distances: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let n = distances.len();
    if n == 1 {
        return vec![[0.0, 0.0]];
    }
    let mut b = vec![vec![0.0; n]; n];
    let sq = |x: f64| x * x;
    let row_means: Vec<f64> = distances
        .iter()
        .map(|row| row.iter().map(|&d| sq(d)).sum::<f64>() / n as f64)
        .collect();
    let grand_mean = row_means.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            b[i][j] = -0.5 * (sq(distances[i][j]) - row_means[i] - row_means[j] + grand_mean);
        }
    }

    let (values, vectors) = jacobi_eigen(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());

    let mut coords = vec![[0.0; 2]; n];
    for (axis, &idx) in order.iter().take(2).enumerate() {
        let scale = values[idx].max(0.0).sqrt();
        let column: Vec<f64> = (0..n).map(|i| vectors[i][idx]).collect();
        // fix sign: largest-magnitude entry is positive
        let flip = column
            .iter()
            .cloned()
            .fold((0.0f64, 1.0f64), |(best, sign), x| {
                if x.abs() > best {
                    (x.abs(), x.signum())
                } else {
                    (best, sign)
                }
            })
            .1;
        for (i, &x) in column.iter().enumerate() {
            coords[i][axis] = flip * x * scale;
        }
    }
    coords
}

/// Builds the intertopic distance map for a fitted model.
pub fn intertopic_map(model: &TopicModel) -> IntertopicMap {
    let k = model.config.k;
    let mut distance_matrix = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = jensen_shannon(&model.phi[i], &model.phi[j]);
            distance_matrix[i][j] = d;
            distance_matrix[j][i] = d;
        }
    }
    let coords = classical_mds_2d(&distance_matrix);
    IntertopicMap {
        coords,
        marginal: model.topic_marginals(),
        distance_matrix,
    }
}

impl IntertopicMap {
    /// Relative stress of the embedding against the exact distances.
    pub fn relative_stress(&self) -> f64 {
        let n = self.coords.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dx = self.coords[i][0] - self.coords[j][0];
                let dy = self.coords[i][1] - self.coords[j][1];
                let embedded = (dx * dx + dy * dy).sqrt();
                let exact = self.distance_matrix[i][j];
                num += (embedded - exact) * (embedded - exact);
                den += exact * exact;
            }
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }
}
