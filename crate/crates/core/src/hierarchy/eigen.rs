//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

/// Eigen-decomposition `A = Q diag(values) Qᵀ` with eigenvalues ascending and
/// eigenvectors stored as the columns of `vectors` (row-major `n × n`).
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymmetricEigen {
    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.iter().map(|row| row[k]).collect()
    }
}

const MAX_SWEEPS: usize = 100;

/// Decomposes the symmetric matrix `a`. Only symmetry up to rounding is
/// assumed; the strictly upper triangle drives the rotations.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> SymmetricEigen {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                if m[p][r].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                rotate(&mut m, &mut q, p, r);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x][x].total_cmp(&m[y][y]).then(x.cmp(&y)));
    let values = order.iter().map(|&k| m[k][k]).collect();
    let vectors = (0..n)
        .map(|i| order.iter().map(|&k| q[i][k]).collect())
        .collect();
    SymmetricEigen { values, vectors }
}

/// Zeroes `m[p][r]` with a Jacobi rotation, accumulating it into `q`.
fn rotate(m: &mut [Vec<f64>], q: &mut [Vec<f64>], p: usize, r: usize) {
    let n = m.len();
    let theta = (m[r][r] - m[p][p]) / (2.0 * m[p][r]);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let mkp = m[k][p];
        let mkr = m[k][r];
        m[k][p] = c * mkp - s * mkr;
        m[k][r] = s * mkp + c * mkr;
    }
    for k in 0..n {
        let mpk = m[p][k];
        let mrk = m[r][k];
        m[p][k] = c * mpk - s * mrk;
        m[r][k] = s * mpk + c * mrk;
    }
    for row in q.iter_mut() {
        let qp = row[p];
        let qr = row[r];
        row[p] = c * qp - s * qr;
        row[r] = s * qp + c * qr;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_sorted() {
        let a = vec![vec![3.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 2.0]];
        let e = symmetric_eigen(&a);
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        assert_eq!(e.vector(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let e = symmetric_eigen(&a);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let v = e.vector(1);
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((v[0] - v[1]).abs() < 1e-14);
    }
}
