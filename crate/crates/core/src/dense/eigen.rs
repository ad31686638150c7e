use super::DenseSymmetric;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius norm is below this fraction of
/// the matrix norm.
const STOP_RATIO: f64 = 1e-15;
/// Hard acceptance bound on the final off-diagonal norm.
const ACCEPT_RATIO: f64 = 1e-11;

/// Eigen-decomposition with ascending eigenvalues; `vectors[i]` belongs to
/// `values[i]` and the vectors are orthonormal.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl Eigh {
    /// `Σ_i f(λ_i) v_i v_iᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseSymmetric {
        self.reconstruct_with_index(|i| f(self.values[i]))
    }

    /// `Σ_i w(i) v_i v_iᵀ`, weighting by position in the sorted spectrum.
    pub fn reconstruct_with_index(&self, w: impl Fn(usize) -> f64) -> DenseSymmetric {
        let n = self.values.len();
        let mut out = vec![0.0; n * n];
        for (idx, v) in self.vectors.iter().enumerate() {
            let w = w(idx);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let wi = w * v[i];
                if wi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += wi * v[j];
                }
            }
        }
        let mut m = DenseSymmetric::from_raw(n, out);
        symmetrize(&mut m);
        m
    }
}

fn symmetrize(m: &mut DenseSymmetric) {
    let n = m.dim;
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.data[i * n + j] + m.data[j * n + i]);
            m.data[i * n + j] = avg;
            m.data[j * n + i] = avg;
        }
    }
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations with threshold skipping.
pub fn eigh(m: &DenseSymmetric) -> Result<Eigh> {
    m.check_symmetric(super::SYMMETRY_TOL * (1.0 + m.frobenius_norm()))?;
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = m.frobenius_norm();

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off = off_norm(&a, n);
        if off <= STOP_RATIO * norm || off == 0.0 {
            break;
        }
        // Early sweeps skip entries that are small relative to the average.
        let threshold = if sweeps < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
    }
    let off = off_norm(&a, n);
    if off > ACCEPT_RATIO * norm {
        return Err(Error::Degenerate(format!(
            "Jacobi did not converge: off-diagonal norm {off:e} after {sweeps} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok(Eigh { values, vectors })
}
