//! Explicit operators on `(C^d ⊗ C^d)^{⊗n}`: flip, Werner projectors, the
//! maximally entangled projector, tensor words and partial transposition.

use super::{DenseSymmetric, SubsystemShape};
use crate::error::{Error, Result};

/// Largest total dimension the oracle will materialise.
pub const DENSE_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct WernerProjectors {
    pub d: usize,
    /// `F|ij> = |ji>`
    pub flip: DenseSymmetric,
    /// `(1 + F)/2`
    pub sym: DenseSymmetric,
    /// `(1 - F)/2`
    pub anti: DenseSymmetric,
    /// `(1/d) Σ_{ij} |ii><jj|`
    pub phi: DenseSymmetric,
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d as u32))
    } else {
        Ok(())
    }
}

pub fn build_projectors(d: usize) -> Result<WernerProjectors> {
    check_d(d)?;
    let dim = d * d;
    let mut flip = vec![0.0; dim * dim];
    let mut phi = vec![0.0; dim * dim];
    for i in 0..d {
        for j in 0..d {
            flip[(i * d + j) * dim + (j * d + i)] = 1.0;
            phi[(i * d + i) * dim + (j * d + j)] = 1.0 / d as f64;
        }
    }
    let flip = DenseSymmetric::from_raw(dim, flip);
    let id = DenseSymmetric::identity(dim);
    let sym = id.combine(0.5, &flip, 0.5)?;
    let anti = id.combine(0.5, &flip, -0.5)?;
    Ok(WernerProjectors {
        d,
        flip,
        sym,
        anti,
        phi: DenseSymmetric::from_raw(dim, phi),
    })
}

/// `σ_d = Π_s / (d(d+1)/2)`.
pub fn sigma_state(d: usize) -> Result<DenseSymmetric> {
    let p = build_projectors(d)?;
    Ok(p.sym.scaled(2.0 / (d * (d + 1)) as f64))
}

/// `α_d = Π_a / (d(d-1)/2)`.
pub fn alpha_state(d: usize) -> Result<DenseSymmetric> {
    let p = build_projectors(d)?;
    Ok(p.anti.scaled(2.0 / (d * (d - 1)) as f64))
}

/// `G_d = Σ_{i≠j} |ij><ij|`: both parties measure in the computational basis
/// and see different outcomes.
pub fn computational_g(d: usize) -> Result<DenseSymmetric> {
    check_d(d)?;
    let diag: Vec<f64> = (0..d * d).map(|ij| if ij / d != ij % d { 1.0 } else { 0.0 }).collect();
    Ok(DenseSymmetric::diagonal(&diag))
}

/// `M_d = ((d-1)/(d+1)) Π_s + Π_a`, built from the dense projectors.
pub fn twirled_m(d: usize) -> Result<DenseSymmetric> {
    let p = build_projectors(d)?;
    p.sym.combine((d as f64 - 1.0) / (d as f64 + 1.0), &p.anti, 1.0)
}

/// Projection onto `span{Π_s, Π_a}`: `(Tr(XΠ_s)/Tr Π_s, Tr(XΠ_a)/Tr Π_a)`.
pub fn twirl_coefficients(x: &DenseSymmetric, d: usize) -> Result<(f64, f64)> {
    let p = build_projectors(d)?;
    let s = x.inner(&p.sym)? / p.sym.trace();
    let a = x.inner(&p.anti)? / p.anti.trace();
    Ok((s, a))
}

pub fn tensor_power(x: &DenseSymmetric, n: usize) -> Result<DenseSymmetric> {
    let dim = x.dim().checked_pow(n as u32).unwrap_or(usize::MAX);
    if dim > DENSE_CAP {
        return Err(Error::SizeCap { dim, cap: DENSE_CAP });
    }
    let mut acc = DenseSymmetric::identity(1);
    for _ in 0..n {
        acc = acc.kron(x);
    }
    Ok(acc)
}

/// Transposes the designated tensor factors:
/// `(|i><k| ⊗ |j><l|)^Γ = |i><k| ⊗ |l><j|` on each chosen factor.
pub fn partial_transpose(x: &DenseSymmetric, shape: &SubsystemShape, which: &[usize]) -> Result<DenseSymmetric> {
    let dim = x.dim();
    if shape.total() != dim {
        return Err(Error::ShapeMismatch {
            shape: shape.dims().to_vec(),
            dim,
        });
    }
    if let Some(&f) = which.iter().find(|&&f| f >= shape.dims().len()) {
        return Err(Error::IndexOutOfRange {
            index: f,
            max: shape.dims().len() - 1,
        });
    }
    let strides = shape.strides();
    let factors: Vec<(usize, usize)> = which.iter().map(|&f| (strides[f], shape.dims()[f])).collect();
    let src = x.as_slice();
    let mut out = vec![0.0; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let v = src[r * dim + c];
            if v == 0.0 {
                continue;
            }
            let (mut r2, mut c2) = (r, c);
            for &(s, d) in &factors {
                let rf = (r / s) % d;
                let cf = (c / s) % d;
                r2 = r2 + cf * s - rf * s;
                c2 = c2 + rf * s - cf * s;
            }
            out[r2 * dim + c2] = v;
        }
    }
    Ok(DenseSymmetric::from_raw(dim, out))
}

fn check_cap(d: usize, n: usize) -> Result<usize> {
    check_d(d)?;
    if n < 1 {
        return Err(Error::InvalidCopies(n as u32));
    }
    let dim = (d * d).checked_pow(n as u32).unwrap_or(usize::MAX);
    if dim > DENSE_CAP {
        return Err(Error::SizeCap { dim, cap: DENSE_CAP });
    }
    Ok(dim)
}

/// Sum of all `n`-fold words over `{zero, one}` with exactly `count` copies
/// of `one`, enumerated by bitmask.
fn word_sum(zero: &DenseSymmetric, one: &DenseSymmetric, n: usize, count: usize) -> DenseSymmetric {
    let mut acc: Option<DenseSymmetric> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != count {
            continue;
        }
        let factor = |pos: usize| if mask >> (n - 1 - pos) & 1 == 1 { one } else { zero };
        let mut word = factor(0).clone();
        for pos in 1..n {
            word = word.kron(factor(pos));
        }
        match acc.as_mut() {
            Some(a) => a.add_scaled(1.0, &word).expect("same dimension"),
            None => acc = Some(word),
        }
    }
    acc.expect("0 <= count <= n")
}

/// `A_k`: sum of the `{Π_s, Π_a}^{⊗n}` words with `k` antisymmetric factors.
pub fn build_ak(d: usize, n: usize, k: usize) -> Result<DenseSymmetric> {
    check_cap(d, n)?;
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    let p = build_projectors(d)?;
    Ok(word_sum(&p.sym, &p.anti, n, k))
}

/// `T_l`: sum of the `{1 - Φ_d, Φ_d}^{⊗n}` words with `l` copies of `Φ_d`.
pub fn build_tl(d: usize, n: usize, l: usize) -> Result<DenseSymmetric> {
    check_cap(d, n)?;
    if l > n {
        return Err(Error::IndexOutOfRange { index: l, max: n });
    }
    let p = build_projectors(d)?;
    Ok(word_sum(&phi_complement(&p), &p.phi, n, l))
}

fn phi_complement(p: &WernerProjectors) -> DenseSymmetric {
    DenseSymmetric::identity(p.d * p.d)
        .combine(1.0, &p.phi, -1.0)
        .expect("same dimension")
}

/// Coefficients of `A_k^Γ` in the orthogonal `T_l` system, obtained from the
/// explicit matrices: `coeffs[k][l] = Tr(T_l A_k^Γ) / Tr(T_l²)`.
#[derive(Debug, Clone)]
pub struct PtExpansion {
    pub d: usize,
    pub n: usize,
    pub coeffs: Vec<Vec<f64>>,
    /// `‖A_k^Γ - Σ_l coeffs[k][l] T_l‖_F` per `k`.
    pub residuals: Vec<f64>,
    /// `Tr A_k` from the dense matrices.
    pub ak_traces: Vec<f64>,
    /// `max |Σ_k A_k - 1|`.
    pub resolution_error: f64,
    /// `max_{l≠l'} |Tr(T_l T_l')|`.
    pub tl_overlap: f64,
}

pub fn pt_expansion(d: usize, n: usize) -> Result<PtExpansion> {
    let dim = check_cap(d, n)?;
    let shape = SubsystemShape::copies(d, n);
    let second = shape.second_parties();

    let p = build_projectors(d)?;
    let comp = phi_complement(&p);
    let tls: Vec<DenseSymmetric> = (0..=n).map(|l| word_sum(&comp, &p.phi, n, l)).collect();
    let tl_norms: Vec<f64> = tls.iter().map(|t| t.inner(t)).collect::<Result<_>>()?;
    let mut tl_overlap: f64 = 0.0;
    for a in 0..=n {
        for b in (a + 1)..=n {
            tl_overlap = tl_overlap.max(tls[a].inner(&tls[b])?.abs());
        }
    }

    let mut resolution = DenseSymmetric::identity(dim).scaled(-1.0);
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut residuals = Vec::with_capacity(n + 1);
    let mut ak_traces = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let ak = word_sum(&p.sym, &p.anti, n, k);
        resolution.add_scaled(1.0, &ak)?;
        ak_traces.push(ak.trace());
        let akg = partial_transpose(&ak, &shape, &second)?;
        drop(ak);
        let row: Vec<f64> = tls
            .iter()
            .zip(&tl_norms)
            .map(|(t, nt)| Ok(t.inner(&akg)? / nt))
            .collect::<Result<_>>()?;
        let mut rem = akg;
        for (c, t) in row.iter().zip(&tls) {
            rem.add_scaled(-c, t)?;
        }
        residuals.push(rem.frobenius_norm());
        coeffs.push(row);
    }
    let resolution_error = resolution.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(PtExpansion {
        d,
        n,
        coeffs,
        residuals,
        ak_traces,
        resolution_error,
        tl_overlap,
    })
}
