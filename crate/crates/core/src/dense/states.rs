//! Density matrices, Helstrom error and the separable-ball measurement.

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use super::{eigh, DenseSymmetric, SubsystemShape, SYMMETRY_TOL};
use crate::error::{Error, Result};

/// Eigenvalue floor and trace tolerance for accepting a state.
pub const STATE_TOL: f64 = 1e-9;
/// Eigenvalues above this count as support.
pub const SUPPORT_TOL: f64 = 1e-9;

/// `GGᵀ / Tr(GGᵀ)` for a `dim × rank` matrix of standard normals.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DenseSymmetric> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!("rank {rank} invalid for dimension {dim}")));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let g: Vec<f64> = (0..dim * rank).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = (0..rank).map(|c| g[i * rank + c] * g[j * rank + c]).sum();
            out[i * dim + j] = v;
            out[j * dim + i] = v;
        }
    }
    let tr: f64 = (0..dim).map(|i| out[i * dim + i]).sum();
    out.iter_mut().for_each(|v| *v /= tr);
    Ok(DenseSymmetric::from_raw(dim, out))
}

/// Two random states of dimension `dim` with ranks drawn uniformly from
/// `1..=dim`; sample `index` of the stream started at `seed`.
pub fn random_state_pair(dim: usize, seed: u64, index: u64) -> Result<(DenseSymmetric, DenseSymmetric)> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    for _ in 0..index {
        rng.long_jump();
    }
    let r1 = rng.random_range(1..=dim.max(1));
    let r2 = rng.random_range(1..=dim.max(1));
    let (s1, s2) = (rng.next_u64(), rng.next_u64());
    Ok((random_state(dim, r1, s1)?, random_state(dim, r2, s2)?))
}

/// PSD within `-STATE_TOL` and unit trace within `STATE_TOL`.
pub fn validate_state(rho: &DenseSymmetric) -> Result<()> {
    rho.check_symmetric(SYMMETRY_TOL)?;
    let tr = rho.trace();
    if (tr - 1.0).abs() > STATE_TOL {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    let e = eigh(rho)?;
    if let Some(&min) = e.values.first() {
        if min < -STATE_TOL {
            return Err(Error::NotAState(format!("eigenvalue {min:e}")));
        }
    }
    Ok(())
}

pub fn trace_norm(a: &DenseSymmetric) -> Result<f64> {
    Ok(eigh(a)?.values.iter().map(|v| v.abs()).sum())
}

fn check_pair(rho1: &DenseSymmetric, rho2: &DenseSymmetric, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidPrior(p.to_string()));
    }
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            got: rho2.dim(),
        });
    }
    validate_state(rho1)?;
    validate_state(rho2)
}

/// `½ − ½‖pρ1 − (1−p)ρ2‖_1`.
pub fn helstrom(rho1: &DenseSymmetric, rho2: &DenseSymmetric, p: f64) -> Result<f64> {
    check_pair(rho1, rho2, p)?;
    let diff = rho1.combine(p, rho2, -(1.0 - p))?;
    Ok(0.5 - 0.5 * trace_norm(&diff)?)
}

/// `p·Tr(E1ρ1) + (1−p)·Tr((1−E1)ρ2)`; `E1` is the "guess ρ2" element.
pub fn povm_error(rho1: &DenseSymmetric, rho2: &DenseSymmetric, p: f64, e1: &DenseSymmetric) -> Result<f64> {
    if e1.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            got: e1.dim(),
        });
    }
    let e = eigh(e1)?;
    let (lo, hi) = (e.values[0], e.values[e.values.len() - 1]);
    if lo < -STATE_TOL || hi > 1.0 + STATE_TOL {
        return Err(Error::NotAnEffect(format!("spectrum [{lo:e}, {hi}]")));
    }
    let a = e1.inner(rho1)?;
    let b = rho2.trace() - e1.inner(rho2)?;
    Ok(p * a + (1.0 - p) * b)
}

#[derive(Debug, Clone)]
pub struct SeparableBallPovm {
    /// `½(1 + M/‖M‖_2)`, decides for ρ2.
    pub guess_second: DenseSymmetric,
    /// `½(1 − M/‖M‖_2)`, decides for ρ1.
    pub guess_first: DenseSymmetric,
    pub error: f64,
    /// `1 − 2·error`.
    pub bias: f64,
    /// `‖(1−p)ρ2 − pρ1‖_1`, the unrestricted bias.
    pub bias_all: f64,
    /// `‖M‖_2`, the square root of the support rank.
    pub m_norm: f64,
    pub rank: usize,
    /// No designated part: the trivial POVM `{½1, ½1}` was returned.
    pub degenerate: bool,
}

/// The measurement built from the identity-centred ball of separable
/// operators. `M` projects onto the positive part of `(1−p)ρ2 − pρ1` when
/// `p ≤ ½` and is minus the projector onto its negative part otherwise.
pub fn separable_ball_povm(rho1: &DenseSymmetric, rho2: &DenseSymmetric, p: f64) -> Result<SeparableBallPovm> {
    check_pair(rho1, rho2, p)?;
    let dim = rho1.dim();
    let delta = rho2.combine(1.0 - p, rho1, -p)?;
    let e = eigh(&delta)?;
    let bias_all: f64 = e.values.iter().map(|v| v.abs()).sum();
    let positive = p <= 0.5;
    let in_support = |v: f64| if positive { v > SUPPORT_TOL } else { v < -SUPPORT_TOL };
    let rank = e.values.iter().filter(|&&v| in_support(v)).count();
    let id = DenseSymmetric::identity(dim);

    if rank == 0 {
        let half = id.scaled(0.5);
        return Ok(SeparableBallPovm {
            guess_second: half.clone(),
            guess_first: half,
            error: 0.5,
            bias: 0.0,
            bias_all,
            m_norm: 0.0,
            rank,
            degenerate: true,
        });
    }

    let sign = if positive { 1.0 } else { -1.0 };
    let m = e.reconstruct_with(|v| if in_support(v) { sign } else { 0.0 });
    let m_norm = (rank as f64).sqrt();
    let guess_second = id.combine(0.5, &m, 0.5 / m_norm)?;
    let guess_first = id.combine(0.5, &m, -0.5 / m_norm)?;
    let error = povm_error(rho1, rho2, p, &guess_second)?;
    let closed = 0.5 * (1.0 - ((1.0 - 2.0 * p).abs() + bias_all) / (2.0 * m_norm));
    if (error - closed).abs() > 1e-9 {
        return Err(Error::CheckFailed(format!(
            "separable-ball error {error} disagrees with closed form {closed}"
        )));
    }
    Ok(SeparableBallPovm {
        guess_second,
        guess_first,
        error,
        bias: 1.0 - 2.0 * error,
        bias_all,
        m_norm,
        rank,
        degenerate: false,
    })
}

/// Density-matrix file: `{dim, shape, entries}` with row-major entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub entries: Vec<f64>,
}

impl StateFile {
    pub fn from_state(rho: &DenseSymmetric, shape: &SubsystemShape) -> Self {
        Self {
            dim: rho.dim(),
            shape: shape.dims().to_vec(),
            entries: rho.as_slice().to_vec(),
        }
    }

    /// Checks the shape product, symmetry, positivity and trace.
    pub fn into_state(self) -> Result<(DenseSymmetric, SubsystemShape)> {
        let shape = SubsystemShape::new(self.shape)?;
        if shape.total() != self.dim {
            return Err(Error::ShapeMismatch {
                shape: shape.dims().to_vec(),
                dim: self.dim,
            });
        }
        let rho = DenseSymmetric::new(self.dim, self.entries)?;
        validate_state(&rho)?;
        Ok((rho, shape))
    }
}

pub fn load_state_json(text: &str) -> Result<(DenseSymmetric, SubsystemShape)> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("state file: {e}")))?;
    file.into_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{alpha_state, build_projectors, computational_g, sigma_state, tensor_power, twirled_m};
    use proptest::prelude::*;

    #[test]
    fn random_state_contract() {
        assert_eq!(random_state(1, 1, 5).unwrap().as_slice(), &[1.0]);
        assert_eq!(random_state(6, 3, 9).unwrap(), random_state(6, 3, 9).unwrap());
        assert_ne!(random_state(6, 3, 9).unwrap(), random_state(6, 3, 10).unwrap());
        assert!(random_state(3, 4, 0).is_err());
        assert!(random_state(3, 0, 0).is_err());
        for seed in 0..10 {
            let r = random_state(9, 1 + (seed as usize % 9), seed).unwrap();
            let e = eigh(&r).unwrap();
            assert!(e.values[0] >= -1e-12);
            assert!((r.trace() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn validation_rejects_non_states() {
        let bad_trace = DenseSymmetric::diagonal(&[0.5, 0.4]);
        assert!(matches!(validate_state(&bad_trace), Err(Error::NotAState(_))));
        let negative = DenseSymmetric::diagonal(&[1.1, -0.1]);
        assert!(matches!(validate_state(&negative), Err(Error::NotAState(_))));
        assert!(validate_state(&DenseSymmetric::diagonal(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn trace_norm_examples() {
        let p = build_projectors(3).unwrap();
        assert!((trace_norm(&p.anti).unwrap() - 3.0).abs() < 1e-12);
        let sigma = sigma_state(2).unwrap();
        let alpha = alpha_state(2).unwrap();
        let half = alpha.combine(0.5, &sigma, -0.5).unwrap();
        assert!((trace_norm(&half).unwrap() - 1.0).abs() < 1e-12);
        let mix = sigma.combine(1.0 / 3.0, &alpha, -2.0 / 3.0).unwrap();
        assert!((trace_norm(&mix).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn helstrom_examples() {
        for d in [2, 3, 4] {
            let s = sigma_state(d).unwrap();
            let a = alpha_state(d).unwrap();
            for p in [0.1, 0.5, 0.8] {
                assert!(helstrom(&s, &a, p).unwrap().abs() < 1e-12);
            }
        }
        let r = random_state(5, 2, 3).unwrap();
        assert!((helstrom(&r, &r, 0.3).unwrap() - 0.3).abs() < 1e-12);
        assert!((helstrom(&r, &r, 0.7).unwrap() - 0.3).abs() < 1e-12);
        assert!(helstrom(&r, &r, 1.0).is_err());
    }

    #[test]
    fn helstrom_matches_projective_search() {
        // Every projector onto a subset of the eigenbasis of ρ1 − ρ2; the best
        // one is optimal at p = 1/2.
        for seed in 0..10 {
            let r1 = random_state(4, 4, 100 + seed).unwrap();
            let r2 = random_state(4, 2, 200 + seed).unwrap();
            let e = eigh(&r1.combine(1.0, &r2, -1.0).unwrap()).unwrap();
            let mut best = f64::INFINITY;
            for mask in 0u32..16 {
                let proj = e.reconstruct_with_index(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.0 });
                let err = povm_error(&r1, &r2, 0.5, &proj).unwrap();
                best = best.min(err);
            }
            assert!((best - helstrom(&r1, &r2, 0.5).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn povm_error_examples() {
        let s = sigma_state(2).unwrap();
        let a = alpha_state(2).unwrap();
        let zero = DenseSymmetric::zeros(4);
        assert!((povm_error(&s, &a, 0.3, &zero).unwrap() - 0.7).abs() < 1e-15);

        let s2 = tensor_power(&s, 2).unwrap();
        let a2 = tensor_power(&a, 2).unwrap();
        let m2 = tensor_power(&twirled_m(2).unwrap(), 2).unwrap();
        assert!((povm_error(&s2, &a2, 0.5, &m2).unwrap() - 1.0 / 18.0).abs() < 1e-12);

        let g = computational_g(2).unwrap();
        assert!((povm_error(&s, &a, 0.5, &g).unwrap() - 1.0 / 6.0).abs() < 1e-12);

        let too_big = DenseSymmetric::identity(4).scaled(1.1);
        assert!(matches!(povm_error(&s, &a, 0.5, &too_big), Err(Error::NotAnEffect(_))));
    }

    #[test]
    fn twirl_equivalence_tensor_powers() {
        for d in [2, 3] {
            for n in [1, 2] {
                let s = tensor_power(&sigma_state(d).unwrap(), n).unwrap();
                let a = tensor_power(&alpha_state(d).unwrap(), n).unwrap();
                let g = tensor_power(&computational_g(d).unwrap(), n).unwrap();
                let m = tensor_power(&twirled_m(d).unwrap(), n).unwrap();
                for p in [0.25, 0.5] {
                    let eg = povm_error(&s, &a, p, &g).unwrap();
                    let em = povm_error(&s, &a, p, &m).unwrap();
                    assert!((eg - em).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn separable_ball_werner_pair() {
        let s = sigma_state(2).unwrap();
        let a = alpha_state(2).unwrap();
        let r = separable_ball_povm(&s, &a, 0.5).unwrap();
        let p = build_projectors(2).unwrap();
        let m = r.guess_second.combine(2.0, &DenseSymmetric::identity(4), -1.0).unwrap();
        assert!(m.max_abs_diff(&p.anti).unwrap() < 1e-12);
        assert!((r.m_norm - 1.0).abs() < 1e-15);
        assert!((r.error - 0.25).abs() < 1e-12);
        assert!((r.bias - 0.5).abs() < 1e-12);
        assert!(!r.degenerate);
    }

    #[test]
    fn separable_ball_identical_states() {
        for rank in 1..=4 {
            let rho = random_state(4, rank, rank as u64).unwrap();
            let r = separable_ball_povm(&rho, &rho, 1.0 / 3.0).unwrap();
            let expect = 0.5 * (1.0 - (1.0 / 3.0) / (rank as f64).sqrt());
            assert!((r.error - expect).abs() < 1e-9);
            assert_eq!(r.rank, rank);
            let deg = separable_ball_povm(&rho, &rho, 0.5).unwrap();
            assert!(deg.degenerate);
            assert_eq!(deg.error, 0.5);
        }
    }

    #[test]
    fn separable_ball_large_prior_uses_negative_part() {
        let r1 = random_state(4, 2, 1).unwrap();
        let r2 = random_state(4, 3, 2).unwrap();
        let r = separable_ball_povm(&r1, &r2, 0.75).unwrap();
        let sum = r.guess_first.combine(1.0, &r.guess_second, 1.0).unwrap();
        assert!(sum.max_abs_diff(&DenseSymmetric::identity(4)).unwrap() < 1e-12);
        assert!(r.error >= helstrom(&r1, &r2, 0.75).unwrap() - 1e-9);
    }

    #[test]
    fn state_file_round_trip() {
        let rho = random_state(4, 2, 77).unwrap();
        let file = StateFile::from_state(&rho, &SubsystemShape::copies(2, 1));
        let text = serde_json::to_string(&file).unwrap();
        let (back, shape) = load_state_json(&text).unwrap();
        assert_eq!(back, rho);
        assert_eq!(shape.dims(), &[2, 2]);

        let bad = r#"{"dim": 2, "shape": [3], "entries": [1, 0, 0, 0]}"#;
        assert!(matches!(load_state_json(bad), Err(Error::ShapeMismatch { .. })));
        let asym = r#"{"dim": 2, "shape": [2], "entries": [0.5, 0.1, 0.0, 0.5]}"#;
        assert!(matches!(load_state_json(asym), Err(Error::NotSymmetric { .. })));
        assert!(load_state_json("{").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn bias_chain(seed in any::<u64>(), dsel in 0usize..3, p in prop::sample::select(vec![0.25, 0.5])) {
            let dim = [4, 9, 16][dsel];
            let r1 = random_state(dim, 1 + (seed % dim as u64) as usize, seed).unwrap();
            let r2 = random_state(dim, dim, seed.wrapping_add(1)).unwrap();
            let ball = separable_ball_povm(&r1, &r2, p).unwrap();
            let h = helstrom(&r1, &r2, p).unwrap();
            prop_assert!(ball.bias >= ball.bias_all / (2.0 * (dim as f64).sqrt()) - 1e-9);
            prop_assert!(ball.error >= h - 1e-9);
            prop_assert!((ball.bias_all - (1.0 - 2.0 * h)).abs() < 1e-9);
        }
    }
}
