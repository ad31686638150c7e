//! Extremal Werner states and the closed-form quantities of the one-way
//! LOCC protocol.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, ExactScalar};

/// A discrimination problem: `n` copies of either the symmetric Werner state
/// (prior `p`) or the antisymmetric one (prior `1 - p`) on `C^d ⊗ C^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub d: u32,
    pub n: u32,
    #[serde(with = "rational::serde_str")]
    pub p: ExactScalar,
}

impl Instance {
    pub fn new(d: u32, n: u32, p: ExactScalar) -> Result<Self> {
        check_dimension(d)?;
        if n < 1 {
            return Err(Error::InvalidCopies(n));
        }
        if !p.is_positive() || p >= ExactScalar::one() {
            return Err(Error::InvalidPrior(rational::render(&p)));
        }
        Ok(Self { d, n, p })
    }

    /// `(d-1)/(d+1)`, the per-copy probability that the symmetric state
    /// yields unequal outcomes.
    pub fn ratio(&self) -> ExactScalar {
        werner_ratio(self.d)
    }

    /// `((d-1)/(d+1))^n`.
    pub fn ratio_pow(&self) -> ExactScalar {
        rational::pow(&self.ratio(), self.n)
    }

    /// `(1-p)/p`.
    pub fn odds(&self) -> ExactScalar {
        (ExactScalar::one() - &self.p) / &self.p
    }

    pub fn branch(&self) -> Branch {
        let protocol = &self.p * self.ratio_pow();
        let guess = ExactScalar::one() - &self.p;
        match protocol.cmp(&guess) {
            std::cmp::Ordering::Less => Branch::Protocol,
            std::cmp::Ordering::Equal => Branch::Tie,
            std::cmp::Ordering::Greater => Branch::Guess,
        }
    }
}

pub(crate) fn check_dimension(d: u32) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

pub(crate) fn werner_ratio(d: u32) -> ExactScalar {
    rational::ratio(d as i64 - 1, d as i64 + 1)
}

/// Which side of `min(p r^n, 1-p)` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Measure every copy; `p r^n < 1 - p`.
    Protocol,
    /// Both strategies give the same error. The measurement protocol is used.
    Tie,
    /// Always guess the symmetric state; `p r^n > 1 - p`.
    Guess,
}

impl Branch {
    pub fn measures(self) -> bool {
        !matches!(self, Branch::Guess)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WernerRole {
    Symmetric,
    Antisymmetric,
}

/// Describes `σ_d` or `α_d` without materialising a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WernerDescriptor {
    pub d: u32,
    pub role: WernerRole,
}

impl WernerDescriptor {
    pub fn new(d: u32, role: WernerRole) -> Result<Self> {
        check_dimension(d)?;
        Ok(Self { d, role })
    }

    pub fn sym_dim(&self) -> u64 {
        let d = self.d as u64;
        d * (d + 1) / 2
    }

    pub fn anti_dim(&self) -> u64 {
        let d = self.d as u64;
        d * (d - 1) / 2
    }

    /// Rank of the normalised projector.
    pub fn rank(&self) -> u64 {
        match self.role {
            WernerRole::Symmetric => self.sym_dim(),
            WernerRole::Antisymmetric => self.anti_dim(),
        }
    }

    /// Uniform eigenvalue on the support.
    pub fn weight(&self) -> ExactScalar {
        rational::ratio(1, self.rank() as i64)
    }
}

/// Outcome statistics of the single-copy POVM `{M_d, 1 - M_d}` on both states.
/// Entry 1 is the "unequal outcomes" event, entry 2 "equal outcomes".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    #[serde(with = "rational::serde_vec")]
    pub symmetric: Vec<ExactScalar>,
    #[serde(with = "rational::serde_vec")]
    pub antisymmetric: Vec<ExactScalar>,
}

impl OutcomeDistribution {
    pub fn symmetric_f64(&self) -> [f64; 2] {
        [rational::to_f64(&self.symmetric[0]), rational::to_f64(&self.symmetric[1])]
    }

    pub fn antisymmetric_f64(&self) -> [f64; 2] {
        [
            rational::to_f64(&self.antisymmetric[0]),
            rational::to_f64(&self.antisymmetric[1]),
        ]
    }
}

/// Coefficients of `M_d` on `(Π_s, Π_a)`: `((d-1)/(d+1), 1)`.
pub fn single_copy_povm_coeffs(d: u32) -> Result<(ExactScalar, ExactScalar)> {
    check_dimension(d)?;
    Ok((werner_ratio(d), ExactScalar::one()))
}

/// Coefficients of the complementary element `1 - M_d`: `(2/(d+1), 0)`.
pub fn single_copy_complement_coeffs(d: u32) -> Result<(ExactScalar, ExactScalar)> {
    check_dimension(d)?;
    Ok((rational::ratio(2, d as i64 + 1), ExactScalar::zero()))
}

pub fn outcome_distributions(d: u32) -> Result<OutcomeDistribution> {
    let (ms, ma) = single_copy_povm_coeffs(d)?;
    let (cs, ca) = single_copy_complement_coeffs(d)?;
    // σ_d and α_d are normalised projectors, so Tr(M ρ) is the block coefficient.
    Ok(OutcomeDistribution {
        symmetric: vec![ms, cs],
        antisymmetric: vec![ma, ca],
    })
}

/// `min(p ((d-1)/(d+1))^n, 1 - p)`.
pub fn perr_closed_form(inst: &Instance) -> ExactScalar {
    rational::min(&inst.p * inst.ratio_pow(), ExactScalar::one() - &inst.p)
}

/// Error of the symmetric POVM `{Σ x_k A_k, Σ (1-x_k) A_k}`, where the first
/// element means "guess antisymmetric".
pub fn povm_error_symmetric(x: &[ExactScalar], inst: &Instance) -> Result<ExactScalar> {
    let len = inst.n as usize + 1;
    if x.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: x.len(),
        });
    }
    let one = ExactScalar::one();
    let q = &one - &inst.p;
    Ok(&q + &inst.p * (&x[0] - inst.odds() * &x[len - 1]))
}

/// `x_k = ((d-1)/(d+1))^{n-k}`: the expansion of `M_d^{⊗n}` over the `A_k`.
pub fn protocol_coefficients(d: u32, n: u32) -> Result<Vec<ExactScalar>> {
    check_dimension(d)?;
    let r = werner_ratio(d);
    Ok((0..=n).map(|k| rational::pow(&r, n - k)).collect())
}
