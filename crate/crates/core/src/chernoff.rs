//! Chernoff distances: classical, unrestricted quantum, and the Werner
//! closed form.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::dense::{eigh, validate_state, DenseSymmetric};
use crate::error::{Error, Result};
use crate::rational::{self, ExactScalar};
use crate::werner::{self, check_dimension, Branch, Instance};

/// Golden-section stopping width on `s`.
pub const S_TOL: f64 = 1e-12;
/// Tolerance on the sum of a floating-point probability vector.
pub const SUM_TOL: f64 = 1e-12;
/// Eigenvalues above this count as support in the quantum case.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Eigenvector overlaps at or below this are treated as zero.
pub const OVERLAP_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChernoffResult {
    /// Base-2 value; `+inf` for disjoint supports.
    #[serde(serialize_with = "extended")]
    pub value_bits: f64,
    #[serde(serialize_with = "extended")]
    pub value_nats: f64,
    /// Minimiser, absent when the value is infinite.
    pub s_star: Option<f64>,
    pub evaluations: usize,
}

impl ChernoffResult {
    pub fn is_infinite(&self) -> bool {
        self.value_bits.is_infinite()
    }

    fn infinite() -> Self {
        Self {
            value_bits: f64::INFINITY,
            value_nats: f64::INFINITY,
            s_star: None,
            evaluations: 0,
        }
    }

    fn identical() -> Self {
        Self {
            value_bits: 0.0,
            value_nats: 0.0,
            s_star: Some(0.5),
            evaluations: 0,
        }
    }

    fn from_min(f_min: f64, s_star: f64, evaluations: usize) -> Self {
        let nats = (-f_min.ln()).max(0.0);
        Self {
            value_bits: nats / std::f64::consts::LN_2,
            value_nats: nats,
            s_star: Some(s_star),
            evaluations,
        }
    }
}

/// Writes non-finite values as the string `"inf"`.
pub fn extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// Minimises a convex `f` on `[0, 1]`, endpoints included.
fn minimize_unit(f: impl Fn(f64) -> f64) -> (f64, f64, usize) {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evals = 2;
    while b - a > S_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    let mid = 0.5 * (a + b);
    let mut best = (f(mid), mid);
    for s in [0.0, 1.0] {
        let v = f(s);
        if v < best.0 {
            best = (v, s);
        }
    }
    (best.0, best.1, evals + 3)
}

fn check_distribution(v: &[f64], name: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::NotADistribution(format!("{name} is empty")));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::NotADistribution(format!("{name} has entry {x}")));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::NotADistribution(format!("{name} sums to {sum}")));
    }
    Ok(())
}

/// `-min_s log Σ p_i^{1-s} q_i^s` over the joint support, which also gives
/// the one-sided limits at `s = 0` and `s = 1`.
pub fn classical_chernoff(p: &[f64], q: &[f64]) -> Result<ChernoffResult> {
    check_distribution(p, "P")?;
    check_distribution(q, "Q")?;
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    if p == q {
        return Ok(ChernoffResult::identical());
    }
    let terms: Vec<(f64, f64)> = p
        .iter()
        .zip(q)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (*a, *b))
        .collect();
    if terms.is_empty() {
        return Ok(ChernoffResult::infinite());
    }
    let f = |s: f64| terms.iter().map(|(a, b)| a.powf(1.0 - s) * b.powf(s)).sum::<f64>();
    let (f_min, s_star, evals) = minimize_unit(f);
    Ok(ChernoffResult::from_min(f_min, s_star, evals))
}

pub fn classical_chernoff_exact(p: &[ExactScalar], q: &[ExactScalar]) -> Result<ChernoffResult> {
    let sum = |v: &[ExactScalar]| v.iter().fold(rational::int(0), |a, b| a + b);
    for (v, name) in [(p, "P"), (q, "Q")] {
        if sum(v) != rational::int(1) || v.iter().any(|x| *x < rational::int(0)) {
            return Err(Error::NotADistribution(format!("{name} is not an exact distribution")));
        }
    }
    if p == q {
        return Ok(ChernoffResult::identical());
    }
    let pf: Vec<f64> = p.iter().map(rational::to_f64).collect();
    let qf: Vec<f64> = q.iter().map(rational::to_f64).collect();
    classical_chernoff(&pf, &qf)
}

/// `-min_s log Tr ρ1^{1-s} ρ2^s` from the two eigendecompositions.
pub fn quantum_chernoff(rho1: &DenseSymmetric, rho2: &DenseSymmetric) -> Result<ChernoffResult> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            got: rho2.dim(),
        });
    }
    validate_state(rho1)?;
    validate_state(rho2)?;
    if rho1 == rho2 {
        return Ok(ChernoffResult::identical());
    }
    let e1 = eigh(rho1)?;
    let e2 = eigh(rho2)?;
    let support = |e: &crate::dense::Eigh| -> Vec<(f64, Vec<f64>)> {
        e.values
            .iter()
            .zip(&e.vectors)
            .filter(|(v, _)| **v > SUPPORT_TOL)
            .map(|(v, u)| (*v, u.clone()))
            .collect()
    };
    let s1 = support(&e1);
    let s2 = support(&e2);
    let mut terms = Vec::new();
    for (lam, u) in &s1 {
        for (mu, v) in &s2 {
            let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let overlap = dot * dot;
            if overlap > OVERLAP_TOL {
                terms.push((*lam, *mu, overlap));
            }
        }
    }
    if terms.is_empty() {
        return Ok(ChernoffResult::infinite());
    }
    let f = |s: f64| {
        terms
            .iter()
            .map(|(l, m, o)| l.powf(1.0 - s) * m.powf(s) * o)
            .sum::<f64>()
    };
    let (f_min, s_star, evals) = minimize_unit(f);
    Ok(ChernoffResult::from_min(f_min, s_star, evals))
}

#[derive(Debug, Clone, Serialize)]
pub struct WernerChernoff {
    pub d: u32,
    /// `(d+1)/(d-1)`.
    #[serde(with = "rational::serde_str")]
    pub exact_ratio: ExactScalar,
    pub bits: f64,
    pub nats: f64,
    /// The single-copy repeated value from the outcome distributions.
    pub single_copy: ChernoffResult,
}

/// `log((d+1)/(d-1))`, checked against the classical distance of the
/// single-copy outcome distributions.
pub fn ci_locc_werner(d: u32) -> Result<WernerChernoff> {
    check_dimension(d)?;
    let exact_ratio = rational::ratio(d as i64 + 1, d as i64 - 1);
    let bits = rational::log2(&exact_ratio);
    let dist = werner::outcome_distributions(d)?;
    let single_copy = classical_chernoff_exact(&dist.symmetric, &dist.antisymmetric)?;
    if (single_copy.value_bits - bits).abs() > 1e-12 {
        return Err(Error::CheckFailed(format!(
            "single-copy Chernoff {} differs from log2((d+1)/(d-1)) = {bits}",
            single_copy.value_bits
        )));
    }
    Ok(WernerChernoff {
        d,
        exact_ratio,
        bits,
        nats: bits * std::f64::consts::LN_2,
        single_copy,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatePoint {
    pub n: u32,
    pub rate_bits: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateSequence {
    pub d: u32,
    #[serde(with = "rational::serde_str")]
    pub p: ExactScalar,
    pub limit_bits: f64,
    pub points: Vec<RatePoint>,
    /// Non-increasing over the protocol-branch part of the sequence.
    pub monotone: bool,
    /// `|rate(n_max) - limit|`.
    pub final_gap: f64,
    /// Some `n` used the guessing branch.
    pub guess_flagged: bool,
}

/// `-(1/n) log2 perr(n)` for `n = 1..=n_max`.
pub fn rate_convergence_check(d: u32, n_max: u32, p: &ExactScalar) -> Result<RateSequence> {
    let limit_bits = ci_locc_werner(d)?.bits;
    Instance::new(d, 1, p.clone())?;
    // p·r^n = (a·(d-1)^n) / (b·(d+1)^n), kept unreduced so each step is one
    // small multiplication; 1 - p = (b - a)/b.
    let (a, b) = (p.numer().clone(), p.denom().clone());
    let guess = ExactScalar::new(&b - &a, b.clone());
    let mut num = a.clone();
    let mut den = b.clone();
    let mut points = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        num *= d - 1;
        den *= d + 1;
        let branch = match (&num * &b).cmp(&((&b - &a) * &den)) {
            Ordering::Less => Branch::Protocol,
            Ordering::Equal => Branch::Tie,
            Ordering::Greater => Branch::Guess,
        };
        let log_perr = match branch {
            Branch::Guess => rational::log2(&guess),
            _ => rational::log2(&ExactScalar::new_raw(num.clone(), den.clone())),
        };
        points.push(RatePoint {
            n,
            rate_bits: -log_perr / n as f64,
            branch,
        });
    }
    let protocol: Vec<f64> = points
        .iter()
        .filter(|pt| pt.branch != Branch::Guess)
        .map(|pt| pt.rate_bits)
        .collect();
    let monotone = protocol.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let final_gap = points.last().map_or(f64::INFINITY, |pt| (pt.rate_bits - limit_bits).abs());
    Ok(RateSequence {
        d,
        p: p.clone(),
        limit_bits,
        guess_flagged: points.iter().any(|pt| pt.branch == Branch::Guess),
        points,
        monotone,
        final_gap,
    })
}
