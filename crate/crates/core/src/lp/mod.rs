//! The PPT linear program over the symmetric basis, its explicit dual
//! certificate, and exact optimality checks.
//!
//! Primal: `min cᵀx  s.t.  P·x >= b, x >= 0` with `P = [Q; -Q; -I]`.
//! Dual:   `max bᵀy  s.t.  Pᵀ·y <= c, y >= 0`, `y = u ⊕ v ⊕ w`.
//! A POVM vector `x` has error probability `(1-p) + p·cᵀx`.

pub mod simplex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, ExactScalar};
use crate::symmetric::{powers, q_matrix, BinomialTable, QMatrix, SymmetricPovmVector};
use crate::werner::{protocol_coefficients, Branch, Instance};

/// Exact standard form of the primal program for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LpStandardForm {
    pub instance: Instance,
    pub q: QMatrix,
    /// `3(n+1) × (n+1)`, blocks `Q`, `-Q`, `-I`.
    pub p: Vec<Vec<ExactScalar>>,
    /// Blocks `0`, `-2^n`, `-1`.
    pub b: Vec<ExactScalar>,
    /// `c_i = δ_{0i} - ((1-p)/p) δ_{ni}`.
    pub c: Vec<ExactScalar>,
}

impl LpStandardForm {
    pub fn n(&self) -> usize {
        self.instance.n as usize
    }

    pub fn size(&self) -> usize {
        self.n() + 1
    }

    /// `(1-p) + p·objective`.
    pub fn error_from_objective(&self, objective: &ExactScalar) -> ExactScalar {
        let p = &self.instance.p;
        (ExactScalar::one() - p) + p * objective
    }

    pub fn objective(&self, x: &[ExactScalar]) -> ExactScalar {
        self.c.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

pub fn build_primal(inst: &Instance) -> LpStandardForm {
    let q = q_matrix(inst.d, inst.n).expect("instance already validated");
    let m = q.size();
    let to_rat = |v: &BigInt| ExactScalar::from_integer(v.clone());

    let mut p = Vec::with_capacity(3 * m);
    for row in &q.entries {
        p.push(row.iter().map(to_rat).collect());
    }
    for row in &q.entries {
        p.push(row.iter().map(|v| -to_rat(v)).collect());
    }
    for i in 0..m {
        let mut row = vec![ExactScalar::zero(); m];
        row[i] = -ExactScalar::one();
        p.push(row);
    }

    let two_n = ExactScalar::from_integer(BigInt::from(2).pow(inst.n));
    let mut b = vec![ExactScalar::zero(); m];
    b.extend(std::iter::repeat_n(-two_n, m));
    b.extend(std::iter::repeat_n(-ExactScalar::one(), m));

    let mut c = vec![ExactScalar::zero(); m];
    c[0] += ExactScalar::one();
    c[m - 1] -= inst.odds();

    LpStandardForm {
        instance: inst.clone(),
        q,
        p,
        b,
        c,
    }
}

/// The one-way LOCC protocol as a symmetric POVM vector; the all-zeros
/// vector (always guess symmetric) when guessing is strictly better.
pub fn locc_primal_point(inst: &Instance) -> SymmetricPovmVector {
    let m = inst.n as usize + 1;
    match inst.branch() {
        Branch::Guess => SymmetricPovmVector::zeros(m),
        Branch::Protocol | Branch::Tie => SymmetricPovmVector::new(
            protocol_coefficients(inst.d, inst.n).expect("instance already validated"),
        )
        .expect("protocol coefficients lie in [0, 1]"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCertificate {
    #[serde(with = "rational::serde_vec")]
    pub u: Vec<ExactScalar>,
    #[serde(with = "rational::serde_vec")]
    pub v: Vec<ExactScalar>,
    #[serde(with = "rational::serde_vec")]
    pub w: Vec<ExactScalar>,
}

impl DualCertificate {
    pub fn zero(len: usize) -> Self {
        Self {
            u: vec![ExactScalar::zero(); len],
            v: vec![ExactScalar::zero(); len],
            w: vec![ExactScalar::zero(); len],
        }
    }

    /// `y = u ⊕ v ⊕ w`.
    pub fn stacked(&self) -> Vec<ExactScalar> {
        self.u.iter().chain(&self.v).chain(&self.w).cloned().collect()
    }
}

/// `u*_i = C(n,i) (d-1)^{n-i} ((d+1)^i - (1-d)^i) / ((2d)^n (d+1)^i)`.
pub fn certificate_u(d: u32, n: u32) -> Vec<ExactScalar> {
    let nn = n as usize;
    let binom = BinomialTable::new(nn);
    let dm = powers(d as i64 - 1, nn);
    let dp = powers(d as i64 + 1, nn);
    let om = powers(1 - d as i64, nn);
    let two_d_n = BigInt::from(2 * d as i64).pow(n);
    (0..=nn)
        .map(|i| {
            let num = binom.get(nn as i64, i as i64) * &dm[nn - i] * (&dp[i] - &om[i]);
            ExactScalar::new(num, &two_d_n * &dp[i])
        })
        .collect()
}

/// The explicit dual point: `u*` above, `v* = 0`,
/// `w*_n = max((1-p)/p - ((d-1)/(d+1))^n, 0)` and zero elsewhere.
pub fn dual_certificate(inst: &Instance) -> DualCertificate {
    let m = inst.n as usize + 1;
    let u = certificate_u(inst.d, inst.n);
    let mut w = vec![ExactScalar::zero(); m];
    w[m - 1] = rational::max(inst.odds() - inst.ratio_pow(), ExactScalar::zero());
    DualCertificate {
        u,
        v: vec![ExactScalar::zero(); m],
        w,
    }
}

/// One linear constraint `lhs (<= or >=) rhs` with its exact slack (always
/// `>= 0` when satisfied).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub index: usize,
    #[serde(with = "rational::serde_str")]
    pub lhs: ExactScalar,
    #[serde(with = "rational::serde_str")]
    pub rhs: ExactScalar,
    #[serde(with = "rational::serde_str")]
    pub slack: ExactScalar,
}

impl ConstraintCheck {
    fn le(index: usize, lhs: ExactScalar, rhs: ExactScalar) -> Self {
        let slack = &rhs - &lhs;
        Self { index, lhs, rhs, slack }
    }

    fn ge(index: usize, lhs: ExactScalar, rhs: ExactScalar) -> Self {
        let slack = &lhs - &rhs;
        Self { index, lhs, rhs, slack }
    }

    pub fn satisfied(&self) -> bool {
        !self.slack.is_negative()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualFeasibilityReport {
    pub feasible: bool,
    /// `y_i >= 0` over the stacked `u ⊕ v ⊕ w`; `lhs = y_i`, `rhs = 0`.
    pub nonnegativity: Vec<ConstraintCheck>,
    /// `(Qᵀu - Qᵀv - w)_k <= c_k`.
    pub constraints: Vec<ConstraintCheck>,
    /// Indices (into `constraints`) that fail.
    pub violated: Vec<usize>,
    /// Indices (into the stacked `y`) that are negative.
    pub negative: Vec<usize>,
    #[serde(with = "rational::serde_vec")]
    pub qt_u: Vec<ExactScalar>,
    /// Whether `(Qᵀu)_k = δ_{0k} - δ_{nk} ((d-1)/(d+1))^n` for every `k`.
    pub qt_u_identity: bool,
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

pub fn verify_dual_feasibility(cert: &DualCertificate, lp: &LpStandardForm) -> Result<DualFeasibilityReport> {
    let m = lp.size();
    check_len(m, cert.u.len())?;
    check_len(m, cert.v.len())?;
    check_len(m, cert.w.len())?;

    let nonnegativity: Vec<ConstraintCheck> = cert
        .stacked()
        .into_iter()
        .enumerate()
        .map(|(i, y)| ConstraintCheck::ge(i, y, ExactScalar::zero()))
        .collect();

    let qt_u = lp.q.mul_transpose_vec(&cert.u);
    let qt_v = lp.q.mul_transpose_vec(&cert.v);
    let constraints: Vec<ConstraintCheck> = (0..m)
        .map(|k| {
            let lhs = &qt_u[k] - &qt_v[k] - &cert.w[k];
            ConstraintCheck::le(k, lhs, lp.c[k].clone())
        })
        .collect();

    let r_n = lp.instance.ratio_pow();
    let qt_u_identity = qt_u.iter().enumerate().all(|(k, val)| {
        let mut expect = ExactScalar::zero();
        if k == 0 {
            expect += ExactScalar::one();
        }
        if k == m - 1 {
            expect -= &r_n;
        }
        *val == expect
    });

    let violated: Vec<usize> = constraints.iter().filter(|c| !c.satisfied()).map(|c| c.index).collect();
    let negative: Vec<usize> = nonnegativity.iter().filter(|c| !c.satisfied()).map(|c| c.index).collect();
    Ok(DualFeasibilityReport {
        feasible: violated.is_empty() && negative.is_empty(),
        nonnegativity,
        constraints,
        violated,
        negative,
        qt_u,
        qt_u_identity,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimalFeasibilityReport {
    pub feasible: bool,
    /// `(P·x)_i >= b_i` for all `3(n+1)` rows.
    pub constraints: Vec<ConstraintCheck>,
    pub violated: Vec<usize>,
    /// Indices with `x_k < 0`.
    pub negative: Vec<usize>,
}

pub fn verify_primal_feasibility(x: &[ExactScalar], lp: &LpStandardForm) -> Result<PrimalFeasibilityReport> {
    check_len(lp.size(), x.len())?;
    let constraints: Vec<ConstraintCheck> = lp
        .p
        .iter()
        .zip(&lp.b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let lhs: ExactScalar = row
                .iter()
                .zip(x)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, xi)| a * xi)
                .sum();
            ConstraintCheck::ge(i, lhs, bi.clone())
        })
        .collect();
    let violated: Vec<usize> = constraints.iter().filter(|c| !c.satisfied()).map(|c| c.index).collect();
    let negative: Vec<usize> = x.iter().enumerate().filter(|(_, v)| v.is_negative()).map(|(i, _)| i).collect();
    Ok(PrimalFeasibilityReport {
        feasible: violated.is_empty() && negative.is_empty(),
        constraints,
        violated,
        negative,
    })
}

/// `-2^n Σ v_i - Σ w_i`.
pub fn dual_objective(cert: &DualCertificate) -> ExactScalar {
    let n = cert.v.len().saturating_sub(1) as u32;
    let two_n = ExactScalar::from_integer(BigInt::from(2).pow(n));
    let sv: ExactScalar = cert.v.iter().sum();
    let sw: ExactScalar = cert.w.iter().sum();
    -(two_n * sv) - sw
}

/// `bᵀy` computed directly from the standard form.
pub fn dual_value(cert: &DualCertificate, lp: &LpStandardForm) -> Result<ExactScalar> {
    let y = cert.stacked();
    check_len(lp.b.len(), y.len())?;
    Ok(lp.b.iter().zip(&y).map(|(a, b)| a * b).sum())
}

/// `cᵀx - bᵀy`, which is nonnegative for feasible pairs; zero proves both
/// points optimal.
pub fn optimality_gap(x: &SymmetricPovmVector, cert: &DualCertificate, lp: &LpStandardForm) -> Result<ExactScalar> {
    let primal = verify_primal_feasibility(x.as_slice(), lp)?;
    if !primal.feasible {
        return Err(Error::PrimalInfeasible(format!(
            "violated rows {:?}, negative entries {:?}",
            primal.violated, primal.negative
        )));
    }
    let dual = verify_dual_feasibility(cert, lp)?;
    if !dual.feasible {
        return Err(Error::DualInfeasible(format!(
            "violated constraints {:?}, negative entries {:?}",
            dual.violated, dual.negative
        )));
    }
    Ok(lp.objective(x.as_slice()) - dual_value(cert, lp)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpSolution {
    pub x: SymmetricPovmVector,
    #[serde(with = "rational::serde_str")]
    pub objective: ExactScalar,
    #[serde(with = "rational::serde_str")]
    pub error_probability: ExactScalar,
    pub basis: Vec<String>,
    pub iterations: usize,
}

/// Solves the primal program with the exact simplex, independently of the
/// closed forms.
pub fn simplex_solve(lp: &LpStandardForm) -> Result<LpSolution> {
    let out = simplex::solve(&lp.c, &lp.p, &lp.b)?;
    let feas = verify_primal_feasibility(&out.x, lp)?;
    if !feas.feasible {
        return Err(Error::PrimalInfeasible(format!("simplex returned an infeasible point: {:?}", feas.violated)));
    }
    let x = SymmetricPovmVector::new(out.x)?;
    Ok(LpSolution {
        error_probability: lp.error_from_objective(&out.objective),
        objective: out.objective,
        x,
        basis: out.basis,
        iterations: out.pivots,
    })
}

/// The two appendix sums, computed term by term and from their closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixSums {
    pub d: u32,
    pub n: u32,
    pub k: usize,
    #[serde(with = "rational::serde_str")]
    pub s1_termwise: ExactScalar,
    #[serde(with = "rational::serde_str")]
    pub s2_termwise: ExactScalar,
    #[serde(with = "rational::serde_str")]
    pub s1_closed: ExactScalar,
    #[serde(with = "rational::serde_str")]
    pub s2_closed: ExactScalar,
}

impl AppendixSums {
    pub fn agree(&self) -> bool {
        self.s1_termwise == self.s1_closed && self.s2_termwise == self.s2_closed
    }
}

struct AppendixTables {
    binom: BinomialTable,
    one_minus_d: Vec<BigInt>,
    one_plus_d: Vec<BigInt>,
    binom_n: Vec<BigInt>,
    d_minus: Vec<BigInt>,
    s1_den: BigInt,
    s2_den: BigInt,
    r_n: ExactScalar,
}

impl AppendixTables {
    fn new(d: u32, n: u32) -> Self {
        let nn = n as usize;
        let binom = BinomialTable::new(nn);
        let d_minus = powers(d as i64 - 1, nn);
        let binom_n = (0..=nn).map(|l| binom.get(nn as i64, l as i64)).collect();
        let two_d_n = BigInt::from(2 * d as i64).pow(n);
        let one_plus_d = powers(1 + d as i64, nn);
        let s2_den = &two_d_n * &one_plus_d[nn];
        Self {
            binom,
            one_minus_d: powers(1 - d as i64, nn),
            one_plus_d,
            binom_n,
            d_minus,
            s1_den: two_d_n,
            s2_den,
            r_n: rational::pow(&crate::werner::werner_ratio(d), n),
        }
    }

    // s1 = (2d)^-n Σ_l Σ_j C(n-l,k-j) C(l,j) C(n,l) (1-d)^j (1+d)^{l-j} (d-1)^{n-l}
    // s2 = (d-1)^n ((2d)^n (d+1)^n)^-1 Σ_l Σ_j C(n-l,k-j) C(l,j) C(n,l) (1-d)^j (1+d)^{n-j} (-1)^l
    fn sums(&self, d: u32, n: u32, k: usize) -> AppendixSums {
        let nn = n as usize;
        let mut s1 = BigInt::zero();
        let mut s2 = BigInt::zero();
        for l in 0..=nn {
            let lo = k.saturating_sub(nn - l);
            let hi = l.min(k);
            for j in lo..=hi {
                let common = self.binom.get_ref(nn - l, k - j)
                    * self.binom.get_ref(l, j)
                    * &self.one_minus_d[j]
                    * &self.binom_n[l];
                s1 += &common * &self.d_minus[nn - l] * &self.one_plus_d[l - j];
                let t2 = common * &self.one_plus_d[nn - j];
                if l % 2 == 0 {
                    s2 += t2;
                } else {
                    s2 -= t2;
                }
            }
        }
        let s1_closed = if k == 0 { ExactScalar::one() } else { ExactScalar::zero() };
        let s2_closed = if k == nn { self.r_n.clone() } else { ExactScalar::zero() };
        AppendixSums {
            d,
            n,
            k,
            s1_termwise: ExactScalar::new(s1, self.s1_den.clone()),
            s2_termwise: ExactScalar::new(s2 * &self.d_minus[nn], self.s2_den.clone()),
            s1_closed,
            s2_closed,
        }
    }
}

pub fn appendix_sum_check(d: u32, n: u32, k: usize) -> Result<AppendixSums> {
    crate::werner::check_dimension(d)?;
    if n < 1 {
        return Err(Error::InvalidCopies(n));
    }
    if k > n as usize {
        return Err(Error::IndexOutOfRange { index: k, max: n as usize });
    }
    Ok(AppendixTables::new(d, n).sums(d, n, k))
}

/// All `k = 0..=n` at once, sharing the power and binomial tables.
pub fn appendix_sums_all(d: u32, n: u32) -> Result<Vec<AppendixSums>> {
    crate::werner::check_dimension(d)?;
    if n < 1 {
        return Err(Error::InvalidCopies(n));
    }
    let t = AppendixTables::new(d, n);
    Ok((0..=n as usize).map(|k| t.sums(d, n, k)).collect())
}
