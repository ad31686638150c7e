//! Exact combinatorics of the permutation- and `U⊗U`-invariant operator basis.
//!
//! `A_k` is the sum of the `{Π_s, Π_a}^{⊗n}` words with `k` antisymmetric
//! factors; `T_l` is the sum of the `{1-Φ_d, Φ_d}^{⊗n}` words with `l` copies
//! of `Φ_d`. Partial transposition maps the first family into the span of the
//! second with integer coefficients `Q_{lk}` (up to a global `2^-n`).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, ExactScalar};
use crate::werner::check_dimension;

/// Pascal triangle rows `0..=n`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigInt>>,
}

impl BinomialTable {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        rows.push(vec![BigInt::one()]);
        for m in 1..=n {
            let prev = &rows[m - 1];
            let mut row = Vec::with_capacity(m + 1);
            row.push(BigInt::one());
            for j in 1..m {
                row.push(&prev[j - 1] + &prev[j]);
            }
            row.push(BigInt::one());
            rows.push(row);
        }
        Self { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(m, j)`, zero outside `0 <= j <= m`.
    pub fn get(&self, m: i64, j: i64) -> BigInt {
        if m < 0 || j < 0 || j > m {
            return BigInt::zero();
        }
        self.rows[m as usize][j as usize].clone()
    }

    pub(crate) fn get_ref(&self, m: usize, j: usize) -> &BigInt {
        &self.rows[m][j]
    }
}

/// Powers `base^0..=base^n`.
pub(crate) fn powers(base: i64, n: usize) -> Vec<BigInt> {
    let b = BigInt::from(base);
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigInt::one());
    for i in 1..=n {
        let next = &out[i - 1] * &b;
        out.push(next);
    }
    out
}

/// Which sign convention the double-binomial sum uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Convention {
    /// `(1-d)^j (1+d)^{l-j}`: `j` counts antisymmetric factors sitting on `Φ`.
    Constraint,
    /// `(1+d)^j (1-d)^{l-j}`: `j` counts symmetric factors sitting on `Φ`.
    Swapped,
}

struct SumTables {
    binom: BinomialTable,
    minus: Vec<BigInt>,
    plus: Vec<BigInt>,
}

impl SumTables {
    fn new(d: u32, n: usize) -> Self {
        Self {
            binom: BinomialTable::new(n),
            minus: powers(1 - d as i64, n),
            plus: powers(1 + d as i64, n),
        }
    }

    fn entry(&self, n: usize, l: usize, k: usize, conv: Convention) -> BigInt {
        let lo = k.saturating_sub(n - l);
        let hi = l.min(k);
        let mut acc = BigInt::zero();
        for j in lo..=hi {
            let c = self.binom.get_ref(n - l, k - j) * self.binom.get_ref(l, j);
            let w = match conv {
                Convention::Constraint => &self.minus[j] * &self.plus[l - j],
                Convention::Swapped => &self.plus[j] * &self.minus[l - j],
            };
            acc += c * w;
        }
        acc
    }
}

fn check_index(index: usize, n: u32) -> Result<()> {
    if index > n as usize {
        Err(Error::IndexOutOfRange {
            index,
            max: n as usize,
        })
    } else {
        Ok(())
    }
}

fn check_dn(d: u32, n: u32) -> Result<()> {
    check_dimension(d)?;
    if n < 1 {
        return Err(Error::InvalidCopies(n));
    }
    Ok(())
}

/// `Q_{lk} = Σ_j C(n-l, k-j) C(l, j) (1-d)^j (1+d)^{l-j}`.
pub fn q_entry(d: u32, n: u32, l: usize, k: usize) -> Result<BigInt> {
    check_dn(d, n)?;
    check_index(l, n)?;
    check_index(k, n)?;
    let t = SumTables::new(d, n as usize);
    Ok(t.entry(n as usize, l, k, Convention::Constraint))
}

/// The `(n+1)×(n+1)` integer constraint matrix, `entries[l][k] = Q_{lk}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMatrix {
    pub d: u32,
    pub n: u32,
    #[serde(with = "bigint_rows")]
    pub entries: Vec<Vec<BigInt>>,
}

impl QMatrix {
    pub fn size(&self) -> usize {
        self.n as usize + 1
    }

    pub fn get(&self, l: usize, k: usize) -> &BigInt {
        &self.entries[l][k]
    }

    pub fn row_sums(&self) -> Vec<BigInt> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    /// Every row sums to `2^n`.
    pub fn row_sums_ok(&self) -> bool {
        let target = BigInt::from(2).pow(self.n);
        self.row_sums().iter().all(|s| *s == target)
    }

    /// `Q·x` with exact rationals.
    pub fn mul_vec(&self, x: &[ExactScalar]) -> Vec<ExactScalar> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(q, _)| !q.is_zero())
                    .map(|(q, xi)| xi * q)
                    .sum()
            })
            .collect()
    }

    /// `Qᵀ·y` with exact rationals.
    pub fn mul_transpose_vec(&self, y: &[ExactScalar]) -> Vec<ExactScalar> {
        let m = self.size();
        let mut out = vec![ExactScalar::zero(); m];
        for (l, row) in self.entries.iter().enumerate() {
            if y[l].is_zero() {
                continue;
            }
            for (k, q) in row.iter().enumerate() {
                out[k] += &y[l] * q;
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
        }
        s
    }
}

pub fn q_matrix(d: u32, n: u32) -> Result<QMatrix> {
    build_matrix(d, n, Convention::Constraint)
}

/// The same double-binomial sum with `(1+d)` and `(1-d)` exchanged. It equals
/// `Q` with its column index reflected: `Q'_{lk} = Q_{l,n-k}`.
pub fn q_matrix_swapped(d: u32, n: u32) -> Result<QMatrix> {
    build_matrix(d, n, Convention::Swapped)
}

fn build_matrix(d: u32, n: u32, conv: Convention) -> Result<QMatrix> {
    check_dn(d, n)?;
    let nn = n as usize;
    let t = SumTables::new(d, nn);
    let entries = (0..=nn)
        .map(|l| (0..=nn).map(|k| t.entry(nn, l, k, conv)).collect())
        .collect();
    Ok(QMatrix { d, n, entries })
}

/// Coefficients of `T_0..T_n` in `A_k^Γ`: `2^-n Q_{lk}`.
pub fn ak_pt_coefficients(d: u32, n: u32, k: usize) -> Result<Vec<ExactScalar>> {
    check_dn(d, n)?;
    check_index(k, n)?;
    let q = q_matrix(d, n)?;
    let scale = ExactScalar::new(BigInt::one(), BigInt::from(2).pow(n));
    Ok((0..=n as usize)
        .map(|l| &scale * q.get(l, k))
        .collect())
}

/// `Tr A_k = C(n,k) (d(d+1)/2)^{n-k} (d(d-1)/2)^k`.
pub fn ak_trace(d: u32, n: u32, k: usize) -> Result<BigInt> {
    check_dn(d, n)?;
    check_index(k, n)?;
    let d = d as i64;
    let sym = BigInt::from(d * (d + 1) / 2);
    let anti = BigInt::from(d * (d - 1) / 2);
    let c = BinomialTable::new(n as usize).get(n as i64, k as i64);
    Ok(c * sym.pow(n - k as u32) * anti.pow(k as u32))
}

/// `Tr T_l = C(n,l) (d²-1)^{n-l}`.
pub fn tl_trace(d: u32, n: u32, l: usize) -> Result<BigInt> {
    check_dn(d, n)?;
    check_index(l, n)?;
    let c = BinomialTable::new(n as usize).get(n as i64, l as i64);
    let d = d as i64;
    Ok(c * BigInt::from(d * d - 1).pow(n - l as u32))
}

/// Candidate POVM element `Σ x_k A_k`, each `x_k ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricPovmVector {
    #[serde(with = "rational::serde_vec")]
    x: Vec<ExactScalar>,
}

impl SymmetricPovmVector {
    pub fn new(x: Vec<ExactScalar>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidArgument("empty POVM vector".into()));
        }
        if let Some((k, v)) = x.iter().enumerate().find(|(_, v)| !rational::is_unit_interval(v)) {
            return Err(Error::InvalidArgument(format!(
                "x_{k} = {} is outside [0, 1]",
                rational::render(v)
            )));
        }
        Ok(Self { x })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            x: vec![ExactScalar::zero(); len],
        }
    }

    pub fn ones(len: usize) -> Self {
        Self {
            x: vec![ExactScalar::one(); len],
        }
    }

    pub fn as_slice(&self) -> &[ExactScalar] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn into_inner(self) -> Vec<ExactScalar> {
        self.x
    }

    /// `1 - x`, the complementary element.
    pub fn complement(&self) -> Self {
        Self {
            x: self.x.iter().map(|v| ExactScalar::one() - v).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PptFamily {
    /// `(Q·x)_l >= 0`
    Element,
    /// `(Q·(1-x))_l >= 0`
    Complement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PptViolation {
    pub family: PptFamily,
    pub row: usize,
    #[serde(with = "rational::serde_str")]
    pub value: ExactScalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PptReport {
    pub feasible: bool,
    #[serde(with = "rational::serde_vec")]
    pub element_rows: Vec<ExactScalar>,
    #[serde(with = "rational::serde_vec")]
    pub complement_rows: Vec<ExactScalar>,
    pub violations: Vec<PptViolation>,
}

/// Checks that both POVM elements have positive partial transpose.
pub fn ppt_feasible(x: &SymmetricPovmVector, q: &QMatrix) -> Result<PptReport> {
    if x.len() != q.size() {
        return Err(Error::DimensionMismatch {
            expected: q.size(),
            got: x.len(),
        });
    }
    let element_rows = q.mul_vec(x.as_slice());
    let complement_rows = q.mul_vec(x.complement().as_slice());
    let mut violations = Vec::new();
    for (family, rows) in [
        (PptFamily::Element, &element_rows),
        (PptFamily::Complement, &complement_rows),
    ] {
        for (row, v) in rows.iter().enumerate() {
            if v.is_negative() {
                violations.push(PptViolation {
                    family,
                    row,
                    value: v.clone(),
                });
            }
        }
    }
    Ok(PptReport {
        feasible: violations.is_empty(),
        element_rows,
        complement_rows,
        violations,
    })
}

mod bigint_rows {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let text = Vec::<Vec<String>>::deserialize(d)?;
        text.iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.parse::<BigInt>().map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}
