//! Graded monic families, their recurrence data, and the standard lattice
//! matrices `D`, `D~`, `X`, `X1`, `J`, `G`, `E`, `Lambda`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bochner::BochnerData;
use crate::error::{Error, Result};
use crate::lattice::{g_n, LatticeParams};
use crate::matrix::TruncatedMatrix;
use crate::rational::{frac, int, Rational};
use crate::theta::ThetaPoly;

/// `P_0, P_1, ...` with `P_n` monic of exact theta-degree `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFamily {
    params: LatticeParams,
    members: Vec<ThetaPoly>,
}

impl PolyFamily {
    pub fn new(params: LatticeParams, members: Vec<ThetaPoly>) -> Result<Self> {
        for (n, p) in members.iter().enumerate() {
            if p.params != params {
                return Err(Error::MixedLattice);
            }
            if p.degree() != Some(n) || !p.is_monic() {
                return Err(Error::NotGradedMonic(n));
            }
        }
        Ok(Self { params, members })
    }

    /// The theta basis itself, `P_n = theta_n`.
    pub fn theta_basis(params: LatticeParams, count: usize) -> Self {
        let members = (0..count).map(|n| ThetaPoly::basis(params.clone(), n)).collect();
        Self { params, members }
    }

    /// Runs `P_{n+1} = (mu - beta_n) P_n - gamma_n P_{n-1}` from `P_0 = 1`.
    pub fn from_recurrence(params: LatticeParams, rec: &RecurrenceCoeffs, count: usize) -> Result<Self> {
        if count > rec.beta.len() + 1 {
            return Err(Error::FamilyTooShort { needed: count - 1, have: rec.beta.len() });
        }
        let mut members: Vec<ThetaPoly> = Vec::with_capacity(count);
        for n in 0..count {
            let next = match n {
                0 => ThetaPoly::constant(params.clone(), int(1)),
                _ => {
                    let prev = &members[n - 1];
                    let mut p = &prev.mul_mu() - &prev.scale(&rec.beta[n - 1]);
                    if n >= 2 {
                        p = &p - &members[n - 2].scale(rec.gamma_at(n - 1));
                    }
                    p
                }
            };
            members.push(next);
        }
        Self::new(params, members)
    }

    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ThetaPoly] {
        &self.members
    }

    pub fn member(&self, n: usize) -> &ThetaPoly {
        &self.members[n]
    }

    /// `P'_k = D P_{k+1} / (k+1)`, again graded monic.
    pub fn derivative(&self) -> Self {
        let members = self
            .members
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, p)| p.apply_d().scale(&frac(1, n as i64)))
            .collect();
        Self { params: self.params.clone(), members }
    }

    /// `S P_k`, again graded monic.
    pub fn mean(&self) -> Self {
        let members = self.members.iter().map(ThetaPoly::apply_s).collect();
        Self { params: self.params.clone(), members }
    }
}

/// `mu P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceCoeffs {
    /// `beta_0, beta_1, ...`
    #[serde(with = "crate::rational::serde_vec")]
    pub beta: Vec<Rational>,
    /// `gamma_1, gamma_2, ...`; one shorter than `beta`.
    #[serde(with = "crate::rational::serde_vec")]
    pub gamma: Vec<Rational>,
}

impl RecurrenceCoeffs {
    pub fn gamma_at(&self, n: usize) -> &Rational {
        assert!(n >= 1, "gamma is indexed from 1");
        &self.gamma[n - 1]
    }

    /// Jacobi matrix with `beta` on the diagonal, ones above and `gamma` below.
    pub fn jacobi_matrix(&self, size: usize) -> TruncatedMatrix {
        let avail = self.beta.len();
        let mut m = TruncatedMatrix::zeros(size, 1);
        for i in 0..size.min(avail) {
            m.set(i, i, self.beta[i].clone());
            if i + 1 < size {
                m.set(i, i + 1, int(1));
            }
            if i >= 1 {
                m.set(i, i - 1, self.gamma_at(i).clone());
            }
        }
        m.with_valid_rows(avail)
    }
}

/// Coefficients of `target` in a graded monic basis, by back substitution.
pub fn expansion_coeffs(target: &ThetaPoly, basis: &PolyFamily) -> Result<Vec<Rational>> {
    target.same_lattice(basis.members.first().unwrap_or(target))?;
    let Some(d) = target.degree() else {
        return Ok(Vec::new());
    };
    if d >= basis.len() {
        return Err(Error::FamilyTooShort { needed: d + 1, have: basis.len() });
    }
    let mut rest = target.coeffs().to_vec();
    let mut out = vec![Rational::zero(); d + 1];
    for k in (0..=d).rev() {
        let c = rest[k].clone();
        if c.is_zero() {
            continue;
        }
        for (j, b) in basis.member(k).coeffs().iter().enumerate() {
            rest[j] -= &c * b;
        }
        out[k] = c;
    }
    Ok(out)
}

/// Rows of the lower Hessenberg matrix `mu P_n = sum_{k <= n+1} h_{n,k} P_k`
/// for every `n` whose `P_{n+1}` is available.
pub fn hessenberg_rows(family: &PolyFamily) -> Result<Vec<Vec<Rational>>> {
    (0..family.len().saturating_sub(1))
        .map(|n| expansion_coeffs(&family.member(n).mul_mu(), family))
        .collect()
}

pub fn hessenberg_matrix(family: &PolyFamily, size: usize) -> Result<TruncatedMatrix> {
    let rows = hessenberg_rows(family)?;
    let mut m = TruncatedMatrix::zeros(size, 1);
    for (i, row) in rows.iter().enumerate().take(size) {
        for (j, v) in row.iter().enumerate().take(size) {
            m.set(i, j, v.clone());
        }
    }
    Ok(m.with_valid_rows(rows.len()))
}

/// Recurrence data of a family; fails unless `mu P_n` has exactly three terms.
pub fn jacobi_from_family(family: &PolyFamily) -> Result<RecurrenceCoeffs> {
    let rows = hessenberg_rows(family)?;
    let mut beta = Vec::with_capacity(rows.len());
    let mut gamma = Vec::with_capacity(rows.len());
    for (n, row) in rows.iter().enumerate() {
        if let Some(index) = (0..n.saturating_sub(1)).find(|&k| !row[k].is_zero()) {
            return Err(Error::NotThreeTerm { n, index });
        }
        debug_assert!(row[n + 1].is_one());
        beta.push(row[n].clone());
        if n >= 1 {
            gamma.push(row[n - 1].clone());
        }
    }
    Ok(RecurrenceCoeffs { beta, gamma })
}

/// `A`: row `n` holds the theta coefficients of `P_n`.
pub fn build_a(family: &PolyFamily, size: usize) -> TruncatedMatrix {
    let mut m = TruncatedMatrix::zeros(size, 0);
    for (i, p) in family.members().iter().enumerate().take(size) {
        for (j, c) in p.coeffs().iter().enumerate() {
            m.set(i, j, c.clone());
        }
    }
    m.with_valid_rows(family.len())
}

/// `A~` from the derivative family directly.
pub fn build_atilde(family: &PolyFamily, size: usize) -> TruncatedMatrix {
    build_a(&family.derivative(), size)
}

/// `A~ = D~ A D` as a matrix product.
pub fn build_atilde_product(family: &PolyFamily, size: usize) -> Result<TruncatedMatrix> {
    let d = d_matrix(size);
    let dt = dtilde_matrix(size);
    dt.matmul(&build_a(family, size))?.matmul(&d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    D,
    Dtilde,
    X,
    X1,
    J,
    G,
    E,
    Lambda,
}

pub fn build_standard(
    kind: StandardKind,
    size: usize,
    params: &LatticeParams,
    bochner: Option<&BochnerData>,
) -> Result<TruncatedMatrix> {
    Ok(match kind {
        StandardKind::D => d_matrix(size),
        StandardKind::Dtilde => dtilde_matrix(size),
        StandardKind::X => shift_matrix(size),
        StandardKind::X1 => x1_matrix(size, params),
        StandardKind::J => j_matrix(size),
        StandardKind::G => g_matrix(size),
        StandardKind::E => e_matrix(size),
        StandardKind::Lambda => {
            let data = bochner
                .ok_or_else(|| Error::MissingContext("Lambda needs Bochner data".into()))?;
            lambda_matrix(size, data)
        }
    })
}

/// `D`: subdiagonal `1, 2, 3, ...`.
pub fn d_matrix(size: usize) -> TruncatedMatrix {
    TruncatedMatrix::from_fn(size, -1, |i, j| if i == j + 1 { int(i as i64) } else { int(0) })
}

/// `D~`: superdiagonal `1, 1/2, 1/3, ...`.
pub fn dtilde_matrix(size: usize) -> TruncatedMatrix {
    let m = TruncatedMatrix::from_fn(size, 1, |i, j| {
        if j == i + 1 {
            frac(1, j as i64)
        } else {
            int(0)
        }
    });
    // The last row would need column `size`.
    m.with_valid_rows(size.saturating_sub(1))
}

pub fn shift_matrix(size: usize) -> TruncatedMatrix {
    let m = TruncatedMatrix::from_fn(size, 1, |i, j| if j == i + 1 { int(1) } else { int(0) });
    m.with_valid_rows(size.saturating_sub(1))
}

/// `X1 = X + diag(f_0, f_1, ...)`, the matrix of multiplication by `mu`.
pub fn x1_matrix(size: usize, params: &LatticeParams) -> TruncatedMatrix {
    let m = TruncatedMatrix::from_fn(size, 1, |i, j| {
        if j == i + 1 {
            int(1)
        } else if i == j {
            params.f_n(i as i64)
        } else {
            int(0)
        }
    });
    m.with_valid_rows(size.saturating_sub(1))
}

pub fn j_matrix(size: usize) -> TruncatedMatrix {
    let diag: Vec<Rational> = (0..size).map(|i| int((i > 0) as i64)).collect();
    TruncatedMatrix::diagonal(&diag)
}

/// `E`: subdiagonal `g_1, g_2, ...`.
pub fn e_matrix(size: usize) -> TruncatedMatrix {
    TruncatedMatrix::from_fn(size, 0, |i, j| if i == j + 1 { g_n(i as i64) } else { int(0) })
}

/// `G = I + E`, the matrix of `S` on the theta basis.
pub fn g_matrix(size: usize) -> TruncatedMatrix {
    e_matrix(size).add(&TruncatedMatrix::identity(size)).expect("same size")
}

pub fn lambda_matrix(size: usize, data: &BochnerData) -> TruncatedMatrix {
    let diag: Vec<Rational> = (0..size).map(|n| data.lambda_n(n)).collect();
    TruncatedMatrix::diagonal(&diag)
}
