//! Matrix characterization identities on truncations.
//!
//! Every check forms both sides as [`TruncatedMatrix`] values and compares
//! them on the rows that are valid for both; a check passes only when the
//! residual there is exactly zero.
//!
//! Matrix sources:
//!
//! - `A`, `A~`: theta coefficients of the family and of `P'_k = D P_{k+1}/(k+1)`.
//! - `L`: closed-form recurrence of the Bochner data when present, otherwise
//!   the tridiagonal band of `mu P_n` expanded in the family.
//! - `M`: tridiagonal band of `mu P'_k` expanded in the derivative family.
//! - `U = A G (D~ A D)^{-1}`.
//! - `W`: band `k = n..n+2` of `phi P'_n` expanded in `S P_k`.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bochner::BochnerData;
use crate::error::{Error, Result};
use crate::family::{
    build_a, build_atilde, build_atilde_product, d_matrix, dtilde_matrix, e_matrix,
    expansion_coeffs, g_matrix, hessenberg_matrix, j_matrix, lambda_matrix, x1_matrix, PolyFamily,
};
use crate::lattice::LatticeParams;
use crate::matrix::TruncatedMatrix;
use crate::rational::{frac, int, Rational};
use crate::theta::{apply_mu_poly, MuPoly};

pub(crate) fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub kind: String,
    pub size: usize,
    pub valid_rows: usize,
    pub pass: bool,
    #[serde(with = "crate::rational::serde_str")]
    pub residual_max: Rational,
    pub witness: Option<(usize, usize)>,
    #[serde(skip)]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn passing(kind: String, size: usize, valid_rows: usize) -> Self {
        Self {
            kind,
            size,
            valid_rows,
            pass: true,
            residual_max: Rational::zero(),
            witness: None,
            note: None,
        }
    }

    pub fn fail(&mut self, residual: Rational, witness: (usize, usize), note: String) {
        self.pass = false;
        if residual > self.residual_max {
            self.residual_max = residual;
        }
        self.witness.get_or_insert(witness);
        self.note.get_or_insert(note);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    Lemma1,
    Hahn,
    GeronimusNoo,
    GeronimusGern,
    NewChar,
    TricomiMain,
    TricomiUw,
    TricomiWu,
    Bochner,
    AuxLu,
    AuxUm,
    AuxDtildeD,
    AuxCommutator,
}

impl CheckKind {
    pub const ALL: [CheckKind; 13] = [
        CheckKind::Lemma1,
        CheckKind::Hahn,
        CheckKind::GeronimusNoo,
        CheckKind::GeronimusGern,
        CheckKind::NewChar,
        CheckKind::TricomiMain,
        CheckKind::TricomiUw,
        CheckKind::TricomiWu,
        CheckKind::Bochner,
        CheckKind::AuxLu,
        CheckKind::AuxUm,
        CheckKind::AuxDtildeD,
        CheckKind::AuxCommutator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Lemma1 => "lemma1",
            CheckKind::Hahn => "hahn",
            CheckKind::GeronimusNoo => "geronimus_noo",
            CheckKind::GeronimusGern => "geronimus_gern",
            CheckKind::NewChar => "newchar",
            CheckKind::TricomiMain => "tricomi_main",
            CheckKind::TricomiUw => "tricomi_uw",
            CheckKind::TricomiWu => "tricomi_wu",
            CheckKind::Bochner => "bochner",
            CheckKind::AuxLu => "aux_LU",
            CheckKind::AuxUm => "aux_UM",
            CheckKind::AuxDtildeD => "aux_DtildeD",
            CheckKind::AuxCommutator => "aux_commutator",
        }
    }

    /// Needs Bochner data (for `phi`, `psi` or `Lambda`).
    pub fn needs_bochner(self) -> bool {
        matches!(
            self,
            CheckKind::TricomiMain | CheckKind::TricomiUw | CheckKind::TricomiWu | CheckKind::Bochner
        )
    }

    /// Expands a comma-separated list of kinds or groups (`geronimus`,
    /// `tricomi`, `aux`, `all`), keeping the canonical order.
    pub fn parse_selection(s: &str) -> Result<Vec<CheckKind>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let group: Vec<CheckKind> = match item {
                "all" => Self::ALL.to_vec(),
                "geronimus" => vec![CheckKind::GeronimusNoo, CheckKind::GeronimusGern],
                "tricomi" => vec![CheckKind::TricomiMain, CheckKind::TricomiUw, CheckKind::TricomiWu],
                "aux" => vec![
                    CheckKind::AuxLu,
                    CheckKind::AuxUm,
                    CheckKind::AuxDtildeD,
                    CheckKind::AuxCommutator,
                ],
                other => vec![other.parse()?],
            };
            out.extend(group);
        }
        if out.is_empty() {
            return Err(Error::Parse("empty check selection".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown check kind {s:?}")))
    }
}

/// Inputs for the check suite at one truncation size.
#[derive(Debug, Clone)]
pub struct CheckContext {
    pub params: LatticeParams,
    pub family: Option<PolyFamily>,
    pub bochner: Option<BochnerData>,
    pub size: usize,
}

/// Members needed so that every family-derived matrix is fully valid.
pub fn members_for_size(size: usize) -> usize {
    size + 3
}

impl CheckContext {
    /// Lattice-only context (enough for `aux_commutator` and `aux_DtildeD`'s
    /// pure part).
    pub fn lattice(params: LatticeParams, size: usize) -> Self {
        Self { params, family: None, bochner: None, size }
    }

    /// Family solved from the Bochner data, long enough for size `size`.
    pub fn from_bochner(data: BochnerData, size: usize) -> Result<Self> {
        let family = data.solve_family(members_for_size(size))?;
        Ok(Self { params: data.params.clone(), family: Some(family), bochner: Some(data), size })
    }

    pub fn from_family(family: PolyFamily, size: usize) -> Self {
        Self { params: family.params().clone(), family: Some(family), bochner: None, size }
    }

    pub fn with_bochner(mut self, data: BochnerData) -> Self {
        self.bochner = Some(data);
        self
    }

    pub fn with_size(&self, size: usize) -> Self {
        Self { size, ..self.clone() }
    }
}

/// Report plus the compared matrix pairs, for truncation-stability checks.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub report: CheckReport,
    pub pairs: Vec<(TruncatedMatrix, TruncatedMatrix)>,
}

struct Builder<'a> {
    ctx: &'a CheckContext,
    n: usize,
}

impl<'a> Builder<'a> {
    fn family(&self) -> Result<&'a PolyFamily> {
        self.ctx
            .family
            .as_ref()
            .ok_or_else(|| Error::MissingContext("this check needs a polynomial family".into()))
    }

    fn bochner(&self) -> Result<&'a BochnerData> {
        self.ctx
            .bochner
            .as_ref()
            .ok_or_else(|| Error::MissingContext("this check needs Bochner data".into()))
    }

    fn a(&self) -> Result<TruncatedMatrix> {
        Ok(build_a(self.family()?, self.n))
    }

    fn atilde(&self) -> Result<TruncatedMatrix> {
        Ok(build_atilde(self.family()?, self.n))
    }

    fn d(&self) -> TruncatedMatrix {
        d_matrix(self.n)
    }

    fn x1(&self) -> TruncatedMatrix {
        x1_matrix(self.n, &self.ctx.params)
    }

    fn g(&self) -> TruncatedMatrix {
        g_matrix(self.n)
    }

    fn l(&self) -> Result<TruncatedMatrix> {
        match &self.ctx.bochner {
            Some(data) => Ok(data.ttrr_coeffs(self.n)?.jacobi_matrix(self.n)),
            None => Ok(hessenberg_matrix(self.family()?, self.n)?.band(1, 1)),
        }
    }

    fn m(&self) -> Result<TruncatedMatrix> {
        Ok(hessenberg_matrix(&self.family()?.derivative(), self.n)?.band(1, 1))
    }

    fn u(&self) -> Result<TruncatedMatrix> {
        let atp = build_atilde_product(self.family()?, self.n)?;
        self.a()?.matmul(&self.g())?.matmul(&atp.invert_unit_lower()?)
    }

    fn poly_of_x1(&self, q: &MuPoly) -> Result<TruncatedMatrix> {
        let x1 = self.x1();
        let mut acc = TruncatedMatrix::zeros(self.n, 0);
        for c in q.coeffs().iter().rev() {
            acc = acc.matmul(&x1)?.add(&TruncatedMatrix::identity(self.n).scale(c))?;
        }
        Ok(acc)
    }

    fn phi_x1(&self) -> Result<TruncatedMatrix> {
        self.poly_of_x1(&self.bochner()?.phi())
    }

    /// Row `k` expands `phi P'_k` in `S P_0, ..., S P_{k+2}`. Entries left of
    /// the diagonal are kept: they are nonzero even for classical families,
    /// and dropping them breaks every Tricomi identity.
    fn w(&self) -> Result<TruncatedMatrix> {
        let family = self.family()?;
        let phi = self.bochner()?.phi();
        let der = family.derivative();
        let means = family.mean();
        let mut w = TruncatedMatrix::zeros(self.n, 2);
        let mut valid = 0;
        for k in 0..self.n.min(der.len()) {
            let target = apply_mu_poly(&phi, der.member(k));
            let coeffs = match expansion_coeffs(&target, &means) {
                Ok(c) => c,
                Err(Error::FamilyTooShort { .. }) => break,
                Err(e) => return Err(e),
            };
            for (j, c) in coeffs.iter().enumerate().take(self.n) {
                w.set(k, j, c.clone());
            }
            valid = k + 1;
        }
        Ok(w.with_valid_rows(valid))
    }
}

fn mm(a: &TruncatedMatrix, b: &TruncatedMatrix) -> Result<TruncatedMatrix> {
    a.matmul(b)
}

fn sub(a: &TruncatedMatrix, b: &TruncatedMatrix) -> Result<TruncatedMatrix> {
    a.sub(b)
}

fn add(a: &TruncatedMatrix, b: &TruncatedMatrix) -> Result<TruncatedMatrix> {
    a.add(b)
}

fn pairs_for(kind: CheckKind, b: &Builder<'_>) -> Result<Vec<(TruncatedMatrix, TruncatedMatrix)>> {
    let n = b.n;
    let quarter = frac(1, 4);
    let half = frac(1, 2);
    let kappa = b.ctx.params.kappa();
    Ok(match kind {
        CheckKind::Lemma1 => {
            let a = b.a()?;
            vec![(mm(&b.l()?, &a)?, mm(&a, &b.x1())?)]
        }
        CheckKind::Hahn => {
            let at = b.atilde()?;
            vec![(mm(&b.m()?, &at)?, mm(&at, &b.x1())?)]
        }
        CheckKind::GeronimusNoo => {
            let (l, d, m) = (b.l()?, b.d(), b.m()?);
            let shifted = add(&m, &TruncatedMatrix::identity(n).scale(&quarter))?;
            vec![(b.u()?, sub(&mm(&l, &d)?, &mm(&d, &shifted)?)?)]
        }
        CheckKind::GeronimusGern => {
            let ag = mm(&b.a()?, &b.g())?;
            vec![(ag, mm(&b.u()?, &b.atilde()?)?)]
        }
        CheckKind::NewChar => {
            let (l, d, m) = (b.l()?, b.d(), b.m()?);
            let ld = mm(&l, &d)?;
            let dm = mm(&d, &m)?;
            let lhs = sub(&mm(&l, &ld)?, &mm(&ld, &m)?.scale(&int(2)))?;
            let lhs = add(&lhs, &mm(&dm, &m)?)?;
            let lhs = sub(&lhs, &add(&ld, &dm)?.scale(&half))?;
            let lhs = add(&lhs, &d.scale(&kappa))?;
            let zero = TruncatedMatrix::zeros(n, lhs.upper_bandwidth());
            vec![(lhs, zero)]
        }
        CheckKind::TricomiMain => {
            let lhs = mm(&b.atilde()?, &b.phi_x1()?)?;
            let rhs = mm(&mm(&b.w()?, &b.a()?)?, &b.g())?;
            vec![(lhs, rhs)]
        }
        CheckKind::TricomiUw => {
            let ag = mm(&b.a()?, &b.g())?;
            let rhs = mm(&mm(&ag, &b.phi_x1()?)?, &ag.invert_unit_lower()?)?;
            vec![(mm(&b.u()?, &b.w()?)?, rhs)]
        }
        CheckKind::TricomiWu => {
            let at = b.atilde()?;
            let rhs = mm(&mm(&at, &b.phi_x1()?)?, &at.invert_unit_lower()?)?;
            vec![(mm(&b.w()?, &b.u()?)?, rhs)]
        }
        CheckKind::Bochner => {
            let data = b.bochner()?;
            let d = b.d();
            let k = add(
                &mm(&mm(&d, &d)?, &b.phi_x1()?)?,
                &mm(&mm(&d, &b.g())?, &b.poly_of_x1(&data.psi())?)?,
            )?;
            let a = b.a()?;
            vec![(mm(&a, &k)?, mm(&lambda_matrix(n, data), &a)?)]
        }
        CheckKind::AuxLu => {
            let (l, d, m) = (b.l()?, b.d(), b.m()?);
            let ld = mm(&l, &d)?;
            let rhs = sub(&sub(&mm(&l, &ld)?, &mm(&ld, &m)?)?, &ld.scale(&quarter))?;
            vec![(mm(&l, &b.u()?)?, rhs)]
        }
        CheckKind::AuxUm => {
            let (l, d, m) = (b.l()?, b.d(), b.m()?);
            let dm = mm(&d, &m)?;
            let rhs = sub(&sub(&mm(&mm(&l, &d)?, &m)?, &mm(&dm, &m)?)?, &dm.scale(&quarter))?;
            vec![(mm(&b.u()?, &m)?, rhs)]
        }
        CheckKind::AuxDtildeD => {
            let (d, dt) = (b.d(), dtilde_matrix(n));
            let mut v = vec![
                (mm(&dt, &d)?, TruncatedMatrix::identity(n)),
                (mm(&d, &dt)?, j_matrix(n)),
            ];
            if b.ctx.family.is_some() {
                let a = b.a()?;
                let ainv = a.invert_unit_lower()?;
                v.push((mm(&mm(&mm(&a, &j_matrix(n))?, &ainv)?, &d)?, d.clone()));
                let at_inv = b.atilde()?.invert_unit_lower()?;
                v.push((mm(&mm(&a, &d)?, &at_inv)?, d.clone()));
            }
            v
        }
        CheckKind::AuxCommutator => {
            let (x1, e, d) = (b.x1(), e_matrix(n), b.d());
            let lhs = sub(&mm(&x1, &e)?, &mm(&e, &x1)?)?;
            let xd = mm(&x1, &d)?;
            let dx = mm(&d, &x1)?;
            let rhs = sub(&add(&xd, &dx)?.scale(&half), &sub(&xd, &dx)?.scale(&quarter))?;
            let rhs = sub(&rhs, &d.scale(&kappa))?;
            vec![(lhs, rhs)]
        }
    })
}

/// Runs one check and keeps the compared matrices.
pub fn check_identity_detailed(kind: CheckKind, ctx: &CheckContext) -> Result<CheckOutcome> {
    let b = Builder { ctx, n: ctx.size };
    let pairs = pairs_for(kind, &b)?;
    let valid = pairs
        .iter()
        .map(|(l, r)| l.valid_rows().min(r.valid_rows()))
        .min()
        .unwrap_or(0);
    if valid == 0 {
        return Err(Error::TruncationTooSmall { kind: kind.name().into(), size: ctx.size });
    }
    let mut report = CheckReport::passing(kind.name().into(), ctx.size, valid);
    for (l, r) in &pairs {
        let diff = l.sub(r)?;
        let (max, witness) = diff.max_abs_in_rows(valid);
        if let Some(w) = witness {
            report.fail(max, w, format!("{kind}: residual at {w:?}"));
        }
    }
    Ok(CheckOutcome { report, pairs })
}

pub fn check_identity(kind: CheckKind, ctx: &CheckContext) -> Result<CheckReport> {
    check_identity_detailed(kind, ctx).map(|o| o.report)
}

/// Runs several checks on scoped threads; results keep the input order.
pub fn run_checks(kinds: &[CheckKind], ctx: &CheckContext) -> Vec<Result<CheckReport>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = kinds
            .iter()
            .map(|&k| s.spawn(move || check_identity(k, ctx)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    })
}

/// Recomputes a check at `size + extra` and confirms the smaller run's
/// valid rows are unchanged.
pub fn truncation_stable(kind: CheckKind, ctx: &CheckContext, extra: usize) -> Result<bool> {
    let small = check_identity_detailed(kind, ctx)?;
    let big_ctx = match (&ctx.bochner, &ctx.family) {
        (Some(data), Some(fam)) if fam == &data.solve_family(fam.len())? => {
            CheckContext::from_bochner(data.clone(), ctx.size + extra)?
        }
        _ => ctx.with_size(ctx.size + extra),
    };
    let big = check_identity_detailed(kind, &big_ctx)?;
    Ok(small.pairs.iter().zip(&big.pairs).all(|((l, r), (bl, br))| {
        l.agrees_with_leading_block(bl, l.valid_rows())
            && r.agrees_with_leading_block(br, r.valid_rows())
    }))
}

/// First entry of `W` strictly below the diagonal that is nonzero, i.e. the
/// first place where `phi P'_k` is not a combination of `S P_k..S P_{k+2}`.
pub fn tricomi_band_defect(ctx: &CheckContext) -> Result<Option<(usize, usize)>> {
    let b = Builder { ctx, n: ctx.size };
    let w = b.w()?;
    Ok((0..w.valid_rows()).find_map(|k| (0..k).find(|&j| !w.get(k, j).is_zero()).map(|j| (k, j))))
}
