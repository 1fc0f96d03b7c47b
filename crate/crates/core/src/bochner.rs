//! The Bochner-type equation `phi D^2 P + psi S D P = lambda_n P` and the
//! recurrence coefficients of its monic polynomial solutions.
//!
//! `phi = a0 mu^2 + a1 mu + a2`, `psi = b0 mu + b1` and
//! `lambda_n = n((n-1) a0 + b0)`. On the theta basis the operator
//! `L_n = phi D^2 + psi S D - lambda_n` is lower triangular with three
//! diagonals (`k0`, `k1`, `k2` below), so `P_n` follows from a downward
//! recursion whose divisors are `lambda_m - lambda_n`.

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::checks::CheckReport;
use crate::error::{Error, Result};
use crate::family::{PolyFamily, RecurrenceCoeffs};
use crate::lattice::{g_n, LatticeParams};
use crate::rational::{frac, int, Rational};
use crate::theta::{apply_mu_poly, MuPoly, ThetaPoly};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BochnerData {
    pub params: LatticeParams,
    #[serde(with = "crate::rational::serde_str")]
    pub a0: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub a1: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub a2: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub b0: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub b1: Rational,
}

/// Coefficients of `L_n theta_j = k0 theta_j + k1 theta_{j-1} + k2 theta_{j-2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCoeffs {
    pub k0: Rational,
    pub k1: Rational,
    pub k2: Rational,
}

impl BochnerData {
    pub fn new(
        params: LatticeParams,
        a0: Rational,
        a1: Rational,
        a2: Rational,
        b0: Rational,
        b1: Rational,
    ) -> Self {
        Self { params, a0, a1, a2, b0, b1 }
    }

    pub fn phi(&self) -> MuPoly {
        MuPoly::new(vec![self.a2.clone(), self.a1.clone(), self.a0.clone()])
    }

    pub fn psi(&self) -> MuPoly {
        MuPoly::new(vec![self.b1.clone(), self.b0.clone()])
    }

    pub fn lambda_n(&self, n: usize) -> Rational {
        let n = int(n as i64);
        &n * ((&n - int(1)) * &self.a0 + &self.b0)
    }

    /// Degree-`n` admissibility: `lambda_m != lambda_n` for `m < n` and
    /// `lambda_m != 0` for `1 <= m <= n`.
    pub fn check_uniqueness(&self, n: usize) -> Result<()> {
        let ln = self.lambda_n(n);
        for m in 0..n {
            if self.lambda_n(m) == ln {
                return Err(Error::DegenerateEigenvalues { n, m });
            }
        }
        for m in 1..=n {
            if self.lambda_n(m).is_zero() {
                return Err(Error::DegenerateEigenvalues { n, m });
            }
        }
        Ok(())
    }

    /// Uniqueness for every degree up to `nmax`, i.e. `lambda_0..lambda_nmax`
    /// pairwise distinct.
    pub fn check_admissible(&self, nmax: usize) -> Result<()> {
        (1..=nmax).try_for_each(|n| self.check_uniqueness(n))
    }

    pub fn k_coeffs(&self, n: usize, j: usize) -> KCoeffs {
        let p = &self.params;
        let ji = j as i64;
        let jj = int(ji);
        let jj1 = int(ji * (ji - 1));
        let (f1, f2) = (p.f_n(ji - 1), p.f_n(ji - 2));
        let g1 = g_n(ji - 1);
        let k0 = &self.a0 * &jj1 + &self.b0 * &jj - self.lambda_n(n);
        let k1 = &self.a0 * &jj1 * (&f1 + &f2)
            + &self.b0 * &jj * &f1
            + &self.a1 * &jj1
            + &self.b0 * &jj * &g1
            + &self.b1 * &jj;
        let k2 = &self.a0 * &jj1 * &f2 * &f2
            + &self.a1 * &jj1 * &f2
            + &self.b0 * &jj * &g1 * &f2
            + &self.a2 * &jj1
            + &self.b1 * &jj * &g1;
        KCoeffs { k0, k1, k2 }
    }

    /// `L_n p = phi D^2 p + psi S D p - lambda_n p` through the calculus layer.
    pub fn apply_ln(&self, n: usize, p: &ThetaPoly) -> ThetaPoly {
        let dp = p.apply_d();
        let phi_term = apply_mu_poly(&self.phi(), &dp.apply_d());
        let psi_term = apply_mu_poly(&self.psi(), &dp.apply_s());
        &(&phi_term + &psi_term) - &p.scale(&self.lambda_n(n))
    }

    /// The unique monic degree-`n` solution of `L_n P = 0`.
    pub fn solve_pn(&self, n: usize) -> Result<ThetaPoly> {
        self.check_uniqueness(n)?;
        let ln = self.lambda_n(n);
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = int(1);
        for m in (0..n).rev() {
            let mut s = &c[m + 1] * self.k_coeffs(n, m + 1).k1;
            if m + 2 <= n {
                s += &c[m + 2] * self.k_coeffs(n, m + 2).k2;
            }
            c[m] = -s / (self.lambda_n(m) - &ln);
        }
        Ok(ThetaPoly::new(self.params.clone(), c))
    }

    /// `P_0 .. P_{count-1}`.
    pub fn solve_family(&self, count: usize) -> Result<PolyFamily> {
        let members = (0..count).map(|n| self.solve_pn(n)).collect::<Result<Vec<_>>>()?;
        PolyFamily::new(self.params.clone(), members)
    }

    /// Closed forms for the theta coefficients `p_{1,n}` and `p_{2,n}`.
    ///
    /// `p_{1,0} = 0` and `p_{2,n} = 0` for `n < 2`.
    pub fn closed_p1_p2(&self, n: usize) -> Result<(Rational, Rational)> {
        if n == 0 {
            return Ok((Rational::zero(), Rational::zero()));
        }
        self.check_uniqueness(n)?;
        let p = &self.params;
        let (a, b, c, r, s) = (&self.a0, &self.a1, &self.a2, &self.b0, &self.b1);
        let ni = n as i64;
        let nn = int(ni);
        let ln = self.lambda_n(n);
        let p1 = -(&nn
            * (a * int(ni - 1) * (p.f_n(ni - 2) + p.f_n(ni - 1))
                + b * int(ni - 1)
                + r * (p.f_n(ni - 1) + g_n(ni - 1))
                + s))
            / (self.lambda_n(n - 1) - &ln);
        if n < 2 {
            return Ok((p1, Rational::zero()));
        }
        let f2 = p.f_n(ni - 2);
        let inner = &p1
            * (a * int(ni - 2) * (p.f_n(ni - 3) + &f2) + b * int(ni - 2) + r * (&f2 + g_n(ni - 2)) + s)
            + &nn * (&f2 * (a * &f2 + b) + c);
        let brace = int(ni - 1) * inner + &nn * g_n(ni - 1) * (r * &f2 + s);
        let p2 = -brace / (self.lambda_n(n - 2) - &ln);
        Ok((p1, p2))
    }

    /// `beta_0..beta_{nmax-1}` and `gamma_1..gamma_{nmax-1}` from the closed forms.
    pub fn ttrr_coeffs(&self, nmax: usize) -> Result<RecurrenceCoeffs> {
        self.check_admissible(nmax + 1)?;
        let p: Vec<(Rational, Rational)> =
            (0..=nmax).map(|n| self.closed_p1_p2(n)).collect::<Result<_>>()?;
        let mut beta = Vec::with_capacity(nmax);
        let mut gamma = Vec::with_capacity(nmax.saturating_sub(1));
        for n in 0..nmax {
            let (p1, p2) = &p[n];
            let (p1n, p2n) = &p[n + 1];
            let b = p1 - p1n + self.params.f_n(n as i64);
            if n >= 1 {
                gamma.push(p1 * (self.params.f_n(n as i64 - 1) - &b) + p2 - p2n);
            }
            beta.push(b);
        }
        Ok(RecurrenceCoeffs { beta, gamma })
    }

    /// Small random rationals on a random lattice, redrawn until
    /// `check_admissible(nmax)` holds.
    pub fn random_admissible<R: Rng>(rng: &mut R, nmax: usize) -> Self {
        let mut small = |lo: i64, hi: i64| frac(rng.gen_range(lo..=hi), rng.gen_range(1..=6));
        loop {
            let params = LatticeParams::new(small(-6, 6), small(-6, 6));
            let data = Self::new(params, small(-4, 4), small(-12, 12), small(-12, 12), small(-12, 12), small(-12, 12));
            if data.check_admissible(nmax).is_ok() {
                return data;
            }
        }
    }

    pub fn lambdas(&self, count: usize) -> Vec<Rational> {
        (0..count).map(|n| self.lambda_n(n)).collect()
    }

    /// `beta_n = p_{1,n} + f_n + k_{1,n+1} / (lambda_n - lambda_{n+1})`, read
    /// off from the requirement that `L_{n+1}((mu - beta_n) P_n)` drops to
    /// degree `n-1`.
    pub fn beta_from_un(&self, n: usize, p1n: &Rational) -> Rational {
        p1n + self.params.f_n(n as i64)
            + self.k_coeffs(n + 1, n + 1).k1 / (self.lambda_n(n) - self.lambda_n(n + 1))
    }

    /// Leading theta_{n-1} coefficient `t_n` of `U_n`.
    pub fn t_n(&self, n: usize, beta: &Rational, p1n: &Rational, p2n: &Rational) -> Rational {
        assert!(n >= 1);
        let p = &self.params;
        let ni = n as i64;
        let k1n = if n >= 1 { self.k_coeffs(n + 1, n).k1 } else { Rational::zero() };
        self.k_coeffs(n + 1, n + 1).k2
            + (p.f_n(ni) + p1n - beta) * k1n
            + (p1n * p.f_n(ni - 1) + p2n - beta * p1n) * (self.lambda_n(n - 1) - self.lambda_n(n + 1))
    }

    /// `U_n = L_{n+1}((mu - beta) P_n)`.
    pub fn u_n(&self, n: usize, beta: &Rational) -> Result<ThetaPoly> {
        let pn = self.solve_pn(n)?;
        let shifted = &pn.mul_mu() - &pn.scale(beta);
        Ok(self.apply_ln(n + 1, &shifted))
    }

    /// Checks the three endpoint properties of `U_n` for the closed-form `beta_n`.
    pub fn verify_un(&self, n: usize) -> Result<CheckReport> {
        self.check_admissible(n + 1)?;
        let (p1, _) = self.closed_p1_p2(n)?;
        let beta = self.beta_from_un(n, &p1);
        self.verify_un_with_beta(n, &beta)
    }

    /// Witness `[n, a]` names the failing assertion `a`: 0 degree, 1 `L_{n-1} U_n = 0`,
    /// 2 `U_n = t_n P_{n-1}`.
    pub fn verify_un_with_beta(&self, n: usize, beta: &Rational) -> Result<CheckReport> {
        assert!(n >= 1, "U_n is defined for n >= 1");
        self.check_admissible(n + 1)?;
        let (p1, p2) = self.closed_p1_p2(n)?;
        let un = self.u_n(n, beta)?;
        let tn = self.t_n(n, beta, &p1, &p2);
        let prev = self.solve_pn(n - 1)?;
        let mut report = CheckReport::passing(format!("lemma_un[{n}]"), n + 1, 3);
        let degree_ok = un.degree().is_none_or(|d| d < n);
        if !degree_ok {
            report.fail(un.coeff(n), (n, 0), format!("deg U_{n} = {:?}", un.degree()));
            return Ok(report);
        }
        let lu = self.apply_ln(n - 1, &un);
        if !lu.is_zero() {
            let m = lu.coeffs().iter().map(crate::checks::abs).max().unwrap_or_default();
            report.fail(m, (n, 1), format!("L_{} U_{n} = {lu}", n - 1));
            return Ok(report);
        }
        let diff = &un - &prev.scale(&tn);
        if !diff.is_zero() {
            let m = diff.coeffs().iter().map(crate::checks::abs).max().unwrap_or_default();
            report.fail(m, (n, 2), format!("U_{n} - t_n P_{} = {diff}", n - 1));
        }
        Ok(report)
    }

    /// Cross-checks the closed-form recurrence against the `U_n` route and
    /// the solved family.
    pub fn ttrr_cross_check(&self, nmax: usize) -> Result<CheckReport> {
        let rec = self.ttrr_coeffs(nmax)?;
        self.cross_check_recurrence(&rec)
    }

    /// Runs the cross-check against caller-supplied coefficients.
    ///
    /// For each `n < beta.len()`: (0) `beta_n` equals the `U_n` formula,
    /// (1) `gamma_n = t_n / (lambda_{n-1} - lambda_{n+1})`, (2) the solved
    /// polynomials satisfy `P_{n+1} = (mu - beta_n) P_n - gamma_n P_{n-1}`.
    /// The witness is `[n, which]`.
    pub fn cross_check_recurrence(&self, rec: &RecurrenceCoeffs) -> Result<CheckReport> {
        let nmax = rec.beta.len();
        self.check_admissible(nmax + 1)?;
        let family = self.solve_family(nmax + 1)?;
        let mut report = CheckReport::passing("ttrr_cross_check".into(), nmax, nmax);
        for n in 0..nmax {
            let (p1, p2) = self.closed_p1_p2(n)?;
            let beta = &rec.beta[n];
            let lemma_beta = self.beta_from_un(n, &p1);
            if &lemma_beta != beta {
                report.fail(crate::checks::abs(&(&lemma_beta - beta)), (n, 0), format!("beta_{n}"));
                return Ok(report);
            }
            if n >= 1 {
                let tn = self.t_n(n, &lemma_beta, &p1, &p2);
                let g = tn / (self.lambda_n(n - 1) - self.lambda_n(n + 1));
                let gamma = rec.gamma_at(n);
                if &g != gamma {
                    report.fail(crate::checks::abs(&(&g - gamma)), (n, 1), format!("gamma_{n}"));
                    return Ok(report);
                }
            }
            let pn = family.member(n);
            let mut rhs = &pn.mul_mu() - &pn.scale(beta);
            if n >= 1 {
                rhs = &rhs - &family.member(n - 1).scale(rec.gamma_at(n));
            }
            let diff = family.member(n + 1) - &rhs;
            if !diff.is_zero() {
                let m = diff.coeffs().iter().map(crate::checks::abs).max().unwrap_or_default();
                report.fail(m, (n, 2), format!("P_{} - (mu - beta_{n}) P_{n} + gamma_{n} P_{}", n + 1, n.max(1) - 1));
                return Ok(report);
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn racah_2_3_1_half() -> BochnerData {
        crate::families::RacahParams::new(int(2), int(3), int(1), frac(1, 2)).bochner()
    }

    fn data(a0: i64, a1: Rational, a2: Rational, b0: i64, b1: Rational) -> BochnerData {
        BochnerData::new(LatticeParams::new(frac(1, 3), frac(-2, 5)), int(a0), a1, a2, int(b0), b1)
    }

    #[test]
    fn lambda_examples() {
        let d = data(1, int(0), int(0), 2, int(0));
        assert_eq!(d.lambda_n(0), int(0));
        assert_eq!(d.lambda_n(3), int(12));
        let racah = crate::families::RacahParams::new(int(1), int(1), int(1), int(1)).bochner();
        assert_eq!(racah.a0, int(-1));
        assert_eq!(racah.b0, int(-4));
        assert_eq!(racah.lambda_n(2), int(-10));
    }

    #[test]
    fn uniqueness_examples() {
        let flat = data(0, int(1), int(1), 0, int(1));
        assert!(matches!(flat.check_uniqueness(1), Err(Error::DegenerateEigenvalues { n: 1, .. })));
        assert!(racah_2_3_1_half().check_uniqueness(10).is_ok());
        assert!(racah_2_3_1_half().check_admissible(10).is_ok());
        let d = data(1, int(0), int(0), -4, int(0));
        // lambda_0..4 = 0, -4, -6, -6, -4.
        assert_eq!(d.check_uniqueness(4), Err(Error::DegenerateEigenvalues { n: 4, m: 1 }));
        assert_eq!(d.check_admissible(4), Err(Error::DegenerateEigenvalues { n: 3, m: 2 }));
    }

    #[test]
    fn k_coeff_examples() {
        let d = racah_2_3_1_half();
        let k = d.k_coeffs(4, 0);
        assert_eq!(k, KCoeffs { k0: -d.lambda_n(4), k1: int(0), k2: int(0) });
        let k = d.k_coeffs(4, 1);
        assert_eq!(k.k0, &d.b0 - d.lambda_n(4));
        assert_eq!(k.k1, &d.b0 * d.params.f_n(0) + &d.b1);
        assert_eq!(k.k2, int(0));
        for j in 0..8 {
            assert_eq!(d.k_coeffs(5, j).k0, d.lambda_n(j) - d.lambda_n(5));
        }
    }

    #[test]
    fn ln_on_basis_has_three_terms() {
        let d = data(2, frac(1, 3), frac(-7, 2), -3, frac(5, 4));
        for n in 0..4 {
            for j in 0..=6 {
                let k = d.k_coeffs(n, j);
                let mut c = vec![int(0); j + 1];
                c[j] = k.k0.clone();
                if j >= 1 {
                    c[j - 1] = k.k1.clone();
                }
                if j >= 2 {
                    c[j - 2] = k.k2.clone();
                }
                let expect = ThetaPoly::new(d.params.clone(), c);
                assert_eq!(d.apply_ln(n, &ThetaPoly::basis(d.params.clone(), j)), expect);
            }
        }
    }

    #[test]
    fn ln_examples() {
        let d = racah_2_3_1_half();
        let p0 = ThetaPoly::basis(d.params.clone(), 0);
        assert_eq!(d.apply_ln(3, &p0), p0.scale(&-d.lambda_n(3)));
        for n in 1..6 {
            let pn = d.solve_pn(n).unwrap();
            assert!(d.apply_ln(n, &pn).is_zero());
            let prev = d.solve_pn(n - 1).unwrap();
            assert_eq!(
                d.apply_ln(n + 1, &prev),
                prev.scale(&(d.lambda_n(n - 1) - d.lambda_n(n + 1)))
            );
        }
    }

    #[test]
    fn solve_low_degrees() {
        let d = racah_2_3_1_half();
        assert_eq!(d.solve_pn(0).unwrap(), ThetaPoly::basis(d.params.clone(), 0));
        let p1 = d.solve_pn(1).unwrap();
        assert_eq!(p1.coeff(0), d.params.f_n(0) + &d.b1 / &d.b0);
        assert_eq!(d.closed_p1_p2(1).unwrap(), (d.params.f_n(0) + &d.b1 / &d.b0, int(0)));
        assert_eq!(d.closed_p1_p2(0).unwrap(), (int(0), int(0)));
    }

    #[test]
    fn closed_forms_match_solver() {
        let d = racah_2_3_1_half();
        for n in 1..=8 {
            let p = d.solve_pn(n).unwrap();
            let (p1, p2) = d.closed_p1_p2(n).unwrap();
            assert_eq!(p1, p.coeff(n - 1), "p1 at n={n}");
            if n >= 2 {
                assert_eq!(p2, p.coeff(n - 2), "p2 at n={n}");
            }
        }
    }

    #[test]
    fn beta0_formula() {
        let d = data(1, frac(2, 3), int(5), 3, frac(-7, 2));
        let rec = d.ttrr_coeffs(3).unwrap();
        assert_eq!(rec.beta[0], -&d.b1 / &d.b0);
    }

    #[test]
    fn degenerate_ttrr() {
        let d = data(1, int(0), int(0), -4, int(0));
        assert!(matches!(d.ttrr_coeffs(4), Err(Error::DegenerateEigenvalues { .. })));
        assert!(matches!(d.solve_pn(3), Err(Error::DegenerateEigenvalues { n: 3, m: 2 })));
    }

    #[test]
    fn cross_check_racah() {
        let d = racah_2_3_1_half();
        let r = d.ttrr_cross_check(8).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn cross_check_detects_bad_gamma() {
        let d = racah_2_3_1_half();
        let mut rec = d.ttrr_coeffs(6).unwrap();
        rec.gamma[0] += int(1);
        let r = d.cross_check_recurrence(&rec).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness, Some((1, 1)));
    }

    #[test]
    fn un_endpoint() {
        let d = racah_2_3_1_half();
        for n in 1..=6 {
            assert!(d.verify_un(n).unwrap().pass, "n={n}");
        }
        let u1 = d.u_n(1, &d.beta_from_un(1, &d.closed_p1_p2(1).unwrap().0)).unwrap();
        assert_eq!(u1.degree(), Some(0));
    }

    #[test]
    fn un_with_wrong_beta_keeps_degree_n() {
        let d = racah_2_3_1_half();
        let n = 3;
        let beta = d.beta_from_un(n, &d.closed_p1_p2(n).unwrap().0) + int(1);
        assert_eq!(d.u_n(n, &beta).unwrap().degree(), Some(n));
        let r = d.verify_un_with_beta(n, &beta).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness, Some((n, 0)));
    }
}
