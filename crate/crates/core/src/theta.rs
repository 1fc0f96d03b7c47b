//! Polynomials in the theta basis and the divided-difference calculus.
//!
//! `theta_n(t) = prod_{k<n} (mu(t) - f_k)` is a Newton basis in the lattice
//! variable with nodes `f_0, f_1, ...`. In that basis
//!
//! ```text
//! D theta_n  = n theta_{n-1}
//! S theta_n  = theta_n + g_n theta_{n-1}
//! mu theta_n = theta_{n+1} + f_n theta_n
//! ```
//!
//! so all three operators act on coefficient vectors with at most two
//! diagonals. The pointwise oracles at the bottom of the module evaluate the
//! raw half-step definitions and are independent of these coefficient maps.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{g_n, LatticeParams};
use crate::rational::{frac, half, int, Rational};

/// `sum_k coeffs[k] * theta_k(t)` on a fixed lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaPoly {
    pub params: LatticeParams,
    #[serde(with = "crate::rational::serde_vec")]
    coeffs: Vec<Rational>,
}

/// `sum_k coeffs[k] * mu^k`, independent of any lattice.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MuPoly {
    #[serde(with = "crate::rational::serde_vec")]
    coeffs: Vec<Rational>,
}

fn trim(v: &mut Vec<Rational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

impl ThetaPoly {
    pub fn new(params: LatticeParams, mut coeffs: Vec<Rational>) -> Self {
        trim(&mut coeffs);
        Self { params, coeffs }
    }

    pub fn zero(params: LatticeParams) -> Self {
        Self::new(params, Vec::new())
    }

    pub fn constant(params: LatticeParams, c: Rational) -> Self {
        Self::new(params, vec![c])
    }

    /// `theta_n`.
    pub fn basis(params: LatticeParams, n: usize) -> Self {
        let mut coeffs = vec![int(0); n + 1];
        coeffs[n] = int(1);
        Self::new(params, coeffs)
    }

    /// `mu(t)` itself, i.e. `theta_1 + f_0 theta_0`.
    pub fn mu(params: LatticeParams) -> Self {
        let f0 = params.f_n(0);
        Self::new(params, vec![f0, int(1)])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn same_lattice(&self, other: &Self) -> Result<()> {
        if self.params == other.params {
            Ok(())
        } else {
            Err(Error::MixedLattice)
        }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        // Horner in the Newton form: c0 + (mu - f0)(c1 + (mu - f1)(c2 + ...)).
        let m = self.params.mu_at(t);
        let mut acc = Rational::zero();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * (&m - self.params.f_n(k as i64)) + c;
        }
        acc
    }

    /// Divided difference `D`.
    pub fn apply_d(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * int(k as i64))
            .collect();
        Self::new(self.params.clone(), coeffs)
    }

    /// Mean operator `S`.
    pub fn apply_s(&self) -> Self {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|k| {
                let mut c = self.coeffs[k].clone();
                if k + 1 < n {
                    c += g_n(k as i64 + 1) * &self.coeffs[k + 1];
                }
                c
            })
            .collect();
        Self::new(self.params.clone(), coeffs)
    }

    /// Multiplication by `mu(t)`.
    pub fn mul_mu(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let n = self.coeffs.len();
        let coeffs = (0..=n)
            .map(|k| {
                let mut c = if k > 0 { self.coeffs[k - 1].clone() } else { Rational::zero() };
                if k < n {
                    c += self.params.f_n(k as i64) * &self.coeffs[k];
                }
                c
            })
            .collect();
        Self::new(self.params.clone(), coeffs)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.params.clone(), self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Ok(Self::new(self.params.clone(), coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Product through the monomial basis in `mu`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        let prod = &self.to_mu() * &other.to_mu();
        Ok(prod.to_theta(&self.params))
    }

    pub fn to_mu(&self) -> MuPoly {
        theta_to_mu(self)
    }
}

impl Neg for &ThetaPoly {
    type Output = ThetaPoly;
    fn neg(self) -> ThetaPoly {
        ThetaPoly::new(self.params.clone(), self.coeffs.iter().map(|c| -c).collect())
    }
}

// The operator forms panic on mixed lattices; use the `try_*` methods when
// operands come from untrusted input.
impl Add for &ThetaPoly {
    type Output = ThetaPoly;
    fn add(self, rhs: &ThetaPoly) -> ThetaPoly {
        self.try_add(rhs).expect("adding polynomials on different lattices")
    }
}

impl Sub for &ThetaPoly {
    type Output = ThetaPoly;
    fn sub(self, rhs: &ThetaPoly) -> ThetaPoly {
        self.try_sub(rhs).expect("subtracting polynomials on different lattices")
    }
}

impl Mul for &ThetaPoly {
    type Output = ThetaPoly;
    fn mul(self, rhs: &ThetaPoly) -> ThetaPoly {
        self.try_mul(rhs).expect("multiplying polynomials on different lattices")
    }
}

impl fmt::Display for ThetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({})*theta_{k}", crate::rational::format(c)))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl MuPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        trim(&mut coeffs);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval_at_mu(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_theta(&self, params: &LatticeParams) -> ThetaPoly {
        mu_to_theta(self, params)
    }
}

impl Mul for &MuPoly {
    type Output = MuPoly;
    fn mul(self, rhs: &MuPoly) -> MuPoly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return MuPoly::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        MuPoly::new(out)
    }
}

/// `theta_n(t)` by both the Pochhammer product and the Newton product.
///
/// The two routes are asserted equal on every call.
pub fn theta_eval(n: usize, t: &Rational, params: &LatticeParams) -> Rational {
    let newton = theta_newton(n, t, params);
    let poch = theta_pochhammer(n, t, params);
    assert_eq!(newton, poch, "theta_{n}({t}) disagrees between product forms");
    newton
}

fn theta_newton(n: usize, t: &Rational, params: &LatticeParams) -> Rational {
    let m = params.mu_at(t);
    (0..n).fold(Rational::one(), |acc, k| acc * (&m - params.f_n(k as i64)))
}

fn theta_pochhammer(n: usize, t: &Rational, params: &LatticeParams) -> Rational {
    // (-4)^{-n} (2t + 1/2 + c2)_n (-2t + 1/2 - c2)_n
    let two_t = int(2) * t;
    let a = &two_t + half() + &params.c2;
    let b = -&two_t + half() - &params.c2;
    let mut acc = Rational::one();
    for k in 0..n {
        let k = int(k as i64);
        acc = acc * (&a + &k) * (&b + &k) / int(-4);
    }
    acc
}

/// `q(mu) * p` by Horner recursion on [`ThetaPoly::mul_mu`].
pub fn apply_mu_poly(q: &MuPoly, p: &ThetaPoly) -> ThetaPoly {
    let mut acc = ThetaPoly::zero(p.params.clone());
    for c in q.coeffs.iter().rev() {
        acc = &acc.mul_mu() + &p.scale(c);
    }
    acc
}

/// Newton-to-monomial conversion with nodes `f_k`.
pub fn theta_to_mu(p: &ThetaPoly) -> MuPoly {
    // acc <- acc * (mu - f_k) + c_k, from the top coefficient down.
    let mut acc: Vec<Rational> = Vec::new();
    for (k, c) in p.coeffs.iter().enumerate().rev() {
        let fk = p.params.f_n(k as i64);
        let mut next = vec![Rational::zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * &fk;
        }
        next[0] += c;
        acc = next;
    }
    MuPoly::new(acc)
}

pub fn mu_to_theta(q: &MuPoly, params: &LatticeParams) -> ThetaPoly {
    apply_mu_poly(q, &ThetaPoly::constant(params.clone(), int(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointOp {
    D,
    S,
}

/// Divided difference of an arbitrary function evaluated from its values at
/// `t +- 1/2`.
pub fn divided_difference_at<F>(params: &LatticeParams, f: F, t: &Rational) -> Result<Rational>
where
    F: Fn(&Rational) -> Result<Rational>,
{
    let mesh = params.mesh_at(t);
    if mesh.is_zero() {
        return Err(Error::SingularPoint(t.clone()));
    }
    Ok((f(&(t + half()))? - f(&(t - half()))?) / mesh)
}

/// Mean `(f(t+1/2) + f(t-1/2)) / 2`.
pub fn mean_at<F>(f: F, t: &Rational) -> Result<Rational>
where
    F: Fn(&Rational) -> Result<Rational>,
{
    Ok((f(&(t + half()))? + f(&(t - half()))?) * frac(1, 2))
}

/// Raw pointwise `D p` or `S p` from evaluations of `p` at `t +- 1/2`.
pub fn pointwise_op_oracle(op: PointOp, p: &ThetaPoly, t: &Rational) -> Result<Rational> {
    let f = |x: &Rational| Ok(p.eval(x));
    match op {
        PointOp::D => divided_difference_at(&p.params, f, t),
        PointOp::S => mean_at(f, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z() -> LatticeParams {
        LatticeParams::zero()
    }

    fn tp(params: &LatticeParams, c: &[Rational]) -> ThetaPoly {
        ThetaPoly::new(params.clone(), c.to_vec())
    }

    #[test]
    fn theta_eval_examples() {
        assert_eq!(theta_eval(0, &frac(7, 3), &z()), int(1));
        assert_eq!(theta_eval(2, &int(1), &z()), frac(105, 256));
        // mu(t) = f_0 = 1/16 at t = 1/4.
        assert_eq!(theta_eval(1, &frac(1, 4), &z()), int(0));
    }

    #[test]
    fn theta_is_c3_independent() {
        let t = frac(5, 7);
        for n in 0..6 {
            let a = theta_eval(n, &t, &LatticeParams::new(frac(2, 3), frac(1, 5)));
            let b = theta_eval(n, &t, &LatticeParams::new(frac(2, 3), frac(-9, 4)));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ThetaPoly::zero(z()).eval(&int(3)), int(0));
        let t = frac(3, 5);
        assert_eq!(ThetaPoly::basis(z(), 1).eval(&t), &t * &t - frac(1, 16));
        let p = tp(&z(), &[int(0), int(5), int(1)]);
        assert_eq!(p.eval(&int(1)), frac(105, 256) + int(5) * frac(15, 16));
    }

    #[test]
    fn d_examples() {
        assert_eq!(ThetaPoly::basis(z(), 3).apply_d(), tp(&z(), &[int(0), int(0), int(3)]));
        assert!(ThetaPoly::constant(z(), int(9)).apply_d().is_zero());
        let p = tp(&z(), &[int(0), int(5), int(1)]);
        assert_eq!(p.apply_d(), tp(&z(), &[int(5), int(2)]));
    }

    #[test]
    fn s_examples() {
        assert_eq!(ThetaPoly::basis(z(), 0).apply_s(), ThetaPoly::basis(z(), 0));
        assert_eq!(
            ThetaPoly::basis(z(), 2).apply_s(),
            tp(&z(), &[int(0), frac(3, 2), int(1)])
        );
        let params = LatticeParams::new(frac(3, 7), frac(-2, 3));
        let mu = ThetaPoly::mu(params.clone());
        let expect = &mu + &ThetaPoly::constant(params, frac(1, 4));
        assert_eq!(mu.apply_s(), expect);
    }

    #[test]
    fn mul_mu_examples() {
        let params = LatticeParams::new(frac(1, 2), int(3));
        let p0 = ThetaPoly::basis(params.clone(), 0).mul_mu();
        assert_eq!(p0, tp(&params, &[params.f_n(0), int(1)]));
        assert_eq!(
            ThetaPoly::basis(z(), 1).mul_mu(),
            tp(&z(), &[int(0), frac(9, 16), int(1)])
        );
        let monic = tp(&params, &[int(4), frac(-1, 3), int(1)]);
        let m = monic.mul_mu();
        assert!(m.is_monic());
        assert_eq!(m.degree(), Some(3));
    }

    #[test]
    fn apply_mu_poly_examples() {
        let p = tp(&z(), &[int(2), frac(1, 3)]);
        assert_eq!(apply_mu_poly(&MuPoly::new(vec![int(1)]), &p), p);
        assert_eq!(apply_mu_poly(&MuPoly::new(vec![int(0), int(1)]), &p), p.mul_mu());
        let sq = apply_mu_poly(&MuPoly::new(vec![int(0), int(0), int(1)]), &ThetaPoly::basis(z(), 0));
        assert_eq!(sq, tp(&z(), &[frac(1, 256), frac(5, 8), int(1)]));
    }

    #[test]
    fn basis_change_examples() {
        let params = LatticeParams::new(frac(2, 5), frac(1, 3));
        let (f0, f1) = (params.f_n(0), params.f_n(1));
        assert_eq!(
            theta_to_mu(&ThetaPoly::basis(params.clone(), 1)),
            MuPoly::new(vec![-&f0, int(1)])
        );
        assert_eq!(
            theta_to_mu(&ThetaPoly::basis(params.clone(), 2)),
            MuPoly::new(vec![&f0 * &f1, -(&f0 + &f1), int(1)])
        );
    }

    #[test]
    fn oracle_examples() {
        let th2 = ThetaPoly::basis(z(), 2);
        assert_eq!(pointwise_op_oracle(PointOp::D, &th2, &int(1)).unwrap(), frac(15, 8));
        assert_eq!(th2.apply_d().eval(&int(1)), frac(15, 8));
        let params = LatticeParams::new(frac(1, 3), frac(4, 5));
        let th1 = ThetaPoly::basis(params.clone(), 1);
        let t = frac(-7, 4);
        assert_eq!(
            pointwise_op_oracle(PointOp::S, &th1, &t).unwrap(),
            params.mu_at(&t) + frac(1, 4) - params.f_n(0)
        );
        let sing = params.singular_point();
        assert_eq!(
            pointwise_op_oracle(PointOp::D, &th1, &sing),
            Err(Error::SingularPoint(sing.clone()))
        );
    }

    #[test]
    fn mixed_lattice_is_error() {
        let a = ThetaPoly::basis(z(), 1);
        let b = ThetaPoly::basis(LatticeParams::new(int(1), int(0)), 1);
        assert_eq!(a.try_add(&b), Err(Error::MixedLattice));
        assert_eq!(a.try_mul(&b), Err(Error::MixedLattice));
    }

    #[test]
    fn product_matches_pointwise() {
        let params = LatticeParams::new(frac(3, 4), frac(-1, 2));
        let f = tp(&params, &[int(1), frac(2, 3), int(-1), int(2)]);
        let g = tp(&params, &[frac(-5, 2), int(0), int(1)]);
        let fg = &f * &g;
        assert_eq!(fg.degree(), Some(5));
        for k in -4..6 {
            let t = frac(k, 3);
            assert_eq!(fg.eval(&t), f.eval(&t) * g.eval(&t));
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..9).prop_map(|(p, q)| frac(p, q))
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = ThetaPoly> {
        (
            small_rational(),
            small_rational(),
            prop::collection::vec(small_rational(), 0..=max_deg + 1),
        )
            .prop_map(|(c2, c3, c)| ThetaPoly::new(LatticeParams::new(c2, c3), c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn coefficient_ops_match_oracle(p in arb_poly(8), t in small_rational()) {
            prop_assume!(!p.params.mesh_at(&t).is_zero());
            prop_assert_eq!(p.apply_d().eval(&t), pointwise_op_oracle(PointOp::D, &p, &t).unwrap());
            prop_assert_eq!(p.apply_s().eval(&t), pointwise_op_oracle(PointOp::S, &p, &t).unwrap());
            prop_assert_eq!(p.mul_mu().eval(&t), p.params.mu_at(&t) * p.eval(&t));
        }

        #[test]
        fn degree_laws(p in arb_poly(8)) {
            match p.degree() {
                None => prop_assert!(p.apply_d().is_zero() && p.apply_s().is_zero()),
                Some(d) => {
                    prop_assert_eq!(p.apply_d().degree(), d.checked_sub(1));
                    prop_assert_eq!(p.apply_s().degree(), Some(d));
                }
            }
        }

        #[test]
        fn basis_round_trip(p in arb_poly(6)) {
            let q = theta_to_mu(&p);
            prop_assert_eq!(q.degree(), p.degree());
            prop_assert_eq!(mu_to_theta(&q, &p.params), p.clone());
            let t = frac(3, 7);
            prop_assert_eq!(q.eval_at_mu(&p.params.mu_at(&t)), p.eval(&t));
        }

        #[test]
        fn eval_matches_basis_sum(p in arb_poly(6), t in small_rational()) {
            let direct: Rational = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c * theta_eval(k, &t, &p.params))
                .sum();
            prop_assert_eq!(p.eval(&t), direct);
        }
    }
}
