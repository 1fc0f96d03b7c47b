//! Scalars of the quadratic lattice `mu(t) = t^2 + c2 t + c3`.

use serde::{Deserialize, Serialize};

use crate::rational::{frac, half, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeParams {
    #[serde(with = "crate::rational::serde_str")]
    pub c2: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub c3: Rational,
}

impl LatticeParams {
    pub fn new(c2: Rational, c3: Rational) -> Self {
        Self { c2, c3 }
    }

    /// The symmetric lattice `mu(t) = t^2`.
    pub fn zero() -> Self {
        Self::new(int(0), int(0))
    }

    pub fn mu_at(&self, t: &Rational) -> Rational {
        t * t + &self.c2 * t + &self.c3
    }

    /// `f_n = -c2^2/4 + (2n+1)^2/16 + c3`, the diagonal of `mu * theta_n`.
    ///
    /// Negative `n` is accepted; closed forms evaluate `f_{n-2}` and friends
    /// under a vanishing factor for small `n`.
    pub fn f_n(&self, n: i64) -> Rational {
        let odd = int(2 * n + 1);
        -(&self.c2 * &self.c2) / int(4) + &odd * &odd / int(16) + &self.c3
    }

    /// `c3 + 1/16 - c2^2/4`, which equals `f_0`.
    pub fn kappa(&self) -> Rational {
        &self.c3 + frac(1, 16) - &self.c2 * &self.c2 / int(4)
    }

    /// Offset in `m2(t) = mu(t) + delta_x`; forced to `c2^2/4 - c3` by the
    /// product rule for `S[fg]`, making `m2(t) = (t + c2/2)^2`.
    pub fn delta_x(&self) -> Rational {
        &self.c2 * &self.c2 / int(4) - &self.c3
    }

    pub fn m2_at(&self, t: &Rational) -> Rational {
        self.mu_at(t) + self.delta_x()
    }

    /// `mu(t+1/2) - mu(t-1/2) = 2t + c2`.
    pub fn mesh_at(&self, t: &Rational) -> Rational {
        self.mu_at(&(t + half())) - self.mu_at(&(t - half()))
    }

    /// The single point where `D` is undefined.
    pub fn singular_point(&self) -> Rational {
        -&self.c2 / int(2)
    }
}

/// `g_n = n(2n-1)/4`, the subdiagonal of `S theta_n`.
pub fn g_n(n: i64) -> Rational {
    frac(n * (2 * n - 1), 4)
}

/// `m1 = 1/2` in `D S f = S D f + m1 D^2 f`.
pub fn m1() -> Rational {
    half()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lat(c2: Rational, c3: Rational) -> LatticeParams {
        LatticeParams::new(c2, c3)
    }

    #[test]
    fn mu_examples() {
        assert_eq!(LatticeParams::zero().mu_at(&int(2)), int(4));
        assert_eq!(lat(int(3), int(0)).mu_at(&int(1)), int(4));
        let p = lat(frac(5, 3), frac(-2, 7));
        let v = p.singular_point();
        assert_eq!(p.mu_at(&v), &p.c3 - &p.c2 * &p.c2 / int(4));
    }

    #[test]
    fn f_examples() {
        assert_eq!(LatticeParams::zero().f_n(0), frac(1, 16));
        assert_eq!(lat(int(3), int(0)).f_n(0), frac(-35, 16));
        let p = lat(frac(1, 3), frac(2, 5));
        for n in 0..=20 {
            assert_eq!(p.f_n(n + 1) - p.f_n(n), frac(n + 1, 2));
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_n(0), int(0));
        assert_eq!(g_n(1), frac(1, 4));
        assert_eq!(g_n(2), frac(3, 2));
        for n in 0..=20 {
            assert_eq!(g_n(n + 1) - g_n(n), frac(4 * n + 1, 4));
        }
    }

    #[test]
    fn difference_identities_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let p = lat(
                frac(rng.gen_range(-9..9), rng.gen_range(1..6)),
                frac(rng.gen_range(-9..9), rng.gen_range(1..6)),
            );
            for n in 0..50 {
                assert_eq!(p.f_n(n + 1) - p.f_n(n), frac(n + 1, 2));
                assert_eq!(g_n(n + 1) - g_n(n), frac(4 * n + 1, 4));
                let sq = int((n + 1) * (n + 1));
                assert_eq!(p.f_n(n + 1) + p.f_n(n), sq / int(2) + int(2) * p.kappa());
            }
        }
    }

    #[test]
    fn mesh_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = lat(frac(7, 3), frac(-1, 9));
        for _ in 0..50 {
            let t = frac(rng.gen_range(-100..100), rng.gen_range(1..30));
            assert_eq!(p.mesh_at(&t), int(2) * &t + &p.c2);
        }
        assert_eq!(p.mesh_at(&p.singular_point()), int(0));
    }

    #[test]
    fn m2_is_square() {
        let p = lat(frac(3, 2), frac(5, 7));
        let t = frac(2, 3);
        let s = &t + &p.c2 / int(2);
        assert_eq!(p.m2_at(&t), &s * &s);
    }
}
