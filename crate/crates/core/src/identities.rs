//! Randomized checks of the operator product rules
//!
//! ```text
//! a) D[fg]  = Sf Dg + Df Sg
//! b) S[fg]  = m2 Df Dg + Sf Sg
//! c) S mu   = mu + 1/4
//! d) D S f  = S D f + m1 D^2 f
//! e) S^2 f  = m1 S D f + m2 D^2 f + f
//! ```
//!
//! Every rule is evaluated twice per sample point: the left side through the
//! raw half-step oracle against the right side through coefficient maps, and
//! both sides through coefficient maps. Both must agree exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::lattice::{m1, LatticeParams};
use crate::rational::{frac, Rational};
use crate::theta::{divided_difference_at, mean_at, ThetaPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    A,
    B,
    C,
    D,
    E,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::A, Rule::B, Rule::C, Rule::D, Rule::E];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityConfig {
    /// Total number of random `(f, g)` pairs, spread over the lattices.
    pub trials: usize,
    pub lattices: usize,
    pub max_degree: usize,
    pub seed: u64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self { trials: 100, lattices: 10, max_degree: 6, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityFailure {
    pub trial: usize,
    pub rule: Rule,
    #[serde(with = "crate::rational::serde_str")]
    pub c2: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub c3: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub t: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub trials: usize,
    pub lattices: usize,
    pub max_degree: usize,
    pub points_checked: usize,
    pub pass: bool,
    pub failures: Vec<IdentityFailure>,
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    frac(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

pub fn random_lattice(rng: &mut ChaCha8Rng) -> LatticeParams {
    LatticeParams::new(small_rational(rng), small_rational(rng))
}

/// Random polynomial of exact degree `0..=max_degree`.
pub fn random_theta(rng: &mut ChaCha8Rng, params: &LatticeParams, max_degree: usize) -> ThetaPoly {
    let deg = rng.gen_range(0..=max_degree);
    let mut coeffs: Vec<Rational> = (0..=deg).map(|_| small_rational(rng)).collect();
    if coeffs[deg] == frac(0, 1) {
        coeffs[deg] = frac(1, 1);
    }
    ThetaPoly::new(params.clone(), coeffs)
}

fn m2_poly(params: &LatticeParams) -> ThetaPoly {
    &ThetaPoly::mu(params.clone()) + &ThetaPoly::constant(params.clone(), params.delta_x())
}

/// Coefficient-level `(LHS, RHS)` of a rule.
fn rule_polys(rule: Rule, f: &ThetaPoly, g: &ThetaPoly) -> Result<(ThetaPoly, ThetaPoly)> {
    let params = &f.params;
    let m2 = m2_poly(params);
    Ok(match rule {
        Rule::A => (
            f.try_mul(g)?.apply_d(),
            &(&f.apply_s() * &g.apply_d()) + &(&f.apply_d() * &g.apply_s()),
        ),
        Rule::B => (
            f.try_mul(g)?.apply_s(),
            &(&m2 * &(&f.apply_d() * &g.apply_d())) + &(&f.apply_s() * &g.apply_s()),
        ),
        Rule::C => {
            let mu = ThetaPoly::mu(params.clone());
            (mu.apply_s(), &mu + &ThetaPoly::constant(params.clone(), frac(1, 4)))
        }
        Rule::D => (
            f.apply_s().apply_d(),
            &f.apply_d().apply_s() + &f.apply_d().apply_d().scale(&m1()),
        ),
        Rule::E => (
            f.apply_s().apply_s(),
            &(&f.apply_d().apply_s().scale(&frac(1, 2)) + &(&m2 * &f.apply_d().apply_d())) + f,
        ),
    })
}

/// Left side of a rule from raw evaluations at half steps around `t`.
fn rule_oracle(rule: Rule, f: &ThetaPoly, g: &ThetaPoly, t: &Rational) -> Result<Rational> {
    let params = &f.params;
    let raw_f = |x: &Rational| Ok(f.eval(x));
    let raw_s = |x: &Rational| mean_at(raw_f, x);
    let fg = |x: &Rational| Ok(f.eval(x) * g.eval(x));
    match rule {
        Rule::A => divided_difference_at(params, fg, t),
        Rule::B => mean_at(fg, t),
        Rule::C => mean_at(|x: &Rational| Ok(params.mu_at(x)), t),
        Rule::D => divided_difference_at(params, raw_s, t),
        Rule::E => mean_at(raw_s, t),
    }
}

/// Draws `count` rational points where every nested half-step avoids the
/// singular point of `D`.
fn sample_points(rng: &mut ChaCha8Rng, params: &LatticeParams, count: usize) -> Vec<Rational> {
    let bad = params.singular_point();
    let offsets = [frac(0, 1), frac(1, 2), frac(-1, 2)];
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let t = frac(rng.gen_range(-40..=40), rng.gen_range(1..=7));
        if offsets.iter().any(|o| &t + o == bad) || out.contains(&t) {
            continue;
        }
        out.push(t);
    }
    out
}

struct Trial {
    index: usize,
    f: ThetaPoly,
    g: ThetaPoly,
    points: Vec<Rational>,
}

fn run_trial(trial: &Trial) -> Result<(usize, Vec<IdentityFailure>)> {
    let params = &trial.f.params;
    let mut failures = Vec::new();
    let mut checked = 0;
    for rule in Rule::ALL {
        let (lhs, rhs) = rule_polys(rule, &trial.f, &trial.g)?;
        for t in &trial.points {
            let want = rhs.eval(t);
            checked += 1;
            if rule_oracle(rule, &trial.f, &trial.g, t)? != want || lhs.eval(t) != want {
                failures.push(IdentityFailure {
                    trial: trial.index,
                    rule,
                    c2: params.c2.clone(),
                    c3: params.c3.clone(),
                    t: t.clone(),
                });
            }
        }
    }
    Ok((checked, failures))
}

/// All random draws happen up front on one seeded stream; trials then run
/// on scoped threads and are merged in trial order.
pub fn run_product_rules(cfg: &IdentityConfig) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lattices: Vec<LatticeParams> =
        (0..cfg.lattices.max(1)).map(|_| random_lattice(&mut rng)).collect();
    let trials: Vec<Trial> = (0..cfg.trials)
        .map(|index| {
            let params = &lattices[index % lattices.len()];
            let f = random_theta(&mut rng, params, cfg.max_degree);
            let g = random_theta(&mut rng, params, cfg.max_degree);
            let deg = f.degree().unwrap_or(0).max(g.degree().unwrap_or(0));
            let points = sample_points(&mut rng, params, 2 * deg + 3);
            Trial { index, f, g, points }
        })
        .collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = trials.len().div_ceil(workers).max(1);
    let results: Vec<Result<(usize, Vec<IdentityFailure>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = trials
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(run_trial).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("identity worker panicked"))
            .collect()
    });
    let mut failures = Vec::new();
    let mut points_checked = 0;
    for r in results {
        let (checked, mut fails) = r?;
        points_checked += checked;
        failures.append(&mut fails);
    }
    Ok(IdentityReport {
        seed: cfg.seed,
        trials: cfg.trials,
        lattices: lattices.len(),
        max_degree: cfg.max_degree,
        points_checked,
        pass: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn small_run_passes() {
        let cfg = IdentityConfig { trials: 12, lattices: 3, max_degree: 4, seed: 7 };
        let r = run_product_rules(&cfg).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert!(r.points_checked >= 12 * 3 * 5);
    }

    #[test]
    fn deterministic() {
        let cfg = IdentityConfig { trials: 4, lattices: 2, max_degree: 3, seed: 99 };
        assert_eq!(run_product_rules(&cfg).unwrap(), run_product_rules(&cfg).unwrap());
    }

    #[test]
    fn wrong_offset_breaks_rule_b() {
        // With m2 shifted by one the rule must fail somewhere.
        let p = LatticeParams::new(frac(1, 3), int(2));
        let f = ThetaPoly::new(p.clone(), vec![int(1), int(2), int(1)]);
        let g = ThetaPoly::new(p.clone(), vec![int(0), int(1)]);
        let t = frac(5, 7);
        let oracle = rule_oracle(Rule::B, &f, &g, &t).unwrap();
        assert_eq!(oracle, rule_polys(Rule::B, &f, &g).unwrap().1.eval(&t));
        let shifted = &(&(&m2_poly(&p) + &ThetaPoly::constant(p.clone(), int(1)))
            * &(&f.apply_d() * &g.apply_d()))
            + &(&f.apply_s() * &g.apply_s());
        assert_ne!(shifted.eval(&t), oracle);
    }

    #[test]
    fn samples_avoid_singular_half_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = LatticeParams::new(int(1), int(0));
        for t in sample_points(&mut rng, &p, 200) {
            for o in [frac(0, 1), frac(1, 2), frac(-1, 2)] {
                assert_ne!(&t + o, frac(-1, 2));
            }
        }
    }
}
