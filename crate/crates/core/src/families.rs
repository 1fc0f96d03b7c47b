//! Family presets and custom input.
//!
//! Racah polynomials are evaluated straight from their terminating `4F3`
//! series, which gives an oracle that shares no code with the Bochner
//! solver. Values are turned back into theta coefficients by Newton
//! interpolation in the lattice variable.

use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::Value;

use crate::bochner::BochnerData;
use crate::error::{Error, Result};
use crate::family::PolyFamily;
use crate::lattice::LatticeParams;
use crate::rational::{frac, half, int, Rational};
use crate::theta::{mu_to_theta, MuPoly, ThetaPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RacahParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub delta: Rational,
}

fn pochhammer(x: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, k| acc * (x + int(k as i64)))
}

impl RacahParams {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational, delta: Rational) -> Self {
        Self { alpha, beta, gamma, delta }
    }

    /// `mu(t) = t(t + gamma + delta + 1)`.
    pub fn lattice(&self) -> LatticeParams {
        LatticeParams::new(&self.gamma + &self.delta + int(1), int(0))
    }

    /// Divided-difference equation of the Racah family in Bochner form.
    pub fn bochner(&self) -> BochnerData {
        let (a, b, g, d) = (&self.alpha, &self.beta, &self.gamma, &self.delta);
        let one = int(1);
        let a1 = half()
            * (-a * (int(2) * b + d + g + int(3)) + b * (d - g - int(3))
                - int(2) * (d * g + d + g + int(2)));
        let a2 = -half() * (a + &one) * (g + &one) * (b + d + &one) * (d + g + &one);
        let b0 = -(a + b + int(2));
        let b1 = -((a + &one) * (g + &one) * (b + d + &one));
        BochnerData::new(self.lattice(), int(-1), a1, a2, b0, b1)
    }

    /// Monic `r_n(t)` from the terminating `4F3` sum.
    pub fn eval(&self, n: usize, t: &Rational) -> Result<Rational> {
        let (a, b, g, d) = (&self.alpha, &self.beta, &self.gamma, &self.delta);
        let one = int(1);
        let lower = [a + &one, b + d + &one, g + &one];
        let top = int(n as i64) + a + b + &one;
        let norm = pochhammer(&top, n);
        if norm.is_zero() {
            return Err(Error::ParameterPole(format!("(n+alpha+beta+1)_n vanishes at n = {n}")));
        }
        for (i, l) in lower.iter().enumerate() {
            if pochhammer(l, n).is_zero() {
                return Err(Error::ParameterPole(format!(
                    "lower parameter {i} ({l}) hits a nonpositive integer below n = {n}"
                )));
            }
        }
        let upper = [int(-(n as i64)), top, -t, t + g + d + &one];
        let mut term = Rational::one();
        let mut sum = Rational::one();
        for k in 0..n {
            let ki = int(k as i64);
            let num: Rational = upper.iter().map(|u| u + &ki).product();
            let den: Rational = lower.iter().map(|l| l + &ki).product::<Rational>() * (&ki + &one);
            term = term * num / den;
            sum += &term;
        }
        let lead: Rational = lower.iter().map(|l| pochhammer(l, n)).product();
        Ok(lead / norm * sum)
    }

    /// `P_0..P_{count-1}` reconstructed from oracle values at the default nodes.
    pub fn oracle_family(&self, count: usize) -> Result<PolyFamily> {
        let params = self.lattice();
        let evals = (0..count)
            .map(|n| {
                let nodes = default_nodes(&params, n + 1);
                nodes
                    .into_iter()
                    .map(|t| self.eval(n, &t).map(|v| (t, v)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        family_from_evals(&evals, &params)
    }
}

pub fn racah_bochner(rp: &RacahParams) -> BochnerData {
    rp.bochner()
}

pub fn racah_eval(rp: &RacahParams, n: usize, t: &Rational) -> Result<Rational> {
    rp.eval(n, t)
}

/// `t = 0, 1, ..., count-1`, shifted by halves until the lattice values are
/// pairwise distinct.
pub fn default_nodes(params: &LatticeParams, count: usize) -> Vec<Rational> {
    let mut shift = Rational::zero();
    loop {
        let nodes: Vec<Rational> = (0..count).map(|i| int(i as i64) + &shift).collect();
        if first_collision(params, &nodes).is_none() {
            return nodes;
        }
        shift += half();
    }
}

fn first_collision(params: &LatticeParams, nodes: &[Rational]) -> Option<(usize, usize)> {
    let mus: Vec<Rational> = nodes.iter().map(|t| params.mu_at(t)).collect();
    (0..mus.len()).find_map(|i| (i + 1..mus.len()).find(|&j| mus[i] == mus[j]).map(|j| (i, j)))
}

/// Newton interpolation in `mu` through `(t_i, value_i)`.
pub fn interpolate(params: &LatticeParams, points: &[(Rational, Rational)]) -> Result<ThetaPoly> {
    let ts: Vec<Rational> = points.iter().map(|(t, _)| t.clone()).collect();
    if let Some((i, j)) = first_collision(params, &ts) {
        return Err(Error::NodesCollide(i, j));
    }
    let xs: Vec<Rational> = ts.iter().map(|t| params.mu_at(t)).collect();
    let mut dd: Vec<Rational> = points.iter().map(|(_, v)| v.clone()).collect();
    for level in 1..xs.len() {
        for i in (level..xs.len()).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Newton form in mu with nodes x_i, expanded to monomials by Horner.
    let mut acc: Vec<Rational> = Vec::new();
    for i in (0..xs.len()).rev() {
        let mut next = vec![Rational::zero(); acc.len() + 1];
        for (k, a) in acc.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * &xs[i];
        }
        next[0] += &dd[i];
        acc = next;
    }
    Ok(mu_to_theta(&MuPoly::new(acc), params))
}

/// Degree-`n` interpolants of `evals[n]` (which must hold `n+1` points),
/// each required to be monic of exact degree `n`.
pub fn family_from_evals(
    evals: &[Vec<(Rational, Rational)>],
    params: &LatticeParams,
) -> Result<PolyFamily> {
    let mut members = Vec::with_capacity(evals.len());
    for (n, pts) in evals.iter().enumerate() {
        if pts.len() != n + 1 {
            return Err(Error::Parse(format!("degree {n} needs {} points, got {}", n + 1, pts.len())));
        }
        let p = interpolate(params, pts)?;
        if p.degree() != Some(n) || !p.is_monic() {
            return Err(Error::NotMonic(n));
        }
        members.push(p);
    }
    PolyFamily::new(params.clone(), members)
}

/// A validated custom input document.
#[derive(Debug, Clone, PartialEq)]
pub enum CustomInput {
    Bochner(BochnerData),
    Family(PolyFamily),
}

impl CustomInput {
    pub fn params(&self) -> &LatticeParams {
        match self {
            CustomInput::Bochner(d) => &d.params,
            CustomInput::Family(f) => f.params(),
        }
    }
}

#[derive(Deserialize)]
struct LatticeDoc {
    c2: String,
    c3: String,
}

fn rat_field(obj: &Value, key: &str) -> Result<Rational> {
    match obj.get(key) {
        Some(Value::String(s)) => crate::rational::parse(s),
        Some(Value::Number(n)) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
        Some(other) => Err(Error::Parse(format!("field {key:?} must be a \"p/q\" string, got {other}"))),
        None => Err(Error::Parse(format!("missing field {key:?}"))),
    }
}

fn bochner_from_doc(params: LatticeParams, doc: &Value) -> Result<BochnerData> {
    // Flat {a0..b1}, or nested {phi: {a0,a1,a2}, psi|tau: {b0,b1}}.
    let phi = doc.get("phi").unwrap_or(doc);
    let psi = doc.get("psi").or_else(|| doc.get("tau")).unwrap_or(doc);
    Ok(BochnerData::new(
        params,
        rat_field(phi, "a0")?,
        rat_field(phi, "a1")?,
        rat_field(phi, "a2")?,
        rat_field(psi, "b0")?,
        rat_field(psi, "b1")?,
    ))
}

/// Parses a configuration document.
///
/// Accepted shapes: `{lattice: {c2, c3}, bochner: {...}}`,
/// `{lattice, family: [[row]...]}` (row `n` lists the theta coefficients of
/// `P_n`, low to high) and `{racah: {alpha, beta, gamma, delta}}`. When
/// `admissible_up_to` is given, Bochner data is checked eagerly.
pub fn load_custom(source: &str, admissible_up_to: Option<usize>) -> Result<CustomInput> {
    let doc: Value = serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(r) = doc.get("racah") {
        let rp = RacahParams::new(
            rat_field(r, "alpha")?,
            rat_field(r, "beta")?,
            rat_field(r, "gamma")?,
            rat_field(r, "delta")?,
        );
        let data = rp.bochner();
        if let Some(n) = admissible_up_to {
            data.check_admissible(n)?;
        }
        return Ok(CustomInput::Bochner(data));
    }
    let lat: LatticeDoc = doc
        .get("lattice")
        .ok_or_else(|| Error::Parse("missing \"lattice\"".into()))
        .and_then(|v| serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string())))?;
    let params = LatticeParams::new(crate::rational::parse(&lat.c2)?, crate::rational::parse(&lat.c3)?);
    match (doc.get("bochner"), doc.get("family")) {
        (Some(b), None) => {
            let data = bochner_from_doc(params, b)?;
            if let Some(n) = admissible_up_to {
                data.check_admissible(n)?;
            }
            Ok(CustomInput::Bochner(data))
        }
        (None, Some(rows)) => {
            let rows: Vec<Vec<String>> =
                serde_json::from_value(rows.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            let members = rows
                .iter()
                .map(|row| {
                    let coeffs =
                        row.iter().map(|s| crate::rational::parse(s)).collect::<Result<Vec<_>>>()?;
                    Ok(ThetaPoly::new(params.clone(), coeffs))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CustomInput::Family(PolyFamily::new(params, members)?))
        }
        (Some(_), Some(_)) => Err(Error::Parse("give either \"bochner\" or \"family\", not both".into())),
        (None, None) => Err(Error::Parse("missing \"bochner\" or \"family\"".into())),
    }
}

/// The default acceptance parameter set `(2, 3, 1, 1/2)`.
pub fn default_racah() -> RacahParams {
    RacahParams::new(int(2), int(3), int(1), frac(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::jacobi_from_family;

    #[test]
    fn racah_bochner_shape() {
        let rp = RacahParams::new(int(1), int(1), int(1), int(1));
        let d = rp.bochner();
        assert_eq!(d.a0, int(-1));
        assert_eq!(d.b0, int(-4));
        assert_eq!(d.params, LatticeParams::new(int(3), int(0)));
        assert_eq!(d.lambda_n(2), int(-10));
        let rp = default_racah();
        assert_eq!(rp.bochner().b0, -(&rp.alpha + &rp.beta + int(2)));
    }

    #[test]
    fn eval_examples() {
        let rp = default_racah();
        assert_eq!(rp.eval(0, &frac(7, 3)).unwrap(), int(1));
        let (a, b, g, d) = (&rp.alpha, &rp.beta, &rp.gamma, &rp.delta);
        let n = 3;
        let lead = pochhammer(&(a + int(1)), n) * pochhammer(&(b + d + int(1)), n)
            * pochhammer(&(g + int(1)), n)
            / pochhammer(&(int(n as i64) + a + b + int(1)), n);
        assert_eq!(rp.eval(n, &int(0)).unwrap(), lead);
    }

    #[test]
    fn eval_matches_solver() {
        let rp = default_racah();
        let d = rp.bochner();
        for n in 0..=8 {
            let p = d.solve_pn(n).unwrap();
            for t in 0..=(n as i64 + 2) {
                assert_eq!(rp.eval(n, &int(t)).unwrap(), p.eval(&int(t)), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn eval_is_symmetric_in_mu() {
        let rp = default_racah();
        let c2 = rp.lattice().c2;
        for k in -5..5 {
            let t = frac(k, 3);
            let mirror = -&c2 - &t;
            assert_eq!(rp.eval(4, &t).unwrap(), rp.eval(4, &mirror).unwrap());
        }
    }

    #[test]
    fn pole_detected() {
        let rp = RacahParams::new(int(-3), int(1), int(1), int(1));
        assert!(matches!(rp.eval(4, &int(1)), Err(Error::ParameterPole(_))));
    }

    #[test]
    fn interpolation_round_trip() {
        let p = LatticeParams::zero();
        let th2 = ThetaPoly::basis(p.clone(), 2);
        let pts: Vec<_> = (0..3).map(|t| (int(t), th2.eval(&int(t)))).collect();
        assert_eq!(interpolate(&p, &pts).unwrap(), th2);
    }

    #[test]
    fn nodes_collide() {
        let p = LatticeParams::new(int(3), int(0));
        let pts = vec![(int(1), int(0)), (int(-4), int(1))];
        assert_eq!(interpolate(&p, &pts), Err(Error::NodesCollide(0, 1)));
        let nodes = default_nodes(&LatticeParams::new(int(-3), int(0)), 5);
        assert_eq!(nodes[0], frac(3, 2));
    }

    #[test]
    fn non_monic_rejected() {
        let p = LatticeParams::zero();
        let evals = vec![vec![(int(0), int(2))]];
        assert_eq!(family_from_evals(&evals, &p), Err(Error::NotMonic(0)));
    }

    #[test]
    fn oracle_family_matches_solver_recurrence() {
        let rp = default_racah();
        let fam = rp.oracle_family(10).unwrap();
        let d = rp.bochner();
        assert_eq!(fam, d.solve_family(10).unwrap());
        assert_eq!(jacobi_from_family(&fam).unwrap(), d.ttrr_coeffs(9).unwrap());
    }

    #[test]
    fn load_bochner_doc() {
        let doc = r#"{"lattice":{"c2":"1/2","c3":"0"},
                      "bochner":{"a0":"-1","a1":"1/3","a2":"2","b0":"-4","b1":"5/2"}}"#;
        let CustomInput::Bochner(d) = load_custom(doc, Some(5)).unwrap() else { panic!() };
        assert_eq!(d.a1, frac(1, 3));
        assert_eq!(d.params.c2, frac(1, 2));
        let nested = r#"{"lattice":{"c2":"1/2","c3":"0"},
                      "bochner":{"phi":{"a0":"-1","a1":"1/3","a2":"2"},"tau":{"b0":"-4","b1":"5/2"}}}"#;
        assert_eq!(load_custom(nested, None).unwrap(), CustomInput::Bochner(d));
    }

    #[test]
    fn load_family_doc() {
        let doc = r#"{"lattice":{"c2":"0","c3":"0"},"family":[["1"],["5","1"],["1/2","0","1"]]}"#;
        let CustomInput::Family(f) = load_custom(doc, None).unwrap() else { panic!() };
        assert_eq!(f.len(), 3);
        let bad = r#"{"lattice":{"c2":"0","c3":"0"},"family":[["1"],["5","2"]]}"#;
        assert_eq!(load_custom(bad, None), Err(Error::NotGradedMonic(1)));
    }

    #[test]
    fn load_errors() {
        let doc = r#"{"lattice":{"c2":"1/0","c3":"0"},"family":[["1"]]}"#;
        assert!(matches!(load_custom(doc, None), Err(Error::Parse(_))));
        assert!(matches!(load_custom("{", None), Err(Error::Parse(_))));
        let degenerate = r#"{"lattice":{"c2":"0","c3":"0"},
                      "bochner":{"a0":"1","a1":"0","a2":"0","b0":"-4","b1":"0"}}"#;
        assert!(matches!(
            load_custom(degenerate, Some(4)),
            Err(Error::DegenerateEigenvalues { .. })
        ));
        assert!(load_custom(degenerate, None).is_ok());
    }

    #[test]
    fn load_racah_preset() {
        let doc = r#"{"racah":{"alpha":"2","beta":"3","gamma":"1","delta":"1/2"}}"#;
        assert_eq!(load_custom(doc, Some(9)).unwrap(), CustomInput::Bochner(default_racah().bochner()));
    }
}
