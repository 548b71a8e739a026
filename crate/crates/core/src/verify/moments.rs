//! Exact sixth moments of `D = (m−n) Σ_{i≤n} Z_i − n Σ_{n<i≤m} Z_i` for
//! IID `Z_i`, by enumeration and by cumulants.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{CaseResult, VerificationReport, VerifyError};
use crate::rational::{self, int, ratio, Rational};
use crate::sequence::WORD_LIMIT;
use crate::Dist;

/// A law with finitely many rational atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLaw {
    values: Vec<Rational>,
    probs: Vec<Rational>,
}

impl FiniteLaw {
    pub fn new(values: Vec<Rational>, probs: Vec<Rational>) -> Result<Self, VerifyError> {
        let bad = |reason: String| VerifyError::Precondition {
            suite: "sixth moment",
            reason,
        };
        if values.is_empty() || values.len() != probs.len() {
            return Err(bad(format!(
                "{} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|p| !rational::is_probability(p)) || probs.iter().sum::<Rational>() != Rational::one() {
            return Err(bad("probabilities must lie in [0,1] and sum to 1".into()));
        }
        Ok(Self { values, probs })
    }

    pub fn bernoulli(p: Rational) -> Result<Self, VerifyError> {
        Self::new(vec![int(0), int(1)], vec![Rational::one() - &p, p])
    }

    pub fn support_size(&self) -> usize {
        self.values.len()
    }

    /// Raw moments `E[Z^k]` for `k = 1..=6`.
    pub fn moments(&self) -> Vec<Rational> {
        (1..=6)
            .map(|k| {
                self.values
                    .iter()
                    .zip(&self.probs)
                    .map(|(v, p)| p * pow(v, k))
                    .sum()
            })
            .collect()
    }
}

impl std::fmt::Display for FiniteLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let atoms: Vec<String> = self
            .values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| format!("{}:{}", rational::format(v), rational::format(p)))
            .collect();
        write!(f, "{{{}}}", atoms.join(", "))
    }
}

fn pow(x: &Rational, k: u32) -> Rational {
    num_traits::pow(x.clone(), k as usize)
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r *= ratio((n - i) as i64, (i + 1) as i64);
    }
    r
}

/// Cumulants `κ_1..κ_k` from raw moments `μ_1..μ_k`, by
/// `κ_j = μ_j − Σ_{i<j} C(j−1, i−1) κ_i μ_{j−i}`.
pub fn cumulants_from_moments(moments: &[Rational]) -> Vec<Rational> {
    let mut kappa: Vec<Rational> = Vec::with_capacity(moments.len());
    for j in 1..=moments.len() {
        let mut k = moments[j - 1].clone();
        for i in 1..j {
            k -= binomial((j - 1) as u32, (i - 1) as u32) * &kappa[i - 1] * &moments[j - i - 1];
        }
        kappa.push(k);
    }
    kappa
}

/// Exact raw moments `μ_1..μ_6` of a catalogue law, where they are
/// rational in the law's parameters.
pub fn law_moments(dist: &Dist) -> Option<Vec<Rational>> {
    let exact = |x: f64| Rational::from_float(x);
    match dist {
        Dist::Constant(c) => {
            let c = exact(*c)?;
            Some((1..=6).map(|k| pow(&c, k)).collect())
        }
        Dist::Bernoulli(p) => {
            let p = exact(*p)?;
            Some(vec![p; 6])
        }
        Dist::Uniform01 => Some((1..=6).map(|k| ratio(1, k + 1)).collect()),
        Dist::Finite(pmf) => {
            let probs: Vec<Rational> = pmf.iter().map(|&p| exact(p)).collect::<Option<_>>()?;
            let total: Rational = probs.iter().sum();
            Some(
                (1..=6)
                    .map(|k| {
                        probs
                            .iter()
                            .enumerate()
                            .map(|(i, p)| p * pow(&int(i as i64), k))
                            .sum::<Rational>()
                            / &total
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

/// `E[D⁶]` from the moments of `Z` via `κ_j(D) = ((m−n)^j n + (−n)^j (m−n)) κ_j(Z)`
/// and `E[D⁶] = κ₆ + 15κ₄κ₂ + 10κ₃² + 15κ₂³` (valid because `E[D] = 0`).
pub fn sixth_moment_from_cumulants(moments: &[Rational], n: usize, m: usize) -> Rational {
    let kz = cumulants_from_moments(&moments[..6]);
    let a = int((m - n) as i64);
    let b = int(-(n as i64));
    let nn = int(n as i64);
    let kd = |j: u32| (pow(&a, j) * &nn + pow(&b, j) * &a) * &kz[j as usize - 1];
    let (k2, k3, k4, k6) = (kd(2), kd(3), kd(4), kd(6));
    &k6 + int(15) * &k4 * &k2 + int(10) * &k3 * &k3 + int(15) * &k2 * &k2 * &k2
}

/// `(E[D⁶] by enumeration of support^m, E[D⁶] by cumulants)`, both exact.
pub fn sixth_moment_oracle(
    law: &FiniteLaw,
    n: usize,
    m: usize,
) -> Result<(Rational, Rational), VerifyError> {
    if n == 0 || n > m {
        return Err(VerifyError::Precondition {
            suite: "sixth moment",
            reason: format!("need 1 ≤ n ≤ m, got n = {n}, m = {m}"),
        });
    }
    let states = (law.support_size() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if states > WORD_LIMIT {
        return Err(VerifyError::Enumeration {
            states,
            limit: WORD_LIMIT,
        });
    }
    Ok((enumerate(law, n, m)?, sixth_moment_from_cumulants(&law.moments(), n, m)))
}

fn lcm_of_denominators(xs: &[Rational]) -> BigInt {
    xs.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

/// Brute force over all `support^m` outcomes. Values are scaled to
/// integers by the lcm `L` of their denominators and probabilities by the
/// lcm `Q` of theirs; the weight of `D` accumulates in `u128`, which holds
/// `Q^m` by the check below.
fn enumerate(law: &FiniteLaw, n: usize, m: usize) -> Result<Rational, VerifyError> {
    let too_big = |what: &str| VerifyError::Precondition {
        suite: "sixth moment",
        reason: format!("{what} too large for exact enumeration"),
    };
    let l = lcm_of_denominators(&law.values);
    let q = lcm_of_denominators(&law.probs);
    let scaled = |x: &Rational, d: &BigInt| (x * Rational::from_integer(d.clone())).to_integer();
    let values: Vec<i128> = law
        .values
        .iter()
        .map(|v| scaled(v, &l).to_i128())
        .collect::<Option<_>>()
        .ok_or_else(|| too_big("values"))?;
    let weights: Vec<u128> = law
        .probs
        .iter()
        .map(|p| scaled(p, &q).to_u128())
        .collect::<Option<_>>()
        .ok_or_else(|| too_big("probability denominators"))?;
    let q_pow = num_traits::pow(q.clone(), m);
    if q_pow.bits() > 127 {
        return Err(too_big("probability denominators"));
    }
    let vmax = values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    if (vmax as f64) * (m as f64) * (m as f64) > 2f64.powi(100) {
        return Err(too_big("values"));
    }
    let coeff: Vec<i128> = (0..m)
        .map(|i| if i < n { (m - n) as i128 } else { -(n as i128) })
        .collect();
    let live: Vec<usize> = (0..values.len()).filter(|&s| weights[s] > 0).collect();

    struct Walk<'a> {
        coeff: &'a [i128],
        values: &'a [i128],
        weights: &'a [u128],
        live: &'a [usize],
        acc: HashMap<i128, u128>,
    }
    impl Walk<'_> {
        fn step(&mut self, i: usize, d: i128, w: u128) {
            if i == self.coeff.len() {
                *self.acc.entry(d).or_insert(0) += w;
                return;
            }
            for &s in self.live {
                self.step(i + 1, d + self.coeff[i] * self.values[s], w * self.weights[s]);
            }
        }
    }
    let mut walk = Walk {
        coeff: &coeff,
        values: &values,
        weights: &weights,
        live: &live,
        acc: HashMap::new(),
    };
    walk.step(0, 0, 1);

    let mut total = BigInt::zero();
    for (d, w) in walk.acc {
        total += num_traits::pow(BigInt::from(d), 6) * BigInt::from(BigUint::from(w));
    }
    let denom = q_pow * num_traits::pow(l, 6);
    Ok(Rational::new(total, denom))
}

/// Upper bounds on `|κ_j|` over laws on `[0,1]`, for `j = 2, 3, 4, 6`.
///
/// `κ₂ = Var ≤ 1/4`. With `μ_k` the central moments, `|μ_k| ≤ μ₂ ≤ 1/4`
/// for `k ≥ 2` since `|Z − EZ| ≤ 1`, so `|κ₃| = |μ₃| ≤ 1/4`,
/// `|κ₄| = |μ₄ − 3μ₂²| ≤ max(μ₄, 3μ₂²) ≤ 1/4`, and
/// `|κ₆| = |μ₆ − 15μ₄μ₂ − 10μ₃² + 30μ₂³| ≤ 1/4 + 15/16 + 10/16 + 30/64 = 73/32`.
pub fn cumulant_bounds() -> [(u32, Rational); 4] {
    [
        (2, ratio(1, 4)),
        (3, ratio(1, 4)),
        (4, ratio(1, 4)),
        (6, ratio(73, 32)),
    ]
}

/// Names of the cumulant bounds, for reports.
pub const CUMULANT_BOUNDS: &str = "|κ₂|,|κ₃|,|κ₄| ≤ 1/4, |κ₆| ≤ 73/32";

/// `C` with `E[D⁶] ≤ C n³ m⁶` for every law on `[0,1]` and `m ≥ n`.
///
/// `|κ_j(D)| ≤ n(m−n)((m−n)^{j−1} + n^{j−1}) K_j ≤ n m^j K_j`, so
/// `E[D⁶] ≤ n m⁶ K₆ + 15 n² m⁶ K₄K₂ + 10 n² m⁶ K₃² + 15 n³ m⁶ K₂³
/// ≤ n³ m⁶ (K₆ + 15K₄K₂ + 10K₃² + 15K₂³) = 261/64 · n³ m⁶`.
pub fn concentration_constant() -> Rational {
    let [(_, k2), (_, k3), (_, k4), (_, k6)] = cumulant_bounds();
    &k6 + int(15) * &k4 * &k2 + int(10) * &k3 * &k3 + int(15) * &k2 * &k2 * &k2
}

/// Laws and `(n, m)` pairs for the exact oracle suite.
pub fn default_moment_configs() -> Vec<(FiniteLaw, usize, usize)> {
    let fair = FiniteLaw::bernoulli(ratio(1, 2)).expect("valid");
    let third = FiniteLaw::bernoulli(ratio(1, 3)).expect("valid");
    let skew = FiniteLaw::bernoulli(ratio(1, 10)).expect("valid");
    let three = FiniteLaw::new(
        vec![int(0), ratio(1, 2), int(1)],
        vec![ratio(1, 4), ratio(1, 2), ratio(1, 4)],
    )
    .expect("valid");
    let signed = FiniteLaw::new(
        vec![int(-1), int(0), int(2)],
        vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)],
    )
    .expect("valid");
    let four = FiniteLaw::new(
        vec![ratio(-3, 2), ratio(1, 3), int(1), int(5)],
        vec![ratio(1, 8), ratio(3, 8), ratio(1, 4), ratio(1, 4)],
    )
    .expect("valid");
    let point = FiniteLaw::new(vec![ratio(7, 3)], vec![int(1)]).expect("valid");
    let mut out = vec![(fair.clone(), 1, 2)];
    for (n, m) in [(1, 1), (2, 3), (3, 6), (4, 8), (5, 12)] {
        out.push((fair.clone(), n, m));
    }
    for (n, m) in [(1, 3), (2, 5), (4, 10)] {
        out.push((third.clone(), n, m));
    }
    for (n, m) in [(1, 6), (3, 9)] {
        out.push((skew.clone(), n, m));
    }
    for (n, m) in [(2, 3), (1, 4), (3, 7), (2, 2)] {
        out.push((three.clone(), n, m));
    }
    for (n, m) in [(1, 2), (2, 5), (4, 8)] {
        out.push((signed.clone(), n, m));
    }
    for (n, m) in [(1, 3), (2, 6)] {
        out.push((four.clone(), n, m));
    }
    out.push((point, 2, 5));
    out
}

/// Runs the oracle over `configs` and reports exact agreement.
pub fn sixth_moment_suite(
    configs: &[(FiniteLaw, usize, usize)],
) -> Result<VerificationReport, VerifyError> {
    let mut report = VerificationReport::new("sixth-moment", format!("{} configurations", configs.len()), None);
    for (law, n, m) in configs {
        let (brute, formula) = sixth_moment_oracle(law, *n, *m)?;
        report.push(
            CaseResult::exact(
                format!("{law} n={n} m={m}"),
                rational::to_f64(&brute),
                rational::to_f64(&formula),
                brute == formula,
            )
            .with_detail(format!(
                "enumeration {} vs cumulants {}",
                rational::format(&brute),
                rational::format(&formula)
            )),
        );
    }
    report.note("second cumulant block uses (m−n), by additivity over the two independent blocks");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fair_coin_n1_m2() {
        let law = FiniteLaw::bernoulli(ratio(1, 2)).unwrap();
        let (a, b) = sixth_moment_oracle(&law, 1, 2).unwrap();
        assert_eq!(a, ratio(1, 2));
        assert_eq!(b, ratio(1, 2));
    }

    #[test]
    fn degenerate_split_is_zero() {
        let law = FiniteLaw::new(vec![int(0), int(3)], vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        assert_eq!(sixth_moment_oracle(&law, 4, 4).unwrap(), (int(0), int(0)));
    }

    #[test]
    fn cumulants_of_known_laws() {
        // Uniform[0,1]: κ₂ = 1/12, κ₃ = 0, κ₄ = −1/120, κ₆ = 1/252.
        let k = cumulants_from_moments(&law_moments(&Dist::Uniform01).unwrap());
        assert_eq!(k[0], ratio(1, 2));
        assert_eq!(k[1], ratio(1, 12));
        assert_eq!(k[2], int(0));
        assert_eq!(k[3], ratio(-1, 120));
        assert_eq!(k[4], int(0));
        assert_eq!(k[5], ratio(1, 252));
        // Bernoulli(p): κ₂ = p(1−p), κ₃ = p(1−p)(1−2p).
        let k = cumulants_from_moments(&law_moments(&Dist::Bernoulli(0.25)).unwrap());
        assert_eq!(k[1], ratio(3, 16));
        assert_eq!(k[2], ratio(3, 32));
    }

    #[test]
    fn hand_computed_three_point() {
        // Z ∈ {−1, 1} equally likely, n = 1, m = 2: D = Z₁ − Z₂ ∈ {−2, 0, 2},
        // P(|D| = 2) = 1/2, so E[D⁶] = 32.
        let law = FiniteLaw::new(vec![int(-1), int(1)], vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(sixth_moment_oracle(&law, 1, 2).unwrap(), (int(32), int(32)));
    }

    #[test]
    fn constant_is_derived() {
        assert_eq!(concentration_constant(), ratio(261, 64));
    }

    #[test]
    fn guard_and_preconditions() {
        let law = FiniteLaw::bernoulli(ratio(1, 2)).unwrap();
        assert!(matches!(
            sixth_moment_oracle(&law, 1, 30),
            Err(VerifyError::Enumeration { .. })
        ));
        assert!(sixth_moment_oracle(&law, 3, 2).is_err());
        assert!(FiniteLaw::new(vec![int(0)], vec![ratio(1, 2)]).is_err());
    }

    #[test]
    fn default_suite_agrees() {
        let configs = default_moment_configs();
        assert!(configs.len() >= 20);
        let r = sixth_moment_suite(&configs).unwrap();
        assert!(r.pass, "{}", r.table());
    }
}
