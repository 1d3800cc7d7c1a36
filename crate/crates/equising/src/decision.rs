//! The approximability trichotomy for toric weights and its certificates.
//!
//! A weight `log max |z_i|^{a_i}` admits decreasing equisingular
//! approximations with analytic singularities exactly when either all
//! exponent ratios `a_i/a_j` are rational (a common scale exists), or the
//! unit equation `sum x_i/a_i = 1` has no positive integer solutions. The
//! remaining case is certified by an explicit solution together with an
//! irrational ratio witness. Solvability of the unit equation also
//! classifies maximal equisingularity.

use num_rational::BigRational;
use serde::Serialize;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::numbers::SurdNumber;
use crate::staircase::WeightSpec;
use crate::{Caps, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// A common scale `c` with all `a_i/c` rational exists.
    ApproximableAnalytic,
    /// No common rational scale, but the unit equation is infeasible.
    ApproximableDiophantine,
    /// The unit equation is solvable and some ratio is irrational.
    NotApproximable,
}

/// Common-scale certificate: `c = a_1` and the rational ratios `a_i/c`.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticWitness {
    pub scale: SurdNumber,
    #[serde(with = "crate::serde_util::rat_vec")]
    pub ratios: Vec<BigRational>,
}

/// One linear constraint of the per-radicand decomposition of the unit
/// equation: `sum x_i * coefficients_i = target` over the given radicand.
#[derive(Clone, Debug, Serialize)]
pub struct RadicandEquation {
    pub radicand: u64,
    #[serde(with = "crate::serde_util::rat_vec")]
    pub coefficients: Vec<BigRational>,
    #[serde(with = "crate::serde_util::rat")]
    pub target: BigRational,
}

/// Infeasibility certificate for the unit equation: the exhausted search
/// box `1 <= x_i <= floor(a_i)`, the per-radicand linear system, and, when
/// one radicand's coefficients are uniformly signed, that radicand as a
/// short-cut obstruction.
#[derive(Clone, Debug, Serialize)]
pub struct DiophantineCertificate {
    pub search_box: Vec<u64>,
    pub decomposition: Vec<RadicandEquation>,
    pub sign_obstruction: Option<u64>,
}

/// Explicit solution plus an irrational ratio, 1-based indices.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionCertificate {
    pub solution: Vec<u64>,
    pub witness_i: usize,
    pub witness_j: usize,
    pub witness_ratio: SurdNumber,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    Analytic(AnalyticWitness),
    Diophantine(DiophantineCertificate),
    Solution(SolutionCertificate),
}

/// Decision outcome with a self-contained, re-checkable certificate.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub certificate: Certificate,
    pub maximal: bool,
}

/// The common scale `c = a_1` with rational ratios `a_i/a_1`, when every
/// ratio is rational; `None` otherwise.
pub fn analytic_witness(w: &WeightSpec, caps: &Caps) -> Result<Option<AnalyticWitness>, Error> {
    let base = w.exponent(0);
    let base_recip = base.reciprocal_capped(caps.max_primes)?;
    let mut ratios = Vec::with_capacity(w.m());
    for a in w.exponents() {
        match (a * &base_recip).as_rational() {
            Some(q) => ratios.push(q),
            None => return Ok(None),
        }
    }
    Ok(Some(AnalyticWitness {
        scale: base.clone(),
        ratios,
    }))
}

/// The per-radicand linear system equivalent to `sum x_i/a_i = 1`: the
/// rational parts must sum to 1 and each irrational component must vanish.
fn radicand_decomposition(recips: &[SurdNumber]) -> Vec<RadicandEquation> {
    let mut radicands: Vec<u64> = recips
        .iter()
        .flat_map(|r| r.terms().map(|(d, _)| d))
        .collect();
    radicands.sort_unstable();
    radicands.dedup();
    if !radicands.contains(&1) {
        radicands.insert(0, 1);
    }
    radicands
        .into_iter()
        .map(|d| RadicandEquation {
            radicand: d,
            coefficients: recips
                .iter()
                .map(|r| {
                    r.terms()
                        .find(|&(rd, _)| rd == d)
                        .map(|(_, q)| q.clone())
                        .unwrap_or_else(BigRational::zero)
                })
                .collect(),
            target: if d == 1 {
                BigRational::one()
            } else {
                BigRational::zero()
            },
        })
        .collect()
}

/// A radicand whose coefficient vector is uniformly signed and not all
/// zero; positive multiples can never cancel it, so the equation is
/// infeasible outright.
fn sign_obstruction(decomposition: &[RadicandEquation]) -> Option<u64> {
    decomposition.iter().find_map(|eq| {
        if eq.radicand == 1 {
            return None;
        }
        let any_nonzero = eq.coefficients.iter().any(|c| !c.is_zero());
        let all_nonneg = eq.coefficients.iter().all(|c| !(c < &BigRational::zero()));
        let all_nonpos = eq.coefficients.iter().all(|c| !(c > &BigRational::zero()));
        if any_nonzero && (all_nonneg || all_nonpos) {
            Some(eq.radicand)
        } else {
            None
        }
    })
}

fn solution_box(w: &WeightSpec, caps: &Caps) -> Result<Option<Vec<u64>>, Error> {
    let mut bounds = Vec::with_capacity(w.m());
    for a in w.exponents() {
        let f = a.floor_capped(caps.max_bits)?;
        if f < BigInt::one() {
            return Ok(None);
        }
        bounds.push(f);
    }
    let mut product = BigInt::one();
    for b in &bounds {
        product *= b;
    }
    if product > BigInt::from(caps.max_box) {
        return Err(Error::BoxTooLarge {
            size: u128::try_from(product).unwrap_or(u128::MAX),
            cap: caps.max_box,
        });
    }
    Ok(Some(
        bounds
            .iter()
            .map(|b| u64::try_from(b).expect("bound fits in u64 under the box cap"))
            .collect(),
    ))
}

#[allow(clippy::too_many_arguments)]
fn solution_dfs(
    level: usize,
    partial: SurdNumber,
    x: &mut Vec<u64>,
    bounds: &[u64],
    recips: &[SurdNumber],
    suffix_min: &[SurdNumber],
    find_all: bool,
    caps: &Caps,
    out: &mut Vec<Vec<u64>>,
) -> Result<(), Error> {
    let m = bounds.len();
    let one = SurdNumber::one();
    for xi in 1..=bounds[level] {
        let contrib = recips[level].scaled(&BigRational::from_integer(BigInt::from(xi)));
        let partial_next = &partial + &contrib;
        let with_min = &partial_next + &suffix_min[level + 1];
        if (&with_min - &one).sign_capped(caps.max_bits)? > 0 {
            break;
        }
        x[level] = xi;
        if level + 1 == m {
            if (&partial_next - &one).sign_capped(caps.max_bits)? == 0 {
                out.push(x.clone());
                if !find_all {
                    return Ok(());
                }
            }
        } else {
            solution_dfs(
                level + 1,
                partial_next,
                x,
                bounds,
                recips,
                suffix_min,
                find_all,
                caps,
                out,
            )?;
            if !find_all && !out.is_empty() {
                return Ok(());
            }
        }
    }
    x[level] = 0;
    Ok(())
}

/// All (or the lexicographically first) positive integer solutions of
/// `sum x_i/a_i = 1`. Any solution satisfies `x_i <= a_i`, so the search
/// box `1 <= x_i <= floor(a_i)` is exhaustive; the per-radicand sign
/// obstruction and the running lower bound `sum 1/a_i` prune the rest.
pub fn unit_solutions(w: &WeightSpec, find_all: bool, caps: &Caps) -> Result<Vec<Vec<u64>>, Error> {
    let bounds = match solution_box(w, caps)? {
        Some(b) => b,
        None => return Ok(Vec::new()),
    };
    let recips = w.reciprocals(caps)?;
    if sign_obstruction(&radicand_decomposition(&recips)).is_some() {
        return Ok(Vec::new());
    }
    let m = w.m();
    let mut suffix_min = vec![SurdNumber::zero(); m + 1];
    for j in (0..m).rev() {
        suffix_min[j] = &suffix_min[j + 1] + &recips[j];
    }
    let mut out = Vec::new();
    let mut x = vec![0u64; m];
    solution_dfs(
        0,
        SurdNumber::zero(),
        &mut x,
        &bounds,
        &recips,
        &suffix_min,
        find_all,
        caps,
        &mut out,
    )?;
    Ok(out)
}

/// Maximal equisingularity: equivalent to solvability of the unit equation.
pub fn classify_maximal(w: &WeightSpec, caps: &Caps) -> Result<bool, Error> {
    Ok(!unit_solutions(w, false, caps)?.is_empty())
}

/// First pair of indices (1-based, lexicographic) whose exponent ratio
/// `a_i/a_j` is irrational, together with the exact ratio.
fn irrationality_witness(
    w: &WeightSpec,
    caps: &Caps,
) -> Result<Option<(usize, usize, SurdNumber)>, Error> {
    let recips = w.reciprocals(caps)?;
    for i in 0..w.m() {
        for (j, recip_j) in recips.iter().enumerate().skip(i + 1) {
            let ratio = w.exponent(i) * recip_j;
            if !ratio.is_rational() {
                return Ok(Some((i + 1, j + 1, ratio)));
            }
        }
    }
    Ok(None)
}

/// Decide approximability and classify maximality, with certificates.
pub fn decide(w: &WeightSpec, caps: &Caps) -> Result<Verdict, Error> {
    let witness = analytic_witness(w, caps)?;
    let solutions = unit_solutions(w, false, caps)?;
    let maximal = !solutions.is_empty();
    if let Some(witness) = witness {
        return Ok(Verdict {
            outcome: Outcome::ApproximableAnalytic,
            certificate: Certificate::Analytic(witness),
            maximal,
        });
    }
    if solutions.is_empty() {
        let recips = w.reciprocals(caps)?;
        let decomposition = radicand_decomposition(&recips);
        let obstruction = sign_obstruction(&decomposition);
        let search_box = match solution_box(w, caps)? {
            Some(b) => b,
            None => vec![0; w.m()],
        };
        return Ok(Verdict {
            outcome: Outcome::ApproximableDiophantine,
            certificate: Certificate::Diophantine(DiophantineCertificate {
                search_box,
                decomposition,
                sign_obstruction: obstruction,
            }),
            maximal,
        });
    }
    let (witness_i, witness_j, witness_ratio) = irrationality_witness(w, caps)?
        .expect("no analytic witness implies an irrational ratio pair");
    Ok(Verdict {
        outcome: Outcome::NotApproximable,
        certificate: Certificate::Solution(SolutionCertificate {
            solution: solutions[0].clone(),
            witness_i,
            witness_j,
            witness_ratio,
        }),
        maximal,
    })
}

impl Verdict {
    /// Re-check the certificate against the weight under independent exact
    /// arithmetic. Returns false when any claim fails to verify.
    pub fn reverify(&self, w: &WeightSpec, caps: &Caps) -> Result<bool, Error> {
        match (&self.outcome, &self.certificate) {
            (Outcome::ApproximableAnalytic, Certificate::Analytic(witness)) => {
                if witness.ratios.len() != w.m() {
                    return Ok(false);
                }
                if &witness.scale != w.exponent(0) {
                    return Ok(false);
                }
                for (a, q) in w.exponents().iter().zip(&witness.ratios) {
                    if !q.is_positive() {
                        return Ok(false);
                    }
                    let reconstructed = witness.scale.scaled(q);
                    if &reconstructed != a {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (Outcome::ApproximableDiophantine, Certificate::Diophantine(cert)) => {
                if self.maximal {
                    return Ok(false);
                }
                // the stored decomposition must match the recomputed one
                let recips = w.reciprocals(caps)?;
                let fresh = radicand_decomposition(&recips);
                if fresh.len() != cert.decomposition.len()
                    || fresh.iter().zip(&cert.decomposition).any(|(a, b)| {
                        a.radicand != b.radicand
                            || a.target != b.target
                            || a.coefficients != b.coefficients
                    })
                {
                    return Ok(false);
                }
                // a sign obstruction verifies from the certificate alone;
                // otherwise exhaust the (stored, finite) box again
                if let Some(d) = cert.sign_obstruction {
                    return Ok(sign_obstruction(&cert.decomposition) == Some(d));
                }
                let stored_box = match solution_box(w, caps)? {
                    Some(b) => b,
                    None => vec![0; w.m()],
                };
                if stored_box != cert.search_box {
                    return Ok(false);
                }
                Ok(unit_solutions(w, false, caps)?.is_empty())
            }
            (Outcome::NotApproximable, Certificate::Solution(cert)) => {
                if !self.maximal || cert.solution.len() != w.m() {
                    return Ok(false);
                }
                if cert.solution.contains(&0) {
                    return Ok(false);
                }
                let recips = w.reciprocals(caps)?;
                let mut sum = SurdNumber::zero();
                for (r, &x) in recips.iter().zip(&cert.solution) {
                    sum = &sum + &r.scaled(&BigRational::from_integer(BigInt::from(x)));
                }
                if (&sum - &SurdNumber::one()).sign_capped(caps.max_bits)? != 0 {
                    return Ok(false);
                }
                if cert.witness_i == 0
                    || cert.witness_j == 0
                    || cert.witness_i > w.m()
                    || cert.witness_j > w.m()
                {
                    return Ok(false);
                }
                let ratio = w
                    .exponent(cert.witness_i - 1)
                    .checked_div_capped(w.exponent(cert.witness_j - 1), caps.max_primes)?;
                Ok(!ratio.is_rational() && ratio == cert.witness_ratio)
            }
            _ => Ok(false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::staircase::{epsilon0, ideal_equal};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn caps() -> Caps {
        Caps::default()
    }

    fn s(text: &str) -> SurdNumber {
        text.parse().unwrap()
    }

    fn w(texts: &[&str]) -> WeightSpec {
        WeightSpec::diagonal(texts.iter().map(|t| s(t)).collect()).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn analytic_witness_examples() {
        let witness = analytic_witness(&w(&["sqrt(2)", "2*sqrt(2)"]), &caps())
            .unwrap()
            .unwrap();
        assert_eq!(witness.scale, s("sqrt(2)"));
        assert_eq!(witness.ratios, vec![rat(1, 1), rat(2, 1)]);

        let witness = analytic_witness(&w(&["2", "3"]), &caps()).unwrap().unwrap();
        assert_eq!(witness.scale, s("2"));
        assert_eq!(witness.ratios, vec![rat(1, 1), rat(3, 2)]);

        assert!(
            analytic_witness(&w(&["1+sqrt(2)", "1+1/2*sqrt(2)"]), &caps())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn unit_solution_examples() {
        let sols = unit_solutions(&w(&["2", "2"]), true, &caps()).unwrap();
        assert_eq!(sols, vec![vec![1, 1]]);

        let sols = unit_solutions(&w(&["sqrt(2)", "sqrt(2)"]), true, &caps()).unwrap();
        assert!(sols.is_empty());

        // 1/(1+sqrt(2)) + 1/(1+1/2*sqrt(2)) = (sqrt(2)-1) + (2-sqrt(2)) = 1
        let sols = unit_solutions(&w(&["1+sqrt(2)", "1+1/2*sqrt(2)"]), true, &caps()).unwrap();
        assert_eq!(sols, vec![vec![1, 1]]);
    }

    #[test]
    fn decide_examples() {
        let verdict = decide(&w(&["2", "3"]), &caps()).unwrap();
        assert_eq!(verdict.outcome, Outcome::ApproximableAnalytic);
        // 3 x1 + 2 x2 = 6 has no positive integer solutions
        assert!(!verdict.maximal);
        assert!(verdict.reverify(&w(&["2", "3"]), &caps()).unwrap());

        // equal irrational entries still share the scale c = sqrt(2); the
        // unit equation is infeasible as well, so the weight is not maximal
        let verdict = decide(&w(&["sqrt(2)", "sqrt(2)"]), &caps()).unwrap();
        assert_eq!(verdict.outcome, Outcome::ApproximableAnalytic);
        assert!(!verdict.maximal);
        assert!(verdict
            .reverify(&w(&["sqrt(2)", "sqrt(2)"]), &caps())
            .unwrap());

        // no rational ratio and an infeasible unit equation
        let verdict = decide(&w(&["sqrt(2)", "sqrt(3)"]), &caps()).unwrap();
        assert_eq!(verdict.outcome, Outcome::ApproximableDiophantine);
        assert!(!verdict.maximal);
        match &verdict.certificate {
            Certificate::Diophantine(cert) => {
                assert!(cert.sign_obstruction.is_some());
            }
            other => panic!("unexpected certificate {:?}", other),
        }
        assert!(verdict
            .reverify(&w(&["sqrt(2)", "sqrt(3)"]), &caps())
            .unwrap());

        let weight = w(&["1+sqrt(2)", "1+1/2*sqrt(2)"]);
        let verdict = decide(&weight, &caps()).unwrap();
        assert_eq!(verdict.outcome, Outcome::NotApproximable);
        assert!(verdict.maximal);
        match &verdict.certificate {
            Certificate::Solution(cert) => {
                assert_eq!(cert.solution, vec![1, 1]);
                assert_eq!(cert.witness_ratio, s("sqrt(2)"));
                assert_eq!((cert.witness_i, cert.witness_j), (1, 2));
            }
            other => panic!("unexpected certificate {:?}", other),
        }
        assert!(verdict.reverify(&weight, &caps()).unwrap());
    }

    #[test]
    fn classify_maximal_examples() {
        assert!(classify_maximal(&w(&["2", "2"]), &caps()).unwrap());
        assert!(!classify_maximal(&w(&["sqrt(2)", "sqrt(2)"]), &caps()).unwrap());
        assert!(classify_maximal(&w(&["4", "4"]), &caps()).unwrap());
    }

    /// Weights of the form q_i * sqrt(d) have an analytic witness with
    /// irrational scale, which forces the unit equation to be infeasible.
    #[test]
    fn irrational_scale_forces_infeasible_unit_equation() {
        let mut rng = StdRng::seed_from_u64(600);
        for _ in 0..500 {
            let m = rng.gen_range(1..=3);
            let d = [2u64, 3, 5, 6, 7, 10][rng.gen_range(0..6)];
            let a: Vec<SurdNumber> = (0..m)
                .map(|_| SurdNumber::surd(rng.gen_range(1..=6), rng.gen_range(1..=3), d))
                .collect();
            let weight = WeightSpec::diagonal(a).unwrap();
            let witness = analytic_witness(&weight, &caps()).unwrap().unwrap();
            assert!(!witness.scale.is_rational());
            let sols = unit_solutions(&weight, true, &caps()).unwrap();
            assert!(sols.is_empty(), "unexpected solution for {:?}", weight);
        }
    }

    /// classify_maximal(w) = false iff epsilon0 is present iff the ideal is
    /// stable under some downscaling.
    #[test]
    fn maximality_links_to_epsilon0_and_ideal_stability() {
        let mut rng = StdRng::seed_from_u64(601);
        let one = SurdNumber::one();
        for _ in 0..40 {
            let m = rng.gen_range(1..=3);
            let mut a = Vec::new();
            while a.len() < m {
                let cand = if rng.gen_bool(0.5) {
                    SurdNumber::rational(rng.gen_range(1..=10), rng.gen_range(1..=2))
                } else {
                    SurdNumber::surd(
                        rng.gen_range(1..=3),
                        rng.gen_range(1..=2),
                        [2u64, 3][rng.gen_range(0..2)],
                    )
                };
                if cand.sign() > 0 && (&s("6") - &cand).sign() >= 0 {
                    a.push(cand);
                }
            }
            let weight = WeightSpec::diagonal(a).unwrap();
            let maximal = classify_maximal(&weight, &caps()).unwrap();
            let eps0 = epsilon0(&weight, &caps()).unwrap();
            assert_eq!(maximal, eps0.is_none(), "weight {:?}", weight);
            if let Some(eps0) = eps0 {
                let downscaled = &one - &eps0;
                if downscaled.sign() > 0 {
                    assert!(ideal_equal(&weight, &one, &downscaled, &caps()).unwrap());
                }
            }
        }
    }

    #[test]
    fn decide_is_deterministic() {
        let weight = w(&["1+sqrt(2)", "1+1/2*sqrt(2)", "3"]);
        let a = decide(&weight, &caps()).unwrap();
        let b = decide(&weight, &caps()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn certificates_reverify_on_random_weights() {
        let mut rng = StdRng::seed_from_u64(602);
        for _ in 0..60 {
            let m = rng.gen_range(1..=3);
            let mut a = Vec::new();
            while a.len() < m {
                let cand = match rng.gen_range(0..3) {
                    0 => SurdNumber::rational(rng.gen_range(1..=10), rng.gen_range(1..=2)),
                    1 => SurdNumber::surd(
                        rng.gen_range(1..=3),
                        rng.gen_range(1..=2),
                        [2u64, 3, 5][rng.gen_range(0..3)],
                    ),
                    _ => {
                        &SurdNumber::rational(rng.gen_range(1..=3), 1)
                            + &SurdNumber::surd(
                                1,
                                rng.gen_range(1..=2),
                                [2u64, 3][rng.gen_range(0..2)],
                            )
                    }
                };
                if cand.sign() > 0 && (&s("6") - &cand).sign() >= 0 {
                    a.push(cand);
                }
            }
            let weight = WeightSpec::diagonal(a).unwrap();
            let verdict = decide(&weight, &caps()).unwrap();
            assert!(verdict.reverify(&weight, &caps()).unwrap(), "{:?}", weight);
        }
    }

    #[test]
    fn tampered_certificates_fail_reverification() {
        let weight = w(&["1+sqrt(2)", "1+1/2*sqrt(2)"]);
        let mut verdict = decide(&weight, &caps()).unwrap();
        if let Certificate::Solution(cert) = &mut verdict.certificate {
            cert.solution = vec![2, 1];
        }
        assert!(!verdict.reverify(&weight, &caps()).unwrap());

        let weight = w(&["2", "3"]);
        let mut verdict = decide(&weight, &caps()).unwrap();
        if let Certificate::Analytic(witness) = &mut verdict.certificate {
            witness.ratios[1] = rat(2, 1);
        }
        assert!(!verdict.reverify(&weight, &caps()).unwrap());
    }

    /// Opt-in stress sweep: `cargo test -p equising -- --ignored`.
    /// Exercises the maximality/margin linkage and certificate
    /// re-verification over a wide randomized space, including weights with
    /// mixed rational and surd entries across two radicands.
    #[test]
    #[ignore]
    fn stress_linkage_and_certificates() {
        let mut rng = StdRng::seed_from_u64(3_000_001);
        let one = SurdNumber::one();
        for case in 0..500 {
            let m = rng.gen_range(1..=3);
            let mut a = Vec::new();
            while a.len() < m {
                let cand = match rng.gen_range(0..4) {
                    0 => SurdNumber::rational(rng.gen_range(1..=12), rng.gen_range(1..=2)),
                    1 => SurdNumber::surd(
                        rng.gen_range(1..=4),
                        rng.gen_range(1..=2),
                        [2u64, 3, 5, 6][rng.gen_range(0..4)],
                    ),
                    2 => {
                        &SurdNumber::rational(rng.gen_range(1..=3), 1)
                            + &SurdNumber::surd(
                                1,
                                rng.gen_range(1..=2),
                                [2u64, 3][rng.gen_range(0..2)],
                            )
                    }
                    _ => {
                        &SurdNumber::surd(1, 1, 2)
                            + &SurdNumber::surd(rng.gen_range(1..=2), 2, 3)
                    }
                };
                if cand.sign() > 0 && (&s("6") - &cand).sign() >= 0 {
                    a.push(cand);
                }
            }
            let weight = WeightSpec::diagonal(a).unwrap();
            let verdict = decide(&weight, &caps()).unwrap();
            assert!(verdict.reverify(&weight, &caps()).unwrap(), "case {}", case);
            let maximal = classify_maximal(&weight, &caps()).unwrap();
            assert_eq!(maximal, verdict.maximal);
            let eps0 = epsilon0(&weight, &caps()).unwrap();
            assert_eq!(maximal, eps0.is_none(), "case {}: {:?}", case, weight);
            if let Some(eps0) = eps0 {
                let down = &one - &eps0;
                if down.sign() > 0 {
                    assert!(ideal_equal(&weight, &one, &down, &caps()).unwrap());
                }
            }
        }
    }
}
