//! Construction and verification of decreasing equisingular approximation
//! sequences.
//!
//! For an approximable weight, each irrational exponent is approximated
//! from below by rationals inside the window `((1-eps) a_i, a_i)`, chosen by
//! a Stern-Brocot walk so that denominators stay small, terms strictly
//! increase, and the gap halves with every term. Every term carries a
//! staircase certificate: its non-member set at scale 1 equals the target's.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decision::{decide, Outcome};
use crate::numbers::SurdNumber;
use crate::staircase::{epsilon0, nonmembers, Exponent, Staircase, WeightSpec};
use crate::{Caps, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceMode {
    /// All exponents rational: the sequence is constantly the weight itself.
    Constant,
    /// Some exponent irrational: strictly increasing rational approximants.
    Strict,
}

/// Staircase-equality proof for one term: the term's non-member set at
/// scale 1, the target's, and a digest binding the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermCertificate {
    pub term_nonmembers: Vec<Exponent>,
    pub target_nonmembers: Vec<Exponent>,
    pub digest: String,
}

fn exponents_text(list: &[Exponent]) -> String {
    list.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("")
}

pub(crate) fn certificate_digest(term: &[Exponent], target: &[Exponent]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(exponents_text(term).as_bytes());
    hasher.update(b"|");
    hasher.update(exponents_text(target).as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{:02x}", b)).collect()
}

/// A decreasing equisingular approximation sequence: K rational weight
/// vectors increasing toward the target, each with a staircase certificate.
#[derive(Clone, Debug)]
pub struct ApproxSequence {
    pub epsilon: SurdNumber,
    pub mode: SequenceMode,
    pub terms: Vec<Vec<BigRational>>,
    pub certificates: Vec<TermCertificate>,
}

/// Wire form: terms as `p/q` strings, certificates as digests only.
#[derive(Serialize, Deserialize)]
struct ApproxSequenceWire {
    epsilon: SurdNumber,
    mode: SequenceMode,
    #[serde(with = "crate::serde_util::rat_mat")]
    terms: Vec<Vec<BigRational>>,
    certificate_digests: Vec<String>,
}

impl Serialize for ApproxSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ApproxSequenceWire {
            epsilon: self.epsilon.clone(),
            mode: self.mode,
            terms: self.terms.clone(),
            certificate_digests: self.certificates.iter().map(|c| c.digest.clone()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ApproxSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = ApproxSequenceWire::deserialize(deserializer)?;
        Ok(ApproxSequence {
            epsilon: wire.epsilon,
            mode: wire.mode,
            terms: wire.terms,
            certificates: wire
                .certificate_digests
                .into_iter()
                .map(|digest| TermCertificate {
                    term_nonmembers: Vec::new(),
                    target_nonmembers: Vec::new(),
                    digest,
                })
                .collect(),
        })
    }
}

/// Verification summary for a sequence that passed all checks.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub terms: usize,
    pub certificates_checked: usize,
    pub samples: u64,
    pub seed: u64,
    pub violations: usize,
}

/// State of the Stern-Brocot walk toward one irrational exponent: the best
/// rational lower and upper bounds found so far.
struct BelowApproximant {
    lo_num: BigInt,
    lo_den: BigInt,
    hi_num: BigInt,
    hi_den: BigInt,
}

impl BelowApproximant {
    fn new(target: &SurdNumber, caps: &Caps) -> Result<Self, Error> {
        let floor = target.floor_capped(caps.max_bits)?;
        Ok(BelowApproximant {
            lo_num: floor.clone(),
            lo_den: BigInt::one(),
            hi_num: floor + BigInt::one(),
            hi_den: BigInt::one(),
        })
    }

    fn lo(&self) -> BigRational {
        BigRational::new(self.lo_num.clone(), self.lo_den.clone())
    }

    /// Walk until the lower bound exceeds `threshold` (and any previously
    /// emitted approximant), then return it. Each mediant step either
    /// tightens the lower or the upper bound; lower bounds strictly
    /// increase whenever they move, which gives strict monotonicity.
    fn advance(
        &mut self,
        target: &SurdNumber,
        threshold: &SurdNumber,
        prev: Option<&BigRational>,
        caps: &Caps,
    ) -> Result<BigRational, Error> {
        loop {
            let lo = self.lo();
            let lo_surd = SurdNumber::from_rational(lo.clone());
            let above_threshold = (&lo_surd - threshold).sign_capped(caps.max_bits)? > 0;
            let above_prev = match prev {
                None => true,
                Some(p) => &lo > p,
            };
            if above_threshold && above_prev {
                return Ok(lo);
            }
            let med_num = &self.lo_num + &self.hi_num;
            let med_den = &self.lo_den + &self.hi_den;
            if med_den > BigInt::from(caps.max_denominator) {
                return Err(Error::DenominatorCap {
                    cap: caps.max_denominator,
                });
            }
            let mediant =
                SurdNumber::from_rational(BigRational::new(med_num.clone(), med_den.clone()));
            // target is irrational, so the mediant is never equal to it
            if (target - &mediant).sign_capped(caps.max_bits)? > 0 {
                self.lo_num = med_num;
                self.lo_den = med_den;
            } else {
                self.hi_num = med_num;
                self.hi_den = med_den;
            }
        }
    }
}

/// Build a K-term approximation sequence for an approximable weight.
///
/// Rational exponents stay constant; irrational ones get strictly
/// increasing lower approximants with `a_i - a_i^(k) <= 2^-k * eps * a_i`.
/// `epsilon` defaults to `epsilon0/2` and must not exceed `epsilon0`; for a
/// fully rational weight any positive epsilon is accepted.
pub fn build_sequence(
    w: &WeightSpec,
    k_terms: usize,
    epsilon: Option<SurdNumber>,
    caps: &Caps,
) -> Result<ApproxSequence, Error> {
    if k_terms == 0 {
        return Err(Error::InvalidInput(
            "sequence length must be positive".into(),
        ));
    }
    let verdict = decide(w, caps)?;
    if verdict.outcome == Outcome::NotApproximable {
        return Err(Error::NotApproximableInput);
    }
    if let Some(eps) = &epsilon {
        if eps.sign_capped(caps.max_bits)? != 1 {
            return Err(Error::NonPositiveEpsilon);
        }
    }

    let one = SurdNumber::one();
    let target_staircase = nonmembers(w, &one, caps)?;

    if w.is_rational() {
        let eps = epsilon.unwrap_or_else(|| SurdNumber::rational(1, 2));
        let term: Vec<BigRational> = w
            .exponents()
            .iter()
            .map(|a| a.as_rational().expect("rational weight"))
            .collect();
        let cert = TermCertificate {
            term_nonmembers: target_staircase.nonmembers.clone(),
            target_nonmembers: target_staircase.nonmembers.clone(),
            digest: certificate_digest(&target_staircase.nonmembers, &target_staircase.nonmembers),
        };
        return Ok(ApproxSequence {
            epsilon: eps,
            mode: SequenceMode::Constant,
            terms: vec![term; k_terms],
            certificates: vec![cert; k_terms],
        });
    }

    let eps0 = epsilon0(w, caps)?
        .expect("approximable weight with an irrational exponent has a positive margin");
    let eps = match epsilon {
        Some(eps) => {
            if (&eps - &eps0).sign_capped(caps.max_bits)? > 0 {
                return Err(Error::EpsilonTooLarge {
                    epsilon: eps.to_string(),
                    epsilon0: eps0.to_string(),
                });
            }
            eps
        }
        None => eps0.scaled(&BigRational::new(BigInt::one(), BigInt::from(2))),
    };

    let m = w.m();
    let mut walkers: Vec<Option<BelowApproximant>> = Vec::with_capacity(m);
    for a in w.exponents() {
        walkers.push(if a.is_rational() {
            None
        } else {
            Some(BelowApproximant::new(a, caps)?)
        });
    }

    let mut terms: Vec<Vec<BigRational>> = Vec::with_capacity(k_terms);
    let mut certificates = Vec::with_capacity(k_terms);
    let mut halving = BigRational::new(BigInt::one(), BigInt::from(2));
    for k in 0..k_terms {
        let mut term = Vec::with_capacity(m);
        for (i, a) in w.exponents().iter().enumerate() {
            match &mut walkers[i] {
                None => term.push(a.as_rational().expect("rational exponent")),
                Some(walker) => {
                    // a_i - 2^-(k+1) * eps * a_i
                    let gap = (a * &eps).scaled(&halving);
                    let threshold = a - &gap;
                    let prev = terms.last().map(|t: &Vec<BigRational>| &t[i]);
                    term.push(walker.advance(a, &threshold, prev, caps)?);
                }
            }
        }
        let term_weight = WeightSpec::new(
            term.iter()
                .map(|q| SurdNumber::from_rational(q.clone()))
                .collect(),
            w.ambient_dim(),
            w.trailing_radius().clone(),
        )?;
        let term_staircase = nonmembers(&term_weight, &one, caps)?;
        if term_staircase.nonmembers != target_staircase.nonmembers {
            return Err(Error::CertificateMismatch {
                term: k + 1,
                detail: format!(
                    "non-member sets differ: {} vs {}",
                    exponents_text(&term_staircase.nonmembers),
                    exponents_text(&target_staircase.nonmembers)
                ),
            });
        }
        certificates.push(TermCertificate {
            digest: certificate_digest(&term_staircase.nonmembers, &target_staircase.nonmembers),
            term_nonmembers: term_staircase.nonmembers,
            target_nonmembers: target_staircase.nonmembers.clone(),
        });
        terms.push(term);
        halving /= BigRational::from_integer(BigInt::from(2));
    }

    Ok(ApproxSequence {
        epsilon: eps,
        mode: SequenceMode::Strict,
        terms,
        certificates,
    })
}

fn term_weight(seq_term: &[BigRational], w: &WeightSpec) -> Result<WeightSpec, Error> {
    WeightSpec::new(
        seq_term
            .iter()
            .map(|q| SurdNumber::from_rational(q.clone()))
            .collect(),
        w.ambient_dim(),
        w.trailing_radius().clone(),
    )
}

/// Re-verify a sequence against its weight: exact staircase certificates,
/// exact window containment and monotonicity of the terms, then sampled
/// pointwise monotonicity of the weights on the punctured unit polydisc.
pub fn verify_sequence(
    seq: &ApproxSequence,
    w: &WeightSpec,
    samples: u64,
    seed: u64,
    caps: &Caps,
) -> Result<VerifyReport, Error> {
    let m = w.m();
    if seq.terms.is_empty() || seq.terms.len() != seq.certificates.len() {
        return Err(Error::InvalidInput(
            "sequence terms and certificates are inconsistent".into(),
        ));
    }
    for term in &seq.terms {
        if term.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: term.len(),
            });
        }
    }
    if seq.epsilon.sign_capped(caps.max_bits)? != 1 {
        return Err(Error::NonPositiveEpsilon);
    }

    let one = SurdNumber::one();
    let target: Staircase = nonmembers(w, &one, caps)?;

    // (a) staircase certificates, recomputed from scratch
    for (k, (term, cert)) in seq.terms.iter().zip(&seq.certificates).enumerate() {
        let tw = term_weight(term, w)?;
        let st = nonmembers(&tw, &one, caps)?;
        if st.nonmembers != target.nonmembers {
            return Err(Error::CertificateMismatch {
                term: k + 1,
                detail: format!(
                    "non-member sets differ: {} vs {}",
                    exponents_text(&st.nonmembers),
                    exponents_text(&target.nonmembers)
                ),
            });
        }
        let digest = certificate_digest(&st.nonmembers, &target.nonmembers);
        if digest != cert.digest {
            return Err(Error::CertificateMismatch {
                term: k + 1,
                detail: "stored digest does not match the recomputed staircases".into(),
            });
        }
    }

    // exact window containment and componentwise monotonicity
    let lower_factor = &one - &seq.epsilon;
    for (k, term) in seq.terms.iter().enumerate() {
        for (i, q) in term.iter().enumerate() {
            let a = w.exponent(i);
            let qs = SurdNumber::from_rational(q.clone());
            let above_window = (&qs - &(a * &lower_factor)).sign_capped(caps.max_bits)?;
            if above_window <= 0 {
                return Err(Error::CertificateMismatch {
                    term: k + 1,
                    detail: format!("term component {} leaves the window from below", i + 1),
                });
            }
            let gap = (a - &qs).sign_capped(caps.max_bits)?;
            let irrational = !a.is_rational();
            if gap < 0 || (irrational && gap == 0) {
                return Err(Error::CertificateMismatch {
                    term: k + 1,
                    detail: format!("term component {} does not approximate from below", i + 1),
                });
            }
            if k > 0 {
                let prev = &seq.terms[k - 1][i];
                if q < prev || (irrational && q == prev) {
                    return Err(Error::CertificateMismatch {
                        term: k + 1,
                        detail: format!("term component {} fails strict increase", i + 1),
                    });
                }
            }
        }
    }

    // (b) sampled pointwise monotonicity of phi <= phi_{k+1} <= phi_k <= (1-eps) phi
    let a_f64: Vec<f64> = w.exponents().iter().map(|a| a.to_f64()).collect();
    let term_f64: Vec<Vec<f64>> = seq
        .terms
        .iter()
        .map(|t| t.iter().map(crate::numbers::ratio_to_f64).collect())
        .collect();
    let eps_f64 = seq.epsilon.to_f64();
    let tol = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let moduli: Vec<f64> = (0..m)
            .map(|_| {
                let u: f64 = rng.gen();
                // radius of a uniform point of the punctured unit disc
                u.sqrt().max(f64::MIN_POSITIVE)
            })
            .collect();
        let phi = |coeffs: &[f64]| -> f64 {
            coeffs
                .iter()
                .zip(&moduli)
                .map(|(c, r)| c * r.ln())
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let phi_target = phi(&a_f64);
        let scale = 1.0 + phi_target.abs();
        let mut prev = f64::INFINITY;
        for (k, coeffs) in term_f64.iter().enumerate() {
            let phi_k = phi(coeffs);
            if phi_k < phi_target - tol * scale
                || phi_k > (1.0 - eps_f64) * phi_target + tol * scale
                || phi_k > prev + tol * scale
            {
                return Err(Error::MonotonicityViolation {
                    term: k + 1,
                    point: moduli,
                });
            }
            prev = phi_k;
        }
    }

    Ok(VerifyReport {
        terms: seq.terms.len(),
        certificates_checked: seq.certificates.len(),
        samples,
        seed,
        violations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn sqrt2_sequence_has_empty_staircases() {
        let weight = w(&["sqrt(2)", "sqrt(2)"]);
        let seq = build_sequence(&weight, 3, Some(s("1/2")), &caps()).unwrap();
        assert_eq!(seq.mode, SequenceMode::Strict);
        assert_eq!(seq.terms.len(), 3);
        for cert in &seq.certificates {
            assert!(cert.term_nonmembers.is_empty());
            assert!(cert.target_nonmembers.is_empty());
        }
        // strictly increasing toward sqrt(2), within the window
        for i in 0..2 {
            for k in 1..3 {
                assert!(seq.terms[k][i] > seq.terms[k - 1][i]);
            }
        }
        let report = verify_sequence(&seq, &weight, 100, 42, &caps()).unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn two_sqrt2_sequence_keeps_the_corner() {
        let weight = w(&["2*sqrt(2)", "2*sqrt(2)"]);
        let seq = build_sequence(&weight, 2, Some(s("1/4")), &caps()).unwrap();
        for cert in &seq.certificates {
            assert_eq!(cert.term_nonmembers, vec![Exponent::new(vec![0, 0])]);
        }
        // terms in (3/2 sqrt(2), 2 sqrt(2)) ~ (2.121, 2.828)
        for term in &seq.terms {
            for q in term {
                let v = crate::numbers::ratio_to_f64(q);
                assert!(v > 2.121 && v < 2.829, "term {}", q);
            }
        }
        let report = verify_sequence(&seq, &weight, 100, 7, &caps()).unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn rational_weight_gives_constant_mode() {
        let weight = w(&["2", "3"]);
        let seq = build_sequence(&weight, 4, None, &caps()).unwrap();
        assert_eq!(seq.mode, SequenceMode::Constant);
        assert_eq!(seq.terms.len(), 4);
        for term in &seq.terms {
            assert_eq!(term, &vec![rat(2, 1), rat(3, 1)]);
        }
        let report = verify_sequence(&seq, &weight, 50, 1, &caps()).unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn convergence_rate_bound_holds_exactly() {
        let weight = w(&["sqrt(2)", "sqrt(3)"]);
        let eps = s("1/2");
        let seq = build_sequence(&weight, 6, Some(eps.clone()), &caps()).unwrap();
        let mut halving = rat(1, 2);
        for term in &seq.terms {
            for (i, q) in term.iter().enumerate() {
                let a = weight.exponent(i);
                let bound = (a * &eps).scaled(&halving);
                let gap = a - &SurdNumber::from_rational(q.clone());
                assert!(gap.sign() > 0);
                assert!((&bound - &gap).sign() > 0, "rate bound failed at {}", q);
            }
            halving /= BigRational::from_integer(BigInt::from(2));
        }
    }

    #[test]
    fn epsilon_above_margin_is_rejected() {
        let weight = w(&["2*sqrt(2)", "2*sqrt(2)"]);
        // epsilon0 = 1 - sqrt(2)/2 ~ 0.2929
        match build_sequence(&weight, 2, Some(s("1/2")), &caps()) {
            Err(Error::EpsilonTooLarge { .. }) => {}
            other => panic!("expected EpsilonTooLarge, got {:?}", other),
        }
    }

    #[test]
    fn not_approximable_inputs_are_rejected() {
        let weight = w(&["1+sqrt(2)", "1+1/2*sqrt(2)"]);
        match build_sequence(&weight, 2, None, &caps()) {
            Err(Error::NotApproximableInput) => {}
            other => panic!("expected NotApproximableInput, got {:?}", other),
        }
    }

    #[test]
    fn tampered_terms_fail_certificate_checks() {
        let weight = w(&["2*sqrt(2)", "2*sqrt(2)"]);
        let mut seq = build_sequence(&weight, 2, Some(s("1/4")), &caps()).unwrap();
        seq.terms[1] = vec![rat(3, 1), rat(3, 1)];
        match verify_sequence(&seq, &weight, 50, 3, &caps()) {
            Err(Error::CertificateMismatch { term: 2, .. }) => {}
            other => panic!("expected CertificateMismatch, got {:?}", other),
        }
    }

    #[test]
    fn json_roundtrip_keeps_terms_and_digests() {
        let weight = w(&["sqrt(2)", "sqrt(2)"]);
        let seq = build_sequence(&weight, 3, Some(s("1/2")), &caps()).unwrap();
        let json = serde_json::to_string(&seq).unwrap();
        let back: ApproxSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(back.terms, seq.terms);
        assert_eq!(back.epsilon, seq.epsilon);
        assert_eq!(
            back.certificates
                .iter()
                .map(|c| &c.digest)
                .collect::<Vec<_>>(),
            seq.certificates
                .iter()
                .map(|c| &c.digest)
                .collect::<Vec<_>>()
        );
        // a deserialized sequence still verifies: sets are recomputed
        let report = verify_sequence(&back, &weight, 50, 9, &caps()).unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn sandwich_is_strict_for_irrational_weights() {
        let weight = w(&["sqrt(2)", "sqrt(2)"]);
        let seq = build_sequence(&weight, 3, Some(s("1/2")), &caps()).unwrap();
        // at any point with both moduli in (0,1), phi_k > phi strictly
        let a = weight.exponent(0).to_f64();
        let moduli = [0.3f64, 0.7];
        for term in &seq.terms {
            let phi = moduli
                .iter()
                .map(|r| a * r.ln())
                .fold(f64::NEG_INFINITY, f64::max);
            let phi_k = moduli
                .iter()
                .zip(term)
                .map(|(r, q)| crate::numbers::ratio_to_f64(q) * r.ln())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(phi_k > phi);
        }
    }
}
