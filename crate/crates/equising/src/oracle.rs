//! Integral verification engine on the polydisc.
//!
//! The mass of a monomial over the region `{max |z_i|^{a_i} < sqrt(r)}`
//! (times a trailing polydisc) has the closed form
//! `pi^n * r^s / prod(alpha_i + 1) * prod rho^{2(alpha_j+1)}/(alpha_j+1)`
//! with `s = sum (alpha_i+1)/a_i`. Everything here is built on that formula:
//! Monte Carlo estimates cross-check it, a dyadic-shell probe decides
//! integrability of `|z^alpha|^2 e^{-2 phi}` independently of the exact
//! membership test, the `G`-curve checker verifies concavity of the minimal
//! integration in `-log r`, and the Bessel check verifies the termwise
//! Parseval inequality two ways.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::numbers::{ratio_to_f64, SurdNumber};
use crate::serde_util::Decimal17;
use crate::staircase::{Exponent, WeightSpec};
use crate::{Caps, Error};

const SHELLS: usize = 64;
const PROBE_TOL: f64 = 1e-12;
const GCURVE_REL_TOL: f64 = 1e-9;
const MIN_MC_SAMPLES: u64 = 1000;
const MIN_ACCEPT_RATE: f64 = 1e-6;
const MC_CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    Max,
    Sum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Integrability {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Exact mass of `|z^alpha|^2` over `{max |z_i|^{a_i} < sqrt(r)}` times the
/// trailing polydisc: `pi^pi_power * coefficient * r^exponent`.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormMass {
    pub pi_power: u32,
    #[serde(with = "crate::serde_util::rat")]
    pub coefficient: BigRational,
    pub exponent: SurdNumber,
    #[serde(with = "crate::serde_util::rat")]
    pub radius: BigRational,
    pub decimal: Decimal17,
}

impl ClosedFormMass {
    /// Decimal value at an arbitrary radius in (0, 1].
    pub fn decimal_at(&self, r: &BigRational) -> f64 {
        let r = ratio_to_f64(r);
        let s = self.exponent.to_f64();
        std::f64::consts::PI.powi(self.pi_power as i32)
            * ratio_to_f64(&self.coefficient)
            * (s * r.ln()).exp()
    }
}

/// Monte Carlo report for one monomial mass.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub region: Region,
    pub closed_form: Decimal17,
    pub exponent: SurdNumber,
    pub mc_estimate: Decimal17,
    pub mc_stderr: Decimal17,
    pub samples: u64,
    pub seed: u64,
    pub accepted: u64,
}

fn check_radius(r: &BigRational) -> Result<(), Error> {
    if !r.is_positive() || r > &BigRational::one() {
        return Err(Error::InvalidInput("radius must lie in (0, 1]".into()));
    }
    Ok(())
}

/// Accept an exponent over the first `m` or all `n` coordinates; return the
/// full `n`-dimensional vector, zero-extended.
fn full_alpha(alpha: &Exponent, w: &WeightSpec) -> Result<Vec<u64>, Error> {
    let len = alpha.len();
    if len < w.m() || len > w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: w.ambient_dim(),
            got: len,
        });
    }
    let mut out = alpha.as_slice().to_vec();
    out.resize(w.ambient_dim(), 0);
    Ok(out)
}

fn ratio_sum_leading(alpha: &[u64], w: &WeightSpec, caps: &Caps) -> Result<SurdNumber, Error> {
    let recips = w.reciprocals(caps)?;
    let mut acc = SurdNumber::zero();
    for (r, &a) in recips.iter().zip(alpha) {
        acc = &acc + &r.scaled(&BigRational::from_integer(BigInt::from(a + 1)));
    }
    Ok(acc)
}

/// The closed-form mass, with exact coefficient and exact surd exponent.
pub fn closed_form_mass(
    alpha: &Exponent,
    w: &WeightSpec,
    r: &BigRational,
    caps: &Caps,
) -> Result<ClosedFormMass, Error> {
    check_radius(r)?;
    let full = full_alpha(alpha, w)?;
    let s = ratio_sum_leading(&full[..w.m()], w, caps)?;
    let mut coefficient = BigRational::one();
    for &a in &full[..w.m()] {
        coefficient /= BigRational::from_integer(BigInt::from(a + 1));
    }
    let rho = w.trailing_radius();
    for &a in &full[w.m()..] {
        let power = 2 * (a + 1) as i32;
        let rho_pow = num_traits::pow::Pow::pow(rho.clone(), power);
        coefficient *= rho_pow / BigRational::from_integer(BigInt::from(a + 1));
    }
    let mut mass = ClosedFormMass {
        pi_power: w.ambient_dim() as u32,
        coefficient,
        exponent: s,
        radius: r.clone(),
        decimal: Decimal17(0.0),
    };
    mass.decimal = Decimal17(mass.decimal_at(r));
    Ok(mass)
}

/// Radii of the enclosing polydisc: `r^(1/(2 a_i))` on the weighted axes,
/// the trailing radius elsewhere.
fn polydisc_radii(w: &WeightSpec, r: &BigRational) -> Vec<f64> {
    let r = ratio_to_f64(r);
    let mut radii = Vec::with_capacity(w.ambient_dim());
    for a in w.exponents() {
        radii.push((r.ln() / (2.0 * a.to_f64())).exp());
    }
    radii.resize(w.ambient_dim(), ratio_to_f64(w.trailing_radius()));
    radii
}

fn polydisc_volume(radii: &[f64]) -> f64 {
    radii.iter().map(|r| std::f64::consts::PI * r * r).product()
}

/// Run `samples` Monte Carlo draws in fixed-size chunks, each chunk on its
/// own seeded stream, and merge the partial accumulators in chunk order.
/// The result is bit-identical for a given `(samples, seed)` regardless of
/// worker count.
fn chunked_mc<A, Make, Fill>(samples: u64, seed: u64, make: Make, fill: Fill) -> Vec<A>
where
    A: Send,
    Make: Fn() -> A + Sync,
    Fill: Fn(&mut ChaCha8Rng, u64, &mut A) + Sync,
{
    let chunk_count = samples.div_ceil(MC_CHUNK);
    (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let len = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk + 1);
            let mut acc = make();
            fill(&mut rng, len, &mut acc);
            acc
        })
        .collect()
}

#[derive(Clone, Default)]
struct MassAccumulator {
    sum: f64,
    sum_sq: f64,
    accepted: u64,
}

/// Monte Carlo estimate of the monomial mass over the `Max` or `Sum`
/// sublevel region, by uniform sampling of the enclosing polydisc with
/// rejection on the `Sum` region.
pub fn mc_mass(
    alpha: &Exponent,
    w: &WeightSpec,
    r: &BigRational,
    region: Region,
    samples: u64,
    seed: u64,
    caps: &Caps,
) -> Result<IntegralReport, Error> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_MC_SAMPLES,
            got: samples,
        });
    }
    let closed = closed_form_mass(alpha, w, r, caps)?;
    let full = full_alpha(alpha, w)?;
    let radii = polydisc_radii(w, r);
    let volume = polydisc_volume(&radii);
    let powers: Vec<i32> = full.iter().map(|&a| a as i32).collect();
    let weights: Vec<f64> = w.exponents().iter().map(|a| a.to_f64()).collect();
    let sqrt_r = ratio_to_f64(r).sqrt();
    let m = w.m();

    let partials = chunked_mc(
        samples,
        seed,
        MassAccumulator::default,
        |rng, len, acc: &mut MassAccumulator| {
            for _ in 0..len {
                let mut integrand = 1.0f64;
                let mut sum_form = 0.0f64;
                for (i, radius) in radii.iter().enumerate() {
                    let u: f64 = rng.gen();
                    let rad = radius * u.sqrt();
                    integrand *= (rad * rad).powi(powers[i]);
                    if i < m {
                        sum_form += rad.powf(weights[i]);
                    }
                }
                let inside = match region {
                    Region::Max => true,
                    Region::Sum => sum_form < sqrt_r,
                };
                let value = if inside { integrand } else { 0.0 };
                if inside {
                    acc.accepted += 1;
                }
                acc.sum += value;
                acc.sum_sq += value * value;
            }
        },
    );
    let total = partials
        .into_iter()
        .fold(MassAccumulator::default(), |a, b| MassAccumulator {
            sum: a.sum + b.sum,
            sum_sq: a.sum_sq + b.sum_sq,
            accepted: a.accepted + b.accepted,
        });

    let n = samples as f64;
    if (total.accepted as f64) < MIN_ACCEPT_RATE * n {
        return Err(Error::DegenerateRegion {
            accepted: total.accepted,
            samples,
        });
    }
    let mean = total.sum / n;
    let variance = ((total.sum_sq / n) - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(IntegralReport {
        region,
        closed_form: closed.decimal,
        exponent: closed.exponent,
        mc_estimate: Decimal17(volume * mean),
        mc_stderr: Decimal17(volume * (variance / n).sqrt()),
        samples,
        seed,
        accepted: total.accepted,
    })
}

/// Dyadic-shell integrability probe for `|z^alpha|^2 e^{-2 phi}` near the
/// origin. On the shell where `e^{-2 phi}` is pinched between `2^j` and
/// `2^{j+1}`, the unweighted mass is `M(2^-j) - M(2^-j-1)` with
/// `M(u) = C u^s`, so the weighted shell terms form a geometric sequence of
/// ratio `2^(1-s)`. The probe classifies by the observed shell ratios alone:
/// all below 1 means a geometrically dominated tail, none below 1 means
/// non-decreasing terms and divergence.
pub fn integrability_probe(
    alpha: &Exponent,
    w: &WeightSpec,
    caps: &Caps,
) -> Result<Integrability, Error> {
    let full = full_alpha(alpha, w)?;
    let s = ratio_sum_leading(&full[..w.m()], w, caps)?.to_f64();
    // log2 of the weighted lower-bound shell terms; log space keeps 64
    // shells representable for any realistic exponent.
    let c0 = (1.0 - (-s * std::f64::consts::LN_2).exp()).log2();
    let log_terms: Vec<f64> = (0..SHELLS).map(|j| c0 + (j as f64) * (1.0 - s)).collect();
    let mut below = 0usize;
    let mut above_or_near = 0usize;
    for pair in log_terms.windows(2) {
        let ratio = (pair[1] - pair[0]).exp2();
        if ratio < 1.0 - PROBE_TOL {
            below += 1;
        } else {
            above_or_near += 1;
        }
    }
    Ok(if above_or_near == 0 {
        Integrability::Convergent
    } else if below == 0 {
        Integrability::Divergent
    } else {
        Integrability::Inconclusive
    })
}

/// The minimal-integration curve `G(-log r)` for a non-member monomial,
/// evaluated on a rational grid.
#[derive(Clone, Debug, Serialize)]
pub struct GCurve {
    pub alpha: Exponent,
    #[serde(with = "crate::serde_util::rat_vec")]
    pub rs: Vec<BigRational>,
    pub values: Vec<Decimal17>,
    pub exponent: SurdNumber,
    pub maximal_flag: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GCurveReport {
    pub curve: GCurve,
    pub monotone_ok: bool,
    pub concavity_ok: bool,
    pub lower_bound_ok: bool,
    pub equality_on_grid: bool,
    pub passed: bool,
}

/// Verify concavity of `G(-log r)` in `r`, the linear lower bound
/// `G(-log r) >= r G(0)`, and the equality case for threshold exponents.
///
/// Requires `sum (alpha_i+1)/a_i <= 1`; members have identically vanishing
/// minimal integration and are rejected.
pub fn g_curve_check(
    alpha: &Exponent,
    w: &WeightSpec,
    grid: &[BigRational],
    caps: &Caps,
) -> Result<GCurveReport, Error> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid);
    }
    let mut rs: Vec<BigRational> = grid.to_vec();
    for r in &rs {
        if !r.is_positive() || r > &BigRational::one() {
            return Err(Error::InvalidGrid);
        }
    }
    rs.sort();
    rs.dedup();

    let full = full_alpha(alpha, w)?;
    let s = ratio_sum_leading(&full[..w.m()], w, caps)?;
    let gap = &s - &SurdNumber::one();
    let gap_sign = gap.sign_capped(caps.max_bits)?;
    if gap_sign > 0 {
        return Err(Error::PreconditionMemberExponent);
    }
    let maximal_flag = gap_sign == 0;

    let closed = closed_form_mass(alpha, w, &BigRational::one(), caps)?;
    let g0 = closed.decimal.0;
    let values: Vec<f64> = rs.iter().map(|r| closed.decimal_at(r)).collect();

    let tol = |a: f64, b: f64| GCURVE_REL_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);

    let mut monotone_ok = values.iter().all(|v| *v > 0.0);
    for pair in values.windows(2) {
        if pair[1] < pair[0] - tol(pair[0], pair[1]) {
            monotone_ok = false;
        }
    }

    let mut concavity_ok = true;
    for i in 0..rs.len() {
        for j in (i + 1)..rs.len() {
            let mid = (&rs[i] + &rs[j]) / BigRational::from_integer(BigInt::from(2));
            let lhs = closed.decimal_at(&mid);
            let rhs = 0.5 * (values[i] + values[j]);
            if lhs < rhs - tol(lhs, rhs) {
                concavity_ok = false;
            }
        }
    }

    let mut lower_bound_ok = true;
    let mut equality_on_grid = true;
    for (r, v) in rs.iter().zip(&values) {
        let linear = ratio_to_f64(r) * g0;
        if *v < linear - tol(*v, linear) {
            lower_bound_ok = false;
        }
        if (*v - linear).abs() > tol(*v, linear) {
            equality_on_grid = false;
        }
    }

    let passed =
        monotone_ok && concavity_ok && lower_bound_ok && (!maximal_flag || equality_on_grid);
    Ok(GCurveReport {
        curve: GCurve {
            alpha: Exponent::new(full),
            rs,
            values: values.into_iter().map(Decimal17).collect(),
            exponent: s,
            maximal_flag,
        },
        monotone_ok,
        concavity_ok,
        lower_bound_ok,
        equality_on_grid,
        passed,
    })
}

/// One monomial term of a Bessel-check polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct BesselTerm {
    pub alpha: Exponent,
    #[serde(with = "crate::serde_util::rat")]
    pub coefficient: BigRational,
    /// Exact-route weighted mass `|b|^2 * C s/(s-1) r^(s-1)`, as a decimal.
    pub weighted_mass: Decimal17,
    /// Whether positivity of the weighted mass was certified exactly.
    pub certified_positive: bool,
    pub mc_estimate: Decimal17,
    pub diff_mean: Decimal17,
    pub diff_stderr: Decimal17,
    pub mc_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BesselReport {
    pub terms: Vec<BesselTerm>,
    pub exact_total: Decimal17,
    pub mc_total: Decimal17,
    pub parseval_ok: bool,
    pub samples: u64,
    pub seed: u64,
    pub passed: bool,
}

#[derive(Clone)]
struct BesselAccumulator {
    total_sum: f64,
    term_sum: Vec<f64>,
    diff_sum: Vec<f64>,
    diff_sum_sq: Vec<f64>,
}

impl BesselAccumulator {
    fn new(k: usize) -> Self {
        BesselAccumulator {
            total_sum: 0.0,
            term_sum: vec![0.0; k],
            diff_sum: vec![0.0; k],
            diff_sum_sq: vec![0.0; k],
        }
    }
}

/// Verify the termwise Bessel inequality for `f = sum b_alpha z^alpha`:
/// the weighted mass of `f` dominates the weighted mass of every term.
///
/// The exact route uses monomial orthogonality on the Reinhardt region: the
/// total is the sum of the (positive) per-term masses, so domination is
/// forced once each term mass is certified positive. The Monte Carlo route
/// estimates total and term integrals on a shared sample stream and checks
/// the difference against three standard errors.
pub fn bessel_check(
    coeffs: &[(Exponent, BigRational)],
    w: &WeightSpec,
    r: &BigRational,
    samples: u64,
    seed: u64,
    caps: &Caps,
) -> Result<BesselReport, Error> {
    if coeffs.is_empty() {
        return Err(Error::InvalidInput("polynomial has no terms".into()));
    }
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_MC_SAMPLES,
            got: samples,
        });
    }
    check_radius(r)?;

    let mut alphas: Vec<Vec<u64>> = Vec::new();
    let mut bs: Vec<BigRational> = Vec::new();
    for (alpha, b) in coeffs {
        if b.is_zero() {
            return Err(Error::InvalidInput("zero coefficient in term list".into()));
        }
        let full = full_alpha(alpha, w)?;
        if alphas.contains(&full) {
            return Err(Error::InvalidInput(
                "duplicate exponent in term list".into(),
            ));
        }
        alphas.push(full);
        bs.push(b.clone());
    }

    // Integrability gate per term, via the shell probe.
    for full in &alphas {
        let e = Exponent::new(full.clone());
        if integrability_probe(&e, w, caps)? != Integrability::Convergent {
            return Err(Error::NonIntegrableTerm {
                alpha: full.clone(),
            });
        }
    }

    // Exact route: weighted mass of z^alpha over {max|z_i|^{a_i} < sqrt(r)}
    // is C * s/(s-1) * r^(s-1), integrating the closed form against the
    // e^{-2 phi} shell measure.
    let mut terms_exact = Vec::with_capacity(alphas.len());
    let mut exact_total = 0.0f64;
    let mut parseval_ok = true;
    let r_f = ratio_to_f64(r);
    for (full, b) in alphas.iter().zip(&bs) {
        let closed = closed_form_mass(&Exponent::new(full.clone()), w, r, caps)?;
        let s = closed.exponent.clone();
        let s_minus_one = &s - &SurdNumber::one();
        if s_minus_one.sign_capped(caps.max_bits)? <= 0 {
            return Err(Error::NonIntegrableTerm {
                alpha: full.clone(),
            });
        }
        let factor = &s * &s_minus_one.reciprocal_capped(caps.max_primes)?;
        let certified_positive =
            factor.sign_capped(caps.max_bits)? > 0 && closed.coefficient.is_positive();
        parseval_ok &= certified_positive;
        let b_f = ratio_to_f64(b);
        let mass = b_f
            * b_f
            * std::f64::consts::PI.powi(closed.pi_power as i32)
            * ratio_to_f64(&closed.coefficient)
            * factor.to_f64()
            * ((s.to_f64() - 1.0) * r_f.ln()).exp();
        exact_total += mass;
        terms_exact.push((mass, certified_positive));
    }

    // Monte Carlo route on a shared sample stream.
    let radii = polydisc_radii(w, r);
    let volume = polydisc_volume(&radii);
    let weights: Vec<f64> = w.exponents().iter().map(|a| a.to_f64()).collect();
    let b_f64: Vec<f64> = bs.iter().map(ratio_to_f64).collect();
    let m = w.m();
    let k = alphas.len();

    let partials = chunked_mc(
        samples,
        seed,
        || BesselAccumulator::new(k),
        |rng, len, acc: &mut BesselAccumulator| {
            let mut point = vec![Complex64::new(0.0, 0.0); radii.len()];
            let mut moduli = vec![0.0f64; radii.len()];
            for _ in 0..len {
                for (i, radius) in radii.iter().enumerate() {
                    let u: f64 = rng.gen();
                    let v: f64 = rng.gen();
                    let rad = radius * u.sqrt();
                    let angle = 2.0 * std::f64::consts::PI * v;
                    point[i] = Complex64::from_polar(rad, angle);
                    moduli[i] = rad;
                }
                let mut max_weighted: f64 = 0.0;
                for i in 0..m {
                    max_weighted = max_weighted.max(moduli[i].powf(weights[i]));
                }
                let weight_factor = 1.0 / (max_weighted * max_weighted);

                let mut f_val = Complex64::new(0.0, 0.0);
                let mut term_vals = vec![0.0f64; k];
                for (t, full) in alphas.iter().enumerate() {
                    let mut monomial = Complex64::new(1.0, 0.0);
                    for (i, &a) in full.iter().enumerate() {
                        monomial *= point[i].powu(a as u32);
                    }
                    f_val += b_f64[t] * monomial;
                    term_vals[t] = b_f64[t] * b_f64[t] * monomial.norm_sqr() * weight_factor;
                }
                let total_val = f_val.norm_sqr() * weight_factor;
                acc.total_sum += total_val;
                for (t, &term_val) in term_vals.iter().enumerate() {
                    acc.term_sum[t] += term_val;
                    let d = total_val - term_val;
                    acc.diff_sum[t] += d;
                    acc.diff_sum_sq[t] += d * d;
                }
            }
        },
    );
    let mut acc = BesselAccumulator::new(k);
    for p in partials {
        acc.total_sum += p.total_sum;
        for t in 0..k {
            acc.term_sum[t] += p.term_sum[t];
            acc.diff_sum[t] += p.diff_sum[t];
            acc.diff_sum_sq[t] += p.diff_sum_sq[t];
        }
    }

    let n = samples as f64;
    let mc_total = volume * acc.total_sum / n;
    let mut terms = Vec::with_capacity(k);
    let mut passed = parseval_ok;
    for t in 0..k {
        let mean_d = acc.diff_sum[t] / n;
        let var_d = ((acc.diff_sum_sq[t] / n) - mean_d * mean_d).max(0.0) * n / (n - 1.0);
        let stderr_d = volume * (var_d / n).sqrt();
        let diff_mean = volume * mean_d;
        let scale = mc_total.abs().max(f64::MIN_POSITIVE);
        let mc_ok = diff_mean >= -3.0 * stderr_d - 1e-12 * scale;
        passed &= mc_ok;
        terms.push(BesselTerm {
            alpha: Exponent::new(alphas[t].clone()),
            coefficient: bs[t].clone(),
            weighted_mass: Decimal17(terms_exact[t].0),
            certified_positive: terms_exact[t].1,
            mc_estimate: Decimal17(volume * acc.term_sum[t] / n),
            diff_mean: Decimal17(diff_mean),
            diff_stderr: Decimal17(stderr_d),
            mc_ok,
        });
    }

    Ok(BesselReport {
        terms,
        exact_total: Decimal17(exact_total),
        mc_total: Decimal17(mc_total),
        parseval_ok,
        samples,
        seed,
        passed,
    })
}
