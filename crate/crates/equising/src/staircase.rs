//! Monomial staircase of `I(t*phi)` for toric max-weights.
//!
//! For `phi = log max |z_i|^{a_i}` the monomial `z^alpha` lies in `I(t*phi)`
//! exactly when `sum (alpha_i + 1)/a_i > t`, so the ideal is determined on
//! monomials by the finite set of non-member exponents. This module computes
//! membership, the non-member set, the minimal monomial generators, ideal
//! equality across scalings, and the margin `epsilon_0` below which
//! rescaling by `1 - eps` leaves the ideal unchanged.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::numbers::SurdNumber;
use crate::{Caps, Error};

/// Exponent vector of a monomial in the first `m` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(pub Vec<u64>);

impl Exponent {
    pub fn new(v: Vec<u64>) -> Self {
        Exponent(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Componentwise partial order on exponents.
    pub fn dominates(&self, other: &Exponent) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}

/// Iterate the integer box `prod [0, bounds_i]` in ascending lexicographic
/// order, calling `visit` on each point.
pub(crate) fn for_each_box_point<F: FnMut(&[u64])>(bounds: &[u64], mut visit: F) {
    let m = bounds.len();
    if m == 0 {
        return;
    }
    let mut point = vec![0u64; m];
    loop {
        visit(&point);
        let mut level = m;
        loop {
            if level == 0 {
                return;
            }
            level -= 1;
            if point[level] < bounds[level] {
                point[level] += 1;
                for p in point.iter_mut().skip(level + 1) {
                    *p = 0;
                }
                break;
            }
            if level == 0 {
                return;
            }
        }
    }
}

/// Toric weight data: exponents `a_1..a_m`, ambient dimension `n >= m`, and
/// the polydisc radius used for the trailing coordinates `z_{m+1}..z_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    exponents: Vec<SurdNumber>,
    ambient_dim: usize,
    trailing_radius: BigRational,
}

impl WeightSpec {
    pub fn new(
        exponents: Vec<SurdNumber>,
        ambient_dim: usize,
        trailing_radius: BigRational,
    ) -> Result<Self, Error> {
        if exponents.is_empty() {
            return Err(Error::InvalidWeight(
                "at least one exponent required".into(),
            ));
        }
        if ambient_dim < exponents.len() {
            return Err(Error::InvalidWeight(format!(
                "ambient dimension {} below weight count {}",
                ambient_dim,
                exponents.len()
            )));
        }
        if !trailing_radius.is_positive() {
            return Err(Error::InvalidWeight(
                "trailing radius must be positive".into(),
            ));
        }
        for (index, a) in exponents.iter().enumerate() {
            if a.sign_capped(crate::numbers::DEFAULT_MAX_BITS)? != 1 {
                return Err(Error::NonPositiveWeight { index });
            }
        }
        Ok(WeightSpec {
            exponents,
            ambient_dim,
            trailing_radius,
        })
    }

    /// Weight with `n = m` and the default trailing radius 1/2.
    pub fn diagonal(exponents: Vec<SurdNumber>) -> Result<Self, Error> {
        let n = exponents.len();
        WeightSpec::new(
            exponents,
            n,
            BigRational::new(BigInt::one(), BigInt::from(2)),
        )
    }

    pub fn m(&self) -> usize {
        self.exponents.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn exponents(&self) -> &[SurdNumber] {
        &self.exponents
    }

    pub fn exponent(&self, i: usize) -> &SurdNumber {
        &self.exponents[i]
    }

    pub fn trailing_radius(&self) -> &BigRational {
        &self.trailing_radius
    }

    pub fn is_rational(&self) -> bool {
        self.exponents.iter().all(|a| a.is_rational())
    }

    /// The same weight with every exponent multiplied by `t > 0`.
    pub fn rescaled(&self, t: &SurdNumber) -> Result<WeightSpec, Error> {
        WeightSpec::new(
            self.exponents.iter().map(|a| a * t).collect(),
            self.ambient_dim,
            self.trailing_radius.clone(),
        )
    }

    /// Canonical text of each exponent, for reports.
    pub fn weight_strings(&self) -> Vec<String> {
        self.exponents.iter().map(|a| a.to_string()).collect()
    }

    pub(crate) fn reciprocals(&self, caps: &Caps) -> Result<Vec<SurdNumber>, Error> {
        self.exponents
            .iter()
            .map(|a| a.reciprocal_capped(caps.max_primes).map_err(Error::from))
            .collect()
    }
}

/// The monomial trace of `I(t*phi)`: the finite non-member exponent set and
/// the minimal monomial generators of the member set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Staircase {
    pub scale: SurdNumber,
    pub nonmembers: Vec<Exponent>,
    pub generators: Vec<Exponent>,
}

impl Staircase {
    /// Canonical one-line text form; byte-identical for equal inputs.
    pub fn canonical_text(&self) -> String {
        let nm: Vec<String> = self.nonmembers.iter().map(|e| e.to_string()).collect();
        let gen: Vec<String> = self.generators.iter().map(|e| e.to_string()).collect();
        format!(
            "scale={};nonmembers={};generators={}",
            self.scale,
            nm.join(""),
            gen.join("")
        )
    }
}

impl fmt::Display for Staircase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

fn check_alpha_len(w: &WeightSpec, alpha: &Exponent) -> Result<(), Error> {
    if alpha.len() != w.m() {
        return Err(Error::DimensionMismatch {
            expected: w.m(),
            got: alpha.len(),
        });
    }
    Ok(())
}

fn check_scale(t: &SurdNumber, caps: &Caps) -> Result<(), Error> {
    if t.sign_capped(caps.max_bits)? != 1 {
        return Err(Error::NonPositiveScale);
    }
    Ok(())
}

/// `sum_i (alpha_i + 1) / a_i`, exactly.
pub fn sum_ratio(w: &WeightSpec, alpha: &Exponent, caps: &Caps) -> Result<SurdNumber, Error> {
    check_alpha_len(w, alpha)?;
    let recips = w.reciprocals(caps)?;
    Ok(weighted_sum(&recips, alpha.as_slice()))
}

fn weighted_sum(recips: &[SurdNumber], alpha: &[u64]) -> SurdNumber {
    let mut acc = SurdNumber::zero();
    for (r, &a) in recips.iter().zip(alpha) {
        let factor = BigRational::from_integer(BigInt::from(a + 1));
        acc = &acc + &r.scaled(&factor);
    }
    acc
}

/// Monomial membership `z^alpha` in `I(t*phi)`, decided exactly:
/// true iff `sum (alpha_i + 1)/a_i > t`.
pub fn contains(
    w: &WeightSpec,
    alpha: &Exponent,
    t: &SurdNumber,
    caps: &Caps,
) -> Result<bool, Error> {
    check_scale(t, caps)?;
    let s = sum_ratio(w, alpha, caps)?;
    Ok((&s - t).sign_capped(caps.max_bits)? > 0)
}

/// Per-axis bound `floor(t*a_i)` for the non-member box; `None` when the box
/// is empty (some `t*a_i < 1`, so no exponent can be a non-member).
fn box_floors(w: &WeightSpec, t: &SurdNumber, caps: &Caps) -> Result<Option<Vec<BigInt>>, Error> {
    let mut floors = Vec::with_capacity(w.m());
    for a in w.exponents() {
        let f = (a * t).floor_capped(caps.max_bits)?;
        if f <= BigInt::zero() {
            return Ok(None);
        }
        floors.push(f);
    }
    Ok(Some(floors))
}

fn check_box_size(floors: &[BigInt], slack: u64, cap: u64) -> Result<Vec<u64>, Error> {
    let mut product = BigInt::one();
    for f in floors {
        product *= f + BigInt::from(slack);
    }
    if product > BigInt::from(cap) {
        let size = u128::try_from(product).unwrap_or(u128::MAX);
        return Err(Error::BoxTooLarge { size, cap });
    }
    Ok(floors
        .iter()
        .map(|f| u64::try_from(f).expect("bound fits in u64 under the box cap"))
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn nonmember_dfs(
    level: usize,
    partial: SurdNumber,
    prefix: &mut Vec<u64>,
    bounds: &[u64],
    recips: &[SurdNumber],
    suffix_min: &[SurdNumber],
    t: &SurdNumber,
    caps: &Caps,
    out: &mut Vec<(Exponent, SurdNumber)>,
) -> Result<(), Error> {
    let m = bounds.len();
    for a in 0..bounds[level] {
        let contrib = recips[level].scaled(&BigRational::from_integer(BigInt::from(a + 1)));
        let partial_next = &partial + &contrib;
        let with_min = &partial_next + &suffix_min[level + 1];
        if (&with_min - t).sign_capped(caps.max_bits)? > 0 {
            break;
        }
        prefix[level] = a;
        if level + 1 == m {
            out.push((Exponent::new(prefix.clone()), partial_next));
        } else {
            nonmember_dfs(
                level + 1,
                partial_next,
                prefix,
                bounds,
                recips,
                suffix_min,
                t,
                caps,
                out,
            )?;
        }
    }
    prefix[level] = 0;
    Ok(())
}

/// Depth-first enumeration of all non-members with their exact ratio sums,
/// in ascending lexicographic order. Pruning uses monotonicity of the sum in
/// every coordinate: once the partial sum plus the minimal completion
/// exceeds `t`, no larger index on this axis can yield a non-member.
fn enumerate_nonmembers(
    w: &WeightSpec,
    t: &SurdNumber,
    caps: &Caps,
) -> Result<Vec<(Exponent, SurdNumber)>, Error> {
    check_scale(t, caps)?;
    let floors = match box_floors(w, t, caps)? {
        Some(f) => f,
        None => return Ok(Vec::new()),
    };
    let bounds = check_box_size(&floors, 0, caps.max_box)?;
    let recips = w.reciprocals(caps)?;
    let m = w.m();

    // suffix_min[j] = sum of r_i for i >= j: minimal contribution of the
    // remaining axes, attained at alpha_i = 0.
    let mut suffix_min = vec![SurdNumber::zero(); m + 1];
    for j in (0..m).rev() {
        suffix_min[j] = &suffix_min[j + 1] + &recips[j];
    }

    let mut out = Vec::new();
    let mut prefix = vec![0u64; m];
    nonmember_dfs(
        0,
        SurdNumber::zero(),
        &mut prefix,
        &bounds,
        &recips,
        &suffix_min,
        t,
        caps,
        &mut out,
    )?;
    Ok(out)
}

/// All non-member exponents of `I(t*phi)` together with the minimal monomial
/// generators of the member set.
pub fn nonmembers(w: &WeightSpec, t: &SurdNumber, caps: &Caps) -> Result<Staircase, Error> {
    let nm: Vec<Exponent> = enumerate_nonmembers(w, t, caps)?
        .into_iter()
        .map(|(e, _)| e)
        .collect();
    let generators = generators_from(w, t, &nm, caps)?;
    Ok(Staircase {
        scale: t.clone(),
        nonmembers: nm,
        generators,
    })
}

/// Minimal generators of the member set: members all of whose immediate
/// predecessors are non-members. Generators live in the non-member box
/// extended by one on each axis, so a set-lookup sweep suffices.
fn generators_from(
    w: &WeightSpec,
    t: &SurdNumber,
    nm: &[Exponent],
    caps: &Caps,
) -> Result<Vec<Exponent>, Error> {
    let m = w.m();
    if nm.is_empty() {
        // Unit ideal: the constant monomial generates everything.
        return Ok(vec![Exponent::new(vec![0; m])]);
    }
    let floors = box_floors(w, t, caps)?.expect("nonempty non-member set implies nonempty box");
    let extended = check_box_size(&floors, 1, caps.max_box)?;
    let nm_set: BTreeSet<&[u64]> = nm.iter().map(|e| e.as_slice()).collect();

    let mut out = Vec::new();
    let mut scratch = vec![0u64; m];
    for_each_box_point(&extended, |candidate| {
        if nm_set.contains(candidate) {
            return;
        }
        scratch.copy_from_slice(candidate);
        for i in 0..m {
            if candidate[i] == 0 {
                continue;
            }
            scratch[i] = candidate[i] - 1;
            let below_is_member = !nm_set.contains(scratch.as_slice());
            scratch[i] = candidate[i];
            if below_is_member {
                return;
            }
        }
        out.push(Exponent::new(candidate.to_vec()));
    });
    Ok(out)
}

/// Minimal monomial generators of the member set of `I(t*phi)`.
pub fn generators(w: &WeightSpec, t: &SurdNumber, caps: &Caps) -> Result<Vec<Exponent>, Error> {
    Ok(nonmembers(w, t, caps)?.generators)
}

/// Whether `I(t1*phi)` and `I(t2*phi)` agree on monomials (hence as ideals).
pub fn ideal_equal(
    w: &WeightSpec,
    t1: &SurdNumber,
    t2: &SurdNumber,
    caps: &Caps,
) -> Result<bool, Error> {
    let a = enumerate_nonmembers(w, t1, caps)?;
    let b = enumerate_nonmembers(w, t2, caps)?;
    Ok(a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.0 == y.0))
}

/// The largest margin `eps_0` with `I((1-eps)*phi) = I(phi)` for every
/// `eps` in `(0, eps_0]`.
///
/// Returns `None` when `sum (alpha_i+1)/a_i = 1` has a solution in
/// non-negative integers: no margin exists. Returns the cap value 1 when no
/// exponent reaches the threshold at all. Otherwise `eps_0 = 1 - s*` where
/// `s*` is the largest sub-threshold ratio sum, and the result is
/// post-verified against the staircase at scale `s*`.
pub fn epsilon0(w: &WeightSpec, caps: &Caps) -> Result<Option<SurdNumber>, Error> {
    let one = SurdNumber::one();
    let candidates = enumerate_nonmembers(w, &one, caps)?;
    let mut s_star: Option<SurdNumber> = None;
    for (_, s) in &candidates {
        if (s - &one).sign_capped(caps.max_bits)? == 0 {
            return Ok(None);
        }
        s_star = Some(match s_star {
            None => s.clone(),
            Some(best) => {
                if (s - &best).sign_capped(caps.max_bits)? > 0 {
                    s.clone()
                } else {
                    best
                }
            }
        });
    }
    let eps0 = match s_star {
        None => one,
        Some(s_star) => {
            assert!(
                ideal_equal(w, &one, &s_star, caps)?,
                "margin verification failed: staircases at 1 and s* differ"
            );
            &one - &s_star
        }
    };
    Ok(Some(eps0))
}

/// The log canonical threshold `sum 1/a_i`: membership of the constant
/// monomial flips exactly at this scale.
pub fn lct(w: &WeightSpec, caps: &Caps) -> Result<SurdNumber, Error> {
    let mut acc = SurdNumber::zero();
    for r in w.reciprocals(caps)? {
        acc = &acc + &r;
    }
    Ok(acc)
}
