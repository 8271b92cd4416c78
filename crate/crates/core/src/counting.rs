//! The closed-form count `N(mu, rho)`, its special cases, and executable
//! checks of its structural properties.
//!
//! `N = sum_s (-1)^(s-1) (a+1)^(s-2) sum_{zero-sum partitions into s parts}
//! prod_J f(b_J - 1, |J| + 1)`.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{falling_exact, falling_int, factorial, Exact, ExactError, Integer, Rational};
use crate::partitions::{enumerate_partitions, ZeroSumPartition};
use crate::profile::{OrderProfile, ProfileError, VanishingStructure};
use crate::subset::IndexSubset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("profile has {profile} poles but the structure has {structure}")]
    SizeMismatch { profile: usize, structure: usize },
    #[error("internal error: count evaluated to the non-integer {0}")]
    NonIntegralResult(Rational),
    #[error("internal error: count evaluated to the negative value {0}")]
    NegativeResult(Integer),
    #[error("poles {i} and {j} are not two distinct indices in 1..={n}")]
    InvalidPair { i: usize, j: usize, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("interpolant disagrees at b = {point:?}: count {expected}, fit {fitted}")]
    InterpolationMismatch { point: Vec<u64>, expected: Integer, fitted: Integer },
}

/// Non-fatal observations attached to a count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CountWarning {
    /// The structure forces `r_i = 0` at a simple pole, which no differential
    /// realizes; the formula is still evaluated as-is.
    ZeroResidueAtSimplePole { pole: usize },
}

impl fmt::Display for CountWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroResidueAtSimplePole { pole } => {
                write!(f, "structure forces a zero residue at simple pole {pole}")
            }
        }
    }
}

/// Contribution of the partitions into `s` parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct STerm {
    pub s: usize,
    /// Signed value `(-1)^(s-1) (a+1)^(s-2) sum_J prod f(b_J - 1, |J| + 1)`.
    pub value: Rational,
    pub partitions: Vec<ZeroSumPartition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBreakdown {
    pub total: Integer,
    pub per_s: Vec<STerm>,
    /// Largest part count `S` with a zero-sum partition.
    pub max_s: usize,
    pub warnings: Vec<CountWarning>,
}

/// The b-independent part of the closed form for one vanishing structure:
/// its zero-sum partitions, grouped by part count.
#[derive(Debug, Clone)]
pub struct ClosedFormPlan {
    n: usize,
    /// Distinct zero-sum parts as `(mask, size)`.
    parts: Vec<(u64, usize)>,
    /// `(s, flat)` where `flat` lists partitions as consecutive runs of `s` part indices.
    groups: Vec<(usize, Vec<u16>)>,
}

impl ClosedFormPlan {
    pub fn new(v: &VanishingStructure) -> Self {
        let table = enumerate_partitions(v);
        let mut index: HashMap<u64, u16> = HashMap::new();
        let mut parts = Vec::new();
        let mut groups = Vec::new();
        for (s, list) in table.iter() {
            let mut flat = Vec::with_capacity(s * list.len());
            for p in list {
                for part in p.parts() {
                    let idx = *index.entry(part.mask()).or_insert_with(|| {
                        parts.push((part.mask(), part.len()));
                        (parts.len() - 1) as u16
                    });
                    flat.push(idx);
                }
            }
            groups.push((s, flat));
        }
        Self { n: v.n(), parts, groups }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(s, |C_s|)` for every part count present.
    pub fn partition_counts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.groups.iter().map(|(s, flat)| (*s, flat.len() / s))
    }

    /// Signed per-`s` terms over an [`Exact`] scalar. The `s = 1` term is
    /// divided exactly by `a + 1`; a remainder is reported as `Inexact`.
    pub fn signed_terms<T: Exact>(&self, b: &[i128]) -> Result<Vec<(usize, T)>, ExactError> {
        debug_assert_eq!(b.len(), self.n);
        let a_plus_1 = T::from_i128(b.iter().sum::<i128>() - 1)?;
        let weights = self
            .parts
            .iter()
            .map(|&(mask, len)| {
                let b_j: i128 = crate::subset::bits(mask).map(|i| b[i]).sum();
                falling_exact::<T>(b_j - 1, len + 1)
            })
            .collect::<Result<Vec<T>, _>>()?;
        let mut out = Vec::with_capacity(self.groups.len());
        for (s, flat) in &self.groups {
            let mut sum = T::exact_zero();
            for chunk in flat.chunks_exact(*s) {
                let mut prod = T::exact_one();
                for &k in chunk {
                    prod = prod.try_mul(&weights[k as usize])?;
                }
                sum = sum.try_add(&prod)?;
            }
            let mut term = if *s == 1 {
                sum.exact_div(&a_plus_1)?
            } else {
                sum.try_mul(&a_plus_1.try_pow(s - 2)?)?
            };
            if s % 2 == 0 {
                term = term.try_neg()?;
            }
            out.push((*s, term));
        }
        Ok(out)
    }

    pub fn total<T: Exact>(&self, b: &[i128]) -> Result<T, ExactError> {
        self.signed_terms::<T>(b)?
            .iter()
            .try_fold(T::exact_zero(), |acc, (_, t)| acc.try_add(t))
    }

    /// The count for pole orders `b`, on `i128` when it fits and on
    /// [`Integer`] otherwise, asserted integral and nonnegative.
    pub fn count_poles(&self, b: &[u64]) -> Result<Integer, CountError> {
        if b.len() != self.n {
            return Err(CountError::SizeMismatch { profile: b.len(), structure: self.n });
        }
        let small: Vec<i128> = b.iter().map(|&x| i128::from(x)).collect();
        let total = match self.total::<i128>(&small) {
            Ok(t) => Integer::from(t),
            Err(ExactError::Overflow) => match self.total::<Integer>(&small) {
                Ok(t) => t,
                Err(_) => return Err(self.non_integral(&small)),
            },
            Err(_) => return Err(self.non_integral(&small)),
        };
        if total.is_negative() {
            return Err(CountError::NegativeResult(total));
        }
        Ok(total)
    }

    pub fn count(&self, mu: &OrderProfile) -> Result<Integer, CountError> {
        self.count_poles(mu.b())
    }

    fn non_integral(&self, b: &[i128]) -> CountError {
        let mu = OrderProfile::from_poles(b.iter().map(|&x| x as u64).collect());
        match mu.map(|mu| rational_terms(&mu, self)) {
            Ok(terms) => CountError::NonIntegralResult(terms.into_iter().map(|(_, v)| v).sum()),
            Err(e) => e.into(),
        }
    }
}

/// Per-`s` terms in exact rational arithmetic.
fn rational_terms(mu: &OrderProfile, plan: &ClosedFormPlan) -> Vec<(usize, Rational)> {
    let b = mu.b();
    let a_plus_1: Integer = Integer::from(mu.a()) + 1;
    let weights: Vec<Integer> = plan
        .parts
        .iter()
        .map(|&(mask, len)| {
            let b_j: u128 = crate::subset::bits(mask).map(|i| u128::from(b[i])).sum();
            falling_int(&(Integer::from(b_j) - 1), len as u32 + 1)
        })
        .collect();
    plan.groups
        .iter()
        .map(|(s, flat)| {
            let sum: Integer = flat
                .chunks_exact(*s)
                .map(|chunk| chunk.iter().map(|&k| &weights[k as usize]).product::<Integer>())
                .sum();
            let scale = if *s == 1 {
                Rational::new(Integer::one(), a_plus_1.clone())
            } else {
                Rational::from_integer(num_traits::pow(a_plus_1.clone(), s - 2))
            };
            let sign = if s % 2 == 0 { -Rational::one() } else { Rational::one() };
            (*s, sign * scale * Rational::from_integer(sum))
        })
        .collect()
}

fn check_sizes(mu: &OrderProfile, v: &VanishingStructure) -> Result<(), CountError> {
    if mu.n() != v.n() {
        return Err(CountError::SizeMismatch { profile: mu.n(), structure: v.n() });
    }
    Ok(())
}

/// Poles `i` with `b_i = 1` at which the structure forces `r_i = 0`.
pub fn simple_pole_warnings(mu: &OrderProfile, v: &VanishingStructure) -> Vec<CountWarning> {
    (1..=mu.n())
        .filter(|&i| mu.b()[i - 1] == 1 && v.forces_zero_residue(i))
        .map(|pole| CountWarning::ZeroResidueAtSimplePole { pole })
        .collect()
}

/// `N(mu, V)` with its per-`s` breakdown.
pub fn count_closed_form(mu: &OrderProfile, v: &VanishingStructure) -> Result<CountBreakdown, CountError> {
    check_sizes(mu, v)?;
    let table = enumerate_partitions(v);
    let plan = ClosedFormPlan::new(v);
    let terms = rational_terms(mu, &plan);
    let total: Rational = terms.iter().map(|(_, t)| t).sum();
    if !total.is_integer() {
        return Err(CountError::NonIntegralResult(total));
    }
    let total = total.to_integer();
    if total.is_negative() {
        return Err(CountError::NegativeResult(total));
    }
    let per_s = terms
        .into_iter()
        .map(|(s, value)| STerm { s, value, partitions: table.with_s(s).to_vec() })
        .collect();
    Ok(CountBreakdown {
        total,
        per_s,
        max_s: table.max_s(),
        warnings: simple_pole_warnings(mu, v),
    })
}

/// `f(a, n)`, the count for residues with no partial sum vanishing.
pub fn count_general(mu: &OrderProfile) -> Integer {
    falling_int(&Integer::from(mu.a()), mu.n() as u32)
}

/// The count when exactly the vanishing `I` (and its complement) holds:
/// `f(a, n) - f(b_I - 1, |I| + 1) f(a - b_I + 1, n - |I| + 1)`.
pub fn count_one_vanishing(mu: &OrderProfile, subset: IndexSubset) -> Result<Integer, CountError> {
    let n = mu.n();
    if !subset.is_proper(n) {
        return Err(ProfileError::InvalidSubset { subset, n }.into());
    }
    let a = Integer::from(mu.a());
    let b_i = Integer::from(mu.pole_sum(subset));
    let k = subset.len() as u32;
    let correction = falling_int(&(&b_i - 1), k + 1) * falling_int(&(&a - &b_i + 1), n as u32 - k + 1);
    Ok(count_general(mu) - correction)
}

/// The structure of a tuple that vanishes except for a `±r` pair at `i`, `j`.
pub fn two_nonzero_structure(n: usize, i: usize, j: usize) -> Result<VanishingStructure, CountError> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(CountError::InvalidPair { i, j, n });
    }
    let gens: Vec<IndexSubset> = (1..=n)
        .filter(|&k| k != i && k != j)
        .filter_map(|k| IndexSubset::from_indices([k]))
        .collect();
    Ok(VanishingStructure::from_generators(n, &gens)?)
}

/// `(n-2)! prod_{k != i,j} (b_k - 1)`.
pub fn count_two_nonzero(mu: &OrderProfile, i: usize, j: usize) -> Result<Integer, CountError> {
    let n = mu.n();
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(CountError::InvalidPair { i, j, n });
    }
    Ok((1..=n)
        .filter(|&k| k != i && k != j)
        .map(|k| Integer::from(mu.b()[k - 1]) - 1)
        .product::<Integer>()
        * factorial(n as u64 - 2))
}

/// Per-`s` terms of the formula evaluated over every set partition, as for
/// the zero residue tuple.
pub fn zero_identity_terms(mu: &OrderProfile) -> Result<Vec<(usize, Rational)>, CountError> {
    let plan = ClosedFormPlan::new(&VanishingStructure::identically_zero(mu.n())?);
    Ok(zero_identity_terms_with(&plan, mu))
}

fn zero_identity_terms_with(plan: &ClosedFormPlan, mu: &OrderProfile) -> Vec<(usize, Rational)> {
    let b: Vec<i128> = mu.b().iter().map(|&x| i128::from(x)).collect();
    match plan.signed_terms::<i128>(&b) {
        Ok(terms) => terms
            .into_iter()
            .map(|(s, t)| (s, Rational::from_integer(Integer::from(t))))
            .collect(),
        Err(_) => rational_terms(mu, plan),
    }
}

/// The formula summed over all set partitions; expected to vanish.
pub fn zero_identity_value(mu: &OrderProfile) -> Result<Rational, CountError> {
    Ok(zero_identity_terms(mu)?.into_iter().map(|(_, v)| v).sum())
}

/// Result of fitting `N` as a polynomial in `b_1..b_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub n: usize,
    pub b_range: u64,
    /// Total degree of the fit; `None` for the zero polynomial.
    pub total_degree: Option<usize>,
    /// Degree in each `b_i` separately.
    pub per_variable_degree: Vec<usize>,
    /// Whether the homogeneous component of degree `n - 2` is nonzero.
    pub top_component_nonzero: bool,
    pub coefficients: usize,
    /// Grid points not used by the fit, all reproduced exactly.
    pub held_out_checked: usize,
}

/// Fit `N(b)` for the structure `v` by a polynomial of total degree at most
/// `n - 2` and check it on the rest of the grid `[1, b_range]^n`.
///
/// The fit is in the basis `prod_i C(b_i - 1, alpha_i)`, whose coefficients
/// are the forward differences at `b = (1,..,1)`; it uses only the points
/// with `sum(b_i - 1) <= n - 2`. The zero order `a` is determined by `b`.
pub fn check_polynomial_degree(v: &VanishingStructure, b_range: u64) -> Result<DegreeReport, CountError> {
    let n = v.n();
    let d = n - 2;
    if v.is_identically_zero() {
        return Err(CountError::Precondition("structure must not be identically zero"));
    }
    if b_range < (d as u64) + 1 {
        return Err(CountError::Precondition("b_range must be at least n - 1"));
    }
    let plan = ClosedFormPlan::new(v);
    let side = b_range as usize;
    let grid_len = side.checked_pow(n as u32).ok_or(CountError::Precondition("grid too large"))?;

    let decode = |mut idx: usize| -> Vec<u64> {
        (0..n)
            .map(|_| {
                let x = idx % side;
                idx /= side;
                x as u64 + 1
            })
            .collect()
    };
    let values = (0..grid_len)
        .map(|idx| plan.count_poles(&decode(idx)))
        .collect::<Result<Vec<Integer>, _>>()?;

    let alphas = multi_indices(n, d);
    let encode = |x: &[usize]| x.iter().rev().fold(0usize, |acc, &xi| acc * side + xi);
    let coeffs: Vec<Integer> = alphas
        .iter()
        .map(|alpha| {
            // Forward difference: sum over beta <= alpha of (-1)^{|alpha-beta|} prod C(alpha_i, beta_i) N(1+beta).
            let mut acc = Integer::zero();
            for beta in sub_indices(alpha) {
                let weight: Integer = alpha
                    .iter()
                    .zip(&beta)
                    .map(|(&a, &b)| binomial(a as u64, b as u64))
                    .product();
                let term = weight * &values[encode(&beta)];
                if (alpha.iter().sum::<usize>() - beta.iter().sum::<usize>()) % 2 == 1 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc
        })
        .collect();

    let mut held_out = 0;
    for (idx, expected) in values.iter().enumerate() {
        let point = decode(idx);
        if point.iter().map(|&x| x as usize - 1).sum::<usize>() <= d {
            continue;
        }
        held_out += 1;
        let fitted: Integer = alphas
            .iter()
            .zip(&coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(alpha, c)| {
                c * alpha
                    .iter()
                    .zip(&point)
                    .map(|(&a, &x)| binomial(x - 1, a as u64))
                    .product::<Integer>()
            })
            .sum();
        if &fitted != expected {
            return Err(CountError::InterpolationMismatch { point, expected: expected.clone(), fitted });
        }
    }

    let nonzero: Vec<&Vec<usize>> = alphas.iter().zip(&coeffs).filter(|(_, c)| !c.is_zero()).map(|(a, _)| a).collect();
    Ok(DegreeReport {
        n,
        b_range,
        total_degree: nonzero.iter().map(|a| a.iter().sum()).max(),
        per_variable_degree: (0..n).map(|i| nonzero.iter().map(|a| a[i]).max().unwrap_or(0)).collect(),
        top_component_nonzero: nonzero.iter().any(|a| a.iter().sum::<usize>() == d),
        coefficients: alphas.len(),
        held_out_checked: held_out,
    })
}

fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::zero();
    }
    (0..k).fold(Integer::one(), |acc, j| acc * (n - j) / (j + 1))
}

/// All `alpha` in `N^n` with `|alpha| <= d`.
fn multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                let used: usize = prefix.iter().sum();
                (0..=d - used).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

fn sub_indices(alpha: &[usize]) -> Vec<Vec<usize>> {
    alpha.iter().fold(vec![vec![]], |acc, &a| {
        acc.into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..=a).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect()
    })
}

/// Whether the count drops strictly from `coarse` to the strictly finer `fine`.
pub fn check_monotonicity(
    mu: &OrderProfile,
    coarse: &VanishingStructure,
    fine: &VanishingStructure,
) -> Result<bool, CountError> {
    check_sizes(mu, coarse)?;
    check_sizes(mu, fine)?;
    if !coarse.is_refined_by(fine) || coarse == fine {
        return Err(CountError::Precondition("second structure must strictly refine the first"));
    }
    let plan = |v| ClosedFormPlan::new(v).count(mu);
    Ok(plan(coarse)? > plan(fine)?)
}
