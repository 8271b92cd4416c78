//! Direct counts for at most three poles by exact elimination, and the
//! bridge from fixed-point multipliers of polynomials to residues.
//!
//! With the zero at infinity and the poles at `0`, `1` and `p`, a
//! differential of the profile is `c dz / (z^b1 (z-1)^b2 (z-p)^b3)`. Its
//! residues are rational functions of `p`, and the differentials with
//! residues `rho` correspond to the roots `p` (other than `0` and `1`) at
//! which the residue vector is proportional to `rho`.

mod poly;

pub use poly::{Poly, RatFunc};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{GaussianRational, Integer, Rational};
use crate::counting::{count_closed_form, CountError};
use crate::profile::{OrderProfile, ProfileError, ResidueTuple, VanishingStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("elimination handles 2 or 3 poles, got {0}")]
    UnsupportedPoleCount(usize),
    #[error("the residue tuple is identically zero")]
    DegenerateInput,
    #[error("the residue equations vanish identically in p")]
    InfiniteSolutions,
    #[error("multiplier {index} equals 1 (parabolic fixed point)")]
    ParabolicMultiplier { index: usize },
    #[error("residues 1/(1 - lambda) sum to {sum}, not 0")]
    IndexConstraintViolated { sum: Box<GaussianRational> },
}

/// Residues at `0`, `1` and `p` as functions of `p`, for a three-pole profile.
pub fn residue_functions(mu: &OrderProfile) -> Result<[RatFunc; 3], OracleError> {
    let b = mu.b();
    if b.len() != 3 {
        return Err(OracleError::UnsupportedPoleCount(b.len()));
    }
    let p = Poly::x();
    let one = Poly::one();
    let minus_one = -&one;
    Ok([
        // at 0: the other poles sit at 1 and p
        residue_at(b[0], &[(b[1], minus_one), (b[2], -&p)]),
        // at 1
        residue_at(b[1], &[(b[0], one.clone()), (b[2], &one - &p)]),
        // at p
        residue_at(b[2], &[(b[0], p.clone()), (b[1], &p - &one)]),
    ])
}

/// Residue at a pole `P` of order `order` of `dz / prod (z - c)^b` over the
/// other poles, each given as `(b, P - c)`.
///
/// Around `P`, `(z - c)^-b = d^-b sum_k C(b+k-1, k) (-w/d)^k` with `w = z - P`
/// and `d = P - c`, and the residue is the coefficient of `w^(order-1)` in
/// the product of these series. All terms are put over the common
/// denominator `prod d^(b + order - 1)`.
fn residue_at(order: u64, others: &[(u64, Poly)]) -> RatFunc {
    let want = order as usize - 1;
    // per pole, entry k is the w^k coefficient times d^(b + want)
    let series: Vec<Vec<Poly>> = others
        .iter()
        .map(|(b, d)| {
            (0..=want)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    let c = binomial(*b as usize + k - 1, k) * sign;
                    d.pow((want - k) as u32)
                        .scale(&GaussianRational::real(Rational::from_integer(c)))
                })
                .collect()
        })
        .collect();
    let mut acc = vec![Poly::one()];
    for s in &series {
        let mut next = vec![Poly::zero(); want + 1];
        for (i, x) in acc.iter().enumerate() {
            for (j, y) in s.iter().enumerate().take(want + 1 - i) {
                next[i + j] = &next[i + j] + &(x * y);
            }
        }
        acc = next;
    }
    let den = others
        .iter()
        .fold(Poly::one(), |acc, (b, d)| &acc * &d.pow(*b as u32 + want as u32));
    RatFunc::new(acc.swap_remove(want), den).expect("distinct poles give a nonzero denominator")
}

fn binomial(n: usize, k: usize) -> Integer {
    (0..k).fold(Integer::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Outcome of an elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCount {
    /// Number of distinct admissible roots `p`.
    pub count: Integer,
    /// The common factor of the residue equations with the roots `0` and `1` removed.
    pub eliminant: Poly,
    /// `false` flags a repeated root, which would mean a non-reduced fiber.
    pub squarefree: bool,
}

impl OracleCount {
    fn from_common_factor(g: Poly) -> Result<Self, OracleError> {
        if g.is_zero() {
            return Err(OracleError::InfiniteSolutions);
        }
        let (g, _) = g.strip_root(&GaussianRational::zero());
        let (g, _) = g.strip_root(&GaussianRational::one());
        let squarefree = g.is_squarefree();
        let count = Integer::from(g.squarefree_part().degree().unwrap_or(0));
        Ok(Self { count, eliminant: g.monic(), squarefree })
    }
}

/// The number of differentials of profile `mu` with residues `rho`, found by
/// eliminating the pole position. `n = 2` always has exactly one.
pub fn oracle_count(mu: &OrderProfile, rho: &ResidueTuple) -> Result<OracleCount, OracleError> {
    let n = mu.n();
    if rho.n() != n {
        return Err(ProfileError::SizeMismatch { expected: n, found: rho.n() }.into());
    }
    if rho.is_zero() {
        return Err(OracleError::DegenerateInput);
    }
    match n {
        2 => Ok(OracleCount { count: Integer::one(), eliminant: Poly::one(), squarefree: true }),
        3 => {
            let res = residue_functions(mu)?;
            let r = rho.values();
            let anchor = r.iter().position(|x| !x.is_zero()).expect("rho is nonzero");
            let mut g = Poly::zero();
            for j in (0..3).filter(|&j| j != anchor) {
                let e = &res[anchor].scale(&r[j]) - &res[j].scale(&r[anchor]);
                g = g.gcd(e.num());
            }
            OracleCount::from_common_factor(g)
        }
        _ => Err(OracleError::UnsupportedPoleCount(n)),
    }
}

/// The number of differentials of profile `mu` whose residues all vanish:
/// the common roots of the three residue functions.
pub fn oracle_count_zero_residues(mu: &OrderProfile) -> Result<OracleCount, OracleError> {
    match mu.n() {
        2 => {
            // dz / (z^b1 (z-1)^b2) has a fixed nonzero residue at 0
            let b = mu.b();
            let r = residue_at(b[0], &[(b[1], -&Poly::one())]);
            let count = if r.is_zero() { Integer::one() } else { Integer::zero() };
            Ok(OracleCount { count, eliminant: Poly::one(), squarefree: true })
        }
        3 => {
            let res = residue_functions(mu)?;
            let g = res.iter().fold(Poly::zero(), |g, r| g.gcd(r.num()));
            OracleCount::from_common_factor(g)
        }
        n => Err(OracleError::UnsupportedPoleCount(n)),
    }
}

/// `r_i = 1 / (1 - lambda_i)` for the simple fixed points of a polynomial,
/// checking that these sum to zero.
pub fn multipliers_to_residues(lambdas: &[GaussianRational]) -> Result<ResidueTuple, OracleError> {
    let one = GaussianRational::one();
    let residues = lambdas
        .iter()
        .enumerate()
        .map(|(i, l)| (&one - l).inv().map_err(|_| OracleError::ParabolicMultiplier { index: i + 1 }))
        .collect::<Result<Vec<_>, _>>()?;
    let sum: GaussianRational = residues.iter().sum();
    if !sum.is_zero() {
        return Err(OracleError::IndexConstraintViolated { sum: Box::new(sum) });
    }
    Ok(ResidueTuple::new(residues)?)
}

/// The profile of `dz / (z - g(z))` for a polynomial `g` of degree `n - 1`
/// with `n` simple fixed points: `n` simple poles and a zero of order `n - 2`.
pub fn multiplier_profile(n: usize) -> Result<OrderProfile, OracleError> {
    Ok(OrderProfile::from_poles(vec![1; n])?)
}

/// The number of polynomials (up to affine conjugacy) with the given
/// fixed-point multipliers.
pub fn count_polynomials_with_multipliers(lambdas: &[GaussianRational]) -> Result<Integer, OracleError> {
    let rho = multipliers_to_residues(lambdas)?;
    let mu = multiplier_profile(rho.n())?;
    Ok(count_closed_form(&mu, &VanishingStructure::from_residues(&rho))?.total)
}
