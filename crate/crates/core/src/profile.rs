//! Pole-order profiles, residue tuples, and the vanishing structure a
//! residue tuple induces on the pole set.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{GaussianRational, Integer, Rational};
use crate::span::Span;
use crate::subset::{full_mask, size_then_lex, IndexSubset};

/// Largest pole count accepted at the API boundary.
pub const MAX_POLES: usize = 16;

/// Attempts made by [`VanishingStructure::realize`] before giving up.
pub const REALIZATION_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("need at least 2 poles, got {0}")]
    TooFewPoles(usize),
    #[error("at most {MAX_POLES} poles are supported, got {0}")]
    TooManyPoles(usize),
    #[error("pole order at index {0} must be positive")]
    NonPositivePole(usize),
    #[error("zero order {a} does not match pole orders: a - sum(b) must be -2, sum(b) = {pole_sum}")]
    DegreeMismatch { a: u64, pole_sum: u128 },
    #[error("residues must sum to zero, got {0}")]
    ResidueSumNonZero(Box<GaussianRational>),
    #[error("subset {subset} is not a nonempty proper subset of {{1..{n}}}")]
    InvalidSubset { subset: IndexSubset, n: usize },
    #[error("size mismatch: expected {expected} poles, got {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("no residue tuple realizing the structure found after {0} attempts")]
    RealizationExhausted(usize),
}

fn check_pole_count(n: usize) -> Result<(), ProfileError> {
    if n < 2 {
        Err(ProfileError::TooFewPoles(n))
    } else if n > MAX_POLES {
        Err(ProfileError::TooManyPoles(n))
    } else {
        Ok(())
    }
}

/// Zero order `a` and pole orders `b_1..b_n` with `a - sum(b) = -2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderProfile {
    a: u64,
    b: Vec<u64>,
}

impl OrderProfile {
    pub fn new(a: u64, b: Vec<u64>) -> Result<Self, ProfileError> {
        check_pole_count(b.len())?;
        if let Some(i) = b.iter().position(|&x| x == 0) {
            return Err(ProfileError::NonPositivePole(i + 1));
        }
        let pole_sum: u128 = b.iter().map(|&x| u128::from(x)).sum();
        if u128::from(a) + 2 != pole_sum {
            return Err(ProfileError::DegreeMismatch { a, pole_sum });
        }
        Ok(Self { a, b })
    }

    /// Infer `a = sum(b) - 2`.
    pub fn from_poles(b: Vec<u64>) -> Result<Self, ProfileError> {
        check_pole_count(b.len())?;
        if let Some(i) = b.iter().position(|&x| x == 0) {
            return Err(ProfileError::NonPositivePole(i + 1));
        }
        let pole_sum: u128 = b.iter().map(|&x| u128::from(x)).sum();
        let a = u64::try_from(pole_sum - 2).map_err(|_| ProfileError::DegreeMismatch {
            a: u64::MAX,
            pole_sum,
        })?;
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// `b_J`, the total pole order over `subset`.
    pub fn pole_sum(&self, subset: IndexSubset) -> u128 {
        subset.indices().map(|i| u128::from(self.b[i - 1])).sum()
    }

    /// Orders listed as `a, b_1, ..., b_n`.
    pub fn as_mu(&self) -> Vec<u64> {
        std::iter::once(self.a).chain(self.b.iter().copied()).collect()
    }
}

impl fmt::Display for OrderProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.a)?;
        for b in &self.b {
            write!(f, ",-{b}")?;
        }
        f.write_str(")")
    }
}

/// Residues `r_1..r_n` with `r_1 + ... + r_n = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueTuple(Vec<GaussianRational>);

impl ResidueTuple {
    pub fn new(residues: Vec<GaussianRational>) -> Result<Self, ProfileError> {
        check_pole_count(residues.len())?;
        let total: GaussianRational = residues.iter().sum();
        if !total.is_zero() {
            return Err(ProfileError::ResidueSumNonZero(Box::new(total)));
        }
        Ok(Self(residues))
    }

    pub fn from_integers(values: &[i64]) -> Result<Self, ProfileError> {
        Self::new(values.iter().map(|&v| GaussianRational::from_int(v)).collect())
    }

    pub fn values(&self) -> &[GaussianRational] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Masks (over all of `0..2^n`) whose residue sum vanishes.
    fn vanishing_table(&self) -> Vec<bool> {
        let n = self.n();
        let size = 1usize << n;
        let mut sums = vec![GaussianRational::zero(); size];
        let mut table = vec![true; size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = &sums[mask & (mask - 1)] + &self.0[low];
            table[mask] = sums[mask].is_zero();
        }
        table
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for ResidueTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_strings().join(","))
    }
}

/// The span-closed family of partial sum vanishings on `{1..n}`.
///
/// Two structures are equal iff they have the same `n` and closure; the
/// generator list is a deterministic function of the closure.
#[derive(Debug, Clone)]
pub struct VanishingStructure {
    n: usize,
    generators: Vec<IndexSubset>,
    closure: Vec<IndexSubset>,
    zero_sum: Vec<bool>,
    solutions: Vec<Vec<i128>>,
}

impl PartialEq for VanishingStructure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.closure == other.closure
    }
}

impl Eq for VanishingStructure {}

impl Hash for VanishingStructure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.closure.hash(state);
    }
}

impl VanishingStructure {
    /// Structure with no partial sum vanishings.
    pub fn trivial(n: usize) -> Result<Self, ProfileError> {
        Self::from_generators(n, &[])
    }

    /// Structure of the zero residue tuple: every subset vanishes.
    pub fn identically_zero(n: usize) -> Result<Self, ProfileError> {
        check_pole_count(n)?;
        let singles: Vec<IndexSubset> = (1..=n)
            .filter_map(|i| IndexSubset::from_indices([i]))
            .collect();
        Self::from_generators(n, &singles)
    }

    /// Span closure of `gens` together with the total sum.
    pub fn from_generators(n: usize, gens: &[IndexSubset]) -> Result<Self, ProfileError> {
        check_pole_count(n)?;
        if let Some(&bad) = gens.iter().find(|g| !g.is_proper(n)) {
            return Err(ProfileError::InvalidSubset { subset: bad, n });
        }
        Ok(Self::from_span(n, Span::new(n, gens.iter().map(|g| g.mask()))))
    }

    pub(crate) fn from_span(n: usize, span: Span) -> Self {
        let zero_sum = span.membership_table();
        let full = full_mask(n);
        let mut closure: Vec<IndexSubset> = (1..full)
            .step_by(2)
            .filter(|&m| zero_sum[m as usize])
            .map(IndexSubset::from_mask)
            .collect();
        closure.sort();
        let generators = greedy_generators(n, &closure);
        debug_assert_eq!(generators.len() + 1, span.dim());
        Self { n, generators, closure, zero_sum, solutions: span.complement().to_vec() }
    }

    /// The vanishing structure of a concrete residue tuple.
    pub fn from_residues(rho: &ResidueTuple) -> Self {
        let n = rho.n();
        let table = rho.vanishing_table();
        let closure: Vec<IndexSubset> = (1..full_mask(n))
            .step_by(2)
            .filter(|&m| table[m as usize])
            .map(IndexSubset::from_mask)
            .collect();
        let gens = greedy_generators(n, &closure);
        let built = Self::from_span(n, Span::new(n, gens.iter().map(|g| g.mask())));
        debug_assert_eq!(built.zero_sum, table);
        built
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Independent generators, chosen greedily by cardinality then lexicographically.
    pub fn generators(&self) -> &[IndexSubset] {
        &self.generators
    }

    /// Canonical representatives (containing index 1), sorted lexicographically.
    pub fn closure(&self) -> &[IndexSubset] {
        &self.closure
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.rank() + 1 == self.n
    }

    /// Whether the residues over `subset` sum to zero for every tuple with
    /// this structure. The full set always qualifies; the empty set does not.
    pub fn is_zero_sum(&self, subset: IndexSubset) -> bool {
        !subset.is_empty() && self.zero_sum[subset.mask() as usize]
    }

    /// Closure membership test, accepting either member of a complement pair.
    pub fn contains(&self, subset: IndexSubset) -> bool {
        subset.is_proper(self.n) && self.is_zero_sum(subset)
    }

    /// Integer basis of the residue tuples satisfying exactly these vanishings
    /// generically (the annihilator of the span).
    pub fn solution_basis(&self) -> &[Vec<i128>] {
        &self.solutions
    }

    /// `closure(self) ⊆ closure(other)`; false when the pole counts differ.
    pub fn is_refined_by(&self, other: &Self) -> bool {
        self.n == other.n && self.closure.iter().all(|j| other.is_zero_sum(*j))
    }

    /// Closure membership of a singleton `{i}` or its complement.
    pub fn forces_zero_residue(&self, idx: usize) -> bool {
        IndexSubset::from_indices([idx]).is_some_and(|s| self.contains(s))
    }

    /// Relabel poles: pole `i` of `self` becomes pole `perm[i-1]` (1-based values).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, ProfileError> {
        if perm.len() != self.n {
            return Err(ProfileError::SizeMismatch { expected: self.n, found: perm.len() });
        }
        let gens: Vec<IndexSubset> = self
            .generators
            .iter()
            .map(|g| {
                IndexSubset::from_indices(g.indices().map(|i| perm[i - 1]))
                    .ok_or(ProfileError::InvalidSubset { subset: *g, n: self.n })
            })
            .collect::<Result<_, _>>()?;
        Self::from_generators(self.n, &gens)
    }

    /// A rational residue tuple whose vanishing structure is exactly `self`.
    ///
    /// Integer combinations of the solution basis are drawn from a range
    /// that widens with each failed attempt. The identically-zero structure
    /// returns the zero tuple.
    pub fn realize(&self, seed: u64) -> Result<ResidueTuple, ProfileError> {
        if self.solutions.is_empty() {
            return ResidueTuple::from_integers(&vec![0; self.n]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for attempt in 0..REALIZATION_ATTEMPTS {
            let bound = 3i128 << (attempt / 4).min(40);
            let mut values = vec![0i128; self.n];
            for w in &self.solutions {
                let c = rng.gen_range(-bound..=bound);
                for (v, x) in values.iter_mut().zip(w) {
                    *v += c * x;
                }
            }
            if realizes(&values, &self.zero_sum) {
                let residues = values
                    .iter()
                    .map(|&v| GaussianRational::real(Rational::from_integer(Integer::from(v))))
                    .collect();
                return ResidueTuple::new(residues);
            }
        }
        Err(ProfileError::RealizationExhausted(REALIZATION_ATTEMPTS))
    }
}

/// Every span-closed structure on `n` poles, ordered by rank and then closure.
pub fn all_structures(n: usize) -> Result<Vec<VanishingStructure>, ProfileError> {
    let start = VanishingStructure::trivial(n)?;
    let candidates: Vec<IndexSubset> = (1..full_mask(n)).step_by(2).map(IndexSubset::from_mask).collect();
    let mut seen: HashSet<Vec<IndexSubset>> = HashSet::from([start.closure.clone()]);
    let mut out = vec![start.clone()];
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in &frontier {
            for &j in &candidates {
                if v.is_zero_sum(j) {
                    continue;
                }
                let mut gens = v.generators.clone();
                gens.push(j);
                let w = VanishingStructure::from_generators(n, &gens)?;
                if seen.insert(w.closure.clone()) {
                    next.push(w);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort_by(|x, y| x.rank().cmp(&y.rank()).then_with(|| x.closure.cmp(&y.closure)));
    Ok(out)
}

fn realizes(values: &[i128], zero_sum: &[bool]) -> bool {
    let mut sums = vec![0i128; zero_sum.len()];
    (1..zero_sum.len()).all(|mask| {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + values[low];
        (sums[mask] == 0) == zero_sum[mask]
    })
}

/// Greedy independent subset of `closure` modulo the total sum, in
/// (cardinality, lexicographic) order.
fn greedy_generators(n: usize, closure: &[IndexSubset]) -> Vec<IndexSubset> {
    let mut ordered = closure.to_vec();
    ordered.sort_by(size_then_lex);
    let mut chosen: Vec<IndexSubset> = Vec::new();
    let mut span = Span::new(n, []);
    for j in ordered {
        if chosen.len() + 1 == n {
            break;
        }
        if !span.contains(j.mask()) {
            chosen.push(j);
            span = Span::new(n, chosen.iter().map(|g| g.mask()));
        }
    }
    chosen
}

impl fmt::Display for VanishingStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, j) in self.closure.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "] rank {}", self.rank())
    }
}
