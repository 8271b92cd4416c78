//! Exhaustive and sampled sweeps checking the counting identities.
//!
//! Every suite walks a grid of pole orders, compares two independent ways of
//! obtaining a count, and reports how many checks ran and the first failure.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{ExactError, Integer};
use crate::counting::{check_polynomial_degree, count_one_vanishing, ClosedFormPlan, CountError};
use crate::counting::{count_general, count_two_nonzero, two_nonzero_structure};
use crate::levelgraph::{PlanCache, RecursionConfig, RecursionPlan};
use crate::oracle::{oracle_count, oracle_count_zero_residues};
use crate::profile::{all_structures, OrderProfile, VanishingStructure};
use crate::subset::IndexSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    SpecialCases,
    Recursion,
    Oracle,
    Monotonic,
    Degree,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Identities,
        Suite::SpecialCases,
        Suite::Recursion,
        Suite::Oracle,
        Suite::Monotonic,
        Suite::Degree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::SpecialCases => "special-cases",
            Suite::Recursion => "recursion",
            Suite::Oracle => "oracle",
            Suite::Monotonic => "monotonic",
            Suite::Degree => "degree",
        }
    }

    /// Bounds used when none are given.
    pub fn default_bounds(self) -> Bounds {
        let (n_max, b_max) = match self {
            Suite::Identities => (6, 4),
            Suite::SpecialCases => (6, 4),
            Suite::Recursion => (5, 3),
            Suite::Oracle => (3, 0),
            Suite::Monotonic => (5, 4),
            Suite::Degree => (4, 4),
        };
        Bounds { n_max, b_max, sum_b_max: 9, seeds: 10, seed: 0 }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Sweep bounds. Not every suite reads every field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Largest pole count.
    pub n_max: usize,
    /// Largest pole order in a grid.
    pub b_max: u64,
    /// Largest `sum(b)` for the three-pole oracle sweep.
    pub sum_b_max: u64,
    /// Random samples per case.
    pub seeds: u64,
    /// Base seed for sampling.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub bounds: Bounds,
    pub checked: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: Suite, bounds: Bounds) -> Self {
        Self { suite, bounds, checked: 0, failed: 0, first_failure: None, notes: vec![] }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    fn fail(&mut self, message: String) {
        self.check(false, || message);
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {} checks, {} failed", self.suite, self.checked, self.failed)?;
        if let Some(first) = &self.first_failure {
            write!(f, "; first failure: {first}")?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, bounds: Bounds) -> SuiteReport {
    let mut report = SuiteReport::new(suite, bounds);
    match suite {
        Suite::Identities => {
            zero_identity(&mut report, bounds.n_max, bounds.b_max);
            two_nonzero_law(&mut report, bounds.n_max, bounds.b_max);
        }
        Suite::SpecialCases => {
            general_law(&mut report, bounds.n_max, bounds.b_max);
            one_vanishing_law(&mut report, bounds.n_max, bounds.b_max);
        }
        Suite::Recursion => {
            recursion_equivalence(&mut report, bounds.n_max, bounds.b_max);
            generator_order(&mut report, bounds.n_max, bounds.b_max, 3);
        }
        Suite::Oracle => oracle_equivalence(&mut report, bounds.sum_b_max, bounds.seeds, bounds.seed),
        Suite::Monotonic => monotonicity(&mut report, bounds.n_max, bounds.b_max, bounds.seeds, bounds.seed),
        Suite::Degree => degree_fit(&mut report, bounds.n_max, bounds.b_max),
    }
    report
}

/// Every `b` in `[1, max]^n`, in lexicographic order.
pub fn for_each_b(n: usize, max: u64, mut visit: impl FnMut(&[u64])) {
    if max == 0 {
        return;
    }
    let mut b = vec![1u64; n];
    loop {
        visit(&b);
        let Some(i) = b.iter().rposition(|&x| x < max) else {
            return;
        };
        b[i] += 1;
        b[i + 1..].iter_mut().for_each(|x| *x = 1);
    }
}

fn profile(b: &[u64]) -> OrderProfile {
    OrderProfile::from_poles(b.to_vec()).expect("grid profiles are valid")
}

/// Exact signed value of a plan, without the nonnegativity check.
fn raw_total(plan: &ClosedFormPlan, b: &[u64]) -> Result<Integer, ExactError> {
    let small: Vec<i128> = b.iter().map(|&x| i128::from(x)).collect();
    match plan.total::<i128>(&small) {
        Ok(v) => Ok(Integer::from(v)),
        Err(ExactError::Overflow) => plan.total::<Integer>(&small),
        Err(e) => Err(e),
    }
}

fn show<T: fmt::Display, E: fmt::Display>(r: &Result<T, E>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// The formula summed over every set partition vanishes.
pub fn zero_identity(report: &mut SuiteReport, n_max: usize, b_max: u64) {
    for n in 2..=n_max {
        let plan = ClosedFormPlan::new(&VanishingStructure::identically_zero(n).expect("n >= 2"));
        for_each_b(n, b_max, |b| {
            let value = raw_total(&plan, b);
            report.check(matches!(&value, Ok(v) if v == &Integer::from(0)), || {
                format!("zero identity at b = {b:?}: {}", show(&value))
            });
        });
    }
}

/// All residues zero but a `±r` pair: `(n-2)! prod_{k != i,j} (b_k - 1)`.
pub fn two_nonzero_law(report: &mut SuiteReport, n_max: usize, b_max: u64) {
    for n in 2..=n_max {
        for i in 1..=n {
            for j in i + 1..=n {
                let plan = ClosedFormPlan::new(&two_nonzero_structure(n, i, j).expect("valid pair"));
                for_each_b(n, b_max, |b| {
                    let got = plan.count_poles(b);
                    let want = count_two_nonzero(&profile(b), i, j);
                    report.check(got == want, || {
                        format!("two nonzero ({i},{j}) at b = {b:?}: {} vs {}", show(&got), show(&want))
                    });
                });
            }
        }
    }
}

/// No vanishing: `f(a, n)`.
pub fn general_law(report: &mut SuiteReport, n_max: usize, b_max: u64) {
    for n in 2..=n_max {
        let plan = ClosedFormPlan::new(&VanishingStructure::trivial(n).expect("n >= 2"));
        for_each_b(n, b_max, |b| {
            let got = plan.count_poles(b);
            let want = count_general(&profile(b));
            report.check(got.as_ref() == Ok(&want), || {
                format!("general residues at b = {b:?}: {} vs {want}", show(&got))
            });
        });
    }
}

/// One vanishing `I`: `f(a, n) - f(b_I - 1, |I| + 1) f(a - b_I + 1, n - |I| + 1)`.
pub fn one_vanishing_law(report: &mut SuiteReport, n_max: usize, b_max: u64) {
    for n in 2..=n_max {
        let full = IndexSubset::full(n);
        for mask in 1..full.mask() {
            let subset = IndexSubset::from_mask(mask);
            if subset.canonical(n) != subset {
                continue;
            }
            let v = VanishingStructure::from_generators(n, &[subset]).expect("proper subset");
            let plan = ClosedFormPlan::new(&v);
            for_each_b(n, b_max, |b| {
                let got = plan.count_poles(b);
                let want = count_one_vanishing(&profile(b), subset);
                report.check(got == want, || {
                    format!("one vanishing {subset} at b = {b:?}: {} vs {}", show(&got), show(&want))
                });
            });
        }
    }
}

/// The recursion in canonical generator order against the closed form, on
/// every structure.
pub fn recursion_equivalence(report: &mut SuiteReport, n_max: usize, b_max: u64) {
    let mut cache = PlanCache::new(RecursionConfig::default());
    for n in 2..=n_max {
        for v in all_structures(n).expect("n >= 2") {
            let closed = cache.closed_form(&v);
            let rec = match cache.recursion(&v) {
                Ok(p) => p,
                Err(e) => {
                    report.fail(format!("recursion plan for {v}: {e}"));
                    continue;
                }
            };
            for_each_b(n, b_max, |b| {
                let want = closed.count_poles(b);
                let got = rec.count_poles(b);
                report.check(matches!((&got, &want), (Ok(x), Ok(y)) if x == y), || {
                    format!("recursion for {v} at b = {b:?}: {} vs closed form {}", show(&got), show(&want))
                });
            });
        }
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// The recursion along every ordering of the generators, for structures
/// with at most `k_max` generators.
pub fn generator_order(report: &mut SuiteReport, n_max: usize, b_max: u64, k_max: usize) {
    let mut cache = PlanCache::new(RecursionConfig::default());
    let mut orderings = 0u64;
    for n in 2..=n_max {
        for v in all_structures(n).expect("n >= 2") {
            let gens = v.generators();
            if gens.len() < 2 || gens.len() > k_max {
                continue;
            }
            let closed = cache.closed_form(&v);
            for p in permutations(gens.len()) {
                if p.iter().enumerate().all(|(i, &x)| i == x) {
                    continue;
                }
                orderings += 1;
                let seq: Vec<IndexSubset> = p.iter().map(|&i| gens[i]).collect();
                let plan = match RecursionPlan::build(n, &seq, &mut cache) {
                    Ok(plan) => plan,
                    Err(e) => {
                        report.fail(format!("recursion plan for order {seq:?}: {e}"));
                        continue;
                    }
                };
                for_each_b(n, b_max, |b| {
                    let want = closed.count_poles(b);
                    let got = plan.count_poles(b);
                    report.check(matches!((&got, &want), (Ok(x), Ok(y)) if x == y), || {
                        let order: Vec<String> = seq.iter().map(|g| g.to_string()).collect();
                        format!(
                            "generator order [{}] at b = {b:?}: {} vs closed form {}",
                            order.join(" "),
                            show(&got),
                            show(&want)
                        )
                    });
                });
            }
        }
    }
    report.notes.push(format!("{orderings} non-canonical generator orderings"));
}

/// Elimination against the closed form on three poles: `seeds` generic
/// tuples and each single-pole vanishing per profile, and the zero tuple.
pub fn oracle_equivalence(report: &mut SuiteReport, sum_b_max: u64, seeds: u64, seed: u64) {
    let trivial = VanishingStructure::trivial(3).expect("n = 3");
    let singles: Vec<VanishingStructure> = (1..=3)
        .map(|i| VanishingStructure::from_generators(3, &[IndexSubset::from_indices([i]).expect("index")]))
        .collect::<Result<_, _>>()
        .expect("single poles are proper subsets");
    let mut anomalies = 0u64;
    for_each_b(3, sum_b_max.saturating_sub(2), |b| {
        if b.iter().sum::<u64>() > sum_b_max {
            return;
        }
        let mu = profile(b);
        let mut cases = Vec::new();
        for k in 0..seeds {
            cases.push((trivial.clone(), seed.wrapping_add(k)));
        }
        for v in &singles {
            cases.push((v.clone(), seed));
        }
        for (v, s) in cases {
            let rho = match v.realize(s) {
                Ok(r) => r,
                Err(e) => {
                    report.fail(format!("realizing {v}: {e}"));
                    continue;
                }
            };
            let closed = ClosedFormPlan::new(&VanishingStructure::from_residues(&rho)).count(&mu);
            match oracle_count(&mu, &rho) {
                Ok(c) => {
                    if !c.squarefree {
                        anomalies += 1;
                    }
                    report.check(c.squarefree && closed.as_ref() == Ok(&c.count), || {
                        format!(
                            "oracle at b = {b:?}, rho = ({rho}): {} (squarefree: {}) vs closed form {}",
                            c.count,
                            c.squarefree,
                            show(&closed)
                        )
                    });
                }
                Err(e) => report.fail(format!("oracle at b = {b:?}, rho = ({rho}): {e}")),
            }
        }
        let zero = oracle_count_zero_residues(&mu);
        report.check(matches!(&zero, Ok(c) if c.count == Integer::from(0)), || {
            format!("zero residues at b = {b:?}: {}", show(&zero.map(|c| c.count)))
        });
    });
    report.notes.push(format!("{anomalies} non-squarefree eliminants"));
}

fn admissible(b: &[u64], v: &VanishingStructure) -> bool {
    (1..=b.len()).all(|i| b[i - 1] != 1 || !v.forces_zero_residue(i))
}

/// Strict decrease under every one-generator refinement, and positivity away
/// from the identically-zero structure, on `seeds` sampled `b` per structure.
/// Samples where the coarser structure forces a zero residue at a simple
/// pole are skipped.
pub fn monotonicity(report: &mut SuiteReport, n_max: usize, b_max: u64, seeds: u64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut skipped = 0u64;
    for n in 2..=n_max {
        let structures = all_structures(n).expect("n >= 2");
        let index: HashMap<&VanishingStructure, usize> =
            structures.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let plans: Vec<ClosedFormPlan> = structures.iter().map(ClosedFormPlan::new).collect();
        let candidates: Vec<IndexSubset> = (1..IndexSubset::full(n).mask())
            .step_by(2)
            .map(IndexSubset::from_mask)
            .collect();
        for (vi, v) in structures.iter().enumerate() {
            let samples: Vec<Vec<u64>> =
                (0..seeds).map(|_| (0..n).map(|_| rng.gen_range(1..=b_max)).collect()).collect();
            for b in &samples {
                // N = 0 exactly for the identically-zero structure, on admissible inputs
                let count = plans[vi].count_poles(b);
                if v.is_identically_zero() {
                    report.check(count.as_ref().is_ok_and(|c| *c == Integer::from(0)), || {
                        format!("identically zero at b = {b:?}: {}", show(&count))
                    });
                } else if admissible(b, v) {
                    report.check(count.as_ref().is_ok_and(|c| *c > Integer::from(0)), || {
                        format!("{v} at b = {b:?} should be positive: {}", show(&count))
                    });
                } else {
                    skipped += 1;
                }
            }
            for &j in &candidates {
                if v.is_zero_sum(j) {
                    continue;
                }
                let mut gens = v.generators().to_vec();
                gens.push(j);
                let w = VanishingStructure::from_generators(n, &gens).expect("independent generator");
                let wi = index[&w];
                for b in &samples {
                    if !admissible(b, v) {
                        skipped += 1;
                        continue;
                    }
                    let coarse = plans[vi].count_poles(b);
                    let fine = plans[wi].count_poles(b);
                    report.check(matches!((&coarse, &fine), (Ok(x), Ok(y)) if x > y), || {
                        format!("{v} -> {w} at b = {b:?}: {} then {}", show(&coarse), show(&fine))
                    });
                }
            }
        }
    }
    report.notes.push(format!("{skipped} inadmissible samples skipped"));
}

/// Polynomial fit of total degree at most `n - 2` in `b`, checked on the
/// held-out grid points.
pub fn degree_fit(report: &mut SuiteReport, n_max: usize, b_max: u64) {
    let mut exact_degree = 0u64;
    for n in 2..=n_max {
        let b_range = b_max.max(n as u64 - 1);
        for v in all_structures(n).expect("n >= 2") {
            if v.is_identically_zero() {
                continue;
            }
            match check_polynomial_degree(&v, b_range) {
                Ok(d) => {
                    if d.total_degree == Some(n - 2) {
                        exact_degree += 1;
                    }
                    report.check(d.total_degree.is_some_and(|t| t <= n - 2), || {
                        format!("degree fit for {v}: total degree {:?}", d.total_degree)
                    });
                }
                Err(CountError::InterpolationMismatch { point, expected, fitted }) => report.fail(format!(
                    "degree fit for {v} misses b = {point:?}: {expected} vs fitted {fitted}"
                )),
                Err(e) => report.fail(format!("degree fit for {v}: {e}")),
            }
        }
    }
    report.notes.push(format!("{exact_degree} fits of total degree exactly n - 2"));
}
