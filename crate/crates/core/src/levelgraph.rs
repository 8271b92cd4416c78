//! The count recomputed by the boundary recursion over two-level graphs.
//!
//! Adding the generators `I_1..I_k` of a structure one at a time, each step
//! subtracts the contributions of the two-level graphs whose top blocks
//! generate the new vanishing:
//!
//! `N(V_k) = N(V_{k-1}) - sum_G t_G N_0 prod_i N_i`.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{falling_exact, Exact, ExactError, Integer, Rational};
use crate::counting::{ClosedFormPlan, CountError};
use crate::partitions::set_partitions;
use crate::profile::{OrderProfile, ProfileError, VanishingStructure};
use crate::span::{integer_rank, Span};
use crate::subset::{bits, full_mask, IndexSubset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelGraphError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("generator {0} is already generated by the previous ones")]
    DependentGenerator(IndexSubset),
    #[error("invalid two-level graph: {0}")]
    InvalidGraph(&'static str),
    #[error("internal error: boundary term {0} is not an integer")]
    NonIntegralResult(Rational),
}

/// Which vanishings a top component inherits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopStructureRule {
    /// Subsets of the block in the span of the previous generators and all
    /// block indicators.
    #[default]
    FullSpan,
    /// Subsets of the block in the span of the previous generators only.
    PreviousOnly,
}

/// How the bottom and top factors of a boundary term are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubCountMode {
    #[default]
    ClosedForm,
    /// Use the recursion itself for every factor.
    Recursive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RecursionConfig {
    pub top_rule: TopStructureRule,
    pub sub_counts: SubCountMode,
}

/// Top blocks `X_1..X_m` (`m >= 2`) covering all poles, joined to a bottom
/// component that carries the zero. Blocks are ordered by smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoLevelGraph {
    blocks: Vec<IndexSubset>,
}

impl TwoLevelGraph {
    pub fn new(n: usize, mut blocks: Vec<IndexSubset>) -> Result<Self, LevelGraphError> {
        if blocks.len() < 2 {
            return Err(LevelGraphError::InvalidGraph("need at least two top blocks"));
        }
        let mut seen = 0u64;
        for b in &blocks {
            if b.is_empty() || b.mask() & seen != 0 {
                return Err(LevelGraphError::InvalidGraph("blocks must be nonempty and disjoint"));
            }
            seen |= b.mask();
        }
        if seen != full_mask(n) {
            return Err(LevelGraphError::InvalidGraph("blocks must cover every pole"));
        }
        blocks.sort_by_key(|b| b.first());
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[IndexSubset] {
        &self.blocks
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// `b_{X_i}` for each block.
    pub fn block_orders(&self, mu: &OrderProfile) -> Vec<u128> {
        self.blocks.iter().map(|&x| mu.pole_sum(x)).collect()
    }
}

impl fmt::Display for TwoLevelGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// `t_G = prod_i (b_{X_i} - 1)`.
pub fn twist(mu: &OrderProfile, graph: &TwoLevelGraph) -> Integer {
    graph
        .block_orders(mu)
        .into_iter()
        .map(|b| Integer::from(b) - 1)
        .product()
}

/// Graphs whose block indicators, with the previous vanishings, generate `new`.
pub fn boundary_graphs(
    prev: &VanishingStructure,
    new: IndexSubset,
) -> Result<Vec<TwoLevelGraph>, LevelGraphError> {
    let n = prev.n();
    if !new.is_proper(n) {
        return Err(ProfileError::InvalidSubset { subset: new, n }.into());
    }
    if prev.is_zero_sum(new) {
        return Err(LevelGraphError::DependentGenerator(new));
    }
    let gens: Vec<u64> = prev.generators().iter().map(|g| g.mask()).collect();
    Ok(set_partitions(n, 2)
        .into_iter()
        .filter(|blocks| {
            Span::new(n, gens.iter().copied().chain(blocks.iter().map(|b| b.mask()))).contains(new.mask())
        })
        .map(|blocks| TwoLevelGraph { blocks })
        .collect())
}

/// Vanishing structures induced on the components of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedStructures {
    /// One per block, in local labels; `None` for a single-pole block.
    pub tops: Vec<Option<VanishingStructure>>,
    /// On the `m` nodes of the bottom component.
    pub bottom: VanishingStructure,
    /// Dimension of the space of node residues allowed by the previous
    /// vanishings. Only a single line, a zero-dimensional bottom, contributes.
    pub node_residue_rank: usize,
    /// The node residues up to scale, when `node_residue_rank` is one.
    pub bottom_residues: Option<Vec<i128>>,
}

/// Structures on the tops and the bottom of `graph` under the vanishings `prev`.
///
/// The previous vanishings constrain the node residues of the bottom through
/// every linear relation among block sums they imply, not only through
/// subsets of nodes. The node residues are the block sums of the residue
/// tuples allowed by `prev`; when these span a line the bottom is
/// zero-dimensional and its structure is read off that line. Otherwise the
/// bottom is the structure of subsets `T` whose union of blocks lies in `prev`.
pub fn induced_structures(
    graph: &TwoLevelGraph,
    prev: &VanishingStructure,
    rule: TopStructureRule,
) -> Result<InducedStructures, LevelGraphError> {
    let n = prev.n();
    let in_top_span: Box<dyn Fn(u64) -> bool> = match rule {
        TopStructureRule::FullSpan => {
            let span = Span::new(
                n,
                prev.generators()
                    .iter()
                    .chain(graph.blocks.iter())
                    .map(|g| g.mask()),
            );
            let table = span.membership_table();
            Box::new(move |mask| table[mask as usize])
        }
        TopStructureRule::PreviousOnly => Box::new(|mask| prev.is_zero_sum(IndexSubset::from_mask(mask))),
    };

    let mut tops = Vec::with_capacity(graph.m());
    for block in &graph.blocks {
        let size = block.len();
        if size == 1 {
            tops.push(None);
            continue;
        }
        let positions: Vec<usize> = bits(block.mask()).collect();
        let local: Vec<IndexSubset> = (1..full_mask(size))
            .filter(|&j| in_top_span(deposit(j, &positions)))
            .map(IndexSubset::from_mask)
            .collect();
        tops.push(Some(VanishingStructure::from_generators(size, &local)?));
    }

    let m = graph.m();
    let node_sums: Vec<Vec<i128>> = prev
        .solution_basis()
        .iter()
        .map(|w| graph.blocks.iter().map(|x| bits(x.mask()).map(|i| w[i]).sum()).collect())
        .filter(|v: &Vec<i128>| v.iter().any(|&x| x != 0))
        .collect();
    let rank = integer_rank(m, node_sums.clone());
    let (bottom, bottom_residues) = if rank == 1 {
        let rho = node_sums[0].clone();
        let gens: Vec<IndexSubset> = (1..full_mask(m))
            .filter(|&t| bits(t).map(|i| rho[i]).sum::<i128>() == 0)
            .map(IndexSubset::from_mask)
            .collect();
        (VanishingStructure::from_generators(m, &gens)?, Some(rho))
    } else {
        let node_masks: Vec<u64> = graph.blocks.iter().map(|b| b.mask()).collect();
        let gens: Vec<IndexSubset> = (1..full_mask(m))
            .filter(|&t| prev.is_zero_sum(IndexSubset::from_mask(deposit_blocks(t, &node_masks))))
            .map(IndexSubset::from_mask)
            .collect();
        (VanishingStructure::from_generators(m, &gens)?, None)
    };
    Ok(InducedStructures { tops, bottom, node_residue_rank: rank, bottom_residues })
}

/// Map a local mask over `positions` to a global mask.
fn deposit(local: u64, positions: &[usize]) -> u64 {
    bits(local).fold(0, |acc, i| acc | 1 << positions[i])
}

/// Union of the blocks selected by `nodes`.
fn deposit_blocks(nodes: u64, blocks: &[u64]) -> u64 {
    bits(nodes).fold(0, |acc, i| acc | blocks[i])
}

#[derive(Debug, Clone)]
enum SubPlan {
    Closed(Rc<ClosedFormPlan>),
    Recursive(Rc<RecursionPlan>),
}

impl SubPlan {
    fn eval<T: Exact>(&self, b: &[i128]) -> Result<T, ExactError> {
        match self {
            Self::Closed(p) => p.total(b),
            Self::Recursive(p) => p.eval(b),
        }
    }
}

#[derive(Debug, Clone)]
struct GraphTerm {
    graph: TwoLevelGraph,
    bottom: SubPlan,
    bottom_structure: VanishingStructure,
    tops: Vec<Option<(SubPlan, VanishingStructure)>>,
}

#[derive(Debug, Clone)]
struct Level {
    generator: IndexSubset,
    terms: Vec<GraphTerm>,
    /// Graphs in `G_k` dropped, with their node residue rank.
    skipped: Vec<(TwoLevelGraph, usize)>,
}

/// The b-independent data of the recursion for one generator sequence.
#[derive(Debug, Clone)]
pub struct RecursionPlan {
    n: usize,
    identically_zero: bool,
    levels: Vec<Level>,
}

/// Shares compiled sub-plans between structures, keyed by closure.
#[derive(Debug, Default)]
pub struct PlanCache {
    config: RecursionConfig,
    closed: HashMap<VanishingStructure, Rc<ClosedFormPlan>>,
    recursive: HashMap<VanishingStructure, Rc<RecursionPlan>>,
}

impl PlanCache {
    pub fn new(config: RecursionConfig) -> Self {
        Self { config, ..Self::default() }
    }

    pub fn config(&self) -> RecursionConfig {
        self.config
    }

    pub fn closed_form(&mut self, v: &VanishingStructure) -> Rc<ClosedFormPlan> {
        self.closed
            .entry(v.clone())
            .or_insert_with(|| Rc::new(ClosedFormPlan::new(v)))
            .clone()
    }

    /// The recursion plan for `v` in its canonical generator order.
    pub fn recursion(&mut self, v: &VanishingStructure) -> Result<Rc<RecursionPlan>, LevelGraphError> {
        if let Some(p) = self.recursive.get(v) {
            return Ok(p.clone());
        }
        let plan = Rc::new(RecursionPlan::build(v.n(), v.generators(), self)?);
        self.recursive.insert(v.clone(), plan.clone());
        Ok(plan)
    }

    fn sub_plan(&mut self, v: &VanishingStructure) -> Result<SubPlan, LevelGraphError> {
        Ok(match self.config.sub_counts {
            SubCountMode::ClosedForm => SubPlan::Closed(self.closed_form(v)),
            SubCountMode::Recursive => SubPlan::Recursive(self.recursion(v)?),
        })
    }
}

impl RecursionPlan {
    /// Plan for the structure generated by `generators`, added in the given order.
    pub fn build(
        n: usize,
        generators: &[IndexSubset],
        cache: &mut PlanCache,
    ) -> Result<Self, LevelGraphError> {
        let target = VanishingStructure::from_generators(n, generators)?;
        if target.is_identically_zero() {
            return Ok(Self { n, identically_zero: true, levels: vec![] });
        }
        let mut levels = Vec::with_capacity(generators.len());
        for k in 0..generators.len() {
            let prev = VanishingStructure::from_generators(n, &generators[..k])?;
            let mut terms = Vec::new();
            let mut skipped = Vec::new();
            for graph in boundary_graphs(&prev, generators[k])? {
                let induced = induced_structures(&graph, &prev, cache.config.top_rule)?;
                if induced.bottom_residues.is_none() {
                    skipped.push((graph, induced.node_residue_rank));
                    continue;
                }
                let bottom = cache.sub_plan(&induced.bottom)?;
                let tops = induced
                    .tops
                    .into_iter()
                    .map(|t| t.map(|v| Ok::<_, LevelGraphError>((cache.sub_plan(&v)?, v))).transpose())
                    .collect::<Result<_, _>>()?;
                terms.push(GraphTerm { graph, bottom, bottom_structure: induced.bottom, tops });
            }
            levels.push(Level { generator: generators[k], terms, skipped });
        }
        Ok(Self { n, identically_zero: false, levels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of boundary terms kept at each level.
    pub fn terms_per_level(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.terms.len()).collect()
    }

    /// The recursion over an [`Exact`] scalar. Each single-pole block's twist
    /// factor `b_X - 1` and semistable factor `1 / (b_X - 1)` cancel, so only
    /// blocks with two or more poles enter the product.
    pub fn eval<T: Exact>(&self, b: &[i128]) -> Result<T, ExactError> {
        if self.identically_zero {
            return Ok(T::exact_zero());
        }
        let a = b.iter().sum::<i128>() - 2;
        let mut total = falling_exact::<T>(a, self.n)?;
        let mut local = Vec::with_capacity(self.n);
        for level in &self.levels {
            for term in &level.terms {
                let orders: Vec<i128> = term
                    .graph
                    .blocks
                    .iter()
                    .map(|x| bits(x.mask()).map(|i| b[i]).sum())
                    .collect();
                let bottom = term.bottom.eval::<T>(&orders)?;
                if bottom.vanishes() {
                    continue;
                }
                let mut prod = bottom;
                for ((x, top), &order) in term.graph.blocks.iter().zip(&term.tops).zip(&orders) {
                    if let Some((plan, _)) = top {
                        local.clear();
                        local.extend(bits(x.mask()).map(|i| b[i]));
                        prod = prod.try_mul(&T::from_i128(order - 1)?)?;
                        prod = prod.try_mul(&plan.eval::<T>(&local)?)?;
                    }
                }
                total = total.try_sub(&prod)?;
            }
        }
        Ok(total)
    }

    /// The recursive count, on `i128` when it fits and on [`Integer`] otherwise.
    pub fn count_poles(&self, b: &[u64]) -> Result<Integer, LevelGraphError> {
        if b.len() != self.n {
            return Err(ProfileError::SizeMismatch { expected: self.n, found: b.len() }.into());
        }
        let small: Vec<i128> = b.iter().map(|&x| i128::from(x)).collect();
        match self.eval::<i128>(&small) {
            Ok(v) => Ok(Integer::from(v)),
            Err(ExactError::Overflow) => self
                .eval::<Integer>(&small)
                .map_err(|_| LevelGraphError::InvalidGraph("sub-count failed to evaluate")),
            Err(_) => Err(LevelGraphError::InvalidGraph("sub-count failed to evaluate")),
        }
    }

    /// Evaluate with exact rational semistable factors, recording every term.
    pub fn trace(&self, mu: &OrderProfile) -> Result<RecursionTrace, LevelGraphError> {
        let b: Vec<i128> = mu.b().iter().map(|&x| i128::from(x)).collect();
        let base = if self.identically_zero {
            Integer::zero()
        } else {
            falling_exact::<Integer>(mu.a() as i128, self.n).expect("big integers do not overflow")
        };
        let mut running = base.clone();
        let mut levels = Vec::new();
        for level in &self.levels {
            let mut terms = Vec::new();
            for term in &level.terms {
                let orders: Vec<i128> = term
                    .graph
                    .blocks
                    .iter()
                    .map(|x| bits(x.mask()).map(|i| b[i]).sum())
                    .collect();
                let n0 = term
                    .bottom
                    .eval::<Integer>(&orders)
                    .map_err(|_| LevelGraphError::InvalidGraph("bottom count failed"))?;
                let mut twist_value = Integer::one();
                let mut value = Rational::from_integer(n0.clone());
                let mut tops = Vec::new();
                for ((x, top), &order) in term.graph.blocks.iter().zip(&term.tops).zip(&orders) {
                    let order = Integer::from(order);
                    let prong: Integer = &order - 1;
                    twist_value *= &prong;
                    match top {
                        Some((plan, v)) => {
                            let local: Vec<i128> = bits(x.mask()).map(|i| b[i]).collect();
                            let ni = plan
                                .eval::<Integer>(&local)
                                .map_err(|_| LevelGraphError::InvalidGraph("top count failed"))?;
                            value *= Rational::from_integer(&prong * &ni);
                            tops.push(TopTrace {
                                block: x.to_string(),
                                closure: closure_strings(v),
                                count: ni.to_string(),
                            });
                        }
                        None if prong.is_zero() => {
                            // b_X = 1: the pair (b_X - 1) f(b_X - 2, 1) is taken as its cancelled value.
                            tops.push(TopTrace { block: x.to_string(), closure: vec![], count: "1".into() });
                        }
                        None => {
                            let semistable = Rational::new(Integer::one(), prong.clone());
                            value *= Rational::from_integer(prong.clone()) * &semistable;
                            tops.push(TopTrace {
                                block: x.to_string(),
                                closure: vec![],
                                count: semistable.to_string(),
                            });
                        }
                    }
                }
                if !value.is_integer() || value.is_negative() {
                    return Err(LevelGraphError::NonIntegralResult(value));
                }
                let value = value.to_integer();
                running -= &value;
                terms.push(TermTrace {
                    graph: term.graph.to_string(),
                    twist: twist_value.to_string(),
                    bottom_closure: closure_strings(&term.bottom_structure),
                    bottom_count: n0.to_string(),
                    tops,
                    term: value.to_string(),
                });
            }
            levels.push(LevelTrace {
                generator: level.generator.to_string(),
                terms,
                skipped: level
                    .skipped
                    .iter()
                    .map(|(g, rank)| SkippedTrace { graph: g.to_string(), node_residue_rank: *rank })
                    .collect(),
                running_total: running.to_string(),
            });
        }
        Ok(RecursionTrace { base: base.to_string(), levels, total: running.to_string() })
    }
}

fn closure_strings(v: &VanishingStructure) -> Vec<String> {
    v.closure().iter().map(|j| j.to_string()).collect()
}

/// Per-level, per-graph record of a recursive evaluation. Numbers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursionTrace {
    pub base: String,
    pub levels: Vec<LevelTrace>,
    pub total: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelTrace {
    pub generator: String,
    pub terms: Vec<TermTrace>,
    pub skipped: Vec<SkippedTrace>,
    pub running_total: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermTrace {
    pub graph: String,
    pub twist: String,
    pub bottom_closure: Vec<String>,
    pub bottom_count: String,
    pub tops: Vec<TopTrace>,
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopTrace {
    pub block: String,
    pub closure: Vec<String>,
    pub count: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedTrace {
    pub graph: String,
    pub node_residue_rank: usize,
}

/// `N(mu, V)` by the recursion, with the default configuration.
pub fn count_recursive(mu: &OrderProfile, v: &VanishingStructure) -> Result<Integer, LevelGraphError> {
    count_recursive_with(mu, v.generators(), RecursionConfig::default())
}

/// The recursion for the structure generated by `generators`, added in the
/// given order. Each generator must be independent of the earlier ones.
pub fn count_recursive_with(
    mu: &OrderProfile,
    generators: &[IndexSubset],
    config: RecursionConfig,
) -> Result<Integer, LevelGraphError> {
    let n = mu.n();
    for k in 0..generators.len() {
        let prev = VanishingStructure::from_generators(n, &generators[..k])?;
        if prev.is_zero_sum(generators[k]) {
            return Err(LevelGraphError::DependentGenerator(generators[k]));
        }
    }
    let mut cache = PlanCache::new(config);
    RecursionPlan::build(n, generators, &mut cache)?.count_poles(mu.b())
}

/// Recursive count together with its term-by-term trace.
pub fn trace_recursive(
    mu: &OrderProfile,
    v: &VanishingStructure,
    config: RecursionConfig,
) -> Result<RecursionTrace, LevelGraphError> {
    let mut cache = PlanCache::new(config);
    let plan = RecursionPlan::build(mu.n(), v.generators(), &mut cache)?;
    plan.trace(mu)
}
