//! Count requests as given on the command line or in a batch file, and their
//! validation into core types.

use serde::{Deserialize, Deserializer, Serialize};

use isoresidual::arith::GaussianRational;
use isoresidual::profile::{OrderProfile, ResidueTuple, VanishingStructure, MAX_POLES};
use isoresidual::subset::IndexSubset;

use crate::CliError;

/// One count. Lists accept a comma-separated string or a JSON array of
/// numbers or strings, and are echoed back as arrays of strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRequest {
    /// `a, b_1, ..., b_n`.
    #[serde(default, deserialize_with = "list", skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<String>>,
    /// `b_1, ..., b_n` with `a` inferred.
    #[serde(default, deserialize_with = "list", skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    #[serde(default, deserialize_with = "list", skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<String>>,
    /// Generators as `"i,j;k,l"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vanishings: Option<String>,
    #[serde(default)]
    pub recursive: bool,
    #[serde(default)]
    pub oracle: bool,
    /// Seed for realizing a structure as a residue tuple.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ListInput {
    Joined(String),
    Items(Vec<Item>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Item {
    Int(i64),
    Text(String),
}

fn list<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<String>>, D::Error> {
    Ok(Some(match ListInput::deserialize(d)? {
        ListInput::Joined(s) => split_list(&s),
        ListInput::Items(items) => items
            .into_iter()
            .map(|i| match i {
                Item::Int(v) => v.to_string(),
                Item::Text(s) => s.trim().to_string(),
            })
            .collect(),
    }))
}

/// Split `"1, 2,3"` into trimmed tokens; the empty string gives no tokens.
pub fn split_list(s: &str) -> Vec<String> {
    if s.trim().is_empty() {
        return vec![];
    }
    s.split(',').map(|t| t.trim().to_string()).collect()
}

/// Where the vanishings come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Residues(ResidueTuple),
    Vanishings(VanishingStructure),
}

/// A request checked against the core types.
#[derive(Debug, Clone)]
pub struct Validated {
    pub profile: OrderProfile,
    pub source: Source,
    pub structure: VanishingStructure,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn parse_orders(tokens: &[String], what: &str) -> Result<Vec<u64>, CliError> {
    tokens
        .iter()
        .map(|t| t.parse::<u64>().map_err(|_| invalid(format!("{what}: {t:?} is not a nonnegative integer"))))
        .collect()
}

/// `mu` (with `a` first) or `b`, exactly one of them.
pub fn parse_profile(mu: Option<&[String]>, b: Option<&[String]>) -> Result<OrderProfile, CliError> {
    let profile = match (mu, b) {
        (Some(mu), None) => {
            let values = parse_orders(mu, "mu")?;
            let Some((&a, poles)) = values.split_first() else {
                return Err(invalid("mu is empty"));
            };
            check_count(poles.len())?;
            OrderProfile::new(a, poles.to_vec())
        }
        (None, Some(b)) => {
            let values = parse_orders(b, "b")?;
            check_count(values.len())?;
            OrderProfile::from_poles(values)
        }
        _ => return Err(invalid("give exactly one of mu or b")),
    };
    profile.map_err(|e| invalid(e.to_string()))
}

fn check_count(n: usize) -> Result<(), CliError> {
    if n > MAX_POLES {
        return Err(invalid(format!("at most {MAX_POLES} poles are supported, got {n}")));
    }
    Ok(())
}

pub fn parse_residues(tokens: &[String], n: usize) -> Result<ResidueTuple, CliError> {
    if tokens.len() != n {
        return Err(invalid(format!("rho has {} entries but the profile has {n} poles", tokens.len())));
    }
    let values = tokens
        .iter()
        .map(|t| GaussianRational::parse(t).map_err(|e| invalid(format!("rho entry {t:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    ResidueTuple::new(values).map_err(|e| invalid(e.to_string()))
}

/// Parse `"1,2;3"` into the structure it generates on `n` poles.
pub fn parse_vanishings(text: &str, n: usize) -> Result<VanishingStructure, CliError> {
    let mut gens = Vec::new();
    for group in text.split(';').filter(|g| !g.trim().is_empty()) {
        let indices = group
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<usize>()
                    .ok()
                    .filter(|&i| (1..=n).contains(&i))
                    .ok_or_else(|| invalid(format!("vanishing index {t:?} is not in 1..={n}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let subset = IndexSubset::from_indices(indices).expect("indices are in range");
        if !subset.is_proper(n) {
            return Err(invalid(format!("vanishing {subset} must be a proper subset of the poles")));
        }
        gens.push(subset);
    }
    VanishingStructure::from_generators(n, &gens).map_err(|e| invalid(e.to_string()))
}

impl CountRequest {
    pub fn validate(&self) -> Result<Validated, CliError> {
        let profile = parse_profile(self.mu.as_deref(), self.b.as_deref())?;
        let n = profile.n();
        let source = match (&self.rho, &self.vanishings) {
            (Some(rho), None) => Source::Residues(parse_residues(rho, n)?),
            (None, Some(v)) => Source::Vanishings(parse_vanishings(v, n)?),
            _ => return Err(invalid("give exactly one of rho or vanishings")),
        };
        if self.oracle && n > 3 {
            return Err(invalid(format!("the elimination oracle handles at most 3 poles, got {n}")));
        }
        let structure = match &source {
            Source::Residues(rho) => VanishingStructure::from_residues(rho),
            Source::Vanishings(v) => v.clone(),
        };
        Ok(Validated { profile, source, structure })
    }
}
