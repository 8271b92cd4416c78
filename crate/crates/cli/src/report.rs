//! Serializable reports. Sizes and indices are JSON integers; every exact
//! value is a decimal string.

use std::fmt::{self, Write as _};

use serde::Serialize;

use isoresidual::levelgraph::RecursionTrace;

use crate::request::CountRequest;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    /// The request as parsed; feeding it back reproduces this report.
    pub input: CountRequest,
    pub a: String,
    pub b: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<String>>,
    pub closure: Vec<String>,
    pub generators: Vec<String>,
    pub rank: usize,
    pub terms: Vec<TermReport>,
    pub max_s: usize,
    pub total: String,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recursion: Option<RecursionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermReport {
    pub s: usize,
    pub value: String,
    pub partitions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursionReport {
    pub total: String,
    pub matches: bool,
    pub trace: RecursionTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    /// The residues eliminated against, realized from the structure if needed.
    pub residues: Vec<String>,
    pub count: String,
    pub eliminant: String,
    pub squarefree: bool,
    pub matches: bool,
}

impl CountReport {
    /// `false` if a cross-check disagrees with the closed form or the
    /// oracle saw a repeated root. An oracle disagreement is expected, and
    /// ignored, when the structure forces a zero residue at a simple pole.
    pub fn consistent(&self) -> bool {
        let recursion = self.recursion.as_ref().is_none_or(|r| r.matches);
        let oracle = self
            .oracle
            .as_ref()
            .is_none_or(|o| o.squarefree && (o.matches || !self.warnings.is_empty()));
        recursion && oracle
    }
}

fn list_or_none(items: &[String]) -> String {
    if items.is_empty() {
        "(none)".to_string()
    } else {
        items.join(" ")
    }
}

impl fmt::Display for CountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "profile     a = {}, b = ({})", self.a, self.b.join(", "))?;
        if let Some(m) = &self.multipliers {
            writeln!(f, "multipliers {}", m.join(", "))?;
        }
        if let Some(rho) = &self.input.rho {
            writeln!(f, "residues    {}", rho.join(", "))?;
        }
        writeln!(f, "closure     {}", list_or_none(&self.closure))?;
        writeln!(f, "generators  {}", list_or_none(&self.generators))?;
        writeln!(f, "rank        {}", self.rank)?;
        writeln!(f)?;
        let width = self.terms.iter().map(|t| t.value.len()).max().unwrap_or(0).max(4);
        writeln!(f, "{:>3}  {:>width$}  partitions", "s", "term")?;
        for t in &self.terms {
            let mut line = format!("{:>3}  {:>width$}  ", t.s, t.value);
            let _ = write!(line, "{}", t.partitions.join("  "));
            writeln!(f, "{}", line.trim_end())?;
        }
        writeln!(f)?;
        writeln!(f, "total       {}", self.total)?;
        if let Some(r) = &self.recursion {
            writeln!(f, "recursion   {} ({})", r.total, if r.matches { "matches" } else { "MISMATCH" })?;
        }
        if let Some(o) = &self.oracle {
            writeln!(f, "oracle      {} ({})", o.count, if o.matches { "matches" } else { "MISMATCH" })?;
            writeln!(f, "  residues  {}", o.residues.join(", "))?;
            writeln!(f, "  eliminant {}", o.eliminant)?;
            if !o.squarefree {
                writeln!(f, "  eliminant has a repeated root")?;
            }
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}
