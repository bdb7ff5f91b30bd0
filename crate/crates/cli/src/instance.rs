use std::fs;
use std::path::Path;

use amplisat::{parse_dimacs, CnfFormula, InstanceJson, DEFAULT_N_LIMIT};
use anyhow::{Context, Result};

pub struct LoadedInstance {
    pub formula: CnfFormula,
    /// Solution count stored alongside the instance, if any.
    pub stored_l: Option<u64>,
}

/// Reads DIMACS (`.cnf` or anything else) or instance JSON (`.json`).
/// For DIMACS input a sidecar `<stem>.json` is consulted for a stored `L`.
pub fn load(path: &Path) -> Result<LoadedInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let json: InstanceJson = serde_json::from_str(&text)?;
        return Ok(LoadedInstance {
            formula: json.formula()?,
            stored_l: json.solution_count,
        });
    }
    let formula = parse_dimacs(&text)?;
    let sidecar = path.with_extension("json");
    let stored_l = match fs::read_to_string(&sidecar) {
        Ok(text) => serde_json::from_str::<InstanceJson>(&text)
            .ok()
            .filter(|j| j.formula().ok().map(|f| f.canonical()) == Some(formula.canonical()))
            .and_then(|j| j.solution_count),
        Err(_) => None,
    };
    Ok(LoadedInstance { formula, stored_l })
}

/// Explicit flag, then stored value, then brute-force count.
pub fn resolve_l(instance: &LoadedInstance, flag: Option<u64>) -> Result<u64> {
    if let Some(l) = flag {
        return Ok(l);
    }
    if let Some(l) = instance.stored_l {
        return Ok(l);
    }
    Ok(instance
        .formula
        .count_solutions(false, DEFAULT_N_LIMIT)?
        .count)
}
