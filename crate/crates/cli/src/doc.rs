use std::io::Read;
use std::path::Path;

use fusionforge_core::engine::recover::Coefficient;
use fusionforge_core::modular::catalog;
use fusionforge_core::ModularData;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fusionforge_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: invalid document: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_diagnostic() => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// The machine-readable record every command produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs_hash: String,
    pub tolerance: f64,
    pub seed: u64,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_coefficients: Option<Vec<Coefficient>>,
}

/// sha256 over the canonical JSON of everything that determines the result.
pub fn inputs_hash(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("JSON values serialize");
    format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
}

fn read_source(src: &str) -> CliResult<String> {
    let mut text = String::new();
    if src == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
    } else {
        text = std::fs::read_to_string(src).map_err(|source| CliError::Io { path: src.into(), source })?;
    }
    Ok(text)
}

/// Reads and parses a JSON document from a path or stdin.
pub fn load<T: DeserializeOwned>(src: &str) -> CliResult<T> {
    let text = read_source(src)?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: src.into(), source })
}

/// A catalog name, a modular data file, or stdin; plus its canonical form for hashing.
pub fn load_category(src: &str, tolerance: f64) -> CliResult<(ModularData, Value)> {
    if src == "-" || Path::new(src).is_file() {
        let md = ModularData::from_json(&read_source(src)?)?;
        let canon = serde_json::to_value(&md).expect("modular data serializes");
        return Ok((md.with_tolerance(tolerance)?, canon));
    }
    let md = catalog(src)?.with_tolerance(tolerance)?;
    Ok((md, serde_json::json!({ "catalog": src })))
}

const ALIASES: &[(&str, &str)] = &[("1", "𝟙"), ("tau", "τ"), ("sigma", "σ"), ("psi", "ψ")];

/// Resolves a label typed on the command line, accepting ASCII aliases.
pub fn resolve_label(md: &ModularData, token: &str) -> CliResult<usize> {
    let token = token.trim();
    if let Some(i) = md.index_of(token) {
        return Ok(i);
    }
    let parts: Vec<&str> = token.split(['x', '⊠']).collect();
    let spelled: Vec<&str> = parts
        .iter()
        .map(|p| ALIASES.iter().find(|(a, _)| a == p).map_or(*p, |(_, u)| *u))
        .collect();
    md.index_of(&spelled.join("⊠"))
        .ok_or_else(|| CliError::Usage(format!("unknown label '{token}'; known: {}", md.labels().join(", "))))
}

/// ASCII spelling of unicode labels in text output.
pub fn asciify(s: &str) -> String {
    let mut out = s.replace('⊠', "x");
    for (a, u) in ALIASES {
        out = out.replace(u, a);
    }
    out
}
