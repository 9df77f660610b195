use boolcomp::BoolFn;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::input::Loaded;

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize)]
pub struct InputHash {
    pub source: String,
    pub arity: usize,
    /// SHA-256 of the canonical `.btt` text.
    pub sha256: String,
}

/// The JSON document printed by every command. Apart from `elapsed_ms`
/// (and suite timings) it is a function of the arguments alone.
#[derive(Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub tool: Tool,
    pub inputs: Vec<InputHash>,
    pub result: Value,
    pub elapsed_ms: u128,
}

impl Default for Report {
    fn default() -> Self {
        Report {
            command: vec![],
            tool: Tool {
                name: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
            },
            inputs: vec![],
            result: Value::Null,
            elapsed_ms: 0,
        }
    }
}

pub fn btt_hash(f: &BoolFn) -> String {
    Sha256::digest(f.to_btt().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Report {
    pub fn new(result: Value) -> Self {
        Report {
            result,
            ..Report::default()
        }
    }

    pub fn add_input(&mut self, source: &str, f: &BoolFn) {
        self.inputs.push(InputHash {
            source: source.to_string(),
            arity: f.arity(),
            sha256: btt_hash(f),
        });
    }

    pub fn add_loaded(&mut self, l: &Loaded) {
        self.add_input(&l.source, &l.function);
    }

    pub fn to_json(&self, pretty: bool) -> String {
        let out = if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        };
        out.expect("reports serialize")
    }
}
