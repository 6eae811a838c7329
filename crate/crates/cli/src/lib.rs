//! Config-driven experiment runner behind the `ratdyn` binary.
//!
//! A config is a JSON object naming an operation (`"op"`) of one experiment
//! family together with its descriptors. The meta keys `seed`,
//! `experiment`, `out` and `format` are read by the runner itself.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

pub use experiments::{Family, DISPATCH, SEQUENCE_KINDS};
pub use output::{Format, Meta, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ratdyn_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for bad configs, 3 for arithmetic overflow, 4 for exhausted
    /// budgets, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        use ratdyn_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::InvalidArgument(_)
                | E::AlphabetMismatch { .. }
                | E::NotBinary(_)
                | E::SchemeIndex { .. }
                | E::Parse(_) => 2,
                E::Overflow(_) => 3,
                E::CapExceeded { .. } | E::Budget(_) => 4,
                E::Undefined(_) => 1,
            },
            CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

/// A parsed config with the runner's meta keys split off.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub body: Value,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// sha256 of the canonical config (with the effective seed, without
    /// `out` and `format`).
    pub hash: String,
}

pub fn prepare(family: Family, text: &str, seed_flag: Option<u64>) -> Result<Prepared, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    let Value::Object(mut obj) = value else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    if let Some(exp) = obj.remove("experiment") {
        if exp.as_str() != Some(family.name()) {
            return Err(CliError::Config(format!(
                "config is for experiment {exp}, not {}",
                family.name()
            )));
        }
    }
    let cfg_seed = match obj.remove("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| CliError::Config("seed must be a u64".into()))?),
    };
    let out = match obj.remove("out") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(CliError::Config("out must be a path string".into())),
    };
    let format = match obj.remove("format") {
        None => None,
        Some(Value::String(s)) => Some(s.parse()?),
        Some(_) => return Err(CliError::Config("format must be \"csv\" or \"json\"".into())),
    };
    let seed = seed_flag.or(cfg_seed).unwrap_or(0);
    let body = Value::Object(obj);
    let mut hashed = body.clone();
    hashed["experiment"] = Value::String(family.name().into());
    hashed["seed"] = Value::from(seed);
    let hash = Sha256::digest(canonical(&hashed).as_bytes());
    Ok(Prepared {
        body,
        seed,
        out,
        format,
        hash: hash.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

/// JSON with object keys sorted at every level and no whitespace.
pub fn canonical(v: &Value) -> String {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let parts: Vec<String> = keys
                .into_iter()
                .map(|k| format!("{}:{}", Value::String(k.clone()), canonical(&m[k])))
                .collect();
            format!("{{{}}}", parts.join(","))
        }
        Value::Array(a) => format!("[{}]", a.iter().map(canonical).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

/// Runs one experiment and returns the rendered output.
pub fn execute(family: Family, text: &str, seed_flag: Option<u64>, format_flag: Option<Format>) -> Result<Vec<u8>, CliError> {
    let (bytes, _) = execute_with_target(family, text, seed_flag, format_flag)?;
    Ok(bytes)
}

fn execute_with_target(
    family: Family,
    text: &str,
    seed_flag: Option<u64>,
    format_flag: Option<Format>,
) -> Result<(Vec<u8>, Option<PathBuf>), CliError> {
    let prep = prepare(family, text, seed_flag)?;
    let ctx = config::Context { seed: prep.seed };
    let (op, table) = experiments::dispatch(family, prep.body, &ctx)?;
    let meta = Meta {
        tool: "ratdyn".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: prep.hash,
        experiment: format!("{}.{}", family.name(), op),
        seed: prep.seed,
    };
    let format = format_flag.or(prep.format).unwrap_or(Format::Csv);
    Ok((output::render(&meta, &table, format)?, prep.out))
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub family: Family,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

/// Reads the config, runs it on a pool of the requested size and writes
/// the result to `--out`, the config's `out`, or stdout.
pub fn run(opts: &RunOptions) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&opts.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", opts.config.display())))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be >= 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::Output(e.to_string()))?;
    let (bytes, cfg_out) = pool.install(|| execute_with_target(opts.family, &text, opts.seed, opts.format))?;
    match opts.out.as_ref().or(cfg_out.as_ref()) {
        Some(path) => write_file(path, &bytes),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(std::fs::write(path, bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_key_order_and_output_plumbing() {
        let a = prepare(Family::Mobius, r#"{"op":"mertens","n":10,"seed":3}"#, None).unwrap();
        let b = prepare(Family::Mobius, r#"{"seed":3,"n":10,"op":"mertens","out":"x.csv","format":"json"}"#, None).unwrap();
        let c = prepare(Family::Mobius, r#"{"op":"mertens","n":10}"#, Some(3)).unwrap();
        assert_eq!(a.hash, b.hash);
        assert_eq!(a.hash, c.hash);
        assert_eq!(b.format, Some(Format::Json));
        assert_ne!(a.hash, prepare(Family::Mobius, r#"{"op":"mertens","n":11,"seed":3}"#, None).unwrap().hash);
    }

    #[test]
    fn canonical_sorts_nested_keys() {
        let v: Value = serde_json::from_str(r#"{"b":[{"y":1,"x":2}],"a":"q"}"#).unwrap();
        assert_eq!(canonical(&v), r#"{"a":"q","b":[{"x":2,"y":1}]}"#);
    }
}
