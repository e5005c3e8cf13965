//! `key = value` run configuration with per-command key schemas.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::error::{config_err, CliResult};

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn k(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec { key, default, help }
}

/// Keys accepted by every command.
pub const COMMON_KEYS: &[KeySpec] = &[
    k("seed", "0", "64-bit seed for random drives"),
    k("output_dir", "out", "directory receiving CSV files and the manifest"),
];

pub const SPECTRUM_KEYS: &[KeySpec] = &[
    k("drive", "thue-morse", "thue-morse | fibonacci | rmd | custom"),
    k("depth", "14", "Thue-Morse depth"),
    k("iters", "20", "Fibonacci iterations"),
    k("r", "1", "multipolar order of the rmd drive"),
    k("length_log2", "16", "log2 of the rmd length"),
    k("input", "", "sequence file for the custom drive"),
    k("omega_max", "0.39269908169872414", "upper edge of the envelope window"),
    k("bins", "0", "envelope bins (0 picks 24 per decade)"),
    k("trim", "auto", "fraction of lowest bins dropped (auto: 0.1 for random signs)"),
];

pub const FER_KEYS: &[KeySpec] = &[
    k("drive", "rmd", "thue-morse | fibonacci | rmd | custom"),
    k("depth", "14", "Thue-Morse depth"),
    k("iters", "20", "Fibonacci iterations"),
    k("r", "3", "multipolar order of the rmd drive"),
    k("length_log2", "14", "log2 of the rmd length"),
    k("input", "", "sequence file for the custom drive"),
    k("J", "1", "static field strength"),
    k("g", "0.05", "drive amplitude"),
    k("dt", "0.05", "step length"),
    k("q_max", "2", "number of Fer iterations"),
];

pub const LINRES_KEYS: &[KeySpec] = &[
    k("class", "stretch", "poly | quasipoly | stretch"),
    k("b", "1", "class exponent"),
    k("J", "1", "local energy scale"),
    k("g", "1", "drive amplitude"),
    k("lambda_sweep", "1e2:1e4:20", "lo:hi:count, log-spaced"),
    k("tol", "1e-10", "relative quadrature tolerance"),
];

pub const FLOW_KEYS: &[KeySpec] = &[
    k("class", "poly", "poly | quasipoly | stretch"),
    k("b", "3", "class exponent"),
    k("kappa0", "1", "initial decay rate"),
    k("J", "1", "local energy scale"),
    k("c", "144", "prefactor scale of stretch plans"),
    k("lambda_sweep", "1e6:1e10:20", "lo:hi:count, log-spaced"),
];

pub const EVOLVE_KEYS: &[KeySpec] = &[
    k("L", "8", "number of sites"),
    k("zz", "1", "nearest-neighbour zz coupling"),
    k("hz", "0.9", "static z field"),
    k("hx", "0.8", "static x field"),
    k("periodic", "false", "periodic boundary"),
    k("g", "0.5", "x-field drive amplitude"),
    k("dt", "0.05", "step length"),
    k("drive", "thue-morse", "thue-morse | rmd | fibonacci | custom"),
    k("r", "1", "multipolar order of the rmd drive"),
    k("steps_log2", "15", "log2 of the number of steps"),
    k("iters", "20", "Fibonacci iterations"),
    k("input", "", "sequence file for the custom drive"),
    k("initial", "0", "basis index of the initial product state (0 = all up)"),
    k("threshold", "0.1", "heating-time threshold fraction"),
    k("record_every", "1", "record the energy every this many steps"),
];

pub const CHECK_KEYS: &[KeySpec] = &[k("only", "all", "comma-separated criterion ids, or all")];

pub const RECIPE_KEYS: &[KeySpec] = &[];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return config_err(format!("config line {}: expected 'key = value', found '{raw}'", i + 1));
        };
        let key = key.trim();
        if key.is_empty() {
            return config_err(format!("config line {}: empty key", i + 1));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Defaults, then the config file, then command-line overrides. Unknown keys are rejected.
    pub fn resolve(
        command: &str,
        keys: &[KeySpec],
        file: Vec<(String, String)>,
        overrides: Vec<(String, String)>,
    ) -> CliResult<RunConfig> {
        let mut values: BTreeMap<String, String> =
            COMMON_KEYS.iter().chain(keys).map(|s| (s.key.to_string(), s.default.to_string())).collect();
        for (key, value) in file.into_iter().chain(overrides) {
            match values.get_mut(&key) {
                Some(slot) => *slot = value,
                None => return config_err(format!("unknown key '{key}' for command '{command}'")),
            }
        }
        Ok(RunConfig { command: command.to_string(), values })
    }

    /// `key = value` lines in key order, preceded by the command.
    pub fn canonical(&self) -> String {
        let mut s = format!("command = {}\n", self.command);
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("key '{key}' missing from schema"))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> CliResult<T> {
        let raw = self.str(key);
        raw.parse().or_else(|_| config_err(format!("key '{key}': expected {what}, found '{raw}'")))
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        let v: f64 = self.parsed(key, "a number")?;
        if v.is_finite() {
            Ok(v)
        } else {
            config_err(format!("key '{key}' must be finite"))
        }
    }

    pub fn u32(&self, key: &str) -> CliResult<u32> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn u64(&self, key: &str) -> CliResult<u64> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn usize(&self, key: &str) -> CliResult<usize> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn bool(&self, key: &str) -> CliResult<bool> {
        self.parsed(key, "true or false")
    }

    /// `lo:hi:count` as `count` log-spaced values.
    pub fn sweep(&self, key: &str) -> CliResult<Vec<f64>> {
        let raw = self.str(key);
        let parts: Vec<&str> = raw.split(':').collect();
        let bad = || config_err(format!("key '{key}': expected lo:hi:count, found '{raw}'"));
        let [lo, hi, n] = parts[..] else { return bad() };
        let (Ok(lo), Ok(hi), Ok(n)) = (lo.trim().parse::<f64>(), hi.trim().parse::<f64>(), n.trim().parse::<usize>()) else {
            return bad();
        };
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 || (n == 1 && hi != lo) {
            return config_err(format!("key '{key}': need 0 < lo <= hi and count >= 1 (count 1 only when lo = hi)"));
        }
        Ok(prethermal::arithmetic::log_grid(lo, hi, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let file = parse_config_text("# sweep\nclass = poly\nb = 2 # exponent\n").unwrap();
        let cfg = RunConfig::resolve("linres", LINRES_KEYS, file, vec![("b".into(), "4".into())]).unwrap();
        assert_eq!(cfg.str("class"), "poly");
        assert_eq!(cfg.f64("b").unwrap(), 4.0);
        assert_eq!(cfg.str("J"), "1");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let file = parse_config_text("colour = blue\n").unwrap();
        assert!(RunConfig::resolve("linres", LINRES_KEYS, file, vec![]).is_err());
        assert!(parse_config_text("no equals sign\n").is_err());
    }

    #[test]
    fn sweep_parsing() {
        let cfg = RunConfig::resolve("flow", FLOW_KEYS, vec![], vec![("lambda_sweep".into(), "1e2:1e4:3".into())]).unwrap();
        let s = cfg.sweep("lambda_sweep").unwrap();
        assert_eq!(s.len(), 3);
        assert!((s[1] - 1e3).abs() < 1e-9);
        for bad in ["1:2", "0:1:3", "1e4:1e2:3", "1:2:0", "a:b:c"] {
            let cfg = RunConfig::resolve("flow", FLOW_KEYS, vec![], vec![("lambda_sweep".into(), bad.into())]).unwrap();
            assert!(cfg.sweep("lambda_sweep").is_err(), "{bad}");
        }
    }

    #[test]
    fn hash_tracks_values() {
        let a = RunConfig::resolve("flow", FLOW_KEYS, vec![], vec![]).unwrap();
        let b = RunConfig::resolve("flow", FLOW_KEYS, vec![], vec![("b".into(), "2".into())]).unwrap();
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
