//! Flat `key = value` run configuration.
//!
//! Values are resolved from the subcommand defaults, then the optional
//! config file, then command-line flags. Blank values mean "unset"
//! (derived from the other parameters).

use std::collections::BTreeMap;
use std::path::Path;

use glassey_core::LabError;

use crate::CliError;

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

pub const SUBCOMMANDS: [&str; 6] = ["solve", "ineq", "kss", "picard", "lifespan", "norms"];

const COMMON: &[Key] = &[
    key("n", "3", "spatial dimension"),
    key("p", "2.5", "nonlinearity power"),
    key("a", "1", "coefficient of |u_t|^p"),
    key("b", "0", "coefficient of |grad u|^p"),
    key("rmax", "20", "outer radius of the grid"),
    key("cells", "800", "number of grid cells"),
    key("cfl", "0.25", "time step as a fraction of the grid spacing"),
    key("out", "glassey-out", "output directory"),
    key("seed", "0", "first random seed"),
    key("jobs", "1", "worker threads for parallel sweeps"),
];

const PROFILE: &[Key] = &[
    key("profile", "gaussian", "data shape: gaussian, bump or file"),
    key("width", "1", "profile width"),
    key("center", "0", "profile center"),
    key("assign", "to_u0", "which data the amplitude goes to: to_u0, to_u1 or split"),
    key("data_file", "", "radial-field file for profile = file"),
];

const SOLVE: &[Key] = &[
    key("eps", "1", "data amplitude"),
    key("t", "10", "final time"),
    key("dt_sample", "", "recording interval (default: every 10 steps)"),
    key("linear", "false", "drop the nonlinearity"),
];

const INEQ: &[Key] = &[
    key("lemma", "hardy", "hardy, trace, trace_variant, decay or energy_ineq"),
    key("s", "1", "exponent s of the function-space lemmas"),
    key("samples", "200", "number of random fields"),
    key("s1", "", "decay envelope s1"),
    key("s2", "", "decay envelope s2"),
    key("eps", "1", "data amplitude (decay, energy_ineq)"),
    key("amplitude", "1", "forcing amplitude (energy_ineq)"),
    key("t", "2", "final time (decay, energy_ineq)"),
    key("dt_sample", "0.05", "recording interval (decay, energy_ineq)"),
];

const KSS: &[Key] = &[
    key("mode", "hom", "hom (free wave) or inhom (zero data, bump forcing)"),
    key("delta", "0.3", "weight exponent delta"),
    key("delta_prime", "0.2", "weight exponent delta'"),
    key("horizons", "1,10,100", "comma-separated horizons T"),
    key("eps", "1", "data amplitude (hom)"),
    key("amplitude", "1", "forcing amplitude (inhom)"),
    key("dt_sample", "0.05", "recording interval"),
];

const PICARD: &[Key] = &[
    key("eps", "0.05", "data amplitude"),
    key("t", "10", "horizon T"),
    key("max_iters", "30", "iteration cap"),
    key("tol", "1e-10", "stop when rho <= tol * Lambda_1"),
    key("s1", "", "regularity s1 (default from the regime)"),
    key("s2", "", "regularity s2 (default from the regime)"),
    key("compare", "true", "also solve directly and report the distance"),
];

const LIFESPAN: &[Key] = &[
    key("eps", "0.7,1,1.4,2,2.8", "comma-separated increasing amplitudes"),
    key("cells2", "", "cells of the fine ladder rung (default 2 * cells)"),
    key("horizon", "50", "censoring horizon"),
];

const NORMS: &[Key] = &[
    key("eps", "1", "data amplitude"),
    key("t", "10", "horizon T"),
    key("linear", "false", "drop the nonlinearity"),
    key("delta", "", "weight exponent delta (default from the regime)"),
    key("delta_prime", "", "weight exponent delta' (default from the regime)"),
    key("s1", "", "regularity s1 (default from the regime)"),
    key("s2", "", "regularity s2 (default from the regime)"),
];

fn specific(sub: &str) -> &'static [Key] {
    match sub {
        "solve" => SOLVE,
        "ineq" => INEQ,
        "kss" => KSS,
        "picard" => PICARD,
        "lifespan" => LIFESPAN,
        "norms" => NORMS,
        _ => &[],
    }
}

fn default_override(sub: &str, name: &str) -> Option<&'static str> {
    Some(match (sub, name) {
        ("ineq", "cells") => "2000",
        ("ineq", "rmax") => "20",
        ("kss", "rmax") => "110",
        ("kss", "cells") => "2200",
        ("lifespan", "p") => "1.5",
        ("lifespan", "rmax") => "60",
        ("lifespan", "cells") => "3000",
        _ => return None,
    })
}

pub fn schema(sub: &str) -> Vec<&'static Key> {
    let mut keys: Vec<&Key> = COMMON.iter().collect();
    if matches!(sub, "solve" | "ineq" | "kss" | "picard" | "lifespan" | "norms") {
        keys.extend(PROFILE.iter());
    }
    keys.extend(specific(sub).iter());
    keys
}

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: String,
    values: BTreeMap<String, String>,
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| LabError::Parse(format!("config line {}: expected key = value", k + 1)))?;
        out.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(
        sub: &str,
        file: Option<&Path>,
        flags: &[(String, String)],
    ) -> Result<Self, CliError> {
        let keys = schema(sub);
        let mut values: BTreeMap<String, String> = keys
            .iter()
            .map(|k| (k.name.to_owned(), default_override(sub, k.name).unwrap_or(k.default).to_owned()))
            .collect();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(LabError::from)?;
            for (k, v) in parse_config_text(&text)? {
                if !values.contains_key(&k) {
                    return Err(LabError::Parse(format!("unknown config key '{k}' for {sub}")).into());
                }
                values.insert(k, v);
            }
        }
        for (k, v) in flags {
            values.insert(k.clone(), v.clone());
        }
        Ok(Self { subcommand: sub.to_owned(), values })
    }

    pub fn render(&self) -> String {
        let mut s = format!("# glassey-lab v1 {} config\n", self.subcommand);
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    /// One-line `key=value` listing for diagnostics.
    pub fn summary(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<T, CliError> {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|_| LabError::Parse(format!("{key} = '{raw}' is not {what}")).into())
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.parsed(key, "a number")
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.f64(key).map(Some)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        self.parsed(key, "true or false")
    }

    pub fn list_f64(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| LabError::Parse(format!("{key}: '{s}' is not a number")).into()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("glassey-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.txt");
        std::fs::write(&path, "# comment\nn = 4\np = 3\n").unwrap();
        let cfg = RunConfig::resolve("solve", Some(&path), &[("p".into(), "2".into())]).unwrap();
        assert_eq!(cfg.raw("n"), "4");
        assert_eq!(cfg.raw("p"), "2");
        assert_eq!(cfg.raw("cfl"), "0.25");
        let again = parse_config_text(&cfg.render()).unwrap();
        assert_eq!(again.get("n").unwrap(), "4");
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(RunConfig::resolve("solve", Some(&path), &[]).is_err());
    }
}
