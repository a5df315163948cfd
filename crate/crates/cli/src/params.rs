//! Per-command parameter tables, config files and typed lookups.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use liyorke_core::diophantine::SearchStrategy;
use liyorke_core::NamedIrrational;

use crate::error::CliError;

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

static PAIR_COMMON: [Key; 13] = [
    key(
        "system",
        "disk-f",
        "disk-f | disk-f-inverse | plane-g | plane-g-inverse",
    ),
    key("family", "certified", "certified | random"),
    key(
        "base",
        "sqrt2",
        "lattice step for certified families: sqrt2 | golden | e",
    ),
    key("center", "0", "log-odds of lattice offset 0"),
    key("seed", "1", "seed for random families"),
    key("horizon", "10000", "last orbit index sampled"),
    key("stride", "1", "spacing of the uniform sample"),
    key("search-bound", "100000", "bound for the near-1/2 witness search"),
    key("strategy", "auto", "near-1/2 search: auto | exhaustive | accelerated"),
    key("hints", "true", "merge witness indices into the sample"),
    key("delta-low", "0.02", "liminf threshold"),
    key("delta-high", "1.9", "limsup threshold"),
    key(
        "tail-fraction",
        "0.5",
        "trailing fraction of the horizon used for estimates",
    ),
];

pub const ORBIT: &[Key] = &[
    key(
        "system",
        "disk-f",
        "disk-f | disk-f-inverse | plane-g | plane-g-inverse",
    ),
    key("modulus", "0.5", "initial modulus"),
    key("angle", "0", "initial angle in turns"),
    key("horizon", "20", "last orbit index"),
    key("stride", "1", "spacing of reported indices"),
];

pub const CONJUGACY: &[Key] = &[
    key("grid", "100x100", "radial x angular grid size"),
    key("rmax", "0.99", "largest grid modulus"),
    key("samples", "100", "random points for orbit transport"),
    key("max-n", "30", "largest transported iterate"),
    key("seed", "1", "seed for transport points"),
    key("tol", "1e-10", "residual tolerance reported in the summary"),
];

pub const OPERATOR: &[Key] = &[
    key("eps", "0.1", "base perturbation in (0, 1)"),
    key("c", "2,4,8,16", "strictly increasing growth targets"),
    key("blocks", "4", "number of blocks"),
    key("table", "schedule", "schedule | profile | inverse"),
    key("probe", "uniform", "profile probe: first | last | uniform"),
    key("n-max", "200", "largest power in profile and inverse tables"),
    key("seed", "1", "seed for the inverse-table vector"),
];

pub const CF: &[Key] = &[
    key("theta", "sqrt2", "sqrt2 | golden | e | p/q | decimal"),
    key("error", "0", "absolute error of a decimal theta (0: rounding only)"),
    key("depth", "6", "number of convergents"),
];

pub fn keys(command: &str) -> Vec<&'static Key> {
    static PAIR_EXTRA: [Key; 1] = [key(
        "offsets",
        "0,1",
        "two lattice offsets (certified) or member indices (random)",
    )];
    static SCRAMBLED_EXTRA: [Key; 1] = [key("count", "5", "family size")];
    match command {
        "orbit" => ORBIT.iter().collect(),
        "pair" => PAIR_COMMON
            .iter()
            .chain(PAIR_EXTRA.iter())
            .chain(SCRAMBLED_EXTRA.iter())
            .collect(),
        "scrambled" => PAIR_COMMON.iter().chain(SCRAMBLED_EXTRA.iter()).collect(),
        "conjugacy" => CONJUGACY.iter().collect(),
        "operator" => OPERATOR.iter().collect(),
        "cf" => CF.iter().collect(),
        _ => Vec::new(),
    }
}

pub const COMMANDS: [(&str, &str); 6] = [
    ("orbit", "Iterate one point and tabulate its orbit"),
    ("pair", "Distance series and Li-Yorke verdict for one pair"),
    ("scrambled", "Verdicts for every pair of a finite family"),
    (
        "conjugacy",
        "Residual of the conjugacy on a polar grid plus orbit transport",
    ),
    (
        "operator",
        "Schedule, growth profiles and inverse norms of the block operator",
    ),
    ("cf", "Continued fraction convergents"),
];

/// Resolved parameters: defaults, then the config file, then flags.
#[derive(Debug, Clone)]
pub struct Params {
    values: BTreeMap<&'static str, String>,
}

/// Config keys may use `_` where flags use `-`.
fn normalize(k: &str) -> String {
    k.trim().replace('_', "-")
}

/// Flat `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path, command: &str) -> Result<BTreeMap<&'static str, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
    let known = keys(command);
    let mut out = BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config("config", format!("line {}: expected key=value", line_no + 1)))?;
        let k = normalize(k);
        let entry = known.iter().find(|s| s.name == k).ok_or_else(|| {
            CliError::config(
                "config",
                format!("line {}: unknown key `{k}` for `{command}`", line_no + 1),
            )
        })?;
        out.insert(entry.name, v.trim().to_string());
    }
    Ok(out)
}

impl Params {
    pub fn resolve(
        command: &str,
        config: BTreeMap<&'static str, String>,
        flags: BTreeMap<&'static str, String>,
    ) -> Self {
        let mut values: BTreeMap<&'static str, String> =
            keys(command).iter().map(|k| (k.name, k.default.to_string())).collect();
        values.extend(config);
        values.extend(flags);
        Self { values }
    }

    pub fn raw(&self, key: &'static str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: FromStr>(&self, key: &'static str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|e| CliError::config(key, format!("cannot parse `{raw}`: {e}")))
    }

    pub fn positive<T: FromStr + PartialOrd + Default>(&self, key: &'static str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let v: T = self.get(key)?;
        if v > T::default() {
            Ok(v)
        } else {
            Err(CliError::config(key, "must be positive"))
        }
    }

    pub fn list<T: FromStr>(&self, key: &'static str) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| CliError::config(key, format!("cannot parse `{}`: {e}", s.trim())))
            })
            .collect()
    }

    pub fn flag(&self, key: &'static str) -> Result<bool, CliError> {
        match self.raw(key) {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            other => Err(CliError::config(key, format!("expected true or false, got `{other}`"))),
        }
    }

    pub fn irrational(&self, key: &'static str) -> Result<NamedIrrational, CliError> {
        NamedIrrational::parse(self.raw(key))
            .ok_or_else(|| CliError::config(key, format!("unknown irrational `{}`", self.raw(key))))
    }

    pub fn strategy(&self, key: &'static str) -> Result<SearchStrategy, CliError> {
        match self.raw(key) {
            "auto" => Ok(SearchStrategy::Auto),
            "exhaustive" => Ok(SearchStrategy::Exhaustive),
            "accelerated" => Ok(SearchStrategy::Accelerated),
            other => Err(CliError::config(key, format!("unknown strategy `{other}`"))),
        }
    }
}
