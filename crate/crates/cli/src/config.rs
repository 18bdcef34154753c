//! TOML configuration with command-line and environment overrides.
//!
//! Precedence, lowest first: file values, `--set key=value`, the dedicated
//! flags (`--n`, `--paths`, `--seed`), then `SPIRAL_ERW_SEED`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spiral_erw_core::angle::{AngleLaw, Regime, RegimeClassification};
use spiral_erw_core::stats::{CampaignConfig, Tolerances};
use spiral_erw_core::walk::LatticeParams;

pub const SEED_ENV: &str = "SPIRAL_ERW_SEED";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("bad override `{0}`: expected key=value")]
    Override(String),
    #[error("{SEED_ENV} is not an unsigned integer: {0:?}")]
    SeedEnv(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub law: Option<AngleLaw>,
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default = "default_paths")]
    pub paths: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_horizon_ratio")]
    pub horizon_ratio: u64,
    #[serde(default = "default_tie")]
    pub tie_tolerance: f64,
    /// Continuous time for the branching checks.
    #[serde(default = "default_time")]
    pub time: f64,
    #[serde(default)]
    pub regime_override: Option<Regime>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// `(p, q, r, s)` for lattice output; also supplies the law if none is given.
    #[serde(default)]
    pub lattice: Option<LatticeParams>,
}

fn default_n() -> u64 {
    1000
}

fn default_paths() -> u64 {
    1
}

fn default_alpha() -> f64 {
    1e-3
}

fn default_horizon_ratio() -> u64 {
    64
}

fn default_time() -> f64 {
    10.0
}

fn default_tie() -> f64 {
    spiral_erw_core::TIE_TOLERANCE
}

/// Values given through dedicated flags.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlagOverrides {
    pub n: Option<u64>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
}

impl Config {
    /// Reads `path` (or starts empty), applies overrides, and validates.
    pub fn load(
        path: Option<&Path>,
        sets: &[String],
        flags: FlagOverrides,
        env_seed: Option<&str>,
    ) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.to_path_buf(), source })?,
            None => String::new(),
        };
        Self::from_toml(&text, sets, flags, env_seed)
    }

    pub fn from_toml(
        text: &str,
        sets: &[String],
        flags: FlagOverrides,
        env_seed: Option<&str>,
    ) -> Result<Self, ConfigError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for set in sets {
            let (key, value) = set.split_once('=').ok_or_else(|| ConfigError::Override(set.clone()))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Override(set.clone()));
            }
            insert_dotted(&mut table, key, parse_value(value.trim()))?;
        }
        for (key, value) in [("n", flags.n), ("paths", flags.paths), ("seed", flags.seed)] {
            if let Some(v) = value {
                table.insert(key.into(), toml::Value::Integer(to_toml_int(v)?));
            }
        }
        if let Some(raw) = env_seed {
            let seed: u64 = raw.trim().parse().map_err(|_| ConfigError::SeedEnv(raw.to_string()))?;
            table.insert("seed".into(), toml::Value::Integer(to_toml_int(seed)?));
        }
        let config: Config = table.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        if !(config.time.is_finite() && config.time >= 0.0) {
            return Err(ConfigError::Invalid(format!("time must be finite and nonnegative, got {}", config.time)));
        }
        if let Some(lattice) = config.lattice {
            lattice.law().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(config)
    }

    /// The configured law, falling back to the lattice parameters.
    pub fn law(&self) -> Result<AngleLaw, ConfigError> {
        match (&self.law, &self.lattice) {
            (Some(law), _) => Ok(law.clone()),
            (None, Some(lattice)) => lattice.law().map_err(|e| ConfigError::Invalid(e.to_string())),
            (None, None) => Err(ConfigError::Invalid("no `law` (or `lattice`) given in the configuration".into())),
        }
    }

    /// Campaign settings, validated.
    pub fn campaign(&self) -> Result<CampaignConfig, ConfigError> {
        let c = self.campaign_unchecked()?;
        c.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(c)
    }

    fn campaign_unchecked(&self) -> Result<CampaignConfig, ConfigError> {
        let mut c = CampaignConfig::new(self.law()?, self.n, self.paths, self.seed);
        c.alpha = self.alpha;
        c.horizon_ratio = self.horizon_ratio;
        c.tie_tolerance = self.tie_tolerance;
        c.regime_override = self.regime_override;
        c.tolerances = self.tolerances;
        Ok(c)
    }

    /// Regime of the configured law under the tie tolerance and any override.
    pub fn classification(&self) -> Result<RegimeClassification, ConfigError> {
        self.campaign_unchecked()?.regime().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// SHA-256 of the effective configuration's canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("configuration serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn to_toml_int(v: u64) -> Result<i64, ConfigError> {
    i64::try_from(v).map_err(|_| ConfigError::Invalid(format!("{v} does not fit a TOML integer")))
}

/// TOML value of the text after `=`; bare words become strings.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn insert_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), ConfigError> {
    let mut parts = key.split('.').peekable();
    let mut cur = table;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let entry = cur.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::Override(format!("{key}: `{part}` is not a table")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use spiral_erw_core::angle::LawKind;

    const BASE: &str = r#"
n = 4096
paths = 20000
seed = 7
law = { type = "uniform", lo = 0.0, hi = 6.2831853072 }

[tolerances]
variance = 0.05
"#;

    #[test]
    fn file_values_and_defaults() {
        let c = Config::from_toml(BASE, &[], FlagOverrides::default(), None).unwrap();
        assert_eq!((c.n, c.paths, c.seed), (4096, 20000, 7));
        assert_eq!(c.alpha, 1e-3);
        assert_eq!(c.horizon_ratio, 64);
        assert!(matches!(c.law.unwrap().kind(), LawKind::UniformInterval { .. }));
    }

    #[test]
    fn precedence_file_set_flag_env() {
        let sets = vec!["seed=8".to_string(), "tolerances.variance=0.1".into(), "law.hi=3.0".into()];
        let c = Config::from_toml(BASE, &sets, FlagOverrides::default(), None).unwrap();
        assert_eq!(c.seed, 8);
        assert_eq!(c.tolerances.variance, 0.1);
        let flags = FlagOverrides { seed: Some(9), n: Some(64), paths: None };
        let c = Config::from_toml(BASE, &sets, flags, None).unwrap();
        assert_eq!((c.seed, c.n), (9, 64));
        let c = Config::from_toml(BASE, &sets, flags, Some("10")).unwrap();
        assert_eq!(c.seed, 10);
        assert!(Config::from_toml(BASE, &[], flags, Some("ten")).is_err());
    }

    #[test]
    fn set_accepts_inline_tables_and_bare_words() {
        let sets = vec!["law={type=\"constant\", theta=1.0471975511965976}".to_string(), "regime_override=critical".into()];
        let c = Config::from_toml(BASE, &sets, FlagOverrides::default(), None).unwrap();
        assert_eq!(c.regime_override, Some(Regime::Critical));
        assert!(matches!(c.law.unwrap().kind(), LawKind::Constant { .. }));
    }

    #[test]
    fn unknown_keys_and_bad_laws_are_errors() {
        assert!(Config::from_toml("colour = 3", &[], FlagOverrides::default(), None).is_err());
        let bad = "law = { type = \"discrete\", atoms = [[0.0, 0.5], [1.0, 0.4]] }";
        assert!(Config::from_toml(bad, &[], FlagOverrides::default(), None).is_err());
        assert!(Config::from_toml(BASE, &["novalue".into()], FlagOverrides::default(), None).is_err());
    }

    #[test]
    fn hash_tracks_effective_values() {
        let a = Config::from_toml(BASE, &[], FlagOverrides::default(), None).unwrap();
        let b = Config::from_toml(BASE, &[], FlagOverrides::default(), None).unwrap();
        let c = Config::from_toml(BASE, &["seed=1".into()], FlagOverrides::default(), None).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn lattice_supplies_the_law() {
        let c = Config::from_toml("[lattice]\np = 0.4\nq = 0.3\nr = 0.2\ns = 0.1\n", &[], FlagOverrides::default(), None).unwrap();
        let phi = c.law().unwrap().phi(1);
        assert!((phi.re - 0.2).abs() < 1e-15 && (phi.im - 0.2).abs() < 1e-15);
    }
}
