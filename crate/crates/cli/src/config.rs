//! Job configuration: command-line flags layered over an optional TOML file.

use std::collections::BTreeMap;
use std::path::Path;

use reflekt_core::cartan::{parse_tau, DatumKind};
use reflekt_core::reps::{parse_spin, spin_label};
use reflekt_core::{Scalar, Var};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("bad config file: {0}")]
    Parse(String),
    #[error("invalid value for {key}: {msg}")]
    Invalid { key: String, msg: String },
}

fn invalid(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        msg: msg.into(),
    }
}

/// Sections of the config file. Every field is optional; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub datum: DatumSection,
    #[serde(default)]
    pub modules: ModuleSection,
    /// Rational bindings for declared parameters, e.g. `xi = "3/7"`.
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSection {
    pub kind: Option<String>,
    pub tau: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSection {
    pub spin: Option<String>,
    pub aux_spin: Option<String>,
    pub sites: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Format, ConfigError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(invalid("format", format!("{s:?} is not text or json"))),
        }
    }
}

/// Everything a job needs, fully resolved.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub model: DatumKind,
    pub tau: Vec<usize>,
    pub tau_text: String,
    pub two_j: usize,
    pub aux_two_j: usize,
    pub sites: usize,
    pub seed: u64,
    pub format: Format,
    pub bindings: Vec<(Var, Scalar)>,
}

/// Raw values gathered from flags before merging.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub model: Option<String>,
    pub tau: Option<String>,
    pub spin: Option<String>,
    pub aux_spin: Option<String>,
    pub sites: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub specialize: Option<String>,
}

/// `k=v,k=v` into ordered pairs.
pub fn parse_specialize(s: &str) -> Result<Vec<(String, String)>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| invalid("specialize", format!("{kv:?} is not key=value")))
        })
        .collect()
}

fn bind(pairs: &[(String, String)]) -> Result<Vec<(Var, Scalar)>, ConfigError> {
    let mut out: Vec<(Var, Scalar)> = Vec::new();
    for (k, v) in pairs {
        let var = Var::lookup(k).ok_or_else(|| invalid(k, "undeclared variable"))?;
        let x: Scalar = v.parse().map_err(|e| invalid(k, format!("{e}")))?;
        if !x.is_constant() {
            return Err(invalid(k, "binding must be a rational number"));
        }
        out.retain(|(w, _)| *w != var);
        out.push((var, x));
    }
    out.sort_by_key(|(v, _)| v.index());
    Ok(out)
}

impl JobConfig {
    pub fn resolve(file: FileConfig, o: Overrides) -> Result<JobConfig, ConfigError> {
        let model_text = o
            .model
            .or(file.datum.kind)
            .unwrap_or_else(|| "a1-affine".into());
        let model: DatumKind = model_text
            .parse()
            .map_err(|e: reflekt_core::cartan::CartanError| invalid("model", e.to_string()))?;
        let nodes = match model {
            DatumKind::A1 => 1,
            DatumKind::A1Affine => 2,
        };
        let tau_text = o.tau.or(file.datum.tau).unwrap_or_else(|| match model {
            DatumKind::A1 => "id".into(),
            DatumKind::A1Affine => "(0 1)".into(),
        });
        let tau = parse_tau(&tau_text, nodes).map_err(|e| invalid("tau", e.to_string()))?;
        let spin = |key: &str, s: Option<String>| -> Result<usize, ConfigError> {
            parse_spin(s.as_deref().unwrap_or("1/2")).map_err(|e| invalid(key, e.to_string()))
        };
        let two_j = spin("spin", o.spin.or(file.modules.spin))?;
        let aux_two_j = spin("aux-spin", o.aux_spin.or(file.modules.aux_spin))?;
        let sites = o.sites.or(file.modules.sites).unwrap_or(2);
        let format = o
            .format
            .or(file.run.format)
            .as_deref()
            .unwrap_or("text")
            .parse()?;
        let mut pairs: Vec<(String, String)> = file.parameters.into_iter().collect();
        if let Some(s) = o.specialize {
            pairs.extend(parse_specialize(&s)?);
        }
        Ok(JobConfig {
            model,
            tau,
            tau_text,
            two_j,
            aux_two_j,
            sites,
            seed: o.seed.or(file.run.seed).unwrap_or(1),
            format,
            bindings: bind(&pairs)?,
        })
    }

    pub fn echo(&self, verb: &str, suites: &[String], hamiltonian: bool) -> ConfigEcho {
        ConfigEcho {
            verb: verb.into(),
            suites: suites.to_vec(),
            model: self.model.to_string(),
            tau: self.tau_text.clone(),
            spin: spin_label(self.two_j),
            aux_spin: spin_label(self.aux_two_j),
            sites: self.sites,
            seed: self.seed,
            specialize: self
                .bindings
                .iter()
                .map(|(v, x)| (v.name(), x.to_string()))
                .collect(),
            hamiltonian,
        }
    }
}

/// The resolved configuration as written into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub verb: String,
    pub suites: Vec<String>,
    pub model: String,
    pub tau: String,
    pub spin: String,
    pub aux_spin: String,
    pub sites: usize,
    pub seed: u64,
    pub specialize: BTreeMap<String, String>,
    pub hamiltonian: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str(
            "[datum]\nkind = \"a1\"\n[modules]\nspin = \"1\"\n[parameters]\nxi = \"3/7\"\n",
        )
        .unwrap();
        let o = Overrides {
            spin: Some("3/2".into()),
            specialize: Some("xi=2, v=5".into()),
            ..Overrides::default()
        };
        let c = JobConfig::resolve(file, o).unwrap();
        assert_eq!(c.model, DatumKind::A1);
        assert_eq!(c.two_j, 3);
        assert_eq!(c.bindings.len(), 2);
        assert_eq!(c.bindings[1], (Var::XI, Scalar::from_int(2)));
    }

    #[test]
    fn rejects_undeclared_and_symbolic_bindings() {
        let o = |s: &str| Overrides {
            specialize: Some(s.into()),
            ..Overrides::default()
        };
        assert!(JobConfig::resolve(FileConfig::default(), o("nope=1")).is_err());
        assert!(JobConfig::resolve(FileConfig::default(), o("xi=v")).is_err());
        assert!(JobConfig::resolve(FileConfig::default(), o("xi")).is_err());
    }

    #[test]
    fn unknown_section_is_an_error() {
        assert!(toml::from_str::<FileConfig>("[bogus]\nx = 1\n").is_err());
    }
}
