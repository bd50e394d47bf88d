//! Canned runs for every figure panel, shipped as `manifest/figures.toml`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::config::{Command, RunConfig};
use crate::CliError;

const BUILTIN: &str = include_str!("../manifest/figures.toml");

/// Version of the manifest format this build reads.
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub figures: BTreeMap<String, RunConfig>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let m: Manifest = toml::from_str(text).map_err(|e| CliError::Config(format!("manifest: {e}")))?;
        if m.version != MANIFEST_VERSION {
            return Err(CliError::Config(format!("manifest version {} unsupported (expected {MANIFEST_VERSION})", m.version)));
        }
        for (id, cfg) in &m.figures {
            if cfg.command == Command::Figure || cfg.figure.is_some() {
                return Err(CliError::Config(format!("manifest entry {id} must name a concrete command")));
            }
        }
        Ok(m)
    }

    pub fn builtin() -> Result<Self, CliError> {
        Self::parse(BUILTIN)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.figures.keys().map(String::as_str)
    }

    /// The entry for `id`, tagged with the id.
    pub fn resolve(&self, id: &str) -> Result<RunConfig, CliError> {
        let mut cfg = self
            .figures
            .get(id)
            .cloned()
            .ok_or_else(|| CliError::Config(format!("unknown figure id `{id}` (see `lzsm figure --list`)")))?;
        cfg.figure = Some(id.to_string());
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses_and_resolves() {
        let m = Manifest::builtin().unwrap();
        let cfg = m.resolve("fig3a").unwrap();
        assert_eq!(cfg.command, Command::Region);
        assert_eq!(cfg.stem(), "fig3a");
        assert!(m.resolve("fig99").is_err());
    }

    #[test]
    fn version_is_checked() {
        let err = Manifest::parse("version = 2\n[figures]\n").unwrap_err().to_string();
        assert!(err.contains("version 2"), "{err}");
    }

    #[test]
    fn nested_figure_entries_are_rejected() {
        let text = "version = 1\n[figures.x]\ncommand = \"figure\"\nfigure = \"fig1a\"\n";
        assert!(Manifest::parse(text).is_err());
    }
}
