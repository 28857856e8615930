//! Optional key/value configuration file with one section per subcommand
//! plus `[global]`. Explicit command-line flags always win; the file only
//! fills flags the user left unset. See `docs/config.example.toml` for a
//! complete annotated example.

use std::path::Path;

use crate::error::CliError;

pub struct ConfigFile {
    root: toml::Table,
}

impl ConfigFile {
    pub fn empty() -> Self {
        ConfigFile {
            root: toml::Table::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
        let root: toml::Table = text
            .parse()
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Ok(ConfigFile { root })
    }

    fn raw(&self, section: &str, key: &str) -> Option<&toml::Value> {
        self.root.get(section)?.as_table()?.get(key)
    }

    pub fn get<T: FromToml>(&self, section: &str, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => T::from_toml(v).map(Some).ok_or_else(|| {
                CliError::Data(format!(
                    "config [{section}] {key}: cannot interpret {v} as {}",
                    std::any::type_name::<T>()
                ))
            }),
        }
    }
}

/// Resolve an option: explicit flag, then config value, then default.
pub fn resolve<T>(flag: Option<T>, file: Result<Option<T>, CliError>, default: T) -> Result<T, CliError> {
    Ok(flag.or(file?).unwrap_or(default))
}

/// Resolve an option that has no default and may stay unset.
pub fn resolve_opt<T>(flag: Option<T>, file: Result<Option<T>, CliError>) -> Result<Option<T>, CliError> {
    Ok(flag.or(file?))
}

pub trait FromToml: Sized {
    fn from_toml(v: &toml::Value) -> Option<Self>;
}

impl FromToml for u64 {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| u64::try_from(i).ok())
    }
}

impl FromToml for usize {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| usize::try_from(i).ok())
    }
}

impl FromToml for f64 {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
    }
}

impl FromToml for bool {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_bool()
    }
}

impl FromToml for String {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_str().map(str::to_owned)
    }
}
