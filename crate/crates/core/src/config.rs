//! Flat key-value configuration files with optional `[section]` headers.
//!
//! ```text
//! # comment
//! [problem]
//! n = 4096
//! roster = NESTA, NESTA+Ct, FISTA
//! ```
//!
//! Keys that appear before the first header belong to the unnamed section
//! `""`. Values are trimmed; list values are comma separated.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing section: [{0}]")]
    MissingSection(String),
    #[error("missing key: {0}")]
    MissingKey(String),
    #[error("invalid value for {key}: {value:?} ({reason})")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("unknown key: {0}")]
    UnknownKey(String),
    #[error("duplicate key: {0}")]
    DuplicateKey(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    name: String,
    entries: Vec<(String, String)>,
}

impl Section {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn qualified(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{}", self.name, key)
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn get_str(&self, key: &str) -> Result<&str, ConfigError> {
        self.raw(key)
            .ok_or_else(|| ConfigError::MissingKey(key.to_string()))
    }

    pub fn get<T>(&self, key: &str) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let raw = self.get_str(key)?;
        self.parse_value(key, raw)
    }

    pub fn get_or<T>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            Some(raw) => self.parse_value(key, raw),
            None => Ok(default),
        }
    }

    pub fn get_opt<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.raw(key).map(|raw| self.parse_value(key, raw)).transpose()
    }

    /// `key = auto` or a number.
    pub fn get_auto<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.get_str(key)? {
            v if v.eq_ignore_ascii_case("auto") => Ok(None),
            v => self.parse_value(key, v).map(Some),
        }
    }

    pub fn get_list<T>(&self, key: &str) -> Result<Vec<T>, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.get_str(key)?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.parse_value(key, s))
            .collect()
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(ConfigError::InvalidValue {
                    key: self.qualified(key),
                    value: v.to_string(),
                    reason: "expected true or false".into(),
                }),
            },
        }
    }

    /// Rejects keys outside `allowed`.
    pub fn ensure_only(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(ConfigError::UnknownKey(self.qualified(k))),
            None => Ok(()),
        }
    }

    fn parse_value<T>(&self, key: &str, raw: &str) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        raw.parse::<T>().map_err(|e| ConfigError::InvalidValue {
            key: self.qualified(key),
            value: raw.to_string(),
            reason: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    sections: Vec<Section>,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        text.parse()
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Section, ConfigError> {
        self.section(name)
            .ok_or_else(|| ConfigError::MissingSection(name.to_string()))
    }

    /// The named section, or an empty one.
    pub fn section_or_empty(&self, name: &str) -> Section {
        self.section(name).cloned().unwrap_or_else(|| Section {
            name: name.to_string(),
            entries: Vec::new(),
        })
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    /// Rejects sections outside `allowed`.
    pub fn ensure_sections(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for s in &self.sections {
            if !allowed.contains(&s.name.as_str()) && !(s.name.is_empty() && s.entries.is_empty()) {
                return Err(ConfigError::UnknownKey(format!("[{}]", s.name)));
            }
        }
        Ok(())
    }

    /// Sets `section.key = value`, adding the section if needed.
    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        let value = value.into();
        let sec = match self.sections.iter_mut().position(|s| s.name == section) {
            Some(i) => &mut self.sections[i],
            None => {
                self.sections.push(Section {
                    name: section.to_string(),
                    entries: Vec::new(),
                });
                self.sections.last_mut().unwrap()
            }
        };
        match sec.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => sec.entries.push((key.to_string(), value)),
        }
    }
}

impl FromStr for Config {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut sections = vec![Section::default()];
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                let name = name.trim();
                if sections.iter().any(|s| s.name == name) {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: format!("section [{name}] repeated"),
                    });
                }
                sections.push(Section {
                    name: name.to_string(),
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            let sec = sections.last_mut().unwrap();
            if sec.contains(key) {
                return Err(ConfigError::DuplicateKey(sec.qualified(key)));
            }
            sec.entries.push((key.to_string(), value.trim().to_string()));
        }
        Ok(Config { sections })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
top = 1
# comment line
[problem]
n = 4096   # trailing comment
epsilon = auto
roster = NESTA, NESTA+Ct , FISTA

[solver]
mu = 0.02
";

    #[test]
    fn parses_sections_and_values() {
        let c: Config = SAMPLE.parse().unwrap();
        assert_eq!(c.section("").unwrap().get::<i32>("top").unwrap(), 1);
        let p = c.require("problem").unwrap();
        assert_eq!(p.get::<usize>("n").unwrap(), 4096);
        assert_eq!(p.get_auto::<f64>("epsilon").unwrap(), None);
        assert_eq!(
            p.get_list::<String>("roster").unwrap(),
            vec!["NESTA", "NESTA+Ct", "FISTA"]
        );
        assert_eq!(c.require("solver").unwrap().get::<f64>("mu").unwrap(), 0.02);
    }

    #[test]
    fn missing_key_message_names_key() {
        let c: Config = SAMPLE.parse().unwrap();
        let err = c.require("solver").unwrap().get::<f64>("epsilon").unwrap_err();
        assert_eq!(err.to_string(), "missing key: epsilon");
    }

    #[test]
    fn invalid_value_names_qualified_key() {
        let c: Config = "[solver]\nmu = abc\n".parse().unwrap();
        let err = c.require("solver").unwrap().get::<f64>("mu").unwrap_err();
        assert!(err.to_string().contains("solver.mu"));
    }

    #[test]
    fn rejects_bad_lines_and_duplicates() {
        assert!(matches!(
            "[a\n".parse::<Config>(),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            "x\n".parse::<Config>(),
            Err(ConfigError::Syntax { .. })
        ));
        assert!(matches!(
            "[a]\nk=1\nk=2\n".parse::<Config>(),
            Err(ConfigError::DuplicateKey(_))
        ));
    }

    #[test]
    fn unknown_keys_are_reported() {
        let c: Config = "[s]\na = 1\nb = 2\n".parse().unwrap();
        let err = c.require("s").unwrap().ensure_only(&["a"]).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey("s.b".into()));
    }

    #[test]
    fn set_overrides() {
        let mut c: Config = "[s]\na = 1\n".parse().unwrap();
        c.set("s", "a", "2");
        c.set("t", "b", "3");
        assert_eq!(c.require("s").unwrap().get::<i32>("a").unwrap(), 2);
        assert_eq!(c.require("t").unwrap().get::<i32>("b").unwrap(), 3);
    }
}
