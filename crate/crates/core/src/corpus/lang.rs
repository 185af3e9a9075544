use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

const BUNDLED: &str = include_str!("../../data/languages.tsv");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("invalid language code {0:?}: expected 1-16 chars of [a-z0-9_-]")]
    InvalidCode(String),
    #[error("empty display name for language {0:?}")]
    EmptyName(String),
    #[error("language code {0:?} registered twice")]
    DuplicateCode(String),
    #[error("display name {name:?} used by both {first:?} and {second:?}")]
    DuplicateName {
        name: String,
        first: String,
        second: String,
    },
    #[error("unknown language code {0:?}")]
    Unknown(String),
    #[error("registry line {line}: expected `code<TAB>name`")]
    Malformed { line: usize },
    #[error("cannot read registry: {0}")]
    Read(String),
}

pub fn validate_code(code: &str) -> Result<(), RegistryError> {
    let ok = !code.is_empty()
        && code.len() <= 16
        && code
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-');
    if ok {
        Ok(())
    } else {
        Err(RegistryError::InvalidCode(code.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageTag {
    pub code: String,
    pub display_name: String,
}

impl LanguageTag {
    pub fn new(code: impl Into<String>, display_name: impl Into<String>) -> Result<Self, RegistryError> {
        let code = code.into();
        let display_name = display_name.into();
        validate_code(&code)?;
        if display_name.trim().is_empty() {
            return Err(RegistryError::EmptyName(code));
        }
        Ok(LanguageTag { code, display_name })
    }
}

/// Code → display-name table. Codes and names are both unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LanguageRegistry {
    names: BTreeMap<String, String>,
}

impl LanguageRegistry {
    /// The bundled table covering the American and North-East Indian
    /// languages plus English, Spanish and Portuguese.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled registry is valid")
    }

    pub fn from_tags(tags: impl IntoIterator<Item = LanguageTag>) -> Result<Self, RegistryError> {
        let mut reg = LanguageRegistry::default();
        for tag in tags {
            reg.insert(tag)?;
        }
        Ok(reg)
    }

    /// Parses `code<TAB>name` lines; `#` comments and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let mut reg = LanguageRegistry::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (code, name) = line
                .split_once('\t')
                .ok_or(RegistryError::Malformed { line: i + 1 })?;
            reg.insert(LanguageTag::new(code.trim(), name.trim())?)?;
        }
        Ok(reg)
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RegistryError::Read(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, tag: LanguageTag) -> Result<(), RegistryError> {
        if self.names.contains_key(&tag.code) {
            return Err(RegistryError::DuplicateCode(tag.code));
        }
        if let Some((first, _)) = self.names.iter().find(|(_, n)| **n == tag.display_name) {
            return Err(RegistryError::DuplicateName {
                name: tag.display_name,
                first: first.clone(),
                second: tag.code,
            });
        }
        self.names.insert(tag.code, tag.display_name);
        Ok(())
    }

    pub fn name(&self, code: &str) -> Result<&str, RegistryError> {
        self.names
            .get(code)
            .map(String::as_str)
            .ok_or_else(|| RegistryError::Unknown(code.to_string()))
    }

    pub fn contains(&self, code: &str) -> bool {
        self.names.contains_key(code)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = LanguageTag> + '_ {
        self.names.iter().map(|(c, n)| LanguageTag {
            code: c.clone(),
            display_name: n.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_rules() {
        assert!(validate_code("aym").is_ok());
        assert!(validate_code("zh_hant-2").is_ok());
        assert!(validate_code("").is_err());
        assert!(validate_code("Aym").is_err());
        assert!(validate_code("a b").is_err());
        assert!(validate_code(&"a".repeat(17)).is_err());
        assert!(validate_code(&"a".repeat(16)).is_ok());
    }

    #[test]
    fn bundled_registry() {
        let reg = LanguageRegistry::bundled();
        assert_eq!(reg.len(), 18);
        assert_eq!(reg.name("aym").unwrap(), "Aymara");
        assert_eq!(reg.name("lus").unwrap(), "Mizo");
        assert_eq!(reg.name("spa").unwrap(), "Spanish");
        assert!(matches!(reg.name("xyz"), Err(RegistryError::Unknown(_))));
    }

    #[test]
    fn names_are_unique() {
        let err = LanguageRegistry::parse("aaa\tX\nbbb\tX\n").unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateName { .. }));
        let err = LanguageRegistry::parse("aaa\tX\naaa\tY\n").unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateCode(_)));
        assert!(LanguageRegistry::parse("aaa X\n").is_err());
    }
}
