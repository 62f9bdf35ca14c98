use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered, duplicate-free phone symbols plus the CTC blank.
///
/// Class index 0 is the blank; symbol `i` maps to class `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct PhoneInventory {
    symbols: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl PhoneInventory {
    pub const BLANK: usize = 0;

    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::invalid("phone inventory is empty"));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!("invalid phone symbol {s:?}")));
            }
            if index.insert(s.clone(), i + 1).is_some() {
                return Err(Error::invalid(format!("duplicate phone symbol {s:?}")));
            }
        }
        Ok(Self { symbols, index })
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Number of phone symbols, excluding the blank.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Output width of a classifier over this inventory (symbols + blank).
    pub fn n_classes(&self) -> usize {
        self.symbols.len() + 1
    }

    pub fn class_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn symbol_of(&self, class: usize) -> Option<&str> {
        class
            .checked_sub(1)
            .and_then(|i| self.symbols.get(i))
            .map(String::as_str)
    }

    /// Class indices of every phone, failing on symbols outside the inventory.
    pub fn encode(&self, phones: &PhoneSequence) -> Result<Vec<usize>> {
        phones
            .iter()
            .map(|p| {
                self.class_of(p)
                    .ok_or_else(|| Error::invalid(format!("phone {p:?} is not in the inventory")))
            })
            .collect()
    }
}

impl TryFrom<Vec<String>> for PhoneInventory {
    type Error = Error;

    fn try_from(symbols: Vec<String>) -> Result<Self> {
        Self::new(symbols)
    }
}

impl From<PhoneInventory> for Vec<String> {
    fn from(inv: PhoneInventory) -> Self {
        inv.symbols
    }
}

/// An ordered transcript of phone symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhoneSequence(pub Vec<String>);

impl PhoneSequence {
    pub fn new<S: Into<String>>(phones: impl IntoIterator<Item = S>) -> Self {
        Self(phones.into_iter().map(Into::into).collect())
    }

    /// Whitespace-separated symbols, e.g. `"a m i s"`.
    pub fn parse(text: &str) -> Self {
        Self::new(text.split_whitespace())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl fmt::Display for PhoneSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blank_is_not_a_symbol() {
        let inv = PhoneInventory::new(["a", "b"]).unwrap();
        assert_eq!(inv.n_classes(), 3);
        assert_eq!(inv.class_of("a"), Some(1));
        assert_eq!(inv.symbol_of(PhoneInventory::BLANK), None);
        assert_eq!(inv.symbol_of(2), Some("b"));
    }

    #[test]
    fn rejects_duplicates_and_unknown() {
        assert!(PhoneInventory::new(["a", "a"]).is_err());
        let inv = PhoneInventory::new(["a"]).unwrap();
        assert!(inv.encode(&PhoneSequence::parse("a x")).is_err());
    }

    #[test]
    fn serde_is_a_symbol_list() {
        let inv = PhoneInventory::new(["a", "sh"]).unwrap();
        let json = serde_json::to_string(&inv).unwrap();
        assert_eq!(json, r#"["a","sh"]"#);
        let back: PhoneInventory = serde_json::from_str(&json).unwrap();
        assert_eq!(back.class_of("sh"), Some(2));
        assert!(serde_json::from_str::<PhoneInventory>(r#"["a","a"]"#).is_err());
    }
}
