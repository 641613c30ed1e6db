use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Vertex of the rooted dyadic tree, named by its path from the root.
/// The empty address is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicAddress(Vec<bool>);

impl DyadicAddress {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut v = self.0.clone();
        v.push(bit);
        Self(v)
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn parent(&self) -> Option<Self> {
        (!self.0.is_empty()).then(|| self.prefix(self.0.len() - 1))
    }

    /// All `2^n` addresses of length `n`, in lexicographic order.
    pub fn level(n: usize) -> Vec<Self> {
        (0..1u64 << n)
            .map(|i| Self((0..n).map(|b| i >> (n - 1 - b) & 1 == 1).collect()))
            .collect()
    }
}

impl fmt::Display for DyadicAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for DyadicAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "ε" || s.is_empty() {
            return Ok(Self::root());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad dyadic address `{s}`"))),
            })
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

impl Serialize for DyadicAddress {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyadicAddress {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
