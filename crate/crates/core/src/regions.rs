//! Region registry: the autonomous communities, the two autonomous cities
//! and the national aggregate, keyed by two-letter code.
//!
//! The registry ships as an embedded data file so feeds can be validated
//! against a fixed code list.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const REGISTRY_CSV: &str = include_str!("../data/regions.csv");

/// Code of the national aggregate.
pub const NATIONAL: &str = "ES";

/// A region code such as `CB` or the national aggregate `ES`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionCode(String);

impl RegionCode {
    pub fn new(code: impl Into<String>) -> Self {
        Self(code.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_national(&self) -> bool {
        self.0 == NATIONAL
    }
}

impl std::fmt::Display for RegionCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RegionCode {
    fn from(code: &str) -> Self {
        Self::new(code)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Community,
    City,
    National,
}

#[derive(Debug, Clone)]
pub struct RegionInfo {
    pub code: RegionCode,
    pub name: String,
    pub kind: RegionKind,
}

/// Fixed lookup table of all known regions.
#[derive(Debug)]
pub struct RegionRegistry {
    regions: BTreeMap<String, RegionInfo>,
}

impl RegionRegistry {
    /// The registry bundled with the crate.
    pub fn bundled() -> &'static RegionRegistry {
        static REGISTRY: OnceLock<RegionRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| RegionRegistry::parse(REGISTRY_CSV))
    }

    fn parse(csv: &str) -> Self {
        let mut regions = BTreeMap::new();
        for line in csv.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split(',');
            let code = parts.next().expect("code field").trim();
            let name = parts.next().expect("name field").trim();
            let kind = match parts.next().expect("kind field").trim() {
                "community" => RegionKind::Community,
                "city" => RegionKind::City,
                "national" => RegionKind::National,
                other => panic!("unknown region kind {other:?} in bundled registry"),
            };
            regions.insert(
                code.to_string(),
                RegionInfo {
                    code: RegionCode::new(code),
                    name: name.to_string(),
                    kind,
                },
            );
        }
        Self { regions }
    }

    pub fn get(&self, code: &RegionCode) -> Option<&RegionInfo> {
        self.regions.get(code.as_str())
    }

    pub fn is_known(&self, code: &RegionCode) -> bool {
        self.regions.contains_key(code.as_str())
    }

    /// All region codes, sorted, excluding the national aggregate.
    pub fn reporting_regions(&self) -> impl Iterator<Item = &RegionInfo> {
        self.regions
            .values()
            .filter(|r| !matches!(r.kind, RegionKind::National))
    }

    /// The autonomous communities: the units entering national mobility and
    /// weather aggregates (cities count only towards national case totals).
    pub fn communities(&self) -> impl Iterator<Item = &RegionInfo> {
        self.regions
            .values()
            .filter(|r| matches!(r.kind, RegionKind::Community))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_registry_shape() {
        let reg = RegionRegistry::bundled();
        assert_eq!(reg.communities().count(), 17);
        assert_eq!(reg.reporting_regions().count(), 19);
        assert!(reg.is_known(&"CB".into()));
        assert!(reg.is_known(&"ES".into()));
        assert!(!reg.is_known(&"XX".into()));
        assert_eq!(reg.get(&"CE".into()).unwrap().kind, RegionKind::City);
    }
}
