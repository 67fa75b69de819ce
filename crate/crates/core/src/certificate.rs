//! Replayable records of a construction chain and its verified checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const FORMAT: &str = "corkcalc-certificate/1";

/// A named assertion together with the range it was verified on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub range: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, range: impl Into<String>) -> Check {
        Check { name: name.into(), range: range.into(), passed: true, witness: None, detail: None }
    }

    pub fn fail(name: impl Into<String>, range: impl Into<String>, witness: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            range: range.into(),
            passed: false,
            witness: Some(witness.into()),
            detail: None,
        }
    }

    pub fn from_outcome(name: impl Into<String>, range: impl Into<String>, witness: Option<String>) -> Check {
        match witness {
            None => Check::pass(name, range),
            Some(w) => Check::fail(name, range, w),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }
}

/// One step of a construction chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub op: String,
    pub params: BTreeMap<String, Value>,
    /// What licenses the step: a construction or a cited theorem.
    pub provenance: String,
}

impl ChainRecord {
    pub fn new(op: impl Into<String>, provenance: impl Into<String>) -> ChainRecord {
        ChainRecord { op: op.into(), params: BTreeMap::new(), provenance: provenance.into() }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> ChainRecord {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub versions: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request: Option<Value>,
    pub chain: Vec<ChainRecord>,
    pub checks: Vec<Check>,
    pub axioms: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, Value>,
    /// Seconds since the Unix epoch; replays reuse it.
    #[serde(default)]
    pub timestamp: u64,
    /// SHA-256 of the serialized certificate without this field, filled in
    /// by [`Certificate::to_json`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
}

impl Default for Certificate {
    fn default() -> Certificate {
        Certificate::new()
    }
}

impl Certificate {
    pub fn new() -> Certificate {
        let mut versions = BTreeMap::new();
        versions.insert("corkcalc".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Certificate {
            format: FORMAT.to_string(),
            versions,
            request: None,
            chain: Vec::new(),
            checks: Vec::new(),
            axioms: Vec::new(),
            data: BTreeMap::new(),
            timestamp: 0,
            digest: None,
        }
    }

    pub fn single(record: ChainRecord, checks: Vec<Check>) -> Certificate {
        let mut c = Certificate::new();
        c.chain.push(record);
        c.checks = checks;
        c
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn add_axiom(&mut self, axiom: impl Into<String>) {
        let a = axiom.into();
        if !self.axioms.contains(&a) {
            self.axioms.push(a);
        }
    }

    /// Appends another certificate's chain, checks and axioms.
    pub fn absorb(&mut self, other: Certificate) {
        self.chain.extend(other.chain);
        self.checks.extend(other.checks);
        for a in other.axioms {
            self.add_axiom(a);
        }
        self.data.extend(other.data);
    }

    /// Pretty JSON with a fresh content digest.
    pub fn to_json(&self) -> String {
        let mut sealed = self.clone();
        sealed.digest = Some(self.content_digest());
        let mut s = serde_json::to_string_pretty(&sealed).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of the certificate serialized without its digest.
    pub fn content_digest(&self) -> String {
        let body = Certificate { digest: None, ..self.clone() };
        let bytes = serde_json::to_vec(&body).expect("certificate serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json(text: &str) -> Result<Certificate, serde_json::Error> {
        serde_json::from_str(text)
    }
}
