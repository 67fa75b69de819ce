//! Declarative JSON documents describing groups.
//!
//! ```json
//! {"kind": "permutation", "degree": 3, "generators": [[2, 1, 3], [2, 3, 1]]}
//! {"kind": "table", "order": 2, "table": [0, 1, 1, 0]}
//! {"kind": "wreath", "base": {"kind": "cyclic", "n": 3}, "top": {"kind": "catalog", "name": "S3"}}
//! ```
//!
//! Permutations are one-line images on `1..degree`; Cayley tables are
//! row-major arrays of 0-based indices.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{catalog, CayleyTable, Extension, Group, GroupError, Perm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDoc {
    Catalog {
        name: String,
    },
    Cyclic {
        n: u64,
    },
    FreeAbelian {
        rank: usize,
    },
    Permutation {
        degree: usize,
        generators: Vec<Vec<u32>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Table {
        order: usize,
        table: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    AbelianByFinite {
        rank: usize,
        finite: Box<GroupDoc>,
        /// One `rank × rank` matrix per element of `finite`, canonical order.
        action: Vec<Vec<Vec<i64>>>,
        /// `cocycle[i][j]`; omitted for split extensions.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cocycle: Option<Vec<Vec<Vec<i64>>>>,
    },
    Wreath {
        base: Box<GroupDoc>,
        top: Box<GroupDoc>,
    },
}

impl GroupDoc {
    pub fn parse(text: &str) -> Result<GroupDoc, GroupError> {
        serde_json::from_str(text).map_err(|e| GroupError::Document(e.to_string()))
    }

    /// Interprets a CLI `--group` argument: a JSON document if it looks like
    /// one, otherwise a catalog name.
    pub fn from_argument(arg: &str) -> Result<GroupDoc, GroupError> {
        let trimmed = arg.trim_start();
        if trimmed.starts_with('{') {
            GroupDoc::parse(trimmed)
        } else {
            catalog::get(arg)?;
            Ok(GroupDoc::Catalog { name: arg.to_string() })
        }
    }

    pub fn build(&self) -> Result<Arc<Group>, GroupError> {
        Ok(match self {
            GroupDoc::Catalog { name } => catalog::get(name)?,
            GroupDoc::Cyclic { n } => Group::cyclic(*n),
            GroupDoc::FreeAbelian { rank } => {
                if *rank == 0 {
                    return Err(GroupError::Document("free abelian rank must be positive".into()));
                }
                Group::free_abelian(*rank)
            }
            GroupDoc::Permutation { degree, generators, name } => {
                let gens = generators
                    .iter()
                    .map(|g| Perm::from_one_line(g))
                    .collect::<Result<Vec<_>, _>>()?;
                let g = Group::permutation(*degree, gens)?;
                match name {
                    Some(n) => g.with_name(n.clone()),
                    None => g,
                }
            }
            GroupDoc::Table { order, table, name } => {
                let g = Group::table(CayleyTable::new(*order, table.clone())?);
                match name {
                    Some(n) => g.with_name(n.clone()),
                    None => g,
                }
            }
            GroupDoc::AbelianByFinite { rank, finite, action, cocycle } => {
                let h = finite.build()?;
                if !h.is_finite() {
                    return Err(GroupError::Document("extension quotient must be finite".into()));
                }
                let ext = match cocycle {
                    None => Extension::split(*rank, h, action.clone())?,
                    Some(c) => {
                        let c = c
                            .iter()
                            .map(|row| {
                                row.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect()
                            })
                            .collect();
                        Extension::new(*rank, h, action.clone(), c)?
                    }
                };
                Group::abelian_by_finite(ext)
            }
            GroupDoc::Wreath { base, top } => Group::wreath(base.build()?, top.build()?)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_permutation_document() {
        let doc = GroupDoc::parse(r#"{"kind":"permutation","degree":3,"generators":[[2,1,3],[2,3,1]]}"#).unwrap();
        assert_eq!(doc.build().unwrap().finite_order().unwrap(), 6);
    }

    #[test]
    fn parses_nested_wreath() {
        let doc = GroupDoc::parse(
            r#"{"kind":"wreath","base":{"kind":"cyclic","n":3},"top":{"kind":"catalog","name":"Z2"}}"#,
        )
        .unwrap();
        assert_eq!(doc.build().unwrap().finite_order().unwrap(), 18);
    }

    #[test]
    fn table_document_is_validated() {
        let bad = GroupDoc::parse(r#"{"kind":"table","order":2,"table":[0,1,1,1]}"#).unwrap();
        assert!(matches!(bad.build(), Err(GroupError::InvalidTable(_))));
    }

    #[test]
    fn extension_document() {
        let doc = GroupDoc::parse(
            r#"{"kind":"abelian_by_finite","rank":1,"finite":{"kind":"cyclic","n":2},
                "action":[[[1]],[[1]]],"cocycle":[[[0],[0]],[[0],[1]]]}"#,
        )
        .unwrap();
        let g = doc.build().unwrap();
        assert!(!g.is_finite());
    }

    #[test]
    fn argument_falls_back_to_catalog() {
        assert_eq!(GroupDoc::from_argument("S3").unwrap(), GroupDoc::Catalog { name: "S3".into() });
        assert!(GroupDoc::from_argument("nope").is_err());
    }
}
