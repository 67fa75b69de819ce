//! Rooted slot-trees. A cell has ordered slots; each slot is open (a leaf of
//! the composite block) or glued to the root of another cell.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::BlockError;

/// A leaf address: slot indices from the root, 1-based for finite cells and
/// integers for countably-infinite cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafAddr(pub Vec<i64>);

impl LeafAddr {
    pub fn new(path: &[i64]) -> LeafAddr {
        LeafAddr(path.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn split_at(&self, k: usize) -> (LeafAddr, LeafAddr) {
        (LeafAddr(self.0[..k].to_vec()), LeafAddr(self.0[k..].to_vec()))
    }

    pub fn join(&self, tail: &LeafAddr) -> LeafAddr {
        let mut v = self.0.clone();
        v.extend_from_slice(&tail.0);
        LeafAddr(v)
    }
}

impl fmt::Display for LeafAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A possibly infinite count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Count {
    Finite(BigUint),
    Infinite,
}

impl Count {
    fn zero() -> Count {
        Count::Finite(BigUint::zero())
    }

    fn one() -> Count {
        Count::Finite(BigUint::one())
    }

    fn add(&self, other: &Count) -> Count {
        match (self, other) {
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a + b),
            _ => Count::Infinite,
        }
    }

    fn times(&self, k: usize) -> Count {
        match self {
            Count::Finite(a) => Count::Finite(a * BigUint::from(k)),
            Count::Infinite => Count::Infinite,
        }
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Count::Finite(a) => Some(a),
            Count::Infinite => None,
        }
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.finite().and_then(|a| a.to_usize())
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(a) => write!(f, "{a}"),
            Count::Infinite => write!(f, "countably infinite"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slots {
    Finite(u32),
    /// Slots indexed by the integers.
    Integers,
}

#[derive(Debug)]
pub struct Cell {
    name: String,
    slots: Slots,
    children: BTreeMap<i64, Arc<Cell>>,
    /// Child glued into every slot not listed in `children`.
    fill: Option<Arc<Cell>>,
    leaves: Count,
    cells: Count,
    depth: Option<usize>,
}

impl Cell {
    fn build(name: String, slots: Slots, children: BTreeMap<i64, Arc<Cell>>, fill: Option<Arc<Cell>>) -> Arc<Cell> {
        let (leaves, cells, depth) = match slots {
            Slots::Finite(n) => {
                let listed = children.len();
                let rest = n as usize - listed;
                let mut leaves = Count::zero();
                let mut cells = Count::one();
                let mut depths = Vec::new();
                for c in children.values() {
                    leaves = leaves.add(&c.leaves);
                    cells = cells.add(&c.cells);
                    depths.push(c.depth.map(|d| d + 1));
                }
                match &fill {
                    Some(f) => {
                        leaves = leaves.add(&f.leaves.times(rest));
                        cells = cells.add(&f.cells.times(rest));
                        if rest > 0 {
                            depths.push(f.depth.map(|d| d + 1));
                        }
                    }
                    None => {
                        leaves = leaves.add(&Count::Finite(BigUint::from(rest)));
                        if rest > 0 {
                            depths.push(Some(1));
                        }
                    }
                }
                (leaves, cells, uniform(&depths))
            }
            Slots::Integers => {
                let cells = match &fill {
                    Some(_) => Count::Infinite,
                    None => children.values().fold(Count::one(), |acc, c| acc.add(&c.cells)),
                };
                let mut depths: Vec<Option<usize>> = children.values().map(|c| c.depth.map(|d| d + 1)).collect();
                depths.push(fill.as_ref().map_or(Some(1), |f| f.depth.map(|d| d + 1)));
                (Count::Infinite, cells, uniform(&depths))
            }
        };
        Arc::new(Cell { name, slots, children, fill, leaves, cells, depth })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn slots(&self) -> Slots {
        self.slots
    }

    pub fn has_slot(&self, s: i64) -> bool {
        match self.slots {
            Slots::Finite(n) => (1..=n as i64).contains(&s),
            Slots::Integers => true,
        }
    }

    pub fn child(&self, s: i64) -> Option<&Arc<Cell>> {
        self.children.get(&s).or(self.fill.as_ref())
    }
}

fn uniform(depths: &[Option<usize>]) -> Option<usize> {
    let first = (*depths.first()?)?;
    depths.iter().all(|d| *d == Some(first)).then_some(first)
}

/// A composite block: a rooted tree of cells. The root's parent slot is the
/// block's distinguished ε slot and is not a leaf.
#[derive(Clone, Debug)]
pub struct Block {
    root: Arc<Cell>,
}

/// Largest leaf list materialized by [`Block::leaves`].
pub const LEAF_ENUM_CAP: usize = 1 << 16;

impl Block {
    /// A single cell with all slots open.
    pub fn cell(name: impl Into<String>, slots: Slots) -> Block {
        Block { root: Cell::build(name.into(), slots, BTreeMap::new(), None) }
    }

    pub fn root(&self) -> &Arc<Cell> {
        &self.root
    }

    pub fn leaf_count(&self) -> &Count {
        &self.root.leaves
    }

    pub fn cell_count(&self) -> &Count {
        &self.root.cells
    }

    /// Common depth of all leaves, if they share one.
    pub fn uniform_depth(&self) -> Option<usize> {
        self.root.depth
    }

    pub fn is_leaf(&self, addr: &LeafAddr) -> bool {
        let mut cell = &self.root;
        for (k, &s) in addr.0.iter().enumerate() {
            if !cell.has_slot(s) {
                return false;
            }
            match cell.child(s) {
                Some(c) => cell = c,
                None => return k + 1 == addr.len(),
            }
        }
        false
    }

    /// All leaves in lexicographic order of their addresses.
    pub fn leaves(&self) -> Result<Vec<LeafAddr>, BlockError> {
        match self.leaf_count().to_usize() {
            Some(n) if n <= LEAF_ENUM_CAP => {}
            _ => return Err(BlockError::TooManyLeaves(self.leaf_count().to_string())),
        }
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        collect_leaves(&self.root, &mut prefix, &mut out);
        Ok(out)
    }

    /// Glues `inner`'s root into the open slot `slot`.
    pub fn glue(&self, slot: &LeafAddr, inner: &Block) -> Result<Block, BlockError> {
        if slot.is_empty() {
            return Err(BlockError::NotALeaf(slot.to_string()));
        }
        let root = glue_at(&self.root, &slot.0, &inner.root, slot)?;
        Ok(Block { root })
    }

    /// Glues a copy of `inner` into every leaf.
    pub fn fill_leaves(&self, inner: &Block) -> Block {
        let mut memo = HashMap::new();
        Block { root: fill_cell(&self.root, &inner.root, &mut memo) }
    }

    /// Cell-table document; shared cells appear once.
    pub fn to_document(&self) -> Value {
        let mut ids: HashMap<*const Cell, usize> = HashMap::new();
        let mut table = Vec::new();
        let root = document_cell(&self.root, &mut ids, &mut table);
        json!({ "root": root, "cells": table, "leaves": self.leaf_count().to_string() })
    }

    pub fn from_document(doc: &Value) -> Result<Block, BlockError> {
        let bad = |m: &str| BlockError::Document(m.to_string());
        let cells = doc.get("cells").and_then(Value::as_array).ok_or_else(|| bad("missing cells"))?;
        let mut built: Vec<Option<Arc<Cell>>> = vec![None; cells.len()];
        // children always precede parents in the table
        for (i, c) in cells.iter().enumerate() {
            let name = c.get("name").and_then(Value::as_str).ok_or_else(|| bad("cell name"))?;
            let slots = match c.get("slots") {
                Some(Value::String(s)) if s == "Z" => Slots::Integers,
                Some(v) => Slots::Finite(v.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| bad("slot count"))?),
                None => return Err(bad("slot count")),
            };
            let lookup = |v: &Value| -> Result<Arc<Cell>, BlockError> {
                let id = v.as_u64().ok_or_else(|| bad("cell id"))? as usize;
                built.get(id).cloned().flatten().ok_or_else(|| bad("forward cell reference"))
            };
            let mut children = BTreeMap::new();
            if let Some(g) = c.get("glued").and_then(Value::as_object) {
                for (k, v) in g {
                    let s: i64 = k.parse().map_err(|_| bad("slot key"))?;
                    children.insert(s, lookup(v)?);
                }
            }
            let fill = c.get("fill").map(lookup).transpose()?;
            built[i] = Some(Cell::build(name.to_string(), slots, children, fill));
        }
        let root = doc.get("root").and_then(Value::as_u64).ok_or_else(|| bad("root id"))? as usize;
        let root = built.get(root).cloned().flatten().ok_or_else(|| bad("root id"))?;
        Ok(Block { root })
    }
}

fn collect_leaves(cell: &Cell, prefix: &mut Vec<i64>, out: &mut Vec<LeafAddr>) {
    let Slots::Finite(n) = cell.slots else { unreachable!("finite leaf count") };
    for s in 1..=n as i64 {
        prefix.push(s);
        match cell.child(s) {
            Some(c) => collect_leaves(c, prefix, out),
            None => out.push(LeafAddr(prefix.clone())),
        }
        prefix.pop();
    }
}

fn glue_at(cell: &Arc<Cell>, path: &[i64], inner: &Arc<Cell>, full: &LeafAddr) -> Result<Arc<Cell>, BlockError> {
    let s = path[0];
    if !cell.has_slot(s) {
        return Err(BlockError::NotALeaf(full.to_string()));
    }
    let mut children = cell.children.clone();
    if path.len() == 1 {
        if cell.child(s).is_some() {
            return Err(BlockError::SlotNotOpen(full.to_string()));
        }
        children.insert(s, inner.clone());
    } else {
        let child = cell.child(s).ok_or_else(|| BlockError::NotALeaf(full.to_string()))?;
        children.insert(s, glue_at(child, &path[1..], inner, full)?);
    }
    Ok(Cell::build(cell.name.clone(), cell.slots, children, cell.fill.clone()))
}

fn fill_cell(cell: &Arc<Cell>, inner: &Arc<Cell>, memo: &mut HashMap<*const Cell, Arc<Cell>>) -> Arc<Cell> {
    if let Some(done) = memo.get(&Arc::as_ptr(cell)) {
        return done.clone();
    }
    let children = cell.children.iter().map(|(k, c)| (*k, fill_cell(c, inner, memo))).collect();
    let fill = match &cell.fill {
        Some(f) => fill_cell(f, inner, memo),
        None => inner.clone(),
    };
    let out = Cell::build(cell.name.clone(), cell.slots, children, Some(fill));
    memo.insert(Arc::as_ptr(cell), out.clone());
    out
}

fn document_cell(cell: &Arc<Cell>, ids: &mut HashMap<*const Cell, usize>, table: &mut Vec<Value>) -> usize {
    if let Some(&id) = ids.get(&Arc::as_ptr(cell)) {
        return id;
    }
    let glued: serde_json::Map<String, Value> = cell
        .children
        .iter()
        .map(|(k, c)| (k.to_string(), json!(document_cell(c, ids, table))))
        .collect();
    let fill = cell.fill.as_ref().map(|f| document_cell(f, ids, table));
    let slots = match cell.slots {
        Slots::Finite(n) => json!(n),
        Slots::Integers => json!("Z"),
    };
    let mut entry = json!({ "name": cell.name, "slots": slots });
    if !glued.is_empty() {
        entry["glued"] = Value::Object(glued);
    }
    if let Some(f) = fill {
        entry["fill"] = json!(f);
    }
    let id = table.len();
    table.push(entry);
    ids.insert(Arc::as_ptr(cell), id);
    id
}

/// Glues `inner` into the open slot `slot` of `outer`.
pub fn glue_block(outer: &Block, slot: &LeafAddr, inner: &Block) -> Result<Block, BlockError> {
    outer.glue(slot, inner)
}
