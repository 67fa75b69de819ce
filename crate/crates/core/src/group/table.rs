use std::collections::HashSet;

use super::{max_order, GroupError};

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    order: usize,
    /// Row-major: `table[a * order + b] = a·b`.
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
}

impl CayleyTable {
    /// Validates a row-major table of 0-based indices: Latin square, identity,
    /// associativity (Light's test over a generating set).
    pub fn new(order: usize, table: Vec<u32>) -> Result<CayleyTable, GroupError> {
        let bad = |msg: String| GroupError::InvalidTable(msg);
        if order == 0 {
            return Err(bad("order must be positive".into()));
        }
        if order > max_order() {
            return Err(GroupError::OrderCapExceeded {
                group: format!("table group of order {order}"),
                cap: max_order(),
            });
        }
        if table.len() != order * order {
            return Err(bad(format!("expected {} entries, found {}", order * order, table.len())));
        }
        if let Some(x) = table.iter().find(|&&x| x as usize >= order) {
            return Err(bad(format!("entry {x} out of range 0..{order}")));
        }
        for a in 0..order {
            let mut row = vec![false; order];
            let mut col = vec![false; order];
            for b in 0..order {
                row[table[a * order + b] as usize] = true;
                col[table[b * order + a] as usize] = true;
            }
            if row.iter().chain(&col).any(|&x| !x) {
                return Err(bad(format!("row or column {a} repeats an entry")));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e * order + x] as usize == x && table[x * order + e] as usize == x))
            .ok_or_else(|| bad("no identity element".into()))? as u32;
        let mut inverse = vec![0u32; order];
        for a in 0..order {
            let b = (0..order)
                .find(|&b| table[a * order + b] == identity)
                .expect("Latin square row contains the identity");
            if table[b * order + a] != identity {
                return Err(bad(format!("{a} has no two-sided inverse")));
            }
            inverse[a] = b as u32;
        }
        let t = CayleyTable { order, table, identity, inverse };
        t.check_associative()?;
        Ok(t)
    }

    fn check_associative(&self) -> Result<(), GroupError> {
        let n = self.order;
        // Light's test: if (x·a)·y = x·(a·y) for all x, y and every a in a
        // generating set, the whole table is associative.
        let mut gens = Vec::new();
        let mut span: HashSet<u32> = HashSet::from([self.identity]);
        for a in 0..n as u32 {
            if span.contains(&a) {
                continue;
            }
            gens.push(a);
            span = self.closure(&gens);
        }
        for &a in &gens {
            for x in 0..n as u32 {
                let xa = self.mul(x, a);
                for y in 0..n as u32 {
                    if self.mul(xa, y) != self.mul(x, self.mul(a, y)) {
                        return Err(GroupError::InvalidTable(format!(
                            "not associative at ({x}, {a}, {y})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn closure(&self, gens: &[u32]) -> HashSet<u32> {
        let mut seen = HashSet::from([self.identity]);
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn rows(&self) -> &[u32] {
        &self.table
    }
}
