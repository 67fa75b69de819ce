//! The Cayley complex of a generalized cork: one vertex per group element
//! and a handle `h → hg` for every `g ≠ 1`.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::certificate::{Certificate, ChainRecord, Check};
use crate::group::{Group, GroupError};

/// The handle `𝔥(h, g)` from `h` to `hg`, by canonical element index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HandleEdge {
    pub from: usize,
    pub generator: usize,
    pub to: usize,
}

#[derive(Clone, Debug)]
pub struct CayleyComplex {
    pub group: Arc<Group>,
    pub vertices: usize,
    pub edges: Vec<HandleEdge>,
    /// Edge index pairs `{𝔥(h,g), 𝔥(hg,g⁻¹)}`, smaller index first.
    pub doubled: Vec<(usize, usize)>,
    pub connected: bool,
    pub certificate: Certificate,
}

pub fn cayley_complex(h: &Arc<Group>) -> Result<CayleyComplex, GroupError> {
    let elems = h.elements()?;
    let n = elems.len();
    let id = h.index_of(&h.identity()).expect("identity");
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1));
    for a in 0..n {
        for g in (0..n).filter(|&g| g != id) {
            let to = h.index_of(&h.mul(&elems[a], &elems[g])).expect("closed");
            edges.push(HandleEdge { from: a, generator: g, to });
        }
    }
    // edges are laid out row by row, skipping the identity column
    let edge_index = |from: usize, g: usize| from * (n - 1) + if g > id { g - 1 } else { g };
    let mut doubled = Vec::new();
    let mut unpaired = None;
    for (k, e) in edges.iter().enumerate() {
        let ginv = h.index_of(&h.inv(&elems[e.generator])).expect("closed");
        let partner = edge_index(e.to, ginv);
        let back = edges[partner];
        if back.to != e.from && unpaired.is_none() {
            unpaired = Some(format!("edge {k}"));
        }
        if k < partner {
            doubled.push((k, partner));
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([id]);
    seen[id] = true;
    while let Some(a) = queue.pop_front() {
        for e in &edges[a * (n - 1)..(a + 1) * (n - 1)] {
            if !seen[e.to] {
                seen[e.to] = true;
                queue.push_back(e.to);
            }
        }
    }
    let reached = seen.iter().filter(|&&s| s).count();
    let connected = reached == n;
    let certificate = Certificate::single(
        ChainRecord::new("cayley_complex", "boundary sums joined by handles h → hg")
            .param("group", h.name())
            .param("vertices", n)
            .param("edges", edges.len())
            .param("doubled_pairs", doubled.len()),
        vec![
            Check::from_outcome("handles come in doubled pairs", format!("all {} edges", edges.len()), unpaired),
            Check::from_outcome(
                "connected",
                "breadth-first search from the identity",
                (!connected).then(|| format!("{reached} of {n} vertices reached")),
            ),
        ],
    );
    Ok(CayleyComplex { group: h.clone(), vertices: n, edges, doubled, connected, certificate })
}
