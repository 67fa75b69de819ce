//! The block constructions: `Z_n` rotation blocks, wreath gluing, (P1) to
//! (P2) amplification, open shift blocks and their wreath gluing.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use serde_json::json;

use super::action::{check_p1_p2, ActElem, ActionGroup, CheckOptions, ShadowAction};
use super::tree::{Block, LeafAddr, Slots};
use super::BlockError;
use crate::certificate::{Certificate, ChainRecord, Check};
use crate::group::{Elem, Group, Perm};
use crate::hom::Homomorphism;

pub const ZN_PROVENANCE: &str = "Z_n rotation block: f(x,s,t) = (e^{2πis/n}x,s,t), generator f_1⋯f_n f_0";
pub const ZN_AXIOM: &str = "the generator's n-th power is trivial in the block's diffeotopy group (Dehn-twist relation)";
pub const GLUE_PROVENANCE: &str = "wreath gluing: a copy of the base block in every leaf, ω(F,h) = χ(F)φ(h)";
pub const GLUE_SOUNDNESS: &str =
    "P2 of the top action makes its hat injective; base components are then recovered copy by copy from P1 of the base action";
pub const AMPLIFY_PROVENANCE: &str = "amplification: complete n-ary tree of 1+n+…+n^{n−1} copies, acting letterwise on words";
pub const OPEN_SHIFT_PROVENANCE: &str = "open shift block: g(x,y,z,w) = (x, f(x)+y, z, w) translating the slots [0,∞)×{i}";
pub const OPEN_GLUE_PROVENANCE: &str = "open wreath gluing for the restricted wreath product, ω(F,h) = χ(F)φ(h)";
pub const PULLBACK_PROVENANCE: &str = "restriction of a hat action along an injective homomorphism";

/// An action together with the certificate of its construction.
#[derive(Clone, Debug)]
pub struct Built {
    pub action: ShadowAction,
    pub certificate: Certificate,
}

fn leaf(i: usize, j: usize) -> LeafAddr {
    LeafAddr::new(&[i as i64, j as i64])
}

/// The factor permutations `f_0` and `f_1, …, f_n` of the `Z_n` block on
/// its leaves `(i, j)`, indexed `(i−1)·n + (j−1)`.
fn zn_factors(n: usize) -> (Perm, Vec<Perm>) {
    let idx = |i: usize, j: usize| ((i - 1) * n + (j - 1)) as u32;
    let next = |i: usize| i % n + 1;
    let mut f0 = vec![0u32; n * n];
    for i in 1..=n {
        for j in 1..=n {
            f0[idx(i, j) as usize] = idx(next(i), j);
        }
    }
    let fs = (1..=n)
        .map(|k| {
            let mut f: Vec<u32> = (0..(n * n) as u32).collect();
            for j in 1..=n {
                f[idx(k, j) as usize] = idx(k, next(j));
            }
            Perm::from_images(f).expect("bijection")
        })
        .collect();
    (Perm::from_images(f0).expect("bijection"), fs)
}

/// The `Z_n` block: `n²` leaves `(i, j)`; the generator's hat is
/// `f_1∘⋯∘f_n∘f_0`, i.e. `(i, j) ↦ (i+1, j+1)`; (P2) at `(1, 1)`.
pub fn zn_block(n: usize) -> Result<Built, BlockError> {
    if n < 2 {
        return Err(BlockError::InvalidAction(format!("Z_n blocks need n ≥ 2, got {n}")));
    }
    let block = Block::cell("Z_n rotation block", Slots::Finite(n as u32))
        .fill_leaves(&Block::cell("Z_n rotation copy", Slots::Finite(n as u32)));
    let (f0, fs) = zn_factors(n);
    let generator = fs.iter().skip(1).fold(fs[0].clone(), |acc, f| acc.compose(f)).compose(&f0);
    let leaves = block.leaves()?;
    let closed_form_ok = leaves.iter().enumerate().all(|(k, l)| {
        let (i, j) = (l.0[0] as usize, l.0[1] as usize);
        leaves[generator.apply(k as u32) as usize] == leaf(i % n + 1, j % n + 1)
    });
    let mut perms = HashMap::new();
    let mut power = Perm::identity(n * n);
    for k in 0..n {
        perms.insert(Elem::Residue(k as u64), power.clone());
        power = power.compose(&generator);
    }
    let order_ok = power.is_identity();
    let group = Group::cyclic(n as u64);
    let action = ShadowAction::from_table(group, block, perms, ZN_PROVENANCE, Some(leaf(1, 1)))?.with_axiom(ZN_AXIOM);
    let mut cert = Certificate::single(
        ChainRecord::new("zn_block", ZN_PROVENANCE).param("n", n).param("leaves", n * n).param("p2_witness", "(1,1)"),
        vec![
            Check::from_outcome(
                "generator equals (i,j) ↦ (i+1,j+1)",
                format!("all {} leaves", n * n),
                (!closed_form_ok).then(|| "composed factors differ".to_string()),
            ),
            Check::from_outcome(
                "generator hat order divides n",
                format!("n = {n}"),
                (!order_ok).then(|| "generator^n is not the identity".to_string()),
            ),
        ],
    );
    cert.add_axiom(ZN_AXIOM);
    if !closed_form_ok || !order_ok {
        return Err(BlockError::Internal(format!("Z_{n} block generator is wrong")));
    }
    let report = check_p1_p2(&action, &CheckOptions::default())?;
    cert.absorb(report.certificate);
    Ok(Built { action, certificate: cert })
}

/// Glues a copy of `psi`'s block into every leaf of `phi`'s block; the
/// result carries a hat action of `base(psi) ≀ top(phi)`.
pub fn wreath_glue(phi: &ShadowAction, psi: &ShadowAction) -> Result<Built, BlockError> {
    let top = phi
        .group()
        .plain()
        .filter(|g| g.is_finite())
        .ok_or_else(|| BlockError::InvalidAction("wreath gluing needs a finite top group".into()))?
        .clone();
    let base = psi
        .group()
        .plain()
        .filter(|g| g.is_finite())
        .ok_or_else(|| BlockError::InvalidAction("wreath gluing needs a finite base group".into()))?
        .clone();
    require_p2(phi)?;
    let depth = phi.block().uniform_depth().ok_or_else(|| BlockError::InvalidAction("top block leaves have mixed depths".into()))?;
    let group = Group::wreath(base, top)?;
    let block = phi.block().fill_leaves(psi.block());
    let action = ShadowAction::glued(ActionGroup::Plain(group.clone()), block, phi, psi, depth, GLUE_PROVENANCE.into());
    let report = check_p1_p2(&action, &CheckOptions { require_p2: false, ..CheckOptions::default() })?;
    let mut cert = Certificate::single(
        ChainRecord::new("wreath_glue", GLUE_PROVENANCE)
            .param("group", group.name())
            .param("top_leaves", phi.block().leaf_count().to_string())
            .param("base_leaves", psi.block().leaf_count().to_string())
            .param("leaves", action.block().leaf_count().to_string())
            .param("top_witness", phi.p2_witness().map(|p| p.to_string()).unwrap_or_default())
            .param("soundness", GLUE_SOUNDNESS),
        Vec::new(),
    );
    cert.absorb(report.certificate);
    Ok(Built { action, certificate: cert })
}

/// Refuses unless the declared witness has a free orbit over the whole
/// (finite) group.
fn require_p2(act: &ShadowAction) -> Result<(), BlockError> {
    let p = act.p2_witness().ok_or(BlockError::MissingP2)?;
    let elems = act.group().elements()?;
    let mut seen = std::collections::HashSet::new();
    for g in &elems {
        if !seen.insert(act.apply(g, p)) {
            return Err(BlockError::MissingP2);
        }
    }
    Ok(())
}

/// `1 + n + … + n^{n−1}`.
pub fn amplification_copies(n: usize) -> BigUint {
    (0..n).map(|k| num_traits::pow(BigUint::from(n), k)).fold(BigUint::from(0u8), |a, b| a + b)
}

/// Turns a (P1) action on `n` leaves into a (P2) action on the `n^n` words
/// of a depth-`n` tree of copies, with witness the word of all leaves.
pub fn p1_to_p2(phi: &ShadowAction) -> Result<Built, BlockError> {
    let leaves = phi.block().leaves()?;
    let n = leaves.len();
    let depth = phi.block().uniform_depth().ok_or_else(|| BlockError::InvalidAction("block leaves have mixed depths".into()))?;
    let p1 = check_p1_p2(phi, &CheckOptions { require_p2: false, ..CheckOptions::default() })?;
    if !p1.p1 {
        let w = p1.certificate.check("P1").and_then(|c| c.witness.clone()).unwrap_or_default();
        return Err(BlockError::P1NotCertified(w));
    }
    let mut block = phi.block().clone();
    for _ in 1..n {
        block = phi.block().fill_leaves(&block);
    }
    let witness = leaves.iter().fold(LeafAddr(Vec::new()), |acc, l| acc.join(l));
    let action = ShadowAction::amplified(phi, block, leaves, depth, witness.clone(), AMPLIFY_PROVENANCE.into());
    let copies = amplification_copies(n);
    let counted_copies = match (action.block().cell_count().finite(), phi.block().cell_count().finite()) {
        (Some(a), Some(b)) => Some(a / b),
        _ => None,
    };
    let expected_leaves = num_traits::pow(BigUint::from(n), n);
    let mut cert = Certificate::single(
        ChainRecord::new("p1_to_p2", AMPLIFY_PROVENANCE)
            .param("n", n)
            .param("copies", copies.to_string())
            .param("leaves", action.block().leaf_count().to_string())
            .param("p2_witness", format!("word of all {n} leaves")),
        vec![
            Check::from_outcome(
                "copy count",
                "tree structure",
                (counted_copies.as_ref() != Some(&copies)).then(|| format!("{counted_copies:?}")),
            ),
            Check::from_outcome(
                "leaf count",
                "tree structure",
                (action.block().leaf_count().finite() != Some(&expected_leaves)).then(|| action.block().leaf_count().to_string()),
            ),
        ],
    );
    cert.absorb(p1.certificate);
    let report = check_p1_p2(&action, &CheckOptions::default())?;
    cert.absorb(report.certificate);
    Ok(Built { action, certificate: cert })
}

/// One integer-indexed cell; `k ∈ Z` translates the leaves by `k`; (P2) at 0.
pub fn open_shift_block() -> Built {
    let block = Block::cell("open shift cell", Slots::Integers);
    let action = ShadowAction::translation(block, OPEN_SHIFT_PROVENANCE.into());
    let cert = Certificate::single(
        ChainRecord::new("open_shift_block", OPEN_SHIFT_PROVENANCE).param("p2_witness", "(0)"),
        vec![Check::pass("P2", "closed form: k ↦ k is injective")],
    );
    Built { action, certificate: cert }
}

/// Gluing over an open block, acting with the restricted wreath product of
/// `psi`'s group by `phi`'s group.
pub fn open_wreath_glue(phi: &ShadowAction, psi: &ShadowAction) -> Result<Built, BlockError> {
    let top = phi.group().plain().ok_or_else(|| BlockError::InvalidAction("top group must be plain".into()))?.clone();
    if !phi.can_invert_orbit() {
        return Err(BlockError::NonInvertibleOrbit(format!("{:?}", phi)));
    }
    if psi.group().plain().is_none_or(|g| !g.is_finite()) {
        return Err(BlockError::InvalidAction("base action must be on a finite group".into()));
    }
    let depth = phi.block().uniform_depth().ok_or_else(|| BlockError::InvalidAction("top block leaves have mixed depths".into()))?;
    let p1 = check_p1_p2(psi, &CheckOptions { require_p2: false, ..CheckOptions::default() })?;
    if !p1.p1 {
        let w = p1.certificate.check("P1").and_then(|c| c.witness.clone()).unwrap_or_default();
        return Err(BlockError::P1NotCertified(w));
    }
    let group = ActionGroup::Restricted { base: Box::new(psi.group().clone()), top };
    let block = phi.block().fill_leaves(psi.block());
    let action = ShadowAction::glued(group.clone(), block, phi, psi, depth, OPEN_GLUE_PROVENANCE.into());
    let mut cert = Certificate::single(
        ChainRecord::new("open_wreath_glue", OPEN_GLUE_PROVENANCE)
            .param("group", group.name())
            .param("soundness", GLUE_SOUNDNESS),
        Vec::new(),
    );
    cert.absorb(p1.certificate);
    Ok(Built { action, certificate: cert })
}

/// All restricted elements with base support and top inside `[-r, r]` of an
/// infinite cyclic top, base values ranging over the whole finite base.
pub fn restricted_elements(act: &ShadowAction, r: i64) -> Result<Vec<ActElem>, BlockError> {
    let ActionGroup::Restricted { base, .. } = act.group() else {
        return Err(BlockError::InvalidAction("not a restricted wreath action".into()));
    };
    let values = base.elements()?;
    let id = base.identity();
    let sites: Vec<i64> = (-r..=r).collect();
    let mut maps: Vec<BTreeMap<Elem, ActElem>> = vec![BTreeMap::new()];
    for s in &sites {
        let mut next = Vec::with_capacity(maps.len() * values.len());
        for m in &maps {
            for v in &values {
                let mut m2 = m.clone();
                if *v != id {
                    m2.insert(Elem::Int(BigInt::from(*s)), v.clone());
                }
                next.push(m2);
            }
        }
        maps = next;
    }
    Ok(maps
        .into_iter()
        .flat_map(|m| sites.iter().map(move |t| ActElem::Restricted { base: m.clone(), top: Elem::Int(BigInt::from(*t)) }))
        .collect())
}

/// The action `g ↦ hat(hom(g))` of the homomorphism's domain.
pub fn pullback(act: &ShadowAction, hom: &Homomorphism) -> Result<Built, BlockError> {
    let g = act.group().plain().ok_or_else(|| BlockError::InvalidAction("pullback needs a plain action group".into()))?;
    if **g != **hom.codomain() {
        return Err(BlockError::InvalidAction(format!("{} does not map into {}", hom.domain(), g)));
    }
    let action = ShadowAction::pullback(act, hom.clone(), PULLBACK_PROVENANCE.into());
    let report = check_p1_p2(&action, &CheckOptions::default())?;
    let mut cert = Certificate::single(
        ChainRecord::new("pullback", PULLBACK_PROVENANCE).param("group", hom.domain().name()).param("along", hom.provenance()),
        Vec::new(),
    );
    cert.absorb(report.certificate);
    Ok(Built { action, certificate: cert })
}

/// A single `k`-slot cell with `Z_k` rotating the slots; (P2) at slot 1.
pub fn cyclic_shift_action(k: usize) -> Result<ShadowAction, BlockError> {
    let block = Block::cell("rotation cell", Slots::Finite(k as u32));
    let shift = Perm::from_images((0..k as u32).map(|i| (i + 1) % k as u32).collect())?;
    let mut perms = HashMap::new();
    let mut p = Perm::identity(k);
    for r in 0..k {
        perms.insert(Elem::Residue(r as u64), p.clone());
        p = p.compose(&shift);
    }
    ShadowAction::from_table(Group::cyclic(k as u64), block, perms, "rotation of a single cell", Some(LeafAddr::new(&[1])))
}

/// `H` acting on itself by left multiplication; leaf `k` is the `k`-th
/// element in canonical order, and the witness is the identity's leaf.
pub fn regular_action(h: &Arc<Group>) -> Result<ShadowAction, BlockError> {
    let elems = h.elements()?;
    let block = Block::cell("regular cell", Slots::Finite(elems.len() as u32));
    let mut perms = HashMap::new();
    for g in elems {
        let images = elems.iter().map(|x| h.index_of(&h.mul(g, x)).expect("element") as u32).collect();
        perms.insert(g.clone(), Perm::from_images(images)?);
    }
    let p = h.index_of(&h.identity()).expect("identity") as i64 + 1;
    ShadowAction::from_table(h.clone(), block, perms, "regular action", Some(LeafAddr::new(&[p])))
}

/// Every element acts trivially on a `k`-slot cell.
pub fn trivial_action(h: &Arc<Group>, k: usize) -> Result<ShadowAction, BlockError> {
    let block = Block::cell("inert cell", Slots::Finite(k as u32));
    let perms = h.elements()?.iter().map(|g| (g.clone(), Perm::identity(k))).collect();
    ShadowAction::from_table(h.clone(), block, perms, "trivial action", None)
}

/// Summary of an action's block for certificates.
pub fn describe_block(act: &ShadowAction) -> serde_json::Value {
    json!({
        "group": act.group().name(),
        "leaves": act.block().leaf_count().to_string(),
        "cells": act.block().cell_count().to_string(),
        "p2_witness": act.p2_witness().map(|p| p.to_string()),
        "provenance": act.provenance(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(k: u64) -> ActElem {
        ActElem::Plain(Elem::Residue(k))
    }

    #[test]
    fn zn2_generator_is_two_transpositions() {
        let b = zn_block(2).unwrap();
        let g = b.action.table_perm(&Elem::Residue(1)).unwrap();
        // leaves (1,1),(1,2),(2,1),(2,2) → indices 0..3
        assert_eq!(g.to_string(), "(1 4)(2 3)");
        assert!(b.certificate.passed());
    }

    #[test]
    fn zn3_orbit_of_witness() {
        let b = zn_block(3).unwrap();
        let orbit: Vec<LeafAddr> = (0..3).map(|k| b.action.apply(&plain(k), &leaf(1, 1))).collect();
        assert_eq!(orbit, vec![leaf(1, 1), leaf(2, 2), leaf(3, 3)]);
    }

    #[test]
    fn glue_z2_z2() {
        let a = zn_block(2).unwrap().action;
        let g = wreath_glue(&a, &a).unwrap();
        assert_eq!(g.action.block().leaf_count().to_usize(), Some(16));
        assert!(g.certificate.passed(), "{:#?}", g.certificate.failures().collect::<Vec<_>>());
        let id = g.action.group().identity();
        for l in g.action.block().leaves().unwrap() {
            assert_eq!(g.action.apply(&id, &l), l);
        }
    }

    #[test]
    fn amplify_swap() {
        let swap = cyclic_shift_action(2).unwrap();
        let b = p1_to_p2(&swap).unwrap();
        assert!(b.certificate.passed());
        assert_eq!(b.action.block().leaf_count().to_usize(), Some(4));
        assert_eq!(amplification_copies(2), BigUint::from(3u8));
        let w = b.action.p2_witness().unwrap().clone();
        assert_eq!(w, LeafAddr::new(&[1, 2]));
        assert_eq!(b.action.apply(&plain(1), &w), LeafAddr::new(&[2, 1]));
    }

    #[test]
    fn amplify_refuses_without_p1() {
        let t = trivial_action(&Group::cyclic(2), 2).unwrap();
        assert!(matches!(p1_to_p2(&t), Err(BlockError::P1NotCertified(_))));
    }

    #[test]
    fn trivial_action_fails_p1_with_witness() {
        let t = trivial_action(&Group::cyclic(2), 1).unwrap();
        let r = check_p1_p2(&t, &CheckOptions::default()).unwrap();
        assert!(!r.p1);
        assert_eq!(r.certificate.check("P1").unwrap().witness.as_deref(), Some("1"));
    }

    #[test]
    fn open_shift_translation() {
        let b = open_shift_block();
        let k = |x: i64| ActElem::Plain(Elem::Int(BigInt::from(x)));
        assert_eq!(b.action.apply(&k(3), &LeafAddr::new(&[-5])), LeafAddr::new(&[-2]));
        let r = check_p1_p2(&b.action, &CheckOptions { bound: Some(20), ..CheckOptions::default() }).unwrap();
        assert!(r.certificate.passed());
        assert_eq!(r.p2, Some(LeafAddr::new(&[0])));
    }

    #[test]
    fn open_glue_rule() {
        let shift = open_shift_block().action;
        let z2 = zn_block(2).unwrap().action;
        let g = open_wreath_glue(&shift, &z2).unwrap().action;
        let x = ActElem::Restricted {
            base: BTreeMap::from([(Elem::Int(BigInt::from(0)), plain(1))]),
            top: Elem::Int(BigInt::from(5)),
        };
        let l = |i: i64, a: i64, b: i64| LeafAddr::new(&[i, a, b]);
        // the copy that lands on the witness leaf 0 is twisted
        assert_eq!(g.apply(&x, &l(0, 1, 1)), l(5, 1, 1));
        assert_eq!(g.apply(&x, &l(-5, 1, 1)), l(0, 2, 2));
        assert_eq!(g.apply(&x, &l(2, 1, 2)), l(7, 1, 2));
    }
}
