use std::collections::{HashMap, HashSet};

use corkcalc::blocks::{
    amplification_copies, check_p1_p2, cyclic_shift_action, p1_to_p2, wreath_glue, zn_block, ActElem, CheckOptions, LeafAddr,
    ShadowAction,
};
use corkcalc::blocks::{Block, Slots};
use corkcalc::group::{Elem, Group, Perm};
use corkcalc::pipeline::block_chain;
use num_bigint::BigUint;
use proptest::prelude::*;

fn plain(k: u64) -> ActElem {
    ActElem::Plain(Elem::Residue(k))
}

/// `f_0` moves every row down by one; `f_k` rotates row `k` only.
fn f0(n: i64, (i, j): (i64, i64)) -> (i64, i64) {
    (i % n + 1, j)
}

fn fk(n: i64, k: i64, (i, j): (i64, i64)) -> (i64, i64) {
    if i == k {
        (i, j % n + 1)
    } else {
        (i, j)
    }
}

/// `f_1 ∘ ⋯ ∘ f_n ∘ f_0`, applied right to left.
fn generator(n: i64, p: (i64, i64)) -> (i64, i64) {
    (1..=n).rev().fold(f0(n, p), |q, k| fk(n, k, q))
}

pub fn zn_blocks_match_generator_composition() {
    for n in 2..=6i64 {
        let built = zn_block(n as usize).unwrap();
        assert!(built.certificate.passed(), "n = {n}");
        let act = &built.action;
        let leaves = act.block().leaves().unwrap();
        assert_eq!(leaves.len() as i64, n * n);
        for k in 0..n {
            for l in &leaves {
                let mut p = (l.0[0], l.0[1]);
                for _ in 0..k {
                    p = generator(n, p);
                }
                assert_eq!(act.apply(&plain(k as u64), l), LeafAddr::new(&[p.0, p.1]), "n={n} k={k} {l}");
            }
        }
        // hat order is exactly n
        let g = act.perm(&plain(1)).unwrap();
        let mut power = g.clone();
        let mut order = 1;
        while !power.is_identity() {
            power = power.compose(&g);
            order += 1;
        }
        assert_eq!(order, n);
        // free orbit at (1,1)
        let p = LeafAddr::new(&[1, 1]);
        let orbit: HashSet<LeafAddr> = (0..n as u64).map(|k| act.apply(&plain(k), &p)).collect();
        assert_eq!(orbit.len() as i64, n);
        let report = check_p1_p2(act, &CheckOptions::default()).unwrap();
        assert_eq!(report.p2, Some(p));
        assert!(report.p1);
    }
}

pub fn amplification_counts() {
    for n in 2..=5usize {
        let built = p1_to_p2(&cyclic_shift_action(n).unwrap()).unwrap();
        assert!(built.certificate.passed(), "n = {n}");
        let block = built.action.block();
        let geometric = (n.pow(n as u32) - 1) / (n - 1);
        assert_eq!(amplification_copies(n), BigUint::from(geometric));
        assert_eq!(block.cell_count().finite(), Some(&BigUint::from(geometric)));
        assert_eq!(block.leaves().unwrap().len(), n.pow(n as u32));
        let word: Vec<i64> = (1..=n as i64).collect();
        assert_eq!(built.action.p2_witness(), Some(&LeafAddr::new(&word)));
    }
}

/// The Klein group swapping `{1,2}` and `{3,4}` independently: faithful
/// but with no free orbit.
fn klein_on_two_pairs() -> ShadowAction {
    let a = Perm::from_cycles(4, &[&[1, 2]]).unwrap();
    let b = Perm::from_cycles(4, &[&[3, 4]]).unwrap();
    let g = Group::permutation(4, vec![a, b]).unwrap();
    let perms: HashMap<Elem, Perm> = g
        .elements()
        .unwrap()
        .iter()
        .map(|x| match x {
            Elem::Perm(p) => (x.clone(), p.clone()),
            _ => unreachable!(),
        })
        .collect();
    ShadowAction::from_table(g, Block::cell("two pairs", Slots::Finite(4)), perms, "two independent swaps", None).unwrap()
}

pub fn amplification_creates_a_free_orbit() {
    let act = klein_on_two_pairs();
    let before = check_p1_p2(&act, &CheckOptions { require_p2: false, ..CheckOptions::default() }).unwrap();
    assert!(before.p1);
    assert_eq!(before.p2, None);
    let built = p1_to_p2(&act).unwrap();
    assert!(built.certificate.passed());
    let p = LeafAddr::new(&[1, 2, 3, 4]);
    assert_eq!(built.action.p2_witness(), Some(&p));
    let orbit: HashSet<LeafAddr> =
        built.action.group().elements().unwrap().iter().map(|g| built.action.apply(g, &p)).collect();
    assert_eq!(orbit.len(), 4);
    assert_eq!(built.action.block().leaves().unwrap().len(), 256);
}

pub fn amplification_refuses_unfaithful_actions() {
    let g = Group::cyclic(4);
    let swap = Perm::from_cycles(2, &[&[1, 2]]).unwrap();
    let perms = (0..4u64).map(|k| (Elem::Residue(k), if k % 2 == 0 { Perm::identity(2) } else { swap.clone() })).collect();
    let act = ShadowAction::from_table(g, Block::cell("pair", Slots::Finite(2)), perms, "Z4 through Z2", None).unwrap();
    assert!(p1_to_p2(&act).is_err());
}

/// The glued hat of `Z_{n2} ≀ Z_{n1}` by hand: the top leaf moves by the
/// top element, and the base leaf under it moves by `F(x)` where `x` is the
/// orbit index of the new top leaf (top leaves off the diagonal stay put).
fn glued_by_hand(n1: i64, n2: i64, x: &Elem, leaf: &LeafAddr) -> LeafAddr {
    let w = x.as_wreath().unwrap();
    let Elem::Residue(h) = *w.top else { unreachable!() };
    let rot = |a: i64, n: i64, by: i64| (a - 1 + by).rem_euclid(n) + 1;
    let (a, b) = (rot(leaf.0[0], n1, h as i64), rot(leaf.0[1], n1, h as i64));
    let (mut c, mut d) = (leaf.0[2], leaf.0[3]);
    if a == b {
        let Elem::Residue(v) = w.base[(a - 1) as usize] else { unreachable!() };
        c = rot(c, n2, v as i64);
        d = rot(d, n2, v as i64);
    }
    LeafAddr::new(&[a, b, c, d])
}

pub fn glued_blocks_are_faithful() {
    for n1 in [2i64, 3] {
        for n2 in [2i64, 3] {
            let top = zn_block(n1 as usize).unwrap().action;
            let base = zn_block(n2 as usize).unwrap().action;
            let built = wreath_glue(&top, &base).unwrap();
            assert!(built.certificate.passed(), "({n1}, {n2})");
            let act = &built.action;
            let elems = act.group().elements().unwrap();
            assert_eq!(elems.len() as i64, n2.pow(n1 as u32) * n1);
            let leaves = act.block().leaves().unwrap();
            let mut hats = HashSet::new();
            for g in &elems {
                let ActElem::Plain(x) = g else { unreachable!() };
                let sig: Vec<LeafAddr> = leaves.iter().map(|l| glued_by_hand(n1, n2, x, l)).collect();
                for (l, img) in leaves.iter().zip(&sig) {
                    assert_eq!(&act.apply(g, l), img);
                }
                hats.insert(sig);
            }
            assert_eq!(hats.len(), elems.len(), "({n1}, {n2})");
            let p1 = built.certificate.check("P1").unwrap();
            assert!(p1.passed && p1.range.starts_with(&format!("all {} elements", elems.len())));
        }
    }
}

pub fn block_chains_are_sound() {
    for ns in [vec![2], vec![5], vec![2, 2], vec![2, 3], vec![3, 2], vec![3, 3], vec![2, 2, 2], vec![2, 2, 3]] {
        let (amplified, cert) = block_chain(&ns).unwrap();
        assert!(cert.passed(), "{ns:?}: {:?}", cert.failures().collect::<Vec<_>>());
        assert!(amplified.action.p2_witness().is_some());
        let order = amplified.action.group().elements().unwrap().len();
        assert_eq!(BigUint::from(order), corkcalc::wreath::iterated_wreath_order(&ns));
    }
}

fn random_cyclic_action(images: Vec<u32>, twice: bool) -> (ShadowAction, usize) {
    let sigma = Perm::from_images(images).unwrap();
    let n = sigma.degree();
    let mut order = 1;
    let mut p = sigma.clone();
    while !p.is_identity() {
        p = p.compose(&sigma);
        order += 1;
    }
    let k = if twice { 2 * order } else { order };
    let mut perms = HashMap::new();
    let mut p = Perm::identity(n);
    for r in 0..k {
        perms.insert(Elem::Residue(r as u64), p.clone());
        p = p.compose(&sigma);
    }
    let act =
        ShadowAction::from_table(Group::cyclic(k as u64), Block::cell("points", Slots::Finite(n as u32)), perms, "powers", None)
            .unwrap();
    (act, k)
}

mod tests {
    #[test]
    fn zn_blocks_match_generator_composition() {
        super::zn_blocks_match_generator_composition();
    }

    #[test]
    fn amplification_counts() {
        super::amplification_counts();
    }

    #[test]
    fn amplification_creates_a_free_orbit() {
        super::amplification_creates_a_free_orbit();
    }

    #[test]
    fn amplification_refuses_unfaithful_actions() {
        super::amplification_refuses_unfaithful_actions();
    }

    #[test]
    fn glued_blocks_are_faithful() {
        super::glued_blocks_are_faithful();
    }

    #[test]
    fn block_chains_are_sound() {
        super::block_chains_are_sound();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn p2_implies_p1(images in Just((0u32..6).collect::<Vec<_>>()).prop_shuffle(), twice in any::<bool>()) {
        let (act, k) = random_cyclic_action(images.clone(), twice);
        let r = check_p1_p2(&act, &CheckOptions { require_p2: false, ..CheckOptions::default() }).unwrap();
        prop_assert!(r.p2.is_none() || r.p1);
        prop_assert_eq!(r.p1, !twice);
        // a free orbit exists exactly when some point's cycle has length k
        let sigma = Perm::from_images(images).unwrap();
        let free = sigma.cycles().iter().any(|c| c.len() == k) || (k == 1);
        prop_assert_eq!(r.p2.is_some(), free);
    }
}
