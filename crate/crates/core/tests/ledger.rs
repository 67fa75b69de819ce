use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use corkcalc::blocks::{p1_to_p2, pullback, regular_action, wreath_glue, zn_block, ActElem, LeafAddr, ShadowAction};
use corkcalc::group::{catalog, prime_cyclic_series, Group};
use corkcalc::ledger::{cayley_complex, LabelError, LabelErrorClass, Ledger, LedgerElem, Site, SitePoint, TwistLabel};
use corkcalc::pipeline::{self, block_chain, Command, LedgerMode, PipelineRequest};
use corkcalc::wreath::series_embed;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub name: &'static str,
    pub action: ShadowAction,
}

/// The three (P2) actions labeled here: `Z_2` on its block, `Z_2≀Z_2` on
/// the amplified glued block, and `S_3` pulled back from its embedding.
pub fn instances() -> Vec<Instance> {
    let z2 = zn_block(2).unwrap().action;
    let glued = wreath_glue(&z2, &z2).unwrap().action;
    let z2wr = p1_to_p2(&glued).unwrap().action;
    let s3 = catalog::get("S3").unwrap();
    let emb = series_embed(&prime_cyclic_series(&s3).unwrap()).unwrap();
    let sizes: Vec<usize> = emb.quotients.iter().map(|q| q.finite_order().unwrap()).collect();
    let (amplified, _) = block_chain(&sizes).unwrap();
    let s3_image = pullback(&amplified.action, &emb.hom).unwrap().action;
    vec![
        Instance { name: "Z2", action: z2 },
        Instance { name: "Z2wrZ2", action: z2wr },
        Instance { name: "S3", action: s3_image },
    ]
}

/// The label computed leaf by leaf from the action itself.
fn label_by_hand(act: &ShadowAction, x: &LedgerElem) -> TwistLabel {
    let p = act.p2_witness().unwrap();
    let mut entries = Vec::new();
    for (y, v) in &x.f {
        for (j, c) in v.iter().enumerate() {
            entries.push((Site::new(SitePoint::Leaf(Arc::new(act.apply(y, p))), j + 1), c * 2));
        }
    }
    entries.push((Site::new(SitePoint::Leaf(Arc::new(act.apply(&x.g, p))), 1), BigInt::from(1)));
    TwistLabel::from_entries(entries)
}

fn random_elem(rng: &mut ChaCha8Rng, elems: &[ActElem], m: usize) -> LedgerElem {
    // sparse supports too
    let keep = rng.gen_range(0..=elems.len());
    let f: Vec<(ActElem, Vec<BigInt>)> = elems[..keep]
        .iter()
        .map(|y| (y.clone(), (0..m).map(|_| BigInt::from(rng.gen_range(-1000i64..=1000))).collect()))
        .collect();
    LedgerElem::new(f, elems[rng.gen_range(0..elems.len())].clone())
}

pub fn random_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ed6e5);
    let mut total = 0;
    for inst in instances() {
        let elems = inst.action.group().elements().unwrap();
        for m in 1..=3 {
            let ledger = Ledger::weak(&inst.action, m).unwrap();
            assert!(ledger.certificate().passed(), "{}", inst.name);
            for _ in 0..10_000 / 9 + 1 {
                let x = random_elem(&mut rng, &elems, m);
                let label = ledger.label(&x);
                assert_eq!(label, label_by_hand(&inst.action, &x), "{} m={m} {x}", inst.name);
                assert_eq!(ledger.recover(&label).as_ref(), Ok(&x), "{} m={m}", inst.name);
                total += 1;
            }
        }
    }
    assert!(total >= 10_000);
}

/// A 128-bit digest of a label, reading sites as orbit indices.
fn digest(label: &TwistLabel, index: &BTreeMap<SitePoint, u64>) -> u128 {
    let half = |salt: u8| {
        let mut h = DefaultHasher::new();
        salt.hash(&mut h);
        for (s, v) in label.iter() {
            index.get(&s.point).hash(&mut h);
            s.coord.hash(&mut h);
            v.hash(&mut h);
        }
        h.finish() as u128
    };
    (half(0) << 64) | half(1)
}

/// Labels every element with coordinates in `{-2..2}`; distinctness by
/// sorted 128-bit digests (re-comparing full labels on a digest tie) and by
/// the round trip, whose left inverse rules out collisions outright.
pub fn exhaustive_distinctness(inst: &Instance, m: usize) -> usize {
    let ledger = Ledger::weak(&inst.action, m).unwrap();
    let elems = inst.action.group().elements().unwrap();
    let index: BTreeMap<SitePoint, u64> = elems.iter().enumerate().map(|(i, g)| (ledger.point(g), i as u64)).collect();
    let count = 5usize.pow((elems.len() * m) as u32);
    let elem_at = |code: usize, g: &ActElem| {
        let mut c = code;
        let f = elems.iter().map(|y| {
            let v: Vec<BigInt> = (0..m)
                .map(|_| {
                    let d = (c % 5) as i64 - 2;
                    c /= 5;
                    BigInt::from(d)
                })
                .collect();
            (y.clone(), v)
        });
        LedgerElem::new(f.collect::<Vec<_>>(), g.clone())
    };
    let mut digests = Vec::with_capacity(count * elems.len());
    for code in 0..count {
        let mut x = elem_at(code, &elems[0]);
        for (gi, g) in elems.iter().enumerate() {
            x.g = g.clone();
            let label = ledger.label(&x);
            assert_eq!(ledger.recover(&label).as_ref(), Ok(&x), "{} m={m}", inst.name);
            digests.push((digest(&label, &index), code, gi));
        }
    }
    digests.sort_unstable();
    for w in digests.windows(2) {
        if w[0].0 == w[1].0 {
            let a = ledger.label(&elem_at(w[0].1, &elems[w[0].2]));
            let b = ledger.label(&elem_at(w[1].1, &elems[w[1].2]));
            assert_ne!(a, b, "{} m={m}: two elements share {a}", inst.name);
        }
    }
    digests.len()
}

pub fn exhaustive_small_coordinates() {
    let insts = instances();
    let cases: [(usize, usize, usize); 5] = [(0, 1, 50), (0, 2, 1250), (0, 3, 31_250), (2, 1, 93_750), (1, 1, 3_125_000)];
    for (i, m, expected) in cases {
        assert_eq!(exhaustive_distinctness(&insts[i], m), expected, "{} m={m}", insts[i].name);
    }
}

pub fn malformed_labels_are_diagnosed() {
    for inst in instances() {
        let ledger = Ledger::weak(&inst.action, 2).unwrap();
        let elems = inst.action.group().elements().unwrap();
        let p = inst.action.p2_witness().unwrap().clone();
        let on = |g: &ActElem, j: usize| Site::new(SitePoint::Leaf(Arc::new(inst.action.apply(g, &p))), j);
        let orbit: Vec<LeafAddr> = elems.iter().map(|g| inst.action.apply(g, &p)).collect();
        let off = inst
            .action
            .block()
            .leaves()
            .ok()
            .and_then(|all| all.into_iter().find(|l| !orbit.contains(l)))
            .unwrap_or_else(|| LeafAddr::new(&[99, 99]));
        let off = |j: usize| Site::new(SitePoint::Leaf(Arc::new(off.clone())), j);
        let one = || BigInt::from(1);
        let two = || BigInt::from(2);
        let cases: Vec<(TwistLabel, LabelErrorClass)> = vec![
            (TwistLabel::new(), LabelErrorClass::OddCount),
            (TwistLabel::from_entries([(on(&elems[0], 2), two())]), LabelErrorClass::OddCount),
            (TwistLabel::from_entries([(on(&elems[0], 1), one()), (on(&elems[1], 1), BigInt::from(3))]), LabelErrorClass::OddCount),
            (TwistLabel::from_entries([(off(1), one())]), LabelErrorClass::OddSiteOffOrbit),
            (TwistLabel::from_entries([(on(&elems[1], 2), one())]), LabelErrorClass::OddSiteOffOrbit),
            (TwistLabel::from_entries([(on(&elems[0], 1), one()), (off(1), two())]), LabelErrorClass::Residual),
            (TwistLabel::from_entries([(on(&elems[0], 1), one()), (on(&elems[1], 3), two())]), LabelErrorClass::Residual),
        ];
        for (label, class) in cases {
            let err = ledger.recover(&label).expect_err(&label.to_string());
            assert_eq!(err.class(), class, "{}: {label} gave {err}", inst.name);
            assert!(err.to_string().starts_with("not a twist label: "));
        }
        assert_eq!(ledger.recover(&TwistLabel::new()), Err(LabelError::NoOddCoordinate));
    }
}

/// Leaf `k` of the regular action is the `k`-th element, so weak labels
/// become equivariant ones under that renaming.
pub fn equivariant_is_weak_on_regular_actions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for name in ["Z2", "Z3", "V4", "S3", "D4", "Q8", "A4"] {
        let h: Arc<Group> = catalog::get(name).unwrap();
        let elems = h.elements().unwrap();
        let weak = Ledger::weak(&regular_action(&h).unwrap(), 2).unwrap();
        let eq = Ledger::equivariant(&h, 2).unwrap();
        let acts: Vec<ActElem> = elems.iter().cloned().map(ActElem::Plain).collect();
        for _ in 0..200 {
            let x = random_elem(&mut rng, &acts, 2);
            let renamed = TwistLabel::from_entries(weak.label(&x).iter().map(|(s, v)| {
                let SitePoint::Leaf(l) = &s.point else { unreachable!() };
                (Site::new(SitePoint::Element(elems[l.0[0] as usize - 1].clone()), s.coord), v.clone())
            }));
            assert_eq!(renamed, eq.label(&x), "{name} {x}");
            assert_eq!(eq.recover(&eq.label(&x)), Ok(x));
        }
    }
}

pub fn cayley_complexes_of_the_catalog() {
    for name in catalog::names() {
        let h = catalog::get(name).unwrap();
        let n = h.finite_order().unwrap();
        if n > 200 {
            continue;
        }
        let c = cayley_complex(&h).unwrap();
        assert_eq!(c.vertices, n);
        assert_eq!(c.edges.len(), n * (n - 1), "{name}");
        assert_eq!(c.doubled.len(), n * (n - 1) / 2, "{name}");
        assert!(c.connected && c.certificate.passed(), "{name}");
    }
}

pub fn cork_runs_replay() {
    for (group, mode) in [("Z2", LedgerMode::Weak), ("S3", LedgerMode::Equivariant), ("Z3", LedgerMode::SteinShadow)] {
        let mut req = PipelineRequest::new(Command::Cork);
        req.group = Some(corkcalc::group::document::GroupDoc::from_argument(group).unwrap());
        req.mode = mode;
        req.m = 2;
        req.ball = 300;
        let a = pipeline::run(&req, 1_700_000_000).to_json();
        let b = pipeline::run(&req, 1_700_000_000).to_json();
        assert_eq!(a, b, "{group}");
        let v = pipeline::verify(&a);
        assert!(v.passed(), "{group}: {:?}", v.failures().collect::<Vec<_>>());
    }
}

mod tests {
    #[test]
    fn random_round_trips() {
        super::random_round_trips();
    }

    #[test]
    fn exhaustive_small_coordinates() {
        super::exhaustive_small_coordinates();
    }

    #[test]
    fn malformed_labels_are_diagnosed() {
        super::malformed_labels_are_diagnosed();
    }

    #[test]
    fn equivariant_is_weak_on_regular_actions() {
        super::equivariant_is_weak_on_regular_actions();
    }

    #[test]
    fn cayley_complexes_of_the_catalog() {
        super::cayley_complexes_of_the_catalog();
    }

    #[test]
    fn cork_runs_replay() {
        super::cork_runs_replay();
    }
}
