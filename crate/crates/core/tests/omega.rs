use std::sync::Arc;

use corkcalc::group::{catalog, Elem, Group, Perm, WreathElement};
use corkcalc::hom::Homomorphism;
use corkcalc::omega::{build_omega, check_omega_hypotheses, OmegaError, OmegaInput, RANDOM_ORDERS};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small() -> Vec<Arc<Group>> {
    vec![Group::cyclic(1), Group::cyclic(2), Group::cyclic(3), Group::cyclic(4), catalog::get("V4").unwrap()]
}

/// `φ(h) = (1; h)` and `ψ_g(x) = (x at g; 1)` into `N≀H` itself.
fn coordinate_family(n: &Arc<Group>, h: &Arc<Group>) -> OmegaInput {
    let w = Group::wreath(n.clone(), h.clone()).unwrap();
    let k = h.finite_order().unwrap();
    let n_id = n.identity();
    let phi = {
        let n_id = n_id.clone();
        Homomorphism::from_fn(h.clone(), w.clone(), "phi", move |x| {
            Elem::Wreath(WreathElement { base: vec![n_id.clone(); k], top: Box::new(x.clone()) })
        })
    };
    let h_id = h.identity();
    let psi = (0..k)
        .map(|i| {
            let (n_id, h_id) = (n_id.clone(), h_id.clone());
            Homomorphism::from_fn(n.clone(), w.clone(), format!("psi_{i}"), move |x| {
                let mut base = vec![n_id.clone(); k];
                base[i] = x.clone();
                Elem::Wreath(WreathElement { base, top: Box::new(h_id.clone()) })
            })
        })
        .collect();
    OmegaInput::new(phi, psi).unwrap()
}

/// `φ = 1` and every `ψ_g` the identity of an abelian `N`: `ω(F, h) = Σ F(g)`.
fn sum_family(n: &Arc<Group>, h: &Arc<Group>) -> OmegaInput {
    let n_id = n.identity();
    let phi = Homomorphism::from_fn(h.clone(), n.clone(), "trivial", move |_| n_id.clone());
    let psi = (0..h.finite_order().unwrap()).map(|_| Homomorphism::identity(n)).collect();
    OmegaInput::new(phi, psi).unwrap()
}

pub fn small_families_build_and_match() {
    for n in small() {
        for h in small() {
            let inp = coordinate_family(&n, &h);
            let report = check_omega_hypotheses(&inp, None).unwrap();
            assert!(report.certificate.passed(), "{n} {h}");
            let omega = build_omega(&inp, &report).unwrap();
            let c = &omega.certificate;
            assert!(c.passed(), "{n} {h}");
            let pairs = n.finite_order().unwrap().pow(2 * h.finite_order().unwrap() as u32) * h.finite_order().unwrap().pow(2);
            assert_eq!(c.check("omega homomorphism").unwrap().range, format!("all {pairs} pairs"));
            assert!(c.check("product order independence").unwrap().range.contains(&format!("× {RANDOM_ORDERS}")));
            for x in omega.hom.domain().elements().unwrap() {
                assert_eq!(&omega.hom.apply(x), x);
            }

            let inp = sum_family(&n, &h);
            let report = check_omega_hypotheses(&inp, None).unwrap();
            let omega = build_omega(&inp, &report).unwrap();
            assert!(omega.certificate.passed(), "{n} {h}");
            for x in omega.hom.domain().elements().unwrap() {
                let w = x.as_wreath().unwrap();
                let sum = w.base.iter().fold(n.identity(), |acc, y| n.mul(&acc, y));
                assert_eq!(omega.hom.apply(x), sum);
            }
        }
    }
}

pub fn free_abelian_base_on_a_ball() {
    for m in 1..=2 {
        for h in [Group::cyclic(2), Group::cyclic(3)] {
            let n = Group::free_abelian(m);
            let inp = coordinate_family(&n, &h);
            let report = check_omega_hypotheses(&inp, Some(2)).unwrap();
            assert!(report.certificate.passed());
            let omega = build_omega(&inp, &report).unwrap();
            assert!(omega.certificate.passed(), "{:?}", omega.certificate.checks);
            assert!(omega.certificate.check("omega homomorphism").unwrap().range.starts_with("ball of radius 2"));
            // on the base, ω restricts to the ψ family
            let k = h.finite_order().unwrap();
            for x in n.enumerate(Some(2)).unwrap() {
                for (i, g) in h.elements().unwrap().iter().enumerate() {
                    let mut base = vec![n.identity(); k];
                    base[i] = x.clone();
                    let f = Elem::Wreath(WreathElement { base, top: Box::new(h.identity()) });
                    assert_eq!(omega.hom.apply(&f), inp.psi_of(g).apply(&x));
                }
            }
        }
    }
}

pub fn support_at_one_site() {
    let (n, h) = (Group::cyclic(3), Group::cyclic(4));
    let inp = coordinate_family(&n, &h);
    let omega = build_omega(&inp, &check_omega_hypotheses(&inp, None).unwrap()).unwrap();
    let g0 = Elem::Residue(2);
    let x = Elem::Wreath(WreathElement {
        base: (0..4).map(|i| Elem::Residue(if i == 2 { 1 } else { 0 })).collect(),
        top: Box::new(Elem::Residue(3)),
    });
    let expected = inp.codomain.mul(&inp.psi_of(&g0).apply(&Elem::Residue(1)), &inp.phi.apply(&Elem::Residue(3)));
    assert_eq!(omega.hom.apply(&x), expected);
}

pub fn shuffled_family_is_refused() {
    let (n, h) = (Group::cyclic(2), Group::cyclic(3));
    let good = coordinate_family(&n, &h);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut order: Vec<usize> = (0..3).collect();
    // a non-identity, non-rotation reordering of the ψ family
    while order == [0, 1, 2] || order == [1, 2, 0] || order == [2, 0, 1] {
        order.shuffle(&mut rng);
    }
    let psi = order.iter().map(|&i| good.psi[i].clone()).collect();
    let bad = OmegaInput::new(good.phi.clone(), psi).unwrap();
    let report = check_omega_hypotheses(&bad, None).unwrap();
    let c = report.certificate.check("conjugation compatibility").unwrap();
    assert!(!c.passed);
    assert!(c.witness.as_deref().unwrap().starts_with("(x=1, "), "{:?}", c.witness);
    assert!(matches!(build_omega(&bad, &report), Err(OmegaError::HypothesesNotVerified)));
    // a passing report for another input does not unlock the build
    let report = check_omega_hypotheses(&good, None).unwrap();
    assert!(matches!(build_omega(&bad, &report), Err(OmegaError::HypothesesNotVerified)));
}

pub fn noncommuting_factors_are_refused() {
    let s3 = catalog::get("S3").unwrap();
    let z2 = Group::cyclic(2);
    let p = |c: &[u32]| Elem::Perm(Perm::from_cycles(3, &[c]).unwrap());
    let one = Elem::Residue(1);
    let hom = |img: Elem, name: &str| {
        Homomorphism::from_generator_images(z2.clone(), s3.clone(), &[(one.clone(), img)], name).unwrap()
    };
    // (1 3) conjugates (1 2) to (2 3), so only commutation fails
    let inp = OmegaInput::new(hom(p(&[1, 3]), "phi"), vec![hom(p(&[1, 2]), "psi_0"), hom(p(&[2, 3]), "psi_1")]).unwrap();
    let report = check_omega_hypotheses(&inp, None).unwrap();
    assert!(report.certificate.check("conjugation compatibility").unwrap().passed);
    let c = report.certificate.check("distinct factors commute").unwrap();
    assert!(!c.passed);
    assert_eq!(c.witness.as_deref(), Some("(x=1, y=1, g=0, h=1)"));
    assert!(build_omega(&inp, &report).is_err());
}

mod tests {
    #[test]
    fn small_families_build_and_match() {
        super::small_families_build_and_match();
    }

    #[test]
    fn free_abelian_base_on_a_ball() {
        super::free_abelian_base_on_a_ball();
    }

    #[test]
    fn support_at_one_site() {
        super::support_at_one_site();
    }

    #[test]
    fn shuffled_family_is_refused() {
        super::shuffled_family_is_refused();
    }

    #[test]
    fn noncommuting_factors_are_refused() {
        super::noncommuting_factors_are_refused();
    }
}
