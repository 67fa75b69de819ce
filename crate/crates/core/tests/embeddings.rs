use std::collections::HashSet;

use corkcalc::group::{catalog, derived_series, prime_cyclic_series, Elem, Group};
use corkcalc::hom::Homomorphism;
use corkcalc::wreath::{iterated_wreath_order, kk_embed, series_embed, verify_homomorphism_injective};

/// Brute-force check that `h` is an injective homomorphism of its finite
/// domain, with image of exactly `|G|` elements closed under products.
fn oracle(h: &Homomorphism) -> Result<(), String> {
    let g = h.domain();
    let w = h.codomain();
    let elems = g.elements().unwrap();
    let images: Vec<Elem> = elems.iter().map(|x| h.apply(x)).collect();
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            if h.apply(&g.mul(a, b)) != w.mul(&images[i], &images[j]) {
                return Err(format!("not multiplicative at ({a}, {b})"));
            }
        }
    }
    let distinct: HashSet<&Elem> = images.iter().collect();
    if distinct.len() != elems.len() {
        return Err("not injective".into());
    }
    let closed = images.iter().all(|a| images.iter().all(|b| distinct.contains(&w.mul(a, b))));
    if !closed {
        return Err("image is not a subgroup".into());
    }
    Ok(())
}

fn solvable_catalog_up_to(n: usize) -> Vec<&'static str> {
    catalog::names()
        .into_iter()
        .filter(|name| {
            let g = catalog::get(name).unwrap();
            g.finite_order().unwrap() <= n && derived_series(&g).is_ok()
        })
        .collect()
}

pub fn every_small_solvable_group_embeds() {
    let names = solvable_catalog_up_to(24);
    for required in ["S3", "D4", "Q8", "A4", "Z4xZ2", "S4", "SL23"] {
        assert!(names.contains(&required), "{required}");
    }
    for name in names {
        let g = catalog::get(name).unwrap();
        let series = prime_cyclic_series(&g).unwrap();
        let emb = series_embed(&series).unwrap();
        assert!(emb.certificate.passed(), "{name}");
        oracle(&emb.hom).unwrap_or_else(|e| panic!("{name}: {e}"));
        let sizes: Vec<usize> = series.quotient_orders.iter().map(|&q| q as usize).collect();
        let target = emb.hom.codomain().order().unwrap().unwrap_or_default();
        assert_eq!(target, iterated_wreath_order(&sizes), "{name}");
    }
}

pub fn kk_step_projects_to_the_quotient() {
    for name in solvable_catalog_up_to(24) {
        let g = catalog::get(name).unwrap();
        let series = prime_cyclic_series(&g).unwrap();
        if series.length() == 0 {
            continue;
        }
        let k = kk_embed(&g, series.terms[1].generators()).unwrap();
        oracle(&k.hom).unwrap_or_else(|e| panic!("{name}: {e}"));
        for x in g.elements().unwrap() {
            let top = k.hom.apply(x).as_wreath().unwrap().top.as_ref().clone();
            assert_eq!(top, k.quotient_map.apply(x), "{name} at {x}");
        }
        // the quotient map is constant exactly on cosets of N
        for x in g.elements().unwrap() {
            for n in series.terms[1].elements() {
                assert_eq!(k.quotient_map.apply(&g.mul(x, n)), k.quotient_map.apply(x));
            }
        }
    }
}

pub fn s3_transpositions_map_to_the_nontrivial_class() {
    let g = catalog::get("S3").unwrap();
    let series = prime_cyclic_series(&g).unwrap();
    let k = kk_embed(&g, series.terms[1].generators()).unwrap();
    for x in g.elements().unwrap() {
        let is_transposition = g.element_order(x) == 2;
        let top = k.hom.apply(x).as_wreath().unwrap().top.as_ref().clone();
        assert_eq!(top != k.quotient.identity(), is_transposition, "{x}");
    }
}

pub fn q8_range_is_all_pairs() {
    let q8 = catalog::get("Q8").unwrap();
    let series = prime_cyclic_series(&q8).unwrap();
    assert_eq!(series.quotient_orders, vec![2, 2, 2]);
    let emb = series_embed(&series).unwrap();
    assert_eq!(emb.hom.codomain().order().unwrap().unwrap(), 128u32.into());
    let cert = verify_homomorphism_injective(&emb.hom, None).unwrap();
    assert_eq!(cert.check("homomorphism").unwrap().range, "all 64 pairs");
    assert!(cert.passed());
}

pub fn z6_generator_has_order_six() {
    let z6 = Group::cyclic(6);
    let series = prime_cyclic_series(&z6).unwrap();
    let emb = series_embed(&series).unwrap();
    let w = emb.hom.codomain();
    assert_eq!(w.element_order(&emb.hom.apply(&Elem::Residue(1))), 6);
}

mod tests {
    #[test]
    fn every_small_solvable_group_embeds() {
        super::every_small_solvable_group_embeds();
    }

    #[test]
    fn kk_step_projects_to_the_quotient() {
        super::kk_step_projects_to_the_quotient();
    }

    #[test]
    fn s3_transpositions_map_to_the_nontrivial_class() {
        super::s3_transpositions_map_to_the_nontrivial_class();
    }

    #[test]
    fn q8_range_is_all_pairs() {
        super::q8_range_is_all_pairs();
    }

    #[test]
    fn z6_generator_has_order_six() {
        super::z6_generator_has_order_six();
    }
}
