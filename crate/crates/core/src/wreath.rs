//! Wreath-product arithmetic and the Krasner–Kaloujnine embeddings.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::certificate::{Certificate, ChainRecord, Check};
use crate::group::{Elem, Group, GroupError, GroupKind, SubnormalSeries, Subgroup, WreathElement};
use crate::hom::Homomorphism;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("internal error: embedding failed verification")]
    Verification(Box<Certificate>),
}

/// `x ↦ F(g⁻¹x)` for a base map stored over the top's canonical element list.
pub fn wreath_shift(top: &Group, g: &Elem, f: &[Elem]) -> Result<Vec<Elem>, GroupError> {
    top.check(g)?;
    let n = top.finite_order()?;
    if f.len() != n {
        return Err(GroupError::Unsupported(format!("base map has {} values, top has {n} elements", f.len())));
    }
    Ok(crate::group::shift_base(top, g, f))
}

/// Product in `w`, rejecting elements of other groups.
pub fn wreath_multiply(w: &Group, x: &Elem, y: &Elem) -> Result<Elem, GroupError> {
    if !matches!(w.kind(), GroupKind::Wreath { .. }) {
        return Err(GroupError::Unsupported(format!("{} is not a wreath product", w.name())));
    }
    w.try_mul(x, y)
}

/// Top-group components of a wreath product.
pub fn wreath_parts(w: &Group) -> Option<(&Arc<Group>, &Arc<Group>)> {
    match w.kind() {
        GroupKind::Wreath { base, top } => Some((base, top)),
        _ => None,
    }
}

/// Verifies multiplicativity on all pairs of the range and kernel
/// triviality on the range. Finite domains use every element; infinite ones
/// the generator ball of radius `bound`.
pub fn verify_homomorphism_injective(h: &Homomorphism, bound: Option<usize>) -> Result<Certificate, GroupError> {
    let dom = h.domain();
    let cod = h.codomain();
    let elems = dom.enumerate(bound)?;
    let n = elems.len();
    let range = if dom.is_finite() {
        format!("all {} pairs", n * n)
    } else {
        format!("ball of radius {} ({n} elements, {} pairs)", bound.unwrap_or(0), n * n)
    };
    let images: Vec<Elem> = elems.par_iter().map(|x| h.apply(x)).collect();
    let hom_witness = (0..n).into_par_iter().find_map_first(|i| {
        (0..n).find_map(|j| {
            let lhs = h.apply(&dom.mul(&elems[i], &elems[j]));
            let rhs = cod.mul(&images[i], &images[j]);
            (lhs != rhs).then(|| format!("({}, {})", elems[i], elems[j]))
        })
    });
    let id = cod.identity();
    let identity_ok = h.apply(&dom.identity()) == id;
    let kernel_witness = elems
        .iter()
        .zip(&images)
        .find(|(x, y)| **y == id && !dom.is_identity(x))
        .map(|(x, _)| x.to_string());
    let mut seen: HashMap<&Elem, &Elem> = HashMap::with_capacity(n);
    let mut collision = None;
    for (x, y) in elems.iter().zip(&images) {
        if let Some(prev) = seen.insert(y, x) {
            collision = Some(format!("({prev}, {x})"));
            break;
        }
    }
    let record = ChainRecord::new("verify_homomorphism_injective", "exhaustive oracle")
        .param("domain", dom.name())
        .param("codomain", cod.name())
        .param("map", h.provenance());
    let checks = vec![
        Check::from_outcome("homomorphism", range.clone(), hom_witness),
        Check::from_outcome("identity preserved", "1", (!identity_ok).then(|| dom.identity().to_string())),
        Check::from_outcome("trivial kernel", format!("{n} elements"), kernel_witness),
        Check::from_outcome("distinct images", format!("{n} elements"), collision),
    ];
    Ok(Certificate::single(record, checks))
}

/// The Krasner–Kaloujnine embedding `G ↪ N≀(G/N)` with its quotient data.
#[derive(Clone, Debug)]
pub struct KkEmbedding {
    pub hom: Homomorphism,
    pub quotient_map: Homomorphism,
    pub normal: Arc<Group>,
    pub quotient: Arc<Group>,
    /// `(q, t(q))` for every `q` in the quotient's canonical order.
    pub transversal: Vec<(Elem, Elem)>,
    pub certificate: Certificate,
}

impl KkEmbedding {
    pub fn target(&self) -> &Arc<Group> {
        self.hom.codomain()
    }
}

/// How the quotient `G/N` is presented as a group.
struct Cosets {
    /// Coset number of each element of `G`; the identity coset is 0, the
    /// rest are numbered by minimal representative.
    coset_of: HashMap<Elem, usize>,
    reps: Vec<Elem>,
    quotient: Arc<Group>,
    /// Coset number → quotient element and back.
    encode: Vec<Elem>,
    decode: HashMap<Elem, usize>,
}

fn cosets(g: &Group, n: &Subgroup) -> Result<Cosets, GroupError> {
    let mut coset_of: HashMap<Elem, usize> = HashMap::new();
    let mut reps = Vec::new();
    let id = g.identity();
    for x in std::iter::once(&id).chain(g.elements()?.iter()) {
        if coset_of.contains_key(x) {
            continue;
        }
        let c = reps.len();
        reps.push(x.clone());
        for m in n.elements() {
            coset_of.insert(g.mul(x, m), c);
        }
    }
    let q = reps.len();
    let idx = |x: &Elem| coset_of[x];
    // cyclic quotients are written as Z_q via the smallest generating coset
    let generator = g.elements()?.iter().find(|x| {
        let mut y = (*x).clone();
        let mut k = 1;
        while idx(&y) != 0 {
            y = g.mul(&y, x);
            k += 1;
        }
        k == q
    });
    let (quotient, encode) = match generator {
        Some(x) => {
            let mut encode = vec![Elem::Residue(0); q];
            let mut y = g.identity();
            for k in 0..q {
                encode[idx(&y)] = Elem::Residue(k as u64);
                y = g.mul(&y, x);
            }
            (Group::cyclic(q as u64), encode)
        }
        None => {
            let table = (0..q)
                .flat_map(|a| (0..q).map(move |b| (a, b)))
                .map(|(a, b)| idx(&g.mul(&reps[a], &reps[b])) as u32)
                .collect();
            let t = crate::group::CayleyTable::new(q, table)?;
            (Group::table(t), (0..q as u32).map(Elem::Index).collect())
        }
    };
    let decode = encode.iter().cloned().enumerate().map(|(c, e)| (e, c)).collect();
    Ok(Cosets { coset_of, reps, quotient, encode, decode })
}

/// Embeds a finite `g` into `N≀(G/N)` for the normal subgroup generated by
/// `normal_gens`, using the transversal `t(1̄) = 1` and minimal coset
/// representatives otherwise. Cyclic quotients are presented as `Z_q`.
pub fn kk_embed(g: &Arc<Group>, normal_gens: &[Elem]) -> Result<KkEmbedding, EmbedError> {
    for x in normal_gens {
        g.check(x)?;
    }
    let n_sub = Subgroup::generated(g, normal_gens);
    if let Some((a, x)) = n_sub.normality_witness(g, &Subgroup::whole(g)?) {
        return Err(GroupError::NotNormal { g: a.to_string(), n: x.to_string() }.into());
    }
    let normal = n_sub.as_group(g);
    let cs = cosets(g, &n_sub)?;
    let quotient = cs.quotient.clone();
    let target = Group::wreath(normal.clone(), quotient.clone())?;
    let q_elems = quotient.elements()?.to_vec();
    let rep_of = |q: &Elem| &cs.reps[cs.decode[q]];
    let pi = |x: &Elem| cs.encode[cs.coset_of[x]].clone();

    let mut table = HashMap::new();
    let mut quotient_table = HashMap::new();
    for x in g.elements()? {
        let px = pi(x);
        let px_inv = quotient.inv(&px);
        let base = q_elems
            .iter()
            .map(|q| {
                let tq_inv = g.inv(rep_of(q));
                let shifted = rep_of(&quotient.mul(&px_inv, q));
                g.mul(&g.mul(&tq_inv, x), shifted)
            })
            .collect();
        table.insert(x.clone(), Elem::Wreath(WreathElement { base, top: Box::new(px.clone()) }));
        quotient_table.insert(x.clone(), px);
    }
    let hom = Homomorphism::from_table(g.clone(), target.clone(), table, "Krasner–Kaloujnine embedding")
        .map_err(|e| GroupError::Unsupported(e.to_string()))?;
    let quotient_map = Homomorphism::from_table(g.clone(), quotient.clone(), quotient_table, "quotient map")
        .map_err(|e| GroupError::Unsupported(e.to_string()))?;

    let mut cert = verify_homomorphism_injective(&hom, None)?;
    let top_witness = g
        .elements()?
        .iter()
        .find(|x| *hom.apply(x).as_wreath().expect("wreath image").top != quotient_map.apply(x))
        .map(|x| x.to_string());
    cert.checks.push(Check::from_outcome(
        "top projection equals quotient map",
        format!("all {} elements", g.finite_order()?),
        top_witness,
    ));
    let transversal: Vec<(Elem, Elem)> = q_elems.iter().map(|q| (q.clone(), rep_of(q).clone())).collect();
    cert.chain[0] = ChainRecord::new("kk_embed", "Krasner–Kaloujnine embedding into N≀(G/N)")
        .param("group", g.name())
        .param("normal_generators", n_sub.generators().iter().map(|x| x.to_string()).collect::<Vec<_>>())
        .param("quotient", quotient.name())
        .param(
            "transversal",
            transversal.iter().map(|(q, t)| json!([q.to_string(), t.to_string()])).collect::<Vec<_>>(),
        );
    if !cert.passed() {
        return Err(EmbedError::Verification(Box::new(cert)));
    }
    Ok(KkEmbedding { hom, quotient_map, normal, quotient, transversal, certificate: cert })
}

/// Ball radius used to verify embeddings of infinite extensions.
pub const EXTENSION_BALL_RADIUS: usize = 3;

/// Embeds an extension `Z^m.H` into `Z^m≀H` with the transversal
/// `t(h) = (0, h)`; verified on the generator ball of radius 3.
pub fn kk_embed_extension(g: &Arc<Group>) -> Result<KkEmbedding, EmbedError> {
    let GroupKind::AbelianByFinite(ext) = g.kind() else {
        return Err(GroupError::Unsupported(format!("{} is not an extension of Z^m", g.name())).into());
    };
    let m = ext.rank();
    let h = ext.finite().clone();
    let normal = Group::free_abelian(m);
    let target = Group::wreath(normal.clone(), h.clone())?;
    let h_elems = h.elements()?.to_vec();
    let section = move |x: &Elem| Elem::Pair(vec![BigInt::from(0); m], Box::new(x.clone()));
    let gg = g.clone();
    let hh = h.clone();
    let hom = Homomorphism::from_fn(g.clone(), target.clone(), "Krasner–Kaloujnine embedding", move |x| {
        let Elem::Pair(_, px) = x else { panic!("{x} is not an extension element") };
        let px_inv = hh.inv(px);
        let base = h_elems
            .iter()
            .map(|q| {
                let t = gg.mul(&gg.mul(&gg.inv(&section(q)), x), &section(&hh.mul(&px_inv, q)));
                match t {
                    Elem::Pair(v, _) => Elem::Vector(v),
                    _ => unreachable!(),
                }
            })
            .collect();
        Elem::Wreath(WreathElement { base, top: px.clone() })
    });
    let quotient_map = Homomorphism::from_fn(g.clone(), h.clone(), "quotient map", |x| match x {
        Elem::Pair(_, px) => (**px).clone(),
        _ => panic!("{x} is not an extension element"),
    });
    let mut cert = verify_homomorphism_injective(&hom, Some(EXTENSION_BALL_RADIUS))?;
    let ball = g.ball(EXTENSION_BALL_RADIUS);
    let top_witness = ball
        .iter()
        .find(|x| *hom.apply(x).as_wreath().expect("wreath image").top != quotient_map.apply(x))
        .map(|x| x.to_string());
    cert.checks.push(Check::from_outcome(
        "top projection equals quotient map",
        format!("ball of radius {EXTENSION_BALL_RADIUS} ({} elements)", ball.len()),
        top_witness,
    ));
    let transversal: Vec<(Elem, Elem)> = h.elements()?.iter().map(|q| (q.clone(), section(q))).collect();
    cert.chain[0] = ChainRecord::new("kk_embed", "Krasner–Kaloujnine embedding into Z^m≀H")
        .param("group", g.name())
        .param("quotient", h.name())
        .param("transversal", "t(h) = (0, h)");
    if !cert.passed() {
        return Err(EmbedError::Verification(Box::new(cert)));
    }
    Ok(KkEmbedding { hom, quotient_map, normal, quotient: h, transversal, certificate: cert })
}

/// `N≀Q → W≀Q`, applying `e: N → W` to every base coordinate.
pub fn lift_base(e: &Homomorphism, domain: &Arc<Group>) -> Result<Homomorphism, GroupError> {
    let (_, top) = wreath_parts(domain)
        .ok_or_else(|| GroupError::Unsupported(format!("{} is not a wreath product", domain.name())))?;
    let codomain = Group::wreath(e.codomain().clone(), top.clone())?;
    let e = e.clone();
    let provenance = format!("base lift of {}", e.provenance());
    Ok(Homomorphism::from_fn(domain.clone(), codomain, provenance, move |x| {
        let w = x.as_wreath().expect("wreath element");
        Elem::Wreath(WreathElement { base: w.base.iter().map(|b| e.apply(b)).collect(), top: w.top.clone() })
    }))
}

/// Random elements of a finite-top wreath product with finite base.
fn random_wreath_elements(w: &Group, count: usize, seed: u64) -> Result<Vec<Elem>, GroupError> {
    let (base, top) = wreath_parts(w).expect("wreath product");
    let b = base.elements()?;
    let t = top.elements()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let f = (0..t.len()).map(|_| b[rng.gen_range(0..b.len())].clone()).collect();
            Elem::Wreath(WreathElement { base: f, top: Box::new(t[rng.gen_range(0..t.len())].clone()) })
        })
        .collect())
}

pub const FUNCTORIALITY_SAMPLES: usize = 100;

/// Checks that a base lift is multiplicative and commutes with the inclusion
/// of the base at the identity coordinate, on seeded random elements.
pub fn check_base_functoriality(e: &Homomorphism, lifted: &Homomorphism, seed: u64) -> Result<Check, GroupError> {
    let dom = lifted.domain();
    let cod = lifted.codomain();
    let (_, top) = wreath_parts(dom).expect("wreath product");
    let xs = random_wreath_elements(dom, FUNCTORIALITY_SAMPLES, seed)?;
    let ys = random_wreath_elements(dom, FUNCTORIALITY_SAMPLES, seed ^ 0x9e37_79b9)?;
    let include = |w: &Group, b: Elem| {
        let (base, _) = wreath_parts(w).expect("wreath product");
        let mut f = vec![base.identity(); top.finite_order().expect("finite top")];
        f[top.index_of(&top.identity()).expect("identity")] = b;
        Elem::Wreath(WreathElement { base: f, top: Box::new(top.identity()) })
    };
    for (x, y) in xs.iter().zip(&ys) {
        if lifted.apply(&dom.mul(x, y)) != cod.mul(&lifted.apply(x), &lifted.apply(y)) {
            return Ok(Check::fail("base functoriality", "100 random pairs", format!("({x}, {y})")));
        }
        let n = &x.as_wreath().expect("wreath").base[0];
        if lifted.apply(&include(dom, n.clone())) != include(cod, e.apply(n)) {
            return Ok(Check::fail("base functoriality", "100 random pairs", n.to_string()));
        }
    }
    Ok(Check::pass("base functoriality", format!("{FUNCTORIALITY_SAMPLES} random pairs")))
}

/// An embedding of `G` into the left-nested iterated wreath product of the
/// series quotients, `H_r ≀ … ≀ H_1`.
#[derive(Clone, Debug)]
pub struct SeriesEmbedding {
    pub hom: Homomorphism,
    /// `H_1, …, H_r` as groups (cyclic when the quotient is).
    pub quotients: Vec<Arc<Group>>,
    pub certificate: Certificate,
}

impl SeriesEmbedding {
    pub fn target(&self) -> &Arc<Group> {
        self.hom.codomain()
    }
}

/// Subgroup of a finite-or-not group generated by `gens`, by breadth-first
/// closure; `None` beyond `cap` elements.
fn generated_size(group: &Group, gens: &[Elem], cap: usize) -> Option<usize> {
    let id = group.identity();
    let mut seen: HashSet<Elem> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for s in gens {
            let y = group.mul(s, &x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    Some(seen.len())
}

/// Embeds `series.group` into `H_r ≀ … ≀ H_1` by repeated
/// Krasner–Kaloujnine steps, lifting the inner embedding through each base.
pub fn series_embed(series: &SubnormalSeries) -> Result<SeriesEmbedding, EmbedError> {
    series.verify()?;
    let g = &series.group;
    let r = series.length();
    let mut cert = Certificate::new();
    if r == 0 {
        let hom = Homomorphism::identity(g);
        cert.chain.push(ChainRecord::new("series_embed", "trivial series").param("group", g.name()));
        cert.checks.push(Check::pass("trivial group", "1 element"));
        return Ok(SeriesEmbedding { hom, quotients: Vec::new(), certificate: cert });
    }
    let terms: Vec<Arc<Group>> = series.terms.iter().map(|t| t.as_group(g)).collect();
    let mut quotients = vec![Group::cyclic(1); r];
    // innermost step: G_{r-1} ≅ H_r since G_r is trivial
    let last = kk_embed(&terms[r - 1], &[])?;
    quotients[r - 1] = last.quotient.clone();
    let mut emb = last.quotient_map.clone();
    for i in (1..r).rev() {
        let step = kk_embed(&terms[i - 1], series.terms[i].generators())?;
        quotients[i - 1] = step.quotient.clone();
        let lifted = lift_base(&emb, step.target())?;
        cert.checks.push(check_base_functoriality(&emb, &lifted, i as u64)?);
        emb = lifted.after(&step.hom);
    }
    let target_order = emb.codomain().order()?.expect("finite target");
    let formula = iterated_wreath_order(&quotients.iter().map(|q| q.finite_order().unwrap_or(0)).collect::<Vec<_>>());
    let n = g.finite_order()?;
    let hom = Homomorphism::from_fn(g.clone(), emb.codomain().clone(), "iterated Krasner–Kaloujnine embedding", {
        let emb = emb.clone();
        move |x| emb.apply(x)
    })
    .tabulated();
    let mut verify = verify_homomorphism_injective(&hom, None)?;
    cert.checks.append(&mut verify.checks);
    let image_gens: Vec<Elem> = g.generators().iter().map(|x| hom.apply(x)).collect();
    let image_order = generated_size(hom.codomain(), &image_gens, n);
    cert.checks.push(Check::from_outcome(
        "image order equals group order",
        format!("{n} elements"),
        (image_order != Some(n)).then(|| format!("image order {image_order:?}")),
    ));
    cert.checks.push(Check::from_outcome(
        "target order matches closed form",
        target_order.to_string(),
        (num_bigint::BigUint::from(0u8) == formula || formula != target_order).then(|| formula.to_string()),
    ));
    cert.chain.push(
        ChainRecord::new("series_embed", "iterated Krasner–Kaloujnine embedding")
            .param("group", g.name())
            .param("quotient_orders", series.quotient_orders.clone())
            .param(
                "series",
                series
                    .terms
                    .iter()
                    .map(|t| t.generators().iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            )
            .param("target", hom.codomain().name()),
    );
    if !cert.passed() {
        return Err(EmbedError::Verification(Box::new(cert)));
    }
    Ok(SeriesEmbedding { hom, quotients, certificate: cert })
}

/// `|H_r ≀ … ≀ H_1|` from `sizes = [|H_1|, …, |H_r|]`: the innermost factor
/// is `|H_r|`, and each step raises to the top's size and multiplies by it.
pub fn iterated_wreath_order(sizes: &[usize]) -> num_bigint::BigUint {
    let Some((last, rest)) = sizes.split_last() else { return 1u8.into() };
    rest.iter()
        .rev()
        .fold(num_bigint::BigUint::from(*last), |acc, &q| num_traits::pow(acc, q) * q)
}
