//! Homomorphisms out of `N≀H` assembled from `φ: H → G` and a family
//! `ψ_g: N → G` indexed by the elements of `H`:
//! `ω(F, h) = (∏_{g∈H} ψ_g(F(g)))·φ(h)`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Certificate, ChainRecord, Check};
use crate::group::document::GroupDoc;
use crate::group::{Elem, Group, GroupError};
use crate::hom::{HomError, HomSpecDoc, Homomorphism};
use crate::wreath::verify_homomorphism_injective;

/// Default ball radius for infinite `N`.
pub const DEFAULT_BALL_RADIUS: usize = 2;
/// Random product orders tried per element.
pub const RANDOM_ORDERS: usize = 20;
/// Largest number of elements given the random-order test.
pub const RANDOM_ORDER_SAMPLE: usize = 2000;

#[derive(Debug, Error)]
pub enum OmegaError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error("psi family has {found} maps but the top group has {expected} elements")]
    FamilySize { expected: usize, found: usize },
    #[error("hypotheses were not verified for this input")]
    HypothesesNotVerified,
}

#[derive(Clone, Debug)]
pub struct OmegaInput {
    pub top: Arc<Group>,
    pub base: Arc<Group>,
    pub codomain: Arc<Group>,
    pub phi: Homomorphism,
    /// `psi[i]` is `ψ_g` for the i-th element `g` of `top` in canonical order.
    pub psi: Vec<Homomorphism>,
}

impl OmegaInput {
    pub fn new(phi: Homomorphism, psi: Vec<Homomorphism>) -> Result<OmegaInput, OmegaError> {
        let top = phi.domain().clone();
        let codomain = phi.codomain().clone();
        let expected = top.finite_order()?;
        if psi.len() != expected {
            return Err(OmegaError::FamilySize { expected, found: psi.len() });
        }
        let base = psi
            .first()
            .map(|p| p.domain().clone())
            .ok_or(OmegaError::FamilySize { expected, found: 0 })?;
        for p in &psi {
            if **p.domain() != *base || **p.codomain() != *codomain {
                return Err(GroupError::Unsupported(format!(
                    "psi map {} → {} does not match {} → {}",
                    p.domain(),
                    p.codomain(),
                    base,
                    codomain
                ))
                .into());
            }
        }
        Ok(OmegaInput { top, base, codomain, phi, psi })
    }

    pub fn psi_of(&self, g: &Elem) -> &Homomorphism {
        &self.psi[self.top.index_of(g).expect("top element")]
    }

    /// Identifies the input by its tabulated maps on the base range.
    fn fingerprint(&self, base_range: &[Elem]) -> u64 {
        let mut h = DefaultHasher::new();
        self.top.name().hash(&mut h);
        self.codomain.name().hash(&mut h);
        for x in self.top.elements().expect("finite top") {
            self.phi.apply(x).hash(&mut h);
        }
        for p in &self.psi {
            for x in base_range {
                p.apply(x).hash(&mut h);
            }
        }
        h.finish()
    }
}

/// Outcome of [`check_omega_hypotheses`], required by [`build_omega`].
#[derive(Clone, Debug)]
pub struct HypothesisReport {
    pub certificate: Certificate,
    pub bound: Option<usize>,
    fingerprint: u64,
}

fn base_range(inp: &OmegaInput, bound: Option<usize>) -> Result<Vec<Elem>, GroupError> {
    let radius = if inp.base.is_finite() { None } else { Some(bound.unwrap_or(DEFAULT_BALL_RADIUS)) };
    inp.base.enumerate(radius)
}

/// Checks `φ(h)ψ_g(x)φ(h⁻¹) = ψ_{hg}(x)` for all `(x, g, h)` and
/// `ψ_g(x)ψ_h(y) = ψ_h(y)ψ_g(x)` for all `(x, y)` and `g ≠ h`, over all of
/// `N` or its generator ball.
pub fn check_omega_hypotheses(inp: &OmegaInput, bound: Option<usize>) -> Result<HypothesisReport, OmegaError> {
    let xs = base_range(inp, bound)?;
    let hs = inp.top.elements()?.to_vec();
    let cod = &inp.codomain;
    let range_desc = |what: &str| {
        if inp.base.is_finite() {
            format!("all {what}")
        } else {
            format!("{what} over the ball of radius {} ({} elements)", bound.unwrap_or(DEFAULT_BALL_RADIUS), xs.len())
        }
    };
    let mut checks = Vec::new();
    let phi_cert = verify_homomorphism_injective(&inp.phi, None)?;
    let phi_check = phi_cert.check("homomorphism").expect("present").clone();
    checks.push(Check { name: "phi homomorphism".into(), ..phi_check });
    for (g, p) in hs.iter().zip(&inp.psi) {
        let radius = if inp.base.is_finite() { None } else { Some(bound.unwrap_or(DEFAULT_BALL_RADIUS)) };
        let c = verify_homomorphism_injective(p, radius)?;
        let hc = c.check("homomorphism").expect("present").clone();
        checks.push(Check { name: format!("psi_{g} homomorphism"), ..hc });
    }

    let psi_vals: Vec<Vec<Elem>> = inp.psi.iter().map(|p| xs.iter().map(|x| p.apply(x)).collect()).collect();
    let phi_vals: Vec<Elem> = hs.iter().map(|h| inp.phi.apply(h)).collect();
    let idx = |g: &Elem| inp.top.index_of(g).expect("top element");

    let mut conj_witness = None;
    'outer: for (xi, x) in xs.iter().enumerate() {
        for (gi, g) in hs.iter().enumerate() {
            for (hi, h) in hs.iter().enumerate() {
                let lhs = cod.mul(&cod.mul(&phi_vals[hi], &psi_vals[gi][xi]), &cod.inv(&phi_vals[hi]));
                let hg = idx(&inp.top.mul(h, g));
                if lhs != psi_vals[hg][xi] {
                    conj_witness = Some(format!("(x={x}, g={g}, h={h})"));
                    break 'outer;
                }
            }
        }
    }
    checks.push(Check::from_outcome(
        "conjugation compatibility",
        range_desc(&format!("{} triples (x, g, h)", xs.len() * hs.len() * hs.len())),
        conj_witness,
    ));

    let n = xs.len();
    let comm_witness = (0..hs.len()).into_par_iter().find_map_first(|gi| {
        for hi in 0..hs.len() {
            if gi == hi {
                continue;
            }
            for xi in 0..n {
                for yi in 0..n {
                    let a = &psi_vals[gi][xi];
                    let b = &psi_vals[hi][yi];
                    if cod.mul(a, b) != cod.mul(b, a) {
                        return Some(format!("(x={}, y={}, g={}, h={})", xs[xi], xs[yi], hs[gi], hs[hi]));
                    }
                }
            }
        }
        None
    });
    checks.push(Check::from_outcome(
        "distinct factors commute",
        range_desc(&format!("{} quadruples (x, y, g≠h)", n * n * hs.len() * hs.len().saturating_sub(1))),
        comm_witness,
    ));

    let record = ChainRecord::new("check_omega_hypotheses", "hypotheses of the ω assembly")
        .param("top", inp.top.name())
        .param("base", inp.base.name())
        .param("codomain", cod.name());
    Ok(HypothesisReport {
        certificate: Certificate::single(record, checks),
        bound,
        fingerprint: inp.fingerprint(&xs),
    })
}

/// `ω(F, h)` with the product taken in the given order of top indices.
fn omega_in_order(inp: &OmegaInput, order: &[usize], x: &Elem) -> Elem {
    let w = x.as_wreath().expect("wreath element");
    let cod = &inp.codomain;
    let prod = order.iter().fold(cod.identity(), |acc, &i| cod.mul(&acc, &inp.psi[i].apply(&w.base[i])));
    cod.mul(&prod, &inp.phi.apply(&w.top))
}

#[derive(Clone, Debug)]
pub struct Omega {
    pub hom: Homomorphism,
    pub certificate: Certificate,
}

/// Assembles `ω: N≀H → G`, multiplying in the canonical order of `H`.
/// Refuses unless `report` is a passing hypothesis check of this input.
pub fn build_omega(inp: &OmegaInput, report: &HypothesisReport) -> Result<Omega, OmegaError> {
    let xs = base_range(inp, report.bound)?;
    if !report.certificate.passed() || report.fingerprint != inp.fingerprint(&xs) {
        return Err(OmegaError::HypothesesNotVerified);
    }
    let domain = Group::wreath(inp.base.clone(), inp.top.clone())?;
    let k = inp.top.finite_order()?;
    let canonical: Vec<usize> = (0..k).collect();
    let shared = inp.clone();
    let hom = Homomorphism::from_fn(domain.clone(), inp.codomain.clone(), "ω assembly", move |x| {
        omega_in_order(&shared, &canonical, x)
    })
    .tabulated();

    let mut cert = report.certificate.clone();
    let radius = if domain.is_finite() { None } else { Some(report.bound.unwrap_or(DEFAULT_BALL_RADIUS)) };
    let verified = verify_homomorphism_injective(&hom, radius)?;
    let hc = verified.check("homomorphism").expect("present").clone();
    cert.checks.push(Check { name: "omega homomorphism".into(), ..hc });

    let elems = domain.enumerate(radius)?;
    let step = elems.len().div_ceil(RANDOM_ORDER_SAMPLE).max(1);
    let sample: Vec<&Elem> = elems.iter().step_by(step).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x006f_6d65_6761);
    let orders: Vec<Vec<usize>> = (0..RANDOM_ORDERS)
        .map(|_| {
            let mut o: Vec<usize> = (0..k).collect();
            o.shuffle(&mut rng);
            o
        })
        .collect();
    let order_witness = sample.par_iter().find_map_first(|x| {
        let expected = hom.apply(x);
        orders
            .iter()
            .find(|o| omega_in_order(inp, o, x) != expected)
            .map(|o| format!("{x} under order {o:?}"))
    });
    cert.checks.push(Check::from_outcome(
        "product order independence",
        format!("{} elements × {RANDOM_ORDERS} random orders", sample.len()),
        order_witness,
    ));
    cert.chain.push(
        ChainRecord::new("build_omega", "ω(F,h) = (∏ ψ_g(F(g)))·φ(h), product in canonical order")
            .param("domain", domain.name())
            .param("codomain", inp.codomain.name()),
    );
    Ok(Omega { hom, certificate: cert })
}

/// Declarative ω input: groups plus generator images of `φ` and each `ψ_g`
/// (listed in the canonical order of the top group).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaDoc {
    pub top: GroupDoc,
    pub base: GroupDoc,
    pub codomain: GroupDoc,
    pub phi: HomSpecDoc,
    pub psi: Vec<HomSpecDoc>,
}

impl OmegaDoc {
    pub fn parse(text: &str) -> Result<OmegaDoc, GroupError> {
        serde_json::from_str(text).map_err(|e| GroupError::Document(e.to_string()))
    }

    pub fn build(&self) -> Result<OmegaInput, OmegaError> {
        let top = self.top.build()?;
        let base = self.base.build()?;
        let codomain = self.codomain.build()?;
        let phi = self.phi.build(&top, &codomain, "phi")?;
        let psi = self
            .psi
            .iter()
            .enumerate()
            .map(|(i, d)| d.build(&base, &codomain, &format!("psi_{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        OmegaInput::new(phi, psi)
    }
}
