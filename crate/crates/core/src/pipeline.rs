//! End-to-end runs behind the command-line tool. A run is a pure function
//! of its [`PipelineRequest`] and a timestamp, so a certificate can be
//! replayed byte for byte.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::blocks::{self, ActElem, BlockError, Built};
use crate::certificate::{Certificate, ChainRecord, Check};
use crate::group::{catalog, derived_series, document::GroupDoc, prime_cyclic_series, Elem, Group, GroupError, GroupKind, WreathElement};
use crate::hom::{HomError, Homomorphism};
use crate::ledger::{self, effectiveness_certificate, Ledger, LedgerElem, LedgerError};
use crate::omega::{build_omega, check_omega_hypotheses, OmegaError, OmegaInput};
use crate::wreath::{kk_embed_extension, series_embed, EmbedError, SeriesEmbedding};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("parameter out of bounds: {0}")]
    Bounds(String),
    #[error("request: {0}")]
    Request(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Embed,
    Block,
    Cork,
    Catalog,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LedgerMode {
    #[default]
    Weak,
    Equivariant,
    SteinShadow,
}

/// Parameter caps; the defaults can be raised per request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_r: usize,
    pub max_n: usize,
    pub max_m: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_r: 4, max_n: 6, max_m: 3 }
    }
}

pub const DEFAULT_BALL: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineRequest {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDoc>,
    #[serde(default)]
    pub n: Vec<usize>,
    pub m: usize,
    pub ball: usize,
    pub window: i64,
    #[serde(default)]
    pub mode: LedgerMode,
    #[serde(default)]
    pub limits: Limits,
}

impl PipelineRequest {
    pub fn new(command: Command) -> PipelineRequest {
        PipelineRequest {
            command,
            group: None,
            n: Vec::new(),
            m: 1,
            ball: DEFAULT_BALL,
            window: blocks::DEFAULT_WINDOW,
            mode: LedgerMode::Weak,
            limits: Limits::default(),
        }
    }

    fn check_bounds(&self) -> Result<(), PipelineError> {
        let l = &self.limits;
        if self.n.len() > l.max_r {
            return Err(PipelineError::Bounds(format!("r = {} exceeds {}", self.n.len(), l.max_r)));
        }
        if let Some(n) = self.n.iter().find(|&&n| n > l.max_n) {
            return Err(PipelineError::Bounds(format!("n = {n} exceeds {}", l.max_n)));
        }
        if self.m == 0 || self.m > l.max_m {
            return Err(PipelineError::Bounds(format!("m = {} is outside 1..={}", self.m, l.max_m)));
        }
        if self.ball == 0 {
            return Err(PipelineError::Bounds("ball must be positive".into()));
        }
        if self.window < 0 {
            return Err(PipelineError::Bounds("window must be non-negative".into()));
        }
        Ok(())
    }

    fn group(&self) -> Result<Arc<Group>, PipelineError> {
        let doc = self.group.as_ref().ok_or_else(|| PipelineError::Request("--group is required".into()))?;
        Ok(doc.build()?)
    }
}

/// Runs a request. Errors become failing certificates, so the result is
/// always a certificate to write.
pub fn run(req: &PipelineRequest, timestamp: u64) -> Certificate {
    let mut cert = match execute(req) {
        Ok(c) => c,
        Err(e) => failure_certificate(e),
    };
    cert.request = Some(serde_json::to_value(req).expect("request serializes"));
    cert.timestamp = timestamp;
    cert
}

fn failure_certificate(e: PipelineError) -> Certificate {
    let mut cert = match &e {
        PipelineError::Embed(EmbedError::Verification(c)) => (**c).clone(),
        _ => Certificate::new(),
    };
    cert.checks.push(Check::fail("pipeline completed", "request", e.to_string()));
    cert
}

fn execute(req: &PipelineRequest) -> Result<Certificate, PipelineError> {
    req.check_bounds()?;
    match req.command {
        Command::Catalog => Ok(catalog_certificate()),
        Command::Embed => embed(&req.group()?).map(|(_, c)| c),
        Command::Block => {
            if req.n.is_empty() {
                return Err(PipelineError::Request("--n needs at least one size".into()));
            }
            let (_, cert) = block_chain(&req.n)?;
            Ok(cert)
        }
        Command::Cork => cork(req),
    }
}

fn catalog_certificate() -> Certificate {
    let entries: Vec<Value> = catalog::ENTRIES
        .iter()
        .map(|e| {
            let g = catalog::get(e.name).expect("catalog entry");
            let order = g.order().ok().flatten().map(|o| o.to_string());
            let solvable = derived_series(&g).is_ok();
            json!({ "name": e.name, "description": e.description, "order": order, "solvable": solvable })
        })
        .collect();
    let mut cert = Certificate::single(
        ChainRecord::new("catalog", "built-in groups").param("count", entries.len()),
        vec![Check::pass("catalog listed", format!("{} groups", entries.len()))],
    );
    cert.data.insert("catalog".into(), Value::Array(entries));
    cert
}

/// Prime-cyclic series and the iterated embedding for finite solvable
/// groups; the single Krasner–Kaloujnine step for extensions of `Z^m`.
pub fn embed(g: &Arc<Group>) -> Result<(Option<SeriesEmbedding>, Certificate), PipelineError> {
    if matches!(g.kind(), GroupKind::AbelianByFinite(_)) && !g.is_finite() {
        let k = kk_embed_extension(g)?;
        return Ok((None, k.certificate));
    }
    let series = prime_cyclic_series(g)?;
    let emb = series_embed(&series)?;
    let mut cert = Certificate::single(
        ChainRecord::new("prime_cyclic_series", "subnormal series with prime cyclic quotients")
            .param("group", g.name())
            .param("quotient_orders", series.quotient_orders.clone()),
        vec![Check::from_outcome(
            "series valid",
            format!("{} terms", series.length() + 1),
            series.verify().err().map(|e| e.to_string()),
        )],
    );
    cert.absorb(emb.certificate.clone());
    Ok((Some(emb), cert))
}

/// `zn_block(n_r)`, then `wreath_glue(zn_block(n_i), ·)` outward, then
/// amplification. Returns the amplified action of `Z_{n_r}≀…≀Z_{n_1}`.
pub fn block_chain(ns: &[usize]) -> Result<(Built, Certificate), PipelineError> {
    let r = ns.len();
    let mut cert = Certificate::new();
    let inner = blocks::zn_block(ns[r - 1])?;
    cert.absorb(inner.certificate);
    let mut acc = inner.action;
    for &n in ns[..r - 1].iter().rev() {
        let top = blocks::zn_block(n)?;
        cert.absorb(top.certificate);
        let glued = blocks::wreath_glue(&top.action, &acc)?;
        cert.absorb(glued.certificate);
        acc = glued.action;
    }
    let order = acc.group().plain().map(|g| g.finite_order()).transpose()?.unwrap_or(0);
    let expected = crate::wreath::iterated_wreath_order(ns);
    cert.checks.push(Check::from_outcome(
        "group order matches closed form",
        format!("sizes {ns:?}"),
        (num_bigint::BigUint::from(order) != expected).then(|| format!("{order} ≠ {expected}")),
    ));
    cert.data.insert("block".into(), acc.block().to_document());
    let amplified = blocks::p1_to_p2(&acc)?;
    cert.absorb(amplified.certificate.clone());
    Ok((amplified, cert))
}

fn cork(req: &PipelineRequest) -> Result<Certificate, PipelineError> {
    let g = req.group()?;
    if !g.is_finite() {
        return Err(PipelineError::Request(format!("cork needs a finite group, got {}", g.name())));
    }
    match req.mode {
        LedgerMode::Weak => weak_cork(&g, req),
        LedgerMode::SteinShadow => stein_cork(&g, req),
        LedgerMode::Equivariant => equivariant_cork(&g, req),
    }
}

/// A (P2) action of `g`: the amplified block action of the embedding
/// target, restricted along the embedding.
fn p2_action_of(g: &Arc<Group>) -> Result<(blocks::ShadowAction, Certificate), PipelineError> {
    let (emb, mut cert) = embed(g)?;
    let emb = emb.expect("finite group");
    if emb.quotients.is_empty() {
        let act = blocks::regular_action(g)?;
        cert.chain.push(ChainRecord::new("regular_action", "trivial group on one leaf"));
        return Ok((act, cert));
    }
    let sizes: Vec<usize> = emb.quotients.iter().map(|q| q.finite_order()).collect::<Result<_, _>>()?;
    let (amplified, block_cert) = block_chain(&sizes)?;
    cert.absorb(block_cert);
    let pulled = blocks::pullback(&amplified.action, &emb.hom)?;
    cert.absorb(pulled.certificate);
    Ok((pulled.action, cert))
}

fn ball_elements(w: &Arc<Group>, count: usize) -> Result<Vec<LedgerElem>, PipelineError> {
    w.ball_of_size(count).iter().map(|x| Ok(LedgerElem::from_wreath(w, x)?)).collect()
}

fn weak_cork(g: &Arc<Group>, req: &PipelineRequest) -> Result<Certificate, PipelineError> {
    let (act, mut cert) = p2_action_of(g)?;
    let ledger = Ledger::weak(&act, req.m)?;
    let w = Group::wreath(Group::free_abelian(req.m), g.clone())?;
    let elems = ball_elements(&w, req.ball)?;
    cert.absorb(effectiveness_certificate(&ledger, &elems, &format!("breadth-first ball of {}", w.name())));
    Ok(cert)
}

fn stein_cork(g: &Arc<Group>, _req: &PipelineRequest) -> Result<Certificate, PipelineError> {
    let (act, mut cert) = p2_action_of(g)?;
    let elems: Vec<ActElem> = g.elements()?.iter().cloned().map(ActElem::Plain).collect();
    cert.absorb(ledger::stein_shadow_certificate(&act, &elems, &format!("all of {}", g.name()))?);
    Ok(cert)
}

/// The equivariant ledger, with the doubled exponents realized as
/// `ω(F, h) = (∏ ψ_g(F(g)))·φ(h)` for `ψ_g(v) = (2v at g; 1)` and
/// `φ(h) = (0; h)` in `Z^m ≀ H`.
fn equivariant_cork(h: &Arc<Group>, req: &PipelineRequest) -> Result<Certificate, PipelineError> {
    let m = req.m;
    let zm = Group::free_abelian(m);
    let w = Group::wreath(zm.clone(), h.clone())?;
    let hs = h.elements()?.to_vec();
    let zero = move || Elem::Vector(vec![BigInt::from(0); m]);
    let phi = {
        let k = hs.len();
        Homomorphism::from_fn(h.clone(), w.clone(), "top inclusion h ↦ (0; h)", move |x| {
            Elem::Wreath(WreathElement { base: vec![zero(); k], top: Box::new(x.clone()) })
        })
        .tabulated()
    };
    let psi: Vec<Homomorphism> = (0..hs.len())
        .map(|i| {
            let (k, id) = (hs.len(), h.identity());
            Homomorphism::from_fn(zm.clone(), w.clone(), format!("doubled coordinate at {}", hs[i]), move |v| {
                let mut base = vec![zero(); k];
                let doubled: Vec<BigInt> = v.as_vector().expect("vector").iter().map(|c| c * 2).collect();
                base[i] = Elem::Vector(doubled);
                Elem::Wreath(WreathElement { base, top: Box::new(id.clone()) })
            })
        })
        .collect();
    let inp = OmegaInput::new(phi, psi)?;
    let report = check_omega_hypotheses(&inp, None)?;
    let omega = build_omega(&inp, &report)?;
    let mut cert = omega.certificate;

    let ledger = Ledger::equivariant(h, m)?;
    let ball = w.ball_of_size(req.ball);
    let mismatch = ball.iter().find_map(|x| {
        let direct = ledger::equivariant_twist_label(&w, x).ok()?;
        let Elem::Wreath(y) = omega.hom.apply(x) else { return Some(x.to_string()) };
        let mut via = ledger::TwistLabel::new();
        for (g, v) in hs.iter().zip(&y.base) {
            for (j, c) in v.as_vector().unwrap_or_default().iter().enumerate() {
                via.add(ledger::Site::new(ledger::SitePoint::Element(g.clone()), j + 1), c.clone());
            }
        }
        via.add(ledger::Site::new(ledger::SitePoint::Element((*y.top).clone()), 1), BigInt::from(1));
        (via != direct).then(|| x.to_string())
    });
    cert.checks.push(Check::from_outcome(
        "ω image plus δ equals the twist label",
        format!("{} elements: breadth-first ball of {}", ball.len(), w.name()),
        mismatch,
    ));
    let elems = ball_elements(&w, req.ball)?;
    cert.absorb(effectiveness_certificate(&ledger, &elems, &format!("breadth-first ball of {}", w.name())));
    cert.absorb(ledger::cayley_complex(h)?.certificate);
    Ok(cert)
}

/// Replays the request stored in a certificate with its original timestamp
/// and compares the output byte for byte.
pub fn verify(text: &str) -> Certificate {
    let mut cert = Certificate::single(ChainRecord::new("verify", "deterministic replay"), Vec::new());
    cert.request = Some(json!({ "command": "verify" }));
    let original = match Certificate::from_json(text) {
        Ok(c) => c,
        Err(e) => {
            cert.checks.push(Check::fail("certificate parses", "input", e.to_string()));
            return cert;
        }
    };
    cert.checks.push(Check::pass("certificate parses", "input"));
    cert.timestamp = original.timestamp;
    let digest = original.content_digest();
    cert.checks.push(Check::from_outcome(
        "digest matches content",
        "SHA-256 of the certificate body",
        (original.digest.as_deref() != Some(digest.as_str())).then(|| format!("recorded {:?}, computed {digest}", original.digest)),
    ));
    let req = match original.request.clone().map(serde_json::from_value::<PipelineRequest>) {
        Some(Ok(r)) => r,
        Some(Err(e)) => {
            cert.checks.push(Check::fail("request recorded", "input", e.to_string()));
            return cert;
        }
        None => {
            cert.checks.push(Check::fail("request recorded", "input", "no request field"));
            return cert;
        }
    };
    cert.checks.push(Check::pass("request recorded", "input"));
    cert.chain[0] = cert.chain[0].clone().param("command", serde_json::to_value(req.command).expect("command"));
    let failed: Vec<String> = original.failures().map(|c| c.name.clone()).collect();
    cert.checks.push(Check::from_outcome(
        "recorded checks pass",
        format!("{} checks", original.checks.len()),
        (!failed.is_empty()).then(|| failed.join(", ")),
    ));
    let replay = run(&req, original.timestamp).to_json();
    let diff = first_difference(text, &replay);
    cert.checks.push(Check::from_outcome("replay reproduces the certificate", "byte comparison", diff));
    cert
}

fn first_difference(a: &str, b: &str) -> Option<String> {
    if a == b {
        return None;
    }
    let line = a.lines().zip(b.lines()).position(|(x, y)| x != y).unwrap_or_else(|| a.lines().count().min(b.lines().count()));
    Some(format!("first difference at line {}", line + 1))
}
