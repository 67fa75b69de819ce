//! Twist bookkeeping: cork sites, the labels `2F + δ`, recovery of group
//! elements from labels, and label-injectivity certificates.

mod cayley;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::blocks::{check_p1_p2, ActElem, BlockError, CheckOptions, LeafAddr, ShadowAction};
use crate::certificate::{Certificate, ChainRecord, Check};
use crate::group::{Elem, Group, GroupError, GroupKind, WreathElement};

pub use cayley::{cayley_complex, CayleyComplex, HandleEdge};

pub const LABEL_AXIOM: &str =
    "twisting Gompf corks by distinct integer vectors yields pairwise nondiffeomorphic manifolds, so distinct labels name distinct twists";
pub const JOIN_AXIOM: &str = "a boundary sum of m Gompf corks is a Z^m-cork whose twists are indexed by Z^m";
pub const STEIN_AXIOM: &str = "the Stein-fillable construction distinguishes the twists at distinct orbit points";

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("the action has no certified (P2) witness")]
    MissingP2,
    #[error("label rank must be positive")]
    ZeroRank,
    #[error("{0} is not an element of Z^m ≀ G for this ledger")]
    NotLedgerElement(String),
}

/// Why a site map is not a twist label.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("not a twist label: no odd coordinate")]
    NoOddCoordinate,
    #[error("not a twist label: {} odd coordinates ({})", .0.len(), .0.join(", "))]
    MultipleOddCoordinates(Vec<String>),
    #[error("not a twist label: odd coordinate at {0} is not a first coordinate on the witness orbit")]
    OddSiteOffOrbit(String),
    #[error("not a twist label: value {value} at {site} lies off the witness orbit or outside the rank")]
    ResidualOffOrbit { site: String, value: String },
}

/// The three diagnoses a malformed label can receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelErrorClass {
    /// Zero or several odd coordinates.
    OddCount,
    OddSiteOffOrbit,
    /// Nonzero even values where the label must vanish.
    Residual,
}

impl LabelError {
    pub fn class(&self) -> LabelErrorClass {
        match self {
            LabelError::NoOddCoordinate | LabelError::MultipleOddCoordinates(_) => LabelErrorClass::OddCount,
            LabelError::OddSiteOffOrbit(_) => LabelErrorClass::OddSiteOffOrbit,
            LabelError::ResidualOffOrbit { .. } => LabelErrorClass::Residual,
        }
    }
}

/// Where a cork site sits: a leaf of a block (weak case) or an element of
/// the acting group (equivariant case).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SitePoint {
    /// Shared, since amplified leaf addresses are long.
    Leaf(Arc<LeafAddr>),
    Element(Elem),
}

impl fmt::Display for SitePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SitePoint::Leaf(l) => write!(f, "{l}"),
            SitePoint::Element(e) => write!(f, "{e}"),
        }
    }
}

/// A cork site `(point, j)` with `j` 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub point: SitePoint,
    pub coord: usize,
}

impl Site {
    pub fn new(point: SitePoint, coord: usize) -> Site {
        Site { point, coord }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.point, self.coord)
    }
}

/// A finitely supported integer labeling of sites; zero values are not
/// stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwistLabel {
    values: BTreeMap<Site, BigInt>,
}

impl TwistLabel {
    pub fn new() -> TwistLabel {
        TwistLabel::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Site, BigInt)>) -> TwistLabel {
        let mut l = TwistLabel::new();
        for (s, v) in entries {
            l.add(s, v);
        }
        l
    }

    pub fn add(&mut self, site: Site, v: BigInt) {
        let cur = self.values.remove(&site).unwrap_or_default() + v;
        if !cur.is_zero() {
            self.values.insert(site, cur);
        }
    }

    pub fn get(&self, site: &Site) -> BigInt {
        self.values.get(site).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, &BigInt)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn to_json(&self) -> Value {
        let m: Map<String, Value> = self.values.iter().map(|(s, v)| (s.to_string(), int_json(v))).collect();
        Value::Object(m)
    }
}

impl fmt::Display for TwistLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (s, v)) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}: {v}")?;
        }
        write!(f, "}}")
    }
}

fn int_json(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

/// An element `(F, g)` of `Z^m ≀ G` in ledger form: `F` keyed by elements
/// of the acting group, zero vectors omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LedgerElem {
    pub f: BTreeMap<ActElem, Vec<BigInt>>,
    pub g: ActElem,
}

impl LedgerElem {
    pub fn new(f: impl IntoIterator<Item = (ActElem, Vec<BigInt>)>, g: ActElem) -> LedgerElem {
        let f = f.into_iter().filter(|(_, v)| v.iter().any(|c| !c.is_zero())).collect();
        LedgerElem { f, g }
    }

    /// Reads an element of the group `Z^m ≀ G` (finite `G`).
    pub fn from_wreath(w: &Group, x: &Elem) -> Result<LedgerElem, LedgerError> {
        let (m, top) = free_abelian_wreath(w)?;
        let Elem::Wreath(WreathElement { base, top: t }) = x else {
            return Err(LedgerError::NotLedgerElement(x.to_string()));
        };
        let elems = top.elements()?;
        if base.len() != elems.len() {
            return Err(LedgerError::NotLedgerElement(x.to_string()));
        }
        let mut f = Vec::new();
        for (g, v) in elems.iter().zip(base) {
            match v.as_vector() {
                Some(v) if v.len() == m => f.push((ActElem::Plain(g.clone()), v.to_vec())),
                _ => return Err(LedgerError::NotLedgerElement(x.to_string())),
            }
        }
        Ok(LedgerElem::new(f, ActElem::Plain((**t).clone())))
    }

    /// The element of `Z^m ≀ G` this represents.
    pub fn to_wreath(&self, w: &Group) -> Result<Elem, LedgerError> {
        let (m, top) = free_abelian_wreath(w)?;
        let base = top
            .elements()?
            .iter()
            .map(|g| {
                let v = self.f.get(&ActElem::Plain(g.clone())).cloned().unwrap_or_else(|| vec![BigInt::zero(); m]);
                Elem::Vector(v)
            })
            .collect();
        let t = self.g.as_plain().ok_or_else(|| LedgerError::NotLedgerElement(self.to_string()))?;
        Ok(Elem::Wreath(WreathElement { base, top: Box::new(t.clone()) }))
    }

    /// Reads a restricted wreath element whose base values are vectors.
    pub fn from_restricted(x: &ActElem) -> Result<LedgerElem, LedgerError> {
        let ActElem::Restricted { base, top } = x else {
            return Err(LedgerError::NotLedgerElement(x.to_string()));
        };
        let mut f = Vec::new();
        for (k, v) in base {
            match v.as_plain().and_then(Elem::as_vector) {
                Some(v) => f.push((ActElem::Plain(k.clone()), v.to_vec())),
                None => return Err(LedgerError::NotLedgerElement(x.to_string())),
            }
        }
        Ok(LedgerElem::new(f, ActElem::Plain(top.clone())))
    }
}

impl fmt::Display for LedgerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (x, v)) in self.f.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            let v: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            write!(f, "{x}↦({})", v.join(","))?;
        }
        write!(f, ";{}]", self.g)
    }
}

fn free_abelian_wreath(w: &Group) -> Result<(usize, &Arc<Group>), LedgerError> {
    match w.kind() {
        GroupKind::Wreath { base, top } => match base.kind() {
            GroupKind::FreeAbelian(m) if *m > 0 => Ok((*m, top)),
            _ => Err(LedgerError::NotLedgerElement(format!("{w} is not Z^m ≀ G"))),
        },
        _ => Err(LedgerError::NotLedgerElement(format!("{w} is not Z^m ≀ G"))),
    }
}

/// `label(g, i) = 2·F(g)_i + [(g, i) = (h, 1)]` for `x = (F, h)` in
/// `Z^m ≀ H`, computed straight from the group element.
pub fn equivariant_twist_label(w: &Group, x: &Elem) -> Result<TwistLabel, LedgerError> {
    let (m, top) = free_abelian_wreath(w)?;
    let Elem::Wreath(WreathElement { base, top: h }) = x else {
        return Err(LedgerError::NotLedgerElement(x.to_string()));
    };
    let mut label = TwistLabel::new();
    for (g, v) in top.elements()?.iter().zip(base) {
        let v = v.as_vector().filter(|v| v.len() == m).ok_or_else(|| LedgerError::NotLedgerElement(x.to_string()))?;
        for (i, c) in v.iter().enumerate() {
            label.add(Site::new(SitePoint::Element(g.clone()), i + 1), c * 2);
        }
    }
    label.add(Site::new(SitePoint::Element((**h).clone()), 1), BigInt::one());
    Ok(label)
}

#[derive(Clone, Debug)]
enum Sites {
    /// Leaves of a block, through the orbit of a (P2) witness.
    Weak(ShadowAction),
    /// The elements of a finite group.
    Equivariant(Arc<Group>),
}

/// A labeling scheme: which sites exist and how group elements reach them.
#[derive(Clone, Debug)]
pub struct Ledger {
    sites: Sites,
    m: usize,
    certificate: Certificate,
    /// Site points of every element, for finite weak ledgers.
    table: Option<Arc<PointTable>>,
}

#[derive(Debug)]
struct PointTable {
    point: HashMap<ActElem, SitePoint>,
    /// Ordered rather than hashed: long addresses differ early.
    inverse: BTreeMap<SitePoint, ActElem>,
}

impl PointTable {
    fn of(act: &ShadowAction) -> Result<PointTable, LedgerError> {
        let mut point = HashMap::new();
        let mut inverse = BTreeMap::new();
        for g in act.group().elements()? {
            let pt = SitePoint::Leaf(Arc::new(act.orbit_point(&g).ok_or(LedgerError::MissingP2)?));
            inverse.insert(pt.clone(), g.clone());
            point.insert(g, pt);
        }
        Ok(PointTable { point, inverse })
    }
}

impl Ledger {
    /// The weak ledger over a hat action. The declared witness must have a
    /// free orbit, checked over the whole group (finite groups) or by the
    /// action's closed-form orbit inverse.
    pub fn weak(act: &ShadowAction, m: usize) -> Result<Ledger, LedgerError> {
        if m == 0 {
            return Err(LedgerError::ZeroRank);
        }
        let p = act.p2_witness().ok_or(LedgerError::MissingP2)?.clone();
        let mut cert = Certificate::single(
            ChainRecord::new("weak_ledger", "weak twist labels 2F̃ + δ at the witness orbit")
                .param("group", act.group().name())
                .param("m", m)
                .param("p2_witness", p.to_string()),
            Vec::new(),
        );
        let mut table = None;
        if act.group().is_finite() {
            let report = check_p1_p2(act, &CheckOptions::default())?;
            if report.p2.as_ref() != Some(&p) {
                return Err(LedgerError::MissingP2);
            }
            cert.absorb(report.certificate);
            table = Some(Arc::new(PointTable::of(act)?));
        } else if !act.can_invert_orbit() {
            return Err(LedgerError::Block(BlockError::NonInvertibleOrbit(format!("{act:?}"))));
        } else {
            cert.checks.push(Check::pass("P2", "closed-form orbit inverse"));
        }
        Ok(Ledger { sites: Sites::Weak(act.clone()), m, certificate: cert, table })
    }

    /// The equivariant ledger of a finite group acting on itself.
    pub fn equivariant(h: &Arc<Group>, m: usize) -> Result<Ledger, LedgerError> {
        if m == 0 {
            return Err(LedgerError::ZeroRank);
        }
        h.finite_order()?;
        let cert = Certificate::single(
            ChainRecord::new("equivariant_ledger", "equivariant twist labels 2F + δ at (h,1)")
                .param("group", h.name())
                .param("m", m),
            Vec::new(),
        );
        Ok(Ledger { sites: Sites::Equivariant(h.clone()), m, certificate: cert, table: None })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Construction checks (the (P2) certification for weak ledgers).
    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// The site point `hat(x)p` (weak) or `x` (equivariant).
    pub fn point(&self, x: &ActElem) -> SitePoint {
        if let Some(t) = &self.table {
            return t.point.get(x).unwrap_or_else(|| panic!("{x} is not in the acting group")).clone();
        }
        match &self.sites {
            Sites::Weak(act) => SitePoint::Leaf(Arc::new(act.orbit_point(x).expect("declared witness"))),
            Sites::Equivariant(_) => SitePoint::Element(x.as_plain().expect("plain element").clone()),
        }
    }

    /// The element whose site point is `p`, if `p` is on the orbit.
    pub fn element_at(&self, p: &SitePoint) -> Option<ActElem> {
        if let Some(t) = &self.table {
            return t.inverse.get(p).cloned();
        }
        match (&self.sites, p) {
            (Sites::Weak(act), SitePoint::Leaf(l)) => act.orbit_inverse(l),
            (Sites::Equivariant(h), SitePoint::Element(e)) => h.contains(e).then(|| ActElem::Plain(e.clone())),
            _ => None,
        }
    }

    /// `2F̃ + δ_{(point(g), 1)}` with `F̃(point(x), j) = F(x)_j`.
    pub fn label(&self, x: &LedgerElem) -> TwistLabel {
        let mut label = TwistLabel::new();
        for (y, v) in &x.f {
            let pt = self.point(y);
            for (j, c) in v.iter().enumerate() {
                label.add(Site::new(pt.clone(), j + 1), c * 2);
            }
        }
        label.add(Site::new(self.point(&x.g), 1), BigInt::one());
        label
    }

    /// Inverts [`Ledger::label`] by parity: the unique odd coordinate names
    /// the top element, the halved remainder pulled back along the orbit
    /// gives `F`.
    pub fn recover(&self, label: &TwistLabel) -> Result<LedgerElem, LabelError> {
        let odd: Vec<&Site> = label.iter().filter(|(_, v)| v.is_odd()).map(|(s, _)| s).collect();
        let site = match odd.as_slice() {
            [] => return Err(LabelError::NoOddCoordinate),
            [s] => *s,
            many => return Err(LabelError::MultipleOddCoordinates(many.iter().map(|s| s.to_string()).collect())),
        };
        let g = (site.coord == 1)
            .then(|| self.element_at(&site.point))
            .flatten()
            .ok_or_else(|| LabelError::OddSiteOffOrbit(site.to_string()))?;
        let mut f: BTreeMap<ActElem, Vec<BigInt>> = BTreeMap::new();
        for (s, v) in label.iter() {
            let v = if s == site { v - 1 } else { v.clone() };
            if v.is_zero() {
                continue;
            }
            let residual = || LabelError::ResidualOffOrbit { site: s.to_string(), value: v.to_string() };
            if s.coord == 0 || s.coord > self.m {
                return Err(residual());
            }
            let x = self.element_at(&s.point).ok_or_else(residual)?;
            f.entry(x).or_insert_with(|| vec![BigInt::zero(); self.m])[s.coord - 1] = v / 2;
        }
        Ok(LedgerElem::new(f, g))
    }
}

/// Labels every element, asserts pairwise distinctness by sort-and-compare
/// and the recovery round trip, and stores the labels in the certificate.
pub fn effectiveness_certificate(ledger: &Ledger, elements: &[LedgerElem], range: &str) -> Certificate {
    let mut elements = elements.to_vec();
    elements.sort();
    elements.dedup();
    let labels: Vec<TwistLabel> = elements.par_iter().map(|x| ledger.label(x)).collect();
    let n = elements.len();
    let range = format!("{n} elements: {range}");

    let mut order: Vec<usize> = (0..n).collect();
    order.par_sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let collision = order
        .windows(2)
        .find(|w| labels[w[0]] == labels[w[1]])
        .map(|w| format!("({}, {}) share {}", elements[w[0]], elements[w[1]], labels[w[0]]));

    let roundtrip = elements.par_iter().zip(&labels).find_map_first(|(x, l)| match ledger.recover(l) {
        Ok(y) if y == *x => None,
        Ok(y) => Some(format!("{x} recovered as {y}")),
        Err(e) => Some(format!("{x}: {e}")),
    });

    let odd_sites = labels.par_iter().zip(&elements).find_map_first(|(l, x)| {
        let base = Site::new(ledger.point(&x.g), 1);
        let bad = l.iter().any(|(s, v)| v.is_odd() != (*s == base));
        bad.then(|| x.to_string())
    });

    let mut cert = ledger.certificate.clone();
    cert.chain.push(
        ChainRecord::new("effectiveness_certificate", "label injectivity on an enumerated range")
            .param("elements", n)
            .param("m", ledger.m),
    );
    cert.checks.push(Check::from_outcome("labels pairwise distinct", range.clone(), collision));
    cert.checks.push(Check::from_outcome("recover round trip", range.clone(), roundtrip));
    cert.checks.push(Check::from_outcome("single odd coordinate at the top site", range, odd_sites));
    cert.add_axiom(JOIN_AXIOM);
    cert.add_axiom(LABEL_AXIOM);
    cert.data.insert("labels".into(), labels_document(&elements, &labels));
    cert
}

/// Labels in the compact certificate form: a site table plus, per element,
/// the nonzero values keyed by site index.
pub fn labels_document(elements: &[LedgerElem], labels: &[TwistLabel]) -> Value {
    let mut sites: Vec<&Site> = labels.iter().flat_map(|l| l.values.keys()).collect();
    sites.sort();
    sites.dedup();
    let index: BTreeMap<&Site, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let entries: Vec<Value> = elements
        .iter()
        .zip(labels)
        .map(|(x, l)| {
            let m: Map<String, Value> = l.values.iter().map(|(s, v)| (index[s].to_string(), int_json(v))).collect();
            json!({ "element": x.to_string(), "label": m })
        })
        .collect();
    json!({ "sites": sites.iter().map(|s| s.to_string()).collect::<Vec<_>>(), "entries": entries })
}

/// The degenerate ledger without cork coordinates: the label of `g` is the
/// orbit point `hat(g)p`, so injectivity is exactly (P2) on the range.
pub fn stein_shadow_certificate(act: &ShadowAction, elements: &[ActElem], range: &str) -> Result<Certificate, LedgerError> {
    let p = act.p2_witness().ok_or(LedgerError::MissingP2)?;
    let points: Vec<LeafAddr> = elements.par_iter().map(|g| act.apply(g, p)).collect();
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by(|&a, &b| points[a].cmp(&points[b]).then(a.cmp(&b)));
    let collision = order
        .windows(2)
        .find(|w| points[w[0]] == points[w[1]])
        .map(|w| format!("({}, {}) both reach {}", elements[w[0]], elements[w[1]], points[w[0]]));
    let mut cert = Certificate::single(
        ChainRecord::new("stein_shadow_ledger", "orbit-point labels")
            .param("group", act.group().name())
            .param("p2_witness", p.to_string()),
        vec![Check::from_outcome("orbit points pairwise distinct", format!("{} elements: {range}", elements.len()), collision)],
    );
    cert.add_axiom(STEIN_AXIOM);
    let entries: Vec<Value> =
        elements.iter().zip(&points).map(|(g, q)| json!({ "element": g.to_string(), "label": q.to_string() })).collect();
    cert.data.insert("labels".into(), json!({ "entries": entries }));
    Ok(cert)
}
