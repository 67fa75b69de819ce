//! Hat actions: homomorphisms from a group into the symmetric group of a
//! block's leaves, stored as explicit tables or closed-form rules.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::tree::{Block, LeafAddr};
use super::BlockError;
use crate::certificate::{Certificate, ChainRecord, Check};
use crate::group::{Elem, Group, GroupError, Perm};
use crate::hom::Homomorphism;

/// An element acted on by a hat action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActElem {
    Plain(Elem),
    /// Finitely supported base map over an infinite top group, plus a top
    /// element; identity values are never stored.
    Restricted { base: BTreeMap<Elem, ActElem>, top: Elem },
}

impl ActElem {
    pub fn as_plain(&self) -> Option<&Elem> {
        match self {
            ActElem::Plain(e) => Some(e),
            ActElem::Restricted { .. } => None,
        }
    }
}

impl fmt::Display for ActElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActElem::Plain(e) => write!(f, "{e}"),
            ActElem::Restricted { base, top } => {
                write!(f, "[")?;
                for (k, (x, v)) in base.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}↦{v}")?;
                }
                write!(f, ";{top}]")
            }
        }
    }
}

/// The group of an action: an ordinary group, or the restricted wreath
/// product of an action group by an infinite top group.
#[derive(Clone, Debug)]
pub enum ActionGroup {
    Plain(Arc<Group>),
    Restricted { base: Box<ActionGroup>, top: Arc<Group> },
}

impl ActionGroup {
    pub fn name(&self) -> String {
        match self {
            ActionGroup::Plain(g) => g.name().to_string(),
            ActionGroup::Restricted { base, top } => format!("{}≀ᵣ{}", base.name(), top.name()),
        }
    }

    pub fn plain(&self) -> Option<&Arc<Group>> {
        match self {
            ActionGroup::Plain(g) => Some(g),
            ActionGroup::Restricted { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ActionGroup::Plain(g) => g.is_finite(),
            ActionGroup::Restricted { .. } => false,
        }
    }

    pub fn identity(&self) -> ActElem {
        match self {
            ActionGroup::Plain(g) => ActElem::Plain(g.identity()),
            ActionGroup::Restricted { top, .. } => ActElem::Restricted { base: BTreeMap::new(), top: top.identity() },
        }
    }

    pub fn mul(&self, a: &ActElem, b: &ActElem) -> ActElem {
        match (self, a, b) {
            (ActionGroup::Plain(g), ActElem::Plain(x), ActElem::Plain(y)) => ActElem::Plain(g.mul(x, y)),
            (
                ActionGroup::Restricted { base, top },
                ActElem::Restricted { base: f1, top: h1 },
                ActElem::Restricted { base: f2, top: h2 },
            ) => {
                let id = base.identity();
                let mut out = f1.clone();
                for (y, v) in f2 {
                    let x = top.mul(h1, y);
                    let cur = out.remove(&x).unwrap_or_else(|| id.clone());
                    let p = base.mul(&cur, v);
                    if p != id {
                        out.insert(x, p);
                    }
                }
                ActElem::Restricted { base: out, top: top.mul(h1, h2) }
            }
            _ => panic!("{a} and {b} do not belong to {}", self.name()),
        }
    }

    pub fn inv(&self, a: &ActElem) -> ActElem {
        match (self, a) {
            (ActionGroup::Plain(g), ActElem::Plain(x)) => ActElem::Plain(g.inv(x)),
            (ActionGroup::Restricted { base: bg, top }, ActElem::Restricted { base, top: t }) => {
                let t_inv = top.inv(t);
                let f = base.iter().map(|(y, v)| (top.mul(&t_inv, y), bg.inv(v))).collect();
                ActElem::Restricted { base: f, top: t_inv }
            }
            _ => panic!("{a} does not belong to {}", self.name()),
        }
    }

    pub fn elements(&self) -> Result<Vec<ActElem>, GroupError> {
        match self {
            ActionGroup::Plain(g) => Ok(g.elements()?.iter().cloned().map(ActElem::Plain).collect()),
            ActionGroup::Restricted { .. } => Err(GroupError::UnboundedEnumeration(self.name())),
        }
    }
}

#[derive(Clone)]
enum HatRule {
    Table { leaves: Vec<LeafAddr>, index: HashMap<LeafAddr, usize>, perms: HashMap<Elem, Perm> },
    /// `Z` acting on integer-indexed leaves by `i ↦ i + k`.
    Translation,
    /// Copies of `inner` glued into every leaf of `outer`.
    Glued { outer: ShadowAction, inner: ShadowAction, depth: usize },
    /// Words of `base` leaves acted on letterwise.
    Amplified { base: ShadowAction, index: HashMap<LeafAddr, usize>, leaves: Vec<LeafAddr>, depth: usize },
    Pullback { action: ShadowAction, hom: Homomorphism },
}

/// The base value of a wreath element at a top element.
type BaseValue<'a> = Box<dyn Fn(&ActElem) -> ActElem + 'a>;

struct OrbitTable {
    point: HashMap<ActElem, LeafAddr>,
    inverse: HashMap<LeafAddr, ActElem>,
}

struct ActionData {
    group: ActionGroup,
    block: Block,
    rule: HatRule,
    provenance: Vec<String>,
    axioms: Vec<String>,
    p2_witness: Option<LeafAddr>,
    orbit: OnceLock<Option<OrbitTable>>,
}

/// A hat action of a group on the leaves of a block.
#[derive(Clone)]
pub struct ShadowAction(Arc<ActionData>);

impl fmt::Debug for ShadowAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShadowAction({} on {} leaves)", self.0.group.name(), self.0.block.leaf_count())
    }
}

/// How much of an action a check could see.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every leaf was evaluated.
    Exhaustive,
    /// The rule's closed form determines the hat from the leaves evaluated.
    ClosedForm,
    /// Leaves outside the window were not evaluated.
    Window(i64),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => write!(f, "exhaustive"),
            Mode::ClosedForm => write!(f, "closed form"),
            Mode::Window(r) => write!(f, "window of radius {r}"),
        }
    }
}

impl ShadowAction {
    fn build(
        group: ActionGroup,
        block: Block,
        rule: HatRule,
        provenance: Vec<String>,
        axioms: Vec<String>,
        p2_witness: Option<LeafAddr>,
    ) -> ShadowAction {
        ShadowAction(Arc::new(ActionData { group, block, rule, provenance, axioms, p2_witness, orbit: OnceLock::new() }))
    }

    /// An action given by one leaf permutation per group element; leaf `k`
    /// of the permutation is the block's `k`-th leaf in address order.
    pub fn from_table(
        group: Arc<Group>,
        block: Block,
        perms: HashMap<Elem, Perm>,
        provenance: impl Into<String>,
        p2_witness: Option<LeafAddr>,
    ) -> Result<ShadowAction, BlockError> {
        let leaves = block.leaves()?;
        for g in group.elements()? {
            match perms.get(g) {
                None => return Err(BlockError::InvalidAction(format!("no permutation for {g}"))),
                Some(p) if p.degree() != leaves.len() => {
                    return Err(BlockError::InvalidAction(format!("permutation for {g} has the wrong degree")))
                }
                Some(_) => {}
            }
        }
        if let Some(p) = &p2_witness {
            if !block.is_leaf(p) {
                return Err(BlockError::NotALeaf(p.to_string()));
            }
        }
        let index = leaves.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Ok(ShadowAction::build(
            ActionGroup::Plain(group),
            block,
            HatRule::Table { leaves, index, perms },
            vec![provenance.into()],
            Vec::new(),
            p2_witness,
        ))
    }

    pub(super) fn translation(block: Block, provenance: String) -> ShadowAction {
        ShadowAction::build(
            ActionGroup::Plain(Group::integers()),
            block,
            HatRule::Translation,
            vec![provenance],
            Vec::new(),
            Some(LeafAddr::new(&[0])),
        )
    }

    pub(super) fn glued(
        group: ActionGroup,
        block: Block,
        outer: &ShadowAction,
        inner: &ShadowAction,
        depth: usize,
        provenance: String,
    ) -> ShadowAction {
        let mut prov = outer.0.provenance.clone();
        prov.extend(inner.0.provenance.iter().cloned());
        prov.push(provenance);
        let mut axioms = outer.0.axioms.clone();
        axioms.extend(inner.0.axioms.iter().cloned());
        ShadowAction::build(
            group,
            block,
            HatRule::Glued { outer: outer.clone(), inner: inner.clone(), depth },
            dedup(prov),
            dedup(axioms),
            None,
        )
    }

    pub(super) fn amplified(
        base: &ShadowAction,
        block: Block,
        leaves: Vec<LeafAddr>,
        depth: usize,
        witness: LeafAddr,
        provenance: String,
    ) -> ShadowAction {
        let index = leaves.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut prov = base.0.provenance.clone();
        prov.push(provenance);
        ShadowAction::build(
            base.0.group.clone(),
            block,
            HatRule::Amplified { base: base.clone(), index, leaves, depth },
            prov,
            base.0.axioms.clone(),
            Some(witness),
        )
    }

    pub(super) fn pullback(action: &ShadowAction, hom: Homomorphism, provenance: String) -> ShadowAction {
        let mut prov = action.0.provenance.clone();
        prov.push(provenance);
        ShadowAction::build(
            ActionGroup::Plain(hom.domain().clone()),
            action.0.block.clone(),
            HatRule::Pullback { action: action.clone(), hom },
            prov,
            action.0.axioms.clone(),
            action.0.p2_witness.clone(),
        )
    }

    pub(super) fn with_axiom(self, axiom: &str) -> ShadowAction {
        let d = &self.0;
        let mut axioms = d.axioms.clone();
        axioms.push(axiom.to_string());
        ShadowAction::build(d.group.clone(), d.block.clone(), d.rule.clone(), d.provenance.clone(), dedup(axioms), d.p2_witness.clone())
    }

    /// Replaces the declared P2 witness.
    pub fn with_witness(&self, p: Option<LeafAddr>) -> ShadowAction {
        let d = &self.0;
        ShadowAction::build(d.group.clone(), d.block.clone(), d.rule.clone(), d.provenance.clone(), d.axioms.clone(), p)
    }

    pub fn group(&self) -> &ActionGroup {
        &self.0.group
    }

    pub fn block(&self) -> &Block {
        &self.0.block
    }

    pub fn provenance(&self) -> &[String] {
        &self.0.provenance
    }

    pub fn axioms(&self) -> &[String] {
        &self.0.axioms
    }

    pub fn p2_witness(&self) -> Option<&LeafAddr> {
        self.0.p2_witness.as_ref()
    }

    /// The explicit permutation of a table action.
    pub fn table_perm(&self, g: &Elem) -> Option<&Perm> {
        match &self.0.rule {
            HatRule::Table { perms, .. } => perms.get(g),
            _ => None,
        }
    }

    /// `hat(g)` applied to a leaf.
    pub fn apply(&self, g: &ActElem, leaf: &LeafAddr) -> LeafAddr {
        match &self.0.rule {
            HatRule::Table { leaves, index, perms } => {
                let e = g.as_plain().expect("plain element");
                let p = perms.get(e).unwrap_or_else(|| panic!("{e} is not in the action table"));
                leaves[p.apply(index[leaf] as u32) as usize].clone()
            }
            HatRule::Translation => {
                let Some(Elem::Int(k)) = g.as_plain() else { panic!("{g} is not an integer") };
                let k = k.to_i64().expect("translation fits in i64");
                LeafAddr(vec![leaf.0[0] + k])
            }
            HatRule::Glued { outer, inner, depth } => {
                let (i, j) = leaf.split_at(*depth);
                let (h, value_at): (ActElem, BaseValue<'_>) = match g {
                    ActElem::Plain(Elem::Wreath(w)) => {
                        let top = outer.group().plain().expect("plain top");
                        (
                            ActElem::Plain((*w.top).clone()),
                            Box::new(move |x: &ActElem| {
                                let x = x.as_plain().expect("plain top element");
                                ActElem::Plain(w.base[top.index_of(x).expect("top element")].clone())
                            }),
                        )
                    }
                    ActElem::Restricted { base, top } => {
                        let id = inner.group().identity();
                        (
                            ActElem::Plain(top.clone()),
                            Box::new(move |x: &ActElem| {
                                let x = x.as_plain().expect("plain top element");
                                base.get(x).cloned().unwrap_or_else(|| id.clone())
                            }),
                        )
                    }
                    _ => panic!("{g} is not a wreath element"),
                };
                let i2 = outer.apply(&h, &i);
                let j2 = match outer.orbit_inverse(&i2) {
                    Some(x) => inner.apply(&value_at(&x), &j),
                    None => j,
                };
                i2.join(&j2)
            }
            HatRule::Amplified { base, index, leaves, depth } => {
                let mut out = Vec::with_capacity(leaf.len());
                for chunk in leaf.0.chunks(*depth) {
                    let l = &leaves[index[&LeafAddr(chunk.to_vec())]];
                    out.extend(base.apply(g, l).0);
                }
                LeafAddr(out)
            }
            HatRule::Pullback { action, hom } => {
                let e = g.as_plain().expect("plain element");
                action.apply(&ActElem::Plain(hom.apply(e)), leaf)
            }
        }
    }

    fn orbit_table(&self) -> Option<&OrbitTable> {
        self.0
            .orbit
            .get_or_init(|| {
                let p = self.0.p2_witness.as_ref()?;
                if matches!(self.0.rule, HatRule::Translation) {
                    return None;
                }
                let elems = self.0.group.elements().ok()?;
                let point: HashMap<ActElem, LeafAddr> =
                    elems.par_iter().map(|g| (g.clone(), self.apply(g, p))).collect();
                let mut inverse = HashMap::new();
                for g in &elems {
                    inverse.entry(point[g].clone()).or_insert_with(|| g.clone());
                }
                Some(OrbitTable { point, inverse })
            })
            .as_ref()
    }

    /// Whether `orbit_inverse` is available: a declared witness together with
    /// a finite group or a closed-form orbit map.
    pub fn can_invert_orbit(&self) -> bool {
        self.0.p2_witness.is_some() && (matches!(self.0.rule, HatRule::Translation) || self.orbit_table().is_some())
    }

    /// `hat(g)p` for the declared witness `p`.
    pub fn orbit_point(&self, g: &ActElem) -> Option<LeafAddr> {
        let p = self.0.p2_witness.as_ref()?;
        match self.orbit_table() {
            Some(t) => t.point.get(g).cloned(),
            None => Some(self.apply(g, p)),
        }
    }

    /// The `g` with `hat(g)p = leaf`, if `leaf` lies on the witness orbit.
    pub fn orbit_inverse(&self, leaf: &LeafAddr) -> Option<ActElem> {
        let p = self.0.p2_witness.as_ref()?;
        if matches!(self.0.rule, HatRule::Translation) {
            return (leaf.len() == 1).then(|| ActElem::Plain(Elem::Int(BigInt::from(leaf.0[0] - p.0[0]))));
        }
        self.orbit_table()?.inverse.get(leaf).cloned()
    }

    /// Leaves whose images determine a hat, or a window of them.
    pub fn determining_leaves(&self, window: i64) -> Result<(Vec<LeafAddr>, Mode), BlockError> {
        if let Ok(all) = self.0.block.leaves() {
            return Ok((all, Mode::Exhaustive));
        }
        match &self.0.rule {
            HatRule::Table { leaves, .. } => Ok((leaves.clone(), Mode::Exhaustive)),
            HatRule::Translation => Ok(((-window..=window).map(|i| LeafAddr(vec![i])).collect(), Mode::ClosedForm)),
            HatRule::Amplified { .. } => {
                // letterwise action: the witness word lists every base leaf
                Ok((vec![self.0.p2_witness.clone().expect("amplified witness")], Mode::ClosedForm))
            }
            HatRule::Pullback { action, .. } => action.determining_leaves(window),
            HatRule::Glued { outer, inner, .. } => {
                let (o, om) = outer.window_leaves(window)?;
                let (i, im) = inner.determining_leaves(window)?;
                let mode = if om == Mode::Exhaustive && im == Mode::Exhaustive { Mode::Exhaustive } else { Mode::Window(window) };
                Ok((o.iter().flat_map(|a| i.iter().map(move |b| a.join(b))).collect(), mode))
            }
        }
    }

    fn window_leaves(&self, window: i64) -> Result<(Vec<LeafAddr>, Mode), BlockError> {
        match &self.0.rule {
            HatRule::Translation => Ok(((-window..=window).map(|i| LeafAddr(vec![i])).collect(), Mode::Window(window))),
            _ => self.determining_leaves(window),
        }
    }

    /// Explicit permutation of all leaves, for finite enumerable blocks.
    pub fn perm(&self, g: &ActElem) -> Result<Perm, BlockError> {
        let leaves = self.0.block.leaves()?;
        let index: HashMap<&LeafAddr, u32> = leaves.iter().enumerate().map(|(i, l)| (l, i as u32)).collect();
        let images = leaves.iter().map(|l| index[&self.apply(g, l)]).collect();
        Ok(Perm::from_images(images)?)
    }
}

fn dedup(v: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in v {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// Options for [`check_p1_p2`].
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Ball radius for infinite plain groups (defaults to the window).
    pub bound: Option<usize>,
    /// Window radius for countable leaf sets.
    pub window: i64,
    /// Explicit element range; required for restricted wreath groups.
    pub elements: Option<Vec<ActElem>>,
    /// When false, a missing (P2) witness is reported without failing.
    pub require_p2: bool,
}

pub const DEFAULT_WINDOW: i64 = 100;
/// Pairs checked for the action law when the range is large.
pub const ACTION_LAW_PAIRS: usize = 2048;

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions { bound: None, window: DEFAULT_WINDOW, elements: None, require_p2: true }
    }
}

#[derive(Clone, Debug)]
pub struct P1P2Report {
    pub certificate: Certificate,
    pub p1: bool,
    pub p2: Option<LeafAddr>,
    pub mode: Mode,
}

fn element_range(act: &ShadowAction, opts: &CheckOptions) -> Result<(Vec<ActElem>, String), BlockError> {
    if let Some(e) = &opts.elements {
        return Ok((e.clone(), format!("{} supplied elements", e.len())));
    }
    match act.group() {
        ActionGroup::Plain(g) if g.is_finite() => {
            let e = act.group().elements()?;
            let d = format!("all {} elements", e.len());
            Ok((e, d))
        }
        ActionGroup::Plain(g) => {
            let r = opts.bound.unwrap_or(opts.window.max(0) as usize);
            let e: Vec<ActElem> = g.ball(r).into_iter().map(ActElem::Plain).collect();
            let d = format!("ball of radius {r} ({} elements)", e.len());
            Ok((e, d))
        }
        ActionGroup::Restricted { .. } => Err(BlockError::RangeUnavailable(act.group().name())),
    }
}

fn orbit_is_free(act: &ShadowAction, range: &[ActElem], p: &LeafAddr) -> Option<String> {
    let mut seen: HashMap<LeafAddr, &ActElem> = HashMap::new();
    for g in range {
        let q = act.apply(g, p);
        if let Some(prev) = seen.insert(q, g) {
            return Some(format!("({prev}, {g})"));
        }
    }
    None
}

/// Checks the action law, bijectivity on the evaluated leaves, (P1) as
/// pairwise-distinct hats over the range, and (P2) at the declared witness
/// or, failing that, at the first leaf with a free orbit.
pub fn check_p1_p2(act: &ShadowAction, opts: &CheckOptions) -> Result<P1P2Report, BlockError> {
    let (range, range_desc) = element_range(act, opts)?;
    let (leaves, mode) = act.determining_leaves(opts.window)?;
    let group = act.group();
    let sigs: Vec<Vec<LeafAddr>> = range.par_iter().map(|g| leaves.iter().map(|l| act.apply(g, l)).collect()).collect();

    let bij_witness = range.par_iter().zip(&sigs).find_map_first(|(g, sig)| {
        let gi = group.inv(g);
        sig.iter().zip(&leaves).find(|(img, l)| act.apply(&gi, img) != **l).map(|(_, l)| format!("g={g}, leaf {l}"))
    });

    let n = range.len();
    let pairs: Vec<(usize, usize)> = if n <= 64 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0068_6174);
        (0..ACTION_LAW_PAIRS).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    let law_witness = pairs.par_iter().find_map_first(|&(a, b)| {
        let gh = group.mul(&range[a], &range[b]);
        leaves
            .iter()
            .zip(&sigs[b])
            .find(|(l, hb)| act.apply(&gh, l) != act.apply(&range[a], hb))
            .map(|(l, _)| format!("g={}, h={}, leaf {l}", range[a], range[b]))
    });

    let id = group.identity();
    let mut first: HashMap<&Vec<LeafAddr>, usize> = HashMap::new();
    let mut p1_witness = None;
    for (k, sig) in sigs.iter().enumerate() {
        if let Some(&prev) = first.get(sig) {
            p1_witness = Some(if range[prev] == id || range[k] == id {
                let other = if range[prev] == id { &range[k] } else { &range[prev] };
                other.to_string()
            } else {
                format!("({}, {})", range[prev], range[k])
            });
            break;
        }
        first.insert(sig, k);
    }

    let mut p2 = None;
    let mut p2_detail = String::new();
    if let Some(p) = act.p2_witness() {
        match orbit_is_free(act, &range, p) {
            None => {
                p2 = Some(p.clone());
                p2_detail = format!("declared witness p = {p}");
            }
            Some(w) => p2_detail = format!("declared witness {p} fails at {w}"),
        }
    }
    if p2.is_none() {
        if let Ok(all) = act.block().leaves() {
            p2 = all.par_iter().find_map_first(|l| orbit_is_free(act, &range, l).is_none().then(|| l.clone()));
            if let Some(p) = &p2 {
                p2_detail = format!("found p = {p} by search over {} leaves", all.len());
            } else {
                p2_detail.push_str(&format!("; no leaf among {} has a free orbit", all.len()));
            }
        }
    }
    let p2_mode = match (act.p2_witness(), &act.0.rule) {
        (Some(_), HatRule::Translation) => "closed form: k ↦ p + k is injective".to_string(),
        _ => range_desc.clone(),
    };

    let p1 = p1_witness.is_none();
    let mut checks = vec![
        Check::from_outcome("action law", format!("{} pairs over {range_desc}; leaves: {mode}", pairs.len()), law_witness),
        Check::from_outcome("bijective", format!("{range_desc}; leaves: {mode}"), bij_witness),
        Check::from_outcome("P1", format!("{range_desc}; leaves: {mode}"), p1_witness),
    ];
    let p2_check = match &p2 {
        Some(_) => Check::pass("P2", p2_mode),
        None if opts.require_p2 => Check::fail("P2", p2_mode, "no leaf with pairwise distinct orbit points"),
        None => Check::pass("P2 search", p2_mode).with_detail("no free orbit found; not required at this step"),
    };
    checks.push(p2_check.with_detail(p2_detail));
    checks.push(Check::from_outcome(
        "P2 implies P1",
        range_desc.clone(),
        (p2.is_some() && !p1).then(|| "P2 holds but P1 fails".to_string()),
    ));
    let record = ChainRecord::new("check_p1_p2", "hat-action properties")
        .param("group", group.name())
        .param("leaves", act.block().leaf_count().to_string())
        .param("mode", mode.to_string())
        .param("p2_witness", json!(p2.as_ref().map(|p| p.to_string())));
    let mut certificate = Certificate::single(record, checks);
    for a in act.axioms() {
        certificate.add_axiom(a.clone());
    }
    Ok(P1P2Report { certificate, p1, p2, mode })
}
