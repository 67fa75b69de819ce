//! Exact arithmetic for the concrete group representations.
//!
//! A [`Group`] is immutable once built and is shared through `Arc`. Elements
//! ([`Elem`]) carry only their payload; the owning group interprets them.
//! Finite groups enumerate their elements in canonical order, which is the
//! derived `Ord` of the payload.

mod extension;
mod perm;
mod series;
mod table;

pub mod catalog;
pub mod document;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use extension::Extension;
pub use perm::Perm;
pub use series::{derived_series, prime_cyclic_series, SubnormalSeries, Subgroup};
pub use table::CayleyTable;

/// Default cap on exhaustive operations; `CORKCALC_MAX_ORDER` overrides it.
pub const DEFAULT_MAX_ORDER: usize = 2048;

pub fn max_order() -> usize {
    std::env::var("CORKCALC_MAX_ORDER")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("invalid extension data: {0}")]
    InvalidExtension(String),
    #[error("unbounded enumeration: {0} is infinite and no radius was given")]
    UnboundedEnumeration(String),
    #[error("order cap exceeded: {group} has more than {cap} elements (set CORKCALC_MAX_ORDER)")]
    OrderCapExceeded { group: String, cap: usize },
    #[error("element {element} does not belong to {group}")]
    OwnerMismatch { group: String, element: String },
    #[error("derived series does not terminate: stable perfect subgroup of order {order} generated by {generators:?}")]
    NotSolvable { order: usize, generators: Vec<String> },
    #[error("normality violated at ({g}, {n})")]
    NotNormal { g: String, n: String },
    #[error("group document: {0}")]
    Document(String),
    #[error("{0}")]
    Unsupported(String),
}

/// A group element payload.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Elem {
    /// Element of the infinite cyclic group.
    Int(BigInt),
    /// Residue in `0..n` of a finite cyclic group.
    Residue(u64),
    /// Element of a free abelian group.
    Vector(Vec<BigInt>),
    Perm(Perm),
    /// Row index of a Cayley table.
    Index(u32),
    /// `(v, h)` in an extension of `Z^m` by a finite group.
    Pair(Vec<BigInt>, Box<Elem>),
    Wreath(WreathElement),
}

/// `(F, t)` with `F` stored as its values on the top group's canonical
/// element list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WreathElement {
    pub base: Vec<Elem>,
    pub top: Box<Elem>,
}

impl Elem {
    pub fn int(v: i64) -> Elem {
        Elem::Int(BigInt::from(v))
    }

    pub fn vector(v: &[i64]) -> Elem {
        Elem::Vector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn as_wreath(&self) -> Option<&WreathElement> {
        match self {
            Elem::Wreath(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[BigInt]> {
        match self {
            Elem::Vector(v) => Some(v),
            _ => None,
        }
    }
}

fn fmt_vec(f: &mut fmt::Formatter<'_>, v: &[BigInt]) -> fmt::Result {
    write!(f, "(")?;
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Int(x) => write!(f, "{x}"),
            Elem::Residue(r) => write!(f, "{r}"),
            Elem::Vector(v) => fmt_vec(f, v),
            Elem::Perm(p) => write!(f, "{p}"),
            Elem::Index(i) => write!(f, "#{i}"),
            Elem::Pair(v, h) => {
                write!(f, "(")?;
                fmt_vec(f, v)?;
                write!(f, ";{h})")
            }
            Elem::Wreath(w) => write!(f, "{w}"),
        }
    }
}

impl fmt::Display for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.base.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ";{}]", self.top)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    /// `Z_n`; `n = 0` is the integers.
    Cyclic(u64),
    FreeAbelian(usize),
    Permutation { degree: usize, generators: Vec<Perm> },
    Table(CayleyTable),
    AbelianByFinite(Extension),
    /// `base ≀ top`; the top group is finite.
    Wreath { base: Arc<Group>, top: Arc<Group> },
    /// A finite subgroup computed inside its parent, keeping parent payloads.
    Subgroup { parent: Arc<Group>, generators: Vec<Elem> },
}

struct FiniteData {
    elements: Vec<Elem>,
    index: HashMap<Elem, usize>,
    inverse: Vec<u32>,
    /// Row-major product table of indices, kept for small groups.
    product: Option<Vec<u32>>,
}

const PRODUCT_TABLE_LIMIT: usize = 1024;

pub struct Group {
    kind: GroupKind,
    name: String,
    finite: OnceLock<Result<Arc<FiniteData>, GroupError>>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.name)
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Group) -> bool {
        std::ptr::eq(self, other) || self.kind == other.kind
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

fn default_name(kind: &GroupKind) -> String {
    match kind {
        GroupKind::Cyclic(0) => "Z".into(),
        GroupKind::Cyclic(n) => format!("Z_{n}"),
        GroupKind::FreeAbelian(m) => format!("Z^{m}"),
        GroupKind::Permutation { degree, generators } => {
            let gens: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
            format!("<{}> ≤ S_{degree}", gens.join(", "))
        }
        GroupKind::Table(t) => format!("table group of order {}", t.order()),
        GroupKind::AbelianByFinite(e) => format!("Z^{}.{}", e.rank(), e.finite().name),
        GroupKind::Wreath { base, top } => {
            let b = if matches!(base.kind, GroupKind::Wreath { .. }) {
                // left-nested wreath products are written without parentheses
                base.name.clone()
            } else {
                wrap_name(&base.name)
            };
            format!("{b}≀{}", wrap_name(&top.name))
        }
        GroupKind::Subgroup { parent, generators } => {
            let gens: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
            format!("<{}> ≤ {}", gens.join(", "), parent.name)
        }
    }
}

fn wrap_name(name: &str) -> String {
    if name.contains(' ') || name.contains('≀') {
        format!("({name})")
    } else {
        name.to_string()
    }
}

impl Group {
    pub fn new(kind: GroupKind) -> Arc<Group> {
        let name = default_name(&kind);
        Arc::new(Group { kind, name, finite: OnceLock::new() })
    }

    pub fn named(kind: GroupKind, name: impl Into<String>) -> Arc<Group> {
        Arc::new(Group { kind, name: name.into(), finite: OnceLock::new() })
    }

    pub fn cyclic(n: u64) -> Arc<Group> {
        Group::new(GroupKind::Cyclic(n))
    }

    pub fn integers() -> Arc<Group> {
        Group::cyclic(0)
    }

    pub fn free_abelian(rank: usize) -> Arc<Group> {
        Group::new(GroupKind::FreeAbelian(rank))
    }

    pub fn permutation(degree: usize, generators: Vec<Perm>) -> Result<Arc<Group>, GroupError> {
        if degree == 0 {
            return Err(GroupError::InvalidPermutation("degree must be positive".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::InvalidPermutation(format!(
                "generator {g} has degree {} instead of {degree}",
                g.degree()
            )));
        }
        Ok(Group::new(GroupKind::Permutation { degree, generators }))
    }

    pub fn table(table: CayleyTable) -> Arc<Group> {
        Group::new(GroupKind::Table(table))
    }

    pub fn abelian_by_finite(ext: Extension) -> Arc<Group> {
        Group::new(GroupKind::AbelianByFinite(ext))
    }

    /// `base ≀ top`. Fails unless `top` is finite.
    pub fn wreath(base: Arc<Group>, top: Arc<Group>) -> Result<Arc<Group>, GroupError> {
        if !top.is_finite() {
            return Err(GroupError::Unsupported(format!(
                "wreath top {} must be finite",
                top.name
            )));
        }
        Ok(Group::new(GroupKind::Wreath { base, top }))
    }

    /// The subgroup of a finite `parent` generated by `generators`.
    pub fn subgroup(parent: &Arc<Group>, generators: Vec<Elem>) -> Result<Arc<Group>, GroupError> {
        for g in &generators {
            parent.check(g)?;
        }
        Ok(Group::new(GroupKind::Subgroup { parent: parent.clone(), generators }))
    }

    /// Iterated wreath product `groups[0] ≀ groups[1] ≀ … ≀ groups[r-1]`,
    /// nested to the left.
    pub fn iterated_wreath(groups: &[Arc<Group>]) -> Result<Arc<Group>, GroupError> {
        let (first, rest) = groups
            .split_first()
            .ok_or_else(|| GroupError::Unsupported("empty iterated wreath product".into()))?;
        let mut acc = first.clone();
        for g in rest {
            acc = Group::wreath(acc, g.clone())?;
        }
        Ok(acc)
    }

    pub fn with_name(self: &Arc<Group>, name: impl Into<String>) -> Arc<Group> {
        Arc::new(Group { kind: self.kind.clone(), name: name.into(), finite: OnceLock::new() })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_finite(&self) -> bool {
        match &self.kind {
            GroupKind::Cyclic(n) => *n > 0,
            GroupKind::FreeAbelian(m) => *m == 0,
            GroupKind::Permutation { .. } | GroupKind::Table(_) | GroupKind::Subgroup { .. } => true,
            GroupKind::AbelianByFinite(e) => e.rank() == 0,
            GroupKind::Wreath { base, top } => base.is_finite() && top.is_finite(),
        }
    }

    /// The exact order, or `None` for infinite groups. Permutation groups and
    /// subgroups are counted by enumeration.
    pub fn order(&self) -> Result<Option<BigUint>, GroupError> {
        Ok(match &self.kind {
            GroupKind::Cyclic(0) => None,
            GroupKind::Cyclic(n) => Some(BigUint::from(*n)),
            GroupKind::FreeAbelian(0) => Some(BigUint::one()),
            GroupKind::FreeAbelian(_) => None,
            GroupKind::Table(t) => Some(BigUint::from(t.order())),
            GroupKind::Permutation { .. } | GroupKind::Subgroup { .. } => {
                Some(BigUint::from(self.elements()?.len()))
            }
            GroupKind::AbelianByFinite(e) => {
                if e.rank() > 0 {
                    None
                } else {
                    e.finite().order()?
                }
            }
            GroupKind::Wreath { base, top } => match (base.order()?, top.order()?) {
                (Some(b), Some(t)) => {
                    let t_small = t.to_u32().ok_or_else(|| {
                        GroupError::Unsupported("wreath top order out of range".into())
                    })?;
                    Some(num_traits::pow(b, t_small as usize) * t)
                }
                _ => None,
            },
        })
    }

    /// Order as a machine integer, failing for infinite or oversized groups.
    pub fn finite_order(&self) -> Result<usize, GroupError> {
        match self.order()? {
            None => Err(GroupError::UnboundedEnumeration(self.name.clone())),
            Some(o) => o.to_usize().ok_or_else(|| GroupError::OrderCapExceeded {
                group: self.name.clone(),
                cap: max_order(),
            }),
        }
    }

    pub fn identity(&self) -> Elem {
        match &self.kind {
            GroupKind::Cyclic(0) => Elem::Int(BigInt::zero()),
            GroupKind::Cyclic(_) => Elem::Residue(0),
            GroupKind::FreeAbelian(m) => Elem::Vector(vec![BigInt::zero(); *m]),
            GroupKind::Permutation { degree, .. } => Elem::Perm(Perm::identity(*degree)),
            GroupKind::Table(t) => Elem::Index(t.identity()),
            GroupKind::AbelianByFinite(e) => {
                Elem::Pair(vec![BigInt::zero(); e.rank()], Box::new(e.finite().identity()))
            }
            GroupKind::Wreath { base, top } => {
                let n = top.finite_order().expect("wreath top is finite");
                Elem::Wreath(WreathElement {
                    base: vec![base.identity(); n],
                    top: Box::new(top.identity()),
                })
            }
            GroupKind::Subgroup { parent, .. } => parent.identity(),
        }
    }

    pub fn is_identity(&self, x: &Elem) -> bool {
        *x == self.identity()
    }

    /// Product `a·b`. Both arguments must belong to this group; use
    /// [`Group::try_mul`] when that is not already established.
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.kind, a, b) {
            (GroupKind::Cyclic(0), Elem::Int(x), Elem::Int(y)) => Elem::Int(x + y),
            (GroupKind::Cyclic(n), Elem::Residue(x), Elem::Residue(y)) => {
                Elem::Residue(((*x as u128 + *y as u128) % *n as u128) as u64)
            }
            (GroupKind::FreeAbelian(_), Elem::Vector(x), Elem::Vector(y)) => {
                Elem::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupKind::Permutation { .. }, Elem::Perm(x), Elem::Perm(y)) => Elem::Perm(x.compose(y)),
            (GroupKind::Table(t), Elem::Index(x), Elem::Index(y)) => Elem::Index(t.mul(*x, *y)),
            (GroupKind::AbelianByFinite(e), Elem::Pair(v1, h1), Elem::Pair(v2, h2)) => {
                let (v, h) = e.mul((v1, h1), (v2, h2));
                Elem::Pair(v, Box::new(h))
            }
            (GroupKind::Wreath { base, top }, Elem::Wreath(x), Elem::Wreath(y)) => {
                Elem::Wreath(wreath_mul(base, top, x, y))
            }
            (GroupKind::Subgroup { parent, .. }, _, _) => parent.mul(a, b),
            _ => panic!("element shapes {a} and {b} do not match {}", self.name),
        }
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        match (&self.kind, a) {
            (GroupKind::Cyclic(0), Elem::Int(x)) => Elem::Int(-x),
            (GroupKind::Cyclic(n), Elem::Residue(x)) => Elem::Residue((n - x) % n),
            (GroupKind::FreeAbelian(_), Elem::Vector(x)) => Elem::Vector(x.iter().map(|p| -p).collect()),
            (GroupKind::Permutation { .. }, Elem::Perm(x)) => Elem::Perm(x.inverse()),
            (GroupKind::Table(t), Elem::Index(x)) => Elem::Index(t.inv(*x)),
            (GroupKind::AbelianByFinite(e), Elem::Pair(v, h)) => {
                let (w, g) = e.inv((v, h));
                Elem::Pair(w, Box::new(g))
            }
            (GroupKind::Wreath { base, top }, Elem::Wreath(x)) => Elem::Wreath(wreath_inv(base, top, x)),
            (GroupKind::Subgroup { parent, .. }, _) => parent.inv(a),
            _ => panic!("element {a} does not match {}", self.name),
        }
    }

    pub fn pow(&self, a: &Elem, k: &BigInt) -> Elem {
        let (base, mut e) = if k.is_negative() {
            (self.inv(a), k.abs().to_biguint().expect("non-negative"))
        } else {
            (a.clone(), k.to_biguint().expect("non-negative"))
        };
        let mut acc = self.identity();
        let mut sq = base;
        while !e.is_zero() {
            if e.bit(0) {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if !e.is_zero() {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Order of an element of a finite group.
    pub fn element_order(&self, a: &Elem) -> usize {
        let id = self.identity();
        let mut x = a.clone();
        let mut k = 1;
        while x != id {
            x = self.mul(&x, a);
            k += 1;
        }
        k
    }

    /// Checks that the payload is well formed for this group (and, for
    /// enumerable permutation groups and subgroups, that it is a member).
    pub fn check(&self, x: &Elem) -> Result<(), GroupError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GroupError::OwnerMismatch { group: self.name.clone(), element: x.to_string() })
        }
    }

    pub fn contains(&self, x: &Elem) -> bool {
        match (&self.kind, x) {
            (GroupKind::Cyclic(0), Elem::Int(_)) => true,
            (GroupKind::Cyclic(n), Elem::Residue(r)) => *n > 0 && r < n,
            (GroupKind::FreeAbelian(m), Elem::Vector(v)) => v.len() == *m,
            (GroupKind::Permutation { degree, .. }, Elem::Perm(p)) => {
                p.degree() == *degree && self.index_of(x).is_some()
            }
            (GroupKind::Table(t), Elem::Index(i)) => (*i as usize) < t.order(),
            (GroupKind::AbelianByFinite(e), Elem::Pair(v, h)) => {
                v.len() == e.rank() && e.finite().contains(h)
            }
            (GroupKind::Wreath { base, top }, Elem::Wreath(w)) => {
                top.contains(&w.top)
                    && top.finite_order().map(|n| n == w.base.len()).unwrap_or(false)
                    && w.base.iter().all(|b| base.contains(b))
            }
            (GroupKind::Subgroup { .. }, _) => self.index_of(x).is_some(),
            _ => false,
        }
    }

    pub fn try_mul(&self, a: &Elem, b: &Elem) -> Result<Elem, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    fn finite_data(&self) -> Result<&Arc<FiniteData>, GroupError> {
        self.finite
            .get_or_init(|| self.build_finite_data().map(Arc::new))
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn build_finite_data(&self) -> Result<FiniteData, GroupError> {
        let elements = self.enumerate_finite()?;
        let index: HashMap<Elem, usize> =
            elements.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        let inverse = elements.iter().map(|x| index[&self.inv(x)] as u32).collect();
        let n = elements.len();
        let product = (n <= PRODUCT_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(index[&self.mul(a, b)] as u32);
                }
            }
            t
        });
        Ok(FiniteData { elements, index, inverse, product })
    }

    fn enumerate_finite(&self) -> Result<Vec<Elem>, GroupError> {
        let cap = max_order();
        let over = || GroupError::OrderCapExceeded { group: self.name.clone(), cap };
        let mut out = match &self.kind {
            GroupKind::Cyclic(0) | GroupKind::FreeAbelian(1..) => {
                return Err(GroupError::UnboundedEnumeration(self.name.clone()))
            }
            GroupKind::FreeAbelian(0) => vec![self.identity()],
            GroupKind::Cyclic(n) => {
                if *n as usize > cap {
                    return Err(over());
                }
                (0..*n).map(Elem::Residue).collect()
            }
            GroupKind::Table(t) => {
                if t.order() > cap {
                    return Err(over());
                }
                (0..t.order() as u32).map(Elem::Index).collect()
            }
            GroupKind::Permutation { generators, .. } => {
                let gens: Vec<Elem> = generators.iter().cloned().map(Elem::Perm).collect();
                closure(self, &gens, cap).ok_or_else(over)?
            }
            GroupKind::Subgroup { parent, generators } => {
                closure(parent, generators, cap).ok_or_else(over)?
            }
            GroupKind::AbelianByFinite(e) => {
                if e.rank() > 0 {
                    return Err(GroupError::UnboundedEnumeration(self.name.clone()));
                }
                e.finite()
                    .elements()?
                    .iter()
                    .map(|h| Elem::Pair(Vec::new(), Box::new(h.clone())))
                    .collect()
            }
            GroupKind::Wreath { base, top } => {
                if !base.is_finite() {
                    return Err(GroupError::UnboundedEnumeration(self.name.clone()));
                }
                let order = self.order()?.expect("finite");
                if order > BigUint::from(cap) {
                    return Err(over());
                }
                let b = base.elements()?;
                let t = top.elements()?;
                let mut maps: Vec<Vec<Elem>> = vec![Vec::new()];
                for _ in 0..t.len() {
                    maps = maps
                        .into_iter()
                        .flat_map(|m| {
                            b.iter().map(move |x| {
                                let mut m = m.clone();
                                m.push(x.clone());
                                m
                            })
                        })
                        .collect();
                }
                maps.into_iter()
                    .flat_map(|m| {
                        t.iter().map(move |h| {
                            Elem::Wreath(WreathElement { base: m.clone(), top: Box::new(h.clone()) })
                        })
                    })
                    .collect()
            }
        };
        out.sort();
        Ok(out)
    }

    /// All elements in canonical order. Fails for infinite groups and groups
    /// above the order cap.
    pub fn elements(&self) -> Result<&[Elem], GroupError> {
        Ok(&self.finite_data()?.elements)
    }

    /// Position of `x` in the canonical element list.
    pub fn index_of(&self, x: &Elem) -> Option<usize> {
        self.finite_data().ok()?.index.get(x).copied()
    }

    /// Index of `a^{-1}·b` for element indices of a finite group.
    pub(crate) fn left_div_index(&self, a: usize, b: usize) -> usize {
        let data = self.finite_data().expect("finite group");
        let ai = data.inverse[a] as usize;
        match &data.product {
            Some(t) => t[ai * data.elements.len() + b] as usize,
            None => data.index[&self.mul(&data.elements[ai], &data.elements[b])],
        }
    }

    /// A deterministic generating set.
    pub fn generators(&self) -> Vec<Elem> {
        match &self.kind {
            GroupKind::Cyclic(1) => Vec::new(),
            GroupKind::Cyclic(0) => vec![Elem::int(1)],
            GroupKind::Cyclic(_) => vec![Elem::Residue(1)],
            GroupKind::FreeAbelian(m) => (0..*m)
                .map(|i| {
                    let mut v = vec![BigInt::zero(); *m];
                    v[i] = BigInt::one();
                    Elem::Vector(v)
                })
                .collect(),
            GroupKind::Permutation { generators, .. } => {
                generators.iter().filter(|g| !g.is_identity()).cloned().map(Elem::Perm).collect()
            }
            GroupKind::Table(_) => greedy_generators(self),
            GroupKind::Subgroup { generators, .. } => {
                let id = self.identity();
                generators.iter().filter(|g| **g != id).cloned().collect()
            }
            GroupKind::AbelianByFinite(e) => {
                let m = e.rank();
                let h1 = e.finite().identity();
                let mut gens: Vec<Elem> = (0..m)
                    .map(|i| {
                        let mut v = vec![BigInt::zero(); m];
                        v[i] = BigInt::one();
                        Elem::Pair(v, Box::new(h1.clone()))
                    })
                    .collect();
                gens.extend(
                    e.finite()
                        .generators()
                        .into_iter()
                        .map(|h| Elem::Pair(vec![BigInt::zero(); m], Box::new(h))),
                );
                gens
            }
            GroupKind::Wreath { base, top } => {
                let n = top.finite_order().expect("finite top");
                let pos = top.index_of(&top.identity()).expect("identity");
                let mut gens = Vec::new();
                for b in base.generators() {
                    let mut f = vec![base.identity(); n];
                    f[pos] = b;
                    gens.push(Elem::Wreath(WreathElement { base: f, top: Box::new(top.identity()) }));
                }
                for t in top.generators() {
                    gens.push(Elem::Wreath(WreathElement {
                        base: vec![base.identity(); n],
                        top: Box::new(t),
                    }));
                }
                gens
            }
        }
    }

    /// Products of at most `radius` generators and inverses, deduplicated,
    /// in canonical order.
    pub fn ball(&self, radius: usize) -> Vec<Elem> {
        let mut out: Vec<Elem> = self.ball_layers(radius, usize::MAX).into_iter().flatten().collect();
        out.sort();
        out
    }

    /// The first `count` elements of the breadth-first ball (layers in
    /// canonical order), returned in canonical order.
    pub fn ball_of_size(&self, count: usize) -> Vec<Elem> {
        let mut out: Vec<Elem> = self.ball_layers(usize::MAX, count).into_iter().flatten().collect();
        out.truncate(count);
        out.sort();
        out
    }

    fn ball_layers(&self, radius: usize, count: usize) -> Vec<Vec<Elem>> {
        let mut steps = self.generators();
        let inverses: Vec<Elem> = steps.iter().map(|g| self.inv(g)).collect();
        steps.extend(inverses);
        steps.sort();
        steps.dedup();
        let id = self.identity();
        let mut seen: HashSet<Elem> = HashSet::from([id.clone()]);
        let mut layers = vec![vec![id]];
        let mut total = 1;
        for _ in 0..radius {
            if total >= count {
                break;
            }
            let mut next = BTreeSet::new();
            for x in layers.last().expect("nonempty") {
                for s in &steps {
                    let y = self.mul(x, s);
                    if !seen.contains(&y) {
                        next.insert(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            let next: Vec<Elem> = next.into_iter().collect();
            seen.extend(next.iter().cloned());
            total += next.len();
            layers.push(next);
        }
        let mut kept = Vec::new();
        let mut left = count;
        for mut layer in layers {
            if left == 0 {
                break;
            }
            layer.truncate(left);
            left -= layer.len();
            kept.push(layer);
        }
        kept
    }

    /// Finite groups: every element. Infinite groups: the ball of `radius`.
    pub fn enumerate(&self, radius: Option<usize>) -> Result<Vec<Elem>, GroupError> {
        if self.is_finite() {
            return Ok(self.elements()?.to_vec());
        }
        match radius {
            Some(r) => Ok(self.ball(r)),
            None => Err(GroupError::UnboundedEnumeration(self.name.clone())),
        }
    }
}

/// Subgroup of a finite group generated by `gens`, in canonical order, or
/// `None` if it exceeds `cap` elements.
fn closure(group: &Group, gens: &[Elem], cap: usize) -> Option<Vec<Elem>> {
    let id = group.identity();
    let mut seen: HashSet<Elem> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = group.mul(g, &x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<Elem> = seen.into_iter().collect();
    out.sort();
    Some(out)
}

/// Greedy generating set: scan elements in canonical order, keep those not
/// already generated.
fn greedy_generators(group: &Group) -> Vec<Elem> {
    let Ok(elements) = group.elements() else { return Vec::new() };
    let mut gens: Vec<Elem> = Vec::new();
    let mut span: HashSet<Elem> = HashSet::from([group.identity()]);
    for x in elements {
        if span.contains(x) {
            continue;
        }
        gens.push(x.clone());
        span = closure(group, &gens, usize::MAX).expect("finite").into_iter().collect();
        if span.len() == elements.len() {
            break;
        }
    }
    gens
}

/// Left shift `x ↦ F(g⁻¹x)` of a base map stored over the top's canonical
/// element list.
pub(crate) fn shift_base(top: &Group, g: &Elem, f: &[Elem]) -> Vec<Elem> {
    let gi = top.index_of(g).expect("top element");
    (0..f.len()).map(|x| f[top.left_div_index(gi, x)].clone()).collect()
}

fn wreath_mul(base: &Group, top: &Group, x: &WreathElement, y: &WreathElement) -> WreathElement {
    let shifted = shift_base(top, &x.top, &y.base);
    WreathElement {
        base: x.base.iter().zip(&shifted).map(|(a, b)| base.mul(a, b)).collect(),
        top: Box::new(top.mul(&x.top, &y.top)),
    }
}

/// `(F, t)⁻¹ = (x ↦ F(t·x)⁻¹, t⁻¹)`.
fn wreath_inv(base: &Group, top: &Group, x: &WreathElement) -> WreathElement {
    let t_inv = top.inv(&x.top);
    let ti = top.index_of(&t_inv).expect("top element");
    let base_vals = (0..x.base.len())
        .map(|q| base.inv(&x.base[top.left_div_index(ti, q)]))
        .collect();
    WreathElement { base: base_vals, top: Box::new(t_inv) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_four_enumerates_residues() {
        let z4 = Group::cyclic(4);
        let e: Vec<Elem> = (0..4).map(Elem::Residue).collect();
        assert_eq!(z4.elements().unwrap(), e.as_slice());
    }

    #[test]
    fn free_abelian_ball_radius_two() {
        let z = Group::free_abelian(1);
        let expected: Vec<Elem> = (-2..=2).map(|k| Elem::vector(&[k])).collect();
        assert_eq!(z.enumerate(Some(2)).unwrap(), expected);
    }

    #[test]
    fn infinite_without_bound_is_an_error() {
        let z = Group::integers();
        assert!(matches!(z.enumerate(None), Err(GroupError::UnboundedEnumeration(_))));
        let z2 = Group::free_abelian(2);
        assert!(matches!(z2.elements(), Err(GroupError::UnboundedEnumeration(_))));
    }

    #[test]
    fn wreath_z2_z2_has_eight_elements() {
        let w = Group::wreath(Group::cyclic(2), Group::cyclic(2)).unwrap();
        let elems = w.elements().unwrap();
        assert_eq!(elems.len(), 8);
        let distinct: HashSet<&Elem> = elems.iter().collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn wreath_top_must_be_finite() {
        assert!(Group::wreath(Group::cyclic(2), Group::integers()).is_err());
    }

    #[test]
    fn ball_of_size_is_deterministic_and_exact() {
        let g = Group::wreath(Group::free_abelian(1), Group::cyclic(2)).unwrap();
        let a = g.ball_of_size(50);
        assert_eq!(a.len(), 50);
        assert_eq!(a, g.ball_of_size(50));
        let distinct: HashSet<&Elem> = a.iter().collect();
        assert_eq!(distinct.len(), 50);
    }

    #[test]
    fn owner_mismatch_is_reported() {
        let z3 = Group::cyclic(3);
        assert!(z3.try_mul(&Elem::Residue(1), &Elem::Residue(5)).is_err());
        assert!(z3.try_mul(&Elem::Residue(1), &Elem::int(1)).is_err());
    }

    #[test]
    fn integer_payloads_do_not_overflow() {
        let z = Group::integers();
        let big = Elem::Int(BigInt::from(i64::MAX));
        let sum = z.mul(&big, &big);
        assert_eq!(sum, Elem::Int(BigInt::from(i64::MAX) * 2));
    }

    #[test]
    fn power_and_order() {
        let z6 = Group::cyclic(6);
        assert_eq!(z6.pow(&Elem::Residue(1), &BigInt::from(-1)), Elem::Residue(5));
        assert_eq!(z6.element_order(&Elem::Residue(2)), 3);
    }
}
