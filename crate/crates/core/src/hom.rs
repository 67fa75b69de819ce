//! Group homomorphisms given by explicit tables or evaluable rules.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{document::GroupDoc, Elem, Group, GroupError, GroupKind};

#[derive(Debug, Error)]
pub enum HomError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("generator images do not define a homomorphism: {0}")]
    NotWellDefined(String),
    #[error("table is not total: missing {0}")]
    NotTotal(String),
    #[error("{0}")]
    Unsupported(String),
}

type RuleFn = dyn Fn(&Elem) -> Elem + Send + Sync;

#[derive(Clone)]
enum Rule {
    Table(Arc<HashMap<Elem, Elem>>),
    Closure(Arc<RuleFn>),
}

#[derive(Clone)]
pub struct Homomorphism {
    domain: Arc<Group>,
    codomain: Arc<Group>,
    rule: Rule,
    provenance: String,
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Homomorphism({} → {}, {})", self.domain, self.codomain, self.provenance)
    }
}

impl Homomorphism {
    /// A table defined on every element of a finite domain.
    pub fn from_table(
        domain: Arc<Group>,
        codomain: Arc<Group>,
        table: HashMap<Elem, Elem>,
        provenance: impl Into<String>,
    ) -> Result<Homomorphism, HomError> {
        for x in domain.elements()? {
            match table.get(x) {
                None => return Err(HomError::NotTotal(x.to_string())),
                Some(y) => codomain.check(y)?,
            }
        }
        Ok(Homomorphism { domain, codomain, rule: Rule::Table(Arc::new(table)), provenance: provenance.into() })
    }

    /// A rule evaluated on demand; the caller vouches for multiplicativity,
    /// which [`crate::wreath::verify_homomorphism_injective`] checks.
    pub fn from_fn(
        domain: Arc<Group>,
        codomain: Arc<Group>,
        provenance: impl Into<String>,
        f: impl Fn(&Elem) -> Elem + Send + Sync + 'static,
    ) -> Homomorphism {
        Homomorphism { domain, codomain, rule: Rule::Closure(Arc::new(f)), provenance: provenance.into() }
    }

    pub fn identity(group: &Arc<Group>) -> Homomorphism {
        Homomorphism::from_fn(group.clone(), group.clone(), "identity", |x| x.clone())
    }

    /// Extends images of the domain's generators. Finite domains are walked
    /// along the Cayley graph, checking `φ(s·x) = φ(s)·φ(x)` on every edge;
    /// free abelian and infinite cyclic domains use the power-product formula
    /// after checking that the images commute.
    pub fn from_generator_images(
        domain: Arc<Group>,
        codomain: Arc<Group>,
        images: &[(Elem, Elem)],
        provenance: impl Into<String>,
    ) -> Result<Homomorphism, HomError> {
        for (x, y) in images {
            domain.check(x)?;
            codomain.check(y)?;
        }
        if domain.is_finite() {
            let mut table: HashMap<Elem, Elem> = HashMap::from([(domain.identity(), codomain.identity())]);
            let mut queue = VecDeque::from([domain.identity()]);
            while let Some(x) = queue.pop_front() {
                let fx = table[&x].clone();
                for (s, t) in images {
                    let y = domain.mul(s, &x);
                    let fy = codomain.mul(t, &fx);
                    match table.get(&y) {
                        Some(old) if *old != fy => {
                            return Err(HomError::NotWellDefined(format!(
                                "{y} would map to both {old} and {fy}"
                            )))
                        }
                        Some(_) => {}
                        None => {
                            table.insert(y.clone(), fy);
                            queue.push_back(y);
                        }
                    }
                }
            }
            return Homomorphism::from_table(domain, codomain, table, provenance);
        }
        let lookup = |g: &Elem| {
            images
                .iter()
                .find(|(x, _)| x == g)
                .map(|(_, y)| y.clone())
                .ok_or_else(|| HomError::NotWellDefined(format!("no image for generator {g}")))
        };
        let gen_images: Vec<Elem> =
            domain.generators().iter().map(lookup).collect::<Result<_, _>>()?;
        for (i, a) in gen_images.iter().enumerate() {
            for b in &gen_images[i + 1..] {
                if codomain.mul(a, b) != codomain.mul(b, a) {
                    return Err(HomError::NotWellDefined(format!("images {a} and {b} do not commute")));
                }
            }
        }
        let cod = codomain.clone();
        match domain.kind() {
            GroupKind::Cyclic(0) => {
                let img = gen_images[0].clone();
                Ok(Homomorphism::from_fn(domain, codomain, provenance, move |x| match x {
                    Elem::Int(k) => cod.pow(&img, k),
                    _ => panic!("{x} is not an integer"),
                }))
            }
            GroupKind::FreeAbelian(_) => Ok(Homomorphism::from_fn(domain, codomain, provenance, move |x| {
                let v = x.as_vector().expect("vector payload");
                v.iter()
                    .zip(&gen_images)
                    .fold(cod.identity(), |acc, (k, img)| cod.mul(&acc, &cod.pow(img, k)))
            })),
            _ => Err(HomError::Unsupported(format!(
                "generator images on infinite {} need a normal form",
                domain.name()
            ))),
        }
    }

    pub fn domain(&self) -> &Arc<Group> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Group> {
        &self.codomain
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn apply(&self, x: &Elem) -> Elem {
        match &self.rule {
            Rule::Table(t) => t.get(x).cloned().unwrap_or_else(|| panic!("{x} is outside the domain table")),
            Rule::Closure(f) => f(x),
        }
    }

    pub fn try_apply(&self, x: &Elem) -> Result<Elem, GroupError> {
        self.domain.check(x)?;
        Ok(self.apply(x))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Homomorphism) -> Homomorphism {
        let (a, b) = (self.clone(), inner.clone());
        let provenance = format!("{} ∘ {}", self.provenance, inner.provenance);
        let h = Homomorphism::from_fn(inner.domain.clone(), self.codomain.clone(), provenance, move |x| {
            a.apply(&b.apply(x))
        });
        h.tabulated()
    }

    /// Replaces a rule by its table when the domain is enumerable.
    pub fn tabulated(self) -> Homomorphism {
        if matches!(self.rule, Rule::Table(_)) || !self.domain.is_finite() {
            return self;
        }
        let Ok(elements) = self.domain.elements() else { return self };
        let table: HashMap<Elem, Elem> = elements.iter().map(|x| (x.clone(), self.apply(x))).collect();
        Homomorphism { rule: Rule::Table(Arc::new(table)), ..self }
    }

    /// Serializable form: the full table for finite domains, generator images
    /// otherwise.
    pub fn to_document(&self) -> HomDoc {
        let pairs = |xs: &[Elem]| xs.iter().map(|x| [x.to_string(), self.apply(x).to_string()]).collect();
        match self.domain.elements() {
            Ok(all) => HomDoc {
                domain: self.domain.name().to_string(),
                codomain: self.codomain.name().to_string(),
                provenance: self.provenance.clone(),
                table: Some(pairs(all)),
                generator_images: None,
            },
            Err(_) => HomDoc {
                domain: self.domain.name().to_string(),
                codomain: self.codomain.name().to_string(),
                provenance: self.provenance.clone(),
                table: None,
                generator_images: Some(pairs(&self.domain.generators())),
            },
        }
    }
}

/// Printable homomorphism record embedded in certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomDoc {
    pub domain: String,
    pub codomain: String,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_images: Option<Vec<[String; 2]>>,
}

/// Element literal in documents: integers, integer vectors, or one-line
/// permutations, interpreted against a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemDoc {
    Int(i64),
    Vector(Vec<i64>),
}

impl ElemDoc {
    pub fn to_elem(&self, group: &Group) -> Result<Elem, GroupError> {
        let bad = || GroupError::Document(format!("{self:?} is not an element of {}", group.name()));
        let e = match (group.kind(), self) {
            (GroupKind::Cyclic(0), ElemDoc::Int(k)) => Elem::Int(BigInt::from(*k)),
            (GroupKind::Cyclic(n), ElemDoc::Int(k)) => Elem::Residue(k.rem_euclid(*n as i64) as u64),
            (GroupKind::FreeAbelian(_), ElemDoc::Vector(v)) => Elem::vector(v),
            (GroupKind::FreeAbelian(1), ElemDoc::Int(k)) => Elem::vector(&[*k]),
            (GroupKind::Permutation { .. }, ElemDoc::Vector(v)) => {
                let images: Vec<u32> = v.iter().map(|&x| u32::try_from(x).map_err(|_| bad())).collect::<Result<_, _>>()?;
                Elem::Perm(crate::group::Perm::from_one_line(&images)?)
            }
            (GroupKind::Table(_), ElemDoc::Int(k)) => Elem::Index(u32::try_from(*k).map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        group.check(&e)?;
        Ok(e)
    }
}

/// A homomorphism given by generator images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSpecDoc {
    pub images: Vec<(ElemDoc, ElemDoc)>,
}

impl HomSpecDoc {
    pub fn build(&self, domain: &Arc<Group>, codomain: &Arc<Group>, provenance: &str) -> Result<Homomorphism, HomError> {
        let images = self
            .images
            .iter()
            .map(|(x, y)| Ok((x.to_elem(domain)?, y.to_elem(codomain)?)))
            .collect::<Result<Vec<_>, GroupError>>()?;
        Homomorphism::from_generator_images(domain.clone(), codomain.clone(), &images, provenance)
    }
}

/// Groups named by document, used when ingesting homomorphism families.
pub fn build_group(doc: &GroupDoc) -> Result<Arc<Group>, GroupError> {
    doc.build()
}
