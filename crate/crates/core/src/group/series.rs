use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{closure, Elem, Group, GroupError};

/// An explicitly enumerated subgroup of a finite group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    generators: Vec<Elem>,
    elements: Vec<Elem>,
    set: HashSet<Elem>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Subgroup) -> bool {
        self.elements == other.elements
    }
}

impl Subgroup {
    /// Subgroup generated by `gens`, with a canonical generating set: the
    /// greedy choice over the canonical element order.
    pub fn generated(group: &Group, gens: &[Elem]) -> Subgroup {
        let elements = closure(group, gens, usize::MAX).expect("finite group");
        let set: HashSet<Elem> = elements.iter().cloned().collect();
        let generators = canonical_generators(group, &elements);
        Subgroup { generators, elements, set }
    }

    pub fn whole(group: &Group) -> Result<Subgroup, GroupError> {
        let elements = group.elements()?.to_vec();
        Ok(Subgroup {
            generators: canonical_generators(group, &elements),
            set: elements.iter().cloned().collect(),
            elements,
        })
    }

    pub fn trivial(group: &Group) -> Subgroup {
        Subgroup::generated(group, &[])
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &Elem) -> bool {
        self.set.contains(x)
    }

    /// This subgroup as a group in its own right, keeping parent payloads.
    pub fn as_group(&self, parent: &Arc<Group>) -> Arc<Group> {
        Group::subgroup(parent, self.generators.clone()).expect("generators lie in the parent")
    }

    /// First `(g, n)` with `g⁻¹ n g ∉ self`, over generators of `ambient`.
    pub fn normality_witness(&self, group: &Group, ambient: &Subgroup) -> Option<(Elem, Elem)> {
        for g in &ambient.generators {
            let gi = group.inv(g);
            for n in &self.generators {
                let c = group.mul(&group.mul(&gi, n), g);
                if !self.contains(&c) {
                    return Some((g.clone(), n.clone()));
                }
            }
        }
        None
    }
}

fn canonical_generators(group: &Group, elements: &[Elem]) -> Vec<Elem> {
    let mut gens: Vec<Elem> = Vec::new();
    let mut span: HashSet<Elem> = HashSet::from([group.identity()]);
    for x in elements {
        if span.len() == elements.len() {
            break;
        }
        if span.contains(x) {
            continue;
        }
        gens.push(x.clone());
        span = closure(group, &gens, usize::MAX).expect("finite").into_iter().collect();
    }
    gens
}

fn commutator(group: &Group, a: &Elem, b: &Elem) -> Elem {
    let ai = group.inv(a);
    let bi = group.inv(b);
    group.mul(&group.mul(&ai, &bi), &group.mul(a, b))
}

/// Smallest subgroup of `ambient` containing `seeds` and normal in it.
fn normal_closure(group: &Group, ambient: &Subgroup, seeds: Vec<Elem>) -> Subgroup {
    let mut gens = seeds;
    let mut m = Subgroup::generated(group, &gens);
    loop {
        let missing = ambient.generators.iter().find_map(|k| {
            let ki = group.inv(k);
            m.generators
                .iter()
                .map(|s| group.mul(&group.mul(&ki, s), k))
                .find(|c| !m.contains(c))
        });
        match missing {
            Some(c) => {
                gens.push(c);
                m = Subgroup::generated(group, &gens);
            }
            None => return m,
        }
    }
}

/// `[K, K]` as the normal closure of commutators of generators.
pub(crate) fn derived_subgroup(group: &Group, k: &Subgroup) -> Subgroup {
    let id = group.identity();
    let mut seeds = Vec::new();
    for a in &k.generators {
        for b in &k.generators {
            let c = commutator(group, a, b);
            if c != id {
                seeds.push(c);
            }
        }
    }
    normal_closure(group, k, seeds)
}

/// `G = G_0 ⊵ G_1 ⊵ … ⊵ G_r`, each term enumerated inside `group`.
#[derive(Clone, Debug)]
pub struct SubnormalSeries {
    pub group: Arc<Group>,
    pub terms: Vec<Subgroup>,
    /// `|G_{i-1} : G_i|` for `i = 1..=r`.
    pub quotient_orders: Vec<u64>,
}

impl SubnormalSeries {
    /// Builds a series from explicit generator lists for `G_1, …, G_r`.
    pub fn from_generators(group: &Arc<Group>, terms: &[Vec<Elem>]) -> Result<SubnormalSeries, GroupError> {
        let mut all = vec![Subgroup::whole(group)?];
        for gens in terms {
            for g in gens {
                group.check(g)?;
            }
            all.push(Subgroup::generated(group, gens));
        }
        let quotient_orders = all.windows(2).map(|w| (w[0].order() / w[1].order()) as u64).collect();
        let s = SubnormalSeries { group: group.clone(), terms: all, quotient_orders };
        s.verify()?;
        Ok(s)
    }

    pub fn length(&self) -> usize {
        self.quotient_orders.len()
    }

    /// Checks containment, normality of each term in its predecessor (by
    /// conjugating generators), indices, and that the last term is trivial.
    pub fn verify(&self) -> Result<(), GroupError> {
        let g = &self.group;
        for (i, w) in self.terms.windows(2).enumerate() {
            let (outer, inner) = (&w[0], &w[1]);
            if let Some(x) = inner.elements.iter().find(|x| !outer.contains(x)) {
                return Err(GroupError::Unsupported(format!(
                    "term {} is not contained in term {i}: {x}",
                    i + 1
                )));
            }
            if let Some((a, n)) = inner.normality_witness(g, outer) {
                return Err(GroupError::NotNormal { g: a.to_string(), n: n.to_string() });
            }
            if outer.order() != inner.order() * self.quotient_orders[i] as usize {
                return Err(GroupError::Unsupported(format!("index of term {} is wrong", i + 1)));
            }
        }
        if self.terms.last().map(|t| t.order()) != Some(1) {
            return Err(GroupError::Unsupported("series does not end at the trivial group".into()));
        }
        Ok(())
    }

    /// Smallest element of `G_{i-1}` whose coset generates `G_{i-1}/G_i`, if
    /// that quotient is cyclic.
    pub fn quotient_generator(&self, i: usize) -> Option<Elem> {
        let (outer, inner) = (&self.terms[i - 1], &self.terms[i]);
        let q = self.quotient_orders[i - 1];
        outer.elements.iter().find(|x| coset_order(&self.group, inner, x) == q).cloned()
    }

    pub fn quotients_cyclic(&self) -> bool {
        (1..=self.length()).all(|i| self.quotient_generator(i).is_some())
    }
}

/// Order of `x·N` in the quotient by `n`.
pub(crate) fn coset_order(group: &Group, n: &Subgroup, x: &Elem) -> u64 {
    let mut y = x.clone();
    let mut k = 1;
    while !n.contains(&y) {
        y = group.mul(&y, x);
        k += 1;
    }
    k
}

/// The derived series, or a `NotSolvable` error naming the stable perfect
/// subgroup.
pub fn derived_series(group: &Arc<Group>) -> Result<SubnormalSeries, GroupError> {
    let mut terms = vec![Subgroup::whole(group)?];
    loop {
        let k = terms.last().expect("nonempty");
        if k.order() == 1 {
            break;
        }
        let d = derived_subgroup(group, k);
        if d.order() == k.order() {
            return Err(GroupError::NotSolvable {
                order: d.order(),
                generators: d.generators.iter().map(|x| x.to_string()).collect(),
            });
        }
        terms.push(d);
    }
    let quotient_orders = terms.windows(2).map(|w| (w[0].order() / w[1].order()) as u64).collect();
    Ok(SubnormalSeries { group: group.clone(), terms, quotient_orders })
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..).find(|p| n.is_multiple_of(*p) || p * p > n).map(|p| if n.is_multiple_of(p) { p } else { n }).expect("n ≥ 2")
}

/// A subnormal series with all quotients cyclic of prime order.
///
/// Each step takes `K`, forms `B = [K,K]·⟨g^p⟩` for the smallest prime `p`
/// dividing `|K/[K,K]|`, picks an `F_p`-basis of `K/B` greedily in canonical
/// order, and drops the last basis vector. The result contains `[K,K]`, so it
/// is normal in `K`, and has index `p`.
pub fn prime_cyclic_series(group: &Arc<Group>) -> Result<SubnormalSeries, GroupError> {
    derived_series(group)?;
    let g = group.as_ref();
    let mut terms = vec![Subgroup::whole(g)?];
    let mut orders = Vec::new();
    loop {
        let k = terms.last().expect("nonempty").clone();
        if k.order() == 1 {
            break;
        }
        let kp = derived_subgroup(g, &k);
        let p = smallest_prime_factor(k.order() / kp.order());
        let mut b_gens = kp.generators.clone();
        b_gens.extend(k.generators.iter().map(|x| g.pow(x, &BigInt::from(p))));
        let b = Subgroup::generated(g, &b_gens);
        let mut chosen: Vec<Elem> = Vec::new();
        let mut span = b.clone();
        for x in &k.elements {
            if span.order() == k.order() {
                break;
            }
            if !span.contains(x) {
                chosen.push(x.clone());
                let mut gens = b.generators.clone();
                gens.extend(chosen.iter().cloned());
                span = Subgroup::generated(g, &gens);
            }
        }
        chosen.pop();
        let mut gens = b.generators.clone();
        gens.extend(chosen);
        let m = Subgroup::generated(g, &gens);
        debug_assert_eq!(m.order() * p, k.order());
        orders.push(p as u64);
        terms.push(m);
    }
    let s = SubnormalSeries { group: group.clone(), terms, quotient_orders: orders };
    s.verify()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    fn orders(s: &SubnormalSeries) -> Vec<usize> {
        s.terms.iter().map(|t| t.order()).collect()
    }

    #[test]
    fn derived_series_of_s3() {
        let s3 = catalog::get("S3").unwrap();
        let s = derived_series(&s3).unwrap();
        assert_eq!(orders(&s), vec![6, 3, 1]);
    }

    #[test]
    fn a5_is_perfect() {
        let a5 = catalog::get("A5").unwrap();
        match derived_series(&a5) {
            Err(GroupError::NotSolvable { order, .. }) => assert_eq!(order, 60),
            other => panic!("expected NotSolvable, got {other:?}"),
        }
        assert!(prime_cyclic_series(&a5).is_err());
    }

    #[test]
    fn abelian_derived_series_is_short() {
        let z6 = Group::cyclic(6);
        let s = derived_series(&z6).unwrap();
        assert_eq!(orders(&s), vec![6, 1]);
    }

    #[test]
    fn prime_series_examples() {
        assert_eq!(prime_cyclic_series(&catalog::get("S3").unwrap()).unwrap().quotient_orders, vec![2, 3]);
        assert_eq!(prime_cyclic_series(&Group::cyclic(4)).unwrap().quotient_orders, vec![2, 2]);
        assert_eq!(prime_cyclic_series(&catalog::get("Q8").unwrap()).unwrap().quotient_orders, vec![2, 2, 2]);
        let s = prime_cyclic_series(&Group::cyclic(4)).unwrap();
        assert_eq!(s.terms[1].elements(), &[Elem::Residue(0), Elem::Residue(2)]);
    }

    #[test]
    fn prime_series_of_s3_passes_through_a3() {
        let s3 = catalog::get("S3").unwrap();
        let s = prime_cyclic_series(&s3).unwrap();
        let a3 = derived_series(&s3).unwrap().terms[1].clone();
        assert_eq!(s.terms[1], a3);
    }

    #[test]
    fn rejects_non_normal_series() {
        let s3 = catalog::get("S3").unwrap();
        let t = Elem::Perm(crate::group::Perm::from_cycles(3, &[&[1, 2]]).unwrap());
        let err = SubnormalSeries::from_generators(&s3, &[vec![t], vec![]]).unwrap_err();
        assert!(matches!(err, GroupError::NotNormal { .. }), "{err}");
    }

    #[test]
    fn quotient_generator_exists_for_cyclic_quotients() {
        let q8 = catalog::get("Q8").unwrap();
        let d = derived_series(&q8).unwrap();
        // Q8/{±1} is the Klein four-group
        assert!(!d.quotients_cyclic());
        assert!(prime_cyclic_series(&q8).unwrap().quotients_cyclic());
    }
}
