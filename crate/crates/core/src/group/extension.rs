use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Elem, Group, GroupError};

/// An extension `1 → Z^m → G → H → 1` with `H` finite, given by an action
/// `θ: H → GL_m(Z)` and a normalized 2-cocycle `c: H × H → Z^m`.
///
/// Multiplication: `(v1,h1)(v2,h2) = (v1 + θ(h1)v2 + c(h1,h2), h1h2)`.
#[derive(Clone, Debug)]
pub struct Extension {
    rank: usize,
    finite: Arc<Group>,
    /// `action[i]` is θ of the i-th element of `finite` (canonical order).
    action: Vec<Vec<Vec<i64>>>,
    /// `cocycle[i][j] = c(h_i, h_j)`.
    cocycle: Vec<Vec<Vec<BigInt>>>,
}

impl PartialEq for Extension {
    fn eq(&self, other: &Extension) -> bool {
        self.rank == other.rank
            && self.finite == other.finite
            && self.action == other.action
            && self.cocycle == other.cocycle
    }
}

fn mat_vec(m: &[Vec<i64>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(&a, x)| BigInt::from(a) * x).sum())
        .collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl Extension {
    /// Validates θ as a homomorphism into `GL_m(Z)` and `c` as a normalized
    /// 2-cocycle: `θ(h1)c(h2,h3) + c(h1,h2h3) = c(h1,h2) + c(h1h2,h3)`.
    pub fn new(
        rank: usize,
        finite: Arc<Group>,
        action: Vec<Vec<Vec<i64>>>,
        cocycle: Vec<Vec<Vec<BigInt>>>,
    ) -> Result<Extension, GroupError> {
        let bad = |m: String| GroupError::InvalidExtension(m);
        let elems = finite.elements()?.to_vec();
        let n = elems.len();
        if action.len() != n {
            return Err(bad(format!("expected {n} action matrices, found {}", action.len())));
        }
        for m in &action {
            if m.len() != rank || m.iter().any(|r| r.len() != rank) {
                return Err(bad(format!("action matrices must be {rank}×{rank}")));
            }
        }
        if cocycle.len() != n
            || cocycle.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != rank))
        {
            return Err(bad(format!("cocycle must be a {n}×{n} table of length-{rank} vectors")));
        }
        let idx = |x: &Elem| finite.index_of(x).expect("element of H");
        let id = idx(&finite.identity());
        let eye: Vec<Vec<i64>> =
            (0..rank).map(|i| (0..rank).map(|j| i64::from(i == j)).collect()).collect();
        if action[id] != eye {
            return Err(bad("θ(1) must be the identity matrix".into()));
        }
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let k = idx(&finite.mul(a, b));
                if mat_mul(&action[i], &action[j]) != action[k] {
                    return Err(bad(format!("θ is not multiplicative at ({a}, {b})")));
                }
            }
        }
        for i in 0..n {
            if cocycle[id][i].iter().chain(&cocycle[i][id]).any(|x| !x.is_zero()) {
                return Err(bad(format!("cocycle not normalized at {}", elems[i])));
            }
        }
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let ab = idx(&finite.mul(a, b));
                for (k, c) in elems.iter().enumerate() {
                    let bc = idx(&finite.mul(b, c));
                    let lhs = add(&mat_vec(&action[i], &cocycle[j][k]), &cocycle[i][bc]);
                    let rhs = add(&cocycle[i][j], &cocycle[ab][k]);
                    if lhs != rhs {
                        return Err(bad(format!("cocycle identity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(Extension { rank, finite, action, cocycle })
    }

    /// The split extension `Z^m ⋊_θ H`.
    pub fn split(rank: usize, finite: Arc<Group>, action: Vec<Vec<Vec<i64>>>) -> Result<Extension, GroupError> {
        let n = finite.elements()?.len();
        let cocycle = vec![vec![vec![BigInt::zero(); rank]; n]; n];
        Extension::new(rank, finite, action, cocycle)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn finite(&self) -> &Arc<Group> {
        &self.finite
    }

    fn pos(&self, h: &Elem) -> usize {
        self.finite.index_of(h).expect("element of the finite quotient")
    }

    pub fn theta(&self, h: &Elem) -> &[Vec<i64>] {
        &self.action[self.pos(h)]
    }

    pub fn act(&self, h: &Elem, v: &[BigInt]) -> Vec<BigInt> {
        mat_vec(self.theta(h), v)
    }

    pub fn cocycle(&self, a: &Elem, b: &Elem) -> &[BigInt] {
        &self.cocycle[self.pos(a)][self.pos(b)]
    }

    pub(super) fn mul(&self, a: (&[BigInt], &Elem), b: (&[BigInt], &Elem)) -> (Vec<BigInt>, Elem) {
        let v = add(&add(a.0, &self.act(a.1, b.0)), self.cocycle(a.1, b.1));
        (v, self.finite.mul(a.1, b.1))
    }

    /// `(v,h)⁻¹ = (−θ(h⁻¹)(v + c(h,h⁻¹)), h⁻¹)`.
    pub(super) fn inv(&self, a: (&[BigInt], &Elem)) -> (Vec<BigInt>, Elem) {
        let h_inv = self.finite.inv(a.1);
        let w = self.act(&h_inv, &add(a.0, self.cocycle(a.1, &h_inv)));
        (w.into_iter().map(|x| -x).collect(), h_inv)
    }
}
