//! Named groups used by the CLI and the test suites.

use std::sync::Arc;

use super::{CayleyTable, Group, GroupError, Perm};

pub struct Entry {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> Arc<Group>,
}

fn perm_group(name: &str, degree: usize, cycles: &[&[&[u32]]]) -> Arc<Group> {
    let gens = cycles
        .iter()
        .map(|c| Perm::from_cycles(degree, c).expect("catalog permutation"))
        .collect();
    Group::permutation(degree, gens).expect("catalog group").with_name(name)
}

/// Quaternion group as a Cayley table over `1, -1, i, -i, j, -j, k, -k`.
pub fn quaternion_table() -> CayleyTable {
    // unit products: row/col order 1, i, j, k; value (sign, unit)
    const UNIT: [[(i8, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ];
    let decode = |x: usize| (if x.is_multiple_of(2) { 1i8 } else { -1 }, x / 2);
    let mut t = Vec::with_capacity(64);
    for a in 0..8 {
        for b in 0..8 {
            let (sa, ua) = decode(a);
            let (sb, ub) = decode(b);
            let (s, u) = UNIT[ua][ub];
            let sign = sa * sb * s;
            t.push((2 * u + usize::from(sign < 0)) as u32);
        }
    }
    CayleyTable::new(8, t).expect("quaternion table")
}

/// A matrix group over `F_3` acting on the eight nonzero vectors of `F_3^2`.
fn f3_matrix_group(name: &str, mats: &[[[u32; 2]; 2]]) -> Arc<Group> {
    let points: Vec<(u32, u32)> =
        (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).filter(|&p| p != (0, 0)).collect();
    let gens = mats
        .iter()
        .map(|m| {
            let images = points
                .iter()
                .map(|&(x, y)| {
                    let v = ((m[0][0] * x + m[0][1] * y) % 3, (m[1][0] * x + m[1][1] * y) % 3);
                    points.iter().position(|&p| p == v).expect("nonzero image") as u32
                })
                .collect();
            Perm::from_images(images).expect("invertible matrix")
        })
        .collect();
    Group::permutation(8, gens).expect("catalog group").with_name(name)
}

pub static ENTRIES: &[Entry] = &[
    Entry { name: "Z1", description: "trivial group", build: || Group::cyclic(1).with_name("Z1") },
    Entry { name: "Z2", description: "cyclic group of order 2", build: || Group::cyclic(2).with_name("Z2") },
    Entry { name: "Z3", description: "cyclic group of order 3", build: || Group::cyclic(3).with_name("Z3") },
    Entry { name: "Z4", description: "cyclic group of order 4", build: || Group::cyclic(4).with_name("Z4") },
    Entry { name: "Z5", description: "cyclic group of order 5", build: || Group::cyclic(5).with_name("Z5") },
    Entry { name: "Z6", description: "cyclic group of order 6", build: || Group::cyclic(6).with_name("Z6") },
    Entry { name: "Z8", description: "cyclic group of order 8", build: || Group::cyclic(8).with_name("Z8") },
    Entry { name: "Z12", description: "cyclic group of order 12", build: || Group::cyclic(12).with_name("Z12") },
    Entry { name: "V4", description: "Klein four-group Z2×Z2", build: || perm_group("V4", 4, &[&[&[1, 2]], &[&[3, 4]]]) },
    Entry { name: "Z4xZ2", description: "Z4×Z2", build: || perm_group("Z4xZ2", 6, &[&[&[1, 2, 3, 4]], &[&[5, 6]]]) },
    Entry { name: "Z2^3", description: "elementary abelian group of order 8", build: || perm_group("Z2^3", 6, &[&[&[1, 2]], &[&[3, 4]], &[&[5, 6]]]) },
    Entry { name: "Z3xZ3", description: "Z3×Z3", build: || perm_group("Z3xZ3", 6, &[&[&[1, 2, 3]], &[&[4, 5, 6]]]) },
    Entry { name: "S3", description: "symmetric group on 3 points", build: || perm_group("S3", 3, &[&[&[1, 2]], &[&[1, 2, 3]]]) },
    Entry { name: "D4", description: "dihedral group of order 8", build: || perm_group("D4", 4, &[&[&[1, 2, 3, 4]], &[&[1, 3]]]) },
    Entry { name: "Q8", description: "quaternion group (Cayley table)", build: || Group::table(quaternion_table()).with_name("Q8") },
    Entry { name: "D5", description: "dihedral group of order 10", build: || perm_group("D5", 5, &[&[&[1, 2, 3, 4, 5]], &[&[2, 5], &[3, 4]]]) },
    Entry { name: "D6", description: "dihedral group of order 12", build: || perm_group("D6", 6, &[&[&[1, 2, 3, 4, 5, 6]], &[&[2, 6], &[3, 5]]]) },
    Entry { name: "A4", description: "alternating group on 4 points", build: || perm_group("A4", 4, &[&[&[1, 2, 3]], &[&[1, 2], &[3, 4]]]) },
    Entry { name: "Dic3", description: "dicyclic group of order 12 (Z3⋊Z4)", build: || perm_group("Dic3", 7, &[&[&[1, 2, 3]], &[&[2, 3], &[4, 5, 6, 7]]]) },
    Entry { name: "S4", description: "symmetric group on 4 points", build: || perm_group("S4", 4, &[&[&[1, 2, 3, 4]], &[&[1, 2]]]) },
    Entry { name: "SL23", description: "SL(2,3) acting on nonzero vectors of F3^2", build: || f3_matrix_group("SL23", &[[[1, 1], [0, 1]], [[1, 0], [1, 1]]]) },
    Entry { name: "GL23", description: "GL(2,3) acting on nonzero vectors of F3^2", build: || f3_matrix_group("GL23", &[[[1, 1], [0, 1]], [[1, 0], [1, 1]], [[2, 0], [0, 1]]]) },
    Entry { name: "A5", description: "alternating group on 5 points (not solvable)", build: || perm_group("A5", 5, &[&[&[1, 2, 3, 4, 5]], &[&[1, 2, 3]]]) },
    Entry { name: "Z2wrZ2", description: "Z2≀Z2, order 8", build: || Group::wreath(Group::cyclic(2), Group::cyclic(2)).expect("finite top") },
    Entry { name: "Z3wrZ2", description: "Z3≀Z2, order 18", build: || Group::wreath(Group::cyclic(3), Group::cyclic(2)).expect("finite top") },
    Entry {
        name: "Z2wrZ2wrZ2",
        description: "(Z2≀Z2)≀Z2, order 128",
        build: || Group::iterated_wreath(&[Group::cyclic(2), Group::cyclic(2), Group::cyclic(2)]).expect("finite tops"),
    },
];

pub fn get(name: &str) -> Result<Arc<Group>, GroupError> {
    ENTRIES
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .map(|e| (e.build)())
        .ok_or_else(|| GroupError::Unsupported(format!("unknown catalog group {name:?}")))
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}
