//! Brute-force oracles and fuzz inputs shared by the integration suites.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use systolic::generators::{klein_grid, rp2_minimal, sphere, torus_grid, torus_minimal};
use systolic::geometry::{build_double_cover, shortest_distances, SubdividedComplex};
use systolic::z2::homology_basis;
use systolic::{Complex2, MetricComplex, Z2Vector};

/// Column masks of the boundary maps, built without the library's face
/// tables.
pub struct Boundaries {
    pub d1: Vec<u128>,
    pub d2: Vec<u128>,
}

pub fn boundaries(c: &Complex2) -> Boundaries {
    let index: HashMap<[usize; 2], usize> = c.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let d1 = c.edges().iter().map(|&[u, v]| (1u128 << u) | (1u128 << v)).collect();
    let d2 = c
        .triangles()
        .iter()
        .map(|&[a, b, x]| [[a, b], [b, x], [a, x]].iter().fold(0u128, |m, e| m | (1u128 << index[e])))
        .collect();
    Boundaries { d1, d2 }
}

/// Size of the kernel of the map with the given columns, counted by
/// enumerating every chain (split in two halves that meet in the middle).
pub fn kernel_size(cols: &[u128]) -> u64 {
    let (lo, hi) = cols.split_at(cols.len() / 2);
    let images = |part: &[u128]| -> Vec<u128> {
        let mut out = vec![0u128; 1 << part.len()];
        for s in 1..out.len() {
            let bit = s.trailing_zeros() as usize;
            out[s] = out[s & (s - 1)] ^ part[bit];
        }
        out
    };
    let mut counts: HashMap<u128, u64> = HashMap::new();
    for x in images(lo) {
        *counts.entry(x).or_default() += 1;
    }
    images(hi).iter().map(|x| counts.get(x).copied().unwrap_or(0)).sum()
}

pub fn log2_exact(n: u64) -> usize {
    assert!(n.is_power_of_two(), "{n} is not a power of two");
    n.trailing_zeros() as usize
}

pub fn enumerated_betti(c: &Complex2) -> [usize; 3] {
    let b = boundaries(c);
    let z1 = log2_exact(kernel_size(&b.d1));
    let z2 = log2_exact(kernel_size(&b.d2));
    let rank1 = c.edge_count() - z1;
    let rank2 = c.triangle_count() - z2;
    [c.vertex_count() - rank1 - 1, z1 - rank2, z2]
}

/// Row-reduction over u128 bit rows; returns a basis of the null space.
pub fn null_space(rows: &[u128], ncols: usize) -> Vec<u128> {
    let mut rows = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i] >> col & 1 == 1 {
                rows[i] ^= rows[r];
            }
        }
        pivots.push(col);
        r += 1;
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = 1u128 << free;
            for (i, &p) in pivots.iter().enumerate() {
                if rows[i] >> free & 1 == 1 {
                    v |= 1u128 << p;
                }
            }
            v
        })
        .collect()
}

pub fn rank(rows: &[u128]) -> usize {
    let mut rows = rows.to_vec();
    let mut r = 0;
    for col in 0..128 {
        let Some(p) = (r..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i] >> col & 1 == 1 {
                rows[i] ^= rows[r];
            }
        }
        r += 1;
    }
    r
}

/// `⟨a ∪ b, Σ triangles⟩` with the front-face/back-face rule.
pub fn pairing_on_sum(c: &Complex2, a: u128, b: u128) -> bool {
    let index: HashMap<[usize; 2], usize> = c.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
    c.triangles().iter().fold(false, |acc, &[x, y, z]| {
        acc ^ (a >> index[&[x, y]] & 1 == 1 && b >> index[&[y, z]] & 1 == 1)
    })
}

pub struct PairingFacts {
    pub rank: usize,
    pub alternating: bool,
}

/// Pairing form on all 1-cocycles against the sum of all triangles.
pub fn oracle_pairing(c: &Complex2) -> PairingFacts {
    let b = boundaries(c);
    // Cocycle condition: one row per triangle over the edge columns.
    let cocycles = null_space(&b.d2, c.edge_count());
    let rows: Vec<u128> = cocycles
        .iter()
        .map(|&a| cocycles.iter().enumerate().fold(0u128, |m, (j, &bb)| m | ((pairing_on_sum(c, a, bb) as u128) << j)))
        .collect();
    PairingFacts { rank: rank(&rows), alternating: cocycles.iter().all(|&a| !pairing_on_sum(c, a, a)) }
}

pub fn to_mask(v: &Z2Vector) -> u128 {
    v.support().iter().fold(0u128, |m, &e| m | (1u128 << e))
}

/// Connected sum of two 7-vertex tori along one triangle each.
pub fn genus_two() -> Complex2 {
    let t = torus_minimal(1.0).unwrap();
    let tris = t.complex().triangles().to_vec();
    let cut = tris[0];
    let mut relabel: Vec<usize> = (0..7).collect();
    let mut next = 7;
    for (v, slot) in relabel.iter_mut().enumerate() {
        if let Some(i) = cut.iter().position(|&x| x == v) {
            *slot = cut[i];
        } else {
            *slot = next;
            next += 1;
        }
    }
    let mut all: Vec<[usize; 3]> = tris[1..].to_vec();
    all.extend(tris[1..].iter().map(|t| {
        let mut s = t.map(|v| relabel[v]);
        s.sort_unstable();
        s
    }));
    Complex2::from_triangles(next, all, vec![]).unwrap()
}

pub fn surfaces() -> Vec<(&'static str, Complex2, [usize; 3], bool)> {
    vec![
        ("torus", torus_minimal(1.0).unwrap().complex().clone(), [0, 2, 1], true),
        ("klein bottle", klein_grid(3, 3, 1.0, 1.0).unwrap().complex().clone(), [0, 2, 1], false),
        ("projective plane", rp2_minimal().unwrap().complex().clone(), [0, 1, 1], false),
        ("genus two", genus_two(), [0, 4, 1], true),
    ]
}

/// Shortest sheet-swapping path in the double cover of the level-`k`
/// subdivision, using refined edges only.
pub fn edge_only_cover_systole(mc: &MetricComplex, alpha: &Z2Vector, level: u32) -> f64 {
    let mut sub = SubdividedComplex::root(mc);
    let mut a = alpha.clone();
    for _ in 0..level {
        let child = sub.refine(mc.complex());
        a = sub.refine_cocycle(&child, &a);
        sub = child;
    }
    let fine = sub.refined();
    let cover = build_double_cover(fine, &a).unwrap();
    let n = fine.complex().vertex_count();
    (0..n)
        .map(|v| shortest_distances(cover.cover(), v).unwrap()[cover.vertex_involution(v)])
        .fold(f64::INFINITY, f64::min)
}

/// A 2-complex with at most `max_triangles` triangles built from one to
/// three small closed surfaces whose vertices are partly identified, plus a
/// few stray triangles, together with a non-zero 2-cycle on it.
pub fn glued_surfaces(seed: u64, max_triangles: usize) -> (Complex2, Z2Vector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Complex2> = vec![
        rp2_minimal().unwrap().complex().clone(),
        torus_minimal(1.0).unwrap().complex().clone(),
        sphere(1.0).unwrap().complex().clone(),
        klein_grid(3, 3, 1.0, 1.0).unwrap().complex().clone(),
        torus_grid(3, 3, 1.0, 1.0).unwrap().complex().clone(),
        Complex2::from_triangles(4, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], vec![]).unwrap(),
    ];
    loop {
        let k = rng.random_range(1..=3);
        let parts: Vec<&Complex2> = (0..k).map(|_| &pool[rng.random_range(0..pool.len())]).collect();
        let total: usize = parts.iter().map(|p| p.triangle_count()).sum();
        if total + 5 > max_triangles {
            continue;
        }
        let widest = parts.iter().map(|p| p.vertex_count()).max().unwrap();
        let sum: usize = parts.iter().map(|p| p.vertex_count()).sum();
        let n = rng.random_range(widest..=sum.max(widest));
        let mut tris: Vec<[usize; 3]> = Vec::new();
        for p in &parts {
            let mut slots: Vec<usize> = (0..n).collect();
            slots.shuffle(&mut rng);
            for t in p.triangles() {
                let mut s = t.map(|v| slots[v]);
                s.sort_unstable();
                tris.push(s);
            }
        }
        for _ in 0..rng.random_range(0..=5) {
            let mut s: Vec<usize> = (0..n).collect();
            s.shuffle(&mut rng);
            let mut t = [s[0], s[1], s[2]];
            t.sort_unstable();
            tris.push(t);
        }
        tris.sort_unstable();
        tris.dedup();
        let c = Complex2::from_triangles(n, tris, vec![]).unwrap();
        let h2 = homology_basis(&c, 2).unwrap();
        if h2.rank() == 0 {
            continue;
        }
        let mut z = Z2Vector::zero(&c, 2);
        while z.is_zero() {
            for r in &h2.representatives {
                if rng.random_bool(0.5) {
                    z = z.add(r).unwrap();
                }
            }
        }
        return (c, z);
    }
}
