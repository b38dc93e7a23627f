//! Brute-force helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use kissing::estimate::{ChordRange, EdgeBox, EdgeClass, TaggedRange};
use kissing::hypermap::Hypermap;
use kissing::lpfeas::{FeasibilityVerdict, LpSystem, Row, RowTag, Side};

pub type Q = BigRational;

pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p[x];
        }
        out.push(c);
    }
    out
}

pub fn label_of(cs: &[Vec<usize>], d: usize) -> Vec<usize> {
    let mut l = vec![0; d];
    for (i, c) in cs.iter().enumerate() {
        for &x in c {
            l[x] = i;
        }
    }
    l
}

/// Node adjacency: the node of x meets the node of e(x).
pub fn node_graph(h: &Hypermap) -> Vec<BTreeSet<usize>> {
    let nodes = cycles(h.n());
    let node = label_of(&nodes, h.dart_count());
    let mut adj = vec![BTreeSet::new(); nodes.len()];
    for x in 0..h.dart_count() {
        let (a, b) = (node[x], node[h.e()[x]]);
        if a != b {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    adj
}

pub fn connected_without(adj: &[BTreeSet<usize>], removed: Option<usize>) -> bool {
    let alive: Vec<usize> = (0..adj.len()).filter(|&v| Some(v) != removed).collect();
    let Some(&start) = alive.first() else { return true };
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if Some(w) != removed && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    alive.iter().all(|&v| seen[v])
}

/// Dart-level connectivity under e and n.
pub fn darts_connected(h: &Hypermap) -> bool {
    let d = h.dart_count();
    if d == 0 {
        return true;
    }
    let mut seen = vec![false; d];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for y in [h.e()[x], h.n()[x], h.f()[x]] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn brute_biconnected(h: &Hypermap) -> bool {
    let adj = node_graph(h);
    darts_connected(h) && (0..adj.len()).all(|v| adj.len() <= 2 || connected_without(&adj, Some(v)))
}

/// A rotation system: for each node, its neighbours in cyclic order.
pub type Rotation = Vec<Vec<usize>>;

pub fn from_rotation(rot: &Rotation) -> Hypermap {
    let mut darts: Vec<(usize, usize)> =
        rot.iter().enumerate().flat_map(|(v, ns)| ns.iter().map(move |&w| (v, w))).collect();
    darts.sort_unstable();
    let index = |d: (usize, usize)| darts.binary_search(&d).unwrap();
    let mut e = vec![0; darts.len()];
    let mut n = vec![0; darts.len()];
    for (v, ns) in rot.iter().enumerate() {
        for (i, &w) in ns.iter().enumerate() {
            let x = index((v, w));
            e[x] = index((w, v));
            n[x] = index((v, ns[(i + 1) % ns.len()]));
        }
    }
    Hypermap::new(e, n).unwrap()
}

pub fn to_rotation(h: &Hypermap) -> Rotation {
    let nodes = cycles(h.n());
    let node = label_of(&nodes, h.dart_count());
    nodes.iter().map(|c| c.iter().map(|&x| node[h.e()[x]]).collect()).collect()
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    let v = rng.gen_range(2..=10);
    let max_edges = (v * (v - 1) / 2).min(30);
    let mut edges = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=max_edges) {
        let a = rng.gen_range(0..v);
        let b = rng.gen_range(0..v);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut rot: Rotation = vec![Vec::new(); v];
    for &(a, b) in &edges {
        rot[a].push(b);
        rot[b].push(a);
    }
    for ns in &mut rot {
        ns.shuffle(rng);
    }
    // drop isolated vertices so every node carries darts
    let keep: Vec<usize> = (0..v).filter(|&i| !rot[i].is_empty()).collect();
    let new: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &old)| (old, i)).collect();
    keep.iter().map(|&old| rot[old].iter().map(|w| new[w]).collect()).collect()
}

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn random_system(rng: &mut ChaCha8Rng) -> LpSystem {
    let nv = rng.gen_range(1..=4);
    let mut sys = LpSystem::new((0..nv).map(|i| format!("x{i}")).collect());
    for _ in 0..rng.gen_range(1..=7) {
        let mut coeffs = Vec::new();
        for j in 0..nv {
            let c = rng.gen_range(-3..=3);
            if c != 0 && rng.gen_bool(0.7) {
                coeffs.push((j, q(c)));
            }
        }
        if coeffs.is_empty() {
            continue;
        }
        let lo = rng.gen_range(-6..=6);
        let hi = lo + rng.gen_range(-2..=5);
        let (lo, hi) = match rng.gen_range(0..3) {
            0 => (Some(q(lo)), None),
            1 => (None, Some(q(hi))),
            _ => (Some(q(lo)), Some(q(hi))),
        };
        sys.push(Row::new(coeffs, lo, hi, RowTag::Given));
    }
    sys
}

/// Re-derives the Farkas combination without the library's checker.
pub fn farkas_holds(sys: &LpSystem, verdict: &FeasibilityVerdict) -> bool {
    let FeasibilityVerdict::Infeasible { certificate } = verdict else { return false };
    let mut combo = vec![q(0); sys.vars.len()];
    let mut rhs = q(0);
    for m in certificate {
        let row = &sys.rows[m.row];
        assert!(!m.value.is_negative());
        // upper: a·x ≤ hi as is; lower: −a·x ≤ −lo
        let (sign, bound) = match m.side {
            Side::Upper => (q(1), row.hi.clone().unwrap()),
            Side::Lower => (q(-1), row.lo.clone().unwrap()),
        };
        for (j, a) in &row.coeffs {
            combo[*j] += &m.value * &sign * a;
        }
        rhs += &m.value * &sign * bound;
    }
    combo.iter().all(Zero::is_zero) && rhs.is_negative()
}

pub fn random_box(rng: &mut ChaCha8Rng) -> EdgeBox {
    let edge = |rng: &mut ChaCha8Rng| {
        let x: f64 = rng.gen_range(2.0..3.4);
        let y: f64 = rng.gen_range(2.0..3.4);
        TaggedRange { class: EdgeClass::Large, range: ChordRange::new(x.min(y), x.max(y)) }
    };
    EdgeBox { edges: [edge(rng), edge(rng), edge(rng)] }
}

/// Uniformly random `(e, n)` on `1..=max` darts.
pub fn random_hypermap(rng: &mut ChaCha8Rng, max: usize) -> Hypermap {
    let d = rng.gen_range(1..=max);
    let mut e: Vec<usize> = (0..d).collect();
    let mut n = e.clone();
    e.shuffle(rng);
    n.shuffle(rng);
    Hypermap::new(e, n).unwrap()
}
