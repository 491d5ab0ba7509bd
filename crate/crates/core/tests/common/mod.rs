//! Shared fixtures: diagram corpora, random diagrams and brute-force oracles
//! that do not go through the library's own algorithms.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use coxiso::{canonical_form, CoxeterMatrix, Label};
use rand::seq::SliceRandom;
use rand::Rng;

pub const INF: u32 = 0;

pub fn label(m: u32) -> Label {
    if m == INF {
        Label::Infinity
    } else {
        Label::finite(m).expect("label at least 2")
    }
}

/// Diagram on `s1..sn` from `(i, j, m)` triples (0-based, `INF` for ∞).
pub fn diagram(n: usize, edges: &[(usize, usize, u32)]) -> CoxeterMatrix {
    let mut m = CoxeterMatrix::new((1..=n).map(|i| format!("s{i}"))).unwrap();
    for &(i, j, l) in edges {
        m.set_label(i, j, label(l));
    }
    m
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Every connected diagram of rank `1..=max_rank` with labels from `labels`,
/// one per isomorphism class.
pub fn connected_corpus(max_rank: usize, labels: &[u32]) -> Vec<CoxeterMatrix> {
    let mut out = Vec::new();
    for n in 1..=max_rank {
        let ps = pairs(n);
        let mut seen = HashSet::new();
        let total = labels.len().pow(ps.len() as u32);
        for code in 0..total {
            let mut c = code;
            let mut edges = Vec::new();
            for &(i, j) in &ps {
                let l = labels[c % labels.len()];
                c /= labels.len();
                if l != 2 {
                    edges.push((i, j, l));
                }
            }
            if !connected(n, &edges) {
                continue;
            }
            let m = diagram(n, &edges);
            let (canon, _) = canonical_form(&m);
            if seen.insert(canon) {
                out.push(m);
            }
        }
    }
    out
}

fn connected(n: usize, edges: &[(usize, usize, u32)]) -> bool {
    let mut reached = vec![false; n];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(v) = stack.pop() {
        for &(i, j, _) in edges {
            for (a, b) in [(i, j), (j, i)] {
                if a == v && !reached[b] {
                    reached[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    reached.into_iter().all(|r| r)
}

pub fn random_diagram(rng: &mut impl Rng, n: usize, labels: &[u32]) -> CoxeterMatrix {
    let edges: Vec<_> = pairs(n)
        .into_iter()
        .filter_map(|(i, j)| {
            let l = *labels.choose(rng).unwrap();
            (l != 2).then_some((i, j, l))
        })
        .collect();
    diagram(n, &edges)
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Components of the graph with an edge wherever `keep(label)` holds,
/// restricted to `within`.
fn components_by(m: &CoxeterMatrix, within: &BTreeSet<usize>, keep: impl Fn(Label) -> bool) -> Vec<BTreeSet<usize>> {
    let mut left = within.clone();
    let mut out = Vec::new();
    while let Some(&start) = left.iter().next() {
        let mut comp = BTreeSet::from([start]);
        let mut stack = vec![start];
        left.remove(&start);
        while let Some(v) = stack.pop() {
            let next: Vec<usize> = left.iter().copied().filter(|&w| keep(m.label(v, w))).collect();
            for w in next {
                left.remove(&w);
                comp.insert(w);
                stack.push(w);
            }
        }
        out.push(comp);
    }
    out
}

/// Odd component, extended odd component, `J_s` and `K_s`, straight from
/// the definitions (label 2 counts as a finite label).
pub struct OddOracle {
    pub odd: BTreeSet<usize>,
    pub eodd: BTreeSet<usize>,
    pub j_s: BTreeSet<usize>,
    pub k_s: BTreeSet<usize>,
}

pub fn odd_oracle(m: &CoxeterMatrix, s: usize, spherical: impl Fn(&BTreeSet<usize>) -> bool) -> OddOracle {
    let all: BTreeSet<usize> = (0..m.rank()).collect();
    let odd = components_by(m, &all, |l| matches!(l.value(), Some(v) if v % 2 == 1))
        .into_iter()
        .find(|c| c.contains(&s))
        .unwrap();
    let mut eodd = odd.clone();
    for t in 0..m.rank() {
        if odd.iter().any(|&o| o != t && m.label(o, t).is_finite()) {
            eodd.insert(t);
        }
    }
    let comps = components_by(m, &eodd, |l| l != Label::TWO);
    let j_s = comps.iter().find(|c| c.contains(&s)).unwrap().clone();
    let k_s = comps
        .iter()
        .filter(|c| !c.contains(&s) && spherical(c))
        .flatten()
        .copied()
        .collect();
    OddOracle { odd, eodd, j_s, k_s }
}

/// Permutation model of `A_n`: generator `i` swaps `i` and `i+1`.
pub fn symmetric_group_order(n: usize) -> u128 {
    (1..=(n as u128 + 1)).product()
}

/// Orders of finite irreducible Coxeter groups of rank at most 3.
pub fn known_order(rank: usize, labels: &[u32]) -> Option<u128> {
    let mut l: Vec<u32> = labels.iter().copied().filter(|&x| x != 2).collect();
    l.sort();
    match (rank, l.as_slice()) {
        (1, []) => Some(2),
        (2, [m]) if *m != INF => Some(2 * *m as u128),
        (3, [3, 3]) => Some(symmetric_group_order(3)),
        (3, [3, 4]) => Some(48),
        (3, [3, 5]) => Some(120),
        _ => None,
    }
}
pub mod props;
