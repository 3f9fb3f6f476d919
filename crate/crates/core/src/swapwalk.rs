//! Walking between copies of a forest by exchanging the roles of two host
//! vertices, and the bounded-weight copy it yields on zero-sum labelings.

use std::collections::BTreeSet;

use crate::embed::{weight_unchecked, Embedding, ForestPattern};
use crate::error::{Error, Result};
use crate::graphcore::{norm, Edge, EdgeLabeling, SignMatrix};
use crate::rng;

/// Default number of random restarts when looking for `F⁺` / `F⁻`.
pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkStep {
    pub before: Embedding,
    pub after: Embedding,
    pub removed: Vec<Edge>,
    pub added: Vec<Edge>,
}

impl WalkStep {
    /// `c(added) − c(removed)`, which equals the weight change of the step.
    pub fn weight_delta(&self, l: &EdgeLabeling) -> i64 {
        let sum = |es: &[Edge]| es.iter().map(|&(a, b)| i64::from(l.label(a, b))).sum::<i64>();
        sum(&self.added) - sum(&self.removed)
    }
}

fn incident_edges(f: &ForestPattern, map: &[usize], inv: &[usize], hosts: [usize; 2]) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for h in hosts {
        for &q in f.neighbors(inv[h]) {
            out.insert(norm((h, map[q])));
        }
    }
    out
}

fn single_swap(f: &ForestPattern, e: &Embedding, a: usize, b: usize) -> WalkStep {
    let inv = e.inverse();
    let before_edges = incident_edges(f, e.as_slice(), &inv, [a, b]);
    let mut after = e.clone();
    after.swap_hosts(a, b);
    let inv2 = after.inverse();
    let after_edges = incident_edges(f, after.as_slice(), &inv2, [a, b]);
    WalkStep {
        before: e.clone(),
        after,
        removed: before_edges.difference(&after_edges).copied().collect(),
        added: after_edges.difference(&before_edges).copied().collect(),
    }
}

/// Exchanges the roles of hosts `a` and `b`.
///
/// One step when either role has pattern degree ≤ 1, otherwise three steps
/// pivoting through the smallest host whose role has degree ≤ 1.
pub fn role_swap(f: &ForestPattern, e: &Embedding, a: usize, b: usize) -> Result<Vec<WalkStep>> {
    let n = e.n();
    if f.n() != n {
        return Err(Error::InvalidEmbedding(format!("pattern has {} vertices, embedding {n}", f.n())));
    }
    if a >= n || b >= n {
        return Err(Error::InvalidEmbedding(format!("host {} out of range for n={n}", a.max(b))));
    }
    if a == b {
        return Ok(Vec::new());
    }
    let inv = e.inverse();
    let deg = |h: usize| f.degrees()[inv[h]];
    if deg(a) <= 1 || deg(b) <= 1 {
        return Ok(vec![single_swap(f, e, a, b)]);
    }
    let w = (0..n).find(|&h| deg(h) <= 1).expect("a forest has a vertex of degree at most 1");
    let s1 = single_swap(f, e, a, w);
    let s2 = single_swap(f, &s1.after, a, b);
    let s3 = single_swap(f, &s2.after, b, w);
    Ok(vec![s1, s2, s3])
}

/// Steps taking `from` to `to`, one cycle of `to ∘ from⁻¹` at a time.
pub fn transposition_walk(f: &ForestPattern, from: &Embedding, to: &Embedding) -> Result<Vec<WalkStep>> {
    let n = from.n();
    if to.n() != n {
        return Err(Error::InvalidEmbedding("embeddings of different sizes".into()));
    }
    let mut steps = Vec::new();
    let mut cur = from.clone();
    for (a, b) in schedule(from, to) {
        for s in role_swap(f, &cur, a, b)? {
            cur = s.after.clone();
            steps.push(s);
        }
    }
    debug_assert_eq!(&cur, to);
    Ok(steps)
}

/// Host transpositions, in application order, whose product maps `from` to `to`.
fn schedule(from: &Embedding, to: &Embedding) -> Vec<(usize, usize)> {
    let n = from.n();
    let inv = from.inverse();
    let pi: Vec<usize> = (0..n).map(|h| to.host(inv[h])).collect();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut h = pi[start];
        while h != start {
            seen[h] = true;
            cycle.push(h);
            h = pi[h];
        }
        for i in (1..cycle.len()).rev() {
            out.push((cycle[i - 1], cycle[i]));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct WalkConfig {
    pub seed: u64,
    pub restarts: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { seed: 0, restarts: DEFAULT_RESTARTS }
    }
}

#[derive(Clone, Debug)]
pub struct WalkOutcome {
    pub embedding: Embedding,
    pub weight: i64,
    pub plus_weight: i64,
    pub minus_weight: i64,
    /// Steps walked from `F⁺` up to the returned copy.
    pub steps: Vec<WalkStep>,
}

/// Weight change of exchanging hosts `x` and `y`.
pub(crate) fn swap_delta(s: &SignMatrix, f: &ForestPattern, map: &[usize], inv: &[usize], x: usize, y: usize) -> i64 {
    let tau = |h: usize| {
        if h == x {
            y
        } else if h == y {
            x
        } else {
            h
        }
    };
    let (px, py) = (inv[x], inv[y]);
    let mut delta = 0i64;
    for &q in f.neighbors(px) {
        let h = map[q];
        if q != py {
            delta -= i64::from(s.get(x, h));
            delta += i64::from(s.get(y, tau(h)));
        }
    }
    for &q in f.neighbors(py) {
        let h = map[q];
        if q != px {
            delta -= i64::from(s.get(y, h));
            delta += i64::from(s.get(x, tau(h)));
        }
    }
    delta
}

/// Greedy single-swap hill climbing from random starts until `sign·weight ≥ 0`.
pub(crate) fn signed_copy(
    s: &SignMatrix,
    f: &ForestPattern,
    sign: i64,
    seed: u64,
    label: &str,
    restarts: usize,
) -> Option<(Embedding, i64)> {
    let n = f.n();
    for r in 0..restarts {
        let mut g = rng::from_seed(rng::subseed(seed, label, r as u64));
        let mut map = rng::permutation(&mut g, n);
        let mut inv = vec![0; n];
        for (p, &h) in map.iter().enumerate() {
            inv[h] = p;
        }
        let mut w = weight_unchecked(s, f, &map);
        loop {
            if sign * w >= 0 {
                return Some((Embedding::from_vec_unchecked(map), w));
            }
            let mut best = (0i64, 0usize, 0usize);
            for x in 0..n {
                for y in x + 1..n {
                    let d = sign * swap_delta(s, f, &map, &inv, x, y);
                    if d > best.0 {
                        best = (d, x, y);
                    }
                }
            }
            if best.0 == 0 {
                break;
            }
            let (_, x, y) = best;
            let (px, py) = (inv[x], inv[y]);
            map[px] = y;
            map[py] = x;
            inv[x] = py;
            inv[y] = px;
            w += sign * best.0;
        }
    }
    None
}

/// A copy of `f` with `|weight| ≤ Δ(F)+1` on a zero-sum labeling.
pub fn bounded_copy(l: &EdgeLabeling, f: &ForestPattern) -> Result<Embedding> {
    bounded_copy_with(l, f, &WalkConfig::default()).map(|o| o.embedding)
}

pub fn bounded_copy_with(l: &EdgeLabeling, f: &ForestPattern, cfg: &WalkConfig) -> Result<WalkOutcome> {
    if !l.is_zero_sum() {
        return Err(Error::Precondition("labeling is not zero-sum".into()));
    }
    if l.n() != f.n() {
        return Err(Error::InvalidEmbedding(format!("pattern has {} vertices, labeling {}", f.n(), l.n())));
    }
    if f.max_degree() < 1 {
        return Err(Error::Precondition("pattern has no edges".into()));
    }
    let bound = f.max_degree() as i64 + 1;
    let s = l.sign_matrix();
    let (plus, wp) =
        signed_copy(&s, f, 1, cfg.seed, "walk-plus", cfg.restarts).ok_or(Error::SearchExhausted(cfg.restarts))?;
    let (minus, wm) =
        signed_copy(&s, f, -1, cfg.seed, "walk-minus", cfg.restarts).ok_or(Error::SearchExhausted(cfg.restarts))?;
    let mut w = wp;
    let mut steps = Vec::new();
    if w.abs() <= bound {
        return Ok(WalkOutcome { embedding: plus, weight: w, plus_weight: wp, minus_weight: wm, steps });
    }
    let mut cur = plus;
    for (a, b) in schedule(&cur, &minus) {
        for st in role_swap(f, &cur, a, b)? {
            w += st.weight_delta(l);
            cur = st.after.clone();
            steps.push(st);
            if w.abs() <= bound {
                return Ok(WalkOutcome { embedding: cur, weight: w, plus_weight: wp, minus_weight: wm, steps });
            }
        }
    }
    Err(Error::Internal(format!("walk from weight {wp} to {wm} never came within {bound} of zero")))
}
