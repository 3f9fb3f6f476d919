//! Canonical forms of labelings up to vertex relabeling, and orderly
//! generation of one labeling per isomorphism class.
//!
//! A labeling is read as its positive graph. Its code lists the edges in
//! column order `(0,1), (0,2), (1,2), (0,3), …`, first edge in the most
//! significant bit; the canonical code is the largest over all relabelings.
//! With that convention, clearing the last set bit of a canonical code gives
//! a canonical code again, so every class is reached from exactly one parent.

use crate::graphcore::EdgeLabeling;

pub const MAX_CANON_N: usize = 8;

/// Column-order position of each edge, indexed `[i][j]`.
fn positions(n: usize) -> Vec<Vec<usize>> {
    let mut pos = vec![vec![usize::MAX; n]; n];
    let mut p = 0;
    for j in 1..n {
        for row in pos.iter_mut().take(j) {
            row[j] = p;
            p += 1;
        }
    }
    for i in 0..n {
        for j in 0..i {
            pos[i][j] = pos[j][i];
        }
    }
    pos
}

fn num_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Adjacency rows of the positive graph.
pub fn adjacency(l: &EdgeLabeling) -> Vec<u16> {
    let n = l.n();
    let mut adj = vec![0u16; n];
    for (i, j) in l.positive_edges() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    adj
}

pub fn code_of(adj: &[u16]) -> u64 {
    let n = adj.len();
    let e = num_edges(n);
    let pos = positions(n);
    let mut code = 0u64;
    for j in 1..n {
        for i in 0..j {
            if adj[i] >> j & 1 == 1 {
                code |= 1 << (e - 1 - pos[i][j]);
            }
        }
    }
    code
}

pub fn labeling_from_code(n: usize, code: u64) -> EdgeLabeling {
    let e = num_edges(n);
    let pos = positions(n);
    let mut pairs = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if code >> (e - 1 - pos[i][j]) & 1 == 1 {
                pairs.push((i, j));
            }
        }
    }
    EdgeLabeling::from_positive_set(n, pairs).expect("pairs are in range")
}

struct Search<'a> {
    adj: &'a [u16],
    n: usize,
    e: usize,
    sigma: Vec<usize>,
}

impl Search<'_> {
    fn column(&self, t: usize, v: usize) -> u64 {
        let mut c = 0u64;
        for i in 0..t {
            c = c << 1 | u64::from(self.adj[self.sigma[i]] >> v & 1);
        }
        c
    }

    /// Largest code, counting relabelings that attain it.
    fn best(&mut self, t: usize, used: u16, prefix: u64, best: &mut Option<(u64, u64)>) {
        if t == self.n {
            match best {
                Some((b, aut)) if *b == prefix => *aut += 1,
                Some((b, _)) if *b > prefix => {}
                _ => *best = Some((prefix, 1)),
            }
            return;
        }
        let len = t * (t + 1) / 2;
        for v in 0..self.n {
            if used >> v & 1 == 1 {
                continue;
            }
            let p = prefix << t | self.column(t, v);
            if let Some((b, _)) = *best {
                if p < b >> (self.e - len) {
                    continue;
                }
            }
            self.sigma.push(v);
            self.best(t + 1, used | 1 << v, p, best);
            self.sigma.pop();
        }
    }

    /// `None` if some relabeling beats `target`, else the number attaining it.
    fn check(&mut self, t: usize, used: u16, prefix: u64, target: u64) -> Option<u64> {
        if t == self.n {
            return Some(1);
        }
        let len = t * (t + 1) / 2;
        let tp = target >> (self.e - len);
        let mut aut = 0;
        for v in 0..self.n {
            if used >> v & 1 == 1 {
                continue;
            }
            let p = prefix << t | self.column(t, v);
            if p > tp {
                return None;
            }
            if p < tp {
                continue;
            }
            self.sigma.push(v);
            let r = self.check(t + 1, used | 1 << v, p, target);
            self.sigma.pop();
            aut += r?;
        }
        Some(aut)
    }
}

/// `(canonical code, automorphism count)`.
pub fn canonical_form(adj: &[u16]) -> (u64, u64) {
    let n = adj.len();
    assert!(n <= 11, "codes hold at most 64 edges");
    if n <= 1 {
        return (0, 1);
    }
    let mut s = Search { adj, n, e: num_edges(n), sigma: Vec::with_capacity(n) };
    let mut best = None;
    s.best(0, 0, 0, &mut best);
    best.expect("at least one relabeling")
}

/// Automorphism count when `adj` is in canonical position, else `None`.
pub fn is_canonical(adj: &[u16]) -> Option<u64> {
    let n = adj.len();
    if n <= 1 {
        return Some(1);
    }
    let target = code_of(adj);
    let mut s = Search { adj, n, e: num_edges(n), sigma: Vec::with_capacity(n) };
    s.check(0, 0, 0, target)
}

fn adjacency_from_code(n: usize, code: u64) -> Vec<u16> {
    adjacency(&labeling_from_code(n, code))
}

/// Number of labelings isomorphic to `l`.
pub fn orbit_size(l: &EdgeLabeling) -> u64 {
    let (_, aut) = canonical_form(&adjacency(l));
    (1..=l.n() as u64).product::<u64>() / aut
}

/// Canonical codes of all graphs on `n` vertices with exactly `m` edges,
/// with their automorphism counts.
pub fn canonical_graphs(n: usize, m: usize) -> Vec<(u64, u64)> {
    let e = num_edges(n);
    assert!(m <= e && n <= MAX_CANON_N);
    let mut level: Vec<(u64, u64)> = vec![(0, (1..=n as u64).product())];
    for _ in 0..m {
        let mut next = Vec::new();
        for &(code, _) in &level {
            // string positions after the last set bit
            let first_free = if code == 0 { 0 } else { e - code.trailing_zeros() as usize };
            for q in first_free..e {
                let child = code | 1 << (e - 1 - q);
                if let Some(aut) = is_canonical(&adjacency_from_code(n, child)) {
                    next.push((child, aut));
                }
            }
        }
        level = next;
    }
    level
}
