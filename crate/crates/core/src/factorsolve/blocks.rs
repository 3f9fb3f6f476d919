//! Partitions of small vertex sets into paths, by a memoized subset DP over
//! achievable weight sums.

use std::collections::HashMap;
use std::ops::ControlFlow;

use super::PathFactor;
use crate::error::{Error, Result};
use crate::graphcore::{EdgeLabeling, SignMatrix};

/// Largest `n` accepted by [`exact_search`].
pub const EXACT_GUARD: usize = 18;

const OFFSET: i64 = 64;

/// Orderings of `0..k` with the first entry below the last, i.e. one per undirected path.
fn path_orders(k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, cur: &mut Vec<usize>, used: u32, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            if k == 1 || cur[0] < cur[k - 1] {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..k {
            if used >> v & 1 == 0 {
                cur.push(v);
                rec(k, cur, used | 1 << v, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::new(), 0, &mut out);
    out
}

fn shift(bits: u128, w: i64) -> u128 {
    if w >= 0 {
        bits << w
    } else {
        bits >> -w
    }
}

pub(crate) struct BlockDp<'a> {
    s: &'a SignMatrix,
    verts: Vec<usize>,
    k: usize,
    orders: Vec<Vec<usize>>,
    memo: HashMap<u32, u128>,
    blocks: HashMap<u32, u32>,
}

impl<'a> BlockDp<'a> {
    pub(crate) fn new(s: &'a SignMatrix, verts: Vec<usize>, k: usize) -> Self {
        assert!(verts.len() <= 31 && k >= 2 && verts.len() % k == 0);
        BlockDp { s, verts, k, orders: path_orders(k), memo: HashMap::new(), blocks: HashMap::new() }
    }

    fn members(&self, mask: u32) -> Vec<usize> {
        (0..self.verts.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.verts[i]).collect()
    }

    fn path_weight(&self, hosts: &[usize], order: &[usize]) -> i64 {
        order.windows(2).map(|w| i64::from(self.s.get(hosts[w[0]], hosts[w[1]]))).sum()
    }

    /// Achievable path weights on a block, bit `w + k`.
    fn block(&mut self, mask: u32) -> u32 {
        if let Some(&b) = self.blocks.get(&mask) {
            return b;
        }
        let hosts = self.members(mask);
        let mut bits = 0u32;
        for o in &self.orders {
            bits |= 1 << (self.path_weight(&hosts, o) + self.k as i64);
        }
        self.blocks.insert(mask, bits);
        bits
    }

    /// Calls `f(block)` for each `k`-subset of `mask` containing its lowest bit.
    fn for_blocks(&self, mask: u32, mut f: impl FnMut(u32)) {
        let lo = mask & mask.wrapping_neg();
        let rest = mask ^ lo;
        fn rec(avail: u32, need: usize, acc: u32, f: &mut dyn FnMut(u32)) {
            if need == 0 {
                f(acc);
                return;
            }
            if (avail.count_ones() as usize) < need {
                return;
            }
            let mut a = avail;
            while a != 0 {
                let b = a & a.wrapping_neg();
                a ^= b;
                rec(a, need - 1, acc | b, f);
            }
        }
        rec(rest, self.k - 1, lo, &mut f);
    }

    /// Achievable total weights over partitions of `mask`, bit `w + 64`.
    pub(crate) fn sums(&mut self, mask: u32) -> u128 {
        if mask == 0 {
            return 1 << OFFSET;
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let mut blocks = Vec::new();
        self.for_blocks(mask, |b| blocks.push(b));
        let mut acc = 0u128;
        for b in blocks {
            let ach = self.block(b);
            let sub = self.sums(mask ^ b);
            for w in 0..=2 * self.k {
                if ach >> w & 1 == 1 {
                    acc |= shift(sub, w as i64 - self.k as i64);
                }
            }
        }
        self.memo.insert(mask, acc);
        acc
    }

    pub(crate) fn full(&self) -> u32 {
        ((1u64 << self.verts.len()) - 1) as u32
    }

    /// Paths (host vertices) partitioning `mask` with total weight `target`.
    pub(crate) fn witness(&mut self, mask: u32, target: i64) -> Option<Vec<Vec<usize>>> {
        if !(-OFFSET..OFFSET).contains(&target) || self.sums(mask) >> (target + OFFSET) & 1 == 0 {
            return None;
        }
        if mask == 0 {
            return Some(Vec::new());
        }
        let mut blocks = Vec::new();
        self.for_blocks(mask, |b| blocks.push(b));
        for b in blocks {
            let hosts = self.members(b);
            let sub = self.sums(mask ^ b);
            for o in self.orders.clone() {
                let w = self.path_weight(&hosts, &o);
                let t = target - w;
                if (-OFFSET..OFFSET).contains(&t) && sub >> (t + OFFSET) & 1 == 1 {
                    let mut rest = self.witness(mask ^ b, t).expect("bit was set");
                    rest.push(o.iter().map(|&i| hosts[i]).collect());
                    return Some(rest);
                }
            }
        }
        unreachable!("sum bit set without a witness")
    }
}

/// A `k`-path factor of weight `target`, or `None` when no factor has that weight.
pub fn exact_search(l: &EdgeLabeling, k: usize, target: i64) -> Result<Option<PathFactor>> {
    let s = l.sign_matrix();
    exact_search_signs(&s, k, target)
}

pub(crate) fn exact_search_signs(s: &SignMatrix, k: usize, target: i64) -> Result<Option<PathFactor>> {
    let n = s.n();
    if n > EXACT_GUARD {
        return Err(Error::TooLarge(format!("exact search supports n <= {EXACT_GUARD}, got {n}")));
    }
    if k < 2 || n % k != 0 {
        return Err(Error::Divisibility(format!("{k} does not divide n={n}")));
    }
    let mut dp = BlockDp::new(s, (0..n).collect(), k);
    let full = dp.full();
    Ok(dp.witness(full, target).map(|paths| PathFactor::new(n, k, paths).expect("DP yields a partition").normalized()))
}

/// Visits every partition of `vertices` into `k`-vertex paths and returns the count.
pub fn for_each_repartition(
    vertices: &[usize],
    k: usize,
    mut visit: impl FnMut(&[Vec<usize>]) -> ControlFlow<()>,
) -> u64 {
    assert!(k >= 2 && vertices.len() % k == 0 && vertices.len() <= 31);
    let orders = path_orders(k);
    let mut count = 0;
    fn rec(
        vertices: &[usize],
        k: usize,
        orders: &[Vec<usize>],
        mask: u32,
        cur: &mut Vec<Vec<usize>>,
        count: &mut u64,
        visit: &mut dyn FnMut(&[Vec<usize>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if mask == 0 {
            *count += 1;
            return visit(cur);
        }
        let lo = mask.trailing_zeros() as usize;
        let rest: Vec<usize> = (lo + 1..vertices.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let mut pick = vec![lo];
        fn choose(
            rest: &[usize],
            need: usize,
            pick: &mut Vec<usize>,
            out: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
        ) -> ControlFlow<()> {
            if need == 0 {
                return out(pick);
            }
            for (i, &v) in rest.iter().enumerate() {
                pick.push(v);
                let r = choose(&rest[i + 1..], need - 1, pick, out);
                pick.pop();
                r?;
            }
            ControlFlow::Continue(())
        }
        choose(&rest, k - 1, &mut pick, &mut |block| {
            let bmask: u32 = block.iter().fold(0, |m, &i| m | 1 << i);
            for o in orders {
                cur.push(o.iter().map(|&j| vertices[block[j]]).collect());
                let r = rec(vertices, k, orders, mask ^ bmask, cur, count, visit);
                cur.pop();
                r?;
            }
            ControlFlow::Continue(())
        })
    }
    let full = ((1u64 << vertices.len()) - 1) as u32;
    let _ = rec(vertices, k, &orders, full, &mut Vec::new(), &mut count, &mut visit);
    count
}
