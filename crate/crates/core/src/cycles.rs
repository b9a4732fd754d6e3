//! Exhaustive enumeration of closed walks ("cycles") up to isomorphism, the
//! marked-edge bookkeeping, the Dyck-path encoding, and the family `C(l)`
//! of even cycles of length `2l` with `n_1 = l` and an unmarked start.
//!
//! Everything here is brute force on purpose: it is the ground truth the
//! recursions in [`crate::sequences`] are checked against.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{input, param, Error, Result};

/// Largest half-length enumerated without raising the guard.
pub const DEFAULT_MAX_HALF_LENGTH: usize = 7;

/// Closed walk `(i_0, …, i_{L−1})` in canonical labels (first-occurrence
/// order, `i_0 = 0`). The closing return to `i_0` is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cycle {
    vertices: Vec<u8>,
}

impl Cycle {
    /// Relabel an arbitrary closed walk into canonical form.
    pub fn canonical(walk: &[usize]) -> Result<Self> {
        if walk.is_empty() {
            return input("a cycle needs at least one vertex");
        }
        let mut map: Vec<(usize, u8)> = Vec::new();
        let mut vertices = Vec::with_capacity(walk.len());
        for &v in walk {
            let label = match map.iter().find(|(k, _)| *k == v) {
                Some(&(_, l)) => l,
                None => {
                    if map.len() > u8::MAX as usize {
                        return input("too many distinct vertices");
                    }
                    let l = map.len() as u8;
                    map.push((v, l));
                    l
                }
            };
            vertices.push(label);
        }
        Ok(Self { vertices })
    }

    /// Number of edges (the walk length).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[u8] {
        &self.vertices
    }

    /// Labels `i_0, …, i_L` including the closing `i_L = i_0`.
    pub fn closed(&self) -> impl Iterator<Item = u8> + '_ {
        self.vertices.iter().copied().chain(std::iter::once(self.vertices[0]))
    }

    /// Directed edges `(i_k, i_{k+1})` for `k = 0..L`.
    pub fn edges(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        let l = self.vertices.len();
        (0..l).map(move |k| (self.vertices[k], self.vertices[(k + 1) % l]))
    }

    pub fn distinct_vertices(&self) -> usize {
        self.vertices.iter().copied().max().map_or(0, |m| m as usize + 1)
    }

    /// Count of each undirected edge `{u, v}` keyed with `u ≤ v`.
    pub fn edge_counts(&self) -> Vec<((u8, u8), usize)> {
        let mut counts: Vec<((u8, u8), usize)> = Vec::new();
        for (a, b) in self.edges() {
            let key = undirected(a, b);
            match counts.iter_mut().find(|(k, _)| *k == key) {
                Some((_, c)) => *c += 1,
                None => counts.push((key, 1)),
            }
        }
        counts.sort();
        counts
    }

    /// Every undirected edge appears an even number of times.
    pub fn is_even(&self) -> bool {
        self.edge_counts().iter().all(|(_, c)| c % 2 == 0)
    }

    /// Occurrences of `v` among `i_0, …, i_L` (the closing index counts).
    pub fn multiplicity(&self, v: u8) -> usize {
        self.closed().filter(|&u| u == v).count()
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.closed() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Cycle {
    type Err = Error;

    /// Parses the dump format: comma-separated labels including the closing vertex.
    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Input(format!("bad cycle label in {s:?}: {e}")))?;
        if labels.len() < 2 || labels.first() != labels.last() {
            return input(format!("cycle {s:?} must be closed"));
        }
        let cycle = Cycle::canonical(&labels[..labels.len() - 1])?;
        if cycle.vertices.iter().map(|&v| v as usize).ne(labels[..labels.len() - 1].iter().copied()) {
            return input(format!("cycle {s:?} is not in canonical labels"));
        }
        Ok(cycle)
    }
}

#[inline]
fn undirected(a: u8, b: u8) -> (u8, u8) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_half_length(l: usize, max: usize) -> Result<()> {
    if l < 1 || l > max {
        return param(format!("half-length l={l} outside [1, {max}]"));
    }
    Ok(())
}

/// Depth-first search state shared by the enumerators.
struct Search {
    len: usize,
    max_vertices: usize,
    allow_loops: bool,
    even_only: bool,
    walk: Vec<u8>,
    // parity of each undirected edge, indexed by u * 32 + v with u ≤ v
    parity: Vec<bool>,
    odd: usize,
    out: Vec<Cycle>,
}

impl Search {
    fn new(len: usize, max_vertices: usize, allow_loops: bool, even_only: bool) -> Self {
        Self {
            len,
            max_vertices,
            allow_loops,
            even_only,
            walk: vec![0],
            parity: vec![false; 32 * 32],
            odd: 0,
            out: Vec::new(),
        }
    }

    fn toggle(&mut self, a: u8, b: u8) {
        let (u, v) = undirected(a, b);
        let slot = &mut self.parity[u as usize * 32 + v as usize];
        *slot = !*slot;
        if *slot {
            self.odd += 1;
        } else {
            self.odd -= 1;
        }
    }

    fn run(&mut self, labels_used: u8) {
        let pos = self.walk.len();
        let last = *self.walk.last().expect("walk starts at 0");
        if pos == self.len {
            // closing edge back to 0
            if last == 0 && !self.allow_loops && self.len > 0 {
                return;
            }
            self.toggle(last, 0);
            if !self.even_only || self.odd == 0 {
                self.out.push(Cycle {
                    vertices: self.walk.clone(),
                });
            }
            self.toggle(last, 0);
            return;
        }
        let remaining = self.len - pos + 1;
        let fresh_ok = (labels_used as usize) < self.max_vertices;
        let top = if fresh_ok { labels_used } else { labels_used - 1 };
        for next in 0..=top {
            if next == last && !self.allow_loops {
                continue;
            }
            self.toggle(last, next);
            // each odd edge needs at least one more traversal
            if !self.even_only || self.odd < remaining {
                self.walk.push(next);
                let used = if next == labels_used { labels_used + 1 } else { labels_used };
                self.run(used);
                self.walk.pop();
            }
            self.toggle(last, next);
        }
    }
}

/// All pairwise non-isomorphic even closed walks of length `2l` without
/// self-loops, in lexicographic canonical order.
pub fn enumerate_even_cycles(l: usize) -> Result<Vec<Cycle>> {
    enumerate_even_cycles_guarded(l, DEFAULT_MAX_HALF_LENGTH)
}

/// As [`enumerate_even_cycles`] with a caller-chosen guard. Cost grows
/// roughly like the Bell numbers; `l = 8` already takes minutes.
pub fn enumerate_even_cycles_guarded(l: usize, max_l: usize) -> Result<Vec<Cycle>> {
    check_half_length(l, max_l)?;
    // an even walk of length 2l uses at most l distinct edges, hence l + 1 vertices
    let mut search = Search::new(2 * l, l + 1, false, true);
    search.run(1);
    Ok(search.out)
}

/// All canonical closed walks of length `len` (parity unrestricted).
pub fn enumerate_closed_walks(len: usize, allow_loops: bool) -> Result<Vec<Cycle>> {
    if len < 1 || len > 10 {
        return param(format!("walk length {len} outside [1, 10]"));
    }
    if len == 1 {
        return Ok(if allow_loops {
            vec![Cycle { vertices: vec![0] }]
        } else {
            Vec::new()
        });
    }
    let mut search = Search::new(len, len, allow_loops, false);
    search.run(1);
    Ok(search.out)
}

/// An even cycle with its marked edges and mark counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedCycle {
    pub cycle: Cycle,
    /// `marked[k]` is true iff edge `(i_k, i_{k+1})` is preceded by an even
    /// number of copies of its undirected edge.
    pub marked: Vec<bool>,
    /// `nk[k]` = number of cycle vertices marked exactly `k` times, `k = 0..=l`.
    pub nk: Vec<usize>,
    /// Vertices grouped by mark count, same indexing as `nk`.
    pub by_mark_count: Vec<Vec<u8>>,
}

impl MarkedCycle {
    pub fn half_length(&self) -> usize {
        self.cycle.len() / 2
    }

    /// How many times vertex `v` is the right end of a marked edge.
    pub fn mark_count(&self, v: u8) -> usize {
        self.cycle
            .edges()
            .zip(&self.marked)
            .filter(|((_, b), m)| **m && *b == v)
            .count()
    }

    pub fn first_vertex_unmarked(&self) -> bool {
        self.mark_count(0) == 0
    }
}

pub fn mark(cycle: &Cycle) -> Result<MarkedCycle> {
    if !cycle.is_even() {
        return input(format!("cycle ({cycle}) is not even"));
    }
    let edges: Vec<(u8, u8)> = cycle.edges().collect();
    let mut seen: Vec<((u8, u8), usize)> = Vec::new();
    let mut marked = Vec::with_capacity(edges.len());
    for &(a, b) in &edges {
        let key = undirected(a, b);
        let count = match seen.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => {
                *c += 1;
                *c - 1
            }
            None => {
                seen.push((key, 1));
                0
            }
        };
        marked.push(count % 2 == 0);
    }
    let l = edges.len() / 2;
    let vertices = cycle.distinct_vertices();
    let mut counts = vec![0usize; vertices];
    for (&(_, b), &m) in edges.iter().zip(&marked) {
        if m {
            counts[b as usize] += 1;
        }
    }
    let mut nk = vec![0usize; l + 1];
    let mut by_mark_count = vec![Vec::new(); l + 1];
    for (v, &k) in counts.iter().enumerate() {
        nk[k] += 1;
        by_mark_count[k].push(v as u8);
    }
    Ok(MarkedCycle {
        cycle: cycle.clone(),
        marked,
        nk,
        by_mark_count,
    })
}

/// `+1` on marked edges, `−1` on unmarked ones.
pub fn to_dyck(mc: &MarkedCycle) -> Vec<i8> {
    mc.marked.iter().map(|&m| if m { 1 } else { -1 }).collect()
}

pub fn is_dyck_path(steps: &[i8]) -> bool {
    let mut height = 0i64;
    for &s in steps {
        height += s as i64;
        if height < 0 {
            return false;
        }
    }
    height == 0
}

/// `C(l)`: even cycles of length `2l` with `n_1 = l` and the first vertex unmarked.
pub fn c_family(l: usize) -> Result<Vec<MarkedCycle>> {
    c_family_guarded(l, DEFAULT_MAX_HALF_LENGTH)
}

pub fn c_family_guarded(l: usize, max_l: usize) -> Result<Vec<MarkedCycle>> {
    let mut out = Vec::new();
    for cycle in enumerate_even_cycles_guarded(l, max_l)? {
        let mc = mark(&cycle)?;
        if mc.nk.get(1) == Some(&l) && mc.first_vertex_unmarked() {
            out.push(mc);
        }
    }
    Ok(out)
}

/// Brute-force multiplicity counts over `C(l)`, indexed by `t − 1` for `t = 1..=l+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityRow {
    pub l: usize,
    /// `b_{l,t}`: vertices of multiplicity `t`, summed over `C(l)`.
    pub b: Vec<BigUint>,
    /// `f_{l,t}`: members whose first vertex has multiplicity `t`.
    pub f: Vec<BigUint>,
    /// `s_{l,t}`: members whose second vertex has multiplicity `t`.
    pub s: Vec<BigUint>,
}

pub fn multiplicity_tables(l: usize) -> Result<MultiplicityRow> {
    let family = c_family(l)?;
    Ok(multiplicity_row(l, &family))
}

pub fn multiplicity_row(l: usize, family: &[MarkedCycle]) -> MultiplicityRow {
    let mut b = vec![0u64; l + 1];
    let mut f = vec![0u64; l + 1];
    let mut s = vec![0u64; l + 1];
    for mc in family {
        let c = &mc.cycle;
        for v in 0..c.distinct_vertices() as u8 {
            let t = c.multiplicity(v);
            if (1..=l + 1).contains(&t) {
                b[t - 1] += 1;
            }
        }
        f[c.multiplicity(0) - 1] += 1;
        s[c.multiplicity(1) - 1] += 1;
    }
    let big = |v: Vec<u64>| v.into_iter().map(BigUint::from).collect();
    MultiplicityRow {
        l,
        b: big(b),
        f: big(f),
        s: big(s),
    }
}

/// A vertex whose unmarked out-edges exceed the bound for its mark count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Violation {
    pub vertex: u8,
    pub mark_count: usize,
    pub unmarked_out_edges: usize,
}

/// For every vertex marked `k ≥ 1` times, the unmarked edges `(v, u)` number
/// at most `2k`, and at most one when `k = 1`.
pub fn check_lemma1(mc: &MarkedCycle) -> Vec<Lemma1Violation> {
    let mut violations = Vec::new();
    for v in 0..mc.cycle.distinct_vertices() as u8 {
        let k = mc.mark_count(v);
        if k == 0 {
            continue;
        }
        let unmarked = mc
            .cycle
            .edges()
            .zip(&mc.marked)
            .filter(|((a, _), m)| !**m && *a == v)
            .count();
        let bound = if k == 1 { 1 } else { 2 * k };
        if unmarked > bound {
            violations.push(Lemma1Violation {
                vertex: v,
                mark_count: k,
                unmarked_out_edges: unmarked,
            });
        }
    }
    violations
}

/// Parity statement for a two-colored cycle: if the walk is not even, some
/// edge outside `special` has odd multiplicity.
///
/// `special` stands for the entries beyond `κ√n`, so it must be a matching
/// of off-diagonal edges (the shape guaranteed by the big-entry event), and
/// the walk must use at least one edge outside it.
pub fn check_parity_lemma(cycle: &Cycle, special: &BTreeSet<(u8, u8)>) -> Result<bool> {
    let mut touched = BTreeSet::new();
    for &(a, b) in special {
        if a == b {
            return input("special edges must be off-diagonal");
        }
        if !touched.insert(a) || !touched.insert(b) {
            return input("special edges must be pairwise vertex-disjoint");
        }
    }
    let counts = cycle.edge_counts();
    let is_special = |k: &(u8, u8)| special.contains(k);
    if counts.iter().all(|(k, _)| is_special(k)) {
        return input("the cycle must contain an edge outside the special set");
    }
    if cycle.is_even() {
        return Ok(true);
    }
    Ok(counts.iter().any(|(k, c)| !is_special(k) && c % 2 == 1))
}

/// The three constructions that build `C(l + 1)` from smaller families:
/// (i) a loop `v_0 → u → v_0` prepended, (ii) a loop at the second vertex,
/// (iii) a member of `C(a)` hung below the second vertex of a member of `C(l − a)`.
pub fn recursive_construction(l: usize) -> Result<[Vec<Cycle>; 3]> {
    let families: Vec<Vec<Cycle>> = (1..=l)
        .map(|a| Ok(c_family(a)?.into_iter().map(|mc| mc.cycle).collect()))
        .collect::<Result<_>>()?;
    let base = &families[l - 1];
    let mut first = Vec::new();
    let mut second = Vec::new();
    for c in base {
        let v = c.vertices();
        let fresh = c.distinct_vertices();
        let mut w: Vec<usize> = vec![0, fresh, 0];
        w.extend(v[1..].iter().map(|&x| x as usize));
        first.push(Cycle::canonical(&w)?);
        let mut w: Vec<usize> = vec![v[0] as usize, v[1] as usize, fresh, v[1] as usize];
        w.extend(v[2..].iter().map(|&x| x as usize));
        second.push(Cycle::canonical(&w)?);
    }
    let mut third = Vec::new();
    for a in 1..l {
        for inner in &families[a - 1] {
            for outer in &families[l - a - 1] {
                let offset = outer.distinct_vertices();
                let ov = outer.vertices();
                let iv: Vec<usize> = inner.vertices().iter().map(|&x| x as usize + offset).collect();
                let mut w: Vec<usize> = vec![ov[0] as usize, ov[1] as usize];
                w.extend(&iv);
                w.push(iv[0]);
                w.push(ov[1] as usize);
                w.extend(ov[2..].iter().map(|&x| x as usize));
                third.push(Cycle::canonical(&w)?);
            }
        }
    }
    Ok([first, second, third])
}
