//! Subshifts of finite type presented by window graphs.
//!
//! An [`Sft`] with window `m` has the allowed length-`m` words as vertices and
//! an edge `u → v` for every pair of allowed words overlapping in `m-1`
//! symbols. Since forbidden words never exceed the window, every fused
//! `(m+1)`-word of an overlapping allowed pair is itself admissible, so the
//! edge set is implied by the vertex set.
//!
//! Vertices are stored as base-`n` integers (first symbol most significant)
//! in a bitset over all `n^m` words.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::word::Word;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// Largest `n^m` word space an [`Sft`] may index.
pub const MAX_WORD_SPACE: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sided {
    OneSided,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    alphabet_size: usize,
    window: usize,
    sided: Sided,
    allowed: BitSet,
}

pub(crate) fn word_space(alphabet_size: usize, len: usize) -> Result<usize> {
    let space = (alphabet_size as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if space > MAX_WORD_SPACE {
        return Err(Error::ResourceCap {
            what: "window word space",
            requested: space,
            cap: MAX_WORD_SPACE,
        });
    }
    Ok(space as usize)
}

/// Builds the window graph avoiding `forbidden`.
pub fn sft_build(
    alphabet_size: usize,
    window: usize,
    forbidden: &[Word],
    sided: Sided,
) -> Result<Sft> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    for f in forbidden {
        if f.alphabet_size() != alphabet_size {
            return Err(Error::AlphabetMismatch(alphabet_size, f.alphabet_size()));
        }
        if f.len() > window {
            return Err(Error::WindowTooShort {
                window,
                len: f.len(),
            });
        }
    }
    let space = word_space(alphabet_size, window)?;
    let n = alphabet_size as u64;
    // forbidden codes grouped by length
    let mut by_len: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); window + 1];
    for f in forbidden {
        by_len[f.len()].insert(f.index());
    }
    if !by_len[0].is_empty() {
        return Ok(Sft::from_parts(alphabet_size, window, sided, BitSet::new(space)));
    }
    let mut allowed = BitSet::new(space);
    for idx in 0..space as u64 {
        let ok = by_len.iter().enumerate().skip(1).all(|(len, set)| {
            set.is_empty()
                || (0..=window - len).all(|off| {
                    let factor = (idx / n.pow((window - off - len) as u32)) % n.pow(len as u32);
                    !set.contains(&factor)
                })
        });
        if ok {
            allowed.set(idx as usize);
        }
    }
    Ok(Sft::from_parts(alphabet_size, window, sided, allowed))
}

impl Sft {
    pub(crate) fn from_parts(alphabet_size: usize, window: usize, sided: Sided, allowed: BitSet) -> Sft {
        debug_assert_eq!(allowed.len(), alphabet_size.pow(window as u32));
        Sft {
            alphabet_size,
            window,
            sided,
            allowed,
        }
    }

    /// Builds an Sft from an explicit list of allowed window words.
    pub fn from_vertices(
        alphabet_size: usize,
        window: usize,
        sided: Sided,
        vertices: &[Word],
    ) -> Result<Sft> {
        if window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        let mut allowed = BitSet::new(word_space(alphabet_size, window)?);
        for v in vertices {
            if v.alphabet_size() != alphabet_size {
                return Err(Error::AlphabetMismatch(alphabet_size, v.alphabet_size()));
            }
            if v.len() != window {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} does not have window length {window}"
                )));
            }
            allowed.set(v.index() as usize);
        }
        Ok(Sft::from_parts(alphabet_size, window, sided, allowed))
    }

    pub fn empty(alphabet_size: usize, window: usize, sided: Sided) -> Result<Sft> {
        Ok(Sft::from_parts(
            alphabet_size,
            window,
            sided,
            BitSet::new(word_space(alphabet_size, window)?),
        ))
    }

    pub fn full(alphabet_size: usize, window: usize, sided: Sided) -> Result<Sft> {
        Ok(Sft::from_parts(
            alphabet_size,
            window,
            sided,
            BitSet::full(word_space(alphabet_size, window)?),
        ))
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn sided(&self) -> Sided {
        self.sided
    }

    pub fn vertex_count(&self) -> usize {
        self.allowed.count()
    }

    pub fn is_allowed(&self, w: &Word) -> bool {
        w.len() == self.window
            && w.alphabet_size() == self.alphabet_size
            && self.allowed.get(w.index() as usize)
    }

    pub(crate) fn allowed_bits(&self) -> &BitSet {
        &self.allowed
    }

    pub fn vertex_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.allowed.iter().map(|i| i as u64)
    }

    pub fn vertices(&self) -> Vec<Word> {
        self.vertex_indices()
            .map(|i| Word::from_index(i, self.window, self.alphabet_size))
            .collect()
    }

    fn high(&self) -> u64 {
        (self.alphabet_size as u64).pow(self.window as u32 - 1)
    }

    #[inline]
    fn successors(&self, u: u64) -> impl Iterator<Item = u64> + '_ {
        let base = (u % self.high()) * self.alphabet_size as u64;
        (base..base + self.alphabet_size as u64).filter(move |&v| self.allowed.get(v as usize))
    }

    #[inline]
    fn predecessors(&self, v: u64) -> impl Iterator<Item = u64> + '_ {
        let high = self.high();
        let tail = v / self.alphabet_size as u64;
        (0..self.alphabet_size as u64)
            .map(move |a| a * high + tail)
            .filter(move |&u| self.allowed.get(u as usize))
    }

    pub fn edges(&self) -> Vec<(Word, Word)> {
        let mut out = Vec::new();
        for u in self.vertex_indices() {
            for v in self.successors(u) {
                out.push((
                    Word::from_index(u, self.window, self.alphabet_size),
                    Word::from_index(v, self.window, self.alphabet_size),
                ));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.vertex_indices().map(|u| self.successors(u).count()).sum()
    }

    /// Vertices lying on right-infinite walks (one-sided) or bi-infinite walks
    /// (two-sided).
    pub(crate) fn live(&self) -> BitSet {
        let mut live = self.allowed.clone();
        let mut out_deg = vec![0u8; live.len()];
        let mut in_deg = vec![0u8; live.len()];
        let mut stack = Vec::new();
        let two_sided = self.sided == Sided::TwoSided;
        for u in self.vertex_indices() {
            out_deg[u as usize] = self.successors(u).count() as u8;
            if two_sided {
                in_deg[u as usize] = self.predecessors(u).count() as u8;
            }
            if out_deg[u as usize] == 0 || (two_sided && in_deg[u as usize] == 0) {
                stack.push(u);
                live.clear(u as usize);
            }
        }
        let n = self.alphabet_size as u64;
        let high = self.high();
        while let Some(dead) = stack.pop() {
            let tail = dead / n;
            for a in 0..n {
                let p = a * high + tail;
                if live.get(p as usize) {
                    out_deg[p as usize] -= 1;
                    if out_deg[p as usize] == 0 {
                        live.clear(p as usize);
                        stack.push(p);
                    }
                }
            }
            if two_sided {
                let base = (dead % high) * n;
                for s in base..base + n {
                    if live.get(s as usize) {
                        in_deg[s as usize] -= 1;
                        if in_deg[s as usize] == 0 {
                            live.clear(s as usize);
                            stack.push(s);
                        }
                    }
                }
            }
        }
        live
    }

    /// The same shift with non-extendable vertices removed.
    pub fn trimmed(&self) -> Sft {
        Sft::from_parts(self.alphabet_size, self.window, self.sided, self.live())
    }

    /// Recodes to a longer window. Every path of `new_window - window` edges
    /// becomes a vertex.
    pub fn higher_block(&self, new_window: usize) -> Result<Sft> {
        if new_window < self.window {
            return Err(Error::InvalidArgument(format!(
                "cannot lower window {} to {new_window}",
                self.window
            )));
        }
        let space = word_space(self.alphabet_size, new_window)?;
        let n = self.alphabet_size as u64;
        let mut current: Vec<u64> = self.vertex_indices().collect();
        let mut len = self.window;
        let mask = self.high() * n;
        while len < new_window {
            let mut next = Vec::with_capacity(current.len() * 2);
            for &w in &current {
                let tail = w % (mask / n);
                for a in 0..n {
                    if self.allowed.get((tail * n + a) as usize) {
                        next.push(w * n + a);
                    }
                }
            }
            current = next;
            len += 1;
        }
        let mut allowed = BitSet::new(space);
        for w in current {
            allowed.set(w as usize);
        }
        Ok(Sft::from_parts(self.alphabet_size, new_window, self.sided, allowed))
    }

    /// Length-`len` words appearing in the shift.
    pub fn language(&self, len: usize) -> BTreeSet<Word> {
        self.language_indices(len)
            .into_iter()
            .map(|i| Word::from_index(i, len, self.alphabet_size))
            .collect()
    }

    /// Sorted base-`n` codes of the length-`len` words of the shift.
    pub fn language_indices(&self, len: usize) -> Vec<u64> {
        let live = self.live();
        let n = self.alphabet_size as u64;
        if len <= self.window {
            let drop = n.pow((self.window - len) as u32);
            let mut out: Vec<u64> = live.iter().map(|v| v as u64 / drop).collect();
            out.dedup();
            return out;
        }
        let live_sft = Sft::from_parts(self.alphabet_size, self.window, self.sided, live);
        let mut out: Vec<u64> = Vec::new();
        let extra = len - self.window;
        let mut stack: Vec<(u64, u64, usize)> =
            live_sft.vertex_indices().map(|v| (v, v, 0)).collect();
        while let Some((word, vertex, depth)) = stack.pop() {
            if depth == extra {
                out.push(word);
                continue;
            }
            for s in live_sft.successors(vertex) {
                stack.push((word * n + s % n, s, depth + 1));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Cycle-carrying strongly connected components, each as a vertex-induced
    /// Sft, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Sft> {
        let verts: Vec<u64> = self.vertex_indices().collect();
        let id = |v: u64| verts.binary_search(&v).ok();
        let k = verts.len();
        const UNSEEN: u32 = u32::MAX;
        let mut index = vec![UNSEEN; k];
        let mut low = vec![0u32; k];
        let mut on_stack = vec![false; k];
        let mut stack: Vec<u32> = Vec::new();
        let mut counter = 0u32;
        let mut comps: Vec<Vec<u64>> = Vec::new();
        let succ_ids = |i: usize| -> Vec<u32> {
            self.successors(verts[i])
                .filter_map(|s| id(s).map(|x| x as u32))
                .collect()
        };
        for root in 0..k {
            if index[root] != UNSEEN {
                continue;
            }
            // (vertex, successor list, next position)
            let mut call: Vec<(u32, Vec<u32>, usize)> = vec![(root as u32, succ_ids(root), 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root as u32);
            on_stack[root] = true;
            while let Some(frame) = call.last_mut() {
                let v = frame.0 as usize;
                if frame.2 < frame.1.len() {
                    let w = frame.1[frame.2] as usize;
                    frame.2 += 1;
                    if index[w] == UNSEEN {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w as u32);
                        on_stack[w] = true;
                        call.push((w as u32, succ_ids(w), 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(parent) = call.last() {
                        let p = parent.0 as usize;
                        low[p] = low[p].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack") as usize;
                            on_stack[w] = false;
                            comp.push(verts[w]);
                            if w == v {
                                break;
                            }
                        }
                        comps.push(comp);
                    }
                }
            }
        }
        let mut out: Vec<Vec<u64>> = comps
            .into_iter()
            .filter(|c| {
                c.len() > 1 || {
                    let v = c[0];
                    self.successors(v).any(|s| s == v)
                }
            })
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        out.sort_by_key(|c| c[0]);
        out.into_iter()
            .map(|c| {
                let mut bits = BitSet::new(self.allowed.len());
                for v in c {
                    bits.set(v as usize);
                }
                Sft::from_parts(self.alphabet_size, self.window, self.sided, bits)
            })
            .collect()
    }

    /// True iff the graph is a single simple cycle (a periodic orbit).
    pub fn is_single_cycle(&self) -> bool {
        let v = self.vertex_count();
        v > 0 && self.edge_count() == v && self.components().len() == 1
    }

    /// Natural log of the spectral radius, or `None` when the graph has no cycle.
    pub fn entropy(&self) -> Result<Option<f64>> {
        let mut best: Option<f64> = None;
        for comp in self.components() {
            let rho = comp.spectral_radius_irreducible()?;
            let h = rho.ln().max(0.0);
            best = Some(best.map_or(h, |b: f64| b.max(h)));
        }
        Ok(best)
    }

    /// Power iteration on `A + I` from the all-ones vector, stopped by the
    /// Collatz–Wielandt bracket. Only valid for strongly connected graphs.
    fn spectral_radius_irreducible(&self) -> Result<f64> {
        const TOL: f64 = 1e-12;
        const CAP: usize = 500_000;
        let verts: Vec<u64> = self.vertex_indices().collect();
        let adj: Vec<Vec<u32>> = verts
            .iter()
            .map(|&u| {
                self.successors(u)
                    .map(|s| verts.binary_search(&s).expect("induced vertex") as u32)
                    .collect()
            })
            .collect();
        let mut v = vec![1.0f64; verts.len()];
        let mut w = vec![0.0f64; verts.len()];
        for _ in 0..CAP {
            for (i, out) in adj.iter().enumerate() {
                w[i] = v[i] + out.iter().map(|&j| v[j as usize]).sum::<f64>();
            }
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for (a, b) in w.iter().zip(&v) {
                let r = a / b;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            let (lo, hi) = ((lo - 1.0).max(1.0), (hi - 1.0).max(1.0));
            if hi.ln() - lo.ln() <= TOL {
                return Ok(0.5 * (lo + hi));
            }
            let norm = w.iter().cloned().fold(0.0, f64::max);
            for (a, b) in v.iter_mut().zip(&w) {
                *a = b / norm;
            }
        }
        Err(Error::NonConvergence(CAP))
    }

    /// Non-allowed window words.
    pub fn forbidden_words(&self) -> Vec<Word> {
        (0..self.allowed.len())
            .filter(|&i| !self.allowed.get(i))
            .map(|i| Word::from_index(i as u64, self.window, self.alphabet_size))
            .collect()
    }

    /// Shortest words that never occur inside an allowed vertex while all of
    /// their proper factors do.
    pub fn minimal_forbidden_words(&self) -> Vec<Word> {
        let n = self.alphabet_size as u64;
        let mut occ: Vec<BitSet> = vec![BitSet::new(1); self.window + 1];
        occ[self.window] = self.allowed.clone();
        for len in (1..self.window).rev() {
            let mut b = BitSet::new(self.alphabet_size.pow(len as u32));
            for w in occ[len + 1].iter() {
                let w = w as u64;
                b.set((w / n) as usize);
                b.set((w % n.pow(len as u32)) as usize);
            }
            occ[len] = b;
        }
        let mut out = Vec::new();
        for len in 1..=self.window {
            for i in 0..self.alphabet_size.pow(len as u32) {
                if occ[len].get(i) {
                    continue;
                }
                let i = i as u64;
                let minimal = len == 1 || {
                    let p = occ[len - 1].get((i / n) as usize);
                    let s = occ[len - 1].get((i % n.pow(len as u32 - 1)) as usize);
                    p && s
                };
                if minimal {
                    out.push(Word::from_index(i, len, self.alphabet_size));
                }
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph sft {\n");
        for v in self.vertices() {
            let _ = writeln!(s, "  \"{v}\";");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  \"{u}\" -> \"{v}\";");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> SftJson {
        SftJson::Graph {
            alphabet_size: self.alphabet_size,
            window: self.window,
            sided: self.sided,
            vertices: self.vertices().iter().map(Word::to_string).collect(),
            edges: self
                .edges()
                .iter()
                .map(|(u, v)| [u.to_string(), v.to_string()])
                .collect(),
        }
    }

    pub fn from_json(json: &SftJson) -> Result<Sft> {
        match json {
            SftJson::Forbidden {
                alphabet_size,
                window,
                sided,
                forbidden,
            } => {
                let words = forbidden
                    .iter()
                    .map(|w| Word::parse(w, *alphabet_size))
                    .collect::<Result<Vec<_>>>()?;
                sft_build(*alphabet_size, *window, &words, *sided)
            }
            SftJson::Graph {
                alphabet_size,
                window,
                sided,
                vertices,
                edges,
            } => {
                let verts = vertices
                    .iter()
                    .map(|w| Word::parse(w, *alphabet_size))
                    .collect::<Result<Vec<_>>>()?;
                let base = Sft::from_vertices(*alphabet_size, *window, *sided, &verts)?;
                let mut given = BTreeSet::new();
                for [u, v] in edges {
                    let u = Word::parse(u, *alphabet_size)?;
                    let v = Word::parse(v, *alphabet_size)?;
                    if !base.is_allowed(&u)
                        || !base.is_allowed(&v)
                        || u.symbols()[1..] != v.symbols()[..window - 1]
                    {
                        return Err(Error::InvalidArgument(format!(
                            "edge {u}->{v} is not an overlap pair of listed vertices"
                        )));
                    }
                    given.insert((u, v));
                }
                if given.len() == base.edge_count() {
                    return Ok(base);
                }
                // A strict edge subset: the edges themselves become the vertices.
                let edge_words: Vec<Word> = given
                    .iter()
                    .map(|(u, v)| {
                        let mut s = u.symbols().to_vec();
                        s.push(*v.symbols().last().unwrap());
                        Word::new(s, *alphabet_size)
                    })
                    .collect::<Result<_>>()?;
                Sft::from_vertices(*alphabet_size, window + 1, *sided, &edge_words)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SftJson {
    Forbidden {
        alphabet_size: usize,
        window: usize,
        sided: Sided,
        forbidden: Vec<String>,
    },
    Graph {
        alphabet_size: usize,
        window: usize,
        sided: Sided,
        vertices: Vec<String>,
        edges: Vec<[String; 2]>,
    },
}

pub fn sft_language(s: &Sft, len: usize) -> BTreeSet<Word> {
    s.language(len)
}

pub fn sft_entropy(s: &Sft) -> Result<Option<f64>> {
    s.entropy()
}

pub fn sft_components(s: &Sft) -> Vec<Sft> {
    s.components()
}

/// Language equality of two window Sfts.
///
/// Both shifts are `M`-step for `M = max(windows)`, so each is determined by
/// its `(M+1)`-words; equality there implies equality at every length,
/// including `window(a) + window(b) + 1`. It is decided by comparing the
/// trimmed window-`M` graphs, whose edges are exactly those words.
pub fn sft_equivalent(a: &Sft, b: &Sft) -> Result<bool> {
    if a.alphabet_size != b.alphabet_size {
        return Err(Error::AlphabetMismatch(a.alphabet_size, b.alphabet_size));
    }
    if a.sided != b.sided {
        return Err(Error::SidednessMismatch);
    }
    let m = a.window.max(b.window);
    let la = if a.window == m { a.live() } else { a.higher_block(m)?.live() };
    let lb = if b.window == m { b.live() } else { b.higher_block(m)?.live() };
    Ok(la == lb)
}
