//! Maximum-weight matching in general graphs by Edmonds' blossom method.
//!
//! Primal-dual schema after Galil's survey (ACM Computing Surveys, 1986),
//! following the well-known O(n^3) formulation by Joris van Rantwijk:
//! repeatedly grow alternating trees from single vertices, shrinking odd
//! cycles (blossoms) into pseudo-vertices, and pump slack out of the dual
//! variables when the search stalls. Integer weights keep every dual value
//! exact (vertex duals are stored doubled).
//!
//! With `max_cardinality` the solver returns a maximum-weight matching among
//! the matchings of maximum cardinality, which on a complete even graph is a
//! perfect matching; minimum-weight perfect matching is the same problem
//! with weights reflected.

use alloc::vec;
use alloc::vec::Vec;

pub type Weight = i64;

pub const UNMATCHED: usize = usize::MAX;
const NONE: usize = usize::MAX;

const LABEL_FREE: u8 = 0;
const LABEL_S: u8 = 1;
const LABEL_T: u8 = 2;
const LABEL_CRUMB: u8 = 5;

/// Solver state. Vertices are 0..n-1; nontrivial blossoms use ids n..2n-1.
/// Edge endpoints 2k and 2k+1 belong to edge k.
pub struct Blossom {
    nvertex: usize,
    edges: Vec<(usize, usize, Weight)>,
    max_cardinality: bool,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<Weight>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Blossom {
    pub fn new(nvertex: usize, edges: Vec<(usize, usize, Weight)>, max_cardinality: bool) -> Self {
        for &(i, j, _) in &edges {
            debug_assert!(i != j && i < nvertex && j < nvertex);
        }
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(vec![0; nvertex]);
        Blossom {
            nvertex,
            max_cardinality,
            endpoint,
            neighbend,
            mate: vec![UNMATCHED; nvertex],
            label: vec![LABEL_FREE; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase: (0..nvertex).chain(core::iter::repeat(NONE).take(nvertex)).collect(),
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![Vec::new(); 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
            edges,
        }
    }

    // 2 * slack of edge k; only meaningful between top-level blossoms.
    #[inline]
    fn slack(&self, k: usize) -> Weight {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.blossom_leaves(t, out);
            }
        }
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.blossom_leaves(b, &mut out);
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == LABEL_FREE && self.label[b] == LABEL_FREE);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == LABEL_S {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else {
            // T-label: the base's mate becomes an S-vertex.
            let base = self.blossombase[b];
            debug_assert!(self.mate[base] != UNMATCHED);
            let mbase = self.mate[base];
            let v = self.endpoint[mbase];
            self.assign_label(v, LABEL_S, mbase ^ 1);
        }
    }

    /// Trace back from both endpoints of an S-S edge; returns the base of a
    /// new blossom, or NONE if the paths reach two different roots (an
    /// augmenting path).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], LABEL_S);
            path.push(b);
            self.label[b] = LABEL_CRUMB;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], LABEL_T);
                debug_assert!(self.labelend[b] != NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                core::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = LABEL_S;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];

        let b = self.unusedblossoms.pop().expect("free blossom id");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;

        let mut childs = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            childs.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert!(self.labelend[bv] != NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        childs.push(bb);
        childs.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            childs.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert!(self.labelend[bw] != NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.blossomchilds[b] = childs;
        self.blossomendps[b] = endps;

        debug_assert_eq!(self.label[bb], LABEL_S);
        self.label[b] = LABEL_S;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;

        for v in self.leaves(b) {
            if self.label[self.inblossom[v]] == LABEL_T {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        // Merge least-slack edge lists of the children.
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for bv in self.blossomchilds[b].clone() {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                self.leaves(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossombestedges[bv].clone()]
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        core::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == LABEL_S
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv] = Vec::new();
            self.bestedge[bv] = NONE;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for ix in 0..self.blossombestedges[b].len() {
            let k = self.blossombestedges[b][ix];
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == LABEL_T {
            // Relabel the path from the entry child to the base, flipping
            // traversal direction so the alternating structure survives.
            debug_assert!(self.labelend[b] != NONE);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let len = self.blossomchilds[b].len() as i64;
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&c| c == entrychild)
                .expect("entry child present") as i64;
            let (jstep, endptrick): (i64, i64) = if j & 1 != 0 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let at = |list: &Vec<usize>, idx: i64| -> usize {
                let n = list.len() as i64;
                list[idx.rem_euclid(n) as usize]
            };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = LABEL_FREE;
                let q = at(&self.blossomendps[b], j - endptrick) ^ (endptrick as usize) ^ 1;
                self.label[self.endpoint[q]] = LABEL_FREE;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, LABEL_T, p);
                self.allowedge[at(&self.blossomendps[b], j - endptrick) / 2] = true;
                j += jstep;
                p = at(&self.blossomendps[b], j - endptrick) ^ (endptrick as usize);
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = at(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = LABEL_T;
            self.label[bv] = LABEL_T;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while at(&self.blossomchilds[b], j) != entrychild {
                let bv = at(&self.blossomchilds[b], j);
                if self.label[bv] == LABEL_S {
                    j += jstep;
                    continue;
                }
                let mut v = NONE;
                for leaf in self.leaves(bv) {
                    v = leaf;
                    if self.label[leaf] != LABEL_FREE {
                        break;
                    }
                }
                if v != NONE && self.label[v] != LABEL_FREE {
                    debug_assert_eq!(self.label[v], LABEL_T);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = LABEL_FREE;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = LABEL_FREE;
                    let lblend = self.labelend[v];
                    self.assign_label(v, LABEL_T, lblend);
                }
                j += jstep;
            }
        }
        self.label[b] = LABEL_FREE;
        self.labelend[b] = NONE;
        self.blossombase[b] = NONE;
        self.bestedge[b] = NONE;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        self.blossombestedges[b] = Vec::new();
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b].iter().position(|&c| c == t).expect("child of b");
        let len = self.blossomchilds[b].len() as i64;
        let mut j = i as i64;
        let (jstep, endptrick): (i64, i64) = if i & 1 != 0 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        let at = |list: &Vec<usize>, idx: i64| -> usize {
            let n = list.len() as i64;
            list[idx.rem_euclid(n) as usize]
        };
        while j != 0 {
            j += jstep;
            let t = at(&self.blossomchilds[b], j);
            let p = at(&self.blossomendps[b], j - endptrick) ^ (endptrick as usize);
            if t >= self.nvertex {
                let endp = self.endpoint[p];
                self.augment_blossom(t, endp);
            }
            j += jstep;
            let t = at(&self.blossomchilds[b], j);
            if t >= self.nvertex {
                let endp = self.endpoint[p ^ 1];
                self.augment_blossom(t, endp);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], LABEL_S);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break; // reached a single vertex: augmenting path ends
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], LABEL_T);
                debug_assert!(self.labelend[bt] != NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    /// Complementary-slackness check of the final primal/dual pair.
    #[cfg(debug_assertions)]
    fn verify_optimum(&self) {
        let vdualoffset = if self.max_cardinality {
            (-self.dualvar[..self.nvertex].iter().copied().min().unwrap_or(0)).max(0)
        } else {
            0
        };
        for (k, &(i, j, wt)) in self.edges.iter().enumerate() {
            let mut s = self.dualvar[i] + self.dualvar[j] - 2 * wt;
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while self.blossomparent[*iblossoms.last().unwrap()] != NONE {
                iblossoms.push(self.blossomparent[*iblossoms.last().unwrap()]);
            }
            while self.blossomparent[*jblossoms.last().unwrap()] != NONE {
                jblossoms.push(self.blossomparent[*jblossoms.last().unwrap()]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += 2 * self.dualvar[bi];
            }
            assert!(s >= 0);
            if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k && s == 0);
            }
        }
        for v in 0..self.nvertex {
            assert!(self.mate[v] != UNMATCHED || self.dualvar[v] + vdualoffset == 0);
        }
    }

    /// Run the solver; returns mate[v] = partner vertex or UNMATCHED.
    pub fn solve(mut self) -> Vec<usize> {
        if self.edges.is_empty() {
            return self.mate;
        }
        for _ in 0..self.nvertex {
            // Stage: grow alternating trees until one augmentation happens.
            self.label = vec![LABEL_FREE; 2 * self.nvertex];
            self.bestedge = vec![NONE; 2 * self.nvertex];
            for list in &mut self.blossombestedges[self.nvertex..] {
                list.clear();
            }
            for a in &mut self.allowedge {
                *a = false;
            }
            self.queue.clear();
            for v in 0..self.nvertex {
                if self.mate[v] == UNMATCHED && self.label[self.inblossom[v]] == LABEL_FREE {
                    self.assign_label(v, LABEL_S, NONE);
                }
            }
            let mut augmented = false;
            loop {
                // Substage: BFS over allowed edges, else a dual update.
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], LABEL_S);
                    for p in self.neighbend[v].clone() {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == LABEL_FREE {
                                self.assign_label(w, LABEL_T, p ^ 1);
                            } else if self.label[self.inblossom[w]] == LABEL_S {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == LABEL_FREE {
                                debug_assert_eq!(self.label[self.inblossom[w]], LABEL_T);
                                self.label[w] = LABEL_T;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == LABEL_S {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == LABEL_FREE
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // Dual update: find the tightest constraint.
                let mut deltatype = -1;
                let mut delta = 0;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !self.max_cardinality {
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex].iter().copied().min().unwrap();
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == LABEL_FREE && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == NONE
                        && self.label[b] == LABEL_S
                        && self.bestedge[b] != NONE
                    {
                        let d = self.slack(self.bestedge[b]) / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == LABEL_T
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // Max-cardinality optimum: one final update so the dual
                    // solution verifies.
                    debug_assert!(self.max_cardinality);
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex].iter().copied().min().unwrap().max(0);
                }

                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        LABEL_FREE => {}
                        LABEL_S => self.dualvar[v] -= delta,
                        LABEL_T => self.dualvar[v] += delta,
                        _ => unreachable!(),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            LABEL_FREE => {}
                            LABEL_S => self.dualvar[b] += delta,
                            LABEL_T => self.dualvar[b] -= delta,
                            _ => unreachable!(),
                        }
                    }
                }

                match deltatype {
                    1 => break, // optimum reached
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == LABEL_FREE {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], LABEL_S);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], LABEL_S);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => unreachable!(),
                }
            }
            if !augmented {
                break;
            }
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == LABEL_S
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
        #[cfg(debug_assertions)]
        self.verify_optimum();

        let mut mate = self.mate;
        for v in 0..self.nvertex {
            if mate[v] != UNMATCHED {
                mate[v] = self.endpoint[mate[v]];
            }
        }
        for v in 0..self.nvertex {
            debug_assert!(mate[v] == UNMATCHED || mate[mate[v]] == v);
        }
        mate
    }
}

/// Maximum-weight matching; `mate[v]` is v's partner or [`UNMATCHED`].
pub fn max_weight_matching(
    nvertex: usize,
    edges: Vec<(usize, usize, Weight)>,
    max_cardinality: bool,
) -> Vec<usize> {
    if nvertex == 0 {
        return Vec::new();
    }
    Blossom::new(nvertex, edges, max_cardinality).solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(edges: &[(usize, usize, Weight)]) -> Vec<usize> {
        let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        max_weight_matching(n, edges.to_vec(), false)
    }

    fn solve_maxcard(edges: &[(usize, usize, Weight)]) -> Vec<usize> {
        let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        max_weight_matching(n, edges.to_vec(), true)
    }

    const U: usize = UNMATCHED;

    // The classic van Rantwijk regression suite: each case drives a distinct
    // branch of the blossom bookkeeping.

    #[test]
    fn trivial_cases() {
        assert!(max_weight_matching(0, vec![], false).is_empty());
        assert_eq!(solve(&[(0, 1, 1)]), vec![1, 0]);
        assert_eq!(solve(&[(1, 2, 10), (2, 3, 11)]), vec![U, U, 3, 2]);
        assert_eq!(solve(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)]), vec![U, U, 3, 2, U]);
        assert_eq!(solve_maxcard(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)]), vec![U, 2, 1, 4, 3]);
    }

    #[test]
    fn negative_weights() {
        let e = [(1, 2, 2), (1, 3, -2), (2, 3, 1), (2, 4, -1), (3, 4, -6)];
        assert_eq!(solve(&e), vec![U, 2, 1, U, U]);
        assert_eq!(solve_maxcard(&e), vec![U, 3, 4, 1, 2]);
    }

    #[test]
    fn s_blossom_augmentation() {
        assert_eq!(solve(&[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)]), vec![U, 2, 1, 4, 3]);
        assert_eq!(
            solve(&[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)]),
            vec![U, 6, 3, 2, 5, 4, 1]
        );
    }

    #[test]
    fn s_to_t_relabel_augmentation() {
        assert_eq!(
            solve(&[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)]),
            vec![U, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            solve(&[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (1, 6, 4)]),
            vec![U, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            solve(&[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (3, 6, 4)]),
            vec![U, 2, 1, 6, 5, 4, 3]
        );
    }

    #[test]
    fn nested_s_blossom_augmentation() {
        assert_eq!(
            solve(&[(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)]),
            vec![U, 3, 4, 1, 2, 6, 5]
        );
    }

    #[test]
    fn s_relabel_nested_s_blossom() {
        assert_eq!(
            solve(&[
                (1, 2, 10),
                (1, 7, 10),
                (2, 3, 12),
                (3, 4, 20),
                (3, 5, 20),
                (4, 5, 25),
                (5, 6, 10),
                (6, 7, 10),
                (7, 8, 8)
            ]),
            vec![U, 2, 1, 4, 3, 6, 5, 8, 7]
        );
    }

    #[test]
    fn nested_s_blossom_expand_recursively() {
        assert_eq!(
            solve(&[
                (1, 2, 8),
                (1, 3, 8),
                (2, 3, 10),
                (2, 4, 12),
                (3, 5, 12),
                (4, 5, 14),
                (4, 6, 12),
                (5, 7, 12),
                (6, 7, 14),
                (7, 8, 12)
            ]),
            vec![U, 2, 1, 5, 6, 3, 4, 8, 7]
        );
    }

    #[test]
    fn s_blossom_relabel_t_expand() {
        assert_eq!(
            solve(&[
                (1, 2, 23),
                (1, 5, 22),
                (1, 6, 15),
                (2, 3, 25),
                (3, 4, 22),
                (4, 5, 25),
                (4, 8, 14),
                (5, 7, 13)
            ]),
            vec![U, 6, 3, 2, 8, 7, 1, 5, 4]
        );
    }

    #[test]
    fn nested_s_blossom_relabel_t_expand() {
        assert_eq!(
            solve(&[
                (1, 2, 19),
                (1, 3, 20),
                (1, 8, 8),
                (2, 3, 25),
                (2, 4, 18),
                (3, 5, 18),
                (4, 5, 13),
                (4, 7, 7),
                (5, 6, 7)
            ]),
            vec![U, 8, 3, 2, 7, 6, 5, 4, 1]
        );
    }

    #[test]
    fn tricky_t_blossom_expansions() {
        assert_eq!(
            solve(&[
                (1, 2, 45),
                (1, 5, 45),
                (2, 3, 50),
                (3, 4, 45),
                (4, 5, 50),
                (1, 6, 30),
                (3, 9, 35),
                (4, 8, 35),
                (5, 7, 26),
                (9, 10, 5)
            ]),
            vec![U, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
        assert_eq!(
            solve(&[
                (1, 2, 45),
                (1, 5, 45),
                (2, 3, 50),
                (3, 4, 45),
                (4, 5, 50),
                (1, 6, 30),
                (3, 9, 35),
                (4, 8, 26),
                (5, 7, 40),
                (9, 10, 5)
            ]),
            vec![U, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
        assert_eq!(
            solve(&[
                (1, 2, 45),
                (1, 5, 45),
                (2, 3, 50),
                (3, 4, 45),
                (4, 5, 50),
                (1, 6, 30),
                (3, 9, 35),
                (4, 8, 28),
                (5, 7, 26),
                (9, 10, 5)
            ]),
            vec![U, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
    }

    #[test]
    fn nested_t_blossom_expansion_on_augmenting_path() {
        assert_eq!(
            solve(&[
                (1, 2, 45),
                (1, 7, 45),
                (2, 3, 50),
                (3, 4, 45),
                (4, 5, 95),
                (4, 6, 94),
                (5, 6, 94),
                (6, 7, 50),
                (1, 8, 30),
                (3, 11, 35),
                (5, 9, 36),
                (7, 10, 26),
                (11, 12, 5)
            ]),
            vec![U, 8, 3, 2, 6, 9, 4, 10, 1, 5, 7, 12, 11]
        );
    }

    #[test]
    fn nested_s_blossom_relabel_s_expand_recursively() {
        assert_eq!(
            solve(&[
                (1, 2, 40),
                (1, 3, 40),
                (2, 3, 60),
                (2, 4, 55),
                (3, 5, 55),
                (4, 5, 50),
                (1, 8, 15),
                (5, 7, 30),
                (7, 6, 10),
                (8, 10, 10),
                (4, 9, 30)
            ]),
            vec![U, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8]
        );
    }
}
