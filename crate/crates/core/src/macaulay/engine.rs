//! Degree-by-degree reduced echelon forms of a homogeneous ideal over `F_p`.
//!
//! Level `d` stores a reduced row echelon basis of `I_d` over the monomials of
//! degree `d` sorted in descending grevlex order: each basis row has a leading
//! one at its pivot column and a tail supported only on standard (non-pivot)
//! columns. Level `d+1` is assembled from `x_j * row` products, pruned with the
//! chain criterion, plus the generators of degree `d+1`.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::field::PrimeField;
use crate::monomial::Monomial;

#[derive(Default)]
pub(crate) struct MonoHasher(u64);

impl Hasher for MonoHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }
    fn write_u128(&mut self, v: u128) {
        let x = (v as u64) ^ ((v >> 64) as u64).rotate_left(29);
        self.0 = (x ^ (x >> 31)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 ^= self.0 >> 29;
    }
}

pub(crate) type MonoMap<V> = HashMap<Monomial, V, BuildHasherDefault<MonoHasher>>;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, Default)]
struct Row {
    /// (column, coefficient), sorted by column, standard columns only.
    tail: Vec<(u32, u32)>,
}

#[derive(Debug, Default)]
pub(crate) struct Level {
    pub mons: Vec<Monomial>,
    index: MonoMap<u32>,
    pivot_row: Vec<u32>,
    rows: Vec<Row>,
    pub standard: Vec<u32>,
}

impl Level {
    pub fn col(&self, m: Monomial) -> Option<u32> {
        self.index.get(&m).copied()
    }

    fn is_pivot(&self, col: u32) -> bool {
        self.pivot_row[col as usize] != NONE
    }

    pub fn dim_quotient(&self) -> usize {
        self.standard.len()
    }
}

/// Incremental graded normal-form engine.
pub struct GradedEngine {
    field: PrimeField,
    n: usize,
    gens: Vec<(u32, Vec<(Monomial, u32)>)>,
    levels: Vec<Level>,
}

/// Dense scratch vector with a touched-list for sparse resets.
struct Scratch {
    vals: Vec<u32>,
    touched: Vec<u32>,
    mark: Vec<bool>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { vals: vec![0; n], touched: Vec::new(), mark: vec![false; n] }
    }

    #[inline]
    fn axpy(&mut self, f: &PrimeField, col: u32, coef: u32) {
        let c = col as usize;
        if !self.mark[c] {
            self.mark[c] = true;
            self.touched.push(col);
        }
        self.vals[c] = f.add_u32(self.vals[c], coef);
    }

    fn drain_sorted(&mut self, keep: impl Fn(u32) -> bool) -> Vec<(u32, u32)> {
        self.touched.sort_unstable();
        let mut out = Vec::new();
        for &c in &self.touched {
            let v = self.vals[c as usize];
            if v != 0 && keep(c) {
                out.push((c, v));
            }
            self.vals[c as usize] = 0;
            self.mark[c as usize] = false;
        }
        self.touched.clear();
        out
    }
}

impl GradedEngine {
    /// Generators are homogeneous term lists `(degree, terms)` in `n` variables.
    pub fn new(field: PrimeField, n: usize, gens: Vec<(u32, Vec<(Monomial, u32)>)>) -> Self {
        GradedEngine { field, n, gens, levels: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub(crate) fn level(&mut self, d: u32) -> &Level {
        self.ensure(d);
        &self.levels[d as usize]
    }

    /// Dimension of `(R/I)_d`.
    pub fn hilbert(&mut self, d: u32) -> usize {
        self.level(d).dim_quotient()
    }

    pub fn ensure(&mut self, d: u32) {
        while self.levels.len() <= d as usize {
            let t = self.levels.len() as u32;
            let lvl = self.build(t);
            self.levels.push(lvl);
        }
    }

    /// Normal form of a degree-`d` vector; result supported on standard columns.
    pub fn normal_form(&mut self, d: u32, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Vec<(u32, u32)> {
        self.ensure(d);
        let f = self.field;
        let lvl = &self.levels[d as usize];
        let mut acc = Scratch::new(lvl.mons.len());
        for (m, c) in terms {
            let col = lvl.col(m).expect("monomial of the requested degree");
            acc.axpy(&f, col, c);
        }
        let entries: Vec<(u32, u32)> = acc.touched.iter().map(|&c| (c, acc.vals[c as usize])).collect();
        for (c, _) in entries {
            let v = acc.vals[c as usize];
            if v == 0 || !lvl.is_pivot(c) {
                continue;
            }
            let row = &lvl.rows[lvl.pivot_row[c as usize] as usize];
            acc.vals[c as usize] = 0;
            let neg = f.sub_u32(0, v);
            for &(tc, tv) in &row.tail {
                acc.axpy(&f, tc, f.mul_u32(neg, tv));
            }
        }
        acc.drain_sorted(|c| !lvl.is_pivot(c))
    }

    fn build(&self, t: u32) -> Level {
        let f = self.field;
        let n = self.n;
        let mons = Monomial::all_of_degree(n, t);
        let big_n = mons.len();
        let mut index: MonoMap<u32> = MonoMap::default();
        index.reserve(big_n);
        for (i, m) in mons.iter().enumerate() {
            index.insert(*m, i as u32);
        }

        // Candidate rows: A rows (one per reachable leading column) and C rows.
        let mut a_src: Vec<Option<(usize, u32)>> = vec![None; big_n];
        let mut c_rows: Vec<Vec<(u32, u32)>> = Vec::new();
        let mut scratch = Scratch::new(big_n);

        let product_entries = |j: usize, pcol: u32, lead: u32| -> Vec<(u32, u32)> {
            let prev = &self.levels[(t - 1) as usize];
            let row = &prev.rows[prev.pivot_row[pcol as usize] as usize];
            let xj = Monomial::var(j);
            let mut e = Vec::with_capacity(row.tail.len() + 1);
            e.push((lead, 1));
            for &(sc, sv) in &row.tail {
                let m = prev.mons[sc as usize].mul(xj);
                e.push((index[&m], sv));
            }
            e
        };

        if t >= 1 {
            let prev = &self.levels[(t - 1) as usize];
            let pp = if t >= 2 { Some(&self.levels[(t - 2) as usize]) } else { None };
            let mut prods: Vec<(usize, u32)> = Vec::with_capacity(n);
            let mut parent: Vec<usize> = Vec::with_capacity(n);
            for (c, v) in mons.iter().enumerate() {
                prods.clear();
                for j in 0..n {
                    if v.exp(j) == 0 {
                        continue;
                    }
                    let u = v.div(Monomial::var(j)).expect("divisible");
                    let pc = prev.col(u).expect("present");
                    if prev.is_pivot(pc) {
                        prods.push((j, pc));
                    }
                }
                if prods.is_empty() {
                    continue;
                }
                if prods.len() == 1 {
                    a_src[c] = Some(prods[0]);
                    continue;
                }
                parent.clear();
                parent.extend(0..prods.len());
                fn find(p: &mut [usize], mut x: usize) -> usize {
                    while p[x] != x {
                        p[x] = p[p[x]];
                        x = p[x];
                    }
                    x
                }
                if let Some(pp) = pp {
                    for a in 0..prods.len() {
                        for b in a + 1..prods.len() {
                            let w = v
                                .div(Monomial::var(prods[a].0))
                                .and_then(|x| x.div(Monomial::var(prods[b].0)))
                                .expect("divisible");
                            let wc = pp.col(w).expect("present");
                            if pp.is_pivot(wc) {
                                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                                if ra != rb {
                                    parent[ra] = rb;
                                }
                            }
                        }
                    }
                }
                let mut seen_roots: Vec<usize> = Vec::new();
                for a in 0..prods.len() {
                    let r = find(&mut parent, a);
                    if seen_roots.contains(&r) {
                        continue;
                    }
                    seen_roots.push(r);
                    if a_src[c].is_none() {
                        a_src[c] = Some(prods[a]);
                    } else {
                        c_rows.push(product_entries(prods[a].0, prods[a].1, c as u32));
                    }
                }
            }
        }
        for (d, terms) in &self.gens {
            if *d == t {
                c_rows.push(terms.iter().map(|(m, v)| (index[m], *v)).collect());
            }
        }

        // Fully reduce A rows in increasing leading-monomial order.
        let mut a_tail: Vec<Vec<(u32, u32)>> = vec![Vec::new(); big_n];
        for c in (0..big_n).rev() {
            let Some((j, pc)) = a_src[c] else { continue };
            let entries = product_entries(j, pc, c as u32);
            for &(col, v) in &entries[1..] {
                scratch.axpy(&f, col, v);
            }
            reduce_against_a(&f, &mut scratch, &a_src, &a_tail);
            a_tail[c] = scratch.drain_sorted(|col| a_src[col as usize].is_none());
        }

        // C rows: reduce by A, then build the extra block D on B columns.
        let mut d_rows: Vec<(u32, Vec<(u32, u32)>)> = Vec::new();
        let mut d_pivot: Vec<u32> = vec![NONE; big_n];
        for row in c_rows {
            for (col, v) in row {
                scratch.axpy(&f, col, v);
            }
            reduce_against_a(&f, &mut scratch, &a_src, &a_tail);
            // reduce by D
            let touched: Vec<u32> = scratch.touched.clone();
            for col in touched {
                let v = scratch.vals[col as usize];
                let di = d_pivot[col as usize];
                if v == 0 || di == NONE {
                    continue;
                }
                scratch.vals[col as usize] = 0;
                let neg = f.sub_u32(0, v);
                for &(tc, tv) in &d_rows[di as usize].1 {
                    scratch.axpy(&f, tc, f.mul_u32(neg, tv));
                }
            }
            let mut entries = scratch.drain_sorted(|col| a_src[col as usize].is_none());
            if entries.is_empty() {
                continue;
            }
            let (lead, lv) = entries[0];
            let inv = f.inv_u32(lv).expect("nonzero");
            let tail: Vec<(u32, u32)> = entries.drain(1..).map(|(c, v)| (c, f.mul_u32(v, inv))).collect();
            // eliminate the new pivot from existing D rows
            for (_, dt) in d_rows.iter_mut() {
                if let Ok(pos) = dt.binary_search_by_key(&lead, |e| e.0) {
                    let coef = dt[pos].1;
                    dt.remove(pos);
                    *dt = axpy_sparse(&f, dt, &tail, f.sub_u32(0, coef));
                }
            }
            d_pivot[lead as usize] = d_rows.len() as u32;
            d_rows.push((lead, tail));
        }

        // Reduce A tails by D.
        if !d_rows.is_empty() {
            for tail in a_tail.iter_mut() {
                if tail.iter().all(|(c, _)| d_pivot[*c as usize] == NONE) {
                    continue;
                }
                for &(c, v) in tail.iter() {
                    scratch.axpy(&f, c, v);
                }
                let touched: Vec<u32> = scratch.touched.clone();
                for col in touched {
                    let v = scratch.vals[col as usize];
                    let di = d_pivot[col as usize];
                    if v == 0 || di == NONE {
                        continue;
                    }
                    scratch.vals[col as usize] = 0;
                    let neg = f.sub_u32(0, v);
                    for &(tc, tv) in &d_rows[di as usize].1 {
                        scratch.axpy(&f, tc, f.mul_u32(neg, tv));
                    }
                }
                *tail = scratch.drain_sorted(|_| true);
            }
        }

        let mut pivot_row = vec![NONE; big_n];
        let mut rows = Vec::new();
        for c in 0..big_n {
            if a_src[c].is_some() {
                pivot_row[c] = rows.len() as u32;
                rows.push(Row { tail: std::mem::take(&mut a_tail[c]) });
            } else if d_pivot[c] != NONE {
                pivot_row[c] = rows.len() as u32;
                rows.push(Row { tail: std::mem::take(&mut d_rows[d_pivot[c] as usize].1) });
            }
        }
        let standard = (0..big_n as u32).filter(|&c| pivot_row[c as usize] == NONE).collect();
        Level { mons, index, pivot_row, rows, standard }
    }
}

fn reduce_against_a(f: &PrimeField, scratch: &mut Scratch, a_src: &[Option<(usize, u32)>], a_tail: &[Vec<(u32, u32)>]) {
    // A tails contain only non-A columns, so one pass suffices.
    let touched: Vec<u32> = scratch.touched.clone();
    for col in touched {
        let v = scratch.vals[col as usize];
        if v == 0 || a_src[col as usize].is_none() {
            continue;
        }
        scratch.vals[col as usize] = 0;
        let neg = f.sub_u32(0, v);
        for &(tc, tv) in &a_tail[col as usize] {
            scratch.axpy(f, tc, f.mul_u32(neg, tv));
        }
    }
}

fn axpy_sparse(f: &PrimeField, a: &[(u32, u32)], b: &[(u32, u32)], s: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = f.mul_u32(s, b[j].1);
            if v != 0 {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = f.add_u32(a[i].1, f.mul_u32(s, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
