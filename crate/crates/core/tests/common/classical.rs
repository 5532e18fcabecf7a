//! A self-contained classical mod-2 Steenrod algebra and minimal
//! resolution, used as an oracle for τ-inverted motivic computations. It
//! shares no code with the library.

use std::collections::HashMap;

pub type Seq = Vec<u32>;

fn trim(mut r: Seq) -> Seq {
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

pub fn degree(r: &[u32]) -> u32 {
    r.iter().enumerate().map(|(i, &x)| x * ((1 << (i + 1)) - 1)).sum()
}

/// Milnor basis of degree `n`.
pub fn basis(n: u32) -> Vec<Seq> {
    fn go(rem: u32, k: usize, cur: &mut Seq, out: &mut Vec<Seq>) {
        if rem == 0 {
            out.push(trim(cur.clone()));
            return;
        }
        let w = (1u32 << (k + 1)) - 1;
        if w > rem {
            return;
        }
        for x in 0..=rem / w {
            if cur.len() <= k {
                cur.push(0);
            }
            cur[k] = x;
            go(rem - x * w, k + 1, cur, out);
        }
        cur.truncate(k);
    }
    let mut out = Vec::new();
    go(n, 0, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Multinomial coefficient mod 2: the summands must have disjoint bits.
fn multinomial_odd(xs: &[u32]) -> bool {
    let mut acc = 0u32;
    for &x in xs {
        if acc & x != 0 {
            return false;
        }
        acc |= x;
    }
    true
}

/// `Sq(r) Sq(s)` by Milnor matrices.
pub fn product(r: &[u32], s: &[u32]) -> Vec<Seq> {
    let rows = r.len();
    let cols = s.len();
    // x[i][j], i in 0..=rows, j in 0..=cols; x[0][0] unused
    let mut out: HashMap<Seq, bool> = HashMap::new();
    let mut x = vec![vec![0u32; cols + 1]; rows + 1];
    fn fill_row(i: usize, r: &[u32], s: &[u32], x: &mut Vec<Vec<u32>>, out: &mut HashMap<Seq, bool>) {
        let rows = r.len();
        let cols = s.len();
        if i > rows {
            // column sums fix row 0
            for j in 1..=cols {
                let used: u32 = (1..=rows).map(|k| x[k][j]).sum();
                if used > s[j - 1] {
                    return;
                }
                x[0][j] = s[j - 1] - used;
            }
            let n = rows + cols;
            let mut t = vec![0u32; n];
            for (d, slot) in t.iter_mut().enumerate() {
                let d = d + 1;
                let diag: Vec<u32> = (0..=d).filter(|&a| a <= rows && d - a <= cols).map(|a| x[a][d - a]).collect();
                if !multinomial_odd(&diag) {
                    return;
                }
                *slot = diag.iter().sum();
            }
            *out.entry(trim(t)).or_insert(false) ^= true;
            return;
        }
        // Σ_j 2^j x[i][j] = r[i-1], choose x[i][1..] then x[i][0]
        fn choose(i: usize, j: usize, rem: u32, r: &[u32], s: &[u32], x: &mut Vec<Vec<u32>>, out: &mut HashMap<Seq, bool>) {
            let cols = s.len();
            if j > cols {
                x[i][0] = rem;
                fill_row(i + 1, r, s, x, out);
                return;
            }
            let w = 1u32 << j;
            for v in 0..=(rem / w).min(s[j - 1]) {
                x[i][j] = v;
                choose(i, j + 1, rem - v * w, r, s, x, out);
            }
            x[i][j] = 0;
        }
        choose(i, 1, r[i - 1], r, s, x, out);
    }
    fill_row(1, r, s, &mut x, &mut out);
    let mut v: Vec<Seq> = out.into_iter().filter(|e| e.1).map(|e| e.0).collect();
    v.sort();
    v
}

/// A finite module: cell degrees and the action of every Milnor basis
/// element on every cell.
pub struct Module {
    pub degs: Vec<i32>,
    pub act: HashMap<(Seq, usize), Vec<usize>>,
}

impl Module {
    pub fn sphere() -> Self {
        Module { degs: vec![0], act: HashMap::new() }
    }

    /// Two cells in degrees `0` and `n` joined by `Sq^n` (n = 1 or 2).
    pub fn two_cell(n: u32) -> Self {
        let mut act = HashMap::new();
        act.insert((vec![n], 0), vec![1]);
        Module { degs: vec![0, n as i32], act }
    }

    pub fn apply(&self, r: &[u32], cell: usize) -> Vec<usize> {
        if r.is_empty() {
            return vec![cell];
        }
        self.act.get(&(r.to_vec(), cell)).cloned().unwrap_or_default()
    }

    /// Tensor product with the diagonal action `ψ Sq(R) = Σ Sq(R') ⊗ Sq(R'')`.
    pub fn tensor(&self, other: &Module) -> Module {
        let n = other.degs.len();
        let mut degs = Vec::new();
        for &a in &self.degs {
            for &b in &other.degs {
                degs.push(a + b);
            }
        }
        let top = degs.iter().max().unwrap() - degs.iter().min().unwrap();
        let mut act = HashMap::new();
        for d in 1..=top as u32 {
            for r in basis(d) {
                for i in 0..self.degs.len() {
                    for j in 0..n {
                        let mut hit: HashMap<usize, bool> = HashMap::new();
                        for (r1, r2) in splits(&r) {
                            for a in self.apply(&r1, i) {
                                for b in other.apply(&r2, j) {
                                    *hit.entry(a * n + b).or_insert(false) ^= true;
                                }
                            }
                        }
                        let mut v: Vec<usize> = hit.into_iter().filter(|e| e.1).map(|e| e.0).collect();
                        v.sort();
                        if !v.is_empty() {
                            act.insert((r.clone(), i * n + j), v);
                        }
                    }
                }
            }
        }
        Module { degs, act }
    }
}

fn splits(r: &[u32]) -> Vec<(Seq, Seq)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for &x in r {
        out = out
            .into_iter()
            .flat_map(|(a, b)| {
                (0..=x).map(move |y| {
                    let mut a2 = a.clone();
                    let mut b2 = b.clone();
                    a2.push(y);
                    b2.push(x - y);
                    (a2, b2)
                })
            })
            .collect();
    }
    out.into_iter().map(|(a, b)| (trim(a), trim(b))).collect()
}

type Vector = Vec<bool>;

fn reduce(rows: &[(usize, Vector)], v: &mut Vector) {
    for (p, r) in rows {
        if v[*p] {
            for (a, b) in v.iter_mut().zip(r) {
                *a ^= b;
            }
        }
    }
}

fn insert(rows: &mut Vec<(usize, Vector)>, mut v: Vector) -> bool {
    reduce(rows, &mut v);
    match v.iter().position(|&b| b) {
        Some(p) => {
            for (_, r) in rows.iter_mut() {
                if r[p] {
                    for (a, b) in r.iter_mut().zip(&v) {
                        *a ^= b;
                    }
                }
            }
            rows.push((p, v));
            true
        }
        None => false,
    }
}

/// Number of generators of each stage of a minimal resolution, by degree:
/// `ext[f][t - lo]` is `dim Ext^{f,t}`.
pub fn ext_dims(m: &Module, max_t: i32, max_f: usize) -> (i32, Vec<Vec<usize>>) {
    let lo = *m.degs.iter().min().unwrap();
    // gens[f] = list of (deg, image in stage f-1 as map (gen, Seq) -> bool)
    type Elt = HashMap<(usize, Seq), bool>;
    let mut gens: Vec<Vec<(i32, Elt)>> = vec![Vec::new(); max_f + 1];
    let mut ext = vec![vec![0usize; (max_t - lo + 1) as usize]; max_f + 1];

    // basis of stage f (f >= 0) in degree t, or module cells for f = -1
    let stage_basis = |gens: &Vec<Vec<(i32, Elt)>>, f: isize, t: i32| -> Vec<(usize, Seq)> {
        if f < 0 {
            return m.degs.iter().enumerate().filter(|(_, &d)| d == t).map(|(i, _)| (i, Vec::new())).collect();
        }
        let mut out = Vec::new();
        for (g, (d, _)) in gens[f as usize].iter().enumerate() {
            if t >= *d {
                for r in basis((t - d) as u32) {
                    out.push((g, r));
                }
            }
        }
        out
    };
    // d of basis element (g, r) of stage f
    let image = |gens: &Vec<Vec<(i32, Elt)>>, f: usize, g: usize, r: &Seq| -> Elt {
        let mut out: Elt = HashMap::new();
        for ((h, s), on) in &gens[f][g].1 {
            if !on {
                continue;
            }
            if f == 0 {
                for c in m.apply(r, *h) {
                    *out.entry((c, Vec::new())).or_insert(false) ^= true;
                }
            } else {
                for t in product(r, s) {
                    *out.entry((*h, t)).or_insert(false) ^= true;
                }
            }
        }
        out
    };

    for t in lo..=max_t {
        for f in 0..=max_f {
            if f == 0 {
                // generators covering M in degree t modulo the image
                let src = stage_basis(&gens, 0, t);
                let tgt = stage_basis(&gens, -1, t);
                let mut rows = Vec::new();
                for (g, r) in &src {
                    let e = image(&gens, 0, *g, r);
                    insert(&mut rows, tgt.iter().map(|k| e.get(k).copied().unwrap_or(false)).collect());
                }
                for i in 0..tgt.len() {
                    let mut e = vec![false; tgt.len()];
                    e[i] = true;
                    if insert(&mut rows, e) {
                        let mut el: Elt = HashMap::new();
                        el.insert(tgt[i].clone(), true);
                        gens[0].push((t, el));
                        ext[0][(t - lo) as usize] += 1;
                    }
                }
            }
            let src = stage_basis(&gens, f as isize, t);
            let tgt = stage_basis(&gens, f as isize - 1, t);
            let tidx: HashMap<(usize, Seq), usize> = tgt.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
            let to_vec = |e: &Elt| -> Vector {
                let mut v = vec![false; tgt.len()];
                for (k, on) in e {
                    if *on {
                        v[tidx[k]] ^= true;
                    }
                }
                v
            };
            // kernel of d_f in degree t, by elimination with history
            let n = src.len();
            let mut rows: Vec<(usize, Vector)> = Vec::new();
            let mut hist: Vec<Vector> = Vec::new();
            let mut kernel = Vec::new();
            for (k, (g, r)) in src.iter().enumerate() {
                let mut v = to_vec(&image(&gens, f, *g, r));
                let mut h = vec![false; n];
                h[k] = true;
                for (idx, (p, row)) in rows.iter().enumerate() {
                    if v[*p] {
                        for (a, b) in v.iter_mut().zip(row) {
                            *a ^= b;
                        }
                        for (a, b) in h.iter_mut().zip(&hist[idx]) {
                            *a ^= b;
                        }
                    }
                }
                match v.iter().position(|&b| b) {
                    Some(p) => {
                        rows.push((p, v));
                        hist.push(h);
                    }
                    None => kernel.push(h),
                }
            }
            if f + 1 > max_f {
                continue;
            }
            // image of existing stage-(f+1) generators in degree t
            let next = stage_basis(&gens, f as isize + 1, t);
            let sidx: HashMap<(usize, Seq), usize> = src.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
            let mut rows = Vec::new();
            for (g, r) in &next {
                let e = image(&gens, f + 1, *g, r);
                let mut v = vec![false; src.len()];
                for (k, on) in e {
                    if on {
                        v[sidx[&k]] ^= true;
                    }
                }
                insert(&mut rows, v);
            }
            for k in kernel {
                if insert(&mut rows, k.clone()) {
                    let mut el: Elt = HashMap::new();
                    for (i, b) in k.iter().enumerate() {
                        if *b {
                            el.insert(src[i].clone(), true);
                        }
                    }
                    gens[f + 1].push((t, el));
                    ext[f + 1][(t - lo) as usize] += 1;
                }
            }
        }
    }
    (lo, ext)
}

/// `dim Ext^{s,f}` from [`ext_dims`].
pub fn dim(table: &(i32, Vec<Vec<usize>>), s: i32, f: usize) -> usize {
    let t = s + f as i32;
    let (lo, ext) = table;
    ext.get(f).and_then(|row| row.get((t - lo) as usize)).copied().unwrap_or(0)
}
