//! The motivic Steenrod algebra over ℂ in the Milnor basis.
//!
//! The dual algebra is `M2[τ0, τ1, …, ξ1, ξ2, …]/(τi² = τ ξ_{i+1})` with
//! `|τi| = (2^{i+1}-1, 2^i-1)` and `|ξj| = (2(2^j-1), 2^j-1)`. The basis
//! element `P^S` is dual to `τ(E)ξ(R)` where `s_i = ε_{i-1} + 2 r_i`.
//!
//! Products are homogeneous, so the τ-power on each term of a product is
//! fixed by weights and only the parity of the coefficient has to be found.
//! [`multiply_indices`] does this with a Milnor-matrix enumeration; the
//! slower [`multiply_by_pairing`] evaluates the coproduct directly and is
//! kept as an independent route.

use crate::f2::{BitVec, Echelon, Insert};
use dashmap::DashMap;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MilnorError {
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("element is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("degree {degree} is above the algebra's bound {max}")]
    OutOfRange { degree: u32, max: u32 },
}

/// A Milnor basis index `S = (s1, s2, …)` without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MilnorIndex(Vec<u32>);

impl MilnorIndex {
    pub fn new(mut seq: Vec<u32>) -> Self {
        while seq.last() == Some(&0) {
            seq.pop();
        }
        MilnorIndex(seq)
    }

    pub fn unit() -> Self {
        MilnorIndex(Vec::new())
    }

    pub fn seq(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().enumerate().map(|(i, &s)| s * ((1 << (i + 1)) - 1)).sum()
    }

    pub fn weight(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &s)| (s & 1) * ((1 << i) - 1) + (s >> 1) * ((1 << (i + 1)) - 1))
            .sum()
    }

    pub fn excess(&self) -> u32 {
        self.0.iter().sum()
    }

    /// The dual monomial `τ(E)ξ(R)`.
    pub fn dual(&self) -> DualMonomial {
        DualMonomial {
            eps: self.0.iter().map(|s| s & 1 == 1).collect(),
            rs: self.0.iter().map(|s| s >> 1).collect(),
            tau_power: 0,
        }
        .trimmed()
    }

    pub fn from_dual(m: &DualMonomial) -> Self {
        let n = m.eps.len().max(m.rs.len());
        MilnorIndex::new((0..n).map(|i| m.eps.get(i).map_or(0, |&e| e as u32) + 2 * m.rs.get(i).copied().unwrap_or(0)).collect())
    }
}

impl Ord for MilnorIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), self.weight(), &self.0).cmp(&(other.degree(), other.weight(), &other.0))
    }
}

impl PartialOrd for MilnorIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MilnorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MilnorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Which sub-Hopf-algebra of A is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Profile {
    Full,
    /// Generated by Sq¹ and Sq²: `s1 ≤ 3`, `s2 ≤ 1`.
    A1,
    /// Exterior on Sq¹.
    A0,
}

impl Profile {
    pub fn contains(self, s: &MilnorIndex) -> bool {
        match self {
            Profile::Full => true,
            Profile::A1 => s.seq().len() <= 2 && s.get(0) <= 3 && s.get(1) <= 1,
            Profile::A0 => s.seq().len() <= 1 && s.get(0) <= 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Full => "A",
            Profile::A1 => "A1",
            Profile::A0 => "A0",
        }
    }

    /// Exponents `k` such that `Sq^{2^k}` (with `k = 0` meaning Sq¹) lies in
    /// the profile, up to degree `max`.
    pub fn generators(self, max: u32) -> Vec<u32> {
        let top = match self {
            Profile::Full => 31,
            Profile::A1 => 1,
            Profile::A0 => 0,
        };
        (0..=top).take_while(|&k| (1u32 << k) <= max.max(1)).collect()
    }
}

/// A monomial `τ^c τ(E) ξ(R)` of the dual algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DualMonomial {
    pub eps: Vec<bool>,
    /// `rs[j-1]` is the exponent of `ξ_j`.
    pub rs: Vec<u32>,
    pub tau_power: u32,
}

impl DualMonomial {
    fn trimmed(mut self) -> Self {
        while self.eps.last() == Some(&false) {
            self.eps.pop();
        }
        while self.rs.last() == Some(&0) {
            self.rs.pop();
        }
        self
    }

    pub fn one() -> Self {
        DualMonomial::default()
    }

    pub fn tau_i(i: usize) -> Self {
        let mut eps = vec![false; i + 1];
        eps[i] = true;
        DualMonomial { eps, rs: vec![], tau_power: 0 }
    }

    pub fn xi_pow(j: usize, e: u32) -> Self {
        if j == 0 || e == 0 {
            return Self::one();
        }
        let mut rs = vec![0; j];
        rs[j - 1] = e;
        DualMonomial { eps: vec![], rs, tau_power: 0 }
    }

    /// `(degree, weight)` including the τ-power (τ has bidegree (0,1)).
    pub fn bidegree(&self) -> (u32, u32) {
        let mut d = 0;
        let mut w = self.tau_power;
        for (i, &e) in self.eps.iter().enumerate() {
            if e {
                d += (1 << (i + 1)) - 1;
                w += (1 << i) - 1;
            }
        }
        for (j0, &r) in self.rs.iter().enumerate() {
            let j = j0 + 1;
            d += r * 2 * ((1 << j) - 1);
            w += r * ((1 << j) - 1);
        }
        (d, w)
    }

    /// Product of two reduced monomials, reduced again.
    pub fn mul(&self, other: &DualMonomial) -> DualMonomial {
        let n = self.eps.len().max(other.eps.len());
        let tau_exps: Vec<u32> = (0..n)
            .map(|i| self.eps.get(i).map_or(0, |&e| e as u32) + other.eps.get(i).map_or(0, |&e| e as u32))
            .collect();
        let m = self.rs.len().max(other.rs.len());
        let rs = (0..m).map(|j| self.rs.get(j).copied().unwrap_or(0) + other.rs.get(j).copied().unwrap_or(0)).collect();
        reduce(&tau_exps, rs, self.tau_power + other.tau_power)
    }
}

/// Applies `τi² = τ ξ_{i+1}` until every exterior exponent is at most one.
pub fn reduce(tau_exps: &[u32], rs: Vec<u32>, tau_power: u32) -> DualMonomial {
    let mut rs = rs;
    let mut tau_power = tau_power;
    let mut eps = Vec::with_capacity(tau_exps.len());
    for (i, &e) in tau_exps.iter().enumerate() {
        let pairs = e / 2;
        if pairs > 0 {
            // τ_i^2 = τ ξ_{i+1}; ξ_{i+1} lives at rs[i]
            if rs.len() <= i {
                rs.resize(i + 1, 0);
            }
            rs[i] += pairs;
            tau_power += pairs;
        }
        eps.push(e % 2 == 1);
    }
    DualMonomial { eps, rs, tau_power }.trimmed()
}

/// A sum of tensors `a ⊗ b` with F2 coefficients. The τ-power of each term is
/// collected into the left factor.
pub type Tensor = HashMap<(DualMonomial, DualMonomial), ()>;

fn tensor_add(t: &mut Tensor, a: DualMonomial, b: DualMonomial) {
    let mut a = a;
    a.tau_power += b.tau_power;
    let b = DualMonomial { tau_power: 0, ..b };
    if t.remove(&(a.clone(), b.clone())).is_none() {
        t.insert((a, b), ());
    }
}

fn tensor_mul(x: &Tensor, y: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for (a, b) in x.keys() {
        for (c, d) in y.keys() {
            tensor_add(&mut out, a.mul(c), b.mul(d));
        }
    }
    out
}

fn xi_power_2i(j: usize, i: usize) -> DualMonomial {
    DualMonomial::xi_pow(j, 1 << i)
}

/// `Δ(m)` as a sum of tensors, computed multiplicatively from the
/// coproduct on generators.
pub fn coproduct(m: &DualMonomial) -> Tensor {
    let mut acc = Tensor::new();
    tensor_add(&mut acc, DualMonomial { tau_power: m.tau_power, ..DualMonomial::one() }, DualMonomial::one());
    for (k, &e) in m.eps.iter().enumerate() {
        if !e {
            continue;
        }
        let mut d = Tensor::new();
        tensor_add(&mut d, DualMonomial::tau_i(k), DualMonomial::one());
        for i in 0..=k {
            tensor_add(&mut d, xi_power_2i(k - i, i), DualMonomial::tau_i(i));
        }
        acc = tensor_mul(&acc, &d);
    }
    for (k0, &r) in m.rs.iter().enumerate() {
        let k = k0 + 1;
        if r == 0 {
            continue;
        }
        let mut d = Tensor::new();
        for i in 0..=k {
            tensor_add(&mut d, xi_power_2i(k - i, i), DualMonomial::xi_pow(i, 1));
        }
        for _ in 0..r {
            acc = tensor_mul(&acc, &d);
        }
    }
    acc
}

/// All Milnor indices of degree `d` in the profile, in basis order.
pub fn basis_of_degree(d: u32, profile: Profile) -> Vec<MilnorIndex> {
    // choose s_{i+1} from the top slot down; s_1 takes what remains
    fn rec(rem: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<MilnorIndex>) {
        if i == 0 {
            let mut seq = vec![rem];
            seq.extend(cur.iter().rev());
            out.push(MilnorIndex::new(seq));
            return;
        }
        let w = (1u32 << (i + 1)) - 1;
        for s in 0..=rem / w {
            cur.push(s);
            rec(rem - s * w, i - 1, cur, out);
            cur.pop();
        }
    }
    let mut top = 0;
    while (1u32 << (top + 2)) - 1 <= d {
        top += 1;
    }
    let mut out = Vec::new();
    rec(d, top, &mut Vec::new(), &mut out);
    out.retain(|s| profile.contains(s));
    out.sort();
    out
}

/// All indices of degree at most `max_degree`.
pub fn basis(max_degree: u32, profile: Profile) -> Vec<MilnorIndex> {
    (0..=max_degree).flat_map(|d| basis_of_degree(d, profile)).collect()
}

fn split(s: &MilnorIndex) -> (Vec<bool>, Vec<u32>) {
    (s.seq().iter().map(|x| x & 1 == 1).collect(), s.seq().iter().map(|x| x >> 1).collect())
}

/// `P^A · P^B` as the set of indices with odd coefficient.
pub fn multiply_indices(a: &MilnorIndex, b: &MilnorIndex) -> Vec<MilnorIndex> {
    let mut acc: HashMap<MilnorIndex, bool> = HashMap::new();
    multiply_into(a, b, &mut |c| {
        let e = acc.entry(c).or_insert(false);
        *e = !*e;
    });
    let mut out: Vec<MilnorIndex> = acc.into_iter().filter(|(_, v)| *v).map(|(k, _)| k).collect();
    out.sort();
    out
}

fn multiply_into(a: &MilnorIndex, b: &MilnorIndex, emit: &mut dyn FnMut(MilnorIndex)) {
    let (ea, ra) = split(a);
    let (eb, rb) = split(b);
    // index k of eps is τ_k; index i of ra/rb is ξ_{i+1}
    let nk = ea.len().max(ra.len()) + eb.len().max(rb.len()) + 1;
    let eps_a = |k: usize| ea.get(k).copied().unwrap_or(false);
    let eps_b = |k: usize| eb.get(k).copied().unwrap_or(false);

    // left ξ budget indexed by ξ_i at slot i (slot 0 unused)
    let mut left: Vec<i64> = vec![0; nk + 2];
    for (i, &r) in ra.iter().enumerate() {
        left[i + 1] = r as i64;
    }
    // assignment[k]: None absent, Some(usize::MAX) left, Some(j) to right τ_j
    let mut assign: Vec<Option<usize>> = vec![None; nk];
    let mut n_right: Vec<u32> = vec![0; nk + 1];

    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        nk: usize,
        eps_a: &dyn Fn(usize) -> bool,
        eps_b: &dyn Fn(usize) -> bool,
        rb: &[u32],
        left: &mut Vec<i64>,
        assign: &mut Vec<Option<usize>>,
        n_right: &mut Vec<u32>,
        emit: &mut dyn FnMut(MilnorIndex),
    ) {
        if k == nk {
            // right side parity and squares
            let mut right: Vec<i64> = vec![0; nk + 2];
            for (j, &r) in rb.iter().enumerate() {
                right[j + 1] = r as i64;
            }
            for j in 0..nk {
                if (n_right[j] % 2 == 1) != eps_b(j) {
                    return;
                }
                right[j + 1] -= (n_right[j] / 2) as i64;
                if right[j + 1] < 0 {
                    return;
                }
            }
            let eps_c: Vec<bool> = (0..nk).map(|k| assign[k].is_some()).collect();
            matrices(left, &right, &eps_c, emit);
            return;
        }
        if eps_a(k) {
            assign[k] = Some(usize::MAX);
            go(k + 1, nk, eps_a, eps_b, rb, left, assign, n_right, emit);
            assign[k] = None;
            return;
        }
        go(k + 1, nk, eps_a, eps_b, rb, left, assign, n_right, emit);
        for j in 0..=k {
            let i = k - j;
            if i >= 1 {
                let need = 1i64 << j;
                if left[i] < need {
                    continue;
                }
                left[i] -= need;
            }
            assign[k] = Some(j);
            n_right[j] += 1;
            go(k + 1, nk, eps_a, eps_b, rb, left, assign, n_right, emit);
            n_right[j] -= 1;
            assign[k] = None;
            if i >= 1 {
                left[i] += 1i64 << j;
            }
        }
    }

    go(0, nk, &eps_a, &eps_b, &rb, &mut left, &mut assign, &mut n_right, emit);
}

/// Enumerates Milnor matrices for the residual ξ exponents and emits the
/// resulting indices with odd multinomial coefficient.
fn matrices(left: &[i64], right: &[i64], eps_c: &[bool], emit: &mut dyn FnMut(MilnorIndex)) {
    let rows = left.iter().rposition(|&x| x > 0).unwrap_or(0);
    let cols = right.iter().rposition(|&x| x > 0).unwrap_or(0);
    // x[i][j] for 1<=i<=rows, 1<=j<=cols
    let mut x = vec![vec![0i64; cols + 1]; rows + 1];
    let mut row_rem: Vec<i64> = left[..=rows].to_vec();
    let mut col_rem: Vec<i64> = right[..=cols].to_vec();

    #[allow(clippy::too_many_arguments)]
    fn fill(
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
        x: &mut Vec<Vec<i64>>,
        row_rem: &mut Vec<i64>,
        col_rem: &mut Vec<i64>,
        eps_c: &[bool],
        emit: &mut dyn FnMut(MilnorIndex),
    ) {
        if i > rows {
            finish(rows, cols, x, row_rem, col_rem, eps_c, emit);
            return;
        }
        if j > cols {
            fill(i + 1, 1, rows, cols, x, row_rem, col_rem, eps_c, emit);
            return;
        }
        let w = 1i64 << j;
        let max = (row_rem[i] / w).min(col_rem[j]);
        for v in 0..=max {
            x[i][j] = v;
            row_rem[i] -= v * w;
            col_rem[j] -= v;
            fill(i, j + 1, rows, cols, x, row_rem, col_rem, eps_c, emit);
            row_rem[i] += v * w;
            col_rem[j] += v;
        }
        x[i][j] = 0;
    }

    fn finish(
        rows: usize,
        cols: usize,
        x: &[Vec<i64>],
        row_rem: &[i64],
        col_rem: &[i64],
        eps_c: &[bool],
        emit: &mut dyn FnMut(MilnorIndex),
    ) {
        let at = |i: usize, j: usize| -> i64 {
            if i == 0 && j == 0 {
                0
            } else if i == 0 {
                if j <= cols { col_rem[j] } else { 0 }
            } else if j == 0 {
                if i <= rows { row_rem[i] } else { 0 }
            } else if i <= rows && j <= cols {
                x[i][j]
            } else {
                0
            }
        };
        let n = (rows + cols).max(eps_c.len());
        let mut r_c = vec![0u32; n + 1];
        for (k, rc) in r_c.iter_mut().enumerate().skip(1) {
            let mut bits = 0i64;
            let mut sum = 0i64;
            for i in 0..=k {
                let v = at(i, k - i);
                if bits & v != 0 {
                    return;
                }
                bits |= v;
                sum += v;
            }
            *rc = sum as u32;
        }
        let len = n.max(eps_c.len());
        let seq: Vec<u32> = (1..=len)
            .map(|k| eps_c.get(k - 1).map_or(0, |&e| e as u32) + 2 * r_c.get(k).copied().unwrap_or(0))
            .collect();
        emit(MilnorIndex::new(seq));
    }

    fill(1, 1, rows, cols, &mut x, &mut row_rem, &mut col_rem, eps_c, emit);
}

/// Coefficient parity of every `P^C` in `P^A · P^B`, computed by pairing
/// `P^A ⊗ P^B` against `Δ` of each dual basis monomial. Slow; used to
/// cross-check [`multiply_indices`].
pub fn multiply_by_pairing(a: &MilnorIndex, b: &MilnorIndex) -> Vec<MilnorIndex> {
    let d = a.degree() + b.degree();
    let ma = a.dual();
    let mb = b.dual();
    let mut out = Vec::new();
    for c in basis_of_degree(d, Profile::Full) {
        let delta = coproduct(&c.dual());
        let hit = delta.keys().any(|(x, y)| {
            x.eps == ma.eps && x.rs == ma.rs && y.eps == mb.eps && y.rs == mb.rs
        });
        if hit {
            out.push(c);
        }
    }
    out.sort();
    out
}

/// `(Π C(r_i + s_i, r_i) mod 2, R + S)`: the top-excess part of `P^R · P^S`.
pub fn leading_term(r: &MilnorIndex, s: &MilnorIndex) -> (bool, MilnorIndex) {
    let n = r.seq().len().max(s.seq().len());
    let coeff = (0..n).all(|i| binomial_mod2(r.get(i) + s.get(i), r.get(i)));
    let sum = MilnorIndex::new((0..n).map(|i| r.get(i) + s.get(i)).collect());
    (coeff, sum)
}

/// `C(n, k) mod 2` by Lucas' theorem.
pub fn binomial_mod2(n: u32, k: u32) -> bool {
    k <= n && (n & k) == k
}

/// A homogeneous element `Σ τ^c P^S`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MilnorElement {
    terms: BTreeMap<MilnorIndex, u32>,
}

impl MilnorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(s: MilnorIndex) -> Self {
        Self::monomial(0, s)
    }

    pub fn monomial(tau: u32, s: MilnorIndex) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, tau);
        MilnorElement { terms }
    }

    /// Builds an element from terms, cancelling repeats mod 2.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, MilnorIndex)>) -> Result<Self, MilnorError> {
        let mut map: BTreeMap<MilnorIndex, u32> = BTreeMap::new();
        for (c, s) in terms {
            if map.remove(&s).is_none() {
                map.insert(s, c);
            }
        }
        let e = MilnorElement { terms: map };
        e.bidegree()?;
        Ok(e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MilnorIndex, u32)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    /// `(degree, weight)`, or `None` for zero.
    pub fn bidegree(&self) -> Result<Option<(u32, u32)>, MilnorError> {
        let mut out = None;
        for (s, &c) in &self.terms {
            let bd = (s.degree(), s.weight() + c);
            match out {
                None => out = Some(bd),
                Some(o) if o != bd => return Err(MilnorError::Inhomogeneous(self.to_string())),
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn excess(&self) -> u32 {
        self.terms.keys().map(|s| s.excess()).max().unwrap_or(0)
    }

    pub fn tau_times(&self, k: u32) -> Self {
        MilnorElement { terms: self.terms.iter().map(|(s, c)| (s.clone(), c + k)).collect() }
    }

    pub fn add(&self, other: &MilnorElement) -> Result<Self, MilnorError> {
        Self::from_terms(self.terms().chain(other.terms()).map(|(s, c)| (c, s.clone())))
    }

    /// Product; τ-powers are recovered from weights.
    pub fn mul(&self, other: &MilnorElement) -> MilnorElement {
        let mut acc: BTreeMap<MilnorIndex, u32> = BTreeMap::new();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let w = a.weight() + b.weight() + ca + cb;
                for c in multiply_indices(a, b) {
                    let tau = w - c.weight();
                    if acc.remove(&c).is_none() {
                        acc.insert(c, tau);
                    }
                }
            }
        }
        MilnorElement { terms: acc }
    }

    pub fn parse(input: &str) -> Result<Self, MilnorError> {
        let err = |reason: &str| MilnorError::Parse { input: input.to_string(), reason: reason.to_string() };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Self::zero());
        }
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let mut terms = Vec::new();
        for part in s.split('+') {
            let (tau, rest) = if let Some(r) = part.strip_prefix("t^") {
                let star = r.find('*').ok_or_else(|| err("expected `*` after τ-power"))?;
                let c: u32 = r[..star].parse().map_err(|_| err("bad τ exponent"))?;
                (c, &r[star + 1..])
            } else if let Some(r) = part.strip_prefix("t*") {
                (1, r)
            } else {
                (0, part)
            };
            let inner = rest
                .strip_prefix("P(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| err("expected P(...)"))?;
            let seq: Vec<u32> = if inner.is_empty() {
                vec![]
            } else {
                inner.split(',').map(|x| x.parse::<u32>()).collect::<Result<_, _>>().map_err(|_| err("bad index entry"))?
            };
            terms.push((tau, MilnorIndex::new(seq)));
        }
        Self::from_terms(terms)
    }
}

impl fmt::Display for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match c {
                0 => {}
                1 => write!(f, "t*")?,
                c => write!(f, "t^{c}*")?,
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Cached multiplication table over a finite degree range.
///
/// Basis elements get dense ids ordered by degree, then basis order. Products
/// are stored as sorted id lists with implicit τ-powers.
pub struct MilnorAlgebra {
    profile: Profile,
    max_degree: u32,
    offsets: Vec<usize>,
    elements: Vec<MilnorIndex>,
    weights: Vec<i32>,
    ids: HashMap<MilnorIndex, u32>,
    products: DashMap<(u32, u32), Arc<[u32]>>,
    decompositions: DashMap<u32, Arc<Vec<(u32, Vec<u32>)>>>,
}

impl fmt::Debug for MilnorAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MilnorAlgebra").field("profile", &self.profile).field("max_degree", &self.max_degree).finish()
    }
}

impl MilnorAlgebra {
    pub fn new(profile: Profile, max_degree: u32) -> Self {
        let mut offsets = Vec::with_capacity(max_degree as usize + 2);
        let mut elements = Vec::new();
        for d in 0..=max_degree {
            offsets.push(elements.len());
            elements.extend(basis_of_degree(d, profile));
        }
        offsets.push(elements.len());
        let weights = elements.iter().map(|s| s.weight() as i32).collect();
        let ids = elements.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        MilnorAlgebra {
            profile,
            max_degree,
            offsets,
            elements,
            weights,
            ids,
            products: DashMap::new(),
            decompositions: DashMap::new(),
        }
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn dim(&self, degree: u32) -> usize {
        if degree > self.max_degree {
            return 0;
        }
        self.offsets[degree as usize + 1] - self.offsets[degree as usize]
    }

    /// Id of the first basis element of the given degree.
    pub fn offset(&self, degree: u32) -> usize {
        self.offsets[degree as usize]
    }

    pub fn element(&self, id: u32) -> &MilnorIndex {
        &self.elements[id as usize]
    }

    pub fn weight(&self, id: u32) -> i32 {
        self.weights[id as usize]
    }

    pub fn degree(&self, id: u32) -> u32 {
        self.elements[id as usize].degree()
    }

    pub fn id(&self, s: &MilnorIndex) -> Option<u32> {
        self.ids.get(s).copied()
    }

    /// Position of `id` within its degree.
    pub fn local(&self, id: u32) -> usize {
        id as usize - self.offsets[self.degree(id) as usize]
    }

    pub fn basis_in_degree(&self, degree: u32) -> &[MilnorIndex] {
        if degree > self.max_degree {
            return &[];
        }
        &self.elements[self.offsets[degree as usize]..self.offsets[degree as usize + 1]]
    }

    /// `P^a · P^b` as ids with odd coefficient.
    pub fn product(&self, a: u32, b: u32) -> Arc<[u32]> {
        if let Some(p) = self.products.get(&(a, b)) {
            return p.clone();
        }
        let d = self.degree(a) + self.degree(b);
        assert!(d <= self.max_degree, "product degree {d} above bound {}", self.max_degree);
        let mut ids: Vec<u32> = multiply_indices(self.element(a), self.element(b))
            .into_iter()
            .map(|c| {
                self.id(&c).unwrap_or_else(|| panic!("{c} is not in the {} profile", self.profile.name()))
            })
            .collect();
        ids.sort_unstable();
        let p: Arc<[u32]> = ids.into();
        self.products.insert((a, b), p.clone());
        p
    }

    /// Generic product of elements, checked against the degree bound.
    pub fn multiply(&self, a: &MilnorElement, b: &MilnorElement) -> Result<MilnorElement, MilnorError> {
        if let (Some((da, _)), Some((db, _))) = (a.bidegree()?, b.bidegree()?) {
            if da + db > self.max_degree {
                return Err(MilnorError::OutOfRange { degree: da + db, max: self.max_degree });
            }
        }
        Ok(a.mul(b))
    }

    /// The id of `Sq^{2^k}` (`k = 0` is Sq¹).
    pub fn sq_id(&self, k: u32) -> u32 {
        self.id(&MilnorIndex::new(vec![1 << k])).expect("generator in range")
    }

    /// Writes `P^id` as `Σ_k Sq^{2^k} · θ_k` with each `θ_k` a sum of basis
    /// elements (τ-powers implicit). Degree-zero elements have no
    /// decomposition.
    pub fn generator_decomposition(&self, id: u32) -> Arc<Vec<(u32, Vec<u32>)>> {
        if let Some(d) = self.decompositions.get(&id) {
            return d.clone();
        }
        let d = self.degree(id);
        assert!(d > 0, "the unit is not decomposable");
        let target_dim = self.dim(d);
        let base = self.offset(d);
        let mut cols: Vec<(i32, u32, u32, BitVec)> = Vec::new();
        for k in self.profile.generators(d) {
            let g = 1u32 << k;
            if g > d {
                continue;
            }
            let sq = self.sq_id(k);
            for t in self.offset(d - g)..self.offset(d - g) + self.dim(d - g) {
                let t = t as u32;
                let prod = self.product(sq, t);
                let v = BitVec::from_ones(target_dim, prod.iter().map(|&c| c as usize - base));
                cols.push((self.weight(sq) + self.weight(t), k, t, v));
            }
        }
        cols.sort_by_key(|c| c.0);
        let mut e = Echelon::with_history(target_dim, cols.len());
        for c in &cols {
            e.insert(c.3.clone());
        }
        let sol = e
            .solve(&BitVec::unit(target_dim, id as usize - base))
            .unwrap_or_else(|| panic!("{} is not generated by the Sq^(2^k)", self.element(id)));
        let mut by_k: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for i in sol.iter_ones() {
            debug_assert!(cols[i].0 <= self.weight(id));
            by_k.entry(cols[i].1).or_default().push(cols[i].2);
        }
        let out = Arc::new(by_k.into_iter().collect::<Vec<_>>());
        self.decompositions.insert(id, out.clone());
        out
    }
}

static REGISTRY: std::sync::OnceLock<std::sync::Mutex<HashMap<Profile, Arc<MilnorAlgebra>>>> = std::sync::OnceLock::new();

/// A process-wide algebra covering at least `max_degree`. Ids agree between
/// algebras of different bounds, so values built against a smaller one stay
/// valid when the registry grows.
pub fn shared_algebra(profile: Profile, max_degree: u32) -> Arc<MilnorAlgebra> {
    let reg = REGISTRY.get_or_init(Default::default);
    let mut map = reg.lock().expect("algebra registry poisoned");
    if let Some(a) = map.get(&profile) {
        if a.max_degree() >= max_degree {
            return a.clone();
        }
    }
    let a = Arc::new(MilnorAlgebra::new(profile, max_degree));
    map.insert(profile, a.clone());
    a
}

/// Outcome of checking that `M ⊗ A(1) → A` is an isomorphism, where `M` is
/// spanned by the `P^(4s1, 2s2, s3, …)`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RightA1Report {
    pub max_degree: u32,
    /// `(degree, dim A, dim M ⊗ A(1))` per degree, as M2-ranks.
    pub dims: Vec<(u32, usize, usize)>,
    /// First `(degree, weight)` where the map fails to be bijective.
    pub first_failure: Option<(u32, i32)>,
}

impl RightA1Report {
    pub fn is_isomorphism(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn in_right_a1_complement(s: &MilnorIndex) -> bool {
    s.get(0).is_multiple_of(4) && s.get(1).is_multiple_of(2)
}

pub fn verify_right_a1_free(max_degree: u32) -> RightA1Report {
    let alg = MilnorAlgebra::new(Profile::Full, max_degree);
    let mut dims = Vec::new();
    let mut first_failure = None;
    for d in 0..=max_degree {
        let base = alg.offset(d);
        let n = alg.dim(d);
        let mut src: Vec<(i32, BitVec)> = Vec::new();
        for dm in 0..=d {
            for m in alg.basis_in_degree(dm).iter().filter(|s| in_right_a1_complement(s)) {
                for a in basis_of_degree(d - dm, Profile::A1) {
                    let mid = alg.id(m).unwrap();
                    let aid = alg.id(&a).unwrap();
                    let prod = alg.product(mid, aid);
                    let v = BitVec::from_ones(n, prod.iter().map(|&c| c as usize - base));
                    src.push((alg.weight(mid) + alg.weight(aid), v));
                }
            }
        }
        dims.push((d, n, src.len()));
        if first_failure.is_some() {
            continue;
        }
        // bijective in every weight: weight multisets agree and the columns,
        // added in weight order, are independent
        let mut sw: Vec<i32> = src.iter().map(|s| s.0).collect();
        let mut tw: Vec<i32> = (base..base + n).map(|i| alg.weight(i as u32)).collect();
        sw.sort_unstable();
        tw.sort_unstable();
        src.sort_by_key(|s| s.0);
        let mut e = Echelon::new(n);
        let mut bad = None;
        for (w, v) in src {
            if let Insert::Dependent(_) = e.insert(v) {
                bad = Some(w);
                break;
            }
        }
        if sw != tw || bad.is_some() {
            let w = bad.unwrap_or_else(|| sw.iter().zip(&tw).find(|(a, b)| a != b).map(|(a, _)| *a).unwrap_or(0));
            first_failure = Some((d, w));
        }
    }
    RightA1Report { max_degree, dims, first_failure }
}
