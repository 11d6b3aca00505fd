//! Pieces shared by the OS and SS evaluators.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::partial_fractions::{j1_exact_scaled, GammaCache, Pole, PoleStructure, Tally};
use crate::real::{Arith, Real};
use crate::special::{binomial_in, factorial_in};

/// `Γ(M_E + n) / Γ(M_E)`.
pub(crate) fn rising<A: Arith>(ar: &A, m_e: u32, n: u32) -> A::R {
    (0..n).fold(ar.one(), |acc, i| acc * &ar.int((m_e + i) as i64))
}

/// Grouped `k`-th power of `Σ_{m<M_D} Σ_{n≤m} g(n) / (n! (m-n)!)`, keyed by
/// `[m̂, n̂]`.
pub(crate) fn mn_table<A: Arith>(ar: &A, m_d: u32, k: u32, g: impl Fn(u32) -> A::R) -> BTreeMap<[u32; 2], A::R> {
    let mut base = Vec::new();
    for m in 0..m_d {
        for n in 0..=m {
            let w = g(n) / (factorial_in(ar, n) * factorial_in(ar, m - n));
            base.push(([m, n], w));
        }
    }
    crate::index::aggregate_power(ar, &base, k)
}

/// Grouped `k`-th power of `Σ_{m<M_D} g(m) / m!`, indexed by `m̂`.
pub(crate) fn m_table<A: Arith>(ar: &A, m_d: u32, k: u32, g: impl Fn(u32) -> A::R) -> Vec<A::R> {
    let base: Vec<([u32; 1], A::R)> = (0..m_d).map(|m| ([m], g(m) / factorial_in(ar, m))).collect();
    let map = crate::index::aggregate_power(ar, &base, k);
    let top = k * (m_d - 1);
    let mut out: Vec<A::R> = (0..=top).map(|_| ar.zero()).collect();
    for ([m], w) in map {
        out[m as usize] = w;
    }
    out
}

/// `e^{a} ∫_1^∞ Σ w(m̂,n̂) (x-1)^{m̂-n̂} x^{n̂-1} e^{-a x} / (x+c)^{p0+n̂} dx`
/// with `a = l̃/λ_D` and `c = λ_D/(l λ_E)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn single_pole_family<A: Arith>(
    ar: &A,
    table: &BTreeMap<[u32; 2], A::R>,
    p0: u32,
    l_tilde: u32,
    l: u32,
    lambda: (f64, f64),
    cache: &mut GammaCache<A::R>,
    tally: &mut Tally,
    outer_log2: f64,
) -> A::R {
    let (lambda_d, lambda_e) = lambda;
    let c = ar.num(lambda_d) / (ar.int(l as i64) * ar.num(lambda_e));
    let shift = ar.one() + &c;
    let ratio = c.clone() / &shift;
    let mut sum = ar.zero();
    for (&[m_hat, n_hat], w) in table {
        let d = m_hat - n_hat;
        let p = p0 + n_hat;
        for u in 0..=d {
            let mut coef = w.clone() * &binomial_in(ar, d, u);
            if (d - u) % 2 == 1 {
                coef = -coef;
            }
            tally.offset = outer_log2 + coef.log2_abs();
            let e = n_hat + u;
            let inner = if e == 0 {
                // 1/(x (x+c)^p) = c^{-p}/x - Σ_t c^{-(p-t+1)}/(x+c)^t
                let h0 = cache.ladder(ar, l_tilde, 0, 0, 0).h(0).clone();
                let ladder = cache.ladder(ar, l_tilde, l, 1 - p as i32, 0);
                let inv_cp = c.powi(-(p as i32));
                let mut acc = inv_cp.clone() * &h0;
                tally.note(&acc);
                let mut rt = inv_cp;
                for t in 1..=p {
                    let v = rt.clone() * ladder.h(1 - t as i32);
                    tally.note(&v);
                    acc = acc - v;
                    rt = rt * &ratio;
                }
                acc
            } else {
                let s = PoleStructure {
                    lambda_d,
                    lambda_e,
                    poles: vec![Pole {
                        l,
                        multiplicity: p,
                        members: vec![0],
                    }],
                    has_origin_pole: false,
                    numerator_power: e - 1,
                };
                j1_exact_scaled(ar, &s, None, l_tilde, cache, tally)
            };
            sum = sum + coef * &inner;
        }
    }
    tally.offset = 0.0;
    sum
}

/// `∫_1^∞ Σ_{m̂} w(m̂) c^{p0} x^{m̂-1} / (x+c)^{p0+m̂} dx` (`shifted`) or
/// its large-`c` limit, both in terms of `q = c / (1 + c)` (or `q = 1`).
pub(crate) fn ratio_family<A: Arith>(
    ar: &A,
    weights: &[A::R],
    p0: u32,
    c: &A::R,
    shifted: bool,
    tally: &mut Tally,
    outer_log2: f64,
) -> A::R {
    let base = if shifted { ar.one() + c } else { c.clone() };
    let q = c.clone() / &base;
    tally.offset = outer_log2 + weights[0].log2_abs();
    let mut i0 = ar.ln(&base);
    tally.note(&i0);
    let mut qi = ar.one();
    for i in 1..p0 {
        qi = qi * &q;
        let v = qi.clone() / ar.int(i as i64);
        tally.note(&v);
        i0 = i0 - v;
    }
    let mut sum = weights[0].clone() * &i0;
    for (m_hat, w) in weights.iter().enumerate().skip(1) {
        let m_hat = m_hat as u32;
        if w.is_zero() {
            continue;
        }
        tally.offset = outer_log2 + w.log2_abs();
        let r = m_hat - 1;
        let mut inner = ar.zero();
        for j in 0..=r {
            let e = p0 + r - j;
            let mut v = binomial_in(ar, r, j) * &q.powi(e as i32) / ar.int(e as i64);
            if (r - j) % 2 == 1 {
                v = -v;
            }
            tally.note(&v);
            inner = inner + v;
        }
        sum = sum + w.clone() * &inner;
    }
    tally.offset = 0.0;
    sum
}

/// Nondecreasing index sequences of length `k` over `0..n`.
pub(crate) struct Multisets {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Multisets {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Multisets {
            n,
            cur: vec![0; k],
            done: n == 0,
        }
    }

    pub(crate) fn count(n: usize, k: usize) -> f64 {
        // C(n + k - 1, k)
        let mut c = 1.0;
        for i in 0..k {
            c = c * (n + i) as f64 / (i + 1) as f64;
        }
        c
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] + 1 < self.n {
                let v = self.cur[i] + 1;
                for x in &mut self.cur[i..] {
                    *x = v;
                }
                break;
            }
        }
        Some(out)
    }
}

/// `k! / Π count!` for a sorted multiset.
pub(crate) fn multinomial<A: Arith>(ar: &A, ms: &[usize]) -> A::R {
    let mut v = factorial_in(ar, ms.len() as u32);
    let mut run = 1;
    for i in 1..=ms.len() {
        if i < ms.len() && ms[i] == ms[i - 1] {
            run += 1;
        } else {
            v = v / factorial_in(ar, run);
            run = 1;
        }
    }
    v
}
