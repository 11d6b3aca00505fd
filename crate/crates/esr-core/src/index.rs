//! Multi-index sets behind the product-of-sums expansions.
//!
//! A power of a triple sum `Σ_m Σ_{n≤m} Σ_{u≤m-n} f(m,n,u)` expands into a
//! sum over vectors `(m, n, u)` of products. The closed forms consume such
//! expansions twice: once per destination count `l` (vectors of length `l`)
//! and once per power `k` of the transmitter CDF (a vector `l_vec` of
//! destination counts plus one `(m, n, u)` block per entry).
//!
//! Streams here enumerate those sets literally in lexicographic order.
//! [`aggregate_power`] computes the same sums grouped by their aggregate
//! indices, which is what the evaluators use.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{EsrError, Result};
use crate::real::{Arith, Real};

/// Default ceiling on the number of terms a single evaluation may touch.
pub const DEFAULT_BUDGET: f64 = 1e8;

/// All `(m, n, u)` with `m < m_d`, `n <= m`, `u <= m - n`, lexicographic.
pub fn mnu_triples(m_d: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for m in 0..m_d {
        for n in 0..=m {
            for u in 0..=(m - n) {
                out.push((m, n, u));
            }
        }
    }
    out
}

/// Number of `(m, n, u)` vectors of length `l`.
pub fn count_mnu(l: u32, m_d: u32) -> f64 {
    let per: f64 = (0..m_d as u64).map(|m| ((m + 1) * (m + 2) / 2) as f64).sum();
    libm::pow(per, l as f64)
}

/// Size of the index set for power `k`.
pub fn count_x(k: u32, l: u32, m_d: u32) -> f64 {
    let per: f64 = (1..=l).map(|li| count_mnu(li, m_d)).sum();
    libm::pow(per, k as f64)
}

/// One element `(m, n, u)` of the length-`l` sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MnuVector {
    pub m: Vec<u32>,
    pub n: Vec<u32>,
    pub u: Vec<u32>,
}

/// Odometer over `len` digits, each indexing `base` choices; last digit
/// fastest.
#[derive(Clone, Debug)]
struct Odometer {
    digits: Vec<usize>,
    base: usize,
    done: bool,
}

impl Odometer {
    fn new(len: usize, base: usize) -> Self {
        Odometer {
            digits: vec![0; len],
            base,
            done: base == 0,
        }
    }

    fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.base {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }
}

/// Stream of the length-`l` `(m, n, u)` vectors.
#[derive(Clone, Debug)]
pub struct MnuStream {
    triples: Vec<(u32, u32, u32)>,
    odo: Odometer,
}

impl MnuStream {
    /// Number of vectors the stream yields in total.
    pub fn total(&self) -> f64 {
        libm::pow(self.triples.len() as f64, self.odo.digits.len() as f64)
    }
}

impl Iterator for MnuStream {
    type Item = MnuVector;
    fn next(&mut self) -> Option<MnuVector> {
        if self.odo.done {
            return None;
        }
        let pick = |f: fn(&(u32, u32, u32)) -> u32| -> Vec<u32> {
            self.odo.digits.iter().map(|&d| f(&self.triples[d])).collect()
        };
        let item = MnuVector {
            m: pick(|t| t.0),
            n: pick(|t| t.1),
            u: pick(|t| t.2),
        };
        self.odo.advance();
        Some(item)
    }
}

/// Enumerates the `(m, n, u)` vectors of length `l` with entries below `m_d`.
pub fn enumerate_mnu(l: u32, m_d: u32) -> MnuStream {
    let triples = mnu_triples(m_d);
    let base = triples.len();
    MnuStream {
        triples,
        odo: Odometer::new(l as usize, base),
    }
}

/// One element `(l_vec, m, n, u)` of the index set for power `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexTuple {
    pub l_vec: Vec<u32>,
    pub m: Vec<Vec<u32>>,
    pub n: Vec<Vec<u32>>,
    pub u: Vec<Vec<u32>>,
}

/// Row sums and grand totals of an [`IndexTuple`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateSums {
    pub l_tilde: u32,
    pub m_tilde: u32,
    pub n_tilde: u32,
    pub u_tilde: u32,
    pub m_hat: Vec<u32>,
    pub n_hat: Vec<u32>,
    pub u_hat: Vec<u32>,
}

impl IndexTuple {
    pub fn aggregates(&self) -> AggregateSums {
        let rows = |v: &Vec<Vec<u32>>| -> Vec<u32> { v.iter().map(|r| r.iter().sum()).collect() };
        let m_hat = rows(&self.m);
        let n_hat = rows(&self.n);
        let u_hat = rows(&self.u);
        AggregateSums {
            l_tilde: self.l_vec.iter().sum(),
            m_tilde: m_hat.iter().sum(),
            n_tilde: n_hat.iter().sum(),
            u_tilde: u_hat.iter().sum(),
            m_hat,
            n_hat,
            u_hat,
        }
    }
}

/// Stream of [`IndexTuple`]s for one power `k`; the count is known up front.
#[derive(Clone, Debug)]
pub struct XStream {
    triples: Vec<(u32, u32, u32)>,
    l_odo: Odometer,
    inner: Odometer,
    count: f64,
}

impl XStream {
    /// Number of tuples the stream yields in total.
    pub fn total(&self) -> f64 {
        self.count
    }

    fn l_vec(&self) -> Vec<u32> {
        self.l_odo.digits.iter().map(|&d| d as u32 + 1).collect()
    }

    fn reset_inner(&mut self) {
        let len: u32 = self.l_vec().iter().sum();
        self.inner = Odometer::new(len as usize, self.triples.len());
    }
}

impl Iterator for XStream {
    type Item = IndexTuple;
    fn next(&mut self) -> Option<IndexTuple> {
        if self.l_odo.done {
            return None;
        }
        let l_vec = self.l_vec();
        let mut m = Vec::with_capacity(l_vec.len());
        let mut n = Vec::with_capacity(l_vec.len());
        let mut u = Vec::with_capacity(l_vec.len());
        let mut pos = 0;
        for &lq in &l_vec {
            let block = &self.inner.digits[pos..pos + lq as usize];
            m.push(block.iter().map(|&d| self.triples[d].0).collect());
            n.push(block.iter().map(|&d| self.triples[d].1).collect());
            u.push(block.iter().map(|&d| self.triples[d].2).collect());
            pos += lq as usize;
        }
        self.inner.advance();
        if self.inner.done {
            self.l_odo.advance();
            if !self.l_odo.done {
                self.reset_inner();
            }
        }
        Some(IndexTuple { l_vec, m, n, u })
    }
}

/// Enumerates the index set for power `k`, refusing sets larger than
/// `budget`.
pub fn enumerate_x(k: u32, l: u32, m_d: u32, budget: f64) -> Result<XStream> {
    let count = count_x(k, l, m_d);
    if count > budget {
        return Err(EsrError::ComplexityBudget {
            k,
            l,
            m_d,
            count,
            budget,
        });
    }
    let triples = mnu_triples(m_d);
    let mut s = XStream {
        l_odo: Odometer::new(k as usize, l as usize),
        inner: Odometer::new(0, triples.len()),
        triples,
        count,
    };
    s.reset_inner();
    Ok(s)
}

/// Evaluates both sides of `(Σ_{i≤μ} Σ_{j≤i} Σ_{v≤i-j} f(i,j,v))^ζ =
/// Σ Π_p f(i_p, j_p, v_p)`.
pub fn pos_to_sop_check(mu: u32, zeta: u32, f: &dyn Fn(u32, u32, u32) -> f64) -> (f64, f64) {
    let inner: f64 = mnu_triples(mu + 1).iter().map(|&(i, j, v)| f(i, j, v)).sum();
    let lhs = libm::pow(inner, zeta as f64);
    let rhs = enumerate_mnu(zeta, mu + 1)
        .map(|t| (0..t.m.len()).map(|p| f(t.m[p], t.n[p], t.u[p])).product::<f64>())
        .sum();
    (lhs, rhs)
}

/// Grouped `k`-th power of a weighted table.
///
/// Each base entry carries an additive key; the result maps every reachable
/// key sum to the total weight of the `k`-vectors producing it. This is the
/// literal expansion of the product of sums with terms collected by their
/// aggregate indices.
pub fn aggregate_power<A: Arith, const N: usize>(
    ar: &A,
    base: &[([u32; N], A::R)],
    k: u32,
) -> BTreeMap<[u32; N], A::R> {
    let mut acc: BTreeMap<[u32; N], A::R> = BTreeMap::new();
    acc.insert([0; N], ar.one());
    for _ in 0..k {
        let mut next: BTreeMap<[u32; N], A::R> = BTreeMap::new();
        for (key, w) in &acc {
            for (bk, bw) in base {
                let mut nk = *key;
                for i in 0..N {
                    nk[i] += bk[i];
                }
                let term = w.clone() * bw;
                match next.get_mut(&nk) {
                    Some(v) => *v = v.clone() + term,
                    None => {
                        next.insert(nk, term);
                    }
                }
            }
        }
        acc = next;
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::F64;

    #[test]
    fn mnu_counts() {
        let all: Vec<_> = enumerate_mnu(1, 1).collect();
        assert_eq!(all, vec![MnuVector { m: vec![0], n: vec![0], u: vec![0] }]);
        assert_eq!(enumerate_mnu(1, 2).count(), 4);
        assert_eq!(enumerate_mnu(2, 2).count(), 16);
        assert_eq!(count_mnu(2, 2), 16.0);
        assert_eq!(count_mnu(3, 3), 1000.0);
    }

    #[test]
    fn x_counts() {
        assert_eq!(enumerate_x(1, 1, 1, DEFAULT_BUDGET).unwrap().count(), 1);
        let s = enumerate_x(1, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.total(), 20.0);
        assert_eq!(s.count(), 20);
        assert_eq!(enumerate_x(2, 1, 2, DEFAULT_BUDGET).unwrap().count(), 16);
        assert_eq!(count_x(3, 3, 3), 1110.0 * 1110.0 * 1110.0);
    }

    #[test]
    fn budget_is_enforced() {
        match enumerate_x(3, 3, 3, DEFAULT_BUDGET) {
            Err(EsrError::ComplexityBudget { k, l, m_d, .. }) => assert_eq!((k, l, m_d), (3, 3, 3)),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn lexicographic_order() {
        let v: Vec<_> = enumerate_mnu(1, 2).map(|t| (t.m[0], t.n[0], t.u[0])).collect();
        assert_eq!(v, vec![(0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 0)]);
        let ls: Vec<_> = enumerate_x(2, 2, 1, DEFAULT_BUDGET).unwrap().map(|t| t.l_vec).collect();
        assert_eq!(ls, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn aggregates_are_row_sums() {
        let t = IndexTuple {
            l_vec: vec![2, 1],
            m: vec![vec![2, 1], vec![2]],
            n: vec![vec![1, 0], vec![0]],
            u: vec![vec![1, 1], vec![2]],
        };
        let a = t.aggregates();
        assert_eq!(a.l_tilde, 3);
        assert_eq!(a.m_hat, vec![3, 2]);
        assert_eq!(a.m_tilde, 5);
        assert_eq!(a.n_hat, vec![1, 0]);
        assert_eq!(a.u_tilde, 4);
    }

    #[test]
    fn trivial_identity() {
        let (l, r) = pos_to_sop_check(0, 3, &|_, _, _| 1.7);
        assert!((l - 1.7f64.powi(3)).abs() < 1e-14 && (r - l).abs() < 1e-14);
    }

    #[test]
    fn aggregate_power_matches_enumeration() {
        let base: Vec<([u32; 2], f64)> = mnu_triples(3)
            .into_iter()
            .map(|(m, n, u)| ([m, n + u], 1.0 / (1.0 + m as f64 + 2.0 * n as f64 + u as f64)))
            .collect();
        let table = aggregate_power(&F64, &base, 3);
        let mut brute: BTreeMap<[u32; 2], f64> = BTreeMap::new();
        for t in enumerate_mnu(3, 3) {
            let key = [t.m.iter().sum(), t.n.iter().sum::<u32>() + t.u.iter().sum::<u32>()];
            let w: f64 = (0..3)
                .map(|p| 1.0 / (1.0 + t.m[p] as f64 + 2.0 * t.n[p] as f64 + t.u[p] as f64))
                .product();
            *brute.entry(key).or_insert(0.0) += w;
        }
        assert_eq!(table.len(), brute.len());
        for (k, v) in &brute {
            assert!((table[k] - v).abs() < 1e-13 * v.abs());
        }
    }
}
