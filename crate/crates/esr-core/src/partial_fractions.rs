//! Partial fractions of `x^r / (x^o · Π_q (x + c_q)^{p_q})` and the integrals
//! over `[1, ∞)` built from them.
//!
//! Pole locations are `c = λ_D / (l λ_E)` for an integer destination count
//! `l`; members with the same `l` share a pole and their exponents add.
//!
//! Integrals:
//!
//! * exact, `∫ x^r e^{-a x} / (x^o D(x)) dx` with `a = l̃ / λ_D`;
//! * high-SNR, the same without the exponential;
//! * asymptotic, the high-SNR closed form with every `1 + c` replaced by `c`.
//!
//! The exact forms come out as `e^{-a}` times a combination of
//! `H(n, a(1 + c))` from [`crate::special::GammaLadder`]; the `_scaled`
//! variants return that combination without the `e^{-a}` factor.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{EsrError, Result};
use crate::real::{Arith, Real};
use crate::special::{binomial_in, GammaLadder};

/// Poles sharing one destination count `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pole {
    pub l: u32,
    pub multiplicity: u32,
    /// Positions in the originating `l_vec`.
    pub members: Vec<usize>,
}

/// Denominator layout of one integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleStructure {
    pub lambda_d: f64,
    pub lambda_e: f64,
    /// Sorted by `l`.
    pub poles: Vec<Pole>,
    pub has_origin_pole: bool,
    /// Power of `x` in the numerator.
    pub numerator_power: u32,
}

/// Groups members by their integer `l`; member `q` contributes exponent
/// `m_e + offsets[q]` to its pole.
pub fn group_poles(
    l_vec: &[u32],
    offsets: &[u32],
    m_e: u32,
    lambda_d: f64,
    lambda_e: f64,
    with_origin: bool,
) -> PoleStructure {
    assert_eq!(l_vec.len(), offsets.len(), "l_vec and offsets differ in length");
    let mut by_l: BTreeMap<u32, Pole> = BTreeMap::new();
    for (q, (&l, &off)) in l_vec.iter().zip(offsets).enumerate() {
        let pole = by_l.entry(l).or_insert(Pole {
            l,
            multiplicity: 0,
            members: Vec::new(),
        });
        pole.multiplicity += m_e + off;
        pole.members.push(q);
    }
    PoleStructure {
        lambda_d,
        lambda_e,
        poles: by_l.into_values().collect(),
        has_origin_pole: with_origin,
        numerator_power: 0,
    }
}

impl PoleStructure {
    pub fn with_numerator(mut self, power: u32) -> Self {
        self.numerator_power = power;
        self
    }

    /// `λ_D / (l λ_E)` for pole `i`.
    pub fn location<A: Arith>(&self, ar: &A, i: usize) -> A::R {
        ar.num(self.lambda_d) / (ar.int(self.poles[i].l as i64) * ar.num(self.lambda_e))
    }

    pub fn location_f64(&self, i: usize) -> f64 {
        self.lambda_d / (self.poles[i].l as f64 * self.lambda_e)
    }

    /// Groups with at least two members.
    pub fn repeated_groups(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(|p| p.members.len() >= 2)
    }

    /// Members that sit alone on their pole.
    pub fn singleton_indices(&self) -> Vec<usize> {
        self.poles
            .iter()
            .filter(|p| p.members.len() == 1)
            .map(|p| p.members[0])
            .collect()
    }

    /// Degree of the denominator including the origin factor.
    pub fn denominator_degree(&self) -> u32 {
        self.poles.iter().map(|p| p.multiplicity).sum::<u32>() + self.has_origin_pole as u32
    }

    pub fn single_pole(&self) -> bool {
        self.poles.len() == 1
    }

    /// The rational function itself.
    pub fn eval<A: Arith>(&self, ar: &A, x: &A::R) -> A::R {
        let mut v = x.powi(self.numerator_power as i32);
        if self.has_origin_pole {
            v = v / x;
        }
        for (i, p) in self.poles.iter().enumerate() {
            let base = x.clone() + &self.location(ar, i);
            v = v / base.powi(p.multiplicity as i32);
        }
        v
    }

    fn without_numerator(&self) -> Self {
        let mut s = self.clone();
        s.numerator_power = 0;
        s
    }
}

/// Coefficient of `(x + c)^{-power}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfTerm<R> {
    pub pole: usize,
    pub location: R,
    pub power: u32,
    pub coeff: R,
}

/// `A / x + Σ coeff / (x + c)^t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractionExpansion<R> {
    pub a_coeff: Option<R>,
    pub terms: Vec<PfTerm<R>>,
}

impl<R: Real> PartialFractionExpansion<R> {
    pub fn eval<A: Arith<R = R>>(&self, ar: &A, x: &R) -> R {
        let mut v = match &self.a_coeff {
            Some(a) => a.clone() / x,
            None => ar.zero(),
        };
        for t in &self.terms {
            let base = x.clone() + &t.location;
            v = v + t.coeff.clone() / base.powi(t.power as i32);
        }
        v
    }

    /// Coefficients of pole `pole`, indexed by `power - 1`.
    fn coeffs_of(&self, pole: usize) -> impl Iterator<Item = &PfTerm<R>> {
        self.terms.iter().filter(move |t| t.pole == pole)
    }
}

/// Residues by the log-derivative recursion.
///
/// Around pole `c_i`, with `h = x + c_i`, the cofactor
/// `g(h) = x^{r-o} Π_{j≠i} (x + c_j)^{-p_j}` has
/// `g'/g = Σ_r q_r h^r` in closed form, so its Taylor coefficients follow from
/// `n g_n = Σ_{r<n} q_r g_{n-1-r}`; the coefficient of `(x + c_i)^{-t}` is
/// `g_{p_i - t}`.
pub fn expand<A: Arith>(ar: &A, s: &PoleStructure) -> PartialFractionExpansion<A::R> {
    let o = s.has_origin_pole as i32;
    let r = s.numerator_power as i32;
    assert!(
        r < s.denominator_degree() as i32,
        "improper rational function"
    );
    assert!(!(s.has_origin_pole && r > 0), "numerator cancels the origin pole");
    let locs: Vec<A::R> = (0..s.poles.len()).map(|i| s.location(ar, i)).collect();

    let a_coeff = if s.has_origin_pole {
        let mut a = ar.one();
        for (j, p) in s.poles.iter().enumerate() {
            a = a / locs[j].powi(p.multiplicity as i32);
        }
        Some(a)
    } else {
        None
    };

    let mut terms = Vec::new();
    for (i, pole) in s.poles.iter().enumerate() {
        let ci = &locs[i];
        let pi = pole.multiplicity as usize;
        let diffs: Vec<A::R> = locs.iter().map(|cj| cj.clone() - ci).collect();
        let mut g0 = (-ci.clone()).powi(r - o);
        for (j, p) in s.poles.iter().enumerate() {
            if j != i {
                g0 = g0 / diffs[j].powi(p.multiplicity as i32);
            }
        }
        let mut q = Vec::with_capacity(pi);
        let inv_ci = ar.one() / ci;
        let inv_d: Vec<A::R> = diffs
            .iter()
            .enumerate()
            .map(|(j, d)| if j == i { ar.zero() } else { ar.one() / d })
            .collect();
        let mut pow_ci = inv_ci.clone();
        let mut pow_d = inv_d.clone();
        for rr in 0..pi.saturating_sub(1) {
            let mut qr = -(ar.int((r - o) as i64) * &pow_ci);
            for (j, p) in s.poles.iter().enumerate() {
                if j == i {
                    continue;
                }
                let term = ar.int(p.multiplicity as i64) * &pow_d[j];
                qr = if rr % 2 == 0 { qr - term } else { qr + term };
                pow_d[j] = pow_d[j].clone() * &inv_d[j];
            }
            pow_ci = pow_ci * &inv_ci;
            q.push(qr);
        }
        let mut g = vec![g0];
        for n in 1..pi {
            let mut acc = ar.zero();
            for rr in 0..n {
                acc = acc + q[rr].clone() * &g[n - 1 - rr];
            }
            g.push(acc / ar.int(n as i64));
        }
        for t in 1..=pi {
            terms.push(PfTerm {
                pole: i,
                location: ci.clone(),
                power: t as u32,
                coeff: g[pi - t].clone(),
            });
        }
    }
    PartialFractionExpansion { a_coeff, terms }
}

/// Largest `log2 |term|` seen while summing, shifted by `offset`.
#[derive(Clone, Copy, Debug)]
pub struct Tally {
    pub max_log2: f64,
    pub offset: f64,
    pub terms: u64,
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            max_log2: f64::NEG_INFINITY,
            offset: 0.0,
            terms: 0,
        }
    }
}

impl Tally {
    pub fn note<R: Real>(&mut self, v: &R) {
        let l = v.log2_abs() + self.offset;
        if l > self.max_log2 {
            self.max_log2 = l;
        }
        self.terms += 1;
    }

    pub fn merge(&mut self, other: &Tally) {
        self.max_log2 = self.max_log2.max(other.max_log2);
        self.terms += other.terms;
    }
}

/// Ladders of `H(n, X)` keyed by `(l̃, l)`, with `X = l̃/λ_D · (1 + λ_D/(l λ_E))`
/// and `l = 0` meaning `X = l̃/λ_D`.
#[derive(Debug)]
pub struct GammaCache<R> {
    lambda_d: f64,
    lambda_e: f64,
    ladders: BTreeMap<(u32, u32), (i32, i32, GammaLadder<R>)>,
}

impl<R: Real> GammaCache<R> {
    pub fn new(lambda_d: f64, lambda_e: f64) -> Self {
        GammaCache {
            lambda_d,
            lambda_e,
            ladders: BTreeMap::new(),
        }
    }

    fn argument<A: Arith<R = R>>(&self, ar: &A, l_tilde: u32, l: u32) -> R {
        let a = ar.int(l_tilde as i64) / ar.num(self.lambda_d);
        if l == 0 {
            a
        } else {
            a.clone() + ar.int(l_tilde as i64) / (ar.int(l as i64) * ar.num(self.lambda_e))
        }
    }

    /// Ladder covering at least `lo..=hi`.
    pub fn ladder<A: Arith<R = R>>(&mut self, ar: &A, l_tilde: u32, l: u32, lo: i32, hi: i32) -> &GammaLadder<R> {
        let key = (l_tilde, l);
        let rebuild = match self.ladders.get(&key) {
            Some((a, b, _)) => lo < *a || hi > *b,
            None => true,
        };
        if rebuild {
            let (lo, hi) = match self.ladders.get(&key) {
                Some((a, b, _)) => (lo.min(*a), hi.max(*b)),
                None => (lo, hi),
            };
            let x = self.argument(ar, l_tilde, l);
            self.ladders.insert(key, (lo, hi, GammaLadder::new(ar, &x, lo, hi)));
        }
        &self.ladders[&key].2
    }
}

/// `e^{a} ∫_1^∞ e^{-a x} / (x D(x)) dx`.
pub fn j0_exact_scaled<A: Arith>(
    ar: &A,
    s: &PoleStructure,
    pf: &PartialFractionExpansion<A::R>,
    l_tilde: u32,
    cache: &mut GammaCache<A::R>,
    tally: &mut Tally,
) -> A::R {
    let one = ar.one();
    let mut sum = ar.zero();
    if let Some(a) = &pf.a_coeff {
        let h0 = cache.ladder(ar, l_tilde, 0, 0, 0).h(0).clone();
        let term = a.clone() * &h0;
        tally.note(&term);
        sum = sum + term;
    }
    for (i, pole) in s.poles.iter().enumerate() {
        let p = pole.multiplicity as i32;
        let ladder = cache.ladder(ar, l_tilde, pole.l, 1 - p, 0);
        let shift = one.clone() + &s.location(ar, i);
        let inv_shift = one.clone() / &shift;
        let mut scale = one.clone();
        for term in pf.coeffs_of(i) {
            let t = term.power as i32;
            let v = term.coeff.clone() * &scale * ladder.h(1 - t);
            tally.note(&v);
            sum = sum + v;
            scale = scale * &inv_shift;
        }
    }
    sum
}

/// `∫_1^∞ e^{-a x} / (x D(x)) dx` with `a = l̃ / λ_D`.
pub fn eval_j0_exact<A: Arith>(ar: &A, s: &PoleStructure, l_tilde: u32) -> Result<A::R> {
    if !s.has_origin_pole || s.numerator_power != 0 {
        return Err(EsrError::Contract("J0 needs the origin pole and a constant numerator"));
    }
    let pf = expand(ar, s);
    let mut cache = GammaCache::new(s.lambda_d, s.lambda_e);
    let v = j0_exact_scaled(ar, s, &pf, l_tilde, &mut cache, &mut Tally::default());
    let a = ar.int(l_tilde as i64) / ar.num(s.lambda_d);
    Ok(v * &ar.exp(&(-a)))
}

/// `Σ_j C(r,j) (-c)^{r-j} (1+c)^{j-t+1} H(j-t+1, X)`: the contribution of
/// `x^r / (x + c)^t` after the shift `z = x + c`.
#[allow(clippy::too_many_arguments)]
fn shifted_power_term<A: Arith>(
    ar: &A,
    r: u32,
    t: u32,
    c: &A::R,
    shift: &A::R,
    ladder: &GammaLadder<A::R>,
    binom: &[A::R],
    tally: &mut Tally,
) -> A::R {
    let mut sum = ar.zero();
    let neg_c = -c.clone();
    for j in 0..=r {
        let order = j as i32 - t as i32 + 1;
        let v = binom[j as usize].clone()
            * &neg_c.powi((r - j) as i32)
            * &shift.powi(order)
            * ladder.h(order);
        tally.note(&v);
        sum = sum + v;
    }
    sum
}

/// `e^{a} ∫_1^∞ x^r e^{-a x} / D(x) dx`, `r = numerator_power`.
pub fn j1_exact_scaled<A: Arith>(
    ar: &A,
    s: &PoleStructure,
    pf: Option<&PartialFractionExpansion<A::R>>,
    l_tilde: u32,
    cache: &mut GammaCache<A::R>,
    tally: &mut Tally,
) -> A::R {
    let r = s.numerator_power;
    let binom: Vec<A::R> = (0..=r).map(|j| binomial_in(ar, r, j)).collect();
    let one = ar.one();
    if s.single_pole() {
        let pole = &s.poles[0];
        let p = pole.multiplicity;
        let c = s.location(ar, 0);
        let shift = one + &c;
        let ladder = cache.ladder(ar, l_tilde, pole.l, 1 - p as i32, r as i32 + 1 - p as i32);
        return shifted_power_term(ar, r, p, &c, &shift, ladder, &binom, tally);
    }
    let local;
    let pf = match pf {
        Some(pf) => pf,
        None => {
            local = expand(ar, &s.without_numerator());
            &local
        }
    };
    let mut sum = ar.zero();
    for (i, pole) in s.poles.iter().enumerate() {
        let p = pole.multiplicity as i32;
        let c = s.location(ar, i);
        let shift = one.clone() + &c;
        let ladder = cache.ladder(ar, l_tilde, pole.l, 1 - p, r as i32);
        for term in pf.coeffs_of(i) {
            let inner = shifted_power_term(ar, r, term.power, &c, &shift, ladder, &binom, tally);
            let v = term.coeff.clone() * &inner;
            tally.note(&v);
            sum = sum + v;
        }
    }
    sum
}

/// `∫_1^∞ x^r e^{-a x} / D(x) dx` with `r = numerator_power`; the
/// structure's `r` equals `m̃ - ũ - 1`.
pub fn eval_j1_exact<A: Arith>(ar: &A, s: &PoleStructure, l_tilde: u32) -> Result<A::R> {
    if s.has_origin_pole {
        return Err(EsrError::Contract("J1 has no origin pole; that integral is J0"));
    }
    let mut cache = GammaCache::new(s.lambda_d, s.lambda_e);
    let v = j1_exact_scaled(ar, s, None, l_tilde, &mut cache, &mut Tally::default());
    let a = ar.int(l_tilde as i64) / ar.num(s.lambda_d);
    Ok(v * &ar.exp(&(-a)))
}

/// Closed form of `∫_1^∞ R(x) dx` for a rational `R` decaying at least like
/// `x^{-2}`; `shifted` selects `1 + c` (high-SNR) or `c` (asymptotic).
pub fn rational_integral<A: Arith>(
    ar: &A,
    s: &PoleStructure,
    pf: &PartialFractionExpansion<A::R>,
    shifted: bool,
    tally: &mut Tally,
) -> A::R {
    let one = ar.one();
    let mut sum = ar.zero();
    for (i, _) in s.poles.iter().enumerate() {
        let c = s.location(ar, i);
        let base = if shifted { one.clone() + &c } else { c };
        let ln_base = ar.ln(&base);
        let inv = one.clone() / &base;
        let mut pow = inv.clone();
        for term in pf.coeffs_of(i) {
            let v = if term.power == 1 {
                -(term.coeff.clone() * &ln_base)
            } else {
                let v = term.coeff.clone() * &pow / ar.int(term.power as i64 - 1);
                pow = pow * &inv;
                v
            };
            tally.note(&v);
            sum = sum + v;
        }
    }
    sum
}

/// `Σ_j C(r,j) (-c)^{r-j} b^{j-p+1} / (p-j-1)` with `b = 1 + c` or `c`:
/// `∫ x^r / (x + c)^p` over `[1, ∞)` for a single pole.
pub fn single_pole_rational<A: Arith>(ar: &A, r: u32, p: u32, c: &A::R, shifted: bool, tally: &mut Tally) -> A::R {
    assert!(p >= r + 2, "integral diverges");
    let base = if shifted { ar.one() + c } else { c.clone() };
    let neg_c = -c.clone();
    let mut sum = ar.zero();
    for j in 0..=r {
        let e = (p - j - 1) as i32;
        let v = binomial_in(ar, r, j) * &neg_c.powi((r - j) as i32) / (base.powi(e) * ar.int(e as i64));
        tally.note(&v);
        sum = sum + v;
    }
    sum
}

pub(crate) fn highsnr_common<A: Arith>(ar: &A, s: &PoleStructure, shifted: bool, tally: &mut Tally) -> A::R {
    if !s.has_origin_pole && s.single_pole() {
        let c = s.location(ar, 0);
        return single_pole_rational(ar, s.numerator_power, s.poles[0].multiplicity, &c, shifted, tally);
    }
    let pf = expand(ar, s);
    rational_integral(ar, s, &pf, shifted, tally)
}

/// `∫_1^∞ dx / (x D(x))`.
pub fn eval_j0_highsnr<A: Arith>(ar: &A, s: &PoleStructure) -> Result<A::R> {
    if !s.has_origin_pole {
        return Err(EsrError::Contract("J0 needs the origin pole"));
    }
    check_decay(s)?;
    Ok(highsnr_common(ar, s, true, &mut Tally::default()))
}

/// `∫_1^∞ x^r / D(x) dx`, `r = numerator_power = m̃ - 1`.
pub fn eval_j1_highsnr<A: Arith>(ar: &A, s: &PoleStructure) -> Result<A::R> {
    if s.has_origin_pole {
        return Err(EsrError::Contract("J1 has no origin pole; that integral is J0"));
    }
    check_decay(s)?;
    Ok(highsnr_common(ar, s, true, &mut Tally::default()))
}

/// Without the exponential factor the integrand must decay like `x^{-2}`.
fn check_decay(s: &PoleStructure) -> Result<()> {
    if s.denominator_degree() < s.numerator_power + 2 {
        return Err(EsrError::Domain("integral diverges: denominator degree must exceed the numerator's by 2"));
    }
    Ok(())
}

/// Asymptotic counterpart of [`eval_j0_highsnr`] / [`eval_j1_highsnr`],
/// chosen by the origin flag.
pub fn eval_j_asymptotic<A: Arith>(ar: &A, s: &PoleStructure) -> Result<A::R> {
    check_decay(s)?;
    Ok(highsnr_common(ar, s, false, &mut Tally::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::F64;

    fn coeff(pf: &PartialFractionExpansion<f64>, loc: f64, t: u32) -> f64 {
        pf.terms
            .iter()
            .find(|x| (x.location - loc).abs() < 1e-12 && x.power == t)
            .map(|x| x.coeff)
            .unwrap()
    }

    #[test]
    fn grouping_examples() {
        let s = group_poles(&[1], &[0], 1, 3.0, 1.5, false);
        assert_eq!(s.poles.len(), 1);
        assert_eq!(s.poles[0].multiplicity, 1);
        assert_eq!(s.location_f64(0), 2.0);
        assert_eq!(s.singleton_indices(), vec![0]);

        let s = group_poles(&[2, 2], &[0, 1], 1, 1.0, 1.0, false);
        assert_eq!(s.poles.len(), 1);
        assert_eq!(s.poles[0].multiplicity, 3);
        assert_eq!(s.repeated_groups().count(), 1);
        assert!(s.singleton_indices().is_empty());

        let s = group_poles(&[1, 2], &[0, 0], 2, 1.0, 1.0, true);
        assert_eq!(s.poles.iter().map(|p| p.multiplicity).collect::<Vec<_>>(), vec![2, 2]);
        assert_eq!(s.denominator_degree(), 5);
    }

    #[test]
    fn cover_up_examples() {
        // 1/(x(x+2)): λ_D/λ_E = 2.
        let s = group_poles(&[1], &[0], 1, 2.0, 1.0, true);
        let pf = expand(&F64, &s);
        assert!((pf.a_coeff.unwrap() - 0.5).abs() < 1e-15);
        assert!((coeff(&pf, 2.0, 1) + 0.5).abs() < 1e-15);

        // 1/(x(x+1)^2).
        let s = group_poles(&[1], &[1], 1, 1.0, 1.0, true);
        let pf = expand(&F64, &s);
        assert!((pf.a_coeff.unwrap() - 1.0).abs() < 1e-15);
        assert!((coeff(&pf, 1.0, 1) + 1.0).abs() < 1e-15);
        assert!((coeff(&pf, 1.0, 2) + 1.0).abs() < 1e-15);
        for x in [1.0, 2.0, 3.7] {
            let want = 1.0 / (x * (x + 1.0) * (x + 1.0));
            assert!((pf.eval(&F64, &x) - want).abs() < 1e-14 * want);
        }

        // 1/((x+1)(x+3)): l = 3 and 1 with λ_D = 3, λ_E = 1.
        let s = group_poles(&[3, 1], &[0, 0], 1, 3.0, 1.0, false);
        let pf = expand(&F64, &s);
        assert!((coeff(&pf, 1.0, 1) - 0.5).abs() < 1e-15);
        assert!((coeff(&pf, 3.0, 1) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_references() {
        let s = group_poles(&[1], &[0], 1, 1.0, 1.0, true);
        let v = eval_j0_exact(&F64, &s, 1).unwrap();
        assert!((v - 0.086_458_564_735_430_773).abs() < 1e-14);

        let s = group_poles(&[1, 2], &[0, 0], 1, 2.0, 1.0, true);
        let v = eval_j0_exact(&F64, &s, 3).unwrap();
        assert!((v - 0.012_353_687_975_540_407).abs() < 1e-14);

        let s = group_poles(&[1], &[0], 1, 1.0, 1.0, false);
        let v = eval_j1_exact(&F64, &s, 1).unwrap();
        assert!((v - 0.132_925_369_660_089_5).abs() < 1e-14);

        let s = group_poles(&[1], &[0], 1, 1.0, 1.0, true);
        let v = eval_j0_highsnr(&F64, &s).unwrap();
        assert!((v - core::f64::consts::LN_2).abs() < 1e-15);

        let s = group_poles(&[1, 2], &[0, 0], 1, 2.0, 1.0, true);
        let v = eval_j0_highsnr(&F64, &s).unwrap();
        assert!((v - 0.143_841_036_225_890_46).abs() < 1e-15);

        let s = group_poles(&[1], &[0], 1, 1e-8, 1.0, true);
        let v = eval_j0_highsnr(&F64, &s).unwrap();
        assert!((v - 0.999_999_995_000_000_03).abs() < 1e-6);

        let s = group_poles(&[1], &[0], 1, 1.0, 1.0, false).with_numerator(0);
        let s2 = group_poles(&[1], &[1], 1, 1.0, 1.0, false).with_numerator(0);
        let s = PoleStructure {
            poles: vec![Pole {
                l: 1,
                multiplicity: 3,
                members: vec![0],
            }],
            ..s.with_numerator(1)
        };
        assert!((eval_j1_highsnr(&F64, &s).unwrap() - 0.375).abs() < 1e-15);
        assert!((eval_j1_highsnr(&F64, &s2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_substitution() {
        let s = group_poles(&[1], &[0], 1, 1e6, 1.0, true);
        let hs = eval_j0_highsnr(&F64, &s).unwrap();
        let asy = eval_j_asymptotic(&F64, &s).unwrap();
        assert!(((hs - asy) / hs).abs() < 2e-6);
        let s = group_poles(&[1], &[0], 1, 1.0, 1.0, true);
        let gap = eval_j0_highsnr(&F64, &s).unwrap() - eval_j_asymptotic(&F64, &s).unwrap();
        assert!(gap.abs() > 0.1);
    }
}
