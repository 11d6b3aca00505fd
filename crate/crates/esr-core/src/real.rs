//! Scalar arithmetic shared by the closed-form evaluators.
//!
//! Formulas are written once against [`Arith`] and run either on plain
//! `f64` or on the multi-precision [`Mp`] type. Alternating sums over the
//! index sets lose tens of decimal digits for moderate configurations, so
//! the engine evaluates them in [`Mp`] with a precision chosen at run time.

use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

/// Field operations plus the few queries the evaluators need.
pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    fn to_f64(&self) -> f64;
    /// `log2 |self|`, or `-inf` for zero. Never overflows.
    fn log2_abs(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
}

/// Constructors and transcendental functions at a fixed working precision.
pub trait Arith {
    type R: Real;

    fn num(&self, v: f64) -> Self::R;
    /// Working precision in bits.
    fn bits(&self) -> u32;
    fn exp(&self, x: &Self::R) -> Self::R;
    fn ln(&self, x: &Self::R) -> Self::R;
    fn euler_gamma(&self) -> Self::R;

    fn int(&self, v: i64) -> Self::R {
        self.num(v as f64)
    }
    fn zero(&self) -> Self::R {
        self.num(0.0)
    }
    fn one(&self) -> Self::R {
        self.num(1.0)
    }
    fn ratio(&self, p: i64, q: i64) -> Self::R {
        self.int(p) / self.int(q)
    }
}

impl Real for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn log2_abs(&self) -> f64 {
        libm::log2(libm::fabs(*self))
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        libm::fabs(*self)
    }
    fn powi(&self, n: i32) -> Self {
        libm::pow(*self, n as f64)
    }
}

/// Double-precision arithmetic.
#[derive(Clone, Copy, Debug, Default)]
pub struct F64;

impl Arith for F64 {
    type R = f64;
    fn num(&self, v: f64) -> f64 {
        v
    }
    fn bits(&self) -> u32 {
        53
    }
    fn exp(&self, x: &f64) -> f64 {
        libm::exp(*x)
    }
    fn ln(&self, x: &f64) -> f64 {
        libm::log(*x)
    }
    fn euler_gamma(&self) -> f64 {
        EULER_GAMMA
    }
}

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const EULER_DIGITS: &str = "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951463144724980708248096050401448654283622417399764492353625350033374293733773767394279259525824709491600873520394816567085323315177661152862119950150798479374508570574002992135478614669402960432542151905877553526733139925401296742051375413954911168510280798423487758720503843109399736137255306088933126760017247953783675927135157722610273492913940798430103417771778088154957066107501016191663340152278935867965497252036212879226555953669628176388792726801324310104765059637039473949576389065729679296010090151251959509222435014093498712282479497471956";

/// Largest precision for which the embedded Euler constant is exact enough.
pub const MAX_BITS: u32 = 2048;

/// Multi-precision real carrying its own precision.
#[derive(Clone)]
pub struct Mp {
    v: BigFloat,
    p: usize,
}

impl Mp {
    fn wrap(v: BigFloat, p: usize) -> Self {
        Mp { v, p }
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({:e})", self.to_f64())
    }
}

impl PartialEq for Mp {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp::wrap(self.v.neg(), self.p)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $f:ident) => {
        impl<'a> $tr<&'a Mp> for Mp {
            type Output = Mp;
            fn $f(self, o: &'a Mp) -> Mp {
                let p = self.p.max(o.p);
                Mp::wrap(self.v.$f(&o.v, p, RM), p)
            }
        }
        impl $tr<Mp> for Mp {
            type Output = Mp;
            fn $f(self, o: Mp) -> Mp {
                self.$f(&o)
            }
        }
    };
}
mp_binop!(Add, add);
mp_binop!(Sub, sub);
mp_binop!(Mul, mul);
mp_binop!(Div, div);

impl Real for Mp {
    fn to_f64(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((words, _, sign, e, _)) if !self.v.is_zero() => {
                let top = words.last().copied().unwrap_or(0) as f64;
                let mag = libm::ldexp(top, e.saturating_sub(64));
                if sign == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
            Some(_) => 0.0,
            None => f64::NAN,
        }
    }
    fn log2_abs(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((words, _, _, e, _)) if !self.v.is_zero() => {
                let top = words.last().copied().unwrap_or(1) as f64;
                e as f64 + libm::log2(top) - 64.0
            }
            _ => f64::NEG_INFINITY,
        }
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    fn abs(&self) -> Self {
        Mp::wrap(self.v.abs(), self.p)
    }
    fn powi(&self, n: i32) -> Self {
        let r = self.v.powi(n.unsigned_abs() as usize, self.p, RM);
        if n < 0 {
            Mp::wrap(r.reciprocal(self.p, RM), self.p)
        } else {
            Mp::wrap(r, self.p)
        }
    }
}

/// Multi-precision arithmetic context.
///
/// Holds the constant cache used by `exp`/`ln`; not `Sync`, create one per
/// thread.
pub struct MpCtx {
    p: usize,
    consts: RefCell<Consts>,
    euler: Mp,
}

impl MpCtx {
    /// Context with `bits` of mantissa, clamped to `64..=MAX_BITS`.
    pub fn new(bits: u32) -> Self {
        let p = bits.clamp(64, MAX_BITS) as usize;
        let mut cc = Consts::new().expect("constant cache allocation");
        let euler = Mp::wrap(BigFloat::parse(EULER_DIGITS, Radix::Dec, p + 64, RM, &mut cc), p);
        MpCtx {
            p,
            consts: RefCell::new(cc),
            euler,
        }
    }
}

impl fmt::Debug for MpCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpCtx({} bits)", self.p)
    }
}

impl Arith for MpCtx {
    type R = Mp;
    fn num(&self, v: f64) -> Mp {
        Mp::wrap(BigFloat::from_f64(v, self.p), self.p)
    }
    fn int(&self, v: i64) -> Mp {
        Mp::wrap(BigFloat::from_i64(v, self.p), self.p)
    }
    fn bits(&self) -> u32 {
        self.p as u32
    }
    fn exp(&self, x: &Mp) -> Mp {
        let mut cc = self.consts.borrow_mut();
        Mp::wrap(x.v.exp(self.p, RM, &mut cc), self.p)
    }
    fn ln(&self, x: &Mp) -> Mp {
        let mut cc = self.consts.borrow_mut();
        Mp::wrap(x.v.ln(self.p, RM, &mut cc), self.p)
    }
    fn euler_gamma(&self) -> Mp {
        self.euler.clone()
    }
}
