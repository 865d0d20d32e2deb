//! Fixed-precision real arithmetic for the bound evaluator.
//!
//! Thin wrapper over the arbitrary-precision binary floats from
//! `astro-float`: one place owns the working precision (requested decimal
//! digits plus three guard digits), the rounding mode and the shared
//! constants cache, so the formula code upstairs reads close to the
//! displayed expressions instead of threading three extra arguments through
//! every call.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

/// Shared evaluation context. The constants cache memoises π and the
/// argument-reduction tables behind ln/exp; it sits in a `RefCell`, which
/// makes the context single-threaded. Parallel inner loops must stick to
/// cache-free operations (add/mul/div/sqrt) and carry [`RealCtx::bits`] by
/// value instead of borrowing the context.
pub struct RealCtx {
    bits: usize,
    digits: u32,
    consts: RefCell<Consts>,
}

impl RealCtx {
    /// Context for `digits` significant decimal digits. Three guard digits
    /// are added before converting to bits, so a caller asking for 38 digits
    /// computes at 41 and the final sign test has slack to stand on.
    pub fn new(digits: u32) -> Self {
        let guarded = digits as usize + 3;
        // 33220/10000 over-approximates log₂(10); one extra bit on top.
        let bits = (guarded * 33220).div_ceil(10000) + 1;
        let consts = Consts::new().expect("constants cache allocation");
        RealCtx { bits, digits, consts: RefCell::new(consts) }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn from_u64(&self, n: u64) -> BigFloat {
        BigFloat::from_u64(n, self.bits)
    }

    pub fn from_i64(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.bits)
    }

    /// The exact ratio `num/den`, rounded once at working precision. Decimal
    /// literals in the bound terms go through here (e.g. 2.48 as 248/100) so
    /// they never pick up a binary-representation error larger than an ulp.
    pub fn from_ratio(&self, num: i64, den: u64) -> BigFloat {
        self.div(&self.from_i64(num), &self.from_u64(den))
    }

    /// Parses a decimal literal (used for thresholds like `1e-35` and for
    /// frozen reference digits in tests).
    pub fn parse(&self, s: &str) -> BigFloat {
        let x = BigFloat::parse(s, Radix::Dec, self.bits, RM, &mut self.consts.borrow_mut());
        debug_assert!(!x.is_nan(), "unparseable real literal {s:?}");
        x
    }

    pub fn pi(&self) -> BigFloat {
        self.consts.borrow_mut().pi(self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, RM, &mut self.consts.borrow_mut())
    }

    pub fn exp(&self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.consts.borrow_mut())
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.bits, RM)
    }

    /// Nearest f64, for traces and reports. Everything beyond f64 resolution
    /// is rounded away; sign decisions never go through here.
    pub fn to_f64(&self, a: &BigFloat) -> f64 {
        format!("{a}").parse::<f64>().unwrap_or(f64::NAN)
    }

    /// Strict comparison; false when either side is NaN.
    pub fn gt(&self, a: &BigFloat, b: &BigFloat) -> bool {
        matches!(a.cmp(b), Some(c) if c > 0)
    }
}

/// Bernoulli numbers B₂, B₄, …, B₁₆ as exact fractions.
const BERNOULLI: [(i64, u64); 8] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
];

/// ζ(3/2) by Euler–Maclaurin: direct sum of N terms, then the integral
/// tail, the half-term and the Bernoulli corrections through B₁₆,
///
///   ζ(s) = Σ_{k≤N} k⁻ˢ + N^{1−s}/(s−1) − N⁻ˢ/2
///          + Σ_j B₂ⱼ/(2j)! · s(s+1)⋯(s+2j−2) · N^{−s−2j+1}.
///
/// The first omitted correction is ≈ 14.6·N^{−18.5}, so N is chosen as the
/// smallest power of ten that pushes it below the guard digits; N = 1000
/// already covers the 38-digit default with room to spare.
pub fn zeta_three_halves(out: &RealCtx) -> BigFloat {
    // Summing N rounded terms costs up to N ulps, which would gnaw at the
    // guard digits, so the constant is computed 13 digits hot and rounded
    // once at the end.
    let ctx = RealCtx::new(out.digits() + 13);
    let digits = ctx.digits() as u64 + 3;
    let exponent = (digits + 6).div_ceil(18).max(3);
    let n: u64 = 10u64.pow(exponent as u32);

    let mut sum = BigFloat::from_u64(0, ctx.bits());
    for k in 1..=n {
        sum = ctx.add(&sum, &inv_pow_three_halves(k, ctx.bits()));
    }

    // Integral tail 2/√N, minus half of the last term N^{-3/2}/2.
    let nf = ctx.from_u64(n);
    let sqrt_n = ctx.sqrt(&nf);
    sum = ctx.add(&sum, &ctx.div(&ctx.from_u64(2), &sqrt_n));
    let n_32 = ctx.mul(&nf, &sqrt_n);
    sum = ctx.sub(&sum, &ctx.div(&ctx.from_ratio(1, 2), &n_32));

    // Correction j contributes c_j·N^{−2j−1/2} with the exact rational
    // coefficient c_j = B₂ⱼ·(3·5⋯(4j−1)) / ((2j)!·2^{2j−1}). Numerators stay
    // within i128 through j = 8.
    let mut odd_prod: i128 = 1;
    let mut factorial: u128 = 1;
    for (j, &(b_num, b_den)) in BERNOULLI.iter().enumerate() {
        let j = j as u64 + 1;
        odd_prod *= ((4 * j - 3) * (4 * j - 1)) as i128;
        factorial *= ((2 * j - 1) * (2 * j)) as u128;
        let num = b_num as i128 * odd_prod;
        let den = b_den as u128 * factorial * (1u128 << (2 * j - 1));
        let coeff = ctx.div(
            &BigFloat::from_i128(num, ctx.bits()),
            &BigFloat::from_u128(den, ctx.bits()),
        );
        let scale = ctx.mul(&ctx.powi(&nf, 2 * j as usize), &sqrt_n);
        sum = ctx.add(&sum, &ctx.div(&coeff, &scale));
    }
    sum.set_precision(out.bits(), RM).expect("rounding to working precision");
    sum
}

/// k^{−3/2} = 1/(k·√k) without touching the constants cache, so the τ sum
/// can call it from rayon workers.
pub(super) fn inv_pow_three_halves(k: u64, bits: usize) -> BigFloat {
    let kf = BigFloat::from_u64(k, bits);
    let k_32 = kf.sqrt(bits, RM).mul(&kf, bits, RM);
    BigFloat::from_u64(1, bits).div(&k_32, bits, RM)
}

/// Cache-free division τ/k^{3/2} for the sum workers.
pub(super) fn tau_term(tau: u32, k: u64, bits: usize) -> BigFloat {
    let kf = BigFloat::from_u64(k, bits);
    let k_32 = kf.sqrt(bits, RM).mul(&kf, bits, RM);
    BigFloat::from_u64(tau as u64, bits).div(&k_32, bits, RM)
}

/// Cache-free addition for the sum workers.
pub(super) fn raw_add(a: &BigFloat, b: &BigFloat, bits: usize) -> BigFloat {
    a.add(b, bits, RM)
}
