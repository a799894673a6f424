//! Shared numeric kernels: stable log-space reductions, deterministic
//! summation, and an extended-range float for products that overflow `f64`.

/// log(exp(a) + exp(b)) without overflow.
#[inline(always)]
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log Σ exp(x_i) over a slice, max-shifted.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let mx = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - mx).exp()).sum();
    mx + sum.ln()
}

/// Deterministic pairwise (tree) summation keyed by index.
///
/// The reduction order depends only on the slice layout, never on thread
/// scheduling, so results are byte-stable across worker counts.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Mean and standard error of the mean, both via pairwise reduction.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2, "mean_stderr needs at least two samples");
    let mean = pairwise_sum(xs) / n as f64;
    let sq: Vec<f64> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Compensated (Kahan–Neumaier) accumulator for signed series.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline(always)]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline(always)]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const EXP_MASK: u64 = 0x7ff0_0000_0000_0000;
const ONE_BITS: u64 = 0x3ff0_0000_0000_0000;

/// Positive extended-range float: `frac * 2^exp` with `frac ∈ [1, 2)` or zero.
///
/// Carries products like elementary symmetric polynomials whose magnitudes
/// leave the `f64` exponent range, at plain multiply/add cost instead of a
/// transcendental call per step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtFloat {
    frac: f64,
    exp: i64,
}

#[inline(always)]
fn pow2_neg(d: i64) -> f64 {
    debug_assert!((0..=1022).contains(&d));
    f64::from_bits(((1023 - d) as u64) << 52)
}

/// 2^d for |d| ≤ 1022.
#[inline(always)]
fn pow2i(d: i64) -> f64 {
    debug_assert!((-1022..=1022).contains(&d));
    f64::from_bits(((1023 + d) as u64) << 52)
}

/// 2^-d for -2 ≤ d ≤ 66.
#[inline(always)]
fn pow2_neg_wide(d: i64) -> f64 {
    debug_assert!((-2..=66).contains(&d));
    f64::from_bits(((1023 - d) as u64) << 52)
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { frac: 0.0, exp: 0 };
    pub const ONE: ExtFloat = ExtFloat { frac: 1.0, exp: 0 };

    /// Floor of log2 of the value; meaningless for zero.
    #[inline(always)]
    pub fn exp2_floor(self) -> i64 {
        self.exp
    }

    /// Exact for any positive normal `frac`; subnormals cannot arise from the
    /// [1,4) intermediate ranges the arithmetic below produces.
    #[inline(always)]
    fn normalized(frac: f64, exp: i64) -> ExtFloat {
        if frac == 0.0 {
            return ExtFloat::ZERO;
        }
        debug_assert!(frac.is_finite() && frac > 0.0);
        let bits = frac.to_bits();
        let e2 = ((bits & EXP_MASK) >> 52) as i64 - 1023;
        ExtFloat {
            frac: f64::from_bits((bits & !EXP_MASK) | ONE_BITS),
            exp: exp + e2,
        }
    }

    /// Build from a natural logarithm (`NEG_INFINITY` maps to zero).
    pub fn from_ln(l: f64) -> ExtFloat {
        if l == f64::NEG_INFINITY {
            return ExtFloat::ZERO;
        }
        assert!(l.is_finite(), "ExtFloat::from_ln: non-finite input");
        let e = (l * std::f64::consts::LOG2_E).floor();
        let frac = (l - e * std::f64::consts::LN_2).exp();
        ExtFloat::normalized(frac, e as i64)
    }

    /// Natural logarithm; `NEG_INFINITY` for zero.
    pub fn ln(self) -> f64 {
        if self.frac == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.frac.ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    #[inline(always)]
    pub fn is_zero(self) -> bool {
        self.frac == 0.0
    }

    #[inline(always)]
    pub fn mul(self, o: ExtFloat) -> ExtFloat {
        if self.frac == 0.0 || o.frac == 0.0 {
            return ExtFloat::ZERO;
        }
        ExtFloat::normalized(self.frac * o.frac, self.exp + o.exp)
    }

    /// `self / o`; `o` must be non-zero.
    #[inline(always)]
    pub fn div(self, o: ExtFloat) -> ExtFloat {
        debug_assert!(o.frac != 0.0, "ExtFloat division by zero");
        if self.frac == 0.0 {
            return ExtFloat::ZERO;
        }
        ExtFloat::normalized(self.frac / o.frac, self.exp - o.exp)
    }

    #[inline(always)]
    pub fn add(self, o: ExtFloat) -> ExtFloat {
        if self.frac == 0.0 {
            return o;
        }
        if o.frac == 0.0 {
            return self;
        }
        let (hi, lo) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = hi.exp - lo.exp;
        if d > 64 {
            return hi;
        }
        ExtFloat::normalized(hi.frac + lo.frac * pow2_neg(d), hi.exp)
    }

    /// `self - a*b` for a mathematically non-negative difference, fused so
    /// the product never goes through normalization.
    ///
    /// Returns the difference plus the number of binary digits cancelled; a
    /// negative or zero outcome reports full cancellation (`i64::MAX`).
    #[inline(always)]
    pub fn sub_prod_monitored(self, a: ExtFloat, b: ExtFloat) -> (ExtFloat, i64) {
        let frac = a.frac * b.frac; // in [1, 4) for non-zero operands
        if frac == 0.0 {
            return (self, 0);
        }
        if self.frac == 0.0 {
            return (ExtFloat::ZERO, i64::MAX);
        }
        let d = self.exp - (a.exp + b.exp);
        if d > 66 {
            return (self, 0);
        }
        if d < -2 {
            // The product's exponent exceeds self's by enough that the true
            // difference is negative (frac < 4).
            return (ExtFloat::ZERO, i64::MAX);
        }
        let raw = self.frac - frac * pow2_neg_wide(d);
        if raw <= 0.0 {
            return (ExtFloat::ZERO, i64::MAX);
        }
        let out = ExtFloat::normalized(raw, self.exp);
        (out, self.exp - out.exp)
    }

    /// `self - o` for a mathematically non-negative difference.
    ///
    /// Returns the difference plus the number of binary digits cancelled; a
    /// negative or zero outcome reports full cancellation (`i64::MAX`).
    #[inline(always)]
    pub fn sub_monitored(self, o: ExtFloat) -> (ExtFloat, i64) {
        if o.frac == 0.0 {
            return (self, 0);
        }
        if self.frac == 0.0 {
            return (ExtFloat::ZERO, i64::MAX);
        }
        let d = self.exp - o.exp;
        if d > 64 {
            return (self, 0);
        }
        if d < 0 {
            // o has a strictly larger exponent, so o > self and the true
            // difference is negative.
            return (ExtFloat::ZERO, i64::MAX);
        }
        let raw = self.frac - o.frac * pow2_neg(d);
        if raw <= 0.0 {
            return (ExtFloat::ZERO, i64::MAX);
        }
        let exp = self.exp;
        let out = ExtFloat::normalized(raw, exp);
        (out, self.exp - out.exp)
    }

    /// Approximate `self / o` as an `f64`, saturating far outside the `f64`
    /// range. Meant for error monitors, not for values.
    #[inline(always)]
    pub fn ratio_approx(self, o: ExtFloat) -> f64 {
        if self.frac == 0.0 {
            return 0.0;
        }
        if o.frac == 0.0 {
            return f64::INFINITY;
        }
        let d = self.exp - o.exp;
        if d > 120 {
            return 1e36;
        }
        if d < -120 {
            return 0.0;
        }
        (self.frac / o.frac) * pow2i(d)
    }

    /// `self / (self + o)` as an `f64` in [0, 1].
    pub fn fraction_of_sum(self, o: ExtFloat) -> f64 {
        if self.frac == 0.0 {
            return 0.0;
        }
        if o.frac == 0.0 {
            return 1.0;
        }
        let total = self.add(o);
        let d = total.exp - self.exp;
        debug_assert!(d >= 0);
        if d > 1000 {
            return 0.0;
        }
        (self.frac / total.frac) * pow2_neg(d)
    }
}
