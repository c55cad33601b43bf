//! Arbitrary-precision complex arithmetic with explicit precision bookkeeping.
//!
//! Real parts are MPFR floats (`rug::Float`); the complex layer, branch
//! conventions, and precision claims live here. Every public operation that
//! takes a [`PrecBits`] target computes with [`GUARD_BITS`] extra working bits
//! and rounds the result to the target.

use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};

/// Extra working bits used internally by every precision-targeted operation.
/// They absorb the small constant losses each elementary step introduces.
pub const GUARD_BITS: u32 = 64;

/// A positive count of binary digits of precision.
///
/// The library-wide floor is 53 bits (an IEEE double mantissa); the inversion
/// entry points impose their own larger floors on top of this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrecBits(u32);

impl PrecBits {
    pub const MIN: u32 = 53;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN {
            return Err(Error::precision(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN
            )));
        }
        Ok(PrecBits(bits))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Working precision: target plus guard bits.
    pub fn working(self) -> u32 {
        self.0 + GUARD_BITS
    }
}

impl std::fmt::Display for PrecBits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How a precision claim is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionKind {
    /// |α − α̃| ≤ 2⁻ᵇ
    Absolute,
    /// |α − α̃| ≤ 2⁻ᵇ·|α|
    Relative,
    /// |α − α̃| ≤ 2⁻ᵇ·max{1, |α|}
    Regulated,
}

impl std::fmt::Display for PrecisionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrecisionKind::Absolute => write!(f, "absolute"),
            PrecisionKind::Relative => write!(f, "relative"),
            PrecisionKind::Regulated => write!(f, "regulated"),
        }
    }
}

/// A precision claim attached to a value: kind plus claimed bits.
///
/// Claims are advisory metadata. Arithmetic does not propagate them;
/// enforcement happens at module boundaries that state a contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionClaim {
    pub kind: PrecisionKind,
    pub bits: PrecBits,
}

/// An arbitrary-precision complex value with an optional precision claim.
///
/// Values are immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct ApproxComplex {
    re: Float,
    im: Float,
    claim: Option<PrecisionClaim>,
}

impl ApproxComplex {
    pub fn new(re: Float, im: Float) -> Self {
        ApproxComplex { re, im, claim: None }
    }

    pub fn with_claim(re: Float, im: Float, claim: PrecisionClaim) -> Self {
        ApproxComplex { re, im, claim: Some(claim) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ApproxComplex::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn zero(prec: u32) -> Self {
        ApproxComplex::from_f64(0.0, 0.0, prec)
    }

    pub fn one(prec: u32) -> Self {
        ApproxComplex::from_f64(1.0, 0.0, prec)
    }

    /// The point i.
    pub fn i(prec: u32) -> Self {
        ApproxComplex::from_f64(0.0, 1.0, prec)
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        ApproxComplex::new(re, Float::with_val(prec, 0))
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn claim(&self) -> Option<PrecisionClaim> {
        self.claim
    }

    pub fn set_claim(mut self, claim: PrecisionClaim) -> Self {
        self.claim = Some(claim);
        self
    }

    /// The larger of the two component precisions.
    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Re-round both components to `prec` bits. Claims are dropped.
    pub fn with_prec(&self, prec: u32) -> Self {
        ApproxComplex::new(
            Float::with_val(prec, &self.re),
            Float::with_val(prec, &self.im),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self, prec: u32) -> Self {
        ApproxComplex::new(
            Float::with_val(prec, &self.re),
            Float::with_val(prec, -&self.im),
        )
    }

    pub fn neg(&self, prec: u32) -> Self {
        ApproxComplex::new(
            Float::with_val(prec, -&self.re),
            Float::with_val(prec, -&self.im),
        )
    }

    pub fn add(&self, rhs: &Self, prec: u32) -> Self {
        ApproxComplex::new(
            (&self.re + &rhs.re).complete(prec),
            (&self.im + &rhs.im).complete(prec),
        )
    }

    pub fn sub(&self, rhs: &Self, prec: u32) -> Self {
        ApproxComplex::new(
            (&self.re - &rhs.re).complete(prec),
            (&self.im - &rhs.im).complete(prec),
        )
    }

    pub fn mul(&self, rhs: &Self, prec: u32) -> Self {
        let ac = (&self.re * &rhs.re).complete(prec + 2);
        let bd = (&self.im * &rhs.im).complete(prec + 2);
        let ad = (&self.re * &rhs.im).complete(prec + 2);
        let bc = (&self.im * &rhs.re).complete(prec + 2);
        ApproxComplex::new(
            Float::with_val(prec, ac - bd),
            Float::with_val(prec, ad + bc),
        )
    }

    pub fn sqr(&self, prec: u32) -> Self {
        self.mul(self, prec)
    }

    /// Multiply by a real scalar.
    pub fn mul_real(&self, rhs: &Float, prec: u32) -> Self {
        ApproxComplex::new(
            (&self.re * rhs).complete(prec),
            (&self.im * rhs).complete(prec),
        )
    }

    /// Add a real scalar.
    pub fn add_real(&self, rhs: &Float, prec: u32) -> Self {
        ApproxComplex::new(
            (&self.re + rhs).complete(prec),
            Float::with_val(prec, &self.im),
        )
    }

    pub fn div(&self, rhs: &Self, prec: u32) -> Self {
        let wp = prec + 4;
        let den = rhs.norm_sqr(wp);
        let num = self.mul(&rhs.conj(wp), wp);
        ApproxComplex::new(
            Float::with_val(prec, &num.re / &den),
            Float::with_val(prec, &num.im / &den),
        )
    }

    pub fn recip(&self, prec: u32) -> Self {
        ApproxComplex::one(prec + 4).div(self, prec)
    }

    /// |z|² at the given precision.
    pub fn norm_sqr(&self, prec: u32) -> Float {
        let rr = (&self.re * &self.re).complete(prec + 2);
        let ii = (&self.im * &self.im).complete(prec + 2);
        Float::with_val(prec, rr + ii)
    }

    /// |z| at the given precision.
    pub fn abs(&self, prec: u32) -> Float {
        Float::with_val(prec, self.re.clone().hypot(&self.im))
    }

    /// Principal argument in (−π, π].
    ///
    /// The one departure from IEEE atan2: a negative real with zero imaginary
    /// part (either sign of zero) maps to +π, keeping the half-open interval.
    pub fn arg(&self, prec: u32) -> Float {
        if self.im.is_zero() && self.re.is_sign_negative() && !self.re.is_zero() {
            return Float::with_val(prec, Constant::Pi);
        }
        Float::with_val(prec, self.im.clone().atan2(&self.re))
    }

    /// Principal complex logarithm: Im(ln z) ∈ (−π, π]. Errors on z = 0.
    pub fn ln(&self, prec: u32) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("log of zero"));
        }
        let wp = prec + 4;
        let r = self.abs(wp);
        Ok(ApproxComplex::new(
            Float::with_val(prec, r.ln()),
            Float::with_val(prec, self.arg(wp)),
        ))
    }

    /// exp(z) = e^Re (cos Im + i sin Im).
    pub fn exp(&self, prec: u32) -> Self {
        let wp = prec + 4;
        let m = Float::with_val(wp, &self.re).exp();
        let (s, c) = Float::with_val(wp, &self.im).sin_cos(Float::new(wp));
        ApproxComplex::new(
            Float::with_val(prec, &m * &c),
            Float::with_val(prec, &m * &s),
        )
    }

    /// Principal square root: argument of the result in (−π/2, π/2].
    pub fn sqrt(&self, prec: u32) -> Self {
        if self.is_zero() {
            return ApproxComplex::zero(prec);
        }
        let wp = prec + 4;
        let r = self.abs(wp);
        let a = Float::with_val(wp, &self.re);
        let b = Float::with_val(wp, &self.im);
        if a.is_sign_positive() || a.is_zero() {
            // u = sqrt((r+a)/2), v = b/(2u)
            let u = Float::with_val(wp, (&r + &a).complete(wp) / 2u32).sqrt();
            let v = Float::with_val(wp, &b / (Float::with_val(wp, 2 * &u)));
            ApproxComplex::new(Float::with_val(prec, u), Float::with_val(prec, v))
        } else {
            // t = sqrt((r−a)/2); result (|b|/(2t), ±t) with the sign of b.
            let t = Float::with_val(wp, (&r - &a).complete(wp) / 2u32).sqrt();
            if b.is_zero() {
                // negative real axis: +i·sqrt(|z|), keeping arg in (−π/2, π/2]
                return ApproxComplex::new(Float::with_val(prec, 0), Float::with_val(prec, t));
            }
            let u = Float::with_val(wp, b.clone().abs() / Float::with_val(wp, 2 * &t));
            let v = if b.is_sign_negative() { -t } else { t };
            ApproxComplex::new(Float::with_val(prec, u), Float::with_val(prec, v))
        }
    }

    /// Principal cube root via polar form: argument of the result in (−π/3, π/3].
    pub fn cbrt(&self, prec: u32) -> Self {
        if self.is_zero() {
            return ApproxComplex::zero(prec);
        }
        let wp = prec + 8;
        let r = self.abs(wp).cbrt();
        let theta = self.arg(wp) / 3u32;
        let (s, c) = theta.sin_cos(Float::new(wp));
        ApproxComplex::new(
            Float::with_val(prec, &r * &c),
            Float::with_val(prec, &r * &s),
        )
    }

    /// Nonnegative integer power by repeated squaring.
    pub fn powu(&self, mut e: u32, prec: u32) -> Self {
        let mut result = ApproxComplex::one(prec);
        let mut base = self.with_prec(prec);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr(prec);
            }
        }
        result
    }

    /// Absolute distance |self − rhs|.
    pub fn dist(&self, rhs: &Self, prec: u32) -> Float {
        self.sub(rhs, prec + 2).abs(prec)
    }
}

/// Regulated error of `approx` against `reference`: |α − α̃| / max{1, |α|}.
///
/// Returns zero exactly when the two values are identical.
pub fn regulated_error(approx: &ApproxComplex, reference: &ApproxComplex) -> Result<Float> {
    if !reference.is_finite() {
        return Err(Error::domain("regulated error needs a finite reference"));
    }
    let prec = approx.prec().max(reference.prec()) + GUARD_BITS;
    let diff = approx.sub(reference, prec).abs(prec);
    let mag = reference.abs(prec);
    let denom = if mag > 1u32 { mag } else { Float::with_val(prec, 1) };
    Ok(diff / denom)
}

/// Principal-branch complex logarithm at target precision `p`.
///
/// The result r satisfies exp(r) = z to relative precision 2^(−p+2), with
/// Im(r) ∈ (−π, π]. Errors on z = 0.
pub fn complex_log(z: &ApproxComplex, p: PrecBits) -> Result<ApproxComplex> {
    z.ln(p.working()).map(|r| r.with_prec(p.get()))
}

/// Principal n-th root (n ∈ {2, 3}) at target precision `p`.
///
/// The result has argument in (−π/n, π/n]; z = 0 returns 0 exactly.
pub fn complex_root(z: &ApproxComplex, n: u32, p: PrecBits) -> ApproxComplex {
    let w = p.working();
    let r = match n {
        2 => z.sqrt(w),
        3 => z.cbrt(w),
        _ => unreachable!("complex_root supports n in {{2, 3}}"),
    };
    r.with_prec(p.get())
}

/// π with |result − π| ≤ π·2^(−p).
pub fn pi_to(p: PrecBits) -> Float {
    let pi = Float::with_val(p.working(), Constant::Pi);
    Float::with_val(p.get(), pi)
}

/// ln 2 at the given raw precision. Internal helper for bit-count arithmetic.
pub(crate) fn ln2(prec: u32) -> Float {
    Float::with_val(prec, Constant::Log2)
}

/// 2^e as a Float at the given precision (e may be negative).
pub(crate) fn pow2(e: i64, prec: u32) -> Float {
    Float::with_val(prec, 1) << e as i32
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn ac(re: f64, im: f64, prec: u32) -> ApproxComplex {
        ApproxComplex::from_f64(re, im, prec)
    }

    #[test]
    fn regulated_error_examples() {
        // |α| > 1: direct formula
        let e = regulated_error(&ac(2.5, 0.0, 64), &ac(2.0, 0.0, 64)).unwrap();
        assert!((e - Float::with_val(64, 0.25)).abs() < 1e-15);
        // max{1, |α|} = 1
        let e = regulated_error(&ac(0.6, 0.0, 64), &ac(0.5, 0.0, 64)).unwrap();
        assert!((e - Float::with_val(64, 0.1)).abs() < 1e-15);
        // identity
        let z = ac(1.25, -0.75, 64);
        let e = regulated_error(&z, &z).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn regulated_error_rejects_nonfinite_reference() {
        let mut bad = ac(0.0, 0.0, 64);
        bad = ApproxComplex::new(Float::with_val(64, f64::INFINITY), bad.im().clone());
        assert!(regulated_error(&ac(1.0, 0.0, 64), &bad).is_err());
    }

    #[test]
    fn complex_log_branch_and_identity() {
        let p = PrecBits::new(64).unwrap();
        // log 1 = 0
        let r = complex_log(&ac(1.0, 0.0, 64), p).unwrap();
        assert!(r.re().is_zero() && r.im().is_zero());
        // log(−1) = iπ (branch convention: +π, not −π)
        let r = complex_log(&ac(-1.0, 0.0, 64), p).unwrap();
        assert!(r.re().clone().abs() < 1e-18);
        let pi = pi_to(p);
        assert!((r.im().clone() - &pi).abs() < 1e-17);
        // −1 with a negative zero imaginary part gets the same branch
        let neg = ApproxComplex::new(Float::with_val(64, -1), Float::with_val(64, -0.0));
        let r = complex_log(&neg, p).unwrap();
        assert!((r.im().clone() - &pi).abs() < 1e-17);
    }

    #[test]
    fn complex_log_of_exp_2pi() {
        // z = e^{2π} on the positive real axis: log z = 2π to ~2^{−126}
        let p = PrecBits::new(128).unwrap();
        let two_pi = Float::with_val(200, Constant::Pi) * 2u32;
        let z = ApproxComplex::from_real(two_pi.clone().exp());
        let r = complex_log(&z, p).unwrap();
        let err = (r.re().clone() - &two_pi).abs() / &two_pi;
        assert!(err < pow2(-126, 64));
        assert!(r.im().clone().abs() < pow2(-120, 64));
    }

    #[test]
    fn complex_log_rejects_zero() {
        let p = PrecBits::new(64).unwrap();
        assert!(matches!(
            complex_log(&ApproxComplex::zero(64), p),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn complex_root_examples() {
        let p = PrecBits::new(64).unwrap();
        // sqrt(4) = 2 (principal)
        let r = complex_root(&ac(4.0, 0.0, 64), 2, p);
        assert!((r.re().clone() - 2u32).abs() < 1e-17 && r.im().clone().abs() < 1e-17);
        // cbrt(−8): |r| = 2 and r³ = −8
        let z = ac(-8.0, 0.0, 64);
        let r = complex_root(&z, 3, p);
        assert!((r.abs(64) - 2u32).abs() < 1e-15);
        let cube = r.powu(3, 128);
        assert!(regulated_error(&cube, &z).unwrap() < pow2(-60, 64));
        // sqrt(0) = 0 exactly
        let r = complex_root(&ApproxComplex::zero(64), 2, p);
        assert!(r.is_zero());
    }

    #[test]
    fn root_branch_in_principal_sector() {
        let p = PrecBits::new(64).unwrap();
        // sqrt of a negative real sits on the positive imaginary axis (arg = π/2)
        let r = complex_root(&ac(-4.0, 0.0, 64), 2, p);
        assert!(r.re().clone().abs() < 1e-17);
        assert!(r.im().clone() > 0);
        // cbrt arguments stay in (−π/3, π/3]
        for &(re, im) in &[(-1.0, 0.5), (-1.0, -0.5), (0.3, -2.0), (-2.0, 0.0)] {
            let r = complex_root(&ac(re, im, 64), 3, p);
            let theta = r.arg(64).to_f64();
            let third = std::f64::consts::PI / 3.0;
            assert!(theta > -third - 1e-12 && theta <= third + 1e-12);
        }
    }

    #[test]
    fn exp_log_round_trip_regulated() {
        let p = PrecBits::new(96).unwrap();
        for &(re, im) in &[
            (3.5, -2.25),
            (-0.001, 0.002),
            (1e10, -3.0),
            (-7.0, 0.0),
            (0.0, 5.5),
        ] {
            let z = ac(re, im, 256);
            let l = complex_log(&z, p).unwrap();
            let back = l.exp(p.working());
            let err = regulated_error(&back, &z).unwrap();
            assert!(err < pow2(-(96 - 4) as i64, 64), "err {err} for ({re},{im})");
        }
    }

    #[test]
    fn root_power_round_trip_regulated() {
        let p = PrecBits::new(96).unwrap();
        for n in [2u32, 3] {
            for &(re, im) in &[(2.0, 3.0), (-1.5, 0.25), (1e-8, -1e-8), (-4.0, 0.0)] {
                let z = ac(re, im, 256);
                let r = complex_root(&z, n, p);
                let back = r.powu(n, p.working());
                let err = regulated_error(&back, &z).unwrap();
                assert!(err < pow2(-(96 - 4) as i64, 64), "n={n} err {err}");
            }
        }
    }

    /// Machin's formula with exact rational arithmetic: an oracle for π that
    /// shares no code with MPFR's constant.
    fn pi_machin(bits: u32) -> Float {
        fn atan_inv(q: u64, bits: u32) -> Rational {
            let mut sum = Rational::new();
            let q2 = Rational::from((1u32, q * q));
            let mut power = Rational::from((1u32, q));
            let mut k = 0u32;
            loop {
                let term = Rational::from(&power / Rational::from(2 * k + 1));
                if k % 2 == 0 {
                    sum += &term;
                } else {
                    sum -= &term;
                }
                // stop once q^{2k+1} exceeds 2^{bits+16}
                let mag = (2 * k as u64 + 1) as f64 * (q as f64).log2();
                if mag > (bits + 16) as f64 {
                    break;
                }
                power *= &q2;
                k += 1;
            }
            sum
        }
        let s = Rational::from(16) * atan_inv(5, bits) - Rational::from(4) * atan_inv(239, bits);
        Float::with_val(bits + 8, s)
    }

    /// Arithmetic-geometric-mean iteration for π (Gauss–Brent–Salamin),
    /// a second independent route.
    fn pi_agm(bits: u32) -> Float {
        let w = bits + 32;
        let mut a = Float::with_val(w, 1);
        let mut b = Float::with_val(w, 0.5).sqrt();
        let mut t = Float::with_val(w, 0.25);
        let mut x = Float::with_val(w, 1);
        for _ in 0..(32 - (bits.leading_zeros().min(26))) {
            let an = Float::with_val(w, (&a + &b).complete(w) / 2u32);
            let bn = (a.clone() * &b).sqrt();
            let d = Float::with_val(w, &a - &an);
            t -= Float::with_val(w, &x * &d) * &d;
            x *= 2u32;
            a = an;
            b = bn;
        }
        let num = Float::with_val(w, (&a + &b).complete(w)).square();
        num / (Float::with_val(w, 4 * &t))
    }

    #[test]
    fn pi_matches_independent_oracles() {
        for bits in [53u32, 128, 512] {
            let p = PrecBits::new(bits).unwrap();
            let ours = pi_to(p);
            let machin = pi_machin(bits);
            let agm = pi_agm(bits);
            let tol = pow2(-(bits as i64) + 2, 64);
            assert!((Float::with_val(bits + 8, &ours) - &machin).abs() < tol);
            assert!((Float::with_val(bits + 8, &ours) - &agm).abs() < tol);
        }
        // f64 spot check
        assert!((pi_to(PrecBits::new(53).unwrap()).to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn pi_monotone_refinement() {
        let p = PrecBits::new(100).unwrap();
        let p2 = PrecBits::new(200).unwrap();
        let diff = (Float::with_val(256, pi_to(p2)) - pi_to(p)).abs();
        assert!(diff < pow2(-99, 64));
    }

    #[test]
    fn precision_doubling_consistency() {
        // Operations at 2p, rounded back, agree with the p-bit computation.
        let cases = [(1.5, 2.5), (-0.25, 1e6), (3.0, -4.0), (1e-12, 7.0)];
        for &(re, im) in &cases {
            let z = ac(re, im, 512);
            for p in [64u32, 128] {
                let pb = PrecBits::new(p).unwrap();
                let pb2 = PrecBits::new(2 * p).unwrap();
                let lo = complex_log(&z, pb).unwrap();
                let hi = complex_log(&z, pb2).unwrap().with_prec(p);
                let err = regulated_error(&lo, &hi).unwrap();
                assert!(err < pow2(-(p as i64) + 2, 64));
                let lo = complex_root(&z, 3, pb);
                let hi = complex_root(&z, 3, pb2).with_prec(p);
                let err = regulated_error(&lo, &hi).unwrap();
                assert!(err < pow2(-(p as i64) + 2, 64));
            }
        }
    }

    #[test]
    fn prec_bits_floor() {
        assert!(PrecBits::new(52).is_err());
        assert!(PrecBits::new(53).is_ok());
    }
}
