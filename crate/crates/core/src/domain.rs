//! SL₂(ℤ) reduction of points of the upper half-plane into the fundamental
//! domain F = {−1/2 < Re τ ≤ 1/2, |τ| > 1} ∪ {|τ| = 1, Re τ ≥ 0}.
//!
//! Matrix entries are exact integers; reduction of points with tiny imaginary
//! part can produce large entries, which arbitrary-size integers absorb.

use rug::ops::CompleteRound;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::precision::{pow2, ApproxComplex, PrecBits};

/// An integer matrix [[a, b], [c, d]] with determinant exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMatrix {
    pub a: Integer,
    pub b: Integer,
    pub c: Integer,
    pub d: Integer,
}

impl UnimodularMatrix {
    pub fn new(a: Integer, b: Integer, c: Integer, d: Integer) -> Result<Self> {
        let m = UnimodularMatrix { a, b, c, d };
        if m.det() != 1 {
            return Err(Error::domain(format!("matrix determinant {} != 1", m.det())));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        UnimodularMatrix {
            a: Integer::from(1),
            b: Integer::from(0),
            c: Integer::from(0),
            d: Integer::from(1),
        }
    }

    /// τ ↦ τ + n.
    pub fn translation(n: &Integer) -> Self {
        UnimodularMatrix {
            a: Integer::from(1),
            b: n.clone(),
            c: Integer::from(0),
            d: Integer::from(1),
        }
    }

    /// τ ↦ −1/τ.
    pub fn inversion() -> Self {
        UnimodularMatrix {
            a: Integer::from(0),
            b: Integer::from(-1),
            c: Integer::from(1),
            d: Integer::from(0),
        }
    }

    pub fn det(&self) -> Integer {
        Integer::from(&self.a * &self.d) - Integer::from(&self.b * &self.c)
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1 && self.b == 0 && self.c == 0 && self.d == 1
    }

    /// Matrix product self·rhs.
    pub fn compose(&self, rhs: &Self) -> Self {
        UnimodularMatrix {
            a: Integer::from(&self.a * &rhs.a) + Integer::from(&self.b * &rhs.c),
            b: Integer::from(&self.a * &rhs.b) + Integer::from(&self.b * &rhs.d),
            c: Integer::from(&self.c * &rhs.a) + Integer::from(&self.d * &rhs.c),
            d: Integer::from(&self.c * &rhs.b) + Integer::from(&self.d * &rhs.d),
        }
    }

    pub fn inverse(&self) -> Self {
        UnimodularMatrix {
            a: self.d.clone(),
            b: Integer::from(-&self.b),
            c: Integer::from(-&self.c),
            d: self.a.clone(),
        }
    }

    /// Möbius action (aτ + b) / (cτ + d) evaluated at the given precision.
    pub fn apply(&self, tau: &ApproxComplex, prec: u32) -> ApproxComplex {
        let w = prec + 8;
        let ebits = |i: &Integer| i.significant_bits();
        let fp = w.max(ebits(&self.a).max(ebits(&self.b)).max(ebits(&self.c)).max(ebits(&self.d)) + 2);
        let fa = Float::with_val(fp, &self.a);
        let fb = Float::with_val(fp, &self.b);
        let fc = Float::with_val(fp, &self.c);
        let fd = Float::with_val(fp, &self.d);
        let num = tau.mul_real(&fa, w).add_real(&fb, w);
        let den = tau.mul_real(&fc, w).add_real(&fd, w);
        num.div(&den, prec)
    }

    /// Flip the overall sign so that c > 0, or c = 0 and a > 0. The two signs
    /// act identically on the upper half-plane.
    pub fn sign_normalized(&self) -> Self {
        let flip = self.c < 0 || (self.c == 0 && self.a < 0);
        if flip {
            UnimodularMatrix {
                a: Integer::from(-&self.a),
                b: Integer::from(-&self.b),
                c: Integer::from(-&self.c),
                d: Integer::from(-&self.d),
            }
        } else {
            self.clone()
        }
    }
}

/// A point certified to lie in the fundamental domain, with the matrix that
/// reduced the original input onto it.
#[derive(Debug, Clone)]
pub struct FundamentalPoint {
    tau: ApproxComplex,
    reducer: UnimodularMatrix,
}

impl FundamentalPoint {
    /// Validates membership at tolerance `tol` before constructing.
    pub fn new(tau: ApproxComplex, reducer: UnimodularMatrix, tol: &Float) -> Result<Self> {
        if !in_f(&tau, tol) {
            return Err(Error::domain(
                "point is not in the fundamental domain at the given tolerance",
            ));
        }
        Ok(FundamentalPoint { tau, reducer })
    }

    pub fn tau(&self) -> &ApproxComplex {
        &self.tau
    }

    pub fn reducer(&self) -> &UnimodularMatrix {
        &self.reducer
    }

    pub fn into_tau(self) -> ApproxComplex {
        self.tau
    }
}

/// Membership test for F with boundary comparisons at tolerance `tol`.
pub fn in_f(tau: &ApproxComplex, tol: &Float) -> bool {
    let w = tau.prec().max(64) + 8;
    let re = tau.re();
    if !tau.is_finite() || !(tau.im().clone() > 0) {
        return false;
    }
    let half = Float::with_val(w, 0.5);
    if re.clone() <= -(half.clone() + tol) || re.clone() > half + tol {
        return false;
    }
    let ns = tau.norm_sqr(w);
    let two_tol = Float::with_val(w, 2 * tol);
    if ns < Float::with_val(w, 1) - &two_tol {
        return false;
    }
    if ns <= Float::with_val(w, 1) + &two_tol {
        // on the unit arc: only the Re ≥ 0 half belongs to F
        return re.clone() >= -tol.clone();
    }
    true
}

/// Reduce τ (Im τ > 0) into F. The returned matrix γ satisfies
/// γ·τ = returned point, as a Möbius action evaluated at precision p.
pub fn reduce_to_f(tau: &ApproxComplex, p: PrecBits) -> Result<FundamentalPoint> {
    if !tau.is_finite() || !(tau.im().clone() > 0) {
        return Err(Error::domain("reduction requires Im(tau) > 0"));
    }
    let w = p.working();
    let tol = pow2(-(p.get() as i64) + 8, w);
    let mut z = tau.with_prec(w);
    let mut m = UnimodularMatrix::identity();

    let max_iters = 10_000usize + 4 * w as usize;
    let mut done = false;
    for _ in 0..max_iters {
        // translate Re into [−1/2, 1/2]
        let n = z
            .re()
            .clone()
            .round()
            .to_integer()
            .ok_or_else(|| Error::domain("non-finite real part during reduction"))?;
        if n != 0 {
            let fb = w.max(n.significant_bits() + 2);
            let nf = Float::with_val(fb, &n);
            z = ApproxComplex::new(Float::with_val(w, z.re() - nf), z.im().clone());
            m = UnimodularMatrix::translation(&Integer::from(-&n)).compose(&m);
        }
        // invert if strictly inside the unit circle
        let ns = z.norm_sqr(w);
        if ns < Float::with_val(w, 1) - &tol {
            z = z.recip(w).neg(w);
            m = UnimodularMatrix::inversion().compose(&m);
        } else {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::convergence("fundamental-domain reduction did not terminate"));
    }

    // canonicalize the half-open boundaries
    let half = Float::with_val(w, 0.5);
    if (z.re().clone() + &half).abs() <= tol {
        // Re ≈ −1/2: the in-F representative is the +1/2 translate
        z = ApproxComplex::new(Float::with_val(w, z.re() + 1u32), z.im().clone());
        m = UnimodularMatrix::translation(&Integer::from(1)).compose(&m);
    }
    let ns = z.norm_sqr(w);
    if (ns - Float::with_val(w, 1)).abs() <= Float::with_val(w, 2 * &tol)
        && z.re().clone() < -tol.clone()
    {
        // on the arc with Re < 0: map to the Re > 0 half
        z = z.recip(w).neg(w);
        m = UnimodularMatrix::inversion().compose(&m);
    }

    let z = z.with_prec(p.get());
    FundamentalPoint::new(z, m, &tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::j_qseries;
    use crate::precision::regulated_error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ac(re: f64, im: f64) -> ApproxComplex {
        ApproxComplex::from_f64(re, im, 192)
    }

    #[test]
    fn translation_only() {
        let p = PrecBits::new(128).unwrap();
        let r = reduce_to_f(&ac(1.0, 1.0), p).unwrap();
        assert!((r.tau().re().clone()).abs() < 1e-30);
        assert!((r.tau().im().clone() - 1u32).abs() < 1e-30);
        assert_eq!(r.reducer().b, -1);
        assert_eq!(r.reducer().a, 1);

        let r = reduce_to_f(&ac(2.5, 2.0), p).unwrap();
        assert!((r.tau().re().clone() - 0.5f64).abs() < 1e-30);
        assert!((r.tau().im().clone() - 2u32).abs() < 1e-30);
    }

    #[test]
    fn inversion_then_translation() {
        let p = PrecBits::new(128).unwrap();
        let r = reduce_to_f(&ac(0.5, 0.5), p).unwrap();
        assert!(r.tau().re().clone().abs() < 1e-30);
        assert!((r.tau().im().clone() - 1u32).abs() < 1e-30);
        // the reducer applied to the input reproduces the output
        let back = r.reducer().apply(&ac(0.5, 0.5), 128);
        assert!(back.dist(r.tau(), 128) < pow2(-100, 64));
    }

    #[test]
    fn membership_examples() {
        let tol = pow2(-60, 64);
        assert!(in_f(&ac(0.0, 1.0), &tol));
        // left corner is excluded; its translate is in F
        let s3 = Float::with_val(192, 3).sqrt() / 2u32;
        let left = ApproxComplex::new(Float::with_val(192, -0.5), s3.clone());
        let right = ApproxComplex::new(Float::with_val(192, 0.5), s3);
        assert!(!in_f(&left, &tol));
        assert!(in_f(&right, &tol));
        assert!(!in_f(&ac(0.4, 0.5), &tol));
        // interior point
        assert!(in_f(&ac(0.1, 2.0), &tol));
        // arc with negative real part is excluded (f64 trig puts the point
        // within ~1e-16 of the arc, so test at a coarser tolerance)
        let th = 0.6 * std::f64::consts::PI;
        assert!(!in_f(&ac(th.cos(), th.sin()), &Float::with_val(64, 1e-12)));
    }

    #[test]
    fn reducer_determinant_is_one() {
        let p = PrecBits::new(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let tau = ac(rng.gen_range(-8.0..8.0), rng.gen_range(0.05..4.0));
            let r = reduce_to_f(&tau, p).unwrap();
            assert_eq!(r.reducer().det(), 1);
        }
    }

    #[test]
    fn idempotence() {
        let p = PrecBits::new(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let tau = ac(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..5.0));
            let once = reduce_to_f(&tau, p).unwrap();
            let twice = reduce_to_f(once.tau(), p).unwrap();
            assert!(twice.reducer().is_identity(), "reducer {:?}", twice.reducer());
            assert!(once.tau().dist(twice.tau(), 128) < pow2(-100, 64));
        }
    }

    /// Random γ·τ_F round trips: reduction recovers the F-representative.
    #[test]
    fn recovers_fundamental_representative() {
        let p = PrecBits::new(160).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 40 {
            // interior sample, away from the boundary
            let re = rng.gen_range(-0.49..0.49);
            let im = rng.gen_range(1.02..2.8);
            let tau_f = ac(re, im);
            if !in_f(&tau_f, &pow2(-80, 64)) {
                continue;
            }
            // random word in S and T of bounded length
            let mut g = UnimodularMatrix::identity();
            for _ in 0..rng.gen_range(1..8) {
                if rng.gen_bool(0.5) {
                    let n = Integer::from(rng.gen_range(-3i32..=3));
                    g = UnimodularMatrix::translation(&n).compose(&g);
                } else {
                    g = UnimodularMatrix::inversion().compose(&g);
                }
            }
            let moved = g.apply(&tau_f, 512);
            if !(moved.im().clone() > 1e-6) {
                continue;
            }
            let r = reduce_to_f(&moved, p).unwrap();
            assert!(
                r.tau().dist(&tau_f, 160) < pow2(-120, 64),
                "expected {:?} got {:?}",
                tau_f,
                r.tau()
            );
            // reducer·γ must be ±identity
            let comp = r.reducer().compose(&g).sign_normalized();
            assert!(comp.is_identity(), "composite {:?}", comp);
            done += 1;
        }
    }

    /// j agrees on SL₂(ℤ)-equivalent points: j(reduce(τ)) = j(τ).
    #[test]
    fn j_invariance_under_reduction() {
        let p = PrecBits::new(192).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut done = 0;
        while done < 25 {
            let tau = ac(rng.gen_range(-2.0..2.0), rng.gen_range(0.55..3.0));
            let r = reduce_to_f(&tau, p).unwrap();
            // q-series certification needs Im ≥ 0.5 on both sides
            if !(tau.im().clone() >= 0.55) {
                continue;
            }
            let j_direct = j_qseries(&tau, p).unwrap();
            let j_reduced = j_qseries(r.tau(), p).unwrap();
            let err = regulated_error(&j_reduced, &j_direct).unwrap();
            assert!(err < pow2(-(192i64 - 8), 64), "err {err}");
            done += 1;
        }
    }
}
