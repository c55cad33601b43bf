//! The level-2 modular polynomial Φ₂(X, Y) as exact integer data, its
//! specialization to a cubic in the second variable, and Newton iteration
//! with Kantorovich convergence certificates.
//!
//! The roots of Φ₂(j(τ), z) are j(2τ), j(τ/2), and j((τ+1)/2).

use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::precision::{ApproxComplex, PrecBits};

/// The nine nonzero integer coefficients of
/// Φ₂(X,Y) = X³ + Y³ − X²Y² + 1488(X²Y + XY²) − 162000(X² + Y²)
///           + 40773375·XY + 8748000000(X + Y) − 157464000000000,
/// stored exactly. Symmetric under X ↔ Y.
#[derive(Debug, Clone)]
pub struct Phi2Poly {
    pub c_x2y: Integer,
    pub c_x2: Integer,
    pub c_xy: Integer,
    pub c_x: Integer,
    pub c_const: Integer,
}

impl Default for Phi2Poly {
    fn default() -> Self {
        Phi2Poly {
            c_x2y: Integer::from(1488),
            c_x2: Integer::from(-162000),
            c_xy: Integer::from(40773375i64),
            c_x: Integer::from(8748000000i64),
            c_const: Integer::from(-157464000000000i64),
        }
    }
}

impl Phi2Poly {
    pub fn new() -> Self {
        Self::default()
    }

    /// Exact evaluation on integers.
    pub fn eval_int(&self, x: &Integer, y: &Integer) -> Integer {
        let x2 = Integer::from(x * x);
        let y2 = Integer::from(y * y);
        let mut acc = Integer::from(&x2 * x) + Integer::from(&y2 * y);
        acc -= Integer::from(&x2 * &y2);
        acc += Integer::from(&self.c_x2y * &x2) * y + Integer::from(&self.c_x2y * &y2) * x;
        acc += Integer::from(&self.c_x2 * &x2) + Integer::from(&self.c_x2 * &y2);
        acc += Integer::from(&self.c_xy * x) * y;
        acc += Integer::from(&self.c_x * x) + Integer::from(&self.c_x * y);
        acc += &self.c_const;
        acc
    }

    /// Evaluation at complex arguments via the cubic specialization in y;
    /// exact integer inputs evaluate exactly up to the final rounding.
    pub fn eval(&self, x: &ApproxComplex, y: &ApproxComplex, prec: u32) -> ApproxComplex {
        let w = prec + 16;
        self.specialize_at(x, w).eval(y, prec)
    }

    /// Specialize the first argument, producing the monic cubic in z.
    pub fn specialize_at(&self, j_tilde: &ApproxComplex, prec: u32) -> Phi2Cubic {
        let w = prec + 8;
        let x = j_tilde.with_prec(w);
        let x2 = x.sqr(w);
        let x3 = x2.mul(&x, w);
        let fi = |i: &Integer| Float::with_val(w, i);
        // c2 = −j̃² + 1488 j̃ − 162000
        let c2 = x
            .mul_real(&fi(&self.c_x2y), w)
            .sub(&x2, w)
            .add_real(&fi(&self.c_x2), w);
        // c1 = 1488 j̃² + 40773375 j̃ + 8748000000
        let c1 = x2
            .mul_real(&fi(&self.c_x2y), w)
            .add(&x.mul_real(&fi(&self.c_xy), w), w)
            .add_real(&fi(&self.c_x), w);
        // c0 = j̃³ − 162000 j̃² + 8748000000 j̃ − 157464000000000
        let c0 = x3
            .add(&x2.mul_real(&fi(&self.c_x2), w), w)
            .add(&x.mul_real(&fi(&self.c_x), w), w)
            .add_real(&fi(&self.c_const), w);
        Phi2Cubic {
            c2: c2.with_prec(prec),
            c1: c1.with_prec(prec),
            c0: c0.with_prec(prec),
        }
    }
}

/// Exact evaluation of Φ₂ on integer arguments.
pub fn phi2_eval_int(x: &Integer, y: &Integer) -> Integer {
    Phi2Poly::new().eval_int(x, y)
}

/// Φ₂ at complex arguments.
pub fn phi2_eval(x: &ApproxComplex, y: &ApproxComplex, prec: u32) -> ApproxComplex {
    Phi2Poly::new().eval(x, y, prec)
}

/// The monic cubic z³ + c2·z² + c1·z + c0 obtained by fixing the first
/// argument of Φ₂.
#[derive(Debug, Clone)]
pub struct Phi2Cubic {
    pub c2: ApproxComplex,
    pub c1: ApproxComplex,
    pub c0: ApproxComplex,
}

impl Phi2Cubic {
    /// Horner evaluation at working precision.
    pub fn eval(&self, z: &ApproxComplex, prec: u32) -> ApproxComplex {
        let w = prec + 8;
        z.add(&self.c2, w)
            .mul(z, w)
            .add(&self.c1, w)
            .mul(z, w)
            .add(&self.c0, w)
            .with_prec(prec)
    }

    /// Derivative 3z² + 2·c2·z + c1.
    pub fn eval_deriv(&self, z: &ApproxComplex, prec: u32) -> ApproxComplex {
        let w = prec + 8;
        let three_z = z.mul_real(&Float::with_val(w, 3), w);
        let two_c2 = self.c2.mul_real(&Float::with_val(w, 2), w);
        three_z
            .add(&two_c2, w)
            .mul(z, w)
            .add(&self.c1, w)
            .with_prec(prec)
    }
}

/// Specialize Φ₂ at a fixed first argument.
pub fn specialize(j_tilde: &ApproxComplex, prec: u32) -> Phi2Cubic {
    Phi2Poly::new().specialize_at(j_tilde, prec)
}

/// The quantities of Kantorovich's convergence theorem for Newton's method:
/// η bounds ‖Γ₀F(x₀)‖, K bounds ‖Γ₀F″‖ on the ball of radius r, h = Kη.
/// Convergence is certified when h ≤ 1/2 and r ≥ 2η, with
/// ‖x* − x_k‖ ≤ (1/2^k)(2h)^{2^k}·η/h.
#[derive(Debug, Clone)]
pub struct KantorovichCertificate {
    pub eta: Float,
    pub k_bound: Float,
    pub h: Float,
    pub r: Float,
    pub ok: bool,
}

/// Build a certificate from the bounds η, K, and ball radius r.
pub fn kantorovich_check(eta: &Float, k_bound: &Float, r: &Float) -> KantorovichCertificate {
    let prec = 64;
    let eta = Float::with_val(prec, eta);
    let k_bound = Float::with_val(prec, k_bound);
    let r = Float::with_val(prec, r);
    let h = Float::with_val(prec, &eta * &k_bound);
    let ok = h <= 0.5 && r >= Float::with_val(prec, 2 * &eta);
    KantorovichCertificate { eta, k_bound, h, r, ok }
}

impl KantorovichCertificate {
    /// Smallest k with (1/2^k)(2h)^{2^k}·η/h ≤ 2^(−bound_bits), when the
    /// certificate holds. With h = 0 the iteration is already exact.
    pub fn steps_for(&self, bound_bits: u32) -> Option<u32> {
        if !self.ok {
            return None;
        }
        if self.eta.is_zero() || self.h.is_zero() {
            return Some(0);
        }
        let log2_2h = (Float::with_val(64, 2 * &self.h)).log2().to_f64();
        let log2_eta_h = (Float::with_val(64, &self.eta / &self.h)).log2().to_f64();
        for k in 0..128u32 {
            let t = 2f64.powi(k as i32) * log2_2h - k as f64 + log2_eta_h;
            if t <= -(bound_bits as f64) {
                return Some(k);
            }
        }
        None
    }
}

/// Exactly `steps` Newton iterations z ← z − f(z)/f′(z) on the cubic at
/// precision p plus guard bits. Convergence is the caller's responsibility
/// (the caller holds the Kantorovich certificate).
pub fn newton_solve(
    cubic: &Phi2Cubic,
    z0: &ApproxComplex,
    steps: u32,
    p: PrecBits,
) -> Result<ApproxComplex> {
    newton_solve_trace(cubic, z0, steps, p).map(|(z, _)| z)
}

/// As [`newton_solve`], also returning |f(z)| after each step.
pub fn newton_solve_trace(
    cubic: &Phi2Cubic,
    z0: &ApproxComplex,
    steps: u32,
    p: PrecBits,
) -> Result<(ApproxComplex, Vec<Float>)> {
    let w = p.working();
    let mut z = z0.with_prec(w);
    let mut residuals = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let d = cubic.eval_deriv(&z, w);
        if d.is_zero() {
            return Err(Error::ZeroDerivative);
        }
        let f = cubic.eval(&z, w);
        z = z.sub(&f.div(&d, w), w);
        residuals.push(cubic.eval(&z, w).abs(64));
    }
    Ok((z.with_prec(p.get()), residuals))
}
