//! Evaluation of the modular j-invariant and its relatives with rigorous
//! truncation bounds.
//!
//! The q-expansion coefficients of j are computed exactly as integers from
//! E₄³/Δ (Δ as the 24th power of the Euler product, which is sparse by the
//! pentagonal number theorem) and cached. Truncation indices are chosen so
//! that the certified coefficient bound 4·e^{4π√n} makes the discarded tail
//! smaller than the rounding budget.

use once_cell::sync::Lazy;
use rug::ops::{CompleteRound, Pow};
use rug::{Float, Integer};
use std::sync::RwLock;

use crate::domain::reduce_to_f;
use crate::error::{Error, Result};
use crate::precision::{pow2, ApproxComplex, PrecBits, GUARD_BITS};

const LN2: f64 = std::f64::consts::LN_2;
const PI: f64 = std::f64::consts::PI;

/// log₂ of the certified bound 4·e^{4π√n} on the n-th q-coefficient of j.
///
/// Monotone increasing in n; the k-th derivative picks up an extra (2πn)^k.
pub fn coefficient_bound_log2(n: u64) -> f64 {
    2.0 + 4.0 * PI * (n as f64).sqrt() / LN2
}

/// Interval certified for |j″(i)|.
pub const J2_AT_I_INTERVAL: (f64, f64) = (49_600.0, 49_700.0);
/// Interval certified for |j‴(ρ)|, ρ = (1 + i√3)/2.
pub const J3_AT_RHO_INTERVAL: (f64, f64) = (274_000.0, 275_000.0);

// ---------------------------------------------------------------------------
// exact q-expansion coefficients of j
// ---------------------------------------------------------------------------

/// Cache of c(0), c(1), … where j = q⁻¹ + Σ_{n≥0} c(n) qⁿ.
static J_COEFFS: Lazy<RwLock<Vec<Integer>>> = Lazy::new(|| RwLock::new(Vec::new()));

/// Multiply two dense integer power series, truncated at degree `n_max`.
fn mul_dense(a: &[Integer], b: &[Integer], n_max: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); n_max + 1];
    for (i, ai) in a.iter().enumerate().take(n_max + 1) {
        if *ai == 0u32 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n_max + 1 - i) {
            out[i + j] += Integer::from(ai * bj);
        }
    }
    out
}

/// Divide a dense integer series by the Euler product Π(1−qⁿ) in place.
/// The divisor is ±1-sparse at generalized pentagonal indices.
fn div_by_euler_product(a: &mut [Integer]) {
    let n_max = a.len() - 1;
    // pentagonal indices with signs: φ = 1 + Σ_k (−1)^k (q^{k(3k−1)/2} + q^{k(3k+1)/2})
    let mut pent: Vec<(usize, bool)> = Vec::new();
    let mut k = 1usize;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > n_max {
            break;
        }
        let neg = k % 2 == 1;
        pent.push((g1, neg));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= n_max {
            pent.push((g2, neg));
        }
        k += 1;
    }
    for n in 0..=n_max {
        // b[n] = a[n] − Σ φ[g]·b[n−g]; the quotient overwrites a in place
        let mut acc = a[n].clone();
        for &(g, neg) in &pent {
            if g > n {
                break;
            }
            if neg {
                acc += &a[n - g];
            } else {
                acc -= &a[n - g];
            }
        }
        a[n] = acc;
    }
}

/// σ₃ sieve for E₄ = 1 + 240 Σ σ₃(n) qⁿ.
fn sigma3_table(n_max: usize) -> Vec<u64> {
    let mut s = vec![0u64; n_max + 1];
    for d in 1..=n_max {
        let d3 = (d as u64).pow(3);
        let mut m = d;
        while m <= n_max {
            s[m] += d3;
            m += d;
        }
    }
    s
}

fn compute_j_coefficients(n_target: usize) -> Vec<Integer> {
    // series of j·q up to degree n_target + 1
    let n_max = n_target + 1;
    let sig = sigma3_table(n_max);
    let mut e4 = vec![Integer::new(); n_max + 1];
    e4[0] = Integer::from(1);
    for n in 1..=n_max {
        e4[n] = Integer::from(240u64) * sig[n];
    }
    let e4sq = mul_dense(&e4, &e4, n_max);
    let mut num = mul_dense(&e4sq, &e4, n_max);
    for _ in 0..24 {
        div_by_euler_product(&mut num);
    }
    // num[n] is now the coefficient of qⁿ in j·q
    assert!(num[0] == 1 && num[1] == 744, "q-expansion self-check failed");
    num.rotate_left(1);
    num.truncate(n_target + 1);
    num
}

/// Make sure c(0)…c(n) are cached; readers run concurrently, extensions are
/// serialized by the write lock.
fn ensure_j_coefficients(n: usize) {
    {
        let guard = J_COEFFS.read().unwrap();
        if guard.len() > n {
            return;
        }
    }
    let mut guard = J_COEFFS.write().unwrap();
    if guard.len() > n {
        return;
    }
    let target = (n + 16).max(guard.len() * 2);
    *guard = compute_j_coefficients(target);
}

/// Exact n-th q-coefficient of j (n ≥ 0; the q⁻¹ coefficient is 1).
pub fn j_coefficient(n: usize) -> Integer {
    ensure_j_coefficients(n);
    J_COEFFS.read().unwrap()[n].clone()
}

// ---------------------------------------------------------------------------
// truncation bounds
// ---------------------------------------------------------------------------

/// log₂ of the bound on the magnitude of the n-th series term of the k-th
/// derivative at height y: 4·(2πn)^k·e^{4π√n}·e^{−2πny}.
fn term_bound_log2(n: u64, k: u32, y: f64) -> f64 {
    let mut b = coefficient_bound_log2(n) - 2.0 * PI * (n as f64) * y / LN2;
    if k > 0 && n > 0 {
        b += k as f64 * (2.0 * PI * n as f64).log2();
    }
    b
}

/// Smallest N so that the tail Σ_{n>N} of the k-th differentiated series is
/// below 2^(−bits). Requires y ≥ 0.5.
fn truncation_index(k: u32, y: f64, bits: i64) -> usize {
    let y = y.min(1.0e9);
    let mut n = 4u64;
    loop {
        // geometric domination from n+1 on: per-step decay of at least 2 bits
        let decay =
            2.0 * PI * (y - 1.0 / ((n + 1) as f64).sqrt()) / LN2 - k as f64 * 1.585 / (n as f64);
        if decay >= 2.0 && term_bound_log2(n + 1, k, y) + 1.0 <= -(bits as f64) {
            return n as usize;
        }
        n += 1 + n / 16;
    }
}

fn im_as_f64(tau: &ApproxComplex) -> f64 {
    tau.im().to_f64()
}

fn check_im_gate(tau: &ApproxComplex, what: &str) -> Result<f64> {
    let y = im_as_f64(tau);
    if !(y >= 0.5) {
        return Err(Error::precision(format!(
            "{what} requires Im(tau) >= 0.5 for a certified tail bound, got {y}"
        )));
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// j and its derivatives from the q-expansion
// ---------------------------------------------------------------------------

/// e^{2πiτ} at the given precision.
fn nome(tau: &ApproxComplex, prec: u32) -> ApproxComplex {
    let w = prec + 8;
    let two_pi = Float::with_val(w, rug::float::Constant::Pi) * 2u32;
    // 2πiτ = (−2πY, 2πX)
    let e = ApproxComplex::new(
        Float::with_val(w, -(tau.im().clone()) * &two_pi),
        Float::with_val(w, tau.re() * &two_pi),
    );
    e.exp(prec)
}

/// j(τ) by the q-expansion with exact integer coefficients.
///
/// Regulated error against the true value is at most 2^(−p). The tail is
/// certified only for Im(τ) ≥ 0.5; smaller heights are refused.
pub fn j_qseries(tau: &ApproxComplex, p: PrecBits) -> Result<ApproxComplex> {
    j_series_inner(tau, 0, p)
}

/// Order-k derivative of j (k ∈ {1, 2, 3}) by the term-by-term differentiated
/// q-series, same gate and error contract as [`j_qseries`].
pub fn j_derivative(tau: &ApproxComplex, order: u32, p: PrecBits) -> Result<ApproxComplex> {
    if !(1..=3).contains(&order) {
        return Err(Error::domain("derivative order must be 1, 2, or 3"));
    }
    j_series_inner(tau, order, p)
}

fn j_series_inner(tau: &ApproxComplex, k: u32, p: PrecBits) -> Result<ApproxComplex> {
    let y = check_im_gate(tau, "j_qseries")?;
    let w = p.working();
    let n_top = truncation_index(k, y, p.get() as i64 + 8);
    ensure_j_coefficients(n_top);
    let coeffs = J_COEFFS.read().unwrap();

    let q = nome(tau, w);
    // inner sum: (−1)^k q⁻¹ + Σ_{n≥1} c(n) n^k qⁿ  (k = 0 includes c(0) = 744)
    let mut acc = ApproxComplex::zero(w);
    for n in (1..=n_top).rev() {
        let scaled = if k == 0 {
            coeffs[n].clone()
        } else {
            coeffs[n].clone() * Integer::from(n as u64).pow(k)
        };
        acc = ApproxComplex::new(
            (acc.re() + &scaled).complete(w),
            acc.im().clone(),
        );
        acc = acc.mul(&q, w);
    }
    if k == 0 {
        acc = ApproxComplex::new((acc.re() + &coeffs[0]).complete(w), acc.im().clone());
    }
    let q_inv = q.recip(w);
    if k % 2 == 1 {
        acc = acc.sub(&q_inv, w);
    } else {
        acc = acc.add(&q_inv, w);
    }
    if k == 0 {
        return Ok(acc.with_prec(p.get()));
    }
    // multiply by (2πi)^k
    let two_pi = Float::with_val(w, rug::float::Constant::Pi) * 2u32;
    let factor = Float::with_val(w, two_pi.pow(k as i32));
    let rotated = match k {
        1 => ApproxComplex::new(
            Float::with_val(w, -(acc.im().clone()) * &factor),
            Float::with_val(w, acc.re() * &factor),
        ),
        2 => acc.mul_real(&(-factor), w),
        3 => ApproxComplex::new(
            Float::with_val(w, acc.im() * &factor),
            Float::with_val(w, -(acc.re().clone()) * &factor),
        ),
        _ => unreachable!(),
    };
    Ok(rotated.with_prec(p.get()))
}

// ---------------------------------------------------------------------------
// j from theta constants
// ---------------------------------------------------------------------------

/// j(τ) from eighth powers of the theta constants:
/// j = 32·(θ₂⁸ + θ₃⁸ + θ₄⁸)³ / (θ₂θ₃θ₄)⁸.
///
/// The theta series decay quadratically, so only O(√p) terms are needed.
/// Agrees with [`j_qseries`] to regulated error 2^(−p).
pub fn j_theta(tau: &ApproxComplex, p: PrecBits) -> Result<ApproxComplex> {
    let y = check_im_gate(tau, "j_theta")?;
    let w = p.working() + 16;
    // s = e^{iπτ}
    let pi = Float::with_val(w, rug::float::Constant::Pi);
    let s = ApproxComplex::new(
        Float::with_val(w, -(tau.im().clone()) * &pi),
        Float::with_val(w, tau.re() * &pi),
    )
    .exp(w);
    let s2 = s.sqr(w);

    // series cutoff: |s|^{(M+1)²} below the rounding floor
    let m_top = (((w as f64 + 24.0) * LN2 / (PI * y)).sqrt()).ceil() as u32 + 2;

    // t2 = Σ_{n≥0} s^{n(n+1)}: consecutive exponents differ by 2n
    let mut t2 = ApproxComplex::one(w);
    // t3 = 1 + 2 Σ s^{n²}, t4 = 1 + 2 Σ (−1)^n s^{n²}: exponents differ by 2n+1
    let mut t3 = ApproxComplex::one(w);
    let mut t4 = ApproxComplex::one(w);
    let mut pw_even = ApproxComplex::one(w); // s^{n(n+1)}
    let mut step_even = s2.clone(); // s^{2n} for the next increment
    let mut pw_sq = s.clone(); // s^{n²}
    let mut step_sq = s.clone(); // s^{2n+1}
    for n in 1..=m_top {
        pw_even = pw_even.mul(&step_even, w);
        step_even = step_even.mul(&s2, w);
        t2 = t2.add(&pw_even, w);
        let term = pw_sq.mul_real(&Float::with_val(w, 2), w);
        t3 = t3.add(&term, w);
        if n % 2 == 1 {
            t4 = t4.sub(&term, w);
        } else {
            t4 = t4.add(&term, w);
        }
        step_sq = step_sq.mul(&s2, w);
        pw_sq = pw_sq.mul(&step_sq, w);
    }
    // θ₂⁸ = 256·s²·t2⁸, θ₃⁸, θ₄⁸
    let a = t2.powu(8, w).mul(&s2, w).mul_real(&Float::with_val(w, 256), w);
    let b = t3.powu(8, w);
    let c = t4.powu(8, w);
    let sum = a.add(&b, w).add(&c, w);
    let num = sum.powu(3, w).mul_real(&Float::with_val(w, 32), w);
    let den = a.mul(&b, w).mul(&c, w);
    Ok(num.div(&den, p.get()))
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric series for the low-precision inverse
// ---------------------------------------------------------------------------

/// ₂F₁(1/6, 5/6; 1; z) by the direct power series.
///
/// Validated region: |z| ≤ 0.9 and |1 − z| ≥ 0.05; outside it the call is a
/// domain error (the series would converge too slowly or not at all).
pub fn hypergeom_16_56(z: &ApproxComplex, p: PrecBits) -> Result<ApproxComplex> {
    let w = p.working();
    let az = z.abs(64).to_f64();
    let a1z = z.sub(&ApproxComplex::one(64), 64).abs(64).to_f64();
    if az > 0.9 || a1z < 0.05 {
        return Err(Error::domain(format!(
            "hypergeometric argument outside validated region: |z| = {az}, |1-z| = {a1z}"
        )));
    }
    Ok(hyp_series(z, w).with_prec(p.get()))
}

/// Direct series Σ (1/6)_n (5/6)_n / (n!)² zⁿ; caller guarantees |z| ≤ 0.9.
fn hyp_series(z: &ApproxComplex, w: u32) -> ApproxComplex {
    let mut acc = ApproxComplex::one(w);
    let mut term = ApproxComplex::one(w);
    let floor = pow2(-(w as i64) - 8, 64);
    let mut n: u64 = 0;
    loop {
        // t_{n+1} = t_n · (6n+1)(6n+5) / (36 (n+1)²) · z
        let num = Float::with_val(w, (6 * n + 1) * (6 * n + 5));
        let den = Float::with_val(w, 36 * (n + 1) * (n + 1));
        term = term.mul_real(&(num / den), w).mul(z, w);
        acc = acc.add(&term, w);
        n += 1;
        if term.abs(64) < floor {
            break;
        }
        assert!(n < 200_000, "hypergeometric series failed to converge");
    }
    acc
}

/// ₂F₁(1/6, 5/6; 1; 1−α) for |α| < 1 via the logarithmic connection formula
/// at the unit-argument singularity:
/// F(1−α) = (1/2π) Σ t_n [2ψ(n+1) − ψ(n+1/6) − ψ(n+5/6) − ln α] αⁿ.
fn hyp_near_one(alpha: &ApproxComplex, w: u32) -> Result<ApproxComplex> {
    let ln_alpha = alpha.ln(w)?;
    let psi_16 = (Float::with_val(w + 16, 1) / 6u32).digamma();
    let psi_56 = (Float::with_val(w + 16, 5) / 6u32).digamma();
    let gamma = Float::with_val(w, rug::float::Constant::Euler);
    // D_0 = 2ψ(1) − ψ(1/6) − ψ(5/6)
    let mut d = Float::with_val(w, -2 * &gamma) - Float::with_val(w, &psi_16)
        - Float::with_val(w, &psi_56);
    let mut t = Float::with_val(w, 1); // t_n (real, in (0, 1])
    let mut apow = ApproxComplex::one(w); // αⁿ
    let mut acc = ApproxComplex::zero(w);
    let floor = pow2(-(w as i64) - 8, 64);
    for n in 0u64..400_000 {
        // term = t_n (D_n − ln α) αⁿ
        let bracket = ApproxComplex::new(
            (&d - ln_alpha.re()).complete(w),
            (-ln_alpha.im()).complete(w),
        );
        let term = apow.mul(&bracket, w).mul_real(&t, w);
        acc = acc.add(&term, w);
        if n > 4 && term.abs(64) < floor {
            break;
        }
        d += Float::with_val(w, 2) / Float::with_val(w, n + 1)
            - Float::with_val(w, 6) / Float::with_val(w, 6 * n + 1)
            - Float::with_val(w, 6) / Float::with_val(w, 6 * n + 5);
        let num = Float::with_val(w, (6 * n + 1) * (6 * n + 5));
        let den = Float::with_val(w, 36 * (n + 1) * (n + 1));
        t *= num / den;
        apow = apow.mul(alpha, w);
    }
    let two_pi = Float::with_val(w, rug::float::Constant::Pi) * 2u32;
    Ok(acc.mul_real(&(Float::with_val(w, 1) / two_pi), w))
}

// ---------------------------------------------------------------------------
// special derivative constants
// ---------------------------------------------------------------------------

/// ρ = (1 + i√3)/2, the order-3 corner of the fundamental domain.
pub fn rho(prec: u32) -> ApproxComplex {
    let half = Float::with_val(prec, 0.5);
    let s3 = Float::with_val(prec, 3).sqrt() / 2u32;
    ApproxComplex::new(half, s3)
}

const CONST_PREC: u32 = 192;

/// j″(i), computed once at 128 target bits and validated against the
/// certified interval for its magnitude.
pub fn j2_at_i() -> &'static ApproxComplex {
    static V: Lazy<ApproxComplex> = Lazy::new(|| {
        let v = j_derivative(
            &ApproxComplex::i(CONST_PREC),
            2,
            PrecBits::new(128).unwrap(),
        )
        .expect("derivative at i");
        let m = v.abs(64).to_f64();
        assert!(
            m >= J2_AT_I_INTERVAL.0 && m <= J2_AT_I_INTERVAL.1,
            "|j''(i)| = {m} outside certified interval"
        );
        v
    });
    &V
}

/// j‴(ρ), validated against the certified interval for its magnitude.
pub fn j3_at_rho() -> &'static ApproxComplex {
    static V: Lazy<ApproxComplex> = Lazy::new(|| {
        let v = j_derivative(&rho(CONST_PREC), 3, PrecBits::new(128).unwrap())
            .expect("derivative at rho");
        let m = v.abs(64).to_f64();
        assert!(
            m >= J3_AT_RHO_INTERVAL.0 && m <= J3_AT_RHO_INTERVAL.1,
            "|j'''(rho)| = {m} outside certified interval"
        );
        v
    });
    &V
}

// ---------------------------------------------------------------------------
// low-precision inverse
// ---------------------------------------------------------------------------

/// Nominal working target for the low-precision inverse; doubled on failure.
const LPI_BASE_BITS: u32 = 128;
const LPI_MAX_BITS: u32 = 1024;

/// A fixed-precision inverse of j: returns τ₀ ∈ F with |τ₀ − τ| ≤ 2^(−90)
/// for the true preimage τ ∈ F of j̃.
///
/// Uses α with j̃ = 1728/(4α(1−α)), taking the branch |α| ≤ |1−α|, and the
/// ratio of hypergeometric values i·F(1−α)/F(α); for small |j̃| (α outside
/// the disc where the series apply) the corner expansion of j at ρ supplies
/// the starting point instead. Candidates are reduced into F and checked by
/// forward evaluation; failure escalates the working precision by doubling.
pub fn low_precision_inverse(j_tilde: &ApproxComplex) -> Result<ApproxComplex> {
    low_precision_inverse_at(j_tilde, LPI_BASE_BITS)
}

/// As [`low_precision_inverse`], but starting the escalation ladder at the
/// given working target (used by the secant restarts).
pub(crate) fn low_precision_inverse_at(
    j_tilde: &ApproxComplex,
    start_bits: u32,
) -> Result<ApproxComplex> {
    if j_tilde.is_zero() {
        return Ok(rho(start_bits.max(LPI_BASE_BITS)));
    }
    let mut bits = start_bits.max(LPI_BASE_BITS);
    let mut last_err = None;
    while bits <= LPI_MAX_BITS {
        match lpi_attempt(j_tilde, bits) {
            Ok(t) => return Ok(t),
            Err(e) => last_err = Some(e),
        }
        bits *= 2;
    }
    Err(last_err.unwrap_or_else(|| Error::convergence("low-precision inverse failed")))
}

fn lpi_attempt(j_tilde: &ApproxComplex, bits: u32) -> Result<ApproxComplex> {
    let w = bits + GUARD_BITS;
    let p = PrecBits::new(bits)?;
    let jt = j_tilde.with_prec(w);

    let mut candidates: Vec<ApproxComplex> = Vec::new();
    let abs_j = jt.abs(64).to_f64();

    // hypergeometric route: α = (1 − √(1 − 1728/j̃))/2, branch Re √ ≥ 0
    let u = ApproxComplex::from_f64(1728.0, 0.0, w).div(&jt, w);
    let s = ApproxComplex::one(w).sub(&u, w).sqrt(w);
    let alpha = ApproxComplex::one(w).sub(&s, w).mul_real(&Float::with_val(w, 0.5), w);
    let ra = alpha.abs(64).to_f64();
    if ra <= 0.88 && ra > 0.0 {
        let fa = hyp_series(&alpha, w);
        let fb = hyp_near_one(&alpha, w)?;
        if !fa.is_zero() {
            let t = fb.div(&fa, w);
            // τ = i·ratio
            let cand = ApproxComplex::new(
                Float::with_val(w, -(t.im().clone())),
                t.re().clone(),
            );
            push_upper_candidates(&mut candidates, &cand, w);
        }
    }

    // corner route: for small |j̃| start from the order-3 expansion at ρ
    if abs_j <= 650.0 {
        let six_j = jt.mul_real(&Float::with_val(w, 6), w);
        let eps = six_j.div(j3_at_rho(), w).cbrt(w);
        let r = rho(w);
        // the three cube-root branches are equivalent modulo the stabilizer
        // of ρ, but polishing from each costs little and guards the basin
        let half = Float::with_val(w, 0.5);
        let s3h = Float::with_val(w, 3).sqrt() / 2u32;
        let zeta = ApproxComplex::new((-&half).complete(w), s3h.clone());
        let mut e = eps;
        for _ in 0..3 {
            let start = r.add(&e, w);
            if let Ok(polished) = newton_polish_j(&start, &jt, w) {
                push_upper_candidates(&mut candidates, &polished, w);
            }
            e = e.mul(&zeta, w);
        }
    }

    // validate candidates by forward evaluation after reduction
    let tol = pow2(-25, 64);
    for cand in &candidates {
        let reduced = match reduce_to_f(cand, p) {
            Ok(fp) => fp.into_tau(),
            Err(_) => continue,
        };
        let jv = match j_theta(&reduced, PrecBits::new(160.max(bits))?) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let err = crate::precision::regulated_error(&jv, &jt)?;
        if err < tol {
            return Ok(reduced);
        }
    }
    Err(Error::convergence(
        "no low-precision inverse candidate validated against the input",
    ))
}

fn push_upper_candidates(out: &mut Vec<ApproxComplex>, t: &ApproxComplex, w: u32) {
    if t.is_finite() && t.im().clone() > 0 {
        out.push(t.clone());
        out.push(t.recip(w).neg(w));
    }
    // mirror through the imaginary axis, for constructions that may have
    // picked up a reflected branch
    let m = ApproxComplex::new(Float::with_val(w, -t.re().clone()), t.im().clone());
    if m.is_finite() && m.im().clone() > 0 {
        out.push(m);
    }
}

/// A few Newton steps on j(z) − target from a nearby start, at working
/// precision w. Used only for low-precision starting points.
fn newton_polish_j(start: &ApproxComplex, target: &ApproxComplex, w: u32) -> Result<ApproxComplex> {
    let p = PrecBits::new(w.max(PrecBits::MIN))?;
    let mut z = start.clone();
    let mut last_res: Option<Float> = None;
    for _ in 0..64 {
        if !(im_as_f64(&z) >= 0.5) {
            return Err(Error::convergence("polish left the evaluable region"));
        }
        let jv = j_theta(&z, p)?;
        let res = jv.sub(target, w).abs(64);
        if let Some(prev) = &last_res {
            if res.clone() > Float::with_val(64, 4 * prev) {
                return Err(Error::convergence("polish residual diverged"));
            }
        }
        let jd = j_derivative(&z, 1, p)?;
        if jd.is_zero() {
            return Err(Error::ZeroDerivative);
        }
        let step = jv.sub(target, w).div(&jd, w);
        z = z.sub(&step, w);
        let small = step.abs(64);
        last_res = Some(res);
        if small < pow2(-(w as i64) + 24, 64) {
            return Ok(z);
        }
    }
    Err(Error::convergence("polish did not reach tolerance"))
}
