//! Inversion of the j-function: regime classification and the four
//! regime-specific procedures, returning τ ∈ F with certified output
//! precision.
//!
//! An input j̃ of regulated precision 2^(−p), p ≥ 400, is inverted to
//! relative precision 2^(−Q) with Q = p/6 near the ramification points
//! (j near 0 or 1728) and Q = p − max{⌈11 log₂ p⌉, 100} elsewhere.

use std::collections::BTreeMap;

use rug::Float;

use crate::domain::{reduce_to_f, FundamentalPoint, UnimodularMatrix};
use crate::error::{Error, Result};
use crate::modular::{j2_at_i, j3_at_rho, j_derivative, j_theta, low_precision_inverse_at, rho};
use crate::phi2::{kantorovich_check, newton_solve, specialize, KantorovichCertificate};
use crate::precision::{pow2, ApproxComplex, PrecBits, PrecisionKind};

/// The section of the fundamental domain an input is routed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// |j̃| ≤ 2^(−p/2): return ρ directly.
    AtRho,
    /// |j̃ − 1728| ≤ 2^(−p/3): return i directly.
    AtI,
    /// Im(τ) ≥ 3: repeated argument doubling through Φ₂, then a logarithm.
    Large,
    /// |τ − i| ≤ 2⁻³¹: square-root start at i, one Φ₂ hop outwards.
    NearI,
    /// |τ − ρ| ≤ 2⁻³¹ (either corner): cube-root start at ρ, one Φ₂ hop.
    NearRho,
    /// The remaining compact set: secant iteration on j.
    Compact,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::AtRho => "AtRho",
            Regime::AtI => "AtI",
            Regime::Large => "Large",
            Regime::NearI => "NearI",
            Regime::NearRho => "NearRho",
            Regime::Compact => "Compact",
        };
        write!(f, "{s}")
    }
}

/// Operation counts for one inversion, grouped by working precision.
///
/// The cost model charges each counted multiplication at precision w as
/// w·log₂w units (softly-linear multiplication), and each elementary
/// function as an O(log w) batch of multiplications. This is what the
/// quasilinear scaling check consumes.
#[derive(Debug, Clone, Default)]
pub struct Telemetry {
    mults: BTreeMap<u32, u64>,
    /// Newton steps used per doubling (Large) or per ramification hop.
    pub newton_steps: Vec<u32>,
    /// The step bounds ⌈2 log₂ p + 2 log₂ log₂ |j|⌉ those counts must respect.
    pub newton_step_bounds: Vec<u32>,
    pub secant_iterations: u32,
    pub restarts: u32,
}

impl Telemetry {
    pub(crate) fn count_mults(&mut self, prec: u32, n: u64) {
        *self.mults.entry(prec).or_insert(0) += n;
    }

    /// One elementary function (exp/log/sqrt/cbrt) at precision w.
    pub(crate) fn count_elementary(&mut self, prec: u32) {
        let batch = 2 * (prec.max(2) as f64).log2().ceil() as u64 + 8;
        self.count_mults(prec, batch);
    }

    /// One evaluation of j by theta series at precision w and height y.
    pub(crate) fn count_theta_eval(&mut self, prec: u32, y: f64) {
        let terms = (((prec as f64 + 24.0) * std::f64::consts::LN_2
            / (std::f64::consts::PI * y.max(0.5)))
        .sqrt())
        .ceil() as u64
            + 2;
        self.count_mults(prec, 24 * terms + 128);
        self.count_elementary(prec);
    }

    pub fn total_mults(&self) -> u64 {
        self.mults.values().sum()
    }

    pub fn by_precision(&self) -> &BTreeMap<u32, u64> {
        &self.mults
    }

    /// Σ count·w·log₂w over all precisions.
    pub fn cost_model(&self) -> f64 {
        self.mults
            .iter()
            .map(|(&p, &n)| n as f64 * p as f64 * (p.max(2) as f64).log2())
            .sum()
    }
}

/// The output of an inversion: the reduced point, the precision it is
/// certified to, and how it was obtained.
#[derive(Debug)]
pub struct InversionResult {
    pub tau: FundamentalPoint,
    pub achieved_bits: PrecBits,
    pub kind: PrecisionKind,
    pub regime: Regime,
    /// Number of Φ₂ doublings (Large regime; zero elsewhere).
    pub doublings: u32,
    pub telemetry: Telemetry,
}

const MIN_INVERT_BITS: u32 = 400;

fn check_invert_precision(p: PrecBits) -> Result<()> {
    if p.get() < MIN_INVERT_BITS {
        return Err(Error::precision(format!(
            "inversion requires at least {MIN_INVERT_BITS} bits of claimed precision, got {}",
            p.get()
        )));
    }
    Ok(())
}

/// Q = p − max{⌈11 log₂ p⌉, 100}, the generic-regime output precision.
fn generic_output_bits(p: PrecBits) -> u32 {
    let loss = ((11.0 * (p.get() as f64).log2()).ceil() as u32).max(100);
    p.get() - loss
}

/// Classify an input of claimed regulated precision 2^(−p), p ≥ 400.
pub fn classify(j_tilde: &ApproxComplex, p: PrecBits) -> Result<Regime> {
    check_invert_precision(p)?;
    let abs_j = j_tilde.abs(96);
    if abs_j <= pow2(-((p.get() / 2) as i64), 96) {
        return Ok(Regime::AtRho);
    }
    let dist_1728 = j_tilde
        .sub(&ApproxComplex::from_f64(1728.0, 0.0, 96), j_tilde.prec().max(96))
        .abs(96);
    if dist_1728 <= pow2(-((p.get() / 3) as i64), 96) {
        return Ok(Regime::AtI);
    }
    // |j| ≥ e^{6π} + 2079 forces Im(τ) ≥ 3
    let large_gate = Float::with_val(96, 6 * Float::with_val(96, rug::float::Constant::Pi)).exp()
        + 2079u32;
    if abs_j >= large_gate {
        return Ok(Regime::Large);
    }
    let tau0 = low_precision_inverse_at(j_tilde, 128)?;
    let thr = pow2(-31, 96);
    if tau0.dist(&ApproxComplex::i(96), 96) <= thr {
        return Ok(Regime::NearI);
    }
    let corner = rho(96);
    if tau0.dist(&corner, 96) <= thr {
        return Ok(Regime::NearRho);
    }
    let left = ApproxComplex::new(
        Float::with_val(96, corner.re() - 1u32),
        corner.im().clone(),
    );
    if tau0.dist(&left, 96) <= thr {
        return Ok(Regime::NearRho);
    }
    if tau0.im().clone() >= 3 {
        return Ok(Regime::Large);
    }
    Ok(Regime::Compact)
}

/// Invert j̃ of regulated precision 2^(−p) to the contract output precision.
/// Dispatches on [`classify`].
pub fn invert(j_tilde: &ApproxComplex, p: PrecBits) -> Result<InversionResult> {
    let regime = classify(j_tilde, p)?;
    match regime {
        Regime::AtRho => shortcut_result(rho(p.working()), p, Regime::AtRho),
        Regime::AtI => shortcut_result(ApproxComplex::i(p.working()), p, Regime::AtI),
        Regime::Large => invert_large(j_tilde, p),
        Regime::NearI => invert_near_i(j_tilde, p),
        Regime::NearRho => invert_near_rho(j_tilde, p),
        Regime::Compact => invert_compact(j_tilde, p),
    }
}

fn shortcut_result(tau: ApproxComplex, p: PrecBits, regime: Regime) -> Result<InversionResult> {
    let tol = pow2(-(p.get() as i64) + 8, 64);
    let fp = FundamentalPoint::new(tau.with_prec(p.get()), UnimodularMatrix::identity(), &tol)?;
    Ok(InversionResult {
        tau: fp,
        achieved_bits: PrecBits::new(p.get() / 6)?,
        kind: PrecisionKind::Relative,
        regime,
        doublings: 0,
        telemetry: Telemetry::default(),
    })
}

// ---------------------------------------------------------------------------
// Large regime
// ---------------------------------------------------------------------------

/// Newton step budget ⌈2 log₂ p + 2 log₂ log₂ |j|⌉ for one doubling.
fn doubling_step_bound(p: PrecBits, log2_abs_j: f64) -> u32 {
    (2.0 * (p.get() as f64).log2() + 2.0 * log2_abs_j.max(2.0).log2()).ceil() as u32
}

/// Certificate for Newton from the truncated-square starting point in the
/// large regime, from the closed-form bounds
/// |Φ₂(j̃, γ₀)| ≤ 2⁻⁵⁴|j|⁶, |Φ₂′| ≥ 0.71|j|⁴, |Φ₂″| ≤ 8.3|j|² on the ball
/// of radius 0.009|j|².
fn large_certificate(abs_j: &Float) -> KantorovichCertificate {
    let w = 64;
    let a2 = Float::with_val(w, abs_j * abs_j);
    let eta = Float::with_val(w, &a2 * &pow2(-54, w)) / Float::with_val(w, 0.71);
    let k_bound = Float::with_val(w, 8.3) / (Float::with_val(w, 0.71) * &a2);
    let r = Float::with_val(w, 0.009) * &a2;
    kantorovich_check(&eta, &k_bound, &r)
}

/// Inversion for Im(τ) ≥ 3: double the argument through Φ₂ until
/// |j(2^k τ)| ≥ 2^(p+12), then recover 2^k τ from the principal logarithm
/// (real part unwrapped along the doubling ladder) and divide by 2^k.
pub fn invert_large(j_tilde: &ApproxComplex, p: PrecBits) -> Result<InversionResult> {
    check_invert_precision(p)?;
    let w = p.working();
    let mut tel = Telemetry::default();
    let mut current = j_tilde.with_prec(w);
    let mut k: u32 = 0;
    // coarse estimate of Re(2^k τ), corrected at every stage; each stage's
    // argument pins it to within ~2079/|j| ≪ 1/2, so the unwrap is exact
    let mut x_est = -(current.arg(160)) / (Float::with_val(160, rug::float::Constant::Pi) * 2u32);
    let mut lost_bits: u32 = 0;

    loop {
        let abs_cur = current.abs(96);
        let exp = abs_cur
            .get_exp()
            .ok_or_else(|| Error::certification("vanishing magnitude in large regime"))?;
        if exp >= p.get() as i32 + 13 {
            break;
        }
        if k >= 64 {
            return Err(Error::certification("doubling budget exceeded in large regime"));
        }
        // each doubling costs at most 3 bits of relative precision
        if p.get() - lost_bits < 300 {
            return Err(Error::certification(
                "intermediate relative precision would drop below 2^-300",
            ));
        }
        let cert = large_certificate(&abs_cur);
        if !cert.ok {
            return Err(Error::certification("Kantorovich certificate failed in large regime"));
        }
        let cubic = specialize(&current, w);
        // γ₀ = j̃² − 1488 j̃ + 160512, the truncated square of the q-expansion
        let start = current
            .sqr(w)
            .sub(&current.mul_real(&Float::with_val(w, 1488), w), w)
            .add_real(&Float::with_val(w, 160512), w);
        let res_start = cubic.eval(&start, 96).abs(96);
        let steps = doubling_step_bound(p, exp as f64);
        let root = newton_solve(&cubic, &start, steps, p)?;
        let res_end = cubic.eval(&root, 96).abs(96);
        if res_end > res_start {
            return Err(Error::certification(
                "Newton residual failed to decrease in large regime",
            ));
        }
        tel.newton_steps.push(steps);
        tel.newton_step_bounds.push(steps);
        tel.count_mults(w, 34 * steps as u64 + 24);

        // ladder update: Re doubles; the new argument re-pins it
        let x_meas = -(root.arg(160)) / (Float::with_val(160, rug::float::Constant::Pi) * 2u32);
        let n = Float::with_val(160, Float::with_val(160, 2 * &x_est) - &x_meas)
            .round()
            .to_integer()
            .ok_or_else(|| Error::certification("argument unwrap failed"))?;
        x_est = x_meas + Float::with_val(160, &n);

        current = root.with_prec(w);
        k += 1;
        lost_bits += 3;
    }

    // τ = −log(current) / (2^{k+1} π), with the real part unwrapped
    let two_pi = Float::with_val(w, rug::float::Constant::Pi) * 2u32;
    let ln = current.ln(w)?;
    tel.count_elementary(w);
    let y_big = Float::with_val(w, ln.re() / &two_pi);
    let x_frac = Float::with_val(w, -(ln.im().clone()) / &two_pi);
    let n = Float::with_val(160, &x_est - Float::with_val(160, &x_frac))
        .round()
        .to_integer()
        .ok_or_else(|| Error::certification("final unwrap failed"))?;
    let x_big = Float::with_val(w, &x_frac + Float::with_val(w, &n));
    // divide by 2^k exactly
    let tau = ApproxComplex::new(x_big >> k as i32, y_big >> k as i32);
    let reduced = reduce_to_f(&tau, p)?;
    tel.count_mults(w, 16);

    Ok(InversionResult {
        tau: reduced,
        achieved_bits: PrecBits::new(generic_output_bits(p))?,
        kind: PrecisionKind::Absolute,
        regime: Regime::Large,
        doublings: k,
        telemetry: tel,
    })
}

// ---------------------------------------------------------------------------
// ramification regimes
// ---------------------------------------------------------------------------

/// Inversion for |τ − i| ≤ 2⁻³¹ with |j̃ − 1728| ≥ 2^(−p/3): a square-root
/// starting point at i, Newton on Φ₂(j̃, ·) towards j(2τ) or j(τ/2), a
/// recursive inversion of that root away from ramification, and a final
/// halving/reduction disambiguated by forward evaluation.
pub fn invert_near_i(j_tilde: &ApproxComplex, p: PrecBits) -> Result<InversionResult> {
    check_invert_precision(p)?;
    let w = p.working();
    let mut tel = Telemetry::default();
    let dist_1728 = j_tilde
        .sub(&ApproxComplex::from_f64(1728.0, 0.0, w), w)
        .abs(96);
    if dist_1728 < pow2(-((p.get() / 3) as i64), 96) {
        return Err(Error::precision(
            "input is in the shortcut band around 1728; the caller returns i directly",
        ));
    }

    // τ₀ = i + √(2(j̃ − 1728)/j″(i)); either square-root branch works
    let num = j_tilde
        .sub(&ApproxComplex::from_f64(1728.0, 0.0, w), w)
        .mul_real(&Float::with_val(w, 2), w);
    let eps = num.div(j2_at_i(), w).sqrt(w);
    let tau0 = ApproxComplex::i(w).add(&eps, w);
    let delta = eps.abs(64);

    // certificate with the collar bounds: |Φ₂| ≤ 2.8e13 δ², |Φ₂′| ≥ 1.7e12 δ,
    // |Φ₂″| ≤ 6.5e5, ball radius 35 δ
    let eta = Float::with_val(64, 2.8e13) * Float::with_val(64, &delta * &delta)
        / (Float::with_val(64, 1.7e12) * &delta);
    let k_bound = Float::with_val(64, 6.5e5) / (Float::with_val(64, 1.7e12) * &delta);
    let r = Float::with_val(64, 35) * &delta;
    let cert = kantorovich_check(&eta, &k_bound, &r);
    if !cert.ok {
        return Err(Error::certification("Kantorovich certificate failed near i"));
    }

    let hop = ramification_hop(j_tilde, &tau0, p, &mut tel)?;
    // candidates τ ≈ w/2 and −2/w; SL₂(ℤ)-equivalent, so reduction sends both
    // to the same point, but the forward evaluation keeps the choice honest
    let half = hop.mul_real(&Float::with_val(w, 0.5), w);
    let neg_two = ApproxComplex::from_f64(-2.0, 0.0, w).div(&hop, w);
    let reduced = disambiguate(&[half, neg_two], j_tilde, p, &mut tel)?;
    Ok(InversionResult {
        tau: reduced,
        achieved_bits: PrecBits::new((p.get() / 6).max(PrecBits::MIN))?,
        kind: PrecisionKind::Relative,
        regime: Regime::NearI,
        doublings: 0,
        telemetry: tel,
    })
}

/// Inversion for τ within 2⁻³¹ of either corner (±1 + i√3)/2 with
/// |j̃| ≥ 2^(−p/2): a cube-root starting point at ρ, a Φ₂ hop to a root near
/// j(i√3), recursion, and three-way disambiguation among the preimages of
/// 2τ, τ/2, (τ+1)/2. An input near the left corner reduces onto the right
/// corner chart through the τ + 1 translation inside the final reduction.
pub fn invert_near_rho(j_tilde: &ApproxComplex, p: PrecBits) -> Result<InversionResult> {
    check_invert_precision(p)?;
    let w = p.working();
    let mut tel = Telemetry::default();
    if j_tilde.abs(96) < pow2(-((p.get() / 2) as i64), 96) {
        return Err(Error::precision(
            "input is in the shortcut band around 0; the caller returns rho directly",
        ));
    }

    // τ₀ = ρ + ∛(6 j̃ / j‴(ρ)); any cube-root branch works
    let eps = j_tilde
        .mul_real(&Float::with_val(w, 6), w)
        .div(j3_at_rho(), w)
        .cbrt(w);
    let tau0 = rho(w).add(&eps, w);
    let delta = eps.abs(64);

    // collar bounds: |Φ₂| ≤ 2.2e12 δ³, |Φ₂′| ≥ 1.2e12 δ², |Φ₂″| ≤ 1.36e7 δ,
    // ball radius 4 δ
    let d2 = Float::with_val(64, &delta * &delta);
    let eta = Float::with_val(64, 2.2e12) * Float::with_val(64, &d2 * &delta)
        / (Float::with_val(64, 1.2e12) * &d2);
    let k_bound = Float::with_val(64, 1.36e7) * &delta / (Float::with_val(64, 1.2e12) * &d2);
    let r = Float::with_val(64, 4) * &delta;
    let cert = kantorovich_check(&eta, &k_bound, &r);
    if !cert.ok {
        return Err(Error::certification("Kantorovich certificate failed near rho"));
    }

    let hop = ramification_hop(j_tilde, &tau0, p, &mut tel)?;
    // preimage candidates: (w+1)/2, −2/(w−1), 1 − 2/(w+1)
    let one = ApproxComplex::one(w);
    let c1 = hop.add(&one, w).mul_real(&Float::with_val(w, 0.5), w);
    let c2 = ApproxComplex::from_f64(-2.0, 0.0, w).div(&hop.sub(&one, w), w);
    let c3 = one.sub(
        &ApproxComplex::from_f64(2.0, 0.0, w).div(&hop.add(&one, w), w),
        w,
    );
    let reduced = disambiguate(&[c1, c2, c3], j_tilde, p, &mut tel)?;
    Ok(InversionResult {
        tau: reduced,
        achieved_bits: PrecBits::new((p.get() / 6).max(PrecBits::MIN))?,
        kind: PrecisionKind::Relative,
        regime: Regime::NearRho,
        doublings: 0,
        telemetry: tel,
    })
}

/// Shared middle of the two ramification regimes: evaluate j(2τ₀), run
/// ⌈2 log₂ p⌉ Newton steps on the specialized cubic, and invert the obtained
/// root (whose preimage is in the compact region, bounded away from
/// ramification).
fn ramification_hop(
    j_tilde: &ApproxComplex,
    tau0: &ApproxComplex,
    p: PrecBits,
    tel: &mut Telemetry,
) -> Result<ApproxComplex> {
    let w = p.working();
    let two_tau0 = tau0.mul_real(&Float::with_val(w, 2), w);
    let s0 = j_theta(&two_tau0, p)?;
    tel.count_theta_eval(w, two_tau0.im().to_f64());

    let cubic = specialize(j_tilde, w);
    let steps = (2.0 * (p.get() as f64).log2()).ceil() as u32;
    let res_start = cubic.eval(&s0, 96).abs(96);
    let root = newton_solve(&cubic, &s0, steps, p)?;
    let res_end = cubic.eval(&root, 96).abs(96);
    if res_end > res_start {
        return Err(Error::certification(
            "Newton residual failed to decrease at the ramification hop",
        ));
    }
    tel.newton_steps.push(steps);
    tel.newton_step_bounds.push(steps);
    tel.count_mults(w, 34 * steps as u64 + 24);

    // the root approximates one of j(2τ), j(τ/2), j((τ+1)/2) to relative
    // 2^(−p/3+11); invert it at matching precision
    let p_eff = PrecBits::new(((p.get() / 3).saturating_sub(12)).max(PrecBits::MIN))?;
    compact_inverse_core(&root, p_eff, tel)
}

/// Reduce each candidate into F, evaluate j there, and return the candidate
/// closest to the input.
fn disambiguate(
    candidates: &[ApproxComplex],
    j_tilde: &ApproxComplex,
    p: PrecBits,
    tel: &mut Telemetry,
) -> Result<FundamentalPoint> {
    let mut best: Option<(Float, FundamentalPoint)> = None;
    let eval_bits = PrecBits::new((p.get() / 3).max(160))?;
    for cand in candidates {
        if !(cand.im().clone() > 0) {
            continue;
        }
        let fp = match reduce_to_f(cand, p) {
            Ok(fp) => fp,
            Err(_) => continue,
        };
        let jv = match j_theta(fp.tau(), eval_bits) {
            Ok(v) => v,
            Err(_) => continue,
        };
        tel.count_theta_eval(eval_bits.working(), fp.tau().im().to_f64());
        let d = jv.sub(j_tilde, eval_bits.working()).abs(96);
        let better = best.as_ref().map_or(true, |(bd, _)| d < *bd);
        if better {
            best = Some((d, fp));
        }
    }
    best.map(|(_, fp)| fp)
        .ok_or_else(|| Error::convergence("no preimage candidate survived reduction"))
}

// ---------------------------------------------------------------------------
// compact regime
// ---------------------------------------------------------------------------

/// Inversion on the remaining compact subset of F by the secant method, with
/// hypergeometric starting points at fixed precision.
pub fn invert_compact(j_tilde: &ApproxComplex, p: PrecBits) -> Result<InversionResult> {
    check_invert_precision(p)?;
    let mut tel = Telemetry::default();
    let z = compact_inverse_core(j_tilde, p, &mut tel)?;
    let reduced = reduce_to_f(&z, p)?;
    Ok(InversionResult {
        tau: reduced,
        achieved_bits: PrecBits::new(generic_output_bits(p))?,
        kind: PrecisionKind::Relative,
        regime: Regime::Compact,
        doublings: 0,
        telemetry: tel,
    })
}

/// Secant iteration z ← z − f(z)(z − z′)/(f(z) − f(z′)) on f = j − j̃ until
/// |f| ≤ 2^(−p)·max{1, |j̃|}. Slow convergence restarts with the
/// starting-point precision doubled; exhausting the restarts signals an
/// input inconsistent with its claimed precision.
fn compact_inverse_core(
    j_tilde: &ApproxComplex,
    p: PrecBits,
    tel: &mut Telemetry,
) -> Result<ApproxComplex> {
    let w = p.working();
    let abs_j = j_tilde.abs(96);
    let target = if abs_j > 1u32 {
        Float::with_val(96, &abs_j * &pow2(-(p.get() as i64), 96))
    } else {
        pow2(-(p.get() as i64), 96)
    };
    let cap = 4 * (p.get() as f64).log2().ceil() as u32;

    let mut start_bits = 128u32;
    let mut last_err: Option<Error> = None;
    for restart in 0..4 {
        if restart > 0 {
            tel.restarts += 1;
        }
        let z0 = match low_precision_inverse_at(j_tilde, start_bits) {
            Ok(z) => z.with_prec(w),
            Err(e) => {
                last_err = Some(e);
                start_bits *= 2;
                continue;
            }
        };
        // first refinement: τ₁ = τ₀ − (j(τ₀) − j̃)/j′(τ₀) at moderate precision
        let q1 = PrecBits::new((2 * start_bits).min(p.get()).max(PrecBits::MIN))?;
        let improved = (|| -> Result<ApproxComplex> {
            let jv = j_theta(&z0, q1)?;
            let jd = j_derivative(&z0, 1, q1)?;
            if jd.is_zero() {
                return Err(Error::ZeroDerivative);
            }
            tel.count_theta_eval(q1.working(), z0.im().to_f64());
            Ok(z0.sub(&jv.sub(j_tilde, q1.working()).div(&jd, q1.working()), w))
        })();
        let z1 = match improved {
            Ok(z) => z,
            Err(e) => {
                last_err = Some(e);
                start_bits *= 2;
                continue;
            }
        };

        match secant_loop(j_tilde, &z0, &z1, &target, cap, p, w, tel) {
            Ok(z) => return Ok(z),
            Err(e) => {
                last_err = Some(e);
                start_bits *= 2;
            }
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::convergence("secant iteration failed; input may not match its claimed precision")
    }))
}

#[allow(clippy::too_many_arguments)]
fn secant_loop(
    j_tilde: &ApproxComplex,
    z0: &ApproxComplex,
    z1: &ApproxComplex,
    target: &Float,
    cap: u32,
    eval_p: PrecBits,
    w: u32,
    tel: &mut Telemetry,
) -> Result<ApproxComplex> {
    let mut zp = z0.with_prec(w);
    let mut zc = z1.with_prec(w);
    let eval = |z: &ApproxComplex, tel: &mut Telemetry| -> Result<ApproxComplex> {
        if !(z.im().to_f64() >= 0.5) {
            return Err(Error::convergence("secant iterate left the evaluable region"));
        }
        tel.count_theta_eval(w, z.im().to_f64());
        Ok(j_theta(z, eval_p)?.sub(j_tilde, w))
    };
    let mut fp = eval(&zp, tel)?;
    let mut fc = eval(&zc, tel)?;
    for _ in 0..cap {
        tel.secant_iterations += 1;
        if fc.abs(96) <= *target {
            return Ok(zc);
        }
        let denom = fc.sub(&fp, w);
        if denom.is_zero() {
            return Err(Error::convergence("secant denominator vanished"));
        }
        let step = fc.mul(&zc.sub(&zp, w), w).div(&denom, w);
        let zn = zc.sub(&step, w);
        tel.count_mults(w, 16);
        zp = zc;
        fp = fc;
        zc = zn;
        fc = eval(&zc, tel)?;
    }
    if fc.abs(96) <= *target {
        return Ok(zc);
    }
    Err(Error::convergence("secant iteration exceeded its cap"))
}
