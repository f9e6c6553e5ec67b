//! Deterministic constant calculus.
//!
//! Given double-ball and critical-density constants for a family of
//! nonnegative functions on a doubling quasi-metric space, the functions here
//! derive every structural constant of the power-decay iteration and of the
//! resulting Harnack bound, in closed form and in a fixed evaluation order.
//! No randomness, no measurement: same inputs, same ledger, bit for bit.
//!
//! Derived values can be towers of exponentials, so every potentially large
//! constant is carried in log space alongside its (possibly overflowing) f64
//! value; the JSON ledger stores both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN_QUARTER: f64 = -1.3862943611198906; // ln(1/4)

/// Double-ball / critical-density constants after normalization to a shared
/// smallness threshold `eps` and enlargement `eta`:
/// eps = min(eps_db, eps_cd), eta = max(eta_db, eta_cd).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DbCdInput {
    /// Double-ball decay: inf over the doubled ball is at least gamma.
    pub gamma: f64,
    /// Critical-density floor on the half ball.
    pub c: f64,
    /// Shared norm-gate threshold.
    pub eps: f64,
    /// Shared ball enlargement for the norm gate.
    pub eta: f64,
    /// Density fraction triggering the critical-density alternative.
    pub nu: f64,
}

impl DbCdInput {
    pub fn new(gamma: f64, c: f64, eps: f64, eta: f64, nu: f64) -> Result<Self> {
        let input = DbCdInput { gamma, c, eps, eta, nu };
        input.validate()?;
        Ok(input)
    }

    /// Merge separate double-ball (gamma, eps_db, eta_db) and critical-density
    /// (nu, c, eps_cd, eta_cd) constants into the shared form.
    pub fn merge(db: (f64, f64, f64), cd: (f64, f64, f64, f64)) -> Result<Self> {
        let (gamma, eps_db, eta_db) = db;
        let (nu, c, eps_cd, eta_cd) = cd;
        DbCdInput::new(gamma, c, eps_db.min(eps_cd), eta_db.max(eta_cd), nu)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..1.0).contains(&self.gamma)
            && self.gamma > 0.0
            && (0.0..1.0).contains(&self.c)
            && self.c > 0.0
            && self.eps > 0.0
            && self.eps < 1.0
            && self.eta >= 1.0
            && self.nu > 0.0
            && self.nu < 1.0;
        if !ok {
            return Err(Error::InvalidInput(format!(
                "need gamma, c, eps, nu in (0,1) and eta >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DbConstants {
    pub gamma: f64,
    pub eps: f64,
    pub eta: f64,
}

/// Critical density implies the double-ball property once the density
/// fraction is below 1/C_D^2; the double-ball constants are then the
/// critical-density ones with the enlargement doubled.
pub fn cd_implies_db(nu: f64, c_d: f64, cd: &DbCdInput) -> Result<DbConstants> {
    cd.validate()?;
    if !(c_d > 1.0) {
        return Err(Error::InvalidInput(format!("doubling constant must exceed 1, got {c_d}")));
    }
    let threshold = 1.0 / (c_d * c_d);
    if !(nu > 0.0 && nu < threshold) {
        return Err(Error::ConstantInconsistency(format!(
            "density fraction nu = {nu} must lie in (0, 1/C_D^2) = (0, {threshold})"
        )));
    }
    Ok(DbConstants { gamma: cd.c, eps: cd.eps, eta: 2.0 * cd.eta })
}

/// First tier of derived constants.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BaseConstants {
    /// M0 = 1/(gamma c): level jump of a single iteration step.
    pub m0: f64,
    /// sigma = -ln 2 / ln gamma, so gamma^sigma = 1/2.
    pub sigma_exp: f64,
    /// M1 = (4K)^(1/sigma) M0: threshold where the shrinking-radius sum closes.
    pub m1: f64,
    pub ln_m1: f64,
    /// theta = K(1 + 4 eta K): enlargement absorbing the norm gate.
    pub theta: f64,
}

pub fn derive_base_constants(input: &DbCdInput, k: f64) -> Result<BaseConstants> {
    input.validate()?;
    check_k(k)?;
    let ln_m0 = -(input.gamma.ln() + input.c.ln());
    let sigma_exp = -std::f64::consts::LN_2 / input.gamma.ln();
    let ln_m1 = (4.0 * k).ln() / sigma_exp + ln_m0;
    Ok(BaseConstants {
        m0: ln_m0.exp(),
        sigma_exp,
        m1: ln_m1.exp(),
        ln_m1,
        theta: k * (1.0 + 4.0 * input.eta * k),
    })
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("quasi-triangle constant must be >= 1, got {k}")));
    }
    Ok(())
}

fn check_holder(alpha_h: f64, beta_h: f64) -> Result<()> {
    if !(alpha_h > 0.0 && alpha_h <= 1.0 && beta_h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need Hölder exponent in (0,1] and positive coefficient, got alpha={alpha_h}, beta={beta_h}"
        )));
    }
    Ok(())
}

/// ln(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// The level base M = M0 2^j together with its contraction data.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LevelBase {
    pub j: u32,
    /// May overflow to infinity for extreme inputs; `ln_m` is always finite.
    pub m: f64,
    pub ln_m: f64,
    /// q = M^(-sigma alpha), the per-level contraction.
    pub q_pd: f64,
    /// Hölder budget per step; `ln_beta1` is the reliable representation.
    pub beta1: f64,
    pub ln_beta1: f64,
    /// sigma * alpha, cached for the level sums.
    pub sigma_alpha: f64,
}

/// Choose the smallest M = M0 2^j (j >= 1, so M > M0 strictly) with
///   beta1 M^(-2 sigma alpha) < 1/4  and
///   beta1 M^(-3 sigma alpha) sum_{i>=0} M^(-i sigma alpha) < 1/4,
/// where beta1 = (2K)^(alpha-1) beta M1^(sigma alpha) (1 + M1^sigma)^(1-alpha).
/// The second condition is exactly what keeps the nested radii above r/2.
pub fn choose_level_base(
    input: &DbCdInput,
    k: f64,
    alpha_h: f64,
    beta_h: f64,
) -> Result<LevelBase> {
    check_holder(alpha_h, beta_h)?;
    let base = derive_base_constants(input, k)?;
    let sigma_alpha = base.sigma_exp * alpha_h;
    let ln_beta1 = (alpha_h - 1.0) * (2.0 * k).ln()
        + beta_h.ln()
        + sigma_alpha * base.ln_m1
        + (1.0 - alpha_h) * softplus(base.sigma_exp * base.ln_m1);
    let ln_m0 = -(input.gamma.ln() + input.c.ln());
    for j in 1..=100_000u32 {
        let ln_m = ln_m0 + j as f64 * std::f64::consts::LN_2;
        let ln_q = -sigma_alpha * ln_m;
        let q = ln_q.exp();
        if q >= 1.0 {
            continue;
        }
        let cond_near = ln_beta1 + 2.0 * ln_q < LN_QUARTER;
        // geometric tail: sum_{i>=0} q^i = 1/(1-q)
        let cond_tail = ln_beta1 + 3.0 * ln_q - (1.0 - q).ln() < LN_QUARTER;
        if cond_near && cond_tail {
            return Ok(LevelBase {
                j,
                m: ln_m.exp(),
                ln_m,
                q_pd: q,
                beta1: ln_beta1.exp(),
                ln_beta1,
                sigma_alpha,
            });
        }
    }
    Err(Error::ConstantInconsistency(
        "no level base M = M0 2^j with j <= 100000 satisfies the contraction conditions".into(),
    ))
}

/// Nested-radius sequence T_1 = 3/4, T_{k+1} = T_k - beta1 q^{k+2}.
///
/// Every element must stay in (1/2, 3/4]; a violation means the level base
/// was chosen inconsistently.
pub fn tk_sequence(level: &LevelBase, k_max: usize) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    let ln_q = -level.sigma_alpha * level.ln_m;
    let mut out = Vec::with_capacity(k_max);
    let mut t = 0.75f64;
    out.push(t);
    for k in 2..=k_max {
        // decrement for T_k is beta1 q^{k+1}
        t -= (level.ln_beta1 + (k + 1) as f64 * ln_q).exp();
        if !(t > 0.5) {
            return Err(Error::ConstantInconsistency(format!(
                "radius sequence left (1/2, 3/4] at k = {k}: T_k = {t}"
            )));
        }
        out.push(t);
    }
    Ok(out)
}

/// Limit of the nested-radius sequence: 3/4 - beta1 q^3 / (1 - q).
pub fn tk_limit(level: &LevelBase) -> f64 {
    let ln_q = -level.sigma_alpha * level.ln_m;
    0.75 - (level.ln_beta1 + 3.0 * ln_q - (1.0 - level.q_pd).ln()).exp()
}

/// Which hypothesis closes the power-decay argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdHypothesis {
    /// Thin rings carry little measure (ring modulus decays); enlargement
    /// becomes max{K(3 eta K + 1), theta} + 1.
    RingCondition,
    /// Continuity of the measure plus nu < 1/C_D^2; enlargement becomes
    /// 2 max{K(3 eta K + 1), theta}.
    MeasureContinuity,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PdSetup {
    pub input: DbCdInput,
    /// Quasi-triangle constant of the space.
    pub k: f64,
    /// Hölder data of the quasi-distance.
    pub alpha_h: f64,
    pub beta_h: f64,
    /// Doubling constant of the measure.
    pub c_d: f64,
    /// Reverse-doubling constant: mu(B_r) <= delta_rd mu(B_2r).
    pub delta_rd: f64,
    pub hypothesis: PdHypothesis,
    /// Covering contraction factor c(nu): an external input; when absent it
    /// defaults to 1 - nu/(2 C_D^2).
    pub c_nu: Option<f64>,
}

impl PdSetup {
    pub fn validate(&self) -> Result<()> {
        self.input.validate()?;
        check_k(self.k)?;
        check_holder(self.alpha_h, self.beta_h)?;
        if !(self.c_d > 1.0) {
            return Err(Error::InvalidInput(format!(
                "doubling constant must exceed 1, got {}",
                self.c_d
            )));
        }
        if !(self.delta_rd > 0.0 && self.delta_rd < 1.0) {
            return Err(Error::InvalidInput(format!(
                "reverse-doubling constant must lie in (0,1), got {}",
                self.delta_rd
            )));
        }
        if let Some(c_nu) = self.c_nu {
            if !(c_nu > 0.0 && c_nu < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "covering factor c(nu) must lie in (0,1), got {c_nu}"
                )));
            }
        }
        Ok(())
    }

    pub fn c_nu_value(&self) -> f64 {
        self.c_nu.unwrap_or(1.0 - self.input.nu / (2.0 * self.c_d * self.c_d))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PowerDecay {
    pub level: LevelBase,
    /// Per-level measure decay factor (the covering contraction).
    pub gamma_pd: f64,
    /// Norm gate: eps_P = eps * c.
    pub eps_p: f64,
    /// Ball enlargement for the gate.
    pub eta_p: f64,
    /// Least k0 with (c(nu))^{k0} C_D < 1: absorbs C_D into the decay.
    pub k0_absorb: u32,
    /// Density fraction actually used: max(nu, delta_rd).
    pub nu_eff: f64,
    pub c_nu: f64,
}

pub fn derive_power_decay(setup: &PdSetup) -> Result<PowerDecay> {
    setup.validate()?;
    if setup.hypothesis == PdHypothesis::MeasureContinuity {
        let threshold = 1.0 / (setup.c_d * setup.c_d);
        if !(setup.input.nu < threshold) {
            return Err(Error::ConstantInconsistency(format!(
                "continuity hypothesis needs nu < 1/C_D^2 = {threshold}, got {}",
                setup.input.nu
            )));
        }
    }
    let level = choose_level_base(&setup.input, setup.k, setup.alpha_h, setup.beta_h)?;
    let base = derive_base_constants(&setup.input, setup.k)?;
    let gate = setup.k * (3.0 * setup.input.eta * setup.k + 1.0);
    let eta_p = match setup.hypothesis {
        PdHypothesis::RingCondition => gate.max(base.theta) + 1.0,
        PdHypothesis::MeasureContinuity => 2.0 * gate.max(base.theta),
    };
    let c_nu = setup.c_nu_value();
    if !(c_nu > 0.0 && c_nu < 1.0) {
        return Err(Error::ConstantInconsistency(format!(
            "covering factor c(nu) = {c_nu} must lie in (0,1)"
        )));
    }
    // smallest k0 >= 1 with c_nu^k0 * C_D < 1
    let mut k0 = (setup.c_d.ln() / -c_nu.ln()).floor().max(0.0) as u32;
    k0 = k0.max(1);
    while c_nu.powi(k0 as i32) * setup.c_d >= 1.0 {
        k0 += 1;
        if k0 > 100_000_000 {
            return Err(Error::ConstantInconsistency(
                "covering factor too close to 1: absorption index diverges".into(),
            ));
        }
    }
    while k0 > 1 && c_nu.powi(k0 as i32 - 1) * setup.c_d < 1.0 {
        k0 -= 1;
    }
    Ok(PowerDecay {
        level,
        gamma_pd: c_nu,
        eps_p: setup.input.eps * setup.input.c,
        eta_p,
        k0_absorb: k0,
        nu_eff: setup.input.nu.max(setup.delta_rd),
        c_nu,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HarnackConstants {
    /// Enlargement in the final quotient bound: 2K(2K eta_P + 1).
    pub eta_harnack: f64,
    /// Radius calibration; half its admissible upper bound.
    pub c1: f64,
    /// delta solving 1/M = gamma_pd^(delta/q), q = log2 C_D.
    pub delta_exp: f64,
    /// Distance budget over the dyadic chain; twice its lower bound.
    pub beta_star: f64,
    pub ln_beta_star: f64,
    /// Chain length; 1 in the degenerate alpha = 1 case.
    pub k0: u32,
    /// Final quotient constant; may overflow f64, `ln_c_harnack` is exact.
    pub c_harnack: f64,
    pub ln_c_harnack: f64,
}

pub fn derive_harnack(setup: &PdSetup, pd: &PowerDecay) -> Result<HarnackConstants> {
    setup.validate()?;
    let k = setup.k;
    let alpha = setup.alpha_h;
    let gamma = pd.gamma_pd;
    let q = setup.c_d.log2();
    if !(q > 0.0) {
        return Err(Error::InvalidInput("doubling constant must exceed 1".into()));
    }
    let eta_harnack = 2.0 * k * (2.0 * k * pd.eta_p + 1.0);
    let c1 = 0.5 * (gamma * (1.0 - gamma)).powf(1.0 / q)
        / (setup.c_d.powf(1.0 / q) * 4.0 * k * pd.eta_p);
    let delta_exp = q * pd.level.ln_m / -gamma.ln();

    // beta_star = 2 * 2 (2K)^(1-alpha) beta / (1 - (1 + 1/M)^(-alpha/delta));
    // for huge M the denominator is asymptotically (alpha/delta)/M.
    let inv_m = (-pd.level.ln_m).exp();
    let ln_denom = if inv_m > 0.0 {
        let t = alpha / delta_exp * inv_m.ln_1p();
        (-(-t).exp_m1()).ln()
    } else {
        (alpha / delta_exp).ln() - pd.level.ln_m
    };
    let ln_beta_star = (4.0f64).ln() + (1.0 - alpha) * (2.0 * k).ln() + setup.beta_h.ln()
        - ln_denom;

    let k0 = if 1.0 - alpha < 1e-12 {
        1
    } else {
        let pow = std::f64::consts::LN_2 / (1.0 - alpha);
        let ln_term = if pow > 700.0 { pow } else { pow.exp_m1().ln() };
        let bound = q * (c1.ln() + ln_term) / gamma.ln();
        let k0 = bound.ceil() + 1.0;
        if k0 > u32::MAX as f64 {
            return Err(Error::ConstantInconsistency(format!(
                "chain length overflows: bound = {bound}"
            )));
        }
        (k0.max(1.0)) as u32
    };

    let ln_candidate_near = (k0 as f64 + 1.0) * pd.level.ln_m;
    let ln_candidate_chain =
        pd.level.ln_m + delta_exp / alpha * ln_beta_star - delta_exp * c1.ln();
    let ln_c_harnack = -pd.eps_p.ln() + ln_candidate_near.max(ln_candidate_chain);
    Ok(HarnackConstants {
        eta_harnack,
        c1,
        delta_exp,
        beta_star: ln_beta_star.exp(),
        ln_beta_star,
        k0,
        c_harnack: ln_c_harnack.exp(),
        ln_c_harnack,
    })
}

/// One serialized constant: name, value (None when it overflows f64),
/// natural log where meaningful, defining formula, and a one-line origin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub name: String,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln_value: Option<f64>,
    pub formula: String,
    pub origin: String,
}

fn entry(name: &str, value: f64, formula: &str, origin: &str) -> LedgerEntry {
    LedgerEntry {
        name: name.into(),
        value: value.is_finite().then_some(value),
        ln_value: None,
        formula: formula.into(),
        origin: origin.into(),
    }
}

fn entry_ln(name: &str, value: f64, ln_value: f64, formula: &str, origin: &str) -> LedgerEntry {
    LedgerEntry {
        name: name.into(),
        value: value.is_finite().then_some(value),
        ln_value: Some(ln_value),
        formula: formula.into(),
        origin: origin.into(),
    }
}

/// Complete derived-constant ledger for one input set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub setup: PdSetup,
    pub base: BaseConstants,
    pub power_decay: PowerDecay,
    pub harnack: HarnackConstants,
    /// Head of the nested-radius sequence.
    pub t_head: Vec<f64>,
    pub t_limit: f64,
}

pub fn build_ledger(setup: &PdSetup) -> Result<ConstantLedger> {
    let base = derive_base_constants(&setup.input, setup.k)?;
    let power_decay = derive_power_decay(setup)?;
    let harnack = derive_harnack(setup, &power_decay)?;
    let t_head = tk_sequence(&power_decay.level, 8)?;
    Ok(ConstantLedger {
        setup: *setup,
        base,
        power_decay,
        harnack,
        t_head,
        t_limit: tk_limit(&power_decay.level),
    })
}

impl ConstantLedger {
    pub fn entries(&self) -> Vec<LedgerEntry> {
        let level = &self.power_decay.level;
        vec![
            entry(
                "M0",
                self.base.m0,
                "M0 = 1/(gamma*c)",
                "level jump of one critical-density step",
            ),
            entry(
                "sigma_exp",
                self.base.sigma_exp,
                "sigma = -ln(2)/ln(gamma)",
                "decay exponent normalised by gamma^sigma = 1/2",
            ),
            entry_ln(
                "M1",
                self.base.m1,
                self.base.ln_m1,
                "M1 = (4K)^(1/sigma) * M0",
                "threshold where the shrinking-radius iteration closes",
            ),
            entry(
                "theta",
                self.base.theta,
                "theta = K(1 + 4*eta*K)",
                "enlargement absorbing the norm gate of one step",
            ),
            entry(
                "q_pd",
                level.q_pd,
                "q = M^(-sigma*alpha)",
                "per-level contraction ratio",
            ),
            entry_ln(
                "beta1",
                level.beta1,
                level.ln_beta1,
                "beta1 = (2K)^(alpha-1) * beta * M1^(sigma*alpha) * (1+M1^sigma)^(1-alpha)",
                "Hölder budget spent per level step",
            ),
            entry_ln(
                "M",
                level.m,
                level.ln_m,
                "smallest M0*2^j with beta1*M^(-2*sigma*alpha) < 1/4 and beta1*M^(-3*sigma*alpha)/(1-M^(-sigma*alpha)) < 1/4",
                "level base keeping the nested radii above r/2",
            ),
            entry(
                "eps_P",
                self.power_decay.eps_p,
                "eps_P = eps * c",
                "norm gate of the power-decay statement",
            ),
            entry(
                "eta_P",
                self.power_decay.eta_p,
                "eta_P = max{K(3*eta*K+1), theta} + 1 (ring) or 2*max{...} (continuity)",
                "ball enlargement of the power-decay gate",
            ),
            entry(
                "gamma_pd",
                self.power_decay.gamma_pd,
                "gamma_pd = c(nu)",
                "covering contraction factor, external input",
            ),
            entry(
                "k0_absorb",
                self.power_decay.k0_absorb as f64,
                "least k with c(nu)^k * C_D < 1",
                "absorbs the doubling constant into the decay",
            ),
            entry(
                "T_1",
                self.t_head[0],
                "T_1 = 3/4",
                "first nested radius",
            ),
            entry(
                "T_limit",
                self.t_limit,
                "T_limit = 3/4 - beta1*q^3/(1-q)",
                "limit of T_{k+1} = T_k - beta1*q^(k+2); must stay above 1/2",
            ),
            entry(
                "eta_harnack",
                self.harnack.eta_harnack,
                "eta = 2K(2K*eta_P + 1)",
                "enlargement in the final quotient bound",
            ),
            entry(
                "c1",
                self.harnack.c1,
                "c1 = (1/2) * (gamma_pd*(1-gamma_pd))^(1/q) / (C_D^(1/q)*4K*eta_P), q = log2 C_D",
                "radius calibration for the oscillation chain",
            ),
            entry(
                "delta_exp",
                self.harnack.delta_exp,
                "delta = q*ln(M)/ln(1/gamma_pd)",
                "exponent matching 1/M = gamma_pd^(delta/q)",
            ),
            entry_ln(
                "beta_star",
                self.harnack.beta_star,
                self.harnack.ln_beta_star,
                "beta_star = 2 * 2*(2K)^(1-alpha)*beta / (1 - (1+1/M)^(-alpha/delta))",
                "distance budget over the dyadic chain",
            ),
            entry(
                "k0",
                self.harnack.k0 as f64,
                "k0 = ceil((q/ln gamma_pd)*ln(c1*(2^(1/(1-alpha))-1))) + 1; 1 when alpha = 1",
                "chain length before the budget dominates",
            ),
            entry_ln(
                "C_harnack",
                self.harnack.c_harnack,
                self.harnack.ln_c_harnack,
                "C = (1/eps_P) * max{M^(k0+1), M*beta_star^(delta/alpha)*c1^(-delta)}",
                "final quotient constant",
            ),
        ]
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct LedgerDoc<'a> {
            schema_version: &'static str,
            setup: &'a PdSetup,
            constants: Vec<LedgerEntry>,
        }
        Ok(serde_json::to_string_pretty(&LedgerDoc {
            schema_version: crate::harness::report::SCHEMA_VERSION,
            setup: &self.setup,
            constants: self.entries(),
        })?)
    }

    /// Exact identities every valid ledger satisfies; returns the worst
    /// absolute deviation over all of them.
    pub fn identity_residual(&self) -> f64 {
        let input = &self.setup.input;
        let mut worst = (input.gamma.powf(self.base.sigma_exp) - 0.5).abs();
        worst = worst.max((self.base.m0 * input.gamma * input.c - 1.0).abs());
        worst = worst.max((self.power_decay.eps_p - input.eps * input.c).abs());
        let eta_identity =
            2.0 * self.setup.k * (2.0 * self.setup.k * self.power_decay.eta_p + 1.0);
        worst = worst.max((self.harnack.eta_harnack - eta_identity).abs() / eta_identity);
        worst = worst.max((self.t_head[0] - 0.75).abs());
        worst
    }
}
