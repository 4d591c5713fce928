//! Numerical certification of the energy identities, inequalities and
//! ε-uniform bounds of the regularised ZK system.
//!
//! Every check returns an [`IdentityReport`] with the two sides, a documented
//! normaliser `scale` and `residual = |lhs - rhs| / scale`. Checks built on
//! physical quadrature evaluate each integral twice, on the exact working grid
//! and on a 4× oversampled oracle grid, and fail unless the two agree.

use std::fmt;
use std::sync::Arc;

use crate::domain::{Axis3, Basis, Mode, SpectralField};
use crate::error::{Error, Result};
use crate::functionals::{self, grad_weight, modal_quadratic, semi2_weight};
use crate::operators::{diff, nonlinear_term, SolverParams};
use crate::par;
use crate::quadrature::integrate_polynomial;
use crate::random::{random_fields, RandomFieldOptions};
use crate::timestepper::{integrate, DiagnosticsConfig, DiagnosticsRecord};

/// Oversampling factor of the quadrature oracle.
pub const ORACLE_OVERSAMPLE: usize = 4;

/// Outcome of one identity or inequality check.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// Equality report: `residual = |lhs - rhs| / scale` (scale 0 is read as 1).
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, scale: f64, tolerance: f64) -> Self {
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        let residual = (lhs - rhs).abs() / scale;
        IdentityReport {
            name: name.into(),
            lhs,
            rhs,
            residual,
            scale,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// Inequality report for `lhs ≤ rhs + tolerance`; `residual` is the excess
    /// `max(lhs - rhs, 0)`.
    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let residual = (lhs - rhs).max(0.0);
        IdentityReport {
            name: name.into(),
            lhs,
            rhs,
            residual,
            scale: 1.0,
            tolerance,
            pass: lhs.is_finite() && residual <= tolerance,
        }
    }

    /// Measured value with no pass criterion beyond finiteness.
    pub fn measured(name: impl Into<String>, value: f64) -> Self {
        IdentityReport {
            name: name.into(),
            lhs: value,
            rhs: f64::NAN,
            residual: 0.0,
            scale: 1.0,
            tolerance: f64::INFINITY,
            pass: value.is_finite(),
        }
    }

    /// Merges a batch into its worst member under a new name.
    pub fn worst(name: impl Into<String>, reports: &[IdentityReport]) -> Option<Self> {
        let mut worst = reports
            .iter()
            .max_by(|a, b| {
                (a.pass as u8)
                    .cmp(&(b.pass as u8))
                    .reverse()
                    .then(a.residual.total_cmp(&b.residual))
            })?
            .clone();
        worst.name = name.into();
        worst.pass = reports.iter().all(|r| r.pass);
        Some(worst)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<32} {:>13.6e} {:>13.6e} {:>11.3e} {:>11.3e} {}",
            self.name,
            self.lhs,
            self.rhs,
            self.residual,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Tolerances of every check; each comes from a refinement study and can be
/// overridden from the run configuration.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub skew: f64,
    pub nonlinear_neutral: f64,
    pub identity_52: f64,
    pub oracle_agreement: f64,
    pub l2_conservation: f64,
    pub e1_conservation: f64,
    pub l2_balance: f64,
    pub mean_law: f64,
    pub poincare_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            skew: 1e-12,
            nonlinear_neutral: 1e-10,
            identity_52: 1e-8,
            oracle_agreement: 1e-12,
            l2_conservation: 1e-8,
            e1_conservation: 1e-6,
            l2_balance: 1e-6,
            mean_law: 1e-13,
            poincare_slack: 1e-12,
        }
    }
}

/// `(Δ∂_x + c∂_x) u` assembled from modal derivatives.
fn dispersive_action(u: &SpectralField, c: f64) -> Result<SpectralField> {
    let ux = diff(u, Axis3::X, 1)?;
    let mut out = diff(u, Axis3::X, 3)?.axpy(c, &ux)?;
    out = out.add(&diff(&ux, Axis3::Y, 2)?)?;
    if u.basis().d() == 2 {
        out = out.add(&diff(&ux, Axis3::Z, 2)?)?;
    }
    Ok(out)
}

fn max_dispersive(basis: &Basis, c: f64) -> f64 {
    let xi = basis.xi();
    let (m1, m2) = (basis.mu(1), basis.mu(2));
    let t = m1.iter().fold(0.0f64, |a, v| a.max(v * v)) + m2.iter().fold(0.0f64, |a, v| a.max(v * v));
    xi.iter()
        .map(|k| (k * (c - k * k)).abs() + k.abs() * t)
        .fold(0.0, f64::max)
}

/// `⟨(Δ∂_x + c∂_x)u, u⟩ = 0`, normalised by `|u|² · max|σ_disp|`.
pub fn check_skew(u: &SpectralField, c: f64, tolerance: f64) -> Result<IdentityReport> {
    let lhs = dispersive_action(u, c)?.inner(u)?;
    let scale = u.norm_sq() * max_dispersive(u.basis(), c);
    Ok(IdentityReport::equality("skew", lhs, 0.0, scale, tolerance))
}

/// `⟨N(u), u⟩ = 0` for the projected nonlinearity, normalised by `|N(u)| |u|`.
///
/// With `dealias` the check is exact up to roundoff; without it the residual
/// measures aliasing and is informative only.
pub fn check_nonlinear_neutral(u: &SpectralField, dealias: bool, tolerance: f64) -> Result<IdentityReport> {
    let n = nonlinear_term(u, dealias)?;
    let lhs = n.inner(u)?;
    let scale = n.norm() * u.norm();
    let name = if dealias { "nonlinear-neutral" } else { "nonlinear-neutral(aliased)" };
    Ok(IdentityReport::equality(name, lhs, 0.0, scale, tolerance))
}

/// Integral evaluated on the working grid and checked against the oracle.
fn certified<F>(fields: &[&SpectralField], degree: usize, agreement: f64, scale: f64, g: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let work = integrate_polynomial(fields, degree, 1, &g)?;
    let oracle = integrate_polynomial(fields, degree, ORACLE_OVERSAMPLE, &g)?;
    if (work - oracle).abs() > agreement * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Argument(format!(
            "quadrature oracle disagrees: working {work:e}, oracle {oracle:e}"
        )));
    }
    Ok(work)
}

/// `∫ u u_x u_xxxx = (5/2) ∫ u_x u_xx²`.
///
/// Normaliser: `∫|u_x| u_xx² + ∫|u u_x u_xxxx|` (oversampled quadrature). Both
/// sides must match the 4× oracle to `tol.oracle_agreement · scale`.
pub fn check_52_identity(u: &SpectralField, tol: &Tolerances) -> Result<IdentityReport> {
    u.require_standard()?;
    let ux = diff(u, Axis3::X, 1)?;
    let uxx = diff(u, Axis3::X, 2)?;
    let uxxxx = diff(u, Axis3::X, 4)?;
    let fields = [u, &ux, &uxx, &uxxxx];
    let scale = integrate_polynomial(&fields, 3, 2, |v| (v[1].abs() * v[2] * v[2]) + (v[0] * v[1] * v[3]).abs())?;
    let name = "identity-5/2";
    let sides = certified(&fields, 3, tol.oracle_agreement, scale, |v| v[0] * v[1] * v[3]).and_then(|lhs| {
        certified(&fields, 3, tol.oracle_agreement, scale, |v| 2.5 * v[1] * v[2] * v[2]).map(|rhs| (lhs, rhs))
    });
    match sides {
        Ok((lhs, rhs)) => Ok(IdentityReport::equality(name, lhs, rhs, scale, tol.identity_52)),
        Err(Error::Argument(_)) => Ok(IdentityReport {
            name: name.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            residual: f64::INFINITY,
            scale,
            tolerance: tol.identity_52,
            pass: false,
        }),
        Err(e) => Err(e),
    }
}

fn nonempty(records: &[DiagnosticsRecord]) -> Result<&DiagnosticsRecord> {
    records
        .first()
        .ok_or_else(|| Error::Argument("empty trajectory".to_string()))
}

/// `max_t |E1(t) - E1(0)| / (1 + |E1(0)|)` for an unforced, unregularised run.
pub fn check_e1_conservation(records: &[DiagnosticsRecord], tolerance: f64) -> Result<IdentityReport> {
    let first = nonempty(records)?;
    let drift = records.iter().map(|r| r.e1_drift.abs()).fold(0.0, f64::max);
    let scale = 1.0 + (first.e1).abs();
    Ok(IdentityReport::equality("e1-conservation", drift, 0.0, scale, tolerance))
}

/// `max_t ||u(t)| - |u(0)||` for an unforced, unregularised run.
pub fn check_l2_conservation(records: &[DiagnosticsRecord], tolerance: f64) -> Result<IdentityReport> {
    let first = nonempty(records)?;
    let drift = records.iter().map(|r| (r.l2 - first.l2).abs()).fold(0.0, f64::max);
    Ok(IdentityReport::equality("l2-conservation", drift, 0.0, 1.0, tolerance))
}

/// `|u(T)|² + 2ε∫[u]₂² - |u₀|² - 2∫⟨f,u⟩ = 0`, normalised by `|u₀|² + ∫|f|²`.
pub fn check_l2_balance(records: &[DiagnosticsRecord], tolerance: f64) -> Result<IdentityReport> {
    let first = nonempty(records)?;
    let last = records.last().unwrap();
    let lhs = last.l2 * last.l2 + last.diss_integral;
    let rhs = first.l2 * first.l2 + last.forcing_work;
    let scale = first.l2 * first.l2 + last.forcing_sq_integral;
    Ok(IdentityReport::equality("l2-balance", lhs, rhs, scale, tolerance))
}

/// `|u(t)|² ≤ e^t (|u₀|² + ∫_0^t |f|²)` at every sample; reports the largest
/// ratio of the two sides.
pub fn check_gronwall(records: &[DiagnosticsRecord]) -> Result<IdentityReport> {
    let first = nonempty(records)?;
    let u0 = first.l2 * first.l2;
    let worst = records
        .iter()
        .map(|r| {
            let env = r.t.exp() * (u0 + r.forcing_sq_integral);
            if env > 0.0 {
                r.l2 * r.l2 / env
            } else if r.l2 == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    Ok(IdentityReport::bound("gronwall-envelope", worst, 1.0, 0.0))
}

/// `max_t |ū(t) - ū_pred(t)|` with `ū_pred` the closed-form x-average law.
pub fn check_mean_law(records: &[DiagnosticsRecord], tolerance: f64) -> Result<IdentityReport> {
    nonempty(records)?;
    let worst = records.iter().map(|r| r.mean_residual).fold(0.0, f64::max);
    Ok(IdentityReport::equality("mean-law", worst, 0.0, 1.0, tolerance))
}

/// `|ū_a - ū_b|` for two solutions of the same problem: the x-averages obey
/// a closed linear law, so they agree whatever the nonlinear trajectories do.
pub fn check_mean_agreement(a: &SpectralField, b: &SpectralField, tolerance: f64) -> Result<IdentityReport> {
    let w = a.x_mean_field().sub(&b.x_mean_field())?.norm();
    Ok(IdentityReport::equality("mean-difference", w, 0.0, 1.0, tolerance))
}

/// Empirical constants of the Poincaré-type inequalities.
#[derive(Clone, Debug, PartialEq)]
pub struct PoincareStats {
    pub samples: usize,
    /// `max |u_x| / |u_xx|`, bounded by `1/(2π)` on x-mean-free fields.
    pub ratio_x: f64,
    /// `max |u_xy|² / [u]₂²`, bounded by 1.
    pub ratio_mixed: f64,
    /// `max |u|²_{H²} / ([u]₂² + |u|²)`, the measured equivalence constant.
    pub ratio_h2: f64,
    /// `max |u|_{L³} / (|u|^{1/2} |∇u|^{1/2})` over the first `l3_samples` fields.
    pub ratio_l3: f64,
    pub l3_samples: usize,
}

/// Samples the inequalities over `samples` random x-mean-free fields.
///
/// The L³ interpolation ratio needs refined quadrature and is sampled on at
/// most `l3_samples` of them.
pub fn poincare_sampling(
    basis: &Arc<Basis>,
    seed: u64,
    samples: usize,
    l3_samples: usize,
    tol: &Tolerances,
) -> Result<(Vec<IdentityReport>, PoincareStats)> {
    if samples < 100 {
        return Err(Error::Argument(format!("poincare suite needs at least 100 samples, got {samples}")));
    }
    let opts = RandomFieldOptions {
        mean_free: true,
        ..Default::default()
    };
    let fields = random_fields(basis, seed, samples, &opts);
    let per_field: Vec<Result<(f64, f64, f64)>> = par::map_slice(&fields, |u| {
        let ux = diff(u, Axis3::X, 1)?;
        let uxx = diff(u, Axis3::X, 2)?;
        let uxy = diff(&ux, Axis3::Y, 1)?;
        let semi = modal_quadratic(u, semi2_weight);
        let r1 = ux.norm() / uxx.norm();
        let r2 = uxy.norm_sq() / semi;
        let r3 = functionals::h2_norm(u).powi(2) / (semi + u.norm_sq());
        Ok((r1, r2, r3))
    });
    let mut stats = PoincareStats {
        samples,
        ratio_x: 0.0,
        ratio_mixed: 0.0,
        ratio_h2: 0.0,
        ratio_l3: 0.0,
        l3_samples: l3_samples.min(samples),
    };
    for r in per_field {
        let (a, b, c) = r?;
        stats.ratio_x = stats.ratio_x.max(a);
        stats.ratio_mixed = stats.ratio_mixed.max(b);
        stats.ratio_h2 = stats.ratio_h2.max(c);
    }
    let l3: Vec<Result<f64>> = par::map_slice(&fields[..stats.l3_samples], |u| {
        Ok(functionals::lp_norm(u, 3)? / (u.norm() * functionals::grad_l2(u)).sqrt())
    });
    for r in l3 {
        stats.ratio_l3 = stats.ratio_l3.max(r?);
    }
    let reports = vec![
        IdentityReport::bound(
            "poincare-x",
            stats.ratio_x,
            1.0 / (2.0 * std::f64::consts::PI),
            tol.poincare_slack,
        ),
        IdentityReport::bound("mixed-derivative", stats.ratio_mixed, 1.0, 0.0),
        IdentityReport::measured("h2-equivalence", stats.ratio_h2),
        IdentityReport::measured("l3-interpolation", stats.ratio_l3),
    ];
    Ok((reports, stats))
}

/// [`poincare_sampling`] reports only, with the L³ ratio on up to 200 fields.
pub fn check_poincare_suite(basis: &Arc<Basis>, seed: u64, samples: usize, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
    poincare_sampling(basis, seed, samples, 200, tol).map(|(r, _)| r)
}

/// Every real single-mode field `B_(k,n,m)` of the basis.
pub fn basis_elements(basis: &Arc<Basis>) -> Result<Vec<SpectralField>> {
    let (a, b, c) = basis.shape();
    let ax = basis.axes();
    let mut out = Vec::new();
    for i in 0..a {
        let k = ax[0].index_label(i);
        for j in 0..b {
            let n = ax[1].index_label(j);
            for l in 0..c {
                let m = ax[2].index_label(l);
                out.push(SpectralField::from_real_modes(basis, &[(Mode::new3(k, n, m), 1.0)])?);
            }
        }
    }
    Ok(out)
}

/// Result of the static identity suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    /// Worst case per check.
    pub reports: Vec<IdentityReport>,
    pub poincare: PoincareStats,
    pub basis_elements: usize,
    pub random_fields: usize,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// Sample counts of [`static_suite_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Random fields for skew, neutrality and the Poincaré ratios.
    pub samples: usize,
    /// Random fields (from the same draw) for the 5/2 identity.
    pub identity_samples: usize,
    /// Fields for the L³ interpolation ratio.
    pub l3_samples: usize,
}

impl SuiteOptions {
    pub fn new(samples: usize) -> Self {
        SuiteOptions {
            samples,
            identity_samples: 50,
            l3_samples: 200,
        }
    }
}

/// Skew and neutrality on every basis element and `samples` random fields, the
/// 5/2 identity on `min(samples, 50)` random fields, and the Poincaré suite.
pub fn static_suite(basis: &Arc<Basis>, c: f64, seed: u64, samples: usize, tol: &Tolerances) -> Result<SuiteReport> {
    static_suite_with(basis, c, seed, &SuiteOptions::new(samples), tol)
}

/// [`static_suite`] with explicit sample counts.
pub fn static_suite_with(basis: &Arc<Basis>, c: f64, seed: u64, opts: &SuiteOptions, tol: &Tolerances) -> Result<SuiteReport> {
    let samples = opts.samples;
    let elements = basis_elements(basis)?;
    let randoms = random_fields(basis, seed, samples, &RandomFieldOptions::default());
    let skew_neutral = |set: &[SpectralField]| -> Result<(Vec<IdentityReport>, Vec<IdentityReport>)> {
        let pairs: Vec<Result<(IdentityReport, IdentityReport)>> = par::map_slice(set, |u| {
            Ok((check_skew(u, c, tol.skew)?, check_nonlinear_neutral(u, true, tol.nonlinear_neutral)?))
        });
        let mut s = Vec::with_capacity(pairs.len());
        let mut n = Vec::with_capacity(pairs.len());
        for p in pairs {
            let (a, b) = p?;
            s.push(a);
            n.push(b);
        }
        Ok((s, n))
    };
    let (skew_b, neutral_b) = skew_neutral(&elements)?;
    let (skew_r, neutral_r) = skew_neutral(&randoms)?;
    let n52 = samples.min(opts.identity_samples);
    let id52: Vec<Result<IdentityReport>> = par::map_slice(&randoms[..n52], |u| check_52_identity(u, tol));
    let id52: Vec<IdentityReport> = id52.into_iter().collect::<Result<_>>()?;
    let (poincare_reports, poincare) = poincare_sampling(basis, seed.wrapping_add(1), samples.max(100), opts.l3_samples, tol)?;
    let mut reports = Vec::new();
    let mut push = |name: &str, set: &[IdentityReport]| {
        if let Some(r) = IdentityReport::worst(name, set) {
            reports.push(r);
        }
    };
    push("skew(basis)", &skew_b);
    push("skew(random)", &skew_r);
    push("nonlinear-neutral(basis)", &neutral_b);
    push("nonlinear-neutral(random)", &neutral_r);
    push("identity-5/2(random)", &id52);
    reports.extend(poincare_reports);
    Ok(SuiteReport {
        reports,
        poincare,
        basis_elements: elements.len(),
        random_fields: samples,
    })
}

/// Inputs of an ε-sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub u0: SpectralField,
    /// Shared parameters; `epsilon` is overridden per member.
    pub params: SolverParams,
    /// Strictly decreasing regularisation strengths.
    pub epsilons: Vec<f64>,
    pub diagnostics: DiagnosticsConfig,
}

/// `n` values `start, start·ratio, …`.
pub fn geometric_epsilons(start: f64, count: usize, ratio: f64) -> Vec<f64> {
    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
}

/// Per-member bounds of an ε-sweep.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundRow {
    pub epsilon: f64,
    pub sup_l2_sq: f64,
    pub sup_grad_sq: f64,
    /// `ε ∫_0^T [u]₂² dt`.
    pub eps_int_semi2: f64,
    /// `ε ∫_0^T [∇u]₂² dt`.
    pub eps_int_grad_semi2: f64,
    /// Largest mean-law residual of the member.
    pub mean_residual: f64,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub epsilons: Vec<f64>,
    /// `sup_t |u^{ε_i} - u^{ε_{i+1}}|` over the shared sample times.
    pub pairwise_gaps: Vec<f64>,
    pub bound_table: Vec<BoundRow>,
    /// First failing member, if any; the other fields then hold the members
    /// that completed.
    pub aborted: Option<(f64, String)>,
}

impl SweepReport {
    pub fn into_result(self) -> Result<SweepReport> {
        match &self.aborted {
            Some((epsilon, reason)) => Err(Error::SweepAborted {
                epsilon: *epsilon,
                reason: reason.clone(),
            }),
            None => Ok(self),
        }
    }

    /// Largest relative spread `(max - min) / max` of a bound-table column.
    pub fn spread<F: Fn(&BoundRow) -> f64>(&self, column: F) -> f64 {
        let vals: Vec<f64> = self.bound_table.iter().map(column).collect();
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        if hi > 0.0 {
            (hi - lo) / hi
        } else {
            0.0
        }
    }

    pub fn gaps_strictly_decreasing(&self) -> bool {
        self.pairwise_gaps.windows(2).all(|w| w[1] < w[0])
    }
}

/// Runs every member (in parallel) and compares neighbouring trajectories.
pub fn run_eps_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.epsilons.is_empty() {
        return Err(Error::Argument("empty epsilon list".to_string()));
    }
    if cfg.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Argument("epsilon list must be strictly decreasing".to_string()));
    }
    type Member = Result<(BoundRow, Vec<SpectralField>)>;
    let members: Vec<Member> = par::map_slice(&cfg.epsilons, |&eps| {
        let mut p = cfg.params.clone();
        p.epsilon = eps;
        let mut samples = Vec::new();
        let out = integrate(&cfg.u0, &p, &cfg.diagnostics, |s, _| {
            samples.push(s.u.clone());
            Ok(())
        })?;
        let rec = &out.records;
        let sup_l2_sq = rec.iter().map(|r| r.l2 * r.l2).fold(0.0, f64::max);
        let sup_grad_sq = rec.iter().map(|r| r.grad_l2 * r.grad_l2).fold(0.0, f64::max);
        let last = rec.last().unwrap();
        Ok((
            BoundRow {
                epsilon: eps,
                sup_l2_sq,
                sup_grad_sq,
                eps_int_semi2: 0.5 * last.diss_integral,
                eps_int_grad_semi2: last.eps_grad_semi2_integral,
                mean_residual: rec.iter().map(|r| r.mean_residual).fold(0.0, f64::max),
            },
            samples,
        ))
    });
    let mut rows = Vec::new();
    let mut trajectories = Vec::new();
    let mut aborted = None;
    for (eps, m) in cfg.epsilons.iter().zip(members) {
        match m {
            Ok((row, traj)) => {
                rows.push(row);
                trajectories.push(traj);
            }
            Err(e) => {
                aborted = Some((*eps, e.to_string()));
                break;
            }
        }
    }
    let mut gaps = Vec::new();
    for w in trajectories.windows(2) {
        let mut sup: f64 = 0.0;
        for (a, b) in w[0].iter().zip(&w[1]) {
            sup = sup.max(a.sub(b)?.norm());
        }
        gaps.push(sup);
    }
    Ok(SweepReport {
        epsilons: rows.iter().map(|r| r.epsilon).collect(),
        pairwise_gaps: gaps,
        bound_table: rows,
        aborted,
    })
}

/// One row of a manufactured-solution convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmsRow {
    pub dt: f64,
    pub steps: usize,
    /// `max_t |u(t) - u*(t)|` over the time levels of the coarsest step.
    pub error: f64,
    /// `log(e_prev / e) / log(dt_prev / dt)`; `None` on the first row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct MmsStudy {
    pub case: String,
    pub rows: Vec<MmsRow>,
    /// `max_t |u*_t - F(u*, t)| / (|u*_t| + |Λu*|)` over the sample times,
    /// where `F` is the semidiscrete right-hand side and `Λ` its linear part:
    /// the spatial consistency of the case.
    pub spatial_residual: f64,
    /// `|u* - P u*|` with `P` the dealiasing truncation: the catalog field lies
    /// in the resolved span.
    pub truncation_error: f64,
}

impl MmsStudy {
    /// Observed orders of every refinement pair.
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    /// Least-squares slope of `ln error` against `ln dt` over the whole ladder.
    pub fn fitted_order(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.dt.ln(), r.error.ln())).collect();
        let n = pts.len() as f64;
        let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }
}

/// Runs a manufactured case at every `dt` (in parallel) and tabulates the
/// sup-in-time error up to `params.t_final`. The forcing in `params` is replaced by the case.
pub fn run_mms_study(basis: &Arc<Basis>, params: &SolverParams, case: &str, scale: f64, dts: &[f64]) -> Result<MmsStudy> {
    use crate::forcing::ForcingSpec;
    use crate::io::mms::manufactured_case;
    use crate::timestepper::{SimState, Stepper};

    let mc = manufactured_case(case, scale)?;
    mc.check_domain(basis)?;
    let spec = ForcingSpec::Manufactured {
        case: case.to_string(),
        amplitude: scale,
    };
    let t_final = params.t_final;
    let exact_end = mc.field(basis, t_final, 0)?;
    let coarse = dts.iter().cloned().fold(0.0, f64::max);
    let u0 = mc.field(basis, 0.0, 0)?;
    let runs: Vec<Result<MmsRow>> = par::map_slice(dts, |&dt| {
        let mut p = params.clone().with_forcing(spec.clone());
        p.dt = dt;
        p.validate()?;
        let stepper = Stepper::new(basis, &p)?;
        let stride = ((coarse / dt).round() as usize).max(1);
        let mut state = SimState::initial(u0.clone());
        let mut error: f64 = 0.0;
        for i in 1..=p.steps() {
            state = stepper.step(&state)?;
            if i % stride == 0 || i == p.steps() {
                error = error.max(state.u.sub(&mc.field(basis, state.t, 0)?)?.norm());
            }
        }
        Ok(MmsRow {
            dt,
            steps: p.steps(),
            error,
            order: None,
        })
    });
    let mut rows: Vec<MmsRow> = runs.into_iter().collect::<Result<_>>()?;
    for i in 1..rows.len() {
        let (a, b) = (rows[i - 1], rows[i]);
        rows[i].order = Some((a.error / b.error).ln() / (a.dt / b.dt).ln());
    }
    let mut p = params.clone().with_forcing(spec);
    p.dt = dts.iter().cloned().fold(f64::MAX, f64::min).min(t_final);
    let stepper = Stepper::new(basis, &p)?;
    let mut spatial: f64 = 0.0;
    for i in 0..=8 {
        let t = t_final * i as f64 / 8.0;
        let u = mc.field(basis, t, 0)?;
        let ut = mc.field(basis, t, 1)?;
        let f = stepper.rhs(&u, t)?;
        let scale = ut.norm() + stepper.symbol().apply(&u)?.norm();
        spatial = spatial.max(ut.sub(&f)?.norm() / scale.max(f64::MIN_POSITIVE));
    }
    let truncation_error = exact_end.sub(&exact_end.dealiased())?.norm();
    Ok(MmsStudy {
        case: case.to_string(),
        rows,
        spatial_residual: spatial,
        truncation_error,
    })
}

/// `[∇u]₂²` of a field (used by sweep tables and tests).
pub fn grad_semi2_sq(u: &SpectralField) -> f64 {
    modal_quadratic(u, |k| grad_weight(k) * semi2_weight(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, DomainSpec, TransverseBc};
    use std::f64::consts::PI;

    fn basis() -> Arc<Basis> {
        build_domain(DomainSpec::new_2d(32, 16, TransverseBc::Dirichlet)).unwrap()
    }

    #[test]
    fn skew_on_modes_and_zero() {
        let b = basis();
        let z = SpectralField::zeros(&b);
        assert!(check_skew(&z, 1.0, 1e-12).unwrap().pass);
        let u = SpectralField::from_real_modes(&b, &[(Mode::new(3, 2), 1.0)]).unwrap();
        let r = check_skew(&u, 1.0, 1e-12).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn identity_52_examples() {
        let b = basis();
        let tol = Tolerances::default();
        let u = SpectralField::from_real_modes(&b, &[(Mode::new(1, 1), 1.0)]).unwrap();
        let r = check_52_identity(&u, &tol).unwrap();
        assert!(r.lhs.abs() < 1e-10 && r.rhs.abs() < 1e-10, "{r}");
        let v = SpectralField::from_real_modes(&b, &[(Mode::new(1, 1), 1.0), (Mode::new(-2, 1), 1.0)]).unwrap();
        let r = check_52_identity(&v, &tol).unwrap();
        assert!(r.pass && r.residual < 1e-9, "{r}");
        assert!(r.lhs.abs() > 1.0);
    }

    #[test]
    fn poincare_extremal_mode() {
        let b = basis();
        let u = SpectralField::from_real_modes(&b, &[(Mode::new(-1, 1), 1.0)]).unwrap();
        let ux = diff(&u, Axis3::X, 1).unwrap();
        let uxx = diff(&u, Axis3::X, 2).unwrap();
        assert!((ux.norm() / uxx.norm() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let w = SpectralField::from_real_modes(&b, &[(Mode::new(1, 1), 1.0)]).unwrap();
        let uxy = diff(&diff(&w, Axis3::X, 1).unwrap(), Axis3::Y, 1).unwrap();
        let ratio = uxy.norm_sq() / functionals::seminorm2(&w).powi(2);
        let tp2 = (2.0 * PI).powi(2);
        assert!((ratio - tp2 / (tp2 * tp2 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn worst_prefers_failures() {
        let a = IdentityReport::equality("a", 1.0, 1.0, 1.0, 1e-12);
        let b = IdentityReport::equality("b", 1.0, 0.0, 1.0, 1e-12);
        let w = IdentityReport::worst("x", &[a, b]).unwrap();
        assert!(!w.pass);
        assert_eq!(w.name, "x");
        assert_eq!(w.residual, 1.0);
    }

    #[test]
    fn sweep_rejects_non_decreasing_list() {
        let b = basis();
        let cfg = SweepConfig {
            u0: SpectralField::zeros(&b),
            params: SolverParams::new(1e-2, 1.0, 1e-2, 0.02),
            epsilons: vec![1e-2, 2e-2],
            diagnostics: DiagnosticsConfig::default(),
        };
        assert!(run_eps_sweep(&cfg).is_err());
        assert_eq!(geometric_epsilons(1e-2, 3, 0.5), vec![1e-2, 5e-3, 2.5e-3]);
    }
}
