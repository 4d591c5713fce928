//! Run configuration.
//!
//! The file format is TOML: `key = value` lines grouped into sections. Every
//! table rejects unknown keys, so a misspelt option is an error rather than a
//! silently ignored setting.
//!
//! ```toml
//! seed = 7
//!
//! [domain]
//! d = 1
//! nx = 64
//! nt1 = 32
//! transverse_bc = "dirichlet"
//!
//! [params]
//! epsilon = 1e-3
//! c = 1.0
//! dt = 1e-3
//! t_final = 1.0
//!
//! [initial]
//! kind = "modal"
//! modes = [{ k = 1, n = 1, amplitude = 0.1 }]
//!
//! [diagnostics]
//! cadence = 10
//! ```
//!
//! Optional sections: `[params.forcing]`, `[output]`, `[tolerances]`,
//! `[sweep]`, `[mms]` and `[verify]`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Basis, DomainSpec, Mode, SpectralField, TransverseBc};
use crate::error::{Error, Result};
use crate::io::snapshot::read_snapshot;
use crate::operators::SolverParams;
use crate::random::{random_field, RandomFieldOptions};
use crate::timestepper::DiagnosticsConfig;
use crate::verifier::Tolerances;

/// One term `amplitude · B_(k,n,m)` of a modal initial condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalTerm {
    pub k: i64,
    pub n: i64,
    #[serde(default)]
    pub m: i64,
    pub amplitude: f64,
}

fn three() -> f64 {
    3.0
}

fn yes() -> bool {
    true
}

/// Initial-condition descriptor.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialCondition {
    #[default]
    Zero,
    Modal {
        modes: Vec<ModalTerm>,
    },
    /// Field read from a snapshot; `resample` allows a different resolution.
    Snapshot {
        path: PathBuf,
        #[serde(default)]
        resample: bool,
    },
    /// Seeded random field drawn with the run seed.
    Random {
        #[serde(default)]
        l2: Option<f64>,
        #[serde(default = "three")]
        decay: f64,
        #[serde(default = "yes")]
        mean_free: bool,
        #[serde(default = "yes")]
        dealiased: bool,
    },
}

impl InitialCondition {
    /// Builds the initial field on `basis`.
    pub fn build(&self, basis: &Arc<Basis>, seed: u64) -> Result<SpectralField> {
        match self {
            InitialCondition::Zero => Ok(SpectralField::zeros(basis)),
            InitialCondition::Modal { modes } => {
                let mut u = SpectralField::zeros(basis);
                for (i, t) in modes.iter().enumerate() {
                    u.add_real_mode(Mode::new3(t.k, t.n, t.m), t.amplitude)
                        .map_err(|e| Error::validation(format!("initial.modes[{i}]"), e.to_string()))?;
                }
                Ok(u)
            }
            InitialCondition::Snapshot { path, resample } => {
                let snap = read_snapshot(path)?;
                if *resample {
                    snap.field.resample(basis)
                } else if snap.field.basis().spec().normalized() == basis.spec().normalized() {
                    SpectralField::from_coeffs(basis, snap.field.coeffs().clone())
                } else {
                    Err(Error::Dimension(format!(
                        "snapshot {} does not match the configured domain (set resample = true to convert)",
                        path.display()
                    )))
                }
            }
            InitialCondition::Random {
                l2,
                decay,
                mean_free,
                dealiased,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(random_field(
                    basis,
                    &mut rng,
                    &RandomFieldOptions {
                        decay: *decay,
                        mean_free: *mean_free,
                        dealiased: *dealiased,
                        l2: *l2,
                    },
                ))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            InitialCondition::Modal { modes } => {
                for (i, t) in modes.iter().enumerate() {
                    if !t.amplitude.is_finite() {
                        return Err(Error::validation(format!("initial.modes[{i}].amplitude"), "must be finite"));
                    }
                }
                Ok(())
            }
            InitialCondition::Random { l2, decay, .. } => {
                if l2.is_some_and(|v| !(v >= 0.0) || !v.is_finite()) {
                    return Err(Error::validation("initial.l2", "must be finite and ≥ 0"));
                }
                if !decay.is_finite() {
                    return Err(Error::validation("initial.decay", "must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `[diagnostics]` section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// Steps between diagnostics records.
    pub cadence: usize,
    /// Blow-up guard, see [`DiagnosticsConfig::guard_factor`].
    pub guard_factor: f64,
    /// Records between trajectory snapshots; `0` writes the final state only.
    pub snapshot_every: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        let d = DiagnosticsConfig::default();
        DiagnosticsSection {
            cadence: d.cadence,
            guard_factor: d.guard_factor,
            snapshot_every: 0,
        }
    }
}

impl DiagnosticsSection {
    pub fn config(&self) -> DiagnosticsConfig {
        DiagnosticsConfig {
            cadence: self.cadence,
            guard_factor: self.guard_factor,
        }
    }
}

/// `[output]` section; file names are relative to `dir`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub diagnostics: String,
    pub final_snapshot: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            diagnostics: "diagnostics.csv".to_string(),
            final_snapshot: "final.zks".to_string(),
        }
    }
}

impl OutputSection {
    pub fn diagnostics_path(&self) -> PathBuf {
        self.dir.join(&self.diagnostics)
    }

    pub fn final_snapshot_path(&self) -> PathBuf {
        self.dir.join(&self.final_snapshot)
    }
}

/// `[sweep]` section: geometric ε list `start · ratio^i`, `i < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub eps_start: f64,
    pub eps_count: usize,
    pub eps_ratio: f64,
    /// Largest admissible relative spread of the sup-norm columns.
    pub uniformity_tol: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            eps_start: 1e-2,
            eps_count: 5,
            eps_ratio: 0.5,
            uniformity_tol: 0.1,
        }
    }
}

/// `[mms]` section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MmsSection {
    pub case: String,
    pub scale: f64,
    pub t_final: f64,
    pub dts: Vec<f64>,
    /// Accepted window `expected_order ± order_tol`.
    pub expected_order: f64,
    pub order_tol: f64,
}

impl Default for MmsSection {
    fn default() -> Self {
        MmsSection {
            case: "nonlinear-moderate".to_string(),
            scale: 1.0,
            t_final: 1.0,
            dts: vec![4e-3, 2e-3, 1e-3, 5e-4],
            expected_order: 4.0,
            order_tol: 0.3,
        }
    }
}

/// `[verify]` section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub samples: usize,
    pub identity_samples: usize,
    pub l3_samples: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            samples: 1000,
            identity_samples: 50,
            l3_samples: 200,
        }
    }
}

/// A complete, validated run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainSpec,
    pub params: SolverParams,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub mms: MmsSection,
    #[serde(default)]
    pub verify: VerifySection,
}

impl Default for RunConfig {
    /// `d = 1`, 64 × 32 Dirichlet box, `ε = 1e-3`, `c = 1`, `dt = 1e-3`, `T = 1`,
    /// zero initial condition.
    fn default() -> Self {
        RunConfig {
            seed: 0,
            domain: DomainSpec::new_2d(64, 32, TransverseBc::Dirichlet),
            params: SolverParams::new(1e-3, 1.0, 1e-3, 1.0),
            initial: InitialCondition::Zero,
            diagnostics: DiagnosticsSection::default(),
            output: OutputSection::default(),
            tolerances: Tolerances::default(),
            sweep: SweepSection::default(),
            mms: MmsSection::default(),
            verify: VerifySection::default(),
        }
    }
}

/// 1-based `(line, column)` of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

fn prefixed(section: &str, e: Error) -> Error {
    match e {
        Error::Validation { field, reason } if !field.starts_with(section) => {
            Error::validation(format!("{section}.{field}"), reason)
        }
        Error::Domain(reason) => Error::validation(section, reason),
        other => other,
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.domain.validate().map_err(|e| prefixed("domain", e))?;
        self.params.validate().map_err(|e| prefixed("params", e))?;
        self.initial.validate()?;
        if self.diagnostics.cadence < 1 {
            return Err(Error::validation("diagnostics.cadence", "cadence must be ≥ 1"));
        }
        if !(self.diagnostics.guard_factor > 1.0) {
            return Err(Error::validation("diagnostics.guard_factor", "must be > 1"));
        }
        if self.output.diagnostics.is_empty() || self.output.final_snapshot.is_empty() {
            return Err(Error::validation("output", "file names must not be empty"));
        }
        let s = &self.sweep;
        if !(s.eps_start > 0.0) || s.eps_count == 0 || !(s.eps_ratio > 0.0 && s.eps_ratio < 1.0) {
            return Err(Error::validation(
                "sweep",
                "need eps_start > 0, eps_count ≥ 1 and 0 < eps_ratio < 1",
            ));
        }
        let m = &self.mms;
        if m.dts.is_empty() || m.dts.iter().any(|&h| !(h > 0.0)) || !(m.t_final > 0.0) {
            return Err(Error::validation("mms", "dts must be positive and t_final > 0"));
        }
        for tol in [
            ("skew", self.tolerances.skew),
            ("nonlinear_neutral", self.tolerances.nonlinear_neutral),
            ("identity_52", self.tolerances.identity_52),
            ("oracle_agreement", self.tolerances.oracle_agreement),
            ("l2_conservation", self.tolerances.l2_conservation),
            ("e1_conservation", self.tolerances.e1_conservation),
            ("l2_balance", self.tolerances.l2_balance),
            ("mean_law", self.tolerances.mean_law),
            ("poincare_slack", self.tolerances.poincare_slack),
        ] {
            if !(tol.1 >= 0.0) {
                return Err(Error::validation(format!("tolerances.{}", tol.0), "must be ≥ 0"));
            }
        }
        Ok(())
    }

    /// Serialises back to TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serialisable")
    }
}

/// Parses and validates a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    cfg.domain = cfg.domain.normalized();
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
