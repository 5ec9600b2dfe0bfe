//! Scenario configs, parameter sweeps and CSV tables.
//!
//! A config is a JSON object in human units (dBm, meters). A config file holds
//! either one object or an array of them; each array entry becomes one series
//! of the output table. The bundled presets `fig3` … `fig6` encode the
//! evaluation setups of the four throughput figures.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::{outage_cf, throughput_from_outage};
use crate::channel::Topology;
use crate::error::{Error, Result};
use crate::exec::Backend;
use crate::montecarlo::{OutageEstimate, Simulator, DEFAULT_SAMPLES, MIN_SAMPLES};
use crate::optimizer::{optimal_tau_with, tau_grid, DEFAULT_RESOLUTION};
use crate::protocol::{ProtocolKind, RelayMode, Severities, SystemParams};

fn default_n0_dbm() -> f64 {
    -80.0
}
fn default_eta() -> f64 {
    0.5
}
fn default_d_as() -> f64 {
    10.0
}
fn default_alpha() -> f64 {
    2.0
}
fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}
fn default_samples() -> u64 {
    DEFAULT_SAMPLES
}
fn default_seed() -> u64 {
    1
}
fn default_mode() -> RelayMode {
    RelayMode::Exact
}
fn default_protocols() -> Vec<ProtocolKind> {
    ProtocolKind::ALL.to_vec()
}

/// Either one severity for every link or one per link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fading {
    Uniform(u32),
    PerLink(Severities),
}

impl Fading {
    pub fn severities(self) -> Severities {
        match self {
            Fading::Uniform(m) => Severities::uniform(m),
            Fading::PerLink(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    PADbm,
    Tau,
    DAr,
    Rate,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::PADbm => "p_a_dbm",
            SweepParam::Tau => "tau",
            SweepParam::DAr => "d_ar",
            SweepParam::Rate => "rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    /// `start, start + step, …` up to `stop` inclusive, generated by index.
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::config("sweep.step", format!("must be > 0, got {}", self.step)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::config("sweep.start", "sweep bounds must be finite"));
        }
        if self.stop < self.start {
            return Err(Error::config(
                "sweep.stop",
                format!("stop {} is below start {}", self.stop, self.start),
            ));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(Error::config("sweep.step", "sweep has more than 10^6 points"));
        }
        Ok((0..count).map(|k| self.start + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSettings {
    #[serde(default = "default_samples")]
    pub n: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: RelayMode,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            n: DEFAULT_SAMPLES,
            seed: 1,
            mode: RelayMode::Exact,
        }
    }
}

/// One scenario in human units plus what to compute for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub p_a_dbm: f64,
    #[serde(default = "default_n0_dbm")]
    pub n0_dbm: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    pub tau: f64,
    pub rate: f64,
    #[serde(default = "default_d_as")]
    pub d_as: f64,
    pub d_ar: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub m: Fading,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_protocols")]
    pub protocols: Vec<ProtocolKind>,
    /// Replace `tau` by its per-protocol optimum at every point.
    #[serde(default)]
    pub optimize_tau: bool,
    #[serde(default = "default_resolution")]
    pub tau_resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Many(Vec<ScenarioConfig>),
    One(Box<ScenarioConfig>),
}

impl ScenarioConfig {
    /// Parses one object or an array of objects.
    pub fn parse_many(text: &str) -> Result<Vec<ScenarioConfig>> {
        // Untagged enums swallow the useful message, so retry each shape directly.
        match serde_json::from_str::<ConfigFile>(text) {
            Ok(ConfigFile::Many(v)) => Ok(v),
            Ok(ConfigFile::One(c)) => Ok(vec![*c]),
            Err(_) => {
                let value: serde_json::Value = serde_json::from_str(text)
                    .map_err(|e| Error::config("<file>", e.to_string()))?;
                let err = if value.is_array() {
                    serde_json::from_value::<Vec<ScenarioConfig>>(value).err()
                } else {
                    serde_json::from_value::<ScenarioConfig>(value).err()
                };
                Err(Error::config(
                    "<file>",
                    err.map(|e| e.to_string()).unwrap_or_else(|| "malformed config".into()),
                ))
            }
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vec<ScenarioConfig>> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        let configs = Self::parse_many(&text)?;
        if configs.is_empty() {
            return Err(Error::config("<file>", "config file holds no scenarios"));
        }
        for c in &configs {
            c.validate()?;
        }
        Ok(configs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn without_mc(&self) -> Self {
        Self {
            mc: None,
            ..self.clone()
        }
    }

    /// Label used in the `series` column.
    pub fn series_label(&self) -> &str {
        if self.name.is_empty() {
            "default"
        } else {
            &self.name
        }
    }

    /// Scenario parameters with `param` overridden by `value`.
    pub fn params_at(&self, param: Option<SweepParam>, value: f64) -> Result<SystemParams> {
        let mut p_a = self.p_a_dbm;
        let mut tau = self.tau;
        let mut rate = self.rate;
        let mut d_ar = self.d_ar;
        let field = match param {
            Some(SweepParam::PADbm) => {
                p_a = value;
                "sweep"
            }
            Some(SweepParam::Tau) => {
                tau = value;
                "sweep"
            }
            Some(SweepParam::Rate) => {
                rate = value;
                "sweep"
            }
            Some(SweepParam::DAr) => {
                d_ar = value;
                "sweep"
            }
            None => "",
        };
        let named = |own: &str| if field.is_empty() { own.to_string() } else { format!("{field}.{own}") };
        let topo = Topology::new(self.d_as, d_ar, self.alpha).map_err(|e| {
            Error::config(
                if param == Some(SweepParam::DAr) { named("d_ar") } else { "d_ar".into() },
                e.to_string(),
            )
        })?;
        let which = |own: &str, swept: SweepParam| {
            if param == Some(swept) {
                named(own)
            } else {
                own.to_string()
            }
        };
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::config(which("tau", SweepParam::Tau), format!("must lie in (0, 1), got {tau}")));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::config(which("rate", SweepParam::Rate), format!("must be > 0, got {rate}")));
        }
        if !p_a.is_finite() {
            return Err(Error::config(which("p_a_dbm", SweepParam::PADbm), "must be finite"));
        }
        if !self.n0_dbm.is_finite() {
            return Err(Error::config("n0_dbm", "must be finite"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::config("eta", format!("must lie in (0, 1), got {}", self.eta)));
        }
        SystemParams::from_dbm(p_a, self.n0_dbm, self.eta, tau, rate, topo, self.m.severities())
            .map_err(|e| Error::config("m", e.to_string()))
    }

    /// Checks every field and every sweep point; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.protocols.is_empty() {
            return Err(Error::config("protocols", "at least one protocol is required"));
        }
        if self.optimize_tau {
            tau_grid(self.tau_resolution).map_err(|e| Error::config("tau_resolution", e.to_string()))?;
        }
        if let Some(mc) = &self.mc {
            if mc.n < MIN_SAMPLES {
                return Err(Error::config("mc.n", format!("must be >= {MIN_SAMPLES}, got {}", mc.n)));
            }
        }
        self.params_at(None, 0.0)?;
        if let Some(sweep) = &self.sweep {
            for v in sweep.values()? {
                self.params_at(Some(sweep.param), v)?;
            }
        }
        Ok(())
    }
}

/// Names of the bundled presets.
pub const PRESETS: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];

pub fn preset(name: &str) -> Result<Vec<ScenarioConfig>> {
    let text = match name {
        "fig3" => include_str!("../presets/fig3.json"),
        "fig4" => include_str!("../presets/fig4.json"),
        "fig5" => include_str!("../presets/fig5.json"),
        "fig6" => include_str!("../presets/fig6.json"),
        other => {
            return Err(Error::config(
                "figure",
                format!("unknown preset `{other}`, expected one of {}", PRESETS.join(", ")),
            ))
        }
    };
    ScenarioConfig::parse_many(text)
}

/// Monte Carlo cells of a row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCells {
    pub outage: f64,
    pub stderr: f64,
    pub throughput: f64,
    pub mode: RelayMode,
    pub n: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub protocol: ProtocolKind,
    pub analytic_outage: f64,
    pub analytic_throughput: f64,
    pub mc: Option<McCells>,
    /// `τ` used for this row (the optimum when `optimize_tau` is set).
    pub tau: f64,
    pub series: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: &str = "sweep_param,sweep_value,protocol,analytic_outage,analytic_throughput,\
mc_outage,mc_stderr,mc_throughput,mc_mode,n,seed,analytic_kind,tau,series";

const MISSING: &str = "NA";

impl SweepTable {
    pub fn extend(&mut self, other: SweepTable) {
        self.rows.extend(other.rows);
    }

    /// Rows of one series and protocol, in sweep order.
    pub fn series<'a>(&'a self, series: &'a str, kind: ProtocolKind) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.series == series && r.protocol == kind)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for r in &self.rows {
            let mc_cells = match &r.mc {
                Some(mc) => [
                    fmt_sig(mc.outage),
                    fmt_sig(mc.stderr),
                    fmt_sig(mc.throughput),
                    mc.mode.as_str().to_string(),
                    mc.n.to_string(),
                    mc.seed.to_string(),
                ],
                None => [MISSING, MISSING, MISSING, "none", MISSING, MISSING].map(String::from),
            };
            let kind = if r.protocol.closed_form_is_exact() { "exact" } else { "approx" };
            let record = [
                r.sweep_param.clone(),
                fmt_sig(r.sweep_value),
                r.protocol.to_string(),
                fmt_sig(r.analytic_outage),
                fmt_sig(r.analytic_throughput),
            ]
            .into_iter()
            .chain(mc_cells)
            .chain([kind.to_string(), fmt_sig(r.tau), r.series.clone()]);
            w.write_record(record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Twelve significant digits, positional for moderate magnitudes and
/// scientific otherwise, with trailing zeros dropped.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

struct PointResult {
    rows: Vec<SweepRow>,
}

fn evaluate_point(
    config: &ScenarioConfig,
    param: Option<SweepParam>,
    value: f64,
    backend: Backend,
) -> Result<PointResult> {
    let base = config.params_at(param, value)?;
    let sim = Simulator::new(backend);
    let mut per_protocol: Vec<(ProtocolKind, SystemParams)> = Vec::with_capacity(config.protocols.len());
    for &kind in &config.protocols {
        let params = if config.optimize_tau {
            let best = optimal_tau_with(backend, kind, &base, config.tau_resolution)?;
            base.with_tau(best.tau_star)?
        } else {
            base.clone()
        };
        per_protocol.push((kind, params));
    }

    let estimates: Option<Vec<OutageEstimate>> = match &config.mc {
        None => None,
        Some(mc) if !config.optimize_tau => {
            Some(sim.estimate_outages(&config.protocols, &base, mc.n, mc.seed, mc.mode)?)
        }
        Some(mc) => Some(
            per_protocol
                .iter()
                .map(|(kind, p)| sim.estimate_outage(*kind, p, mc.n, mc.seed, mc.mode))
                .collect::<Result<_>>()?,
        ),
    };

    let mut rows = Vec::with_capacity(per_protocol.len());
    for (i, (kind, params)) in per_protocol.iter().enumerate() {
        let outage = outage_cf(*kind, params)?;
        let mc = estimates.as_ref().map(|e| McCells {
            outage: e[i].p_hat,
            stderr: e[i].stderr,
            throughput: e[i].throughput(params),
            mode: e[i].mode,
            n: e[i].n,
            seed: e[i].seed,
        });
        rows.push(SweepRow {
            sweep_param: param.map_or("none", SweepParam::as_str).to_string(),
            sweep_value: value,
            protocol: *kind,
            analytic_outage: outage,
            analytic_throughput: throughput_from_outage(params, outage),
            mc,
            tau: params.tau(),
            series: config.series_label().to_string(),
        });
    }
    Ok(PointResult { rows })
}

/// Evaluates every sweep point of one scenario. Rows come out in sweep order,
/// then in the order of `config.protocols`.
pub fn run_sweep_with(config: &ScenarioConfig, backend: Backend) -> Result<SweepTable> {
    config.validate()?;
    let points: Vec<(Option<SweepParam>, f64)> = match &config.sweep {
        Some(s) => s.values()?.into_iter().map(|v| (Some(s.param), v)).collect(),
        None => vec![(None, f64::NAN)],
    };
    let results = backend.map_collect(&points, |&(param, value)| {
        evaluate_point(config, param, value, backend)
    });
    let mut table = SweepTable::default();
    for r in results {
        table.rows.extend(r?.rows);
    }
    Ok(table)
}

pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepTable> {
    run_sweep_with(config, Backend::default())
}

/// Runs every scenario of a file or preset and concatenates the tables.
pub fn run_all(configs: &[ScenarioConfig], backend: Backend) -> Result<SweepTable> {
    let mut table = SweepTable::default();
    for c in configs {
        table.extend(run_sweep_with(c, backend)?);
    }
    Ok(table)
}

pub fn run_figure(name: &str, backend: Backend) -> Result<SweepTable> {
    run_all(&preset(name)?, backend)
}
