//! Flat dotted-key configuration (`rig.k20 = 2.5e7`), a TOML subset.
//!
//! Load order: file, then `MAGLOC_<SECTION>__<KEY>` environment overrides,
//! then command-line flags. The canonical text written back out is sorted by
//! key, one `section.key = value` per line, and is what the config hash covers.

use std::f64::consts::FRAC_PI_3;

use magloc_core::dsp::FilterSpec;
use magloc_core::eval::{EvalOptions, GridSpec, SourceSetup};
use magloc_core::geometry::{Rotation3, Vec2, Vec3};
use magloc_core::rig::RigConfig;
use magloc_core::solver::{SolverState, DEFAULT_INITIAL_MAX_ITERATIONS, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use magloc_core::synth::{NoiseModel, Preset};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const ENV_PREFIX: &str = "MAGLOC_";
/// Prefix marking configuration lines embedded in output files.
pub const EMBED_PREFIX: &str = "# cfg: ";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub seed: u64,
    pub rig: RigSection,
    pub source: SourceSection,
    pub noise: NoiseSection,
    pub filter: FilterSection,
    pub grid: GridSection,
    pub eval: EvalSection,
    pub solver: SolverSection,
    pub sim: SimSection,
    pub paths: PathsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RigSection {
    pub baseline_d: f64,
    pub f20: f64,
    pub f30: f64,
    pub sample_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k20: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k30: Option<f64>,
    pub min_valid_distance: f64,
    pub buffer_len: usize,
    pub noise_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSection {
    pub m_eff20: f64,
    pub m_eff30: f64,
    pub phase20: f64,
    pub phase30: f64,
    pub random_orientation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub gaussian_sigma: f64,
    pub quantization_step: f64,
    pub dc_bias: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    pub low: f64,
    pub high: f64,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub origin_x: f64,
    pub origin_y: f64,
    pub width: f64,
    pub height: f64,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub trials_per_point: usize,
    pub window_stride: usize,
    pub settle_windows: usize,
    pub calibration_seconds: f64,
    /// Row label in the report summary.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub deadzone_radius: f64,
    pub max_iterations: usize,
    pub initial_max_iterations: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    /// Seconds, used when `simulate` gets no `--duration`.
    pub duration: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl Default for RigSection {
    fn default() -> Self {
        let r = RigConfig::default();
        Self {
            baseline_d: r.baseline_d,
            f20: r.f20,
            f30: r.f30,
            sample_rate: r.sample_rate,
            k20: r.k20,
            k30: r.k30,
            min_valid_distance: r.min_valid_distance,
            buffer_len: r.buffer_len,
            noise_floor: r.noise_floor,
        }
    }
}

impl Default for SourceSection {
    fn default() -> Self {
        Self {
            m_eff20: 3000.0,
            m_eff30: 3000.0,
            phase20: 0.0,
            phase30: FRAC_PI_3,
            random_orientation: false,
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self::from_model(&NoiseModel::default())
    }
}

impl NoiseSection {
    fn from_model(m: &NoiseModel) -> Self {
        Self {
            gaussian_sigma: m.gaussian_sigma,
            quantization_step: m.quantization_step,
            dc_bias: m.dc_bias.to_array(),
        }
    }
}

impl Default for FilterSection {
    fn default() -> Self {
        Self {
            low: FilterSpec::DEFAULT_PASSBAND.0,
            high: FilterSpec::DEFAULT_PASSBAND.1,
            order: FilterSpec::DEFAULT_ORDER,
        }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridSpec::default_for(&RigConfig::default());
        Self {
            origin_x: g.origin.x,
            origin_y: g.origin.y,
            width: g.width,
            height: g.height,
            rows: g.rows,
            cols: g.cols,
        }
    }
}

impl Default for EvalSection {
    fn default() -> Self {
        let o = EvalOptions::default();
        Self {
            trials_per_point: o.trials_per_point,
            window_stride: o.window_stride,
            settle_windows: o.settle_windows,
            calibration_seconds: o.calibration_seconds,
            label: "default".into(),
        }
    }
}

impl Default for SimSection {
    fn default() -> Self {
        Self { duration: 10.0 }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            deadzone_radius: 0.0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            initial_max_iterations: DEFAULT_INITIAL_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Pulls `# cfg: ` lines out of an output file; other text is returned as is.
pub fn extract_embedded(text: &str) -> String {
    let embedded: Vec<&str> = text.lines().filter_map(|l| l.strip_prefix(EMBED_PREFIX)).collect();
    if embedded.is_empty() {
        text.to_string()
    } else {
        embedded.join("\n") + "\n"
    }
}

/// Sets `section.key` (or a top-level key) from an override string. The value
/// is read as a TOML literal, falling back to a bare string.
pub fn set_override(table: &mut toml::Table, dotted: &str, raw: &str) -> Result<(), CliError> {
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts = dotted.split('.');
    let head = parts.next().unwrap_or_default();
    match (parts.next(), parts.next()) {
        (None, _) => {
            table.insert(head.to_string(), value);
        }
        (Some(key), None) => {
            let section = table
                .entry(head.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            let toml::Value::Table(section) = section else {
                return Err(CliError::Config(format!("`{head}` is not a section")));
            };
            section.insert(key.to_string(), value);
        }
        _ => {
            return Err(CliError::Config(format!(
                "override key `{dotted}` is nested too deeply"
            )))
        }
    }
    Ok(())
}

/// `MAGLOC_RIG__K20` → `rig.k20`; `MAGLOC_SEED` → `seed`.
pub fn env_key(var: &str) -> Option<String> {
    let rest = var.strip_prefix(ENV_PREFIX)?;
    if rest.is_empty() {
        return None;
    }
    Some(rest.to_ascii_lowercase().replace("__", "."))
}

impl AppConfig {
    /// Parses config text (plain or embedded in an output file), applying
    /// `overrides` as `(VAR, value)` environment pairs.
    pub fn parse<I>(text: &str, overrides: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let text = extract_embedded(text);
        let mut table: toml::Table = toml::from_str(&text).map_err(|e| CliError::Config(e.message().to_string()))?;
        let mut vars: Vec<(String, String)> = overrides
            .into_iter()
            .filter_map(|(k, v)| env_key(&k).map(|k| (k, v)))
            .collect();
        vars.sort();
        for (k, v) in vars {
            set_override(&mut table, &k, &v)?;
        }
        let cfg: AppConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical form: sorted `key = value` lines.
    pub fn to_flat_text(&self) -> String {
        let value = toml::Value::try_from(self).expect("config serializes");
        let mut lines = Vec::new();
        flatten("", &value, &mut lines);
        lines.sort();
        lines.join("\n") + "\n"
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_flat_text().as_bytes()))
    }

    /// Header lines for output files, without the leading `# `.
    pub fn provenance(&self) -> Vec<String> {
        vec![format!("config_hash={}", self.hash()), format!("seed={}", self.seed)]
    }

    pub fn embedded_lines(&self) -> Vec<String> {
        self.to_flat_text()
            .lines()
            .map(|l| format!("{EMBED_PREFIX}{l}"))
            .collect()
    }

    pub fn apply_preset(&mut self, p: Preset) {
        self.noise = NoiseSection::from_model(&p.noise_model(self.seed));
        self.eval.label = p.name().to_string();
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.rig_config().validate()?;
        self.noise_model().validate()?;
        self.filter_spec()?;
        if !(self.sim.duration > 0.0 && self.sim.duration.is_finite()) {
            return Err(CliError::Config("sim.duration must be > 0".into()));
        }
        let s = &self.solver;
        if !(s.deadzone_radius >= 0.0 && s.tolerance > 0.0 && s.max_iterations > 0 && s.initial_max_iterations > 0) {
            return Err(CliError::Config(
                "solver: deadzone_radius >= 0, tolerance > 0 and iteration caps > 0 required".into(),
            ));
        }
        if !(self.eval.calibration_seconds > 0.0) {
            return Err(CliError::Config("eval.calibration_seconds must be > 0".into()));
        }
        let src = &self.source;
        if !(src.m_eff20 > 0.0 && src.m_eff30 > 0.0 && src.phase20.is_finite() && src.phase30.is_finite()) {
            return Err(CliError::Config("source: moments must be > 0 and phases finite".into()));
        }
        Ok(())
    }

    pub fn rig_config(&self) -> RigConfig {
        let r = &self.rig;
        RigConfig {
            baseline_d: r.baseline_d,
            f20: r.f20,
            f30: r.f30,
            sample_rate: r.sample_rate,
            k20: r.k20,
            k30: r.k30,
            min_valid_distance: r.min_valid_distance,
            buffer_len: r.buffer_len,
            noise_floor: r.noise_floor,
        }
    }

    pub fn filter_spec(&self) -> Result<FilterSpec, CliError> {
        let f = &self.filter;
        Ok(FilterSpec::design(f.low, f.high, f.order, &self.rig_config())?)
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel {
            gaussian_sigma: self.noise.gaussian_sigma,
            quantization_step: self.noise.quantization_step,
            dc_bias: Vec3::from_array(self.noise.dc_bias),
            rng_seed: self.seed,
        }
    }

    pub fn source_setup(&self) -> SourceSetup {
        let s = &self.source;
        SourceSetup {
            m_eff20: s.m_eff20,
            m_eff30: s.m_eff30,
            phase20: s.phase20,
            phase30: s.phase30,
            rotation: Rotation3::IDENTITY,
            random_orientation: s.random_orientation,
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        let g = &self.grid;
        GridSpec {
            origin: Vec2::new(g.origin_x, g.origin_y),
            width: g.width,
            height: g.height,
            rows: g.rows,
            cols: g.cols,
        }
    }

    pub fn eval_options(&self) -> EvalOptions {
        let e = &self.eval;
        EvalOptions {
            trials_per_point: e.trials_per_point,
            window_stride: e.window_stride,
            settle_windows: e.settle_windows,
            calibration_seconds: e.calibration_seconds,
        }
    }

    pub fn solver_state(&self) -> SolverState {
        let mut s = SolverState::with_deadzone(self.solver.deadzone_radius);
        s.max_iterations = self.solver.max_iterations;
        s.initial_max_iterations = self.solver.initial_max_iterations;
        s.tolerance = self.solver.tolerance;
        s
    }
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut Vec<String>) {
    match v {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push(format!("{prefix} = {other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> Vec<(String, String)> {
        Vec::new()
    }

    #[test]
    fn defaults_round_trip_through_flat_text() {
        let c = AppConfig::default();
        let text = c.to_flat_text();
        assert!(text.lines().all(|l| l.contains(" = ")));
        assert!(text.contains("rig.buffer_len = 50\n"));
        assert!(!text.contains("k20"));
        assert_eq!(AppConfig::parse(&text, none()).unwrap(), c);
    }

    #[test]
    fn floats_survive_exactly() {
        let mut c = AppConfig::default();
        c.rig.k20 = Some(1.0 / 3.0 * 2.5e7);
        c.source.phase30 = 0.1 + 0.2;
        let back = AppConfig::parse(&c.to_flat_text(), none()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let e = AppConfig::parse("rig.k21 = 3.0\n", none()).unwrap_err();
        assert!(e.to_string().contains("k21"), "{e}");
        assert!(AppConfig::parse("bogus.x = 1\n", none()).is_err());
    }

    #[test]
    fn sectioned_toml_is_accepted_too() {
        let c = AppConfig::parse("[rig]\nk20 = 4.0\n", none()).unwrap();
        assert_eq!(c.rig.k20, Some(4.0));
    }

    #[test]
    fn env_overrides_apply_after_file() {
        let env = vec![
            ("MAGLOC_RIG__K20".to_string(), "9e6".to_string()),
            ("MAGLOC_SEED".to_string(), "77".to_string()),
            ("MAGLOC_EVAL__LABEL".to_string(), "oak".to_string()),
            ("PATH".to_string(), "/bin".to_string()),
        ];
        let c = AppConfig::parse("rig.k20 = 1.0\nseed = 3\n", env).unwrap();
        assert_eq!(c.rig.k20, Some(9e6));
        assert_eq!(c.seed, 77);
        assert_eq!(c.eval.label, "oak");
    }

    #[test]
    fn invalid_values_fail_validation() {
        assert!(AppConfig::parse("rig.buffer_len = 48\n", none()).is_err());
        assert!(AppConfig::parse("noise.gaussian_sigma = -1.0\n", none()).is_err());
        assert!(AppConfig::parse("filter.low = 40.0\n", none()).is_err());
        assert!(AppConfig::parse("sim.duration = 0.0\n", none()).is_err());
    }

    #[test]
    fn embedded_config_is_recovered() {
        let c = AppConfig {
            seed: 12,
            ..AppConfig::default()
        };
        let mut file = String::from("# config_hash=abc\n");
        for l in c.embedded_lines() {
            file.push_str(&l);
            file.push('\n');
        }
        file.push_str("row,col\n0,0\n");
        assert_eq!(AppConfig::parse(&file, none()).unwrap(), c);
    }

    #[test]
    fn hash_tracks_content() {
        let a = AppConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn env_key_mapping() {
        assert_eq!(env_key("MAGLOC_RIG__K20").as_deref(), Some("rig.k20"));
        assert_eq!(env_key("MAGLOC_SEED").as_deref(), Some("seed"));
        assert_eq!(env_key("MAGLOC_"), None);
        assert_eq!(env_key("HOME"), None);
    }
}
