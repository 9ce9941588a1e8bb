//! Experiment configuration, presets, orchestration and CSV output.
//!
//! Configs are flat `key=value` text files (one pair per line, `#` comments)
//! so they stay diff-friendly and trivially parseable. The CSV schema is
//! fixed:
//!
//! ```text
//! snr_db,ber_bound_raw,ber_bound_clipped,ber_sim,frames,bit_errors,below_resolution_flag
//! ```
//!
//! with absent quantities emitted as empty fields. A run covering several
//! constellations (the multi-rate presets) writes one file per
//! constellation, suffixed `_r<R>` by spectral efficiency.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{abep_bound, BoundConfig, PrefactorMode};
use crate::channel::{exponential_correlation, ChannelSpec};
use crate::constellation::{build_constellation, Constellation, SmDimensions};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_point, validate_grid, CurvePoint, SimPoint, StoppingRule};

/// Worker-count override; `0` or unset means one worker per core.
pub const THREADS_ENV_VAR: &str = "SMPERF_THREADS";

/// Spatial correlation model selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationModel {
    None,
    Exponential { gamma_t: f64, gamma_r: f64 },
}

/// Inclusive SNR grid in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl SnrGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.step_db <= 0.0 {
            return vec![self.start_db];
        }
        let count = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }
}

impl FromStr for SnrGrid {
    type Err = Error;
    /// Parse `START:STOP:STEP` (dB).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid("snr", format!("`{s}` is not START:STOP:STEP")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid("snr", format!("`{p}` is not a number")))
            })
            .collect::<Result<_>>()?;
        let grid = SnrGrid { start_db: nums[0], stop_db: nums[1], step_db: nums[2] };
        if grid.stop_db < grid.start_db {
            return Err(Error::invalid("snr", "STOP must be >= START"));
        }
        if grid.stop_db > grid.start_db && grid.step_db <= 0.0 {
            return Err(Error::invalid("snr", "STEP must be positive for a multi-point grid"));
        }
        Ok(grid)
    }
}

impl std::fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start_db, self.stop_db, self.step_db)
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_t: usize,
    pub n_r: usize,
    /// Constellation names; `ssk` selects the single-symbol alphabet.
    /// Multi-rate presets carry several entries.
    pub constellations: Vec<String>,
    /// Rician factor, linear scale.
    pub k_factor: f64,
    pub correlation: CorrelationModel,
    pub snr: SnrGrid,
    pub quad_nodes: usize,
    pub stopping: StoppingRule,
    pub seed: u64,
    pub prefactor: PrefactorMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_t: 4,
            n_r: 4,
            constellations: vec![],
            k_factor: 0.0,
            correlation: CorrelationModel::None,
            snr: SnrGrid { start_db: 0.0, stop_db: 20.0, step_db: 2.0 },
            quad_nodes: 64,
            stopping: StoppingRule { min_bit_errors: 200, max_frames: 10_000_000 },
            seed: 1,
            prefactor: PrefactorMode::Paper,
        }
    }
}

/// What a run should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Bound,
    Sim,
    Both,
}

impl FromStr for RunMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bound" => Ok(RunMode::Bound),
            "sim" => Ok(RunMode::Sim),
            "both" => Ok(RunMode::Both),
            other => {
                Err(Error::invalid("mode", format!("`{other}` is not one of: bound, sim, both")))
            }
        }
    }
}

impl ExperimentConfig {
    /// Parse a `key=value` config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_contents(&text)
    }

    /// Parse config text. Unknown keys and malformed values are rejected
    /// with the offending line number.
    pub fn from_str_contents(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut k_linear: Option<f64> = None;
        let mut k_db: Option<f64> = None;
        let mut gamma_t: Option<f64> = None;
        let mut gamma_r: Option<f64> = None;
        let mut correlation: Option<String> = None;

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(Some(line_no), format!("`{line}` is not key=value")))?;
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| Error::config(Some(line_no), msg);
            match key {
                "n_t" => cfg.n_t = parse_num(key, value, line_no)?,
                "n_r" => cfg.n_r = parse_num(key, value, line_no)?,
                "constellation" => {
                    cfg.constellations =
                        value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                    if cfg.constellations.is_empty() {
                        return Err(bad("constellation list is empty".into()));
                    }
                }
                "k" => k_linear = Some(parse_num(key, value, line_no)?),
                "k_db" => k_db = Some(parse_num(key, value, line_no)?),
                "correlation" => correlation = Some(value.to_string()),
                "gamma_t" => gamma_t = Some(parse_num(key, value, line_no)?),
                "gamma_r" => gamma_r = Some(parse_num(key, value, line_no)?),
                "snr" => cfg.snr = value.parse().map_err(|e| bad(format!("{e}")))?,
                "quad_nodes" => cfg.quad_nodes = parse_num(key, value, line_no)?,
                "min_bit_errors" => cfg.stopping.min_bit_errors = parse_num(key, value, line_no)?,
                "max_frames" => cfg.stopping.max_frames = parse_num(key, value, line_no)?,
                "seed" => cfg.seed = parse_num(key, value, line_no)?,
                "prefactor" => cfg.prefactor = value.parse().map_err(|e| bad(format!("{e}")))?,
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }

        cfg.k_factor = match (k_linear, k_db) {
            (Some(_), Some(_)) => {
                return Err(Error::config(None, "give either `k` (linear) or `k_db`, not both"));
            }
            (Some(k), None) => k,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => 0.0,
        };

        cfg.correlation = match correlation.as_deref() {
            None | Some("none") => CorrelationModel::None,
            Some("exponential") => {
                let gamma_t = gamma_t.ok_or_else(|| {
                    Error::config(None, "exponential correlation needs `gamma_t`")
                })?;
                let gamma_r = gamma_r.ok_or_else(|| {
                    Error::config(None, "exponential correlation needs `gamma_r`")
                })?;
                CorrelationModel::Exponential { gamma_t, gamma_r }
            }
            Some(other) => {
                return Err(Error::config(
                    None,
                    format!("unknown correlation model `{other}` (none, exponential)"),
                ));
            }
        };
        if matches!(cfg.correlation, CorrelationModel::None) && (gamma_t.is_some() || gamma_r.is_some())
        {
            return Err(Error::config(None, "gamma_t/gamma_r given without correlation=exponential"));
        }
        Ok(cfg)
    }

    /// Serialize back to the config file format. Parsing the output yields a
    /// semantically identical config (the Rician factor is always emitted in
    /// linear scale).
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n_t={}", self.n_t);
        let _ = writeln!(s, "n_r={}", self.n_r);
        let _ = writeln!(s, "constellation={}", self.constellations.join(","));
        let _ = writeln!(s, "k={}", self.k_factor);
        match self.correlation {
            CorrelationModel::None => {
                let _ = writeln!(s, "correlation=none");
            }
            CorrelationModel::Exponential { gamma_t, gamma_r } => {
                let _ = writeln!(s, "correlation=exponential");
                let _ = writeln!(s, "gamma_t={gamma_t}");
                let _ = writeln!(s, "gamma_r={gamma_r}");
            }
        }
        let _ = writeln!(s, "snr={}", self.snr);
        let _ = writeln!(s, "quad_nodes={}", self.quad_nodes);
        let _ = writeln!(s, "min_bit_errors={}", self.stopping.min_bit_errors);
        let _ = writeln!(s, "max_frames={}", self.stopping.max_frames);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "prefactor={}", self.prefactor.as_str());
        s
    }

    /// Validate every module precondition and build the channel spec.
    pub fn build_channel(&self) -> Result<ChannelSpec> {
        if self.constellations.is_empty() {
            return Err(Error::config(None, "missing field: constellation"));
        }
        let (sigma_t, sigma_r) = match self.correlation {
            CorrelationModel::None => (
                crate::numerics::HermitianPsdMatrix::identity(self.n_t),
                crate::numerics::HermitianPsdMatrix::identity(self.n_r),
            ),
            CorrelationModel::Exponential { gamma_t, gamma_r } => (
                exponential_correlation(self.n_t, gamma_t)?,
                exponential_correlation(self.n_r, gamma_r)?,
            ),
        };
        let spec = ChannelSpec::new(self.n_t, self.n_r, self.k_factor, sigma_t, sigma_r)?;
        validate_grid(&self.snr.points())?;
        self.stopping.validate()?;
        if self.quad_nodes < 8 {
            return Err(Error::invalid("quad_nodes", format!("{} is below the minimum of 8", self.quad_nodes)));
        }
        for name in &self.constellations {
            self.constellation(name)?;
        }
        Ok(spec)
    }

    /// Resolve a constellation name, `ssk` included.
    pub fn constellation(&self, name: &str) -> Result<Constellation> {
        if name == "ssk" {
            Ok(Constellation::ssk())
        } else {
            build_constellation(name)
        }
    }

    pub fn bound_config(&self) -> BoundConfig {
        BoundConfig { quad_nodes: self.quad_nodes, prefactor: self.prefactor }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::config(Some(line), format!("`{value}` is not a valid value for `{key}`")))
}

/// The experiment configurations behind the reference result set.
///
/// * `fig1`: uncorrelated Rician, K = 5, rates 3 to 7 bits.
/// * `fig2`: same rates under exponential correlation 0.8 on both sides.
/// * `fig3`: space-shift keying under the same correlated Rician channel
///   (the correlation coefficients default to 0.8/0.8).
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let sm_rates = ["bpsk", "qpsk", "qam8", "qam16", "qam32"];
    let base = ExperimentConfig { k_factor: 5.0, ..Default::default() };
    match name {
        "fig1" => Ok(ExperimentConfig {
            constellations: sm_rates.iter().map(|s| s.to_string()).collect(),
            ..base
        }),
        "fig2" => Ok(ExperimentConfig {
            constellations: sm_rates.iter().map(|s| s.to_string()).collect(),
            correlation: CorrelationModel::Exponential { gamma_t: 0.8, gamma_r: 0.8 },
            ..base
        }),
        "fig3" => Ok(ExperimentConfig {
            constellations: vec!["ssk".to_string()],
            correlation: CorrelationModel::Exponential { gamma_t: 0.8, gamma_r: 0.8 },
            ..base
        }),
        other => Err(Error::invalid(
            "preset",
            format!("unknown preset `{other}` (valid: fig1, fig2, fig3)"),
        )),
    }
}

/// One computed curve plus the labels needed to report it.
#[derive(Debug, Clone)]
pub struct CurveResult {
    pub constellation: String,
    pub spectral_efficiency: u32,
    pub points: Vec<CurvePoint>,
    pub out_path: PathBuf,
}

/// Render one curve in the fixed CSV schema.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from(
        "snr_db,ber_bound_raw,ber_bound_clipped,ber_sim,frames,bit_errors,below_resolution_flag\n",
    );
    for p in points {
        let (braw, bclip) = match p.bound {
            Some(b) => (b.raw.to_string(), b.clipped.to_string()),
            None => (String::new(), String::new()),
        };
        let (ber, frames, errs, flag) = match p.sim {
            Some(sim) => (
                sim.ber.to_string(),
                sim.frames.to_string(),
                sim.bit_errors.to_string(),
                if sim.below_resolution { "1" } else { "0" }.to_string(),
            ),
            None => (String::new(), String::new(), String::new(), String::new()),
        };
        let _ = writeln!(s, "{},{braw},{bclip},{ber},{frames},{errs},{flag}", p.snr_db);
    }
    s
}

fn output_path(base: &Path, multi: bool, r_bits: u32) -> PathBuf {
    if !multi {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let suffixed = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_r{r_bits}.{ext}"),
        None => format!("{stem}_r{r_bits}"),
    };
    base.with_file_name(suffixed)
}

/// Compute every curve of a config. Pure function of its arguments; no I/O.
pub fn compute_curves(
    config: &ExperimentConfig,
    mode: RunMode,
    out_path: &Path,
) -> Result<Vec<CurveResult>> {
    let spec = config.build_channel()?;
    let bound_cfg = config.bound_config();
    let grid = config.snr.points();
    let multi = config.constellations.len() > 1;

    let mut curves = Vec::new();
    for name in &config.constellations {
        let cons = config.constellation(name)?;
        let dims = SmDimensions::new(config.n_t, &cons)?;
        let points: Result<Vec<CurvePoint>> = grid
            .par_iter()
            .map(|&snr_db| {
                let bound = match mode {
                    RunMode::Sim => None,
                    _ => {
                        let rho = 10f64.powf(snr_db / 10.0);
                        Some(abep_bound(&spec, &cons, rho, &bound_cfg)?)
                    }
                };
                let sim = match mode {
                    RunMode::Bound => None,
                    _ => Some(simulate_point(&spec, &cons, snr_db, &config.stopping, config.seed)?),
                };
                Ok(CurvePoint { snr_db, bound, sim })
            })
            .collect();
        curves.push(CurveResult {
            constellation: name.clone(),
            spectral_efficiency: dims.spectral_efficiency(),
            points: points?,
            out_path: output_path(out_path, multi, dims.spectral_efficiency()),
        });
    }
    Ok(curves)
}

fn summary_line(p: &CurvePoint) -> String {
    let bound = match p.bound {
        Some(b) => format!("bound {:>12.6e}", b.clipped),
        None => "bound            -".to_string(),
    };
    let sim = match p.sim {
        Some(SimPoint { below_resolution: true, .. }) => {
            "sim  below-resolution".to_string()
        }
        Some(sim) => format!("sim {:>12.6e} ({} errs / {} frames)", sim.ber, sim.bit_errors, sim.frames),
        None => "sim             -".to_string(),
    };
    format!("  snr {:>5.1} dB  {bound}  {sim}", p.snr_db)
}

/// Execute a config end to end: compute curves, write CSV files, print a
/// summary table. Worker count comes from `SMPERF_THREADS` (0 = auto).
pub fn run(config: &ExperimentConfig, mode: RunMode, out_path: &Path) -> Result<()> {
    let threads = std::env::var(THREADS_ENV_VAR)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    run_with_threads(config, mode, out_path, threads)
}

/// Like [`run`] with an explicit worker count (`0` = one per core).
pub fn run_with_threads(
    config: &ExperimentConfig,
    mode: RunMode,
    out_path: &Path,
    threads: usize,
) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    let curves = pool.install(|| compute_curves(config, mode, out_path))?;
    for curve in &curves {
        std::fs::write(&curve.out_path, curve_to_csv(&curve.points))?;
        println!(
            "{} (R = {} bits) -> {}",
            curve.constellation,
            curve.spectral_efficiency,
            curve.out_path.display()
        );
        for p in &curve.points {
            println!("{}", summary_line(p));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::AbepBound;

    #[test]
    fn parses_a_full_config() {
        let text = "\
# example
n_t=4
n_r=4
constellation=qam16
k=5
correlation=exponential
gamma_t=0.8
gamma_r=0.5
snr=0:20:2
quad_nodes=96
min_bit_errors=400
max_frames=1000000
seed=42
prefactor=conventional
";
        let cfg = ExperimentConfig::from_str_contents(text).unwrap();
        assert_eq!(cfg.n_t, 4);
        assert_eq!(cfg.constellations, vec!["qam16"]);
        assert_eq!(cfg.k_factor, 5.0);
        assert_eq!(
            cfg.correlation,
            CorrelationModel::Exponential { gamma_t: 0.8, gamma_r: 0.5 }
        );
        assert_eq!(cfg.snr.points().len(), 11);
        assert_eq!(cfg.quad_nodes, 96);
        assert_eq!(cfg.stopping.min_bit_errors, 400);
        assert_eq!(cfg.prefactor, PrefactorMode::Conventional);
        cfg.build_channel().unwrap();
    }

    #[test]
    fn k_db_is_converted() {
        let cfg = ExperimentConfig::from_str_contents("constellation=bpsk\nk_db=10\n").unwrap();
        assert!((cfg.k_factor - 10.0).abs() < 1e-12);
        let err = ExperimentConfig::from_str_contents("constellation=bpsk\nk=1\nk_db=10\n");
        assert!(err.is_err());
    }

    #[test]
    fn errors_name_the_field_and_line() {
        let err = ExperimentConfig::from_str_contents("n_t=four\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1") && msg.contains("n_t"), "{msg}");

        let err = ExperimentConfig::from_str_contents("bogus_key=1\n").unwrap_err();
        assert!(err.to_string().contains("bogus_key"));

        // Complex-valued correlation coefficients are rejected at parse time.
        let err =
            ExperimentConfig::from_str_contents("constellation=bpsk\ncorrelation=exponential\ngamma_t=0.5+0.1i\ngamma_r=0.5\n")
                .unwrap_err();
        assert!(err.to_string().contains("gamma_t"), "{err}");

        // Missing constellation surfaces at validation.
        let cfg = ExperimentConfig::from_str_contents("n_t=2\nn_r=2\n").unwrap();
        let err = cfg.build_channel().unwrap_err();
        assert!(err.to_string().contains("constellation"), "{err}");
    }

    #[test]
    fn config_round_trip_is_semantically_identical() {
        let text = "\
n_t=4
n_r=2
constellation=bpsk,qam8
k_db=7
correlation=exponential
gamma_t=0.9
gamma_r=0.1
snr=2:10:2
seed=7
";
        let cfg = ExperimentConfig::from_str_contents(text).unwrap();
        let back = ExperimentConfig::from_str_contents(&cfg.to_config_string()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn presets_match_reference_parameters() {
        let f1 = preset("fig1").unwrap();
        assert_eq!(f1.n_t, 4);
        assert_eq!(f1.n_r, 4);
        assert_eq!(f1.k_factor, 5.0);
        assert_eq!(f1.correlation, CorrelationModel::None);
        assert_eq!(f1.constellations.len(), 5);

        let f2 = preset("fig2").unwrap();
        assert_eq!(
            f2.correlation,
            CorrelationModel::Exponential { gamma_t: 0.8, gamma_r: 0.8 }
        );

        let f3 = preset("fig3").unwrap();
        assert_eq!(f3.constellations, vec!["ssk"]);
        assert_eq!(
            f3.correlation,
            CorrelationModel::Exponential { gamma_t: 0.8, gamma_r: 0.8 }
        );

        let err = preset("fig9").unwrap_err().to_string();
        assert!(err.contains("fig1") && err.contains("fig3"), "{err}");
    }

    #[test]
    fn snr_grid_points() {
        let g: SnrGrid = "0:20:2".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[10], 20.0);

        let single: SnrGrid = "6:6:2".parse().unwrap();
        assert_eq!(single.points(), vec![6.0]);

        assert!("0:20".parse::<SnrGrid>().is_err());
        assert!("5:1:2".parse::<SnrGrid>().is_err());
    }

    #[test]
    fn csv_schema_and_empty_fields() {
        let points = vec![
            CurvePoint {
                snr_db: 0.0,
                bound: Some(AbepBound { raw: 0.75, clipped: 0.5 }),
                sim: None,
            },
            CurvePoint {
                snr_db: 2.0,
                bound: None,
                sim: Some(SimPoint {
                    snr_db: 2.0,
                    frames: 1000,
                    bit_errors: 321,
                    ber: 0.107,
                    below_resolution: false,
                    frame_error_sq_sum: 777,
                }),
            },
        ];
        let csv = curve_to_csv(&points);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "snr_db,ber_bound_raw,ber_bound_clipped,ber_sim,frames,bit_errors,below_resolution_flag"
        );
        assert_eq!(lines.next().unwrap(), "0,0.75,0.5,,,,");
        assert_eq!(lines.next().unwrap(), "2,,,0.107,1000,321,0");
    }

    #[test]
    fn multi_constellation_paths_are_suffixed() {
        let p = output_path(Path::new("/tmp/out.csv"), true, 5);
        assert_eq!(p, Path::new("/tmp/out_r5.csv"));
        let p = output_path(Path::new("/tmp/out.csv"), false, 5);
        assert_eq!(p, Path::new("/tmp/out.csv"));
    }
}
