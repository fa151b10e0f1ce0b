//! Command line front end: one subcommand per estimator plus the
//! experiment harness. All I/O is CSV; outputs are written atomically so
//! a failed run never leaves a partial file.
//!
//! Exit codes: 0 success, 2 input parse failure, 3 solver non-convergence,
//! 4 invalid configuration.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use svmdsp::bench::{run_experiment, write_report_csv, ExperimentConfig, ExperimentId};
use svmdsp::kernels::KernelSpec;
use svmdsp::psm::{self, ArxOrders, SpectralGrid};
use svmdsp::rsm::{self, CanonicalSignalSet};
use svmdsp::types::{ComplexSeries, EpsHuberParams, SampledSignal};
use svmdsp::{dsm, io, SvmError};

#[derive(Parser)]
#[command(
    name = "svmdsp",
    about = "Robust support-vector estimators for signal processing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Loss parameters shared by every estimator.
#[derive(Args, Debug, Clone, Copy)]
struct LossArgs {
    /// Insensitivity band epsilon (same units as the observations)
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Quadratic-zone scale delta (also the dual regularizer, dimensionless)
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    /// Multiplier box bound C (slope of the linear cost zone)
    #[arg(long, default_value_t = 100.0)]
    cost: f64,
}

impl LossArgs {
    fn build(&self) -> Result<EpsHuberParams, SvmError> {
        EpsHuberParams::new(self.eps, self.delta, self.cost)
    }
}

#[derive(Args, Debug, Clone)]
struct KernelArgs {
    /// Kernel kind: linear | polynomial | rbf
    #[arg(long, default_value = "rbf")]
    kernel: String,
    /// RBF width sigma (same units as the regressors)
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    /// Polynomial degree (positive integer)
    #[arg(long, default_value_t = 2)]
    degree: u32,
}

impl KernelArgs {
    fn build(&self) -> Result<KernelSpec, SvmError> {
        match self.kernel.as_str() {
            "linear" => Ok(KernelSpec::Linear),
            "polynomial" => KernelSpec::polynomial(self.degree),
            "rbf" => KernelSpec::rbf(self.width),
            other => Err(SvmError::InvalidInput(format!("unknown kernel '{other}'"))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Robust nonparametric spectral estimation on a frequency grid
    Spectral {
        /// Input signal CSV (time,value; seconds / signal units)
        #[arg(long)]
        input: PathBuf,
        /// Output CSV (omega_rad_s, amplitude, in_phase, quadrature)
        #[arg(long)]
        output: PathBuf,
        /// Fundamental grid spacing omega0 in rad/s (default 2*pi/span)
        #[arg(long)]
        omega0: Option<f64>,
        /// Number of harmonics K (default: sample count)
        #[arg(long)]
        harmonics: Option<usize>,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Difference-equation (output lags + input taps) identification
    Arx {
        /// Observed output signal CSV (time,value)
        #[arg(long)]
        input: PathBuf,
        /// Exogenous input signal CSV (time,value); all-zero when absent
        #[arg(long)]
        exo: Option<PathBuf>,
        /// Output coefficient CSV (coefficient,value)
        #[arg(long)]
        output: PathBuf,
        /// Output-lag order P (samples, >= 1)
        #[arg(long, default_value_t = 3)]
        ar_order: usize,
        /// Input-tap order Q (samples, >= 0)
        #[arg(long, default_value_t = 0)]
        exo_order: usize,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Band-limited interpolation stated in the primal (sinc expansion)
    InterpPsm {
        /// Input signal CSV (time,value; possibly nonuniform)
        #[arg(long)]
        input: PathBuf,
        /// Output reconstruction CSV (time,value) on a dense uniform grid
        #[arg(long)]
        output: PathBuf,
        /// Sinc bandwidth sigma0 in rad/s (default pi / mean spacing)
        #[arg(long)]
        sigma0: Option<f64>,
        /// Output grid step in seconds (default mean spacing / 16)
        #[arg(long)]
        grid_step: Option<f64>,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Nonuniform interpolation stated in the dual (time-instant kernel)
    InterpDsm {
        /// Input signal CSV (time,value; possibly nonuniform)
        #[arg(long)]
        input: PathBuf,
        /// Output reconstruction CSV (time,value) on a dense uniform grid
        #[arg(long)]
        output: PathBuf,
        /// Kernel on time instants: sinc | rbf
        #[arg(long, default_value = "sinc")]
        kernel: String,
        /// Sinc bandwidth sigma0 in rad/s (default pi / mean spacing)
        #[arg(long)]
        sigma0: Option<f64>,
        /// RBF width in seconds (used when --kernel rbf)
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// Output grid step in seconds (default mean spacing / 16)
        #[arg(long)]
        grid_step: Option<f64>,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Deconvolution stated in the primal: dense input estimate
    DeconvPsm {
        /// Observed signal CSV (time,value; uniform sampling)
        #[arg(long)]
        input: PathBuf,
        /// Impulse response CSV (single column of taps)
        #[arg(long)]
        impulse: PathBuf,
        /// Output CSV (index,amplitude) of the estimated input sequence
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Sparse deconvolution stated in the dual: spike estimates
    DeconvDsm {
        /// Observed signal CSV (time,value; uniform sampling)
        #[arg(long)]
        input: PathBuf,
        /// Impulse response CSV (single column of taps)
        #[arg(long)]
        impulse: PathBuf,
        /// Output CSV (index,amplitude), support entries only
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Nonlinear system identification in a kernel space
    Narx {
        /// Observed output signal CSV (time,value)
        #[arg(long)]
        input: PathBuf,
        /// Exogenous input signal CSV (time,value)
        #[arg(long)]
        exo: PathBuf,
        /// Output one-step-prediction CSV (row,prediction)
        #[arg(long)]
        output: PathBuf,
        /// Output-lag embedding order M (samples)
        #[arg(long, default_value_t = 4)]
        y_order: usize,
        /// Input-tap embedding order Q (samples)
        #[arg(long, default_value_t = 4)]
        x_order: usize,
        /// Model structure: stacked | 2k | 4k | combined
        #[arg(long, default_value = "stacked")]
        model: String,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Temporal-reference beamforming (trained on known symbols)
    BeamformTr {
        /// Training snapshot CSV (interleaved re,im per element)
        #[arg(long)]
        snapshots: PathBuf,
        /// Training symbol CSV (re,im per row)
        #[arg(long)]
        symbols: PathBuf,
        /// Snapshots to detect (defaults to the training snapshots)
        #[arg(long)]
        test: Option<PathBuf>,
        /// Output detected symbol CSV (re,im per row)
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Spatial-reference beamforming (known direction of arrival)
    BeamformSr {
        /// Unlabelled snapshot CSV (interleaved re,im per element)
        #[arg(long)]
        snapshots: PathBuf,
        /// Desired direction of arrival theta0 in radians
        #[arg(long, default_value_t = 0.0)]
        theta0: f64,
        /// Element spacing in wavelengths (d / lambda)
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
        /// Snapshots to detect (defaults to the training snapshots)
        #[arg(long)]
        test: Option<PathBuf>,
        /// Output detected symbol CSV (re,im per row)
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// Runs a seeded synthetic experiment and writes a metrics CSV
    Bench {
        /// Experiment id (sinusoid-spectral, ar3-imse, arma44-imse,
        /// lorenz-narx, beamform-tr, beamform-sr, double-sinc, spike-deconv)
        experiment: String,
        /// Output metrics CSV (one row per trial plus a median row)
        #[arg(long)]
        out: PathBuf,
        /// Base seed (env override SVMDSP_SEED; flag wins)
        #[arg(long)]
        seed: Option<u64>,
        /// Trial count (env override SVMDSP_TRIALS; flag wins)
        #[arg(long)]
        trials: Option<usize>,
        /// key=value file overriding experiment constants
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn mean_spacing(signal: &SampledSignal) -> f64 {
    signal.span() / (signal.len().saturating_sub(1).max(1) as f64)
}

fn dense_grid(signal: &SampledSignal, step: Option<f64>) -> Result<Vec<f64>, SvmError> {
    let step = step.unwrap_or_else(|| mean_spacing(signal) / 16.0);
    if !(step > 0.0) {
        return Err(SvmError::InvalidInput("grid step must be > 0".into()));
    }
    let start = signal.times()[0];
    let stop = signal.times()[signal.len() - 1];
    let count = ((stop - start) / step).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn read_symbols(path: &PathBuf) -> Result<ComplexSeries, SvmError> {
    let rows = io::read_snapshots(path)?;
    let flat: Vec<num_complex::Complex64> = rows
        .into_iter()
        .map(|mut r| {
            if r.len() == 1 {
                Ok(r.remove(0))
            } else {
                Err(SvmError::Io("symbol rows must hold one re,im pair".into()))
            }
        })
        .collect::<Result<_, _>>()?;
    ComplexSeries::new(flat)
}

fn run(cli: Cli) -> Result<(), SvmError> {
    match cli.command {
        Command::Spectral {
            input,
            output,
            omega0,
            harmonics,
            loss,
        } => {
            let signal = io::read_signal(&input)?;
            let grid = match omega0 {
                Some(w0) => SpectralGrid::new(w0, harmonics.unwrap_or(signal.len()))?,
                None => {
                    let d = SpectralGrid::default_for(&signal)?;
                    SpectralGrid::new(d.omega0(), harmonics.unwrap_or(d.harmonics()))?
                }
            };
            let (_, coeffs) = psm::spectral_fit(&signal, &grid, &loss.build()?)?;
            let amplitudes = coeffs.amplitudes();
            let rows: Vec<Vec<f64>> = grid
                .omegas()
                .iter()
                .enumerate()
                .map(|(k, &w)| {
                    vec![w, amplitudes[k], coeffs.in_phase()[k], coeffs.quadrature()[k]]
                })
                .collect();
            io::write_table(
                &output,
                &["omega_rad_s", "amplitude", "in_phase", "quadrature"],
                &rows,
            )
        }
        Command::Arx {
            input,
            exo,
            output,
            ar_order,
            exo_order,
            loss,
        } => {
            let y = io::read_signal(&input)?;
            let x = match exo {
                Some(p) => io::read_signal(&p)?,
                None => SampledSignal::new(y.times().to_vec(), vec![0.0; y.len()])?,
            };
            let orders = ArxOrders::new(ar_order, exo_order)?;
            let (_, coeffs) = psm::arx_fit(&x, &y, &orders, &loss.build()?)?;
            let mut out = String::from("coefficient,value\n");
            for (p, d) in coeffs.ar.iter().enumerate() {
                out.push_str(&format!("d{},{}\n", p + 1, d));
            }
            for (q, e) in coeffs.exo.iter().enumerate() {
                out.push_str(&format!("e{q},{e}\n"));
            }
            io::write_atomic(&output, &out)
        }
        Command::InterpPsm {
            input,
            output,
            sigma0,
            grid_step,
            loss,
        } => {
            let signal = io::read_signal(&input)?;
            let s0 = sigma0.unwrap_or(std::f64::consts::PI / mean_spacing(&signal));
            let fit = psm::sinc_psm_fit(&signal, s0, &loss.build()?)?;
            let grid = dense_grid(&signal, grid_step)?;
            let values = fit.predict_many(&grid);
            io::write_signal(&output, &SampledSignal::new(grid, values)?)
        }
        Command::InterpDsm {
            input,
            output,
            kernel,
            sigma0,
            width,
            grid_step,
            loss,
        } => {
            let signal = io::read_signal(&input)?;
            let loss = loss.build()?;
            let fit = match kernel.as_str() {
                "sinc" => {
                    let s0 = sigma0.unwrap_or(std::f64::consts::PI / mean_spacing(&signal));
                    dsm::dsm_sinc_fit(&signal, s0, &loss)?
                }
                "rbf" => dsm::dsm_rbf_fit(&signal, width, &loss)?,
                other => {
                    return Err(SvmError::InvalidInput(format!(
                        "unknown interpolation kernel '{other}'"
                    )))
                }
            };
            let grid = dense_grid(&signal, grid_step)?;
            let values = fit.predict_many(&grid);
            io::write_signal(&output, &SampledSignal::new(grid, values)?)
        }
        Command::DeconvPsm {
            input,
            impulse,
            output,
            loss,
        } => {
            let y = io::read_signal(&input)?;
            let h = io::read_impulse_response(&impulse, 1.0)?;
            let fit = psm::deconv_psm_fit(&y, &h, &loss.build()?)?;
            let rows: Vec<Vec<f64>> = fit
                .input_estimate
                .iter()
                .enumerate()
                .map(|(i, v)| vec![i as f64, *v])
                .collect();
            io::write_table(&output, &["index", "amplitude"], &rows)
        }
        Command::DeconvDsm {
            input,
            impulse,
            output,
            loss,
        } => {
            let y = io::read_signal(&input)?;
            let h = io::read_impulse_response(&impulse, 1.0)?;
            let loss = loss.build()?;
            let fit = dsm::dsm_deconv_fit(&y, &h, &loss)?;
            io::write_spikes(&output, &fit.spikes, loss.support_tolerance())
        }
        Command::Narx {
            input,
            exo,
            output,
            y_order,
            x_order,
            model,
            kernel,
            loss,
        } => {
            let y = io::read_signal(&input)?;
            let x = io::read_signal(&exo)?;
            let k = kernel.build()?;
            let loss = loss.build()?;
            let predictor = match model.as_str() {
                "stacked" => rsm::stacked_narx_fit(&x, &y, y_order, x_order, k, &loss)?,
                "2k" => rsm::svm_arx_2k_fit(&x, &y, y_order, x_order, k.clone(), k, &loss)?,
                "4k" => rsm::svm_arx_4k_fit(
                    &x,
                    &y,
                    y_order,
                    x_order,
                    k.clone(),
                    k.clone(),
                    k,
                    None,
                    &loss,
                )?,
                "combined" => rsm::combined_svr_arx_fit(
                    &x,
                    &y,
                    y_order,
                    x_order,
                    k.clone(),
                    k.clone(),
                    k.clone(),
                    k,
                    &loss,
                )?,
                other => {
                    return Err(SvmError::InvalidInput(format!("unknown model '{other}'")))
                }
            };
            let (rows, preds) = predictor.one_step_predictions(&x, &y)?;
            let table: Vec<Vec<f64>> = rows
                .iter()
                .zip(&preds)
                .map(|(&r, &p)| vec![r as f64, p])
                .collect();
            io::write_table(&output, &["row", "prediction"], &table)
        }
        Command::BeamformTr {
            snapshots,
            symbols,
            test,
            output,
            loss,
        } => {
            let train = io::read_snapshots(&snapshots)?;
            let syms = read_symbols(&symbols)?;
            let bf = psm::temporal_beamformer_fit(&train, &syms, &loss.build()?)?;
            let targets = match test {
                Some(p) => io::read_snapshots(&p)?,
                None => train,
            };
            let detected: Vec<Vec<num_complex::Complex64>> = targets
                .iter()
                .map(|s| vec![bf.detect_qpsk(s)])
                .collect();
            io::write_complex_rows(&output, "re,im", &detected)
        }
        Command::BeamformSr {
            snapshots,
            theta0,
            spacing,
            test,
            output,
            kernel,
            loss,
        } => {
            let train = io::read_snapshots(&snapshots)?;
            let elements = train[0].len();
            let canonical = CanonicalSignalSet::qpsk(elements, spacing, theta0);
            let bf = rsm::spatial_beamformer_fit(
                &train,
                &canonical,
                &kernel.build()?,
                &loss.build()?,
            )?;
            let targets = match test {
                Some(p) => io::read_snapshots(&p)?,
                None => train,
            };
            let detected: Vec<Vec<num_complex::Complex64>> = targets
                .iter()
                .map(|s| bf.detect_qpsk(s).map(|d| vec![d]))
                .collect::<Result<_, _>>()?;
            io::write_complex_rows(&output, "re,im", &detected)
        }
        Command::Bench {
            experiment,
            out,
            seed,
            trials,
            config,
        } => {
            let id: ExperimentId = experiment.parse()?;
            let env_seed = env_u64("SVMDSP_SEED")?;
            let env_trials = env_u64("SVMDSP_TRIALS")?.map(|v| v as usize);
            let mut cfg = ExperimentConfig::new(
                id,
                seed.or(env_seed).unwrap_or(0),
                trials.or(env_trials),
            );
            if let Some(path) = config {
                cfg.params = io::read_key_value(&path)?;
            }
            let rows = run_experiment(&cfg)?;
            write_report_csv(&out, &rows)
        }
    }
}

fn env_u64(name: &str) -> Result<Option<u64>, SvmError> {
    match std::env::var(name) {
        Ok(v) => v
            .parse::<u64>()
            .map(Some)
            .map_err(|_| SvmError::InvalidInput(format!("{name} must be an integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                SvmError::Io(_) => 2,
                SvmError::NonConvergence { .. } => 3,
                _ => 4,
            };
            ExitCode::from(code)
        }
    }
}
