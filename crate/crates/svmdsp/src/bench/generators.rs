//! Seeded synthetic data generators for the experiment harness.
//!
//! Every generator is deterministic under its seed (a counter-based stream
//! cipher RNG), so experiment outputs are reproducible byte for byte.

use crate::error::{Result, SvmError};
use crate::kernels::ImpulseResponse;
use crate::psm::{qpsk_constellation, steering_vector, ArxCoeffs};
use crate::types::SampledSignal;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit sinusoid at `f` cycles/sample plus Gaussian noise plus a sparse
/// impulsive process: with probability `outlier_rate` a sample receives
/// `±10 + U(-0.5, 0.5)`.
pub fn gen_sinusoid_impulsive(
    seed: u64,
    n: usize,
    f: f64,
    gauss_var: f64,
    outlier_rate: f64,
) -> Result<SampledSignal> {
    if !(0.0..=1.0).contains(&outlier_rate) {
        return Err(SvmError::InvalidInput("outlier rate must be in [0,1]".into()));
    }
    let mut rng = rng_for(seed);
    let gauss = Normal::new(0.0, gauss_var.sqrt()).map_err(|e| SvmError::InvalidInput(e.to_string()))?;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let mut y = (2.0 * PI * f * i as f64).sin();
            if gauss_var > 0.0 {
                y += gauss.sample(&mut rng);
            }
            if outlier_rate > 0.0 && rng.gen::<f64>() < outlier_rate {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                y += sign * 10.0 + rng.gen_range(-0.5..0.5);
            }
            y
        })
        .collect();
    SampledSignal::uniform(0.0, 1.0, values)
}

/// Contamination of a generated process: Gaussian noise added to the
/// observed output, plus randomly placed impulses (zero-mean uniform law
/// of the given variance) entering the driving noise, so an impulse excites
/// the system dynamics rather than a single reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contamination {
    pub gauss_var: f64,
    pub impulse_rate: f64,
    pub impulse_var: f64,
}

const TRANSIENT: usize = 200;

fn run_arma(
    seed: u64,
    len: usize,
    ar: &[f64],
    ma: &[f64],
    contamination: Option<Contamination>,
) -> Result<(SampledSignal, ArxCoeffs)> {
    if len <= 20 {
        return Err(SvmError::InvalidInput("series too short".into()));
    }
    let mut rng = rng_for(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let total = len + TRANSIENT;
    let mut e = vec![0.0; total];
    for v in e.iter_mut() {
        *v = normal.sample(&mut rng);
    }
    if let Some(c) = contamination {
        // uniform with variance v has half-width sqrt(3 v)
        let half_width = (3.0 * c.impulse_var).sqrt();
        if c.impulse_rate > 0.0 && half_width > 0.0 {
            for v in e[TRANSIENT..].iter_mut() {
                if rng.gen::<f64>() < c.impulse_rate {
                    *v += rng.gen_range(-half_width..half_width);
                }
            }
        }
    }
    let mut y = vec![0.0; total];
    for n in 0..total {
        let mut acc = e[n];
        for (q, b) in ma.iter().enumerate() {
            if n > q {
                acc += b * e[n - (q + 1)];
            }
        }
        for (p, d) in ar.iter().enumerate() {
            if n > p {
                acc += d * y[n - (p + 1)];
            }
        }
        if !acc.is_finite() || acc.abs() > 1e12 {
            return Err(SvmError::Numeric("unstable recursion overflow".into()));
        }
        y[n] = acc;
    }
    let mut values: Vec<f64> = y[TRANSIENT..].to_vec();
    if let Some(c) = contamination {
        if c.gauss_var > 0.0 {
            let gauss = Normal::new(0.0, c.gauss_var.sqrt())
                .map_err(|e| SvmError::InvalidInput(e.to_string()))?;
            for v in values.iter_mut() {
                *v += gauss.sample(&mut rng);
            }
        }
    }
    Ok((
        SampledSignal::uniform(0.0, 1.0, values)?,
        ArxCoeffs {
            ar: ar.to_vec(),
            exo: vec![],
        },
    ))
}

/// Third-order all-pole benchmark process driven by unit white noise.
pub fn ar3_coefficients() -> [f64; 3] {
    [-0.9816, -0.9400, -0.7799]
}

pub fn gen_ar3(
    seed: u64,
    len: usize,
    contamination: Option<Contamination>,
) -> Result<(SampledSignal, ArxCoeffs)> {
    run_arma(seed, len, &ar3_coefficients(), &[], contamination)
}

/// Narrow-band fourth-order pole-zero benchmark process.
pub fn arma44_coefficients() -> ([f64; 4], [f64; 4]) {
    (
        [1.0200, -2.0902, 0.9808, -0.9275],
        [0.4800, 0.6876, 0.4476, 0.3538],
    )
}

pub fn gen_arma44(
    seed: u64,
    len: usize,
    contamination: Option<Contamination>,
) -> Result<(SampledSignal, ArxCoeffs)> {
    let (ar, ma) = arma44_coefficients();
    run_arma(seed, len, &ar, &ma, contamination)
}

/// Second-order filter section in direct form II transposed.
#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        for (n, &xn) in x.iter().enumerate() {
            let yn = self.b0 * xn + self.b1 * x1 + self.b2 * x2 - self.a1 * y1 - self.a2 * y2;
            x2 = x1;
            x1 = xn;
            y2 = y1;
            y1 = yn;
            y[n] = yn;
        }
        y
    }

    /// Magnitude response at normalized angular frequency `w` (rad/sample).
    pub fn magnitude(&self, w: f64) -> f64 {
        let z1 = Complex64::new(w.cos(), -w.sin());
        let z2 = z1 * z1;
        let num = Complex64::new(self.b0, 0.0) + z1 * self.b1 + z2 * self.b2;
        let den = Complex64::new(1.0, 0.0) + z1 * self.a1 + z2 * self.a2;
        (num / den).norm()
    }
}

/// Digital Butterworth lowpass of even order via the bilinear transform,
/// returned as a cascade of unity-DC-gain second-order sections. `cutoff`
/// is in units of the Nyquist frequency.
pub fn butterworth_lowpass(order: usize, cutoff: f64) -> Result<Vec<Biquad>> {
    if order == 0 || order % 2 != 0 {
        return Err(SvmError::InvalidInput("order must be even and > 0".into()));
    }
    if !(0.0 < cutoff && cutoff < 1.0) {
        return Err(SvmError::InvalidInput("cutoff must be in (0, 1)".into()));
    }
    let warped = (PI * cutoff / 2.0).tan();
    let mut sections = Vec::with_capacity(order / 2);
    for k in 0..order / 2 {
        // analog pole pair on the Butterworth circle, left half plane
        let angle = PI * (2.0 * k as f64 + 1.0 + order as f64) / (2.0 * order as f64);
        let s = Complex64::new(warped * angle.cos(), warped * angle.sin());
        // bilinear: z = (1 + s) / (1 - s)
        let p = (Complex64::new(1.0, 0.0) + s) / (Complex64::new(1.0, 0.0) - s);
        let a1 = -2.0 * p.re;
        let a2 = p.norm_sqr();
        // zeros at z = -1, section normalized to unit DC gain
        let g = (1.0 + a1 + a2) / 4.0;
        sections.push(Biquad {
            b0: g,
            b1: 2.0 * g,
            b2: g,
            a1,
            a2,
        });
    }
    Ok(sections)
}

/// Runs a biquad cascade over a signal.
pub fn filter_cascade(sections: &[Biquad], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    for s in sections {
        y = s.filter(&y);
    }
    y
}

/// Chaotic reference trajectory: x-component of the Lorenz system
/// (`rho = 10`, `r = 28`, `b = 8/3`), integrated with fixed-step RK4 at
/// `h = 0.01`, first 1000 steps discarded, one sample per step. The seed
/// perturbs the starting point.
pub fn lorenz_x(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = rng_for(seed);
    let mut state = [
        1.0 + rng.gen_range(-0.5..0.5),
        1.0 + rng.gen_range(-0.5..0.5),
        20.0 + rng.gen_range(-0.5..0.5),
    ];
    let h = 0.01;
    let deriv = |s: &[f64; 3]| -> [f64; 3] {
        let (x, y, z) = (s[0], s[1], s[2]);
        [10.0 * (y - x), -x * z + 28.0 * x - y, x * y - 8.0 / 3.0 * z]
    };
    let step = |s: &mut [f64; 3]| {
        let k1 = deriv(s);
        let mid1 = [s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1], s[2] + 0.5 * h * k1[2]];
        let k2 = deriv(&mid1);
        let mid2 = [s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1], s[2] + 0.5 * h * k2[2]];
        let k3 = deriv(&mid2);
        let end = [s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]];
        let k4 = deriv(&end);
        for i in 0..3 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    };
    for _ in 0..1000 {
        step(&mut state);
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        step(&mut state);
        out.push(state[0]);
    }
    out
}

/// Sign-preserving logarithmic compression `sign(o) ln(1 + |o|)`; the
/// plain logarithm is undefined for non-positive input.
pub fn log_compress(o: f64) -> f64 {
    o.signum() * (1.0 + o.abs()).ln()
}

/// Nonlinear system identification benchmark: the Lorenz x-component is
/// passed through an 8th-order Butterworth lowpass (cutoff 0.5 Nyquist),
/// a high-pass minimum-phase feedback stage
/// `o_n = g_n - 2.01 o_{n-1} - 1.46 o_{n-2} - 0.39 o_{n-3}`,
/// and a logarithmic output distortion. Returns (chain input, distorted
/// output).
pub fn gen_lorenz_chain(seed: u64, n: usize) -> Result<(SampledSignal, SampledSignal)> {
    if n < 200 {
        return Err(SvmError::InvalidInput("need at least 200 samples".into()));
    }
    let u = lorenz_x(seed, n);
    let lp = butterworth_lowpass(8, 0.5)?;
    let g = filter_cascade(&lp, &u);
    let mut o = vec![0.0; n];
    for i in 0..n {
        let mut acc = g[i];
        if i >= 1 {
            acc -= 2.01 * o[i - 1];
        }
        if i >= 2 {
            acc -= 1.46 * o[i - 2];
        }
        if i >= 3 {
            acc -= 0.39 * o[i - 3];
        }
        o[i] = acc;
    }
    let y: Vec<f64> = o.iter().map(|&v| log_compress(v)).collect();
    Ok((
        SampledSignal::uniform(0.0, 1.0, u)?,
        SampledSignal::uniform(0.0, 1.0, y)?,
    ))
}

/// One source of an array scene: direction of arrival (radians) and
/// amplitude.
pub type PlaneWave = (f64, f64);

/// Multiuser array scenario. The desired user may arrive over several
/// paths sharing one symbol stream; with `random_desired_phase` each path
/// amplitude picks up an independent uniform random phase per burst.
/// Interferers carry independent symbol streams at fixed zero phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayScenario {
    pub elements: usize,
    pub spacing: f64,
    pub desired_paths: Vec<PlaneWave>,
    pub random_desired_phase: bool,
    pub interferers: Vec<PlaneWave>,
    /// Per-element complex noise variance.
    pub noise_power: f64,
}

/// One burst of labelled snapshots.
#[derive(Debug, Clone)]
pub struct ArrayBurst {
    pub train_snapshots: Vec<Vec<Complex64>>,
    pub train_symbols: Vec<Complex64>,
    pub test_snapshots: Vec<Vec<Complex64>>,
    pub test_symbols: Vec<Complex64>,
}

pub fn gen_array_burst(
    scene: &ArrayScenario,
    seed: u64,
    train: usize,
    test: usize,
) -> Result<ArrayBurst> {
    if scene.elements == 0 || scene.desired_paths.is_empty() {
        return Err(SvmError::InvalidInput("scene needs elements and a desired source".into()));
    }
    let mut rng = rng_for(seed);
    let constellation = qpsk_constellation();
    // per-burst random phase on each desired path
    let desired_steering: Vec<Vec<Complex64>> = scene
        .desired_paths
        .iter()
        .map(|&(doa, amp)| {
            let phase = if scene.random_desired_phase {
                rng.gen_range(0.0..2.0 * PI)
            } else {
                0.0
            };
            let rot = Complex64::new(phase.cos(), phase.sin()) * amp;
            steering_vector(scene.elements, scene.spacing, doa)
                .into_iter()
                .map(|a| a * rot)
                .collect()
        })
        .collect();
    let interferer_steering: Vec<Vec<Complex64>> = scene
        .interferers
        .iter()
        .map(|&(doa, amp)| {
            steering_vector(scene.elements, scene.spacing, doa)
                .into_iter()
                .map(|a| a * amp)
                .collect()
        })
        .collect();
    let noise_sigma = (scene.noise_power / 2.0).sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();

    let make = |count: usize,
                    rng: &mut ChaCha8Rng|
     -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
        let mut snaps = Vec::with_capacity(count);
        let mut symbols = Vec::with_capacity(count);
        for _ in 0..count {
            let b = constellation[rng.gen_range(0..4)];
            let mut x = vec![Complex64::new(0.0, 0.0); scene.elements];
            for path in &desired_steering {
                for (xi, a) in x.iter_mut().zip(path) {
                    *xi += a * b;
                }
            }
            for steer in &interferer_steering {
                let bi = constellation[rng.gen_range(0..4)];
                for (xi, a) in x.iter_mut().zip(steer) {
                    *xi += a * bi;
                }
            }
            for xi in x.iter_mut() {
                *xi += Complex64::new(
                    noise_sigma * normal.sample(rng),
                    noise_sigma * normal.sample(rng),
                );
            }
            snaps.push(x);
            symbols.push(b);
        }
        (snaps, symbols)
    };
    let (train_snapshots, train_symbols) = make(train, &mut rng);
    let (test_snapshots, test_symbols) = make(test, &mut rng);
    Ok(ArrayBurst {
        train_snapshots,
        train_symbols,
        test_snapshots,
        test_symbols,
    })
}

/// Double squared-sinc interpolation benchmark.
#[derive(Debug, Clone)]
pub struct DoubleSinc {
    /// Jittered nonuniform noisy observations.
    pub train: SampledSignal,
    /// Noise-free values on the train time stamps.
    pub clean_train: Vec<f64>,
    /// Dense uniform noise-free reference (spacing `T / 16`).
    pub test: SampledSignal,
    /// Variance of the additive observation noise.
    pub noise_var: f64,
}

/// Width of the squared-sinc envelope in seconds.
pub const DOUBLE_SINC_T0: f64 = 2.0;

/// Clean double squared-sinc waveform: a baseband squared sinc carrying a
/// half-depth amplitude modulation at `f` Hz.
pub fn double_sinc_value(t: f64, f: f64) -> f64 {
    let s = crate::kernels::sinc(PI * t / DOUBLE_SINC_T0);
    s * s * (1.0 + 0.5 * (2.0 * PI * f * t).sin())
}

/// Samples the double squared-sinc on a jittered grid (uniform jitter of
/// `±T/4` around spacing `T`, centred on the envelope) at the requested
/// signal-to-noise ratio, plus a dense clean test grid at spacing `T/16`.
pub fn gen_double_sinc(
    seed: u64,
    l: usize,
    mean_t: f64,
    snr_db: f64,
    f: f64,
) -> Result<DoubleSinc> {
    if l < 4 {
        return Err(SvmError::InvalidInput("need at least 4 samples".into()));
    }
    let mut rng = rng_for(seed);
    let half = l as f64 / 2.0;
    let times: Vec<f64> = (0..l)
        .map(|i| (i as f64 - half) * mean_t + rng.gen_range(-0.25 * mean_t..0.25 * mean_t))
        .collect();
    let clean_train: Vec<f64> = times.iter().map(|&t| double_sinc_value(t, f)).collect();
    let power = clean_train.iter().map(|v| v * v).sum::<f64>() / l as f64;
    let noise_var = power / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, noise_var.sqrt()).unwrap();
    let noisy: Vec<f64> = clean_train.iter().map(|v| v + normal.sample(&mut rng)).collect();

    let step = mean_t / 16.0;
    let start = -half * mean_t;
    let count = (16 * (l - 1)) + 1;
    let test_times: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
    let test_values: Vec<f64> = test_times.iter().map(|&t| double_sinc_value(t, f)).collect();

    Ok(DoubleSinc {
        train: SampledSignal::new(times, noisy)?,
        clean_train,
        test: SampledSignal::new(test_times, test_values)?,
        noise_var,
    })
}

/// Sparse spike train convolved with a known response plus noise.
#[derive(Debug, Clone)]
pub struct SpikeTrain {
    pub observation: SampledSignal,
    pub positions: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub noise_sigma: f64,
}

/// Places `spike_count` spikes with amplitudes `±[0.5, 1.5]` at random
/// positions separated by at least the response length (keeping supports
/// identifiable), convolves with `h` and adds noise at `snr_db`.
pub fn gen_spike_train(
    seed: u64,
    n: usize,
    spike_count: usize,
    h: &ImpulseResponse,
    snr_db: f64,
) -> Result<SpikeTrain> {
    if spike_count >= n / 4 {
        return Err(SvmError::InvalidInput("too many spikes for the window".into()));
    }
    let mut rng = rng_for(seed);
    let m = h.order();
    let separation = m + 1;
    let limit = n.saturating_sub(m + 1);
    let mut positions: Vec<usize> = Vec::new();
    let mut guard = 0;
    while positions.len() < spike_count {
        let cand = rng.gen_range(0..limit);
        if positions.iter().all(|&p| p.abs_diff(cand) >= separation) {
            positions.push(cand);
        }
        guard += 1;
        if guard > 100_000 {
            return Err(SvmError::InvalidInput(
                "cannot place spikes with the required separation".into(),
            ));
        }
    }
    positions.sort_unstable();
    let amplitudes: Vec<f64> = positions
        .iter()
        .map(|_| {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            sign * rng.gen_range(0.5..1.5)
        })
        .collect();

    let mut clean = vec![0.0; n];
    for (&pos, &amp) in positions.iter().zip(&amplitudes) {
        for (j, tap) in h.samples().iter().enumerate() {
            if pos + j < n {
                clean[pos + j] += amp * tap;
            }
        }
    }
    let power = clean.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let noise_sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let normal = Normal::new(0.0, noise_sigma).unwrap();
    let values: Vec<f64> = clean.iter().map(|v| v + normal.sample(&mut rng)).collect();
    Ok(SpikeTrain {
        observation: SampledSignal::uniform(0.0, 1.0, values)?,
        positions,
        amplitudes,
        noise_sigma,
    })
}

/// Random minimum-phase FIR response: conjugate zero pairs inside the unit
/// circle, expanded to real taps and normalized to unit energy.
pub fn gen_min_phase_fir(seed: u64, len: usize) -> Result<ImpulseResponse> {
    if len < 2 {
        return Err(SvmError::InvalidInput("response needs at least 2 taps".into()));
    }
    let mut rng = rng_for(seed);
    let zeros = len - 1;
    // polynomial coefficients, lowest order first; start from 1
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let mut remaining = zeros;
    while remaining >= 2 {
        let radius = rng.gen_range(0.3..0.85);
        let angle = rng.gen_range(0.0..PI);
        let z = Complex64::new(radius * angle.cos(), radius * angle.sin());
        poly = poly_mul(&poly, &[z * z.conj(), -2.0 * z.re * Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        remaining -= 2;
    }
    if remaining == 1 {
        let r = rng.gen_range(-0.85..0.85);
        poly = poly_mul(&poly, &[Complex64::new(-r, 0.0), Complex64::new(1.0, 0.0)]);
    }
    // highest-order-first tap order so the leading tap comes first
    let mut taps: Vec<f64> = poly.iter().rev().map(|c| c.re).collect();
    let energy: f64 = taps.iter().map(|t| t * t).sum();
    let scale = energy.sqrt();
    for t in taps.iter_mut() {
        *t /= scale;
    }
    ImpulseResponse::new(taps, 1.0)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}
