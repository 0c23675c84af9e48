//! Narrowband uniform-linear-array signal model.
//!
//! Generates steering vectors, phase-distorted signal wavefronts, training
//! snapshots, sample and exact interference-plus-noise covariance (INC)
//! matrices, and evaluates the array output SINR
//!
//! ```text
//!   SINR(w) = sigma_s^2 |w^H a|^2 / (w^H R_in w)
//! ```
//!
//! Angles cross the API in degrees (broadside = 0 deg) and are converted to
//! radians internally. All randomness is seeded; every function here is pure
//! given its seed, so values can be shared freely across Monte Carlo workers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Complex column vector used for steering vectors, snapshots and weights.
pub type ComplexVector = DVector<Complex64>;

/// Tolerance on conjugate symmetry accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ArrayError {
    #[error("angle {0} deg out of range [-90, 90]")]
    AngleOutOfRange(f64),
    #[error("matrix is not Hermitian: max asymmetry {0:.3e}")]
    NotHermitian(f64),
    #[error("matrix is singular or not positive definite")]
    SingularMatrix,
    #[error("beamforming weight vector is zero")]
    ZeroWeight,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// N-sensor Hermitian matrix (covariances, dual matrix variables).
///
/// The wrapped storage is always exactly conjugate-symmetric: constructors
/// either verify symmetry ([`Self::new`]) or enforce it ([`Self::symmetrize`]).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    /// Wraps a matrix, verifying conjugate symmetry to [`HERMITIAN_TOL`]
    /// relative to the matrix scale.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, ArrayError> {
        if m.nrows() != m.ncols() {
            return Err(ArrayError::InvalidParameter(format!(
                "non-square matrix {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.norm().max(1.0);
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if worst > HERMITIAN_TOL * scale {
            return Err(ArrayError::NotHermitian(worst));
        }
        // exact symmetrization so downstream arithmetic never drifts
        Ok(Self::symmetrize(m))
    }

    /// Wraps `(M + M^H)/2`, discarding any skew component. Used where floating
    /// point noise is expected (sample averages, solver output).
    pub fn symmetrize(m: DMatrix<Complex64>) -> Self {
        let adj = m.adjoint();
        let mut h = (m + adj) * Complex64::new(0.5, 0.0);
        for i in 0..h.nrows() {
            h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        }
        HermitianMatrix(h)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(DMatrix::identity(n, n))
    }

    /// Scaled identity `c * I`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        HermitianMatrix(DMatrix::identity(n, n) * Complex64::new(c, 0.0))
    }

    /// Rank-one outer product `v v^H`.
    pub fn outer(v: &ComplexVector) -> Self {
        HermitianMatrix::symmetrize(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `tr(X)`; real because the diagonal of a Hermitian matrix is real.
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Frobenius inner product `tr(X Y)`; real for a Hermitian pair.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += (self.0[(i, j)] * other.0[(j, i)]).re;
            }
        }
        acc
    }

    /// Eigenvalues sorted in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .0
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|c| c.re)
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    /// Eigenpairs sorted by descending eigenvalue.
    pub fn eigen_pairs(&self) -> Vec<(f64, ComplexVector)> {
        let eig = self.0.clone().symmetric_eigen();
        let mut pairs: Vec<(f64, ComplexVector)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, c)| (c.re, eig.eigenvectors.column(i).into_owned()))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        pairs
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self
            .eigenvalues()
            .last()
            .expect("eigenvalues of a non-empty matrix")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Principal (Hermitian PSD) square root via eigendecomposition.
    /// Negative eigenvalues within `-tol` are clamped to zero; anything more
    /// negative is an error.
    pub fn sqrt_psd(&self, tol: f64) -> Result<Self, ArrayError> {
        let eig = self.0.clone().symmetric_eigen();
        let n = self.dim();
        let mut d = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let lam = eig.eigenvalues[i].re;
            if lam < -tol {
                return Err(ArrayError::SingularMatrix);
            }
            d[(i, i)] = Complex64::new(lam.max(0.0).sqrt(), 0.0);
        }
        let u = &eig.eigenvectors;
        Ok(HermitianMatrix::symmetrize(u * d * u.adjoint()))
    }

    /// Solves `X y = rhs` via Cholesky; requires positive definiteness.
    pub fn solve(&self, rhs: &ComplexVector) -> Result<ComplexVector, ArrayError> {
        let chol = self.0.clone().cholesky().ok_or(ArrayError::SingularMatrix)?;
        Ok(chol.solve(rhs))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 - &other.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        HermitianMatrix(&self.0 * Complex64::new(c, 0.0))
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..n)
            .map(|i| (0..n).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
        HermitianMatrix::new(m).map_err(D::Error::custom)
    }
}

/// Serializes a `ComplexVector` as a list of `[re, im]` pairs.
pub mod complex_vector_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &ComplexVector, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexVector, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(DVector::from_iterator(
            pairs.len(),
            pairs.iter().map(|p| Complex64::new(p[0], p[1])),
        ))
    }
}

/// Uniform linear array geometry.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub n_sensors: usize,
    pub spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(n_sensors: usize, spacing_wavelengths: f64) -> Result<Self, ArrayError> {
        if n_sensors < 2 {
            return Err(ArrayError::InvalidParameter(format!(
                "n_sensors = {n_sensors}, need at least 2"
            )));
        }
        if spacing_wavelengths <= 0.0 {
            return Err(ArrayError::InvalidParameter(
                "spacing_wavelengths must be positive".into(),
            ));
        }
        Ok(ArrayGeometry { n_sensors, spacing_wavelengths })
    }

    /// Half-wavelength ULA.
    pub fn half_wavelength(n_sensors: usize) -> Result<Self, ArrayError> {
        Self::new(n_sensors, 0.5)
    }
}

/// One interfering point source.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Interferer {
    pub doa_deg: f64,
    pub inr_db: f64,
}

/// Complete ground-truth description of a simulation scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrayScenario {
    pub geometry: ArrayGeometry,
    pub true_doa_deg: f64,
    pub presumed_doa_deg: f64,
    /// Closed angular sector `[lo, hi]` assumed to contain the signal.
    pub sector_deg: (f64, f64),
    pub interferers: Vec<Interferer>,
    /// Noise power per sensor, linear scale.
    pub noise_power: f64,
    pub snr_db: f64,
    /// Std of the per-sensor Gaussian phase increments (radians).
    pub phase_distortion_std: f64,
}

impl ArrayScenario {
    /// Hard invariants are errors; soft ones come back as warning strings
    /// (interferers inside the sector are legal but suspicious).
    pub fn validate(&self) -> Result<Vec<String>, ArrayError> {
        let (lo, hi) = self.sector_deg;
        if lo > hi {
            return Err(ArrayError::InvalidParameter(format!(
                "sector [{lo}, {hi}] is empty"
            )));
        }
        if !(lo..=hi).contains(&self.presumed_doa_deg) {
            return Err(ArrayError::InvalidParameter(format!(
                "presumed DOA {} deg outside sector [{lo}, {hi}]",
                self.presumed_doa_deg
            )));
        }
        if self.noise_power <= 0.0 {
            return Err(ArrayError::InvalidParameter("noise_power must be > 0".into()));
        }
        if self.phase_distortion_std < 0.0 {
            return Err(ArrayError::InvalidParameter(
                "phase_distortion_std must be >= 0".into(),
            ));
        }
        let mut warnings = Vec::new();
        for itf in &self.interferers {
            if (lo..=hi).contains(&itf.doa_deg) {
                warnings.push(format!(
                    "interferer at {} deg lies inside the signal sector [{lo}, {hi}]",
                    itf.doa_deg
                ));
            }
        }
        Ok(warnings)
    }

    /// Signal power `sigma_s^2` in linear scale; zero if `snr_db` is -inf.
    pub fn signal_power(&self) -> f64 {
        if self.snr_db == f64::NEG_INFINITY {
            0.0
        } else {
            self.noise_power * 10f64.powf(self.snr_db / 10.0)
        }
    }
}

/// `T` training snapshots of the array output.
#[derive(Debug, Clone)]
pub struct SnapshotBlock {
    pub samples: Vec<ComplexVector>,
    pub seed: u64,
}

impl SnapshotBlock {
    pub fn n_snapshots(&self) -> usize {
        self.samples.len()
    }
}

/// ULA steering vector: element `n` carries phase `2 pi d n sin(theta)`.
///
/// Every entry has unit modulus, so `||d(theta)||^2 = N` exactly.
pub fn ula_steering(geometry: &ArrayGeometry, theta_deg: f64) -> Result<ComplexVector, ArrayError> {
    if !(-90.0..=90.0).contains(&theta_deg) || !theta_deg.is_finite() {
        return Err(ArrayError::AngleOutOfRange(theta_deg));
    }
    let theta = theta_deg.to_radians();
    let phase_step = 2.0 * std::f64::consts::PI * geometry.spacing_wavelengths * theta.sin();
    Ok(DVector::from_iterator(
        geometry.n_sensors,
        (0..geometry.n_sensors).map(|n| Complex64::from_polar(1.0, phase_step * n as f64)),
    ))
}

/// Applies accumulated phase distortion: independent zero-mean Gaussian phase
/// increments per sensor, cumulatively summed from the first sensor onward.
/// Per-entry modulus is preserved exactly; `std = 0` returns the input as-is.
pub fn distort_steering(a: &ComplexVector, std: f64, seed: u64) -> ComplexVector {
    if std == 0.0 {
        return a.clone();
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).expect("std >= 0 checked by caller");
    let mut acc = 0.0;
    DVector::from_iterator(
        a.len(),
        a.iter().map(|&an| {
            acc += normal.sample(&mut rng);
            an * Complex64::from_polar(1.0, acc)
        }),
    )
}

/// The distorted true-DOA steering vector used by [`synth_snapshots`] for the
/// same `seed`. Exposed so SINR evaluation can target the exact wavefront the
/// training data contained.
pub fn distorted_true_steering(
    scenario: &ArrayScenario,
    seed: u64,
) -> Result<ComplexVector, ArrayError> {
    let a = ula_steering(&scenario.geometry, scenario.true_doa_deg)?;
    Ok(distort_steering(
        &a,
        scenario.phase_distortion_std,
        split_seed(seed, STREAM_DISTORTION),
    ))
}

// Stream ids for deterministic sub-seeding inside one snapshot block.
const STREAM_DISTORTION: u64 = 1;
const STREAM_SIGNAL: u64 = 2;
const STREAM_NOISE: u64 = 3;
const STREAM_INTERFERER_BASE: u64 = 16;

/// SplitMix64 step; the standard way to fan one 64-bit seed out into
/// decorrelated stream seeds.
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_gaussian_block(rng: &mut ChaCha12Rng, len: usize, power: f64) -> Vec<Complex64> {
    // circular complex Gaussian: re, im ~ N(0, power/2)
    let normal = Normal::new(0.0, (power / 2.0).sqrt()).expect("valid std");
    (0..len)
        .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect()
}

/// Synthesizes `T` snapshots `y(t) = s(t) a_true + sum_k i_k(t) d(theta_k) + n(t)`
/// with independent circular complex Gaussian signal, interference and noise
/// streams. The desired signal rides on the phase-distorted true steering
/// vector, held fixed for the whole block.
pub fn synth_snapshots(
    scenario: &ArrayScenario,
    t_snapshots: usize,
    seed: u64,
) -> Result<SnapshotBlock, ArrayError> {
    if t_snapshots == 0 {
        return Err(ArrayError::InvalidParameter("T must be >= 1".into()));
    }
    let n = scenario.geometry.n_sensors;
    let a_true = distorted_true_steering(scenario, seed)?;

    let sigma_s2 = scenario.signal_power();
    let mut samples = vec![DVector::zeros(n); t_snapshots];

    if sigma_s2 > 0.0 {
        let mut rng = ChaCha12Rng::seed_from_u64(split_seed(seed, STREAM_SIGNAL));
        let s = complex_gaussian_block(&mut rng, t_snapshots, sigma_s2);
        for (t, sample) in samples.iter_mut().enumerate() {
            *sample += &a_true * s[t];
        }
    }

    for (k, itf) in scenario.interferers.iter().enumerate() {
        let d_k = ula_steering(&scenario.geometry, itf.doa_deg)?;
        let power = scenario.noise_power * 10f64.powf(itf.inr_db / 10.0);
        let mut rng =
            ChaCha12Rng::seed_from_u64(split_seed(seed, STREAM_INTERFERER_BASE + k as u64));
        let i_k = complex_gaussian_block(&mut rng, t_snapshots, power);
        for (t, sample) in samples.iter_mut().enumerate() {
            *sample += &d_k * i_k[t];
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(split_seed(seed, STREAM_NOISE));
    for sample in samples.iter_mut() {
        let noise = complex_gaussian_block(&mut rng, n, scenario.noise_power);
        for (i, z) in noise.into_iter().enumerate() {
            sample[i] += z;
        }
    }

    Ok(SnapshotBlock { samples, seed })
}

/// Sample covariance `R_hat = (1/T) sum_t y(t) y(t)^H`.
pub fn sample_covariance(block: &SnapshotBlock) -> HermitianMatrix {
    let t = block.n_snapshots();
    assert!(t >= 1, "empty snapshot block");
    let n = block.samples[0].len();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for y in &block.samples {
        acc += y * y.adjoint();
    }
    HermitianMatrix::symmetrize(acc / Complex64::new(t as f64, 0.0))
}

/// Exact INC matrix `sigma_n^2 I + sum_k sigma_k^2 d(theta_k) d(theta_k)^H`.
pub fn true_inc(scenario: &ArrayScenario) -> Result<HermitianMatrix, ArrayError> {
    let n = scenario.geometry.n_sensors;
    let mut acc =
        DMatrix::<Complex64>::identity(n, n) * Complex64::new(scenario.noise_power, 0.0);
    for itf in &scenario.interferers {
        let d = ula_steering(&scenario.geometry, itf.doa_deg)?;
        let power = scenario.noise_power * 10f64.powf(itf.inr_db / 10.0);
        acc += (&d * d.adjoint()) * Complex64::new(power, 0.0);
    }
    Ok(HermitianMatrix::symmetrize(acc))
}

/// Array output SINR in dB. Invariant under nonzero scaling of `w`.
pub fn output_sinr(
    w: &ComplexVector,
    a_true: &ComplexVector,
    sigma_s2: f64,
    r_in: &HermitianMatrix,
) -> Result<f64, ArrayError> {
    if w.norm() == 0.0 {
        return Err(ArrayError::ZeroWeight);
    }
    let num = sigma_s2 * w.dotc(a_true).norm_sqr();
    let rw = r_in.as_matrix() * w;
    let den = w.dotc(&rw).re;
    if den <= 0.0 {
        return Err(ArrayError::SingularMatrix);
    }
    Ok(10.0 * (num / den).log10())
}

/// Attainable SINR ceiling `sigma_s^2 a^H R_in^{-1} a` in dB, reached by the
/// MVDR solution `w = R_in^{-1} a`.
pub fn optimal_sinr(
    a_true: &ComplexVector,
    sigma_s2: f64,
    r_in: &HermitianMatrix,
) -> Result<f64, ArrayError> {
    let solved = r_in.solve(a_true)?;
    let q = a_true.dotc(&solved).re;
    if q <= 0.0 {
        return Err(ArrayError::SingularMatrix);
    }
    Ok(10.0 * (sigma_s2 * q).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn geom(n: usize) -> ArrayGeometry {
        ArrayGeometry::half_wavelength(n).unwrap()
    }

    fn test_scenario() -> ArrayScenario {
        ArrayScenario {
            geometry: geom(10),
            true_doa_deg: 5.0,
            presumed_doa_deg: 1.0,
            sector_deg: (0.0, 10.0),
            interferers: vec![
                Interferer { doa_deg: -5.0, inr_db: 30.0 },
                Interferer { doa_deg: 15.0, inr_db: 30.0 },
            ],
            noise_power: 1.0,
            snr_db: 0.0,
            phase_distortion_std: 0.02,
        }
    }

    #[test]
    fn steering_broadside_is_all_ones() {
        let d = ula_steering(&geom(4), 0.0).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(d[i].re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(d[i].im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn steering_norm_is_n_exactly() {
        for &(n, theta) in &[(4usize, 17.3), (10, -42.0), (32, 89.9), (2, 90.0)] {
            let d = ula_steering(&geom(n), theta).unwrap();
            assert_abs_diff_eq!(d.norm_squared(), n as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn steering_endfire_two_sensor() {
        // e^{j pi sin 90} = e^{j pi} = -1
        let d = ula_steering(&geom(2), 90.0).unwrap();
        assert_abs_diff_eq!(d[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn steering_rejects_out_of_range() {
        assert!(ula_steering(&geom(4), 90.1).is_err());
        assert!(ula_steering(&geom(4), -91.0).is_err());
    }

    #[test]
    fn distortion_preserves_modulus_and_is_deterministic() {
        let a = ula_steering(&geom(8), 12.0).unwrap();
        let d1 = distort_steering(&a, 0.05, 7);
        let d2 = distort_steering(&a, 0.05, 7);
        assert_eq!(d1, d2);
        for i in 0..8 {
            assert_abs_diff_eq!(d1[i].norm(), a[i].norm(), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(d1.norm(), a.norm(), epsilon = 1e-12);
        // zero std is the identity
        let d0 = distort_steering(&a, 0.0, 7);
        assert_eq!(d0, a);
        // different seed, different output
        let d3 = distort_steering(&a, 0.05, 8);
        assert!((&d1 - &d3).norm() > 1e-8);
    }

    #[test]
    fn snapshots_noise_only_power_matches() {
        let mut sc = test_scenario();
        sc.interferers.clear();
        sc.snr_db = f64::NEG_INFINITY;
        let t = 10_000;
        let block = synth_snapshots(&sc, t, 99).unwrap();
        let n = sc.geometry.n_sensors;
        let mut per_sensor = vec![0.0; n];
        for y in &block.samples {
            for i in 0..n {
                per_sensor[i] += y[i].norm_sqr();
            }
        }
        for p in per_sensor {
            let avg = p / t as f64;
            assert!(
                (avg - sc.noise_power).abs() / sc.noise_power < 0.05,
                "per-sensor power {avg} deviates from {} by more than 5%",
                sc.noise_power
            );
        }
    }

    #[test]
    fn snapshots_bit_identical_for_fixed_seed() {
        let sc = test_scenario();
        let b1 = synth_snapshots(&sc, 50, 1234).unwrap();
        let b2 = synth_snapshots(&sc, 50, 1234).unwrap();
        for (x, y) in b1.samples.iter().zip(&b2.samples) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn sample_covariance_of_constant_block_is_outer_product() {
        let y = ula_steering(&geom(5), 30.0).unwrap();
        let block = SnapshotBlock { samples: vec![y.clone(); 7], seed: 0 };
        let r = sample_covariance(&block);
        let expect = HermitianMatrix::outer(&y);
        assert!((r.as_matrix() - expect.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn sample_covariance_noise_converges_to_identity() {
        let mut sc = test_scenario();
        sc.interferers.clear();
        sc.snr_db = f64::NEG_INFINITY;
        let block = synth_snapshots(&sc, 10_000, 5).unwrap();
        let r = sample_covariance(&block);
        let n = sc.geometry.n_sensors;
        let eye = DMatrix::<Complex64>::identity(n, n);
        let rel = (r.as_matrix() - &eye).norm() / eye.norm();
        assert!(rel < 0.05, "relative Frobenius error {rel}");
        assert!(r.is_psd(1e-10));
    }

    #[test]
    fn true_inc_no_interferers_is_identity() {
        let mut sc = test_scenario();
        sc.interferers.clear();
        let r = true_inc(&sc).unwrap();
        let eye = DMatrix::<Complex64>::identity(10, 10);
        assert!((r.as_matrix() - eye).norm() < 1e-12);
    }

    #[test]
    fn true_inc_single_interferer_spectrum() {
        let mut sc = test_scenario();
        sc.interferers = vec![Interferer { doa_deg: -5.0, inr_db: 30.0 }];
        let r = true_inc(&sc).unwrap();
        let ev = r.eigenvalues();
        let n = 10.0;
        // rank-one update of the identity: one eigenvalue at 1 + 1000 N, the rest at 1
        assert_abs_diff_eq!(ev[0], sc.noise_power * (1.0 + 1000.0 * n), epsilon = 1e-6);
        for lam in &ev[1..] {
            assert_abs_diff_eq!(*lam, sc.noise_power, epsilon = 1e-9);
        }
    }

    #[test]
    fn output_sinr_matched_filter_identity() {
        let a = ula_steering(&geom(10), 5.0).unwrap();
        let r = HermitianMatrix::identity(10);
        let sinr = output_sinr(&a, &a, 1.0, &r).unwrap();
        assert_abs_diff_eq!(sinr, 10.0 * 10f64.log10(), epsilon = 1e-10);
    }

    #[test]
    fn output_sinr_scale_invariant() {
        let sc = test_scenario();
        let a = distorted_true_steering(&sc, 3).unwrap();
        let r = true_inc(&sc).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..20 {
            let w = DVector::from_fn(10, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let base = output_sinr(&w, &a, 1.0, &r).unwrap();
            let c = Complex64::new(-2.3, 0.7);
            let scaled = output_sinr(&(w * c), &a, 1.0, &r).unwrap();
            assert_abs_diff_eq!(base, scaled, epsilon = 1e-10);
        }
    }

    #[test]
    fn output_sinr_bounded_by_optimal() {
        let sc = test_scenario();
        let a = distorted_true_steering(&sc, 3).unwrap();
        let r = true_inc(&sc).unwrap();
        let opt = optimal_sinr(&a, 1.0, &r).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..100 {
            let w = DVector::from_fn(10, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let sinr = output_sinr(&w, &a, 1.0, &r).unwrap();
            assert!(sinr <= opt + 1e-9, "sinr {sinr} exceeds optimum {opt}");
        }
    }

    #[test]
    fn optimal_sinr_closed_forms() {
        let a = ula_steering(&geom(10), 0.0).unwrap();
        let r = HermitianMatrix::identity(10);
        assert_abs_diff_eq!(
            optimal_sinr(&a, 2.0, &r).unwrap(),
            10.0 * (2.0 * 10.0f64).log10(),
            epsilon = 1e-10
        );
        // 2-sensor hand evaluation: R = diag(1,2), a = [1,1]: a^H R^{-1} a = 1.5
        let r2 = HermitianMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ])))
        .unwrap();
        let a2 = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_abs_diff_eq!(
            optimal_sinr(&a2, 1.0, &r2).unwrap(),
            10.0 * 1.5f64.log10(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_weight_is_an_error() {
        let a = ula_steering(&geom(4), 0.0).unwrap();
        let r = HermitianMatrix::identity(4);
        let w = DVector::zeros(4);
        assert!(output_sinr(&w, &a, 1.0, &r).is_err());
    }

    #[test]
    fn hermitian_constructor_rejects_asymmetry() {
        let mut m = DMatrix::<Complex64>::identity(3, 3);
        m[(0, 1)] = Complex64::new(0.5, 0.2);
        m[(1, 0)] = Complex64::new(0.5, 0.2); // should be the conjugate
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn scenario_validation() {
        let mut sc = test_scenario();
        assert!(sc.validate().unwrap().is_empty());
        sc.interferers.push(Interferer { doa_deg: 5.0, inr_db: 20.0 });
        assert_eq!(sc.validate().unwrap().len(), 1);
        sc.presumed_doa_deg = 20.0;
        assert!(sc.validate().is_err());
    }
}
