//! Empirical steering-vector moments over the angular sector and the
//! parameter records of every uncertainty-set pairing.
//!
//! Five parameter records exist:
//! - [`D1Params`]: Frobenius- or trace-bounded PSD support for the INC matrix
//!   plus a Frobenius similarity ball of radius `rho1` around the nominal `S0`.
//! - [`D1PrimeParams`]: two-sided spectral bracket around the diagonally
//!   loaded nominal `(1 +- rho1)(S0 + eps I)`.
//! - [`D2Params`]: first-moment ball of radius `gamma1` around `a0` and a
//!   second-moment cap `(1+gamma2) Sigma + a0 a0^H`, with a norm-shell or
//!   unbounded support set.
//! - [`D2PrimeParams`]: ellipsoidal first-moment constraint (shape `Q`,
//!   squared radius `gamma1`) and a Frobenius ball of radius `gamma2` on the
//!   centered second moment around `Sigmabar`.
//! - [`D2PPParams`]: same ellipsoid, with the centered second moment capped
//!   by `(1+gamma2) Sigmabar` instead.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array_model::{complex_vector_serde, ula_steering, ArrayGeometry, ArrayScenario};
use crate::array_model::{ComplexVector, HermitianMatrix};

#[derive(Debug, Error)]
pub enum MomentsError {
    #[error("degenerate sector with zero loading yields a singular covariance")]
    SingularCovariance,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Array(#[from] crate::array_model::ArrayError),
}

/// Support-set choice for the INC-matrix distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum D1Support {
    /// `{ R >= 0, ||R||_F <= rho2 }`
    FrobeniusBall,
    /// `{ R >= 0, tr(R) <= rho2 }`
    TraceBall,
}

/// Support-set choice for the steering-vector distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Z2Support {
    /// `(1-Delta) N <= ||a||^2 <= (1+Delta) N`
    NormShell,
    /// All of C^N; drops the S-procedure multipliers.
    Unbounded,
}

/// INC-matrix uncertainty: similarity ball around `s0` plus bounded support.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct D1Params {
    pub rho1: f64,
    pub rho2: f64,
    pub s0: HermitianMatrix,
    pub support_kind: D1Support,
}

impl D1Params {
    pub fn validate(&self) -> Result<(), MomentsError> {
        if self.rho1 < 0.0 || self.rho2 <= 0.0 {
            return Err(MomentsError::InvalidParameter(
                "need rho1 >= 0 and rho2 > 0".into(),
            ));
        }
        if !self.s0.is_psd(1e-8 * self.s0.frobenius_norm().max(1.0)) {
            return Err(MomentsError::InvalidParameter("S0 must be PSD".into()));
        }
        Ok(())
    }
}

/// INC-matrix uncertainty with a two-sided bracket around the diagonally
/// loaded nominal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct D1PrimeParams {
    pub rho1: f64,
    pub eps: f64,
    pub s0: HermitianMatrix,
    pub rho2: f64,
    pub support_kind: D1Support,
}

impl D1PrimeParams {
    pub fn validate(&self) -> Result<(), MomentsError> {
        if !(0.0..1.0).contains(&self.rho1) {
            return Err(MomentsError::InvalidParameter("need rho1 in [0, 1)".into()));
        }
        if self.eps < 0.0 || self.rho2 <= 0.0 {
            return Err(MomentsError::InvalidParameter(
                "need eps >= 0 and rho2 > 0".into(),
            ));
        }
        let loaded = self.s0.add(&HermitianMatrix::scaled_identity(self.s0.dim(), self.eps));
        if loaded.min_eigenvalue() <= 0.0 {
            return Err(MomentsError::InvalidParameter(
                "S0 + eps I must be positive definite".into(),
            ));
        }
        Ok(())
    }
}

/// Steering-vector uncertainty with mean ball and second-moment cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct D2Params {
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(with = "complex_vector_serde")]
    pub a0: ComplexVector,
    pub sigma: HermitianMatrix,
    pub delta: f64,
    pub support_kind: Z2Support,
}

impl D2Params {
    pub fn validate(&self) -> Result<(), MomentsError> {
        if self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(MomentsError::InvalidParameter("gammas must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.delta) || self.delta == 0.0 {
            return Err(MomentsError::InvalidParameter("need Delta in (0, 1)".into()));
        }
        if self.sigma.min_eigenvalue() <= 0.0 {
            return Err(MomentsError::InvalidParameter(
                "Sigma must be positive definite".into(),
            ));
        }
        if self.sigma.dim() != self.a0.len() {
            return Err(MomentsError::InvalidParameter("a0/Sigma dimension mismatch".into()));
        }
        Ok(())
    }
}

/// Steering-vector uncertainty with an ellipsoidal mean constraint and a
/// Frobenius ball on the centered second moment. `gamma1` is the squared
/// ellipsoid radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct D2PrimeParams {
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(with = "complex_vector_serde")]
    pub abar: ComplexVector,
    pub sigmabar: HermitianMatrix,
    pub q: HermitianMatrix,
    pub delta: f64,
}

impl D2PrimeParams {
    pub fn validate(&self) -> Result<(), MomentsError> {
        if self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(MomentsError::InvalidParameter("gammas must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.delta) || self.delta == 0.0 {
            return Err(MomentsError::InvalidParameter("need Delta in (0, 1)".into()));
        }
        if self.q.min_eigenvalue() <= 0.0 {
            return Err(MomentsError::InvalidParameter("Q must be positive definite".into()));
        }
        Ok(())
    }
}

/// Same shape as [`D2PrimeParams`] but the centered second moment is capped
/// by `(1+gamma2) Sigmabar`, which must be positive definite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct D2PPParams {
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(with = "complex_vector_serde")]
    pub abar: ComplexVector,
    pub sigmabar: HermitianMatrix,
    pub q: HermitianMatrix,
    pub delta: f64,
}

impl D2PPParams {
    pub fn validate(&self) -> Result<(), MomentsError> {
        if self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(MomentsError::InvalidParameter("gammas must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.delta) || self.delta == 0.0 {
            return Err(MomentsError::InvalidParameter("need Delta in (0, 1)".into()));
        }
        if self.q.min_eigenvalue() <= 0.0 {
            return Err(MomentsError::InvalidParameter("Q must be positive definite".into()));
        }
        if self.sigmabar.min_eigenvalue() <= 0.0 {
            return Err(MomentsError::InvalidParameter(
                "Sigmabar must be positive definite".into(),
            ));
        }
        Ok(())
    }
}

/// Number of sector samples used when the caller does not override it.
pub const DEFAULT_SECTOR_SAMPLES: usize = 100;

/// Default covariance loading, relative to the average eigenvalue.
pub fn default_covariance_loading(sigma_unloaded: &HermitianMatrix) -> f64 {
    1e-6 * sigma_unloaded.trace() / sigma_unloaded.dim() as f64
}

/// Empirical mean and covariance of the steering vector over the sector:
/// `a0 = (1/L) sum d(theta_l)`, `Sigma = (1/L) sum (d - a0)(d - a0)^H`, with
/// `theta_l` drawn uniformly from the sector. `loading * I` is added so the
/// returned covariance is positive definite whenever `loading > 0`.
pub fn sector_moments(
    geometry: &ArrayGeometry,
    sector_deg: (f64, f64),
    l_samples: usize,
    seed: u64,
    loading: f64,
) -> Result<(ComplexVector, HermitianMatrix), MomentsError> {
    if l_samples < 2 {
        return Err(MomentsError::InvalidParameter("need L >= 2 sector samples".into()));
    }
    if loading < 0.0 {
        return Err(MomentsError::InvalidParameter("loading must be >= 0".into()));
    }
    let (lo, hi) = sector_deg;
    if lo > hi {
        return Err(MomentsError::InvalidParameter(format!("empty sector [{lo}, {hi}]")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = geometry.n_sensors;
    let mut steerings = Vec::with_capacity(l_samples);
    for _ in 0..l_samples {
        let theta = if hi > lo { rng.gen_range(lo..hi) } else { lo };
        steerings.push(ula_steering(geometry, theta)?);
    }
    let mut a0: ComplexVector = DVector::zeros(n);
    for d in &steerings {
        a0 += d;
    }
    a0 /= Complex64::new(l_samples as f64, 0.0);

    let mut cov = DMatrix::<Complex64>::zeros(n, n);
    for d in &steerings {
        let centered = d - &a0;
        cov += &centered * centered.adjoint();
    }
    cov /= Complex64::new(l_samples as f64, 0.0);
    let mut sigma = HermitianMatrix::symmetrize(cov);
    if loading > 0.0 {
        sigma = sigma.add(&HermitianMatrix::scaled_identity(n, loading));
    } else if sigma.min_eigenvalue() < 1e-14 {
        return Err(MomentsError::SingularCovariance);
    }
    Ok((a0, sigma))
}

/// Simulation-default radii for the main `(D1, D2)` pairing:
/// `rho1 = 0.001 ||S0||_F`, `rho2 = 1.1 tr(S0)`, `gamma1 = 0.01 ||a0||`,
/// `gamma2 = 0.1`, `Delta = 0.1`.
pub fn default_params(
    scenario: &ArrayScenario,
    s0: &HermitianMatrix,
    a0: &ComplexVector,
    sigma: &HermitianMatrix,
) -> (D1Params, D2Params) {
    debug_assert_eq!(s0.dim(), scenario.geometry.n_sensors);
    debug_assert_eq!(a0.len(), scenario.geometry.n_sensors);
    let d1 = D1Params {
        rho1: 0.001 * s0.frobenius_norm(),
        rho2: 1.1 * s0.trace(),
        s0: s0.clone(),
        support_kind: D1Support::FrobeniusBall,
    };
    let d2 = D2Params {
        gamma1: 0.01 * a0.norm(),
        gamma2: 0.1,
        a0: a0.clone(),
        sigma: sigma.clone(),
        delta: 0.1,
        support_kind: Z2Support::NormShell,
    };
    (d1, d2)
}

/// Random ellipsoid shape `Q = U U^H + 1e-6 I` from a seeded standard complex
/// Gaussian `U`; the loading guards invertibility.
pub fn random_ellipsoid_shape(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let u = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im) / 2f64.sqrt()
    });
    let q = &u * u.adjoint();
    HermitianMatrix::symmetrize(q).add(&HermitianMatrix::scaled_identity(n, 1e-6))
}

/// Simulation defaults for `D2'`: `gamma1 = 0.01 ||abar||`,
/// `gamma2 = 0.01 ||Sigmabar||_F`.
pub fn default_d2prime_params(
    abar: &ComplexVector,
    sigmabar: &HermitianMatrix,
    q: HermitianMatrix,
    delta: f64,
) -> D2PrimeParams {
    D2PrimeParams {
        gamma1: 0.01 * abar.norm(),
        gamma2: 0.01 * sigmabar.frobenius_norm(),
        abar: abar.clone(),
        sigmabar: sigmabar.clone(),
        q,
        delta,
    }
}

/// Simulation defaults for `D2''`: `gamma1 = 0.01 ||abar||`, `gamma2 = 0.1`.
pub fn default_d2pp_params(
    abar: &ComplexVector,
    sigmabar: &HermitianMatrix,
    q: HermitianMatrix,
    delta: f64,
) -> D2PPParams {
    D2PPParams {
        gamma1: 0.01 * abar.norm(),
        gamma2: 0.1,
        abar: abar.clone(),
        sigmabar: sigmabar.clone(),
        q,
        delta,
    }
}

/// Simulation defaults for `D1'`: `eps = 0.01 lambda_max(R_hat)`, `rho1 = 0.1`.
/// `rho2` keeps the same trace-based default as `D1`.
pub fn default_d1prime_params(s0: &HermitianMatrix, rhat: &HermitianMatrix) -> D1PrimeParams {
    D1PrimeParams {
        rho1: 0.1,
        eps: 0.01 * rhat.max_eigenvalue(),
        s0: s0.clone(),
        rho2: 1.1 * s0.trace(),
        support_kind: D1Support::FrobeniusBall,
    }
}
