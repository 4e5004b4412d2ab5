//! Modal truncation of `u_tt - u_xx + G u_t = 0` on `(0, pi)` with Dirichlet
//! conditions and `G = (-d^2/dx^2)^-1`.
//!
//! Mode `k` has stiffness `k^2` and damping `1/k^2`; the control operator is
//! `B = [0; G^{1/2}] = [0; diag(1/k)]` and `C = B^*`. States are ordered as all
//! positions followed by all velocities.

use serde::{Deserialize, Serialize};

use crate::analysis::{refine_grid, sweep, HautusReport};
use crate::error::{Error, Result};
use crate::lti::StateSpaceSystem;
use crate::numerics::{eigenvalues, min_singular_value, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModalCoordinates {
    /// `(k u_k, u_k')`: the undamped part is skew-adjoint and the Euclidean
    /// norm is the energy norm.
    #[default]
    Energy,
    /// `(u_k, u_k')`.
    Displacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DampingSign {
    /// `A_0 - B B^*`.
    #[default]
    Dissipative,
    /// `A_0 + B B^*`.
    AntiDissipative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveConfig {
    pub n_modes: usize,
    #[serde(default)]
    pub coordinates: ModalCoordinates,
    #[serde(default)]
    pub damping: DampingSign,
}

impl WaveConfig {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("at least one mode is required".into()));
        }
        Ok(Self {
            n_modes,
            coordinates: ModalCoordinates::default(),
            damping: DampingSign::default(),
        })
    }

    pub fn with_coordinates(mut self, coordinates: ModalCoordinates) -> Self {
        self.coordinates = coordinates;
        self
    }

    pub fn with_damping(mut self, damping: DampingSign) -> Self {
        self.damping = damping;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            Err(Error::InvalidArgument("at least one mode is required".into()))
        } else {
            Ok(())
        }
    }

    fn damping_factor(&self) -> f64 {
        match self.damping {
            DampingSign::Dissipative => -1.0,
            DampingSign::AntiDissipative => 1.0,
        }
    }

    /// The 2x2 generator of mode `k`.
    pub fn mode_block(&self, k: usize) -> ComplexMatrix {
        let kf = k as f64;
        let damp = self.damping_factor() / (kf * kf);
        let rows: [[f64; 2]; 2] = match self.coordinates {
            ModalCoordinates::Energy => [[0.0, kf], [-kf, damp]],
            ModalCoordinates::Displacement => [[0.0, 1.0], [-kf * kf, damp]],
        };
        ComplexMatrix::from_real_rows(&[&rows[0], &rows[1]]).expect("finite")
    }
}

pub fn build_wave_system(config: &WaveConfig) -> Result<StateSpaceSystem> {
    config.validate()?;
    let n = config.n_modes;
    let mut a = nalgebra::DMatrix::<C64>::zeros(2 * n, 2 * n);
    let mut b = nalgebra::DMatrix::<C64>::zeros(2 * n, n);
    for k in 1..=n {
        let block = config.mode_block(k);
        let (p, v) = (k - 1, n + k - 1);
        a[(p, p)] = block[(0, 0)];
        a[(p, v)] = block[(0, 1)];
        a[(v, p)] = block[(1, 0)];
        a[(v, v)] = block[(1, 1)];
        b[(v, k - 1)] = C64::new(1.0 / k as f64, 0.0);
    }
    StateSpaceSystem::collocated(
        ComplexMatrix::try_from_dmatrix(a)?,
        ComplexMatrix::try_from_dmatrix(b)?,
    )
}

/// Margin of `|(w^2 - A_0) z|^2 + |w G^{1/2} z|^2 >= d |w z|^2` over the grid,
/// with `A_0 = diag(k^2)`; the grid is refined at `w = k`.
pub fn wave_margin_scan(config: &WaveConfig, omega_grid: &[f64]) -> Result<HautusReport> {
    config.validate()?;
    if omega_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if omega_grid.iter().any(|w| !w.is_finite() || *w == 0.0) {
        return Err(Error::InvalidGrid("frequencies must be finite and non-zero".into()));
    }
    let n = config.n_modes;
    let modes: Vec<C64> = (1..=n).map(|k| C64::new(0.0, k as f64)).collect();
    let grid = refine_grid(omega_grid, &modes);
    let mut report = sweep(grid, |w| {
        let top: Vec<C64> = (1..=n).map(|k| C64::new(w * w - (k * k) as f64, 0.0)).collect();
        let bottom: Vec<C64> = (1..=n).map(|k| C64::new(w / k as f64, 0.0)).collect();
        let stacked = ComplexMatrix::vstack(&[
            &ComplexMatrix::from_diagonal(&top)?,
            &ComplexMatrix::from_diagonal(&bottom)?,
        ])?;
        Ok(min_singular_value(&stacked).powi(2) / (w * w))
    })?;
    let mut sorted = omega_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let step = sorted.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
    report.near_eigenfrequency = Some(
        (1..=n).any(|k| (report.argmin_freq.abs() - k as f64).abs() <= step.max(1e-12)),
    );
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDecay {
    pub k: usize,
    pub eigenvalues: [C64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub modes: Vec<ModeDecay>,
    /// Largest real part over all modes.
    pub spectral_abscissa: f64,
}

pub fn decay_report(config: &WaveConfig) -> Result<DecayReport> {
    config.validate()?;
    let mut modes = Vec::with_capacity(config.n_modes);
    let mut abscissa = f64::NEG_INFINITY;
    for k in 1..=config.n_modes {
        let mut ev = eigenvalues(&config.mode_block(k))?;
        ev.sort_by(|x, y| x.im.total_cmp(&y.im));
        abscissa = ev.iter().map(|z| z.re).fold(abscissa, f64::max);
        modes.push(ModeDecay {
            k,
            eigenvalues: [ev[0], ev[1]],
        });
    }
    Ok(DecayReport {
        modes,
        spectral_abscissa: abscissa,
    })
}
