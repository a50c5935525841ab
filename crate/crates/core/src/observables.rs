//! Photon statistics read off a steady state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilator_a, annihilator_b, BasisState, QOperator};
use crate::liouvillian::DensityMatrix;

/// Below this mean photon number `g²(0)` is reported as undefined.
pub const MEAN_PHOTON_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

fn ladder(rho: &DensityMatrix, mode: Mode) -> QOperator {
    match mode {
        Mode::A => annihilator_a(rho.space()),
        Mode::B => annihilator_b(rho.space()),
    }
}

fn real_expectation(op: &QOperator, rho: &DensityMatrix) -> Result<f64> {
    let z = op.expectation(rho)?;
    debug_assert!(
        z.im.abs() < 1e-10 * (1.0 + z.re.abs()),
        "expectation of a Hermitian operator has imaginary part {}",
        z.im
    );
    Ok(z.re)
}

/// `Tr(ρ c†c)`
pub fn mean_photon(rho: &DensityMatrix, mode: Mode) -> Result<f64> {
    let c = ladder(rho, mode);
    real_expectation(&c.dagger().mul(&c)?, rho)
}

/// `Tr(ρ c†c†cc) / Tr(ρ c†c)²`
pub fn g2_zero(rho: &DensityMatrix, mode: Mode) -> Result<f64> {
    g2_zero_with_floor(rho, mode, MEAN_PHOTON_FLOOR)
}

pub fn g2_zero_with_floor(rho: &DensityMatrix, mode: Mode, floor: f64) -> Result<f64> {
    let c = ladder(rho, mode);
    let cd = c.dagger();
    let n = real_expectation(&cd.mul(&c)?, rho)?;
    if n <= floor {
        return Err(Error::UndefinedCorrelation { mean: n, floor });
    }
    let cdcd_cc = cd.mul(&cd)?.mul(&c)?.mul(&c)?;
    let num = real_expectation(&cdcd_cc, rho)?;
    Ok(num / (n * n))
}

/// Diagonal element of `ρ` on a basis state.
pub fn population(rho: &DensityMatrix, state: BasisState) -> Result<f64> {
    let i = rho.space().index(state)?;
    Ok(rho.matrix()[(i, i)].re)
}

/// Sub-Poissonian statistics.
pub fn is_antibunched(g2: f64) -> bool {
    g2 < 1.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    /// `None` when mode a is below the photon-number floor.
    pub g2_a: Option<f64>,
    pub mean_n_a: f64,
    pub mean_n_b: f64,
    pub p_g10: f64,
    pub p_e00: f64,
    pub p_g02: f64,
}

impl ObservableSet {
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        let g2_a = match g2_zero(rho, Mode::A) {
            Ok(v) => Some(v),
            Err(Error::UndefinedCorrelation { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            g2_a,
            mean_n_a: mean_photon(rho, Mode::A)?,
            mean_n_b: mean_photon(rho, Mode::B)?,
            p_g10: population(rho, BasisState::g(1, 0))?,
            p_e00: population(rho, BasisState::e(0, 0))?,
            p_g02: population(rho, BasisState::g(0, 2))?,
        })
    }
}
