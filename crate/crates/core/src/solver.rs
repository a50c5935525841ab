//! Steady states of a Lindblad generator.
//!
//! The direct path replaces one diagonal-element row of `L` with the trace
//! functional and factorizes the result with a sparse LU. The evolved path
//! integrates `dρ/dt = Lρ` with an adaptive Dormand–Prince 5(4) scheme and
//! serves as an independent check on the direct one.

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::BasisState;
use crate::liouvillian::{DensityMatrix, Superoperator};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    Evolved,
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// Operator norm of `Lρ` for the returned state.
    pub residual: f64,
    pub method: Method,
    /// `residual` below the tolerance the solve was run with.
    pub converged: bool,
    /// Frobenius norm of the Hermitize-and-renormalize correction.
    pub correction: f64,
    /// Integration time reached (zero for direct solves).
    pub t: f64,
    /// Accepted integrator steps (zero for direct solves).
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectOptions {
    pub tol: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self { tol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Stop once the Frobenius norm of `dρ/dt` drops below this.
    pub tol: f64,
    pub t_max: f64,
    /// Upper bounds; tightened when `‖L‖∞·rtol` would approach `tol`.
    pub rtol: f64,
    pub atol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            t_max: 1e4,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

/// Largest singular value.
pub(crate) fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn finish(
    l: &Superoperator,
    raw: DensityMatrix,
    method: Method,
    tol: f64,
    t: f64,
    steps: usize,
) -> Result<SteadyStateResult> {
    let (rho, correction) = raw.hermitized();
    let residual = operator_norm(&l.apply(&rho)?);
    Ok(SteadyStateResult {
        rho,
        residual,
        method,
        converged: residual < tol,
        correction,
        t,
        steps,
    })
}

/// Direct solve with default options.
pub fn steady_state_direct(l: &Superoperator) -> Result<SteadyStateResult> {
    steady_state_direct_with(l, DirectOptions::default())
}

pub fn steady_state_direct_with(
    l: &Superoperator,
    opts: DirectOptions,
) -> Result<SteadyStateResult> {
    let space = l.space();
    let d = space.dim();
    let n = d * d;
    let k = space.index(BasisState::g(0, 0))?;
    let row = k * (d + 1);

    let mut trip: Vec<Triplet<usize, usize, Complex64>> = l
        .matrix()
        .triplets()
        .filter(|&(r, _, _)| r != row)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    trip.extend((0..d).map(|i| Triplet::new(row, i * (d + 1), ONE)));

    let a = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &trip)
        .map_err(|_| Error::Singular)?;
    let lu = a.sp_lu().map_err(|_| Error::Singular)?;
    let rhs = faer::Mat::<Complex64>::from_fn(n, 1, |i, _| if i == row { ONE } else { ZERO });
    let x = lu.solve(&rhs);
    let v: Vec<Complex64> = (0..n).map(|i| x[(i, 0)]).collect();
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }

    // a rank-deficient factorization shows up as a solution that does not
    // satisfy the modified system
    let mut lin = l.matrix().matvec(&v);
    lin[row] = (0..d).map(|i| v[i * (d + 1)]).sum::<Complex64>() - ONE;
    let lin_res = lin.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = v.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if lin_res > 1e-6 * scale {
        return Err(Error::Singular);
    }

    let raw = DensityMatrix::from_vec(space, &v)?;
    finish(l, raw, Method::Direct, opts.tol, 0.0, 0)
}

// Dormand–Prince 5(4) tableau; L is time-independent so the nodes drop out
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Required ratio of `tol` to `‖L‖∞·rtol`.
const STIFF_MARGIN: f64 = 100.0;

fn frobenius(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Integrate from `rho0` until `‖dρ/dt‖_F < tol` or `t_max` is reached.
pub fn steady_state_evolved(
    l: &Superoperator,
    rho0: &DensityMatrix,
    tol: f64,
    t_max: f64,
) -> Result<SteadyStateResult> {
    steady_state_evolved_with(
        l,
        rho0,
        EvolveOptions {
            tol,
            t_max,
            ..EvolveOptions::default()
        },
    )
}

pub fn steady_state_evolved_with(
    l: &Superoperator,
    rho0: &DensityMatrix,
    opts: EvolveOptions,
) -> Result<SteadyStateResult> {
    if rho0.space() != l.space() {
        return Err(Error::SpaceMismatch(
            l.space().to_string(),
            rho0.space().to_string(),
        ));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParam {
            name: "tol".into(),
            reason: format!("must be > 0, got {}", opts.tol),
        });
    }
    let space = l.space();
    let m = l.matrix();
    let n = m.nrows();

    let mut y = rho0.to_vec();
    let mut k: Vec<Vec<Complex64>> = vec![vec![ZERO; n]; 7];
    m.matvec_into(&y, &mut k[0]);
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut deriv = frobenius(&k[0]);

    let mut h = {
        let scale = m.max_abs().max(1.0);
        (0.01 / scale).min(opts.t_max)
    };
    // stiff components oscillate at the local error level, which puts a
    // floor of roughly ‖L‖·rtol under ‖dρ/dt‖; keep that floor below tol
    let l_norm = (0..n)
        .map(|r| m.row(r).map(|(_, v)| v.norm()).sum::<f64>())
        .fold(1.0, f64::max);
    let rtol = opts.rtol.min(opts.tol / (STIFF_MARGIN * l_norm));
    let atol = opts.atol.min(rtol * 1e-2);
    let mut tmp = vec![ZERO; n];
    let mut y_new = vec![ZERO; n];

    while deriv >= opts.tol {
        if t >= opts.t_max {
            return Err(Error::NotConverged { t, residual: deriv });
        }
        h = h.min(opts.t_max - t);
        for (s, a_row) in A.iter().enumerate().skip(1) {
            for i in 0..n {
                let mut acc = ZERO;
                for (kj, &a) in k.iter().zip(a_row).take(s) {
                    if a != 0.0 {
                        acc += kj[i] * (a * h);
                    }
                }
                tmp[i] = y[i] + acc;
            }
            let (_, rest) = k.split_at_mut(s);
            m.matvec_into(&tmp, &mut rest[0]);
        }
        // stage 6 input is the fifth-order solution
        y_new.copy_from_slice(&tmp);

        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = ZERO;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * (E[j] * h);
                }
            }
            let sc = atol + rtol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            steps += 1;
            std::mem::swap(&mut y, &mut y_new);
            // first-same-as-last
            let last = k.pop().unwrap();
            k.insert(0, last);
            deriv = frobenius(&k[0]);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }

    let raw = DensityMatrix::from_vec(space, &y)?;
    let mut r = finish(l, raw, Method::Evolved, opts.tol, t, steps)?;
    // the stopping rule already bounds ‖dρ/dt‖_F, which dominates the operator norm
    r.converged = true;
    Ok(r)
}
