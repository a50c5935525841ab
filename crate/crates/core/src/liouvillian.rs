//! Lindblad generator on column-stacked density matrices.
//!
//! `vec(ρ)[i + j·dim] = ρ[i, j]`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilator_a, annihilator_b, sigma_minus, BasisState, HilbertSpace, QOperator,
};
use crate::model::{hamiltonian, SystemParams};
use crate::sparse::CsrMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense density matrix on a truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::SpaceMismatch(
                space.to_string(),
                format!("{}x{} matrix", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(Self { space, matrix })
    }

    pub fn pure(space: HilbertSpace, state: BasisState) -> Result<Self> {
        let i = space.index(state)?;
        let mut m = DMatrix::zeros(space.dim(), space.dim());
        m[(i, i)] = ONE;
        Ok(Self { space, matrix: m })
    }

    pub fn vacuum(space: HilbertSpace) -> Self {
        Self::pure(space, BasisState::g(0, 0)).unwrap()
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        }
    }

    /// Random full-rank state `AA†/Tr(AA†)` with Gaussian-ish entries.
    pub fn random<R: Rng>(space: HilbertSpace, rng: &mut R) -> Self {
        let d = space.dim();
        let a = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let m = &a * a.adjoint();
        let tr = m.trace();
        Self {
            space,
            matrix: m / tr,
        }
    }

    pub fn from_vec(space: HilbertSpace, v: &[Complex64]) -> Result<Self> {
        let d = space.dim();
        if v.len() != d * d {
            return Err(Error::SpaceMismatch(
                space.to_string(),
                format!("vector of length {}", v.len()),
            ));
        }
        Ok(Self {
            space,
            matrix: DMatrix::from_column_slice(d, d, v),
        })
    }

    pub fn to_vec(&self) -> Vec<Complex64> {
        self.matrix.as_slice().to_vec()
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest entry of `ρ − ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(hermitian_part(&self.matrix))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `(ρ + ρ†)/2` rescaled to unit trace; returns the state and the
    /// Frobenius norm of the correction applied.
    pub fn hermitized(&self) -> (Self, f64) {
        let h = hermitian_part(&self.matrix);
        let tr = h.trace().re;
        let out = h / Complex64::new(tr, 0.0);
        let correction = (&out - &self.matrix).norm();
        (
            Self {
                space: self.space,
                matrix: out,
            },
            correction,
        )
    }

    /// `½ Σ|λ(ρ − σ)|`
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(
                self.space.to_string(),
                other.space.to_string(),
            ));
        }
        let diff = hermitian_part(&(&self.matrix - &other.matrix));
        Ok(0.5
            * SymmetricEigen::new(diff)
                .eigenvalues
                .iter()
                .map(|x| x.abs())
                .sum::<f64>())
    }

    /// Checks the state invariants: Hermitian and unit trace to `1e-10`,
    /// smallest eigenvalue above `-1e-8`.
    pub fn check(&self) -> std::result::Result<(), String> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(format!("not Hermitian (max |ρ−ρ†| = {herm:e})"));
        }
        let tr = (self.trace() - ONE).norm();
        if tr > 1e-10 {
            return Err(format!("trace off by {tr:e}"));
        }
        let lmin = self.min_eigenvalue();
        if lmin < -1e-8 {
            return Err(format!("negative eigenvalue {lmin:e}"));
        }
        Ok(())
    }
}

pub(crate) fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Linear map on `vec(ρ)`, shaped `dim² × dim²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    space: HilbertSpace,
    matrix: CsrMatrix,
}

impl Superoperator {
    pub fn from_matrix(space: HilbertSpace, matrix: CsrMatrix) -> Self {
        let n = space.dim() * space.dim();
        assert_eq!((matrix.nrows(), matrix.ncols()), (n, n));
        Self { space, matrix }
    }

    pub fn zero(space: HilbertSpace) -> Self {
        let n = space.dim() * space.dim();
        Self::from_matrix(space, CsrMatrix::zeros(n, n))
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(
                self.space.to_string(),
                other.space.to_string(),
            ));
        }
        Ok(Self::from_matrix(
            self.space,
            self.matrix.add(&other.matrix),
        ))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_matrix(self.space, self.matrix.scale(Complex64::new(c, 0.0)))
    }

    /// `dρ/dt = L ρ`, devectorized.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
        self.apply_matrix(rho.space(), rho.matrix())
    }

    /// Same as [`apply`](Self::apply) for an arbitrary (not necessarily
    /// physical) matrix.
    pub fn apply_matrix(
        &self,
        space: HilbertSpace,
        m: &DMatrix<Complex64>,
    ) -> Result<DMatrix<Complex64>> {
        if space != self.space {
            return Err(Error::SpaceMismatch(
                self.space.to_string(),
                space.to_string(),
            ));
        }
        let d = self.space.dim();
        let y = self.matrix.matvec(m.as_slice());
        Ok(DMatrix::from_column_slice(d, d, &y))
    }

    /// `⟨⟨I| L` as a row vector: the trace of `L` applied to each basis matrix.
    pub fn trace_row(&self) -> Vec<Complex64> {
        let d = self.space.dim();
        let mut out = vec![ZERO; d * d];
        for (r, c, v) in self.matrix.triplets() {
            if r % (d + 1) == 0 {
                out[c] += v;
            }
        }
        out
    }

    /// Largest entry of `⟨⟨I| L`; zero for a trace-preserving generator.
    pub fn trace_preservation_error(&self) -> f64 {
        self.trace_row()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.matrix.nrows();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, v) in self.matrix.triplets() {
            m[(r, c)] = v;
        }
        m
    }
}

/// `ρ ↦ Aρ`
pub fn left(op: &QOperator) -> Superoperator {
    let d = op.space().dim();
    Superoperator::from_matrix(op.space(), CsrMatrix::identity(d).kron(op.matrix()))
}

/// `ρ ↦ ρB`
pub fn right(op: &QOperator) -> Superoperator {
    let d = op.space().dim();
    Superoperator::from_matrix(
        op.space(),
        op.matrix().transpose().kron(&CsrMatrix::identity(d)),
    )
}

/// `ρ ↦ −i[H, ρ]`
pub fn commutator(h: &QOperator) -> Superoperator {
    let l = left(h).matrix().sub(right(h).matrix());
    Superoperator::from_matrix(h.space(), l.scale(Complex64::new(0.0, -1.0)))
}

/// `D[c]ρ = cρc† − ½(c†cρ + ρc†c)`
pub fn dissipator(c: &QOperator) -> Superoperator {
    let d = c.space().dim();
    let cdc = c.dagger().mul(c).expect("same space");
    let jump = c.matrix().conj().kron(c.matrix());
    let anti = CsrMatrix::identity(d)
        .kron(cdc.matrix())
        .add(&cdc.matrix().transpose().kron(&CsrMatrix::identity(d)));
    Superoperator::from_matrix(c.space(), jump.sub(&anti.scale(Complex64::new(0.5, 0.0))))
}

/// Full thermal Lindblad generator:
/// `−i[H,·] + Σ_c rate_c (n̄+1) D[c] + rate_c n̄ D[c†]` over `c ∈ {a, σ, b}`.
pub fn liouvillian(params: &SystemParams, space: HilbertSpace) -> Superoperator {
    let h = hamiltonian(params, space);
    let channels = [
        (annihilator_a(space), params.kappa_a),
        (sigma_minus(space), params.gamma),
        (annihilator_b(space), params.kappa_b),
    ];
    let mut triplets: Vec<_> = commutator(&h).matrix().triplets().collect();
    for (c, rate) in channels {
        let down = rate * (params.n_th + 1.0);
        let up = rate * params.n_th;
        if down != 0.0 {
            let s = Complex64::new(down, 0.0);
            triplets.extend(
                dissipator(&c)
                    .matrix()
                    .triplets()
                    .map(|(r, k, v)| (r, k, v * s)),
            );
        }
        if up != 0.0 {
            let s = Complex64::new(up, 0.0);
            triplets.extend(
                dissipator(&c.dagger())
                    .matrix()
                    .triplets()
                    .map(|(r, k, v)| (r, k, v * s)),
            );
        }
    }
    let n = space.dim() * space.dim();
    Superoperator::from_matrix(space, CsrMatrix::from_triplets(n, n, triplets))
}
