//! Truncated Hilbert space of a two-level atom and two bosonic modes, and
//! the ladder operators that act on it.
//!
//! States are indexed atom-major, then mode a, then mode b:
//! `index = s·na·nb + m·nb + n` with `s = 0` for `|g⟩` and `s = 1` for `|e⟩`.
//! Every vectorization and CSV dump in the crate uses this ordering.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liouvillian::DensityMatrix;
use crate::sparse::CsrMatrix;

pub const ATOM_DIM: usize = 2;
pub const MIN_NA_DIM: usize = 2;
/// Mode b has to hold two photons for the down-conversion term.
pub const MIN_NB_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    na_dim: usize,
    nb_dim: usize,
}

impl HilbertSpace {
    pub fn new(na_dim: usize, nb_dim: usize) -> Result<Self> {
        if na_dim < MIN_NA_DIM || nb_dim < MIN_NB_DIM {
            return Err(Error::InvalidTruncation {
                na_dim,
                nb_dim,
                min_a: MIN_NA_DIM,
                min_b: MIN_NB_DIM,
            });
        }
        Ok(Self { na_dim, nb_dim })
    }

    pub fn atom_dim(&self) -> usize {
        ATOM_DIM
    }

    pub fn na_dim(&self) -> usize {
        self.na_dim
    }

    pub fn nb_dim(&self) -> usize {
        self.nb_dim
    }

    pub fn dim(&self) -> usize {
        ATOM_DIM * self.na_dim * self.nb_dim
    }

    pub fn contains(&self, state: BasisState) -> bool {
        state.m < self.na_dim && state.n < self.nb_dim
    }

    pub fn index(&self, state: BasisState) -> Result<usize> {
        if !self.contains(state) {
            return Err(Error::StateOutOfRange(state));
        }
        Ok(state.atom.index() * self.na_dim * self.nb_dim + state.m * self.nb_dim + state.n)
    }

    pub fn state(&self, index: usize) -> Option<BasisState> {
        if index >= self.dim() {
            return None;
        }
        let per_atom = self.na_dim * self.nb_dim;
        let atom = if index / per_atom == 0 {
            Atom::G
        } else {
            Atom::E
        };
        let rest = index % per_atom;
        Some(BasisState::new(
            atom,
            rest / self.nb_dim,
            rest % self.nb_dim,
        ))
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(|i| self.state(i).unwrap())
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", ATOM_DIM, self.na_dim, self.nb_dim)
    }
}

/// `make_space` in function form.
pub fn make_space(na_dim: usize, nb_dim: usize) -> Result<HilbertSpace> {
    HilbertSpace::new(na_dim, nb_dim)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    G,
    E,
}

impl Atom {
    fn index(self) -> usize {
        match self {
            Atom::G => 0,
            Atom::E => 1,
        }
    }
}

/// `|atom, m, n⟩` with `m` photons in mode a and `n` in mode b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub atom: Atom,
    pub m: usize,
    pub n: usize,
}

impl BasisState {
    pub const fn new(atom: Atom, m: usize, n: usize) -> Self {
        Self { atom, m, n }
    }

    pub const fn g(m: usize, n: usize) -> Self {
        Self::new(Atom::G, m, n)
    }

    pub const fn e(m: usize, n: usize) -> Self {
        Self::new(Atom::E, m, n)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.atom {
            Atom::G => 'g',
            Atom::E => 'e',
        };
        write!(f, "|{},{},{}⟩", s, self.m, self.n)
    }
}

/// Sparse operator tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct QOperator {
    space: HilbertSpace,
    matrix: CsrMatrix,
}

impl QOperator {
    pub fn from_matrix(space: HilbertSpace, matrix: CsrMatrix) -> Self {
        assert_eq!(matrix.nrows(), space.dim());
        assert_eq!(matrix.ncols(), space.dim());
        Self { space, matrix }
    }

    pub fn zero(space: HilbertSpace) -> Self {
        Self::from_matrix(space, CsrMatrix::zeros(space.dim(), space.dim()))
    }

    pub fn identity(space: HilbertSpace) -> Self {
        Self::from_matrix(space, CsrMatrix::identity(space.dim()))
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// `⟨bra| self |ket⟩`
    pub fn element(&self, bra: BasisState, ket: BasisState) -> Result<Complex64> {
        Ok(self
            .matrix
            .get(self.space.index(bra)?, self.space.index(ket)?))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(
                self.space.to_string(),
                other.space.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_matrix(
            self.space,
            self.matrix.add(&other.matrix),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_matrix(
            self.space,
            self.matrix.sub(&other.matrix),
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_matrix(
            self.space,
            self.matrix.mul(&other.matrix),
        ))
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        Self::from_matrix(self.space, self.matrix.scale(c.into()))
    }

    pub fn dagger(&self) -> Self {
        Self::from_matrix(self.space, self.matrix.adjoint())
    }

    /// `Tr(ρ A)`
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<Complex64> {
        if self.space != rho.space() {
            return Err(Error::SpaceMismatch(
                self.space.to_string(),
                rho.space().to_string(),
            ));
        }
        let m = rho.matrix();
        Ok(self.matrix.triplets().map(|(i, j, a)| a * m[(j, i)]).sum())
    }

    /// Apply to a state vector in basis order.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(psi)
    }

    pub fn is_hermitian(&self) -> bool {
        self.matrix == self.matrix.adjoint()
    }
}

fn ladder(levels: usize) -> CsrMatrix {
    let trip = (1..levels)
        .map(|k| (k - 1, k, Complex64::new((k as f64).sqrt(), 0.0)))
        .collect();
    CsrMatrix::from_triplets(levels, levels, trip)
}

fn embed(space: HilbertSpace, atom: CsrMatrix, a: CsrMatrix, b: CsrMatrix) -> QOperator {
    QOperator::from_matrix(space, atom.kron(&a).kron(&b))
}

/// `â` on mode a.
pub fn annihilator_a(space: HilbertSpace) -> QOperator {
    embed(
        space,
        CsrMatrix::identity(ATOM_DIM),
        ladder(space.na_dim),
        CsrMatrix::identity(space.nb_dim),
    )
}

/// `b̂` on mode b.
pub fn annihilator_b(space: HilbertSpace) -> QOperator {
    embed(
        space,
        CsrMatrix::identity(ATOM_DIM),
        CsrMatrix::identity(space.na_dim),
        ladder(space.nb_dim),
    )
}

/// Atomic lowering operator `σ = |g⟩⟨e|`.
pub fn sigma_minus(space: HilbertSpace) -> QOperator {
    let sm = CsrMatrix::from_triplets(2, 2, vec![(0, 1, Complex64::new(1.0, 0.0))]);
    embed(
        space,
        sm,
        CsrMatrix::identity(space.na_dim),
        CsrMatrix::identity(space.nb_dim),
    )
}

pub fn number_a(space: HilbertSpace) -> QOperator {
    let a = annihilator_a(space);
    a.dagger().mul(&a).expect("same space")
}

pub fn number_b(space: HilbertSpace) -> QOperator {
    let b = annihilator_b(space);
    b.dagger().mul(&b).expect("same space")
}

/// Column vector of a basis state.
pub fn ket(space: HilbertSpace, state: BasisState) -> Result<Vec<Complex64>> {
    let mut v = vec![Complex64::new(0.0, 0.0); space.dim()];
    v[space.index(state)?] = Complex64::new(1.0, 0.0);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn space_dimensions() {
        assert_eq!(make_space(5, 5).unwrap().dim(), 50);
        assert_eq!(make_space(2, 3).unwrap().dim(), 12);
        assert!(matches!(
            make_space(1, 5),
            Err(Error::InvalidTruncation { .. })
        ));
        assert!(make_space(5, 2).is_err());
    }

    #[test]
    fn basis_ordering() {
        let s = make_space(5, 5).unwrap();
        assert_eq!(s.index(BasisState::g(0, 0)).unwrap(), 0);
        assert_eq!(s.index(BasisState::e(0, 0)).unwrap(), 25);
        assert_eq!(s.index(BasisState::g(1, 2)).unwrap(), 7);
        assert!(matches!(
            s.index(BasisState::g(5, 0)),
            Err(Error::StateOutOfRange(_))
        ));
        assert!(s.index(BasisState::e(0, 5)).is_err());
    }

    #[test]
    fn ladder_elements() {
        let s = make_space(5, 5).unwrap();
        let a = annihilator_a(s);
        let b = annihilator_b(s);
        let sm = sigma_minus(s);
        assert_eq!(
            a.element(BasisState::g(0, 0), BasisState::g(1, 0)).unwrap(),
            one()
        );
        assert_eq!(
            b.element(BasisState::g(0, 1), BasisState::g(0, 2)).unwrap(),
            Complex64::new(2f64.sqrt(), 0.0)
        );
        assert_eq!(
            sm.element(BasisState::g(0, 0), BasisState::e(0, 0))
                .unwrap(),
            one()
        );
        assert_eq!(
            sm.element(BasisState::e(0, 0), BasisState::g(0, 0))
                .unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn algebra_basics() {
        let s = make_space(5, 5).unwrap();
        let a = annihilator_a(s);
        assert_eq!(a.dagger().dagger(), a);

        let n = a.dagger().mul(&a).unwrap();
        let psi = ket(s, BasisState::g(3, 0)).unwrap();
        let out = n.apply(&psi);
        let i = s.index(BasisState::g(3, 0)).unwrap();
        for (k, v) in out.iter().enumerate() {
            let expect = if k == i { 3.0 } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-14);
        }

        let rho = DensityMatrix::pure(s, BasisState::e(2, 1)).unwrap();
        let tr = QOperator::identity(s).expectation(&rho).unwrap();
        assert_eq!(tr, one());
    }

    #[test]
    fn space_mismatch_is_rejected() {
        let a = annihilator_a(make_space(5, 5).unwrap());
        let b = annihilator_a(make_space(4, 5).unwrap());
        assert!(matches!(a.add(&b), Err(Error::SpaceMismatch(..))));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn commutator_on_truncated_space() {
        let s = make_space(5, 4).unwrap();
        let a = annihilator_a(s);
        let ad = a.dagger();
        let comm = a.mul(&ad).unwrap().sub(&ad.mul(&a).unwrap()).unwrap();
        for st in s.states() {
            let i = s.index(st).unwrap();
            for j in 0..s.dim() {
                let v = comm.matrix().get(i, j);
                if st.m < s.na_dim() - 1 {
                    let expect = if i == j {
                        one()
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    assert!((v - expect).norm() < 1e-14, "{st} col {j}");
                }
            }
        }
        // truncation shows up on the top level only
        let top = s.index(BasisState::g(4, 0)).unwrap();
        assert!((comm.matrix().get(top, top) - Complex64::new(-4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn distinct_subsystems_commute() {
        let s = make_space(4, 5).unwrap();
        let a = annihilator_a(s);
        let b = annihilator_b(s);
        let sm = sigma_minus(s);
        assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        assert_eq!(a.mul(&sm).unwrap(), sm.mul(&a).unwrap());
        assert_eq!(sm.mul(&sm).unwrap(), QOperator::zero(s));
    }

    proptest! {
        #[test]
        fn index_round_trip(na in 2usize..8, nb in 3usize..8) {
            let s = make_space(na, nb).unwrap();
            for i in 0..s.dim() {
                let st = s.state(i).unwrap();
                prop_assert_eq!(s.index(st).unwrap(), i);
            }
            prop_assert!(s.state(s.dim()).is_none());
        }
    }
}
