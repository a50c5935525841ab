//! Rotating-frame Hamiltonian of the driven atom + two-mode χ⁽²⁾ system and
//! its analytic single-excitation spectrum.
//!
//! All quantities are in units of the cavity decay rate κ. Lab-frame
//! frequencies never appear; the model is parameterized directly by
//! detunings from the drive.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilator_a, annihilator_b, sigma_minus, HilbertSpace, QOperator};

/// Model rates and detunings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub delta_a: f64,
    pub delta_e: f64,
    pub delta_b: f64,
    /// Atom–mode-a coupling.
    #[serde(rename = "J")]
    pub j: f64,
    /// χ⁽²⁾ coupling between one a-photon and two b-photons.
    pub g: f64,
    /// Drive amplitude on mode a.
    #[serde(rename = "F")]
    pub f: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub gamma: f64,
    pub n_th: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        let mut p = Self {
            delta_a: 0.0,
            delta_e: 0.0,
            delta_b: 0.0,
            j: 0.0,
            g: 0.0,
            f: 0.1,
            kappa_a: 1.0,
            kappa_b: 1.0,
            gamma: 1.0,
            n_th: 0.0,
        };
        ConstrainedDetuning::new(10.0).apply(&mut p);
        p
    }
}

/// Names accepted by [`SystemParams::set`]; `delta` is the constrained alias.
pub const PARAM_NAMES: [&str; 11] = [
    "delta_a", "delta_e", "delta_b", "J", "g", "F", "kappa_a", "kappa_b", "gamma", "n_th", "delta",
];

impl SystemParams {
    /// All-zero parameters (no drive, no loss).
    pub fn zero() -> Self {
        Self {
            delta_a: 0.0,
            delta_e: 0.0,
            delta_b: 0.0,
            j: 0.0,
            g: 0.0,
            f: 0.0,
            kappa_a: 0.0,
            kappa_b: 0.0,
            gamma: 0.0,
            n_th: 0.0,
        }
    }

    /// Default rates with `Δa = Δe = Δ`, `Δb = Δ/2` and the given couplings.
    pub fn constrained(delta: f64, j: f64, g: f64, f: f64) -> Self {
        let mut p = Self {
            j,
            g,
            f,
            ..Self::default()
        };
        ConstrainedDetuning::new(delta).apply(&mut p);
        p
    }

    pub fn with_n_th(mut self, n_th: f64) -> Self {
        self.n_th = n_th;
        self
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "delta_a" => self.delta_a = value,
            "delta_e" => self.delta_e = value,
            "delta_b" => self.delta_b = value,
            "J" => self.j = value,
            "g" => self.g = value,
            "F" => self.f = value,
            "kappa_a" => self.kappa_a = value,
            "kappa_b" => self.kappa_b = value,
            "gamma" => self.gamma = value,
            "n_th" => self.n_th = value,
            "delta" => ConstrainedDetuning::new(value).apply(self),
            _ => {
                return Err(Error::InvalidParam {
                    name: name.to_string(),
                    reason: format!(
                        "unknown parameter (expected one of {})",
                        PARAM_NAMES.join(", ")
                    ),
                })
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "delta_a" | "delta" => self.delta_a,
            "delta_e" => self.delta_e,
            "delta_b" => self.delta_b,
            "J" => self.j,
            "g" => self.g,
            "F" => self.f,
            "kappa_a" => self.kappa_a,
            "kappa_b" => self.kappa_b,
            "gamma" => self.gamma,
            "n_th" => self.n_th,
            _ => return None,
        })
    }

    fn fields(&self) -> [(&'static str, f64); 10] {
        [
            ("delta_a", self.delta_a),
            ("delta_e", self.delta_e),
            ("delta_b", self.delta_b),
            ("J", self.j),
            ("g", self.g),
            ("F", self.f),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("gamma", self.gamma),
            ("n_th", self.n_th),
        ]
    }

    /// Hard constraints: finite values and a non-negative thermal occupation.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !v.is_finite() {
                return Err(Error::InvalidParam {
                    name: name.into(),
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        if self.n_th < 0.0 {
            return Err(Error::InvalidParam {
                name: "n_th".into(),
                reason: format!("must be >= 0, got {}", self.n_th),
            });
        }
        Ok(())
    }

    /// Soft warnings for signed rates outside the validated (lossy) regime.
    pub fn warnings(&self) -> Vec<String> {
        [
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("gamma", self.gamma),
        ]
        .into_iter()
        .filter(|(_, v)| *v <= 0.0)
        .map(|(name, v)| {
            format!("{name} = {v} is not a loss rate; results are not validated in this regime")
        })
        .collect()
    }

    /// The common detuning Δ when `Δa = Δe = Δ` and `Δb = Δ/2` hold exactly.
    pub fn constrained_delta(&self) -> Option<f64> {
        (self.delta_a == self.delta_e && 2.0 * self.delta_b == self.delta_a).then_some(self.delta_a)
    }
}

/// The detuning pattern `Δa = Δe = Δ`, `Δb = Δ/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstrainedDetuning {
    pub delta: f64,
}

impl ConstrainedDetuning {
    pub fn new(delta: f64) -> Self {
        Self { delta }
    }

    pub fn apply(&self, params: &mut SystemParams) {
        params.delta_a = self.delta;
        params.delta_e = self.delta;
        params.delta_b = self.delta / 2.0;
    }
}

/// `H = Δa a†a + Δe σ†σ + Δb b†b + J(a†σ + σ†a) + g(a†b² + b†²a) + F(a† + a)`
pub fn hamiltonian(params: &SystemParams, space: HilbertSpace) -> QOperator {
    let a = annihilator_a(space);
    let b = annihilator_b(space);
    let sm = sigma_minus(space);
    let ad = a.dagger();
    let bd = b.dagger();
    let sp = sm.dagger();
    let mul = |x: &QOperator, y: &QOperator| x.mul(y).expect("same space");

    let b2 = mul(&b, &b);
    let ad_b2 = mul(&ad, &b2);
    let ad_sm = mul(&ad, &sm);

    let terms = [
        mul(&ad, &a).scale(params.delta_a),
        mul(&sp, &sm).scale(params.delta_e),
        mul(&bd, &b).scale(params.delta_b),
        ad_sm.add(&ad_sm.dagger()).unwrap().scale(params.j),
        ad_b2.add(&ad_b2.dagger()).unwrap().scale(params.g),
        ad.add(&a).unwrap().scale(params.f),
    ];
    let h = terms
        .iter()
        .fold(QOperator::zero(space), |acc, t| acc.add(t).unwrap());
    // exact Hermiticity, independent of rounding in the products above
    h.add(&h.dagger()).unwrap().scale(Complex64::new(0.5, 0.0))
}

/// Hamiltonian block on `(|g,1,0⟩, |e,0,0⟩, |g,0,2⟩)` with the drive dropped.
pub fn single_excitation_matrix(params: &SystemParams) -> Matrix3<f64> {
    let s2g = std::f64::consts::SQRT_2 * params.g;
    Matrix3::new(
        params.delta_a,
        params.j,
        s2g, //
        params.j,
        params.delta_e,
        0.0, //
        s2g,
        0.0,
        2.0 * params.delta_b,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenfrequencies {
    pub xi_plus: f64,
    pub xi_zero: f64,
    pub xi_minus: f64,
}

/// Closed-form single-excitation eigenvalues `Δ ± √(2g² + J²)` and `Δ`,
/// valid under [`ConstrainedDetuning`].
pub fn eigenfrequencies(delta: f64, j: f64, g: f64) -> Eigenfrequencies {
    let r = (2.0 * g * g + j * j).sqrt();
    Eigenfrequencies {
        xi_plus: delta + r,
        xi_zero: delta,
        xi_minus: delta - r,
    }
}

/// Couplings `g*` that put the lower single-excitation level on drive
/// resonance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpbCoupling {
    pub g_plus: f64,
    pub g_minus: f64,
}

/// `√2 g = ±√(Δ² − J²)`; `None` when `Δ² < J²`.
pub fn cpb_condition(delta: f64, j: f64) -> Option<CpbCoupling> {
    let d = delta * delta - j * j;
    if d < 0.0 {
        return None;
    }
    let g = (d / 2.0).sqrt();
    Some(CpbCoupling {
        g_plus: g,
        g_minus: -g,
    })
}

/// `J*` with the same resonance, solved for the atom coupling at fixed `g`:
/// `J = ±√(Δ² − 2g²)`.
pub fn cpb_condition_j(delta: f64, g: f64) -> Option<(f64, f64)> {
    let d = delta * delta - 2.0 * g * g;
    (d >= 0.0).then(|| (d.sqrt(), -d.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_space, BasisState};
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn sorted_eigs(m: Matrix3<f64>) -> [f64; 3] {
        let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        [e[0], e[1], e[2]]
    }

    #[test]
    fn zero_params_give_zero_hamiltonian() {
        let s = make_space(5, 5).unwrap();
        assert_eq!(hamiltonian(&SystemParams::zero(), s), QOperator::zero(s));
    }

    #[test]
    fn number_operator_scaling() {
        let s = make_space(5, 5).unwrap();
        let p = SystemParams {
            delta_a: 1.0,
            ..SystemParams::zero()
        };
        let h = hamiltonian(&p, s);
        for (r, c, _) in h.matrix().triplets() {
            assert_eq!(r, c, "H must be diagonal");
        }
        let v = h.element(BasisState::g(2, 0), BasisState::g(2, 0)).unwrap();
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn chi2_matrix_element() {
        let s = make_space(5, 5).unwrap();
        let p = SystemParams {
            g: 1.7,
            ..SystemParams::zero()
        };
        let v = hamiltonian(&p, s)
            .element(BasisState::g(1, 0), BasisState::g(0, 2))
            .unwrap();
        assert_abs_diff_eq!(v.re, 2f64.sqrt() * 1.7, epsilon = 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian() {
        let s = make_space(5, 5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = SystemParams {
                delta_a: rng.gen_range(-15.0..15.0),
                delta_e: rng.gen_range(-15.0..15.0),
                delta_b: rng.gen_range(-15.0..15.0),
                j: rng.gen_range(-10.0..10.0),
                g: rng.gen_range(-10.0..10.0),
                f: rng.gen_range(0.0..1.0),
                ..SystemParams::default()
            };
            assert!(hamiltonian(&p, s).is_hermitian());
        }
    }

    #[test]
    fn single_excitation_matrix_fig4a_point() {
        let p = SystemParams::constrained(10.0, 6.0, 4.0 * 2f64.sqrt(), 0.1);
        let m = single_excitation_matrix(&p);
        let expect = Matrix3::new(10.0, 6.0, 8.0, 6.0, 10.0, 0.0, 8.0, 0.0, 10.0);
        assert!((m - expect).abs().max() < 1e-12);
        assert_eq!(
            single_excitation_matrix(&SystemParams::zero()),
            Matrix3::zeros()
        );
    }

    #[test]
    fn single_excitation_matrix_is_block_of_hamiltonian() {
        let s = make_space(5, 5).unwrap();
        let p = SystemParams {
            f: 0.0,
            ..SystemParams {
                delta_a: 3.0,
                delta_e: -1.5,
                delta_b: 2.25,
                j: 1.25,
                g: -0.75,
                ..SystemParams::default()
            }
        };
        let h = hamiltonian(&p, s);
        let basis = [
            BasisState::g(1, 0),
            BasisState::e(0, 0),
            BasisState::g(0, 2),
        ];
        let m = single_excitation_matrix(&p);
        for (r, br) in basis.iter().enumerate() {
            for (c, bc) in basis.iter().enumerate() {
                let v = h.element(*br, *bc).unwrap();
                assert_abs_diff_eq!(v.re, m[(r, c)], epsilon = 1e-14);
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn eigenfrequency_examples() {
        // oracle values from a numerical 3x3 eigendecomposition
        let e = sorted_eigs(single_excitation_matrix(&SystemParams::constrained(
            10.0,
            6.0,
            4.0 * 2f64.sqrt(),
            0.0,
        )));
        assert_abs_diff_eq!(e[0], 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[2], 0.0, epsilon = 1e-12);

        let xi = eigenfrequencies(10.0, 6.0, 4.0 * 2f64.sqrt());
        assert_abs_diff_eq!(xi.xi_plus, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(xi.xi_zero, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(xi.xi_minus, 0.0, epsilon = 1e-12);

        let xi = eigenfrequencies(0.0, 0.0, 0.0);
        assert_eq!((xi.xi_plus, xi.xi_zero, xi.xi_minus), (0.0, 0.0, 0.0));

        let xi = eigenfrequencies(8.0, 14f64.sqrt(), 5.0);
        assert_abs_diff_eq!(xi.xi_plus, 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(xi.xi_minus, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cpb_examples() {
        let c = cpb_condition(10.0, 6.0).unwrap();
        assert_abs_diff_eq!(c.g_plus, 4.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.g_minus, -4.0 * 2f64.sqrt(), epsilon = 1e-12);

        let c = cpb_condition(8.0, 3.742).unwrap();
        assert_abs_diff_eq!(c.g_plus, 5.0, epsilon = 1e-3);

        assert_eq!(cpb_condition(5.0, 6.0), None);

        let (jp, jm) = cpb_condition_j(8.0, 5.0).unwrap();
        assert_abs_diff_eq!(jp, 14f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(jm, -14f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn set_alias_and_unknown_names() {
        let mut p = SystemParams::default();
        p.set("delta", 8.0).unwrap();
        assert_eq!((p.delta_a, p.delta_e, p.delta_b), (8.0, 8.0, 4.0));
        assert_eq!(p.constrained_delta(), Some(8.0));
        p.set("delta_b", 1.0).unwrap();
        assert_eq!(p.constrained_delta(), None);
        assert!(p.set("kappa", 1.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(SystemParams::default().validate().is_ok());
        assert!(SystemParams::default().with_n_th(-0.1).validate().is_err());
        let p = SystemParams {
            g: f64::NAN,
            ..SystemParams::default()
        };
        assert!(p.validate().is_err());
        let p = SystemParams {
            kappa_b: -1.0,
            ..SystemParams::default()
        };
        assert!(p.validate().is_ok());
        assert_eq!(p.warnings().len(), 1);
    }

    #[test]
    fn excitation_number_is_conserved_without_drive() {
        use crate::hilbert::{number_a, number_b, sigma_minus};
        let s = make_space(5, 7).unwrap();
        let p = SystemParams::constrained(3.0, 1.3, -2.1, 0.0);
        let h = hamiltonian(&p, s);
        let sm = sigma_minus(s);
        let n_exc = number_a(s)
            .add(&sm.dagger().mul(&sm).unwrap())
            .unwrap()
            .add(&number_b(s).scale(0.5))
            .unwrap();
        let comm = h.mul(&n_exc).unwrap().sub(&n_exc.mul(&h).unwrap()).unwrap();
        for st in s.states() {
            if st.m < s.na_dim() - 1 && st.n < s.nb_dim() - 2 {
                let c = s.index(st).unwrap();
                for r in 0..s.dim() {
                    assert!(comm.matrix().get(r, c).norm() < 1e-12, "{st}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_matches_numerical_eigs(
            delta in -15.0f64..15.0,
            j in -10.0f64..10.0,
            g in -10.0f64..10.0,
        ) {
            let e = sorted_eigs(single_excitation_matrix(&SystemParams::constrained(delta, j, g, 0.0)));
            let xi = eigenfrequencies(delta, j, g);
            prop_assert!((e[0] - xi.xi_plus).abs() < 1e-12 * (1.0 + xi.xi_plus.abs()));
            prop_assert!((e[1] - xi.xi_zero).abs() < 1e-12 * (1.0 + delta.abs()) * 10.0);
            prop_assert!((e[2] - xi.xi_minus).abs() < 1e-12 * (1.0 + xi.xi_plus.abs()));
        }

        #[test]
        fn parity_invariance(delta in -15.0f64..15.0, j in -10.0f64..10.0, g in -10.0f64..10.0) {
            prop_assert_eq!(eigenfrequencies(delta, j, g), eigenfrequencies(delta, -j, -g));
            prop_assert_eq!(eigenfrequencies(delta, j, g), eigenfrequencies(delta, j, -g));
        }

        #[test]
        fn cpb_root_is_drive_resonant(delta in -15.0f64..15.0, j in -10.0f64..10.0) {
            if let Some(c) = cpb_condition(delta, j) {
                for gs in [c.g_plus, c.g_minus] {
                    let xi = eigenfrequencies(delta.abs(), j, gs);
                    prop_assert!(xi.xi_minus.abs() < 1e-9);
                }
            } else {
                prop_assert!(delta * delta < j * j);
            }
        }
    }
}
