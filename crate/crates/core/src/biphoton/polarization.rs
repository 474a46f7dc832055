//! Two-photon polarization vectors over the ordered basis (hh, hv, vh, vv).
//!
//! The first index is the polarization of the signal photon (or of the
//! photon at the first detector), the second that of the idler.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used for unit norm and exchange-symmetry checks.
pub const POLARIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExchangeSymmetry {
    Symmetric,
    Antisymmetric,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BellState::PsiMinus => "psi_minus",
            BellState::PsiPlus => "psi_plus",
            BellState::PhiPlus => "phi_plus",
            BellState::PhiMinus => "phi_minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonPolarization {
    coeffs: [Complex64; 4],
}

impl TwoPhotonPolarization {
    pub fn new(coeffs: [Complex64; 4]) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("polarization coefficients must be finite"));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > POLARIZATION_TOLERANCE {
            return Err(Error::invalid(format!(
                "polarization vector must have unit norm, got {norm}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(coeffs: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("polarization vector must be nonzero and finite"));
        }
        Self::new(coeffs.map(|c| c / norm))
    }

    /// Product state of two single-photon polarizations `(h, v)` amplitudes.
    pub fn product(first: [Complex64; 2], second: [Complex64; 2]) -> Result<Self> {
        Self::normalized([
            first[0] * second[0],
            first[0] * second[1],
            first[1] * second[0],
            first[1] * second[1],
        ])
    }

    pub fn hh() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            coeffs: [one, zero, zero, zero],
        }
    }

    pub fn coeffs(&self) -> &[Complex64; 4] {
        &self.coeffs
    }

    /// The vector with the two photons exchanged (hv ↔ vh).
    pub fn swapped(&self) -> Self {
        let [hh, hv, vh, vv] = self.coeffs;
        Self {
            coeffs: [hh, vh, hv, vv],
        }
    }

    pub fn symmetry(&self) -> ExchangeSymmetry {
        let [_, hv, vh, _] = self.coeffs;
        if (hv - vh).norm() <= POLARIZATION_TOLERANCE {
            ExchangeSymmetry::Symmetric
        } else if (hv + vh).norm() <= POLARIZATION_TOLERANCE
            && self.coeffs[0].norm() <= POLARIZATION_TOLERANCE
            && self.coeffs[3].norm() <= POLARIZATION_TOLERANCE
        {
            ExchangeSymmetry::Antisymmetric
        } else {
            ExchangeSymmetry::Mixed
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

pub fn bell_state(which: BellState) -> TwoPhotonPolarization {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let coeffs = match which {
        BellState::PsiMinus => [z, s, -s, z],
        BellState::PsiPlus => [z, s, s, z],
        BellState::PhiPlus => [s, z, z, s],
        BellState::PhiMinus => [s, z, z, -s],
    };
    TwoPhotonPolarization { coeffs }
}

/// Applies the same linear-polarization rotation `R(θ) ⊗ R(θ)` to both
/// photons, with `R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]` acting on `(h, v)`.
pub fn rotate_polarization_bilateral(pol: &TwoPhotonPolarization, angle: f64) -> TwoPhotonPolarization {
    let (s, c) = angle.sin_cos();
    let r = [[c, -s], [s, c]];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    acc += pol.coeffs[2 * i + j] * (r[a][i] * r[b][j]);
                }
            }
            out[2 * a + b] = acc;
        }
    }
    TwoPhotonPolarization { coeffs: out }
}

/// Single-photon linear analyzer: `Some(α)` passes `cos α |h⟩ + sin α |v⟩`,
/// `None` means the polarization is not analyzed.
pub type Analyzer = Option<f64>;

/// Projection vectors whose squared projections sum to the analyzed rate.
pub(crate) fn analyzer_vectors(analyzer: Analyzer) -> Vec<[f64; 2]> {
    match analyzer {
        Some(alpha) => vec![[alpha.cos(), alpha.sin()]],
        None => vec![[1.0, 0.0], [0.0, 1.0]],
    }
}

/// `⟨e1 ⊗ e2 | c⟩` for a raw coefficient vector.
#[inline]
pub(crate) fn project(coeffs: &[Complex64; 4], e1: [f64; 2], e2: [f64; 2]) -> Complex64 {
    coeffs[0] * (e1[0] * e2[0])
        + coeffs[1] * (e1[0] * e2[1])
        + coeffs[2] * (e1[1] * e2[0])
        + coeffs[3] * (e1[1] * e2[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: &TwoPhotonPolarization, b: &[f64; 4]) -> bool {
        a.coeffs
            .iter()
            .zip(b)
            .all(|(c, &e)| (c.re - e).abs() < 1e-12 && c.im.abs() < 1e-12)
    }

    #[test]
    fn bell_coefficients_and_classes() {
        let s = FRAC_1_SQRT_2;
        let m = bell_state(BellState::PsiMinus);
        assert!(close(&m, &[0.0, s, -s, 0.0]));
        assert_eq!(m.symmetry(), ExchangeSymmetry::Antisymmetric);
        let p = bell_state(BellState::PhiPlus);
        assert!(close(&p, &[s, 0.0, 0.0, s]));
        for b in [BellState::PsiPlus, BellState::PhiPlus, BellState::PhiMinus] {
            assert_eq!(bell_state(b).symmetry(), ExchangeSymmetry::Symmetric);
        }
        assert_eq!(TwoPhotonPolarization::hh().symmetry(), ExchangeSymmetry::Symmetric);
    }

    #[test]
    fn mixed_state() {
        let hv = TwoPhotonPolarization::product(
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(hv.symmetry(), ExchangeSymmetry::Mixed);
    }

    #[test]
    fn rejects_non_unit() {
        let one = Complex64::new(1.0, 0.0);
        assert!(TwoPhotonPolarization::new([one, one, one, one]).is_err());
    }

    #[test]
    fn singlet_invariant_under_rotation() {
        let m = bell_state(BellState::PsiMinus);
        for angle in [0.1, 0.7, PI / 4.0, 2.0] {
            let r = rotate_polarization_bilateral(&m, angle);
            assert!((r.inner(&m).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_plus_in_diagonal_basis() {
        // R(π/4) maps h → +, v → −, so the rotated vector's coefficients are
        // those of ψ⁺ written in the ± basis: (|++⟩ − |−−⟩)/√2.
        let s = FRAC_1_SQRT_2;
        let p = bell_state(BellState::PsiPlus);
        let r = rotate_polarization_bilateral(&p, -PI / 4.0);
        assert!(close(&r, &[s, 0.0, 0.0, -s]));
    }

    #[test]
    fn identity_rotation() {
        let hh = TwoPhotonPolarization::hh();
        assert_eq!(rotate_polarization_bilateral(&hh, 0.0), hh);
    }

    fn arb_pol() -> impl Strategy<Value = TwoPhotonPolarization> {
        prop::array::uniform8(-1.0f64..1.0)
            .prop_filter("nonzero", |a| a.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|a| {
                TwoPhotonPolarization::normalized([
                    Complex64::new(a[0], a[1]),
                    Complex64::new(a[2], a[3]),
                    Complex64::new(a[4], a[5]),
                    Complex64::new(a[6], a[7]),
                ])
                .unwrap()
            })
    }

    fn arb_structured() -> impl Strategy<Value = TwoPhotonPolarization> {
        // Mix of symmetric, antisymmetric and generic states.
        (arb_pol(), 0..3u8).prop_map(|(p, kind)| match kind {
            0 => {
                let c = p.coeffs;
                let avg = (c[1] + c[2]) * 0.5;
                TwoPhotonPolarization::normalized([c[0], avg, avg, c[3]]).unwrap_or(p)
            }
            1 => {
                let d = (p.coeffs[1] - p.coeffs[2]) * 0.5;
                let z = Complex64::new(0.0, 0.0);
                TwoPhotonPolarization::normalized([z, d, -d, z]).unwrap_or(p)
            }
            _ => p,
        })
    }

    proptest! {
        #[test]
        fn classification_total_and_idempotent(p in arb_structured()) {
            let s = p.symmetry();
            prop_assert_eq!(s, p.symmetry());
            let sw = p.swapped();
            match s {
                ExchangeSymmetry::Symmetric => prop_assert!(p.coeffs.iter().zip(&sw.coeffs).all(|(a, b)| (a - b).norm() < 1e-9)),
                ExchangeSymmetry::Antisymmetric => prop_assert!(p.coeffs.iter().zip(&sw.coeffs).all(|(a, b)| (a + b).norm() < 1e-9)),
                ExchangeSymmetry::Mixed => {}
            }
        }

        #[test]
        fn rotation_preserves_norm_and_class(p in arb_structured(), angle in -4.0f64..4.0) {
            let r = rotate_polarization_bilateral(&p, angle);
            let norm: f64 = r.coeffs.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            let before = p.symmetry();
            if before != ExchangeSymmetry::Mixed {
                prop_assert_eq!(r.symmetry(), before);
            }
        }
    }
}
