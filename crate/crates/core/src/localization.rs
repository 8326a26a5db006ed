//! Pointwise objects attached to a module: the Grammian of the localized
//! generators, change-of-basis data between two generating sets, and the
//! modulus of the localized canonical map between two modules.
//!
//! For the canonical generators `fᵢ = 1 ⊗ eᵢ` the localization `fᵢ ⊗ 1_z` is
//! the projection of `fᵢ` onto the span of the dual kernels at `z`, and their
//! Gram matrix is `G(z) = K(z, z)⁻¹`.
//!
//! The canonical map `δ` sends `fᵢ` to `gᵢ`, so at a point it is the identity
//! in the localized bases and all of its metric content sits in the two
//! Grammians `G`, `G′`. Passing to orthonormal frames `G^{1/2}`, `G′^{1/2}`
//! turns `δ ⊗ 1_z` into `T = G′^{1/2} G^{−1/2}`, whence
//!
//! * `μ  = |T|  = (G^{−1/2} G′ G^{−1/2})^{1/2}` on the first localization,
//! * `μ′ = |T*| = (G′^{1/2} G⁻¹ G′^{1/2})^{1/2}` on the second.
//!
//! Both are Hermitian positive definite and share their spectrum. In rank one
//! `μ = √(K(z,z) / K′(z,z))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holomorphic::{ComplexPoint, HoloMatrix};
use crate::kernels::KernelSpec;
use crate::linalg::{
    condition_number, hermitize, identity, inv_sqrt_hpd, inverse_hpd, sqrt_hpd, CMatrix, CONDITION_LIMIT,
};

/// Localized data of a pair of modules at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalData {
    pub point: ComplexPoint,
    #[serde(with = "crate::cjson::matrix")]
    pub grammian: CMatrix,
    #[serde(with = "crate::cjson::matrix")]
    pub grammian_other: CMatrix,
    #[serde(with = "crate::cjson::matrix")]
    pub y: CMatrix,
    #[serde(with = "crate::cjson::matrix")]
    pub x: CMatrix,
    #[serde(with = "crate::cjson::matrix")]
    pub modulus: CMatrix,
    #[serde(with = "crate::cjson::matrix")]
    pub co_modulus: CMatrix,
}

impl LocalData {
    pub fn rank(&self) -> usize {
        self.modulus.nrows()
    }

    /// Rank-one modulus as a real number.
    pub fn scalar_modulus(&self) -> f64 {
        self.modulus[(0, 0)].re
    }

    /// The modulus written in the coefficient basis `{fᵢ ⊗ 1_z}` instead of an
    /// orthonormal frame: `G^{−1/2} μ G^{1/2}`. It is self-adjoint for the
    /// `G` inner product and squares to `G⁻¹G′ = K(z,z) K′(z,z)⁻¹`.
    pub fn modulus_in_generator_basis(&self) -> CMatrix {
        let g_half = sqrt_hpd(&self.grammian);
        let g_inv_half = inv_sqrt_hpd(&self.grammian);
        g_inv_half * &self.modulus * g_half
    }
}

/// `K(z, z)⁻¹`, Hermitized after inversion.
pub fn grammian(spec: &KernelSpec, z: &ComplexPoint) -> Result<CMatrix> {
    let k = spec.diagonal(z)?;
    inverse_hpd(&k, "localization")
}

/// Solves `Y · fvals = gvals` (generator values as columns) and returns
/// `(Y, X = Y*Y)`.
///
/// `X` is the operator with `⟨X fᵢ(z), f_ℓ(z)⟩ = ⟨gᵢ(z), g_ℓ(z)⟩`.
pub fn change_of_basis(fvals: &CMatrix, gvals: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if !fvals.is_square() || fvals.shape() != gvals.shape() {
        return Err(Error::RankMismatch {
            context: "localization",
            detail: format!("generator values of shapes {:?} and {:?}", fvals.shape(), gvals.shape()),
        });
    }
    for vals in [fvals, gvals] {
        let condition = condition_number(vals);
        if !(condition <= CONDITION_LIMIT) {
            return Err(Error::SingularBasis { condition });
        }
    }
    let f_inv = fvals.clone().try_inverse().ok_or(Error::SingularBasis {
        condition: f64::INFINITY,
    })?;
    let y = gvals * f_inv;
    let x = hermitize(&(y.adjoint() * &y));
    Ok((y, x))
}

/// Localized modulus data of the canonical map from `spec_a` to `spec_b`
/// at `z`. See the module documentation for the formulas.
pub fn localized_modulus(spec_a: &KernelSpec, spec_b: &KernelSpec, z: &ComplexPoint) -> Result<LocalData> {
    if spec_a.rank() != spec_b.rank() {
        return Err(Error::RankMismatch {
            context: "localization",
            detail: format!("ranks {} and {}", spec_a.rank(), spec_b.rank()),
        });
    }
    if spec_a.domain() != spec_b.domain() {
        return Err(Error::DomainMismatch {
            context: "localization",
        });
    }
    let g = grammian(spec_a, z)?;
    let g2 = grammian(spec_b, z)?;
    let m = spec_a.rank();
    // canonical generators on both sides: fᵢ(z) = gᵢ(z) = eᵢ
    let (y, x) = change_of_basis(&identity(m), &identity(m))?;

    let g_inv_half = inv_sqrt_hpd(&g);
    let modulus = sqrt_hpd(&hermitize(&(&g_inv_half * &g2 * &g_inv_half)));
    let g2_half = sqrt_hpd(&g2);
    let g_inv = inverse_hpd(&g, "localization")?;
    let co_modulus = sqrt_hpd(&hermitize(&(&g2_half * g_inv * &g2_half)));

    Ok(LocalData {
        point: z.clone(),
        grammian: g,
        grammian_other: g2,
        y,
        x,
        modulus,
        co_modulus,
    })
}

/// Localization of the module map given by the multiplier `psi`: its value
/// `Ψ(z)`.
pub fn localized_map(psi: &HoloMatrix, z: &ComplexPoint) -> Result<CMatrix> {
    if !psi.is_square() {
        return Err(Error::RankMismatch {
            context: "localization",
            detail: format!("{}x{} module map", psi.rows(), psi.cols()),
        });
    }
    psi.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomorphic::HoloExpr;
    use crate::kernels::real_diagonal;
    use crate::linalg::{determinant, frobenius, hermitian_eigenvalues};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grammian_examples() {
        let s = KernelSpec::szego();
        assert!((grammian(&s, &0.0.into()).unwrap()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((grammian(&s, &0.5.into()).unwrap()[(0, 0)].re - 0.75).abs() < 1e-15);
        let ds = s.direct_sum(&KernelSpec::bergman()).unwrap();
        let g = grammian(&ds, &0.5.into()).unwrap();
        assert!(frobenius(&(g - real_diagonal(&[0.75, 9.0 / 16.0]))) < 1e-14);
    }

    #[test]
    fn grammian_near_boundary_of_degenerate_kernel() {
        let degenerate =
            KernelSpec::constant(crate::domain::Domain::unit_disk(), real_diagonal(&[1.0, 1e-14])).unwrap();
        assert!(matches!(
            grammian(&degenerate, &0.0.into()),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn change_of_basis_examples() {
        let (y, x) = change_of_basis(&identity(2), &identity(2)).unwrap();
        assert_eq!(y, identity(2));
        assert_eq!(x, identity(2));

        let g = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let (y, x) = change_of_basis(&identity(2), &g).unwrap();
        assert!(frobenius(&(y - &g)) < 1e-15);
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.25, 0.0)]);
        assert!(frobenius(&(x - expected)) < 1e-15);

        let f = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.2), c(0.3, 0.0), c(-0.4, 0.0), c(0.9, -0.1)]);
        let (y, x) = change_of_basis(&f, &(&f * c(2.0, 0.0))).unwrap();
        assert!(frobenius(&(y - identity(2) * c(2.0, 0.0))) < 1e-14);
        assert!(frobenius(&(x - identity(2) * c(4.0, 0.0))) < 1e-13);
    }

    #[test]
    fn change_of_basis_rejects_singular() {
        let f = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(matches!(
            change_of_basis(&f, &identity(2)),
            Err(Error::SingularBasis { .. })
        ));
    }

    #[test]
    fn modulus_examples() {
        let s = KernelSpec::szego();
        let b = KernelSpec::bergman();
        let same = localized_modulus(&s, &s, &0.4.into()).unwrap();
        assert!(frobenius(&(same.modulus - identity(1))) < 1e-14);
        assert!((localized_modulus(&s, &b, &0.0.into()).unwrap().scalar_modulus() - 1.0).abs() < 1e-14);
        assert!((localized_modulus(&s, &b, &0.6.into()).unwrap().scalar_modulus() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn matrix_modulus_invariants() {
        let z = || HoloExpr::var(1, 0);
        let s = KernelSpec::szego();
        let a = s.direct_sum(&KernelSpec::bergman()).unwrap();
        let lift = HoloMatrix::from_rows(vec![
            vec![HoloExpr::one(1), 0.5 * z()],
            vec![HoloExpr::zero(1), 2.0 + z()],
        ])
        .unwrap();
        let b = a.conjugate(lift).unwrap();
        let p = ComplexPoint::from_re_im(0.3, -0.2);
        let d = localized_modulus(&a, &b, &p).unwrap();

        assert!(frobenius(&(&d.modulus - d.modulus.adjoint())) < 1e-14);
        let ev = hermitian_eigenvalues(&d.modulus);
        assert!(ev[0] > 0.0);
        let ev2 = hermitian_eigenvalues(&d.co_modulus);
        assert!(ev.iter().zip(&ev2).all(|(x, y)| (x - y).abs() < 1e-10 * x.abs()));

        let ka = a.diagonal(&p).unwrap();
        let kb = b.diagonal(&p).unwrap();
        let lhs = determinant(&d.modulus).re.powi(2);
        let rhs = determinant(&ka).re / determinant(&kb).re;
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs());

        // squares to K K'^{-1} in the generator basis
        let m = d.modulus_in_generator_basis();
        let target = &ka * kb.try_inverse().unwrap();
        assert!(frobenius(&(&m * &m - target)) < 1e-12);

        let back = localized_modulus(&b, &a, &p).unwrap();
        let prod = determinant(&d.modulus) * determinant(&back.modulus);
        assert!((prod.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn modulus_requires_matching_inputs() {
        let s = KernelSpec::szego();
        let ds = s.direct_sum(&s).unwrap();
        assert!(matches!(
            localized_modulus(&s, &ds, &0.0.into()),
            Err(Error::RankMismatch { .. })
        ));
        let poly = KernelSpec::polydisk(vec![1.0]).unwrap();
        assert!(matches!(
            localized_modulus(&s, &poly, &0.0.into()),
            Err(Error::DomainMismatch { .. })
        ));
    }

    #[test]
    fn localized_map_examples() {
        let z = HoloExpr::var(1, 0);
        let id = HoloMatrix::identity(1, 2);
        assert_eq!(localized_map(&id, &0.7.into()).unwrap(), identity(2));
        let u = HoloMatrix::from_rows(vec![
            vec![HoloExpr::one(1), z],
            vec![HoloExpr::zero(1), HoloExpr::one(1)],
        ])
        .unwrap();
        let v = localized_map(&u, &ComplexPoint::from_re_im(0.0, 0.3)).unwrap();
        assert_eq!(v[(0, 1)], c(0.0, 0.3));
        let rect = HoloMatrix::new(1, 2, vec![HoloExpr::one(1), HoloExpr::one(1)]).unwrap();
        assert!(localized_map(&rect, &0.0.into()).is_err());
    }
}
