//! Smooth dynamic change to a center-of-momentum frame.
//!
//! A forward timelike `p` is brought to rest by the element
//! `a(p) = (ζ(p) M(p)⁻¹)^½` of `K`, whose induced Lorentz transformation
//! satisfies `M(Λp) = a M(p) a† = ζ(p)·1`.

use crate::clifford::{four_vector_of, hermitian_eig, m_of, pauli, CMatrix2, CMatrix4};
use crate::error::{domain, Result};
use crate::minkowski::{apply_lorentz, zeta, FourVector, LorentzMatrix, MassShellPoint};

/// Tolerance on `| |det a| - 1 |` for members of `K`, relative to the
/// squared entry scale of `a` (the rounding scale of a computed 2x2
/// determinant).
pub const DET_TOL: f64 = 1e-10;

fn check_unimodular(a: &CMatrix2) -> Result<()> {
    let d = a.det().norm();
    let scale = a.max_abs().powi(2).max(1.0);
    if !((d - 1.0).abs() <= DET_TOL * scale) {
        return domain(format!("|det a| = {d} is not 1"));
    }
    Ok(())
}

/// An element of `K`, determined by a 2x2 matrix `a` with `|det a| = 1`
/// acting on momenta by `M(p) ↦ a M(p) a†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KElement {
    a: CMatrix2,
}

impl KElement {
    pub fn new(a: CMatrix2) -> Result<Self> {
        check_unimodular(&a)?;
        Ok(KElement { a })
    }

    /// Wraps `a` without checking the determinant. Used by negative tests
    /// that need an element outside `K`.
    pub fn new_unchecked(a: CMatrix2) -> Self {
        KElement { a }
    }

    pub fn identity() -> Self {
        KElement {
            a: CMatrix2::identity(),
        }
    }

    pub fn matrix(&self) -> CMatrix2 {
        self.a
    }

    /// The 4x4 form `κ₄ = diag(a^{†-1}, a)`. Since `M(p) = p·σ̄` sits in the
    /// lower block of `slash(p)`, this ordering gives
    /// `slash(Λ(κ)p) = κ₄ slash(p) κ₄⁻¹`. For unitary `a` it is `diag(a, a)`.
    pub fn block4(&self) -> Result<CMatrix4> {
        Ok(CMatrix4::block_diag(&self.a.adjoint().inverse()?, &self.a))
    }

    /// `κ₄⁻¹ = diag(a†, a⁻¹)`.
    pub fn block4_inverse(&self) -> Result<CMatrix4> {
        Ok(CMatrix4::block_diag(&self.a.adjoint(), &self.a.inverse()?))
    }

    pub fn compose(&self, o: &KElement) -> KElement {
        KElement { a: self.a * o.a }
    }

    /// Acts on a four-vector by `M(p) ↦ a M(p) a†`.
    pub fn act(&self, p: FourVector) -> FourVector {
        four_vector_of(&(self.a * m_of(p) * self.a.adjoint()))
    }
}

/// The Lorentz transformation `Λ(κ)` with `M(Λ(κ)p) = a M(p) a†`.
pub fn lorentz_of(k: &KElement) -> Result<LorentzMatrix> {
    check_unimodular(&k.a)?;
    Ok(induced_lorentz(&k.a))
}

/// The linear map `p ↦ four_vector_of(a M(p) a†)` as a 4x4 matrix, for any
/// `a`. It is a Lorentz transformation only when `|det a| = 1`.
pub fn induced_lorentz(a: &CMatrix2) -> LorentzMatrix {
    let adj = a.adjoint();
    let mut l = [[0.0; 4]; 4];
    for nu in 0..4 {
        let s = pauli(nu).expect("index in range");
        let col = four_vector_of(&(*a * s * adj)).to_array();
        for (mu, row) in l.iter_mut().enumerate() {
            row[nu] = col[mu];
        }
    }
    LorentzMatrix(l)
}

/// `a(p) = U diag(√λ1, √λ2) U†` where `ζ(p) M(p)⁻¹ = U diag(λ1, λ2) U†`.
pub fn xi(p: FourVector) -> Result<KElement> {
    let z = zeta(p)?;
    let inv = m_of(p).inverse()?.scale_re(z);
    let eig = hermitian_eig(&inv)?;
    if !(eig.values[1] > 0.0) {
        return domain("M(p) is not positive definite");
    }
    // det(ζ M⁻¹) = 1, so the small eigenvalue is the reciprocal of the large
    // one; this avoids the cancellation in λ2 = mean - radius for strong boosts.
    let big = eig.values[0];
    let fixed = crate::clifford::HermitianEig {
        vectors: eig.vectors,
        values: [big, 1.0 / big],
    };
    Ok(KElement {
        a: fixed.map(f64::sqrt),
    })
}

/// Result of boosting an incoming pair to its center-of-momentum frame.
#[derive(Clone, Copy, Debug)]
pub struct CmBoost {
    pub lambda: LorentzMatrix,
    /// Half the invariant mass of the pair.
    pub energy: f64,
    pub r1: FourVector,
    pub r2: FourVector,
}

/// Boosts `(p₁, p₂)` to the frame where their spatial momenta cancel.
pub fn cm_boost(p1: &MassShellPoint, p2: &MassShellPoint) -> Result<CmBoost> {
    if !(p1.mass() > 0.0 && p2.mass() > 0.0) {
        return domain("cm_boost requires massive particles");
    }
    let total = p1.momentum() + p2.momentum();
    let lambda = lorentz_of(&xi(total)?)?;
    Ok(CmBoost {
        lambda,
        energy: 0.5 * zeta(total)?,
        r1: apply_lorentz(&lambda, p1.momentum()),
        r2: apply_lorentz(&lambda, p2.momentum()),
    })
}

/// Total center-of-momentum energy `ζ(p₁ + p₂)`.
pub fn cm_energy(p1: FourVector, p2: FourVector) -> Result<f64> {
    zeta(p1 + p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::C64;
    use crate::minkowski::on_shell;

    #[test]
    fn identity_element() {
        assert_eq!(lorentz_of(&KElement::identity()).unwrap(), LorentzMatrix::identity());
    }

    #[test]
    fn diagonal_element_is_z_boost() {
        let eta: f64 = 0.83;
        let a = CMatrix2::real_diag((eta / 2.0).exp(), (-eta / 2.0).exp());
        let l = lorentz_of(&KElement::new(a).unwrap()).unwrap();
        let b = LorentzMatrix::boost_z(eta);
        for i in 0..4 {
            for j in 0..4 {
                assert!((l.entry(i, j) - b.entry(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unitary_element_is_rotation() {
        let th: f64 = 0.4;
        let a = CMatrix2::new(
            C64::new(th.cos(), 0.0),
            C64::new(0.0, th.sin()),
            C64::new(0.0, th.sin()),
            C64::new(th.cos(), 0.0),
        );
        let l = lorentz_of(&KElement::new(a).unwrap()).unwrap();
        assert!((l.entry(0, 0) - 1.0).abs() < 1e-15);
        for i in 1..4 {
            assert!(l.entry(0, i).abs() < 1e-15 && l.entry(i, 0).abs() < 1e-15);
        }
        assert!(l.is_proper_orthochronous(1e-12));
    }

    #[test]
    fn rejects_non_unimodular() {
        let a = CMatrix2::real_diag(2.0, 1.0);
        assert!(KElement::new(a).is_err());
        assert!(lorentz_of(&KElement::new_unchecked(a)).is_err());
    }

    #[test]
    fn xi_at_rest_is_identity() {
        let k = xi(FourVector::new(7.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(k.matrix().max_abs_diff(&CMatrix2::identity()) < 1e-15);
        let l = lorentz_of(&k).unwrap();
        assert!(l.is_proper_orthochronous(1e-14));
        assert!((l.entry(0, 0) - 1.0).abs() < 1e-14 && l.entry(1, 0).abs() < 1e-15);
    }

    #[test]
    fn xi_brings_to_rest() {
        let p = FourVector::new(2.0, 1.0, 0.0, 0.0);
        let r = apply_lorentz(&lorentz_of(&xi(p).unwrap()).unwrap(), p);
        assert!((r.t - 3f64.sqrt()).abs() < 1e-12);
        assert!(r.spatial_norm() < 1e-12);
    }

    #[test]
    fn xi_rejects_spacelike() {
        assert!(xi(FourVector::new(1.0, 2.0, 0.0, 0.0)).is_err());
        assert!(xi(FourVector::new(1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn already_cm_pair() {
        let p1 = on_shell(0.5, [3.0, 0.0, 0.0]).unwrap();
        let p2 = on_shell(0.5, [-3.0, 0.0, 0.0]).unwrap();
        let b = cm_boost(&p1, &p2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((b.lambda.entry(i, j) - id).abs() < 1e-14);
            }
        }
        assert!((b.energy - p1.momentum().t).abs() < 1e-14);
    }
}
