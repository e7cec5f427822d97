//! Four-vectors in natural units with metric signature (+,-,-,-).

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{domain, Result};

/// A real Minkowski four-vector `(t, x, y, z)`, in MeV.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[repr(C)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        FourVector::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn spatial(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn spatial_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// The Minkowski square `p·p`.
    pub fn norm_sqr(self) -> f64 {
        minkowski_dot(self, self)
    }

    /// Components with the index lowered, `p_μ = η_μν p^ν`.
    pub fn lowered(self) -> [f64; 4] {
        [self.t, -self.x, -self.y, -self.z]
    }

    pub fn is_finite(self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.t,
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("four-vector index {i} out of range"),
        }
    }
}

/// `a·b = a.t b.t - a.x b.x - a.y b.y - a.z b.z`.
pub fn minkowski_dot(a: FourVector, b: FourVector) -> f64 {
    a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z
}

/// The invariant mass `(p²)^½` of a forward timelike vector.
pub fn zeta(p: FourVector) -> Result<f64> {
    let p2 = p.norm_sqr();
    if !(p2 > 0.0) || !(p.t > 0.0) {
        return domain(format!(
            "zeta requires p^2 > 0 and p.t > 0, got p^2 = {p2}, p.t = {}",
            p.t
        ));
    }
    Ok(p2.sqrt())
}

/// `ω_m(v) = (m² + v²)^½`.
pub fn omega(m: f64, spatial: [f64; 3]) -> f64 {
    (m * m + spatial[0] * spatial[0] + spatial[1] * spatial[1] + spatial[2] * spatial[2]).sqrt()
}

/// A point on the positive-energy mass shell `H_m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassShellPoint {
    mass: f64,
    momentum: FourVector,
}

impl MassShellPoint {
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn momentum(&self) -> FourVector {
        self.momentum
    }

    /// Reinterprets an arbitrary positive-energy four-vector as a shell point
    /// with `mass = (p²)^½`. Used after Lorentz transformations, where the
    /// energy is no longer recomputed from the spatial part.
    pub fn from_momentum(p: FourVector) -> Result<Self> {
        let mass = zeta(p)?;
        Ok(MassShellPoint { mass, momentum: p })
    }

    /// Builds a shell point with an explicitly given mass; the momentum is
    /// taken as-is.
    pub fn with_mass(mass: f64, momentum: FourVector) -> Result<Self> {
        if !(mass >= 0.0) || !(momentum.t > 0.0) {
            return domain(format!("invalid shell point: m = {mass}, p.t = {}", momentum.t));
        }
        Ok(MassShellPoint { mass, momentum })
    }
}

/// Places a particle of mass `m` with the given three-momentum on its shell.
pub fn on_shell(m: f64, spatial: [f64; 3]) -> Result<MassShellPoint> {
    if !(m >= 0.0) {
        return domain(format!("mass must be non-negative, got {m}"));
    }
    let [x, y, z] = spatial;
    Ok(MassShellPoint {
        mass: m,
        momentum: FourVector::new(omega(m, spatial), x, y, z),
    })
}

pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// A real 4x4 matrix acting on four-vectors, row-major `Λ^μ_ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[repr(C)]
pub struct LorentzMatrix(pub [[f64; 4]; 4]);

impl LorentzMatrix {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        LorentzMatrix(m)
    }

    pub fn rotation_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut m = Self::identity().0;
        m[1][1] = c;
        m[1][2] = -s;
        m[2][1] = s;
        m[2][2] = c;
        LorentzMatrix(m)
    }

    /// Pure boost along `z` with rapidity `eta`.
    pub fn boost_z(eta: f64) -> Self {
        let mut m = Self::identity().0;
        m[0][0] = eta.cosh();
        m[3][3] = eta.cosh();
        m[0][3] = eta.sinh();
        m[3][0] = eta.sinh();
        LorentzMatrix(m)
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn transpose(&self) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[j][i];
            }
        }
        LorentzMatrix(m)
    }

    pub fn determinant(&self) -> f64 {
        det4(&self.0)
    }

    /// Largest entrywise deviation of `ΛᵀηΛ` from `η`.
    pub fn metric_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for (mu, eta) in METRIC.iter().enumerate() {
                    s += self.0[mu][a] * eta * self.0[mu][b];
                }
                let target = if a == b { METRIC[a] } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Whether the matrix is a proper orthochronous Lorentz transformation
    /// to within `tol`.
    pub fn is_proper_orthochronous(&self, tol: f64) -> bool {
        self.metric_residual() <= tol && self.0[0][0] >= 1.0 - tol && (self.determinant() - 1.0).abs() <= tol
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;
    fn mul(self, o: LorentzMatrix) -> LorentzMatrix {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        LorentzMatrix(m)
    }
}

/// Matrix-vector product `Λp`.
pub fn apply_lorentz(l: &LorentzMatrix, p: FourVector) -> FourVector {
    let c = p.to_array();
    let row = |i: usize| l.0[i].iter().zip(c.iter()).map(|(a, b)| a * b).sum::<f64>();
    FourVector::new(row(0), row(1), row(2), row(3))
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut det = 0.0;
    for col in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for r in 1..4 {
            let mut cc = 0;
            for c in 0..4 {
                if c == col {
                    continue;
                }
                minor[r - 1][cc] = m[r][c];
                cc += 1;
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][col] * det3(minor);
    }
    det
}
