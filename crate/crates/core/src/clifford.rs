//! Complex 2x2 and 4x4 matrices, Pauli and gamma matrices in the Weyl
//! representation, and Dirac spinors built from hermitian square roots.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::minkowski::{FourVector, MassShellPoint};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for accepting a matrix as hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix2(pub [[C64; 2]; 2]);

impl CMatrix2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        CMatrix2([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        CMatrix2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        CMatrix2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        CMatrix2::new(a, ZERO, ZERO, d)
    }

    pub fn real_diag(a: f64, d: f64) -> Self {
        CMatrix2::diag(C64::from(a), C64::from(d))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        CMatrix2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        CMatrix2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::from(s))
    }

    /// Closed-form inverse via the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return domain("singular 2x2 matrix");
        }
        let m = &self.0;
        Ok(CMatrix2::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(d.inv()))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &CMatrix2) -> f64 {
        (*self - *o).max_abs()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Add for CMatrix2 {
    type Output = CMatrix2;
    fn add(self, o: CMatrix2) -> CMatrix2 {
        let (a, b) = (&self.0, &o.0);
        CMatrix2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for CMatrix2 {
    type Output = CMatrix2;
    fn sub(self, o: CMatrix2) -> CMatrix2 {
        self + (-o)
    }
}

impl Neg for CMatrix2 {
    type Output = CMatrix2;
    fn neg(self) -> CMatrix2 {
        self.scale_re(-1.0)
    }
}

impl Mul for CMatrix2 {
    type Output = CMatrix2;
    fn mul(self, o: CMatrix2) -> CMatrix2 {
        let (a, b) = (&self.0, &o.0);
        CMatrix2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix4(pub [[C64; 4]; 4]);

impl CMatrix4 {
    pub fn zero() -> Self {
        CMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    /// Assembles `[[a, b], [c, d]]` from 2x2 blocks.
    pub fn from_blocks(a: &CMatrix2, b: &CMatrix2, c: &CMatrix2, d: &CMatrix2) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a.0[i][j];
                m.0[i][j + 2] = b.0[i][j];
                m.0[i + 2][j] = c.0[i][j];
                m.0[i + 2][j + 2] = d.0[i][j];
            }
        }
        m
    }

    /// Block `(row, col)` with `row, col ∈ {0, 1}`.
    pub fn block(&self, row: usize, col: usize) -> CMatrix2 {
        let (r, c) = (2 * row, 2 * col);
        CMatrix2::new(self.0[r][c], self.0[r][c + 1], self.0[r + 1][c], self.0[r + 1][c + 1])
    }

    pub fn block_diag(a: &CMatrix2, d: &CMatrix2) -> Self {
        let z = CMatrix2::zero();
        Self::from_blocks(a, &z, &z, d)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::from(s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &CMatrix4) -> f64 {
        (*self - *o).max_abs()
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }
}

impl Add for CMatrix4 {
    type Output = CMatrix4;
    fn add(self, o: CMatrix4) -> CMatrix4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for CMatrix4 {
    type Output = CMatrix4;
    fn sub(self, o: CMatrix4) -> CMatrix4 {
        self + o.scale_re(-1.0)
    }
}

impl Mul for CMatrix4 {
    type Output = CMatrix4;
    fn mul(self, o: CMatrix4) -> CMatrix4 {
        let mut m = CMatrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        m
    }
}

/// Pauli matrix `σ_μ`, with `σ_0 = 1`.
pub fn pauli(mu: usize) -> Result<CMatrix2> {
    Ok(match mu {
        0 => CMatrix2::identity(),
        1 => CMatrix2::new(ZERO, ONE, ONE, ZERO),
        2 => CMatrix2::new(ZERO, -I, I, ZERO),
        3 => CMatrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => return Err(Error::Index(mu)),
    })
}

fn pauli_combination(c: [f64; 4]) -> CMatrix2 {
    // c0 σ0 + c1 σ1 + c2 σ2 + c3 σ3
    CMatrix2::new(
        C64::new(c[0] + c[3], 0.0),
        C64::new(c[1], -c[2]),
        C64::new(c[1], c[2]),
        C64::new(c[0] - c[3], 0.0),
    )
}

/// `M(p) = p^μ σ_μ`; hermitian with `det M(p) = p²`.
pub fn m_of(p: FourVector) -> CMatrix2 {
    pauli_combination(p.to_array())
}

/// Recovers the four-vector from a hermitian `M(p)`.
pub fn four_vector_of(m: &CMatrix2) -> FourVector {
    let a = &m.0;
    FourVector::new(
        0.5 * (a[0][0].re + a[1][1].re),
        0.5 * (a[0][1].re + a[1][0].re),
        0.5 * (a[1][0].im - a[0][1].im),
        0.5 * (a[0][0].re - a[1][1].re),
    )
}

/// `p·σ = p⁰ - p⃗·σ⃗`.
pub fn p_dot_sigma(p: FourVector) -> CMatrix2 {
    pauli_combination([p.t, -p.x, -p.y, -p.z])
}

/// `p·σ̄ = p⁰ + p⃗·σ⃗`, identical to `M(p)`.
pub fn p_dot_sigma_bar(p: FourVector) -> CMatrix2 {
    m_of(p)
}

/// Upper-index `σ^μ = (σ_0, σ⃗)`.
pub fn sigma_upper(mu: usize) -> Result<CMatrix2> {
    pauli(mu)
}

/// Upper-index `σ̄^μ = (σ_0, -σ⃗)`.
pub fn sigma_bar_upper(mu: usize) -> Result<CMatrix2> {
    let s = pauli(mu)?;
    Ok(if mu == 0 { s } else { -s })
}

/// Eigendecomposition of a hermitian 2x2 matrix.
#[derive(Clone, Copy, Debug)]
pub struct HermitianEig {
    /// Columns are the orthonormal eigenvectors.
    pub vectors: CMatrix2,
    /// Eigenvalues, `values[0] >= values[1]`.
    pub values: [f64; 2],
}

impl HermitianEig {
    /// `U f(Λ) U†` for a real function applied to the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix2 {
        let u = self.vectors;
        u * CMatrix2::real_diag(f(self.values[0]), f(self.values[1])) * u.adjoint()
    }
}

/// Closed-form eigendecomposition `A = U diag(λ1, λ2) U†` with `λ1 >= λ2`.
/// At exact degeneracy `U` is the identity.
pub fn hermitian_eig(a: &CMatrix2) -> Result<HermitianEig> {
    let scale = a.max_abs().max(1.0);
    if a.hermiticity_residual() > HERMITIAN_TOL * scale {
        return domain("matrix is not hermitian");
    }
    let p = a.0[0][0].re;
    let s = a.0[1][1].re;
    // Average the off-diagonal pair so the decomposition is of an exactly
    // hermitian matrix.
    let b = 0.5 * (a.0[0][1] + a.0[1][0].conj());
    let mean = 0.5 * (p + s);
    let half_gap = 0.5 * (p - s);
    let radius = half_gap.hypot(b.norm());
    let values = [mean + radius, mean - radius];
    if radius == 0.0 {
        return Ok(HermitianEig {
            vectors: CMatrix2::identity(),
            values,
        });
    }
    // Choose the better conditioned of the two eigenvector formulas for λ1.
    let (v1, v2) = if half_gap >= 0.0 {
        // (λ1 - s, b*)ᵀ and its orthogonal complement
        let x = C64::from(half_gap + radius);
        let y = b.conj();
        let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let v1 = [x / n, y / n];
        (v1, [-v1[1].conj(), v1[0].conj()])
    } else {
        // (b, λ1 - p)ᵀ
        let x = b;
        let y = C64::from(radius - half_gap);
        let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let v1 = [x / n, y / n];
        (v1, [-v1[1].conj(), v1[0].conj()])
    };
    Ok(HermitianEig {
        vectors: CMatrix2::new(v1[0], v2[0], v1[1], v2[1]),
        values,
    })
}

/// The unique hermitian positive definite square root.
pub fn hermitian_sqrt(a: &CMatrix2) -> Result<CMatrix2> {
    let eig = hermitian_eig(a)?;
    if !(eig.values[1] > 0.0) {
        return domain(format!(
            "matrix is not positive definite (eigenvalues {:?})",
            eig.values
        ));
    }
    Ok(eig.map(f64::sqrt))
}

/// `γ^μ` in the Weyl representation, `[[0, σ^μ], [σ̄^μ, 0]]`.
pub fn gamma(mu: usize) -> Result<CMatrix4> {
    let z = CMatrix2::zero();
    Ok(CMatrix4::from_blocks(&z, &sigma_upper(mu)?, &sigma_bar_upper(mu)?, &z))
}

/// `γ⁵ = iγ⁰γ¹γ²γ³ = diag(-1, +1)`.
pub fn gamma5() -> CMatrix4 {
    let g = |m| gamma(m).expect("index in range");
    (g(0) * g(1) * g(2) * g(3)).scale(I)
}

pub fn gammas() -> [CMatrix4; 4] {
    [0, 1, 2, 3].map(|mu| gamma(mu).expect("index in range"))
}

/// Feynman slash `p_μγ^μ = [[0, p·σ], [p·σ̄, 0]]`.
pub fn slash(p: FourVector) -> CMatrix4 {
    let z = CMatrix2::zero();
    CMatrix4::from_blocks(&z, &p_dot_sigma(p), &p_dot_sigma_bar(p), &z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinorKind {
    /// Positive-energy particle spinor `u`.
    Particle,
    /// Antiparticle spinor `v`.
    Antiparticle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    One,
    Two,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::One, Polarization::Two];

    pub fn index(self) -> usize {
        match self {
            Polarization::One => 0,
            Polarization::Two => 1,
        }
    }

    fn basis(self) -> [C64; 2] {
        match self {
            Polarization::One => [ONE, ZERO],
            Polarization::Two => [ZERO, ONE],
        }
    }

    /// The `η_α` used for `v` spinors: `η_1 = e_2`, `η_2 = e_1`.
    fn flipped_basis(self) -> [C64; 2] {
        match self {
            Polarization::One => [ZERO, ONE],
            Polarization::Two => [ONE, ZERO],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracSpinor {
    pub components: [C64; 4],
    pub kind: SpinorKind,
    pub momentum: MassShellPoint,
    pub polarization: Polarization,
}

impl DiracSpinor {
    /// Row spinor `ψ̄ = ψ†γ⁰`.
    pub fn bar(&self) -> [C64; 4] {
        let c = &self.components;
        [c[2].conj(), c[3].conj(), c[0].conj(), c[1].conj()]
    }
}

/// The square roots `((p·σ)^½, (p·σ̄)^½)` for a massive shell point.
#[derive(Clone, Copy, Debug)]
pub struct ShellRoots {
    pub sigma: CMatrix2,
    pub sigma_bar: CMatrix2,
}

impl ShellRoots {
    pub fn new(p: &MassShellPoint) -> Result<Self> {
        if !(p.mass() > 0.0) {
            return domain("spinors require a strictly positive mass");
        }
        let k = p.momentum();
        Ok(ShellRoots {
            sigma: hermitian_sqrt(&p_dot_sigma(k))?,
            sigma_bar: hermitian_sqrt(&p_dot_sigma_bar(k))?,
        })
    }
}

fn stack(top: [C64; 2], bottom: [C64; 2]) -> [C64; 4] {
    [top[0], top[1], bottom[0], bottom[1]]
}

/// `u(p, α) = ((p·σ)^½ e_α, (p·σ̄)^½ e_α)`.
pub fn u_spinor(p: &MassShellPoint, alpha: Polarization) -> Result<DiracSpinor> {
    let r = ShellRoots::new(p)?;
    let e = alpha.basis();
    Ok(DiracSpinor {
        components: stack(r.sigma.apply(e), r.sigma_bar.apply(e)),
        kind: SpinorKind::Particle,
        momentum: *p,
        polarization: alpha,
    })
}

/// `v(p, α) = ((p·σ)^½ η_α, -(p·σ̄)^½ η_α)`.
pub fn v_spinor(p: &MassShellPoint, alpha: Polarization) -> Result<DiracSpinor> {
    let r = ShellRoots::new(p)?;
    let e = alpha.flipped_basis();
    let low = r.sigma_bar.apply(e);
    Ok(DiracSpinor {
        components: stack(r.sigma.apply(e), [-low[0], -low[1]]),
        kind: SpinorKind::Antiparticle,
        momentum: *p,
        polarization: alpha,
    })
}

/// `ψ̄ Γ χ` for a row spinor `ψ̄` and column spinor `χ`.
pub fn sandwich(row: &[C64; 4], m: &CMatrix4, col: &[C64; 4]) -> C64 {
    let mc = m.apply(col);
    row.iter().zip(mc.iter()).map(|(a, b)| a * b).sum()
}

pub fn row_dot(row: &[C64; 4], col: &[C64; 4]) -> C64 {
    row.iter().zip(col.iter()).map(|(a, b)| a * b).sum()
}

/// Outer product `ψ ψ̄`.
pub fn outer_bar(s: &DiracSpinor) -> CMatrix4 {
    let b = s.bar();
    let mut m = CMatrix4::zero();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = s.components[i] * b[j];
        }
    }
    m
}

/// The simple external vertex `(p'·σ)^½ σ̄^μ (p·σ)^½ + (p'·σ̄)^½ σ^μ (p·σ̄)^½`,
/// whose `(α', α)` entry is `ū(p', α') γ^μ u(p, α)`.
pub fn simple_vertex(p_out: &MassShellPoint, p_in: &MassShellPoint, mu: usize) -> Result<CMatrix2> {
    let a = ShellRoots::new(p_out)?;
    let b = ShellRoots::new(p_in)?;
    Ok(a.sigma * sigma_bar_upper(mu)? * b.sigma + a.sigma_bar * sigma_upper(mu)? * b.sigma_bar)
}

/// The general external vertex for a kernel `Θ^μ`, `μ = 0..3`: entry
/// `(α', α)` of the `μ`-th matrix is `ū(p', α') Θ^μ u(p, α)`.
pub fn general_vertex(p_out: &MassShellPoint, p_in: &MassShellPoint, theta: &[CMatrix4; 4]) -> Result<[CMatrix2; 4]> {
    let a = ShellRoots::new(p_out)?;
    let b = ShellRoots::new(p_in)?;
    Ok(theta.map(|t| {
        let (t1, t2, t3, t4) = (t.block(0, 0), t.block(0, 1), t.block(1, 0), t.block(1, 1));
        (a.sigma * t3 + a.sigma_bar * t1) * b.sigma + (a.sigma * t4 + a.sigma_bar * t2) * b.sigma_bar
    }))
}
