//! Spin-averaged squared amplitudes for `e⁺e⁻ → γ → l⁺l⁻` and
//! `e⁺e⁻ → Z⁰ → μ⁺μ⁻`, their propagator factors, and an explicit
//! polarization-sum oracle.

use std::f64::consts::PI;

use crate::clifford::{gammas, pauli, row_dot, sandwich, u_spinor, v_spinor, Polarization, C64};
use crate::error::{domain, Error, Result};
use crate::minkowski::{minkowski_dot, FourVector, MassShellPoint, METRIC};

/// Relative width of the excluded region around a propagator pole,
/// `|q² - M²| < POLE_EPS · max(1, M²)`.
pub const POLE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Process {
    /// `e⁺e⁻ → γ → l⁺l⁻`; the scanned mass is the outgoing lepton mass.
    QedLepton,
    /// `e⁺e⁻ → Z⁰ → μ⁺μ⁻`; the scanned mass is the vector boson mass.
    ZBoson,
}

impl Process {
    pub fn name(self) -> &'static str {
        match self {
            Process::QedLepton => "qed-lepton",
            Process::ZBoson => "z-boson",
        }
    }
}

/// Which amplitude to use together with its physical constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessSpec {
    pub process: Process,
    /// Mass of the incoming particles (MeV).
    pub m_in: f64,
    /// Known outgoing mass; used only by [`Process::ZBoson`].
    pub m_out: f64,
    /// `α` for QED or `α_W` for the weak process.
    pub coupling: f64,
}

impl ProcessSpec {
    pub fn qed_lepton(m: f64, alpha: f64) -> Self {
        ProcessSpec {
            process: Process::QedLepton,
            m_in: m,
            m_out: 0.0,
            coupling: alpha,
        }
    }

    pub fn z_boson(m_e: f64, m_mu: f64, alpha_w: f64) -> Self {
        ProcessSpec {
            process: Process::ZBoson,
            m_in: m_e,
            m_out: m_mu,
            coupling: alpha_w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let masses_ok = self.m_in > 0.0 && (self.process == Process::QedLepton || self.m_out > 0.0);
        // a zero coupling is allowed: it switches the interaction off
        if !masses_ok || !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(Error::Config(format!("invalid process parameters: {self:?}")));
        }
        Ok(())
    }

    /// Name of the scanned mass as it appears in reports.
    pub fn candidate_symbol(&self) -> &'static str {
        match self.process {
            Process::QedLepton => "m_prime",
            Process::ZBoson => "M",
        }
    }

    /// Mass of the outgoing pair given a candidate value of the scanned mass.
    pub fn outgoing_mass(&self, candidate: f64) -> f64 {
        match self.process {
            Process::QedLepton => candidate,
            Process::ZBoson => self.m_out,
        }
    }

    /// `Φ` evaluated through the closed trace formula.
    pub fn phi(&self, candidate: f64, k: &Kinematics) -> Result<f64> {
        match self.process {
            Process::QedLepton => phi_qed(self.coupling, self.m_in, candidate, k),
            Process::ZBoson => phi_z(self.coupling, candidate, self.m_in, self.m_out, k),
        }
    }

    /// Same as [`ProcessSpec::phi`] with bounds checks skipped; callers
    /// guarantee the pole guard themselves.
    pub(crate) fn phi_unchecked(&self, candidate: f64, k: &Kinematics) -> f64 {
        let e2 = 4.0 * PI * self.coupling;
        match self.process {
            Process::QedLepton => {
                let q2 = k.transfer().norm_sqr();
                e2 * e2 / (q2 * q2) * lepton_bracket(self.m_in, candidate, k)
            }
            Process::ZBoson => {
                let d = k.transfer().norm_sqr() - candidate * candidate;
                z_color_constant(e2.sqrt()) / (d * d) * lepton_bracket(self.m_in, self.m_out, k)
            }
        }
    }
}

/// Incoming antiparticle/particle momenta `p₁, p₂` and outgoing
/// antiparticle/particle momenta `p₁', p₂'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    pub p1: FourVector,
    pub p2: FourVector,
    pub p1_out: FourVector,
    pub p2_out: FourVector,
}

impl Kinematics {
    pub fn transfer(&self) -> FourVector {
        self.p1 + self.p2
    }

    pub fn map(&self, f: impl Fn(FourVector) -> FourVector) -> Kinematics {
        Kinematics {
            p1: f(self.p1),
            p2: f(self.p2),
            p1_out: f(self.p1_out),
            p2_out: f(self.p2_out),
        }
    }
}

/// `8[(p₁·p₁')(p₂·p₂') + (p₂·p₁')(p₁·p₂') + m²(p₁'·p₂') + m'²(p₁·p₂) + 2m²m'²]`,
/// the polarization average `Ψ` of the bare current product.
pub fn lepton_bracket(m: f64, m_out: f64, k: &Kinematics) -> f64 {
    let d = minkowski_dot;
    let (m2, mo2) = (m * m, m_out * m_out);
    8.0 * (d(k.p1, k.p1_out) * d(k.p2, k.p2_out)
        + d(k.p2, k.p1_out) * d(k.p1, k.p2_out)
        + m2 * d(k.p1_out, k.p2_out)
        + mo2 * d(k.p1, k.p2)
        + 2.0 * m2 * mo2)
}

/// Scalar part `1/q²` of the off-shell photon propagator `-η_μν/q²`.
pub fn propagator_offshell_photon(q: FourVector) -> Result<f64> {
    let q2 = q.norm_sqr();
    if !(q2.abs() >= POLE_EPS) {
        return domain(format!("photon propagator on its pole (q^2 = {q2})"));
    }
    Ok(1.0 / q2)
}

/// `(-η_μν + q_μq_ν/M²)/(q² - M²)` with both indices lowered.
pub fn propagator_offshell_massive(q: FourVector, mass: f64) -> Result<[[f64; 4]; 4]> {
    let q2 = q.norm_sqr();
    let gap = q2 - mass * mass;
    if !(gap.abs() >= POLE_EPS * (mass * mass).max(1.0)) {
        return domain(format!("massive propagator on its pole (q^2 - M^2 = {gap})"));
    }
    let ql = q.lowered();
    let mut t = [[0.0; 4]; 4];
    for (mu, row) in t.iter_mut().enumerate() {
        for (nu, v) in row.iter_mut().enumerate() {
            let eta = if mu == nu { METRIC[mu] } else { 0.0 };
            *v = (-eta + ql[mu] * ql[nu] / (mass * mass)) / gap;
        }
    }
    Ok(t)
}

/// `Φ` for `e⁺e⁻ → γ → l⁺l⁻`: `e⁴Q⁻⁴ · 8[...]` with `e² = 4πα`.
pub fn phi_qed(alpha: f64, m: f64, m_out: f64, k: &Kinematics) -> Result<f64> {
    let q = k.transfer();
    if !(q.norm_sqr() > 0.0) {
        return domain("Q^2 must be positive");
    }
    let inv_q2 = propagator_offshell_photon(q)?;
    let e2 = 4.0 * PI * alpha;
    Ok(e2 * e2 * inv_q2 * inv_q2 * lepton_bracket(m, m_out, k))
}

/// `c = (1/12) g⁴ Σ_α Σ_{i₁i₂i₁'i₂'} |T^α_{i₁i₂} T^α_{i₁'i₂'}|²` with
/// `T^α = σ^α/2`, summed term by term.
pub fn z_color_constant(g_w: f64) -> f64 {
    let mut sum = 0.0;
    for alpha in 1..=3 {
        let t = pauli(alpha).expect("index in range").scale_re(0.5);
        for i1 in 0..2 {
            for i2 in 0..2 {
                for j1 in 0..2 {
                    for j2 in 0..2 {
                        sum += (t.0[i1][i2] * t.0[j1][j2]).norm_sqr();
                    }
                }
            }
        }
    }
    g_w.powi(4) * sum / 12.0
}

/// `Φ` for `e⁺e⁻ → Z⁰ → μ⁺μ⁻` at boson mass `mass`: `c (q² - M²)⁻² Ψ`.
pub fn phi_z(alpha_w: f64, mass: f64, m_e: f64, m_mu: f64, k: &Kinematics) -> Result<f64> {
    let q2 = k.transfer().norm_sqr();
    let gap = q2 - mass * mass;
    if !(gap.abs() >= POLE_EPS * (mass * mass).max(1.0)) {
        return domain(format!("Z propagator on its pole (q^2 - M^2 = {gap})"));
    }
    let g_w = (4.0 * PI * alpha_w).sqrt();
    Ok(z_color_constant(g_w) / (gap * gap) * lepton_bracket(m_e, m_mu, k))
}

fn shell(m: f64, p: FourVector) -> Result<MassShellPoint> {
    MassShellPoint::with_mass(m, p)
}

/// Currents `J^μ = v̄(p₁,α₁)γ^μu(p₂,α₂)` for all polarizations,
/// indexed `[α₁][α₂][μ]`.
fn incoming_currents(m: f64, p1: FourVector, p2: FourVector) -> Result<[[[C64; 4]; 2]; 2]> {
    let g = gammas();
    let (s1, s2) = (shell(m, p1)?, shell(m, p2)?);
    let mut out = [[[C64::new(0.0, 0.0); 4]; 2]; 2];
    for a1 in Polarization::ALL {
        let vbar = v_spinor(&s1, a1)?.bar();
        for a2 in Polarization::ALL {
            let u = u_spinor(&s2, a2)?.components;
            for (mu, gm) in g.iter().enumerate() {
                out[a1.index()][a2.index()][mu] = sandwich(&vbar, gm, &u);
            }
        }
    }
    Ok(out)
}

/// Currents `ū(p₂',α₂')γ^νv(p₁',α₁')`, indexed `[α₁'][α₂'][ν]`.
fn outgoing_currents(m: f64, p1: FourVector, p2: FourVector) -> Result<[[[C64; 4]; 2]; 2]> {
    let g = gammas();
    let (s1, s2) = (shell(m, p1)?, shell(m, p2)?);
    let mut out = [[[C64::new(0.0, 0.0); 4]; 2]; 2];
    for a1 in Polarization::ALL {
        let v = v_spinor(&s1, a1)?.components;
        for a2 in Polarization::ALL {
            let ubar = u_spinor(&s2, a2)?.bar();
            for (nu, gn) in g.iter().enumerate() {
                let gv = gn.apply(&v);
                out[a1.index()][a2.index()][nu] = row_dot(&ubar, &gv);
            }
        }
    }
    Ok(out)
}

/// `(1/4) Σ_pol |J₁^μ D_μν J₂^ν|²` for a lowered-index tensor `D`.
fn averaged_current_product(j_in: &[[[C64; 4]; 2]; 2], j_out: &[[[C64; 4]; 2]; 2], tensor: &[[f64; 4]; 4]) -> f64 {
    let mut sum = 0.0;
    for jin in j_in.iter().flatten() {
        for jout in j_out.iter().flatten() {
            let mut amp = C64::new(0.0, 0.0);
            for mu in 0..4 {
                for nu in 0..4 {
                    if tensor[mu][nu] != 0.0 {
                        amp += jin[mu] * jout[nu] * tensor[mu][nu];
                    }
                }
            }
            sum += amp.norm_sqr();
        }
    }
    0.25 * sum
}

/// `Φ` from explicit spinors, gamma matrices and the propagator tensor,
/// summed over all polarizations (and, for the weak process, all `su(2)`
/// indices with the generator sum inside the modulus).
pub fn brute_force_phi(spec: &ProcessSpec, candidate: f64, k: &Kinematics) -> Result<f64> {
    let m_out = spec.outgoing_mass(candidate);
    let q = k.transfer();
    let j_in = incoming_currents(spec.m_in, k.p1, k.p2)?;
    let j_out = outgoing_currents(m_out, k.p1_out, k.p2_out)?;
    let e2 = 4.0 * PI * spec.coupling;
    match spec.process {
        Process::QedLepton => {
            if !(q.norm_sqr() > 0.0) {
                return domain("Q^2 must be positive");
            }
            let s = propagator_offshell_photon(q)?;
            let mut tensor = [[0.0; 4]; 4];
            for (mu, row) in tensor.iter_mut().enumerate() {
                row[mu] = -METRIC[mu] * s;
            }
            Ok(e2 * e2 * averaged_current_product(&j_in, &j_out, &tensor))
        }
        Process::ZBoson => {
            let tensor = propagator_offshell_massive(q, candidate)?;
            let t: Vec<_> = (1..=3)
                .map(|a| pauli(a).expect("index in range").scale_re(0.5))
                .collect();
            let mut color = 0.0;
            for i1 in 0..2 {
                for i2 in 0..2 {
                    for j1 in 0..2 {
                        for j2 in 0..2 {
                            let s: C64 = t.iter().map(|ta| ta.0[i1][i2] * ta.0[j1][j2]).sum();
                            color += s.norm_sqr();
                        }
                    }
                }
            }
            // g_W⁴ = e2², with e2 = 4π α_W playing the role of g_W²
            let c = e2 * e2 * color / 12.0;
            Ok(c * averaged_current_product(&j_in, &j_out, &tensor))
        }
    }
}

/// `Σ_pol |X|²` for the `q_μq_ν` part of the massive propagator numerator,
/// `X = v̄(p₁)γ^μu(p₂) q_μq_ν ū(p₂')γ^νv(p₁')`, together with the same sum
/// for the `η_μν` part. The first vanishes by the Dirac equation.
pub fn longitudinal_residual(m_in: f64, m_out: f64, k: &Kinematics) -> Result<(f64, f64)> {
    let q = k.transfer().lowered();
    let j_in = incoming_currents(m_in, k.p1, k.p2)?;
    let j_out = outgoing_currents(m_out, k.p1_out, k.p2_out)?;
    let mut qq = [[0.0; 4]; 4];
    let mut eta = [[0.0; 4]; 4];
    for mu in 0..4 {
        eta[mu][mu] = METRIC[mu];
        for nu in 0..4 {
            qq[mu][nu] = q[mu] * q[nu];
        }
    }
    Ok((
        4.0 * averaged_current_product(&j_in, &j_out, &qq),
        4.0 * averaged_current_product(&j_in, &j_out, &eta),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn photon_propagator_examples() {
        assert_eq!(
            propagator_offshell_photon(FourVector::new(2.0, 0.0, 0.0, 0.0)).unwrap(),
            0.25
        );
        assert!(propagator_offshell_photon(FourVector::new(1.0, 1.0, 0.0, 0.0)).is_err());
        assert!(propagator_offshell_photon(FourVector::new(1.0, 2.0, 0.0, 0.0)).unwrap() < 0.0);
    }

    #[test]
    fn massive_propagator_examples() {
        let t = propagator_offshell_massive(FourVector::new(3.0, 0.0, 0.0, 0.0), 1.0).unwrap();
        let expect = [
            [(-1.0 + 9.0) / 8.0, 0.0, 0.0, 0.0],
            [0.0, 1.0 / 8.0, 0.0, 0.0],
            [0.0, 0.0, 1.0 / 8.0, 0.0],
            [0.0, 0.0, 0.0, 1.0 / 8.0],
        ];
        assert_eq!(t, expect);

        let q = FourVector::new(3.0, 0.4, -1.2, 0.8);
        let t = propagator_offshell_massive(q, 2.0).unwrap();
        for mu in 0..4 {
            for nu in 0..4 {
                assert_eq!(t[mu][nu], t[nu][mu]);
            }
        }
        let heavy = propagator_offshell_massive(q, 1e8).unwrap();
        assert!(heavy.iter().flatten().all(|v| v.abs() < 1e-15));
        assert!(propagator_offshell_massive(FourVector::new(2.0, 0.0, 0.0, 0.0), 2.0).is_err());
    }

    #[test]
    fn color_constant_closed_form() {
        // 3 generators × 16 index terms; every generator contributes 1/4
        for g in [0.5, 1.0, 0.0035] {
            let c = z_color_constant(g);
            assert!((c - g.powi(4) / 16.0).abs() <= 1e-15 * g.powi(4));
        }
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let k = Kinematics {
            p1: FourVector::new(10.0, 0.0, 0.0, (100.0f64 - 1.0).sqrt()),
            p2: FourVector::new(10.0, 0.0, 0.0, -(100.0f64 - 1.0).sqrt()),
            p1_out: FourVector::new(10.0, 8.0, 0.0, 0.0),
            p2_out: FourVector::new(10.0, -8.0, 0.0, 0.0),
        };
        let spec = ProcessSpec::qed_lepton(1.0, 0.0);
        assert_eq!(brute_force_phi(&spec, 6.0, &k).unwrap(), 0.0);
        assert_eq!(spec.phi(6.0, &k).unwrap(), 0.0);
    }

    #[test]
    fn phi_qed_rejects_spacelike_transfer() {
        let k = Kinematics {
            p1: FourVector::new(1.0, 0.0, 0.0, 0.0),
            p2: FourVector::new(-1.0, 0.0, 0.0, 0.0),
            p1_out: FourVector::new(1.0, 0.0, 0.0, 0.0),
            p2_out: FourVector::new(1.0, 0.0, 0.0, 0.0),
        };
        assert!(phi_qed(0.01, 1.0, 1.0, &k).is_err());
    }
}
