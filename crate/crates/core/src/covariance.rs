//! Seeded random checks of the covariance laws behind the amplitudes:
//! slash intertwining, gamma conjugation, trace invariance and the `U(2)`
//! covariance of the external vertices.
//!
//! Every trial draws from its own ChaCha stream, keyed by the run seed and
//! the trial index, so a failing witness can be replayed from those two
//! numbers alone.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::amplitudes::{brute_force_phi, Kinematics, Process, ProcessSpec};
use crate::clifford::{gammas, general_vertex, simple_vertex, slash, CMatrix2, CMatrix4, C64};
use crate::cmframe::{cm_boost, induced_lorentz, lorentz_of, KElement};
use crate::error::{Error, Result};
use crate::minkowski::{apply_lorentz, on_shell, FourVector, LorentzMatrix, MassShellPoint, METRIC};

/// Tolerance for the 4x4 conjugation laws.
pub const CONJUGATION_TOL: f64 = 1e-9;
/// Tolerance for traces of products of up to six factors.
pub const TRACE_TOL: f64 = 1e-8;

/// Seed of a reproducible sample stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// The stream for one trial.
    pub fn trial_rng(self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(trial);
        rng
    }
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A random unitary 2x2 matrix: Gram-Schmidt on a complex Gaussian sample,
/// each column rotated to a real positive leading entry, then an overall
/// uniform phase.
pub fn sample_u2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix2 {
    loop {
        let c0 = [gaussian_c64(rng), gaussian_c64(rng)];
        let c1 = [gaussian_c64(rng), gaussian_c64(rng)];
        let phase: f64 = rng.random_range(0.0..2.0 * PI);
        let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
        if n0 < 1e-6 {
            continue;
        }
        let e0 = [c0[0] / n0, c0[1] / n0];
        let proj = e0[0].conj() * c1[0] + e0[1].conj() * c1[1];
        let r = [c1[0] - proj * e0[0], c1[1] - proj * e0[1]];
        let n1 = (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
        if n1 < 1e-6 {
            continue;
        }
        let e1 = [r[0] / n1, r[1] / n1];
        let fix = |e: [C64; 2]| {
            let lead = if e[0].norm() > 0.0 { e[0] } else { e[1] };
            let ph = lead.conj() / lead.norm();
            [e[0] * ph, e[1] * ph]
        };
        let (e0, e1) = (fix(e0), fix(e1));
        let g = C64::from_polar(1.0, phase);
        return CMatrix2::new(e0[0] * g, e1[0] * g, e0[1] * g, e1[1] * g);
    }
}

/// `exp(H)` for a traceless hermitian `H`.
fn exp_traceless_hermitian(a: f64, b: f64, c: f64) -> CMatrix2 {
    let r = (a * a + b * b + c * c).sqrt();
    let (ch, sh) = if r == 0.0 { (1.0, 1.0) } else { (r.cosh(), r.sinh() / r) };
    CMatrix2::new(
        C64::new(ch + sh * a, 0.0),
        C64::new(sh * b, -sh * c),
        C64::new(sh * b, sh * c),
        C64::new(ch - sh * a, 0.0),
    )
}

/// `a = u·exp(s H)` with `u` from [`sample_u2`] and `H` traceless hermitian
/// with entries uniform in `[-1, 1]`. With `spread = 0` the result is the
/// `u` that [`sample_u2`] would return from the same stream.
pub fn sample_k_with_spread<R: Rng + ?Sized>(rng: &mut R, spread: f64) -> KElement {
    let u = sample_u2(rng);
    let mut h = || spread * rng.random_range(-1.0..=1.0);
    let (a, b, c) = (h(), h(), h());
    KElement::new(u * exp_traceless_hermitian(a, b, c)).expect("unitary times unimodular")
}

/// A random element of `K`, see [`sample_k_with_spread`].
pub fn sample_k<R: Rng + ?Sized>(rng: &mut R) -> KElement {
    sample_k_with_spread(rng, 1.0)
}

/// A four-vector with components uniform in `[-scale, scale]`.
pub fn sample_vector<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> FourVector {
    let mut c = || rng.random_range(-scale..=scale);
    FourVector::new(c(), c(), c(), c())
}

/// A point on `H_m` with spatial components uniform in `[-scale, scale]`.
pub fn sample_shell<R: Rng + ?Sized>(rng: &mut R, m: f64, scale: f64) -> MassShellPoint {
    let mut c = || rng.random_range(-scale..=scale);
    on_shell(m, [c(), c(), c()]).expect("finite positive mass")
}

/// Result of a seeded check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub seed: RngSeed,
    pub trials: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    /// Trial index of the largest residual (lowest index on ties).
    pub worst_trial: usize,
    /// First trial whose residual exceeded the tolerance.
    pub first_failure: Option<usize>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn rel_diff4(a: &CMatrix4, b: &CMatrix4) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

fn rel_diff2(a: &CMatrix2, b: &CMatrix2) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

/// Runs `trial` on `trials` independent streams and collects residuals.
/// A trial that errors counts as an infinite residual. Returns the report
/// even when the check fails; see [`into_result`] for the error form.
pub fn run_check<F>(name: &'static str, seed: RngSeed, trials: usize, tolerance: f64, trial: F) -> CheckReport
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64>,
{
    let mut report = CheckReport {
        name,
        seed,
        trials,
        tolerance,
        max_residual: 0.0,
        worst_trial: 0,
        first_failure: None,
    };
    for i in 0..trials {
        let r = trial(&mut seed.trial_rng(i as u64)).unwrap_or(f64::INFINITY);
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if r > report.max_residual {
            report.max_residual = r;
            report.worst_trial = i;
        }
        if r > tolerance && report.first_failure.is_none() {
            report.first_failure = Some(i);
        }
    }
    report
}

/// `Ok(report)` when every trial passed, otherwise a verification error
/// naming the worst trial.
pub fn into_result(report: CheckReport) -> Result<CheckReport> {
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::Verification(format!(
            "{}: residual {:e} > {:e} at trial {} (seed {}), first failure at trial {}",
            report.name,
            report.max_residual,
            report.tolerance,
            report.worst_trial,
            report.seed.0,
            report.first_failure.unwrap_or(report.worst_trial),
        )))
    }
}

/// `|slash(Λp) - κ₄ slash(p) κ₄⁻¹|` relative, with `Λ` induced by `a`
/// without checking `|det a| = 1`.
pub fn slash_residual(a: &CMatrix2, p: FourVector) -> Result<f64> {
    let k = KElement::new_unchecked(*a);
    let (k4, k4_inv) = (k.block4()?, k.block4_inverse()?);
    let lhs = slash(apply_lorentz(&induced_lorentz(a), p));
    let rhs = k4 * slash(p) * k4_inv;
    Ok(rel_diff4(&lhs, &rhs))
}

/// Worst relative residual over `μ` of `κ₄ γ_μ κ₄⁻¹ = Λ^ν_μ γ_ν`, lower
/// indices, for the 4x4 conjugator `k4` and Lorentz matrix `l`.
pub fn gamma_conjugation_residual(k4: &CMatrix4, k4_inv: &CMatrix4, l: &LorentzMatrix) -> f64 {
    let lower: Vec<CMatrix4> = gammas().iter().zip(METRIC).map(|(g, s)| g.scale_re(s)).collect();
    (0..4)
        .map(|mu| {
            let lhs = *k4 * lower[mu] * *k4_inv;
            let rhs = (0..4).fold(CMatrix4::zero(), |acc, nu| acc + lower[nu].scale_re(l.entry(nu, mu)));
            rel_diff4(&lhs, &rhs)
        })
        .fold(0.0, f64::max)
}

/// `tr Π (slash(p_i) + s_i m_i)` for factors `(p_i, s_i m_i)`.
pub fn trace_of_product(factors: &[(FourVector, f64)]) -> C64 {
    factors
        .iter()
        .fold(CMatrix4::identity(), |acc, (p, m)| {
            acc * (slash(*p) + CMatrix4::identity().scale_re(*m))
        })
        .trace()
}

/// Relative residual of the simple and general (`Θ^μ = γ^μ`) vertex laws
/// `V(Λp', Λp)^μ = Λ^μ_ν a V(p', p)^ν a⁻¹` for a given `a`.
pub fn vertex_residual(a: &CMatrix2, p_out: &MassShellPoint, p_in: &MassShellPoint) -> Result<f64> {
    let l = induced_lorentz(a);
    let a_inv = a.inverse()?;
    let q_out = MassShellPoint::with_mass(p_out.mass(), apply_lorentz(&l, p_out.momentum()))?;
    let q_in = MassShellPoint::with_mass(p_in.mass(), apply_lorentz(&l, p_in.momentum()))?;
    let simple_before: Vec<CMatrix2> = (0..4).map(|nu| simple_vertex(p_out, p_in, nu)).collect::<Result<_>>()?;
    let simple_after: Vec<CMatrix2> = (0..4)
        .map(|mu| simple_vertex(&q_out, &q_in, mu))
        .collect::<Result<_>>()?;
    let g = gammas();
    let general_before = general_vertex(p_out, p_in, &g)?;
    let general_after = general_vertex(&q_out, &q_in, &g)?;
    let law = |before: &[CMatrix2], mu: usize| {
        let mixed = (0..4).fold(CMatrix2::zero(), |acc, nu| acc + before[nu].scale_re(l.entry(mu, nu)));
        *a * mixed * a_inv
    };
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        worst = worst.max(rel_diff2(&simple_after[mu], &law(&simple_before, mu)));
        worst = worst.max(rel_diff2(&general_after[mu], &law(&general_before, mu)));
    }
    Ok(worst)
}

/// Slash intertwining for random `κ ∈ K` and random four-vectors.
pub fn check_slash_intertwining(seed: RngSeed, trials: usize) -> CheckReport {
    run_check("slash intertwining", seed, trials, CONJUGATION_TOL, |rng| {
        let k = sample_k(rng);
        let p = sample_vector(rng, 3.0);
        slash_residual(&k.matrix(), p)
    })
}

/// Gamma conjugation for random `κ ∈ K`.
pub fn check_gamma_conjugation(seed: RngSeed, trials: usize) -> CheckReport {
    run_check("gamma conjugation", seed, trials, CONJUGATION_TOL, |rng| {
        let k = sample_k(rng);
        Ok(gamma_conjugation_residual(
            &k.block4()?,
            &k.block4_inverse()?,
            &lorentz_of(&k)?,
        ))
    })
}

/// Invariance of `tr Π (slash(p_i) ± m_i)` under a random `κ`, for random
/// tuples of one to six factors. The residual is relative to the product of
/// factor scales, the natural size of the trace.
pub fn check_trace_invariance(seed: RngSeed, trials: usize) -> CheckReport {
    run_check("trace invariance", seed, trials, TRACE_TOL, |rng| {
        let k = sample_k(rng);
        let l = lorentz_of(&k)?;
        let n = rng.random_range(1..=6);
        let mut before = Vec::with_capacity(n);
        let mut after = Vec::with_capacity(n);
        let mut scale = 4.0;
        for _ in 0..n {
            let p = sample_vector(rng, 2.0);
            let m: f64 = rng.random_range(0.0..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let lp = apply_lorentz(&l, p);
            let size = |v: FourVector| v.to_array().iter().map(|c| c.abs()).sum::<f64>();
            scale *= size(p).max(size(lp)) + m.abs();
            before.push((p, m));
            after.push((lp, m));
        }
        Ok((trace_of_product(&after) - trace_of_product(&before)).norm() / scale)
    })
}

/// Simple and general vertex covariance for random `a ∈ U(2)` and random
/// massive shells.
pub fn check_vertex_covariance(seed: RngSeed, trials: usize) -> CheckReport {
    run_check("vertex covariance", seed, trials, CONJUGATION_TOL, |rng| {
        let a = sample_u2(rng);
        let m_out = rng.random_range(0.1..2.0);
        let m_in = rng.random_range(0.1..2.0);
        let p_out = sample_shell(rng, m_out, 2.0);
        let p_in = sample_shell(rng, m_in, 2.0);
        vertex_residual(&a, &p_out, &p_in)
    })
}

/// Tolerance of the closed-form versus polarization-sum comparison.
pub const ORACLE_TOL: f64 = 1e-7;

/// A random on-shell configuration for `spec` in a random frame, with the
/// candidate mass. Incoming spatial momenta are uniform in `[-scale, scale]`
/// and resampled until the pair can produce the outgoing mass; for the weak
/// process the candidate stays at least 1% away from the pole in `q²`.
pub fn sample_kinematics<R: Rng + ?Sized>(rng: &mut R, spec: &ProcessSpec, scale: f64) -> Result<(f64, Kinematics)> {
    loop {
        let p1 = sample_shell(rng, spec.m_in, scale);
        let p2 = sample_shell(rng, spec.m_in, scale);
        let boost = cm_boost(&p1, &p2)?;
        let e = boost.energy;
        let candidate = match spec.process {
            Process::QedLepton => rng.random_range(0.05..0.95) * e,
            Process::ZBoson => rng.random_range(0.05..1.5) * 2.0 * e,
        };
        let m_out = spec.outgoing_mass(candidate);
        if !(e > 1.01 * m_out) {
            continue;
        }
        if spec.process == Process::ZBoson && (4.0 * e * e - candidate * candidate).abs() < 0.01 * 4.0 * e * e {
            continue;
        }
        let ct: f64 = rng.random_range(-1.0..=1.0);
        let ph: f64 = rng.random_range(0.0..2.0 * PI);
        let st = (1.0 - ct * ct).sqrt();
        let q = (e * e - m_out * m_out).sqrt();
        let d = [q * st * ph.cos(), q * st * ph.sin(), q * ct];
        let cm = Kinematics {
            p1: boost.r1,
            p2: boost.r2,
            p1_out: FourVector::new(e, d[0], d[1], d[2]),
            p2_out: FourVector::new(e, -d[0], -d[1], -d[2]),
        };
        let l = lorentz_of(&sample_k(rng))?;
        return Ok((candidate, cm.map(|p| apply_lorentz(&l, p))));
    }
}

/// Closed trace formula against [`brute_force_phi`] on random kinematics.
pub fn check_phi_oracle(spec: &ProcessSpec, seed: RngSeed, trials: usize) -> CheckReport {
    let (name, scale) = match spec.process {
        Process::QedLepton => ("phi oracle (qed-lepton)", 20.0 * spec.m_in.max(1.0)),
        Process::ZBoson => ("phi oracle (z-boson)", 20.0 * spec.m_out.max(1.0)),
    };
    run_check(name, seed, trials, ORACLE_TOL, |rng| {
        let (candidate, k) = sample_kinematics(rng, spec, scale)?;
        let closed = spec.phi(candidate, &k)?;
        let brute = brute_force_phi(spec, candidate, &k)?;
        Ok((closed - brute).abs() / closed.abs().max(brute.abs()).max(f64::MIN_POSITIVE))
    })
}

/// All four checks with one seed.
pub fn verify_all(seed: RngSeed, trials: usize) -> Vec<CheckReport> {
    vec![
        check_slash_intertwining(seed, trials),
        check_gamma_conjugation(seed, trials),
        check_trace_invariance(seed, trials),
        check_vertex_covariance(seed, trials),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity(a: &CMatrix2) -> f64 {
        (a.adjoint() * *a).max_abs_diff(&CMatrix2::identity())
    }

    #[test]
    fn u2_samples_are_unitary() {
        let mut rng = RngSeed(7).trial_rng(0);
        for _ in 0..1000 {
            let a = sample_u2(&mut rng);
            assert!(unitarity(&a) < 1e-12);
            assert!((a.det().norm() - 1.0).abs() < 1e-12);
            assert!((a * a.adjoint()).max_abs_diff(&CMatrix2::identity()) < 1e-12);
        }
    }

    #[test]
    fn u2_trace_mean_is_small() {
        let mut rng = RngSeed(11).trial_rng(0);
        let n = 100_000;
        let mut sum = C64::new(0.0, 0.0);
        for _ in 0..n {
            sum += sample_u2(&mut rng).trace() * 0.5;
        }
        assert!((sum / n as f64).norm() <= 0.02);
    }

    #[test]
    fn same_seed_same_stream() {
        let a = sample_k(&mut RngSeed(3).trial_rng(9));
        let b = sample_k(&mut RngSeed(3).trial_rng(9));
        let c = sample_k(&mut RngSeed(3).trial_rng(10));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_spread_is_u2_sample() {
        let k = sample_k_with_spread(&mut RngSeed(5).trial_rng(1), 0.0);
        let u = sample_u2(&mut RngSeed(5).trial_rng(1));
        assert_eq!(k.matrix(), u);
    }

    #[test]
    fn k_samples_are_unimodular_and_lorentz() {
        let mut rng = RngSeed(2).trial_rng(0);
        for _ in 0..500 {
            let k = sample_k(&mut rng);
            assert!((k.matrix().det().norm() - 1.0).abs() < 1e-10);
            assert!(lorentz_of(&k).unwrap().is_proper_orthochronous(1e-9));
        }
    }

    #[test]
    fn identity_residuals_vanish() {
        let p = FourVector::new(1.5, -0.2, 0.7, 0.3);
        assert_eq!(slash_residual(&CMatrix2::identity(), p).unwrap(), 0.0);
        let id = CMatrix4::identity();
        assert_eq!(gamma_conjugation_residual(&id, &id, &LorentzMatrix::identity()), 0.0);
        let p_out = on_shell(0.4, [0.3, -1.0, 0.2]).unwrap();
        let p_in = on_shell(1.1, [-0.5, 0.1, 0.9]).unwrap();
        assert!(vertex_residual(&CMatrix2::identity(), &p_out, &p_in).unwrap() < 1e-15);
    }

    #[test]
    fn checks_pass() {
        for report in verify_all(RngSeed(42), 200) {
            assert!(report.passed(), "{report:?}");
            assert!(into_result(report).is_ok());
        }
    }

    #[test]
    fn oracles_pass() {
        let qed = ProcessSpec::qed_lepton(0.511, 1.0 / 137.036);
        let z = ProcessSpec::z_boson(0.51099895, 105.7, 1e-6);
        for spec in [qed, z] {
            let r = check_phi_oracle(&spec, RngSeed(4), 50);
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn corrupted_kappa_fails() {
        let report = run_check("corrupted", RngSeed(1), 20, CONJUGATION_TOL, |rng| {
            let a = sample_k(rng).matrix().scale_re(1.3);
            slash_residual(&a, sample_vector(rng, 1.0))
        });
        assert!(!report.passed());
        assert_eq!(report.first_failure, Some(0));
        assert!(matches!(into_result(report), Err(Error::Verification(_))));
    }

    #[test]
    fn non_unitary_vertex_law_fails() {
        let report = run_check("boosted vertex", RngSeed(1), 20, CONJUGATION_TOL, |rng| {
            let k = sample_k(rng);
            let p_out = sample_shell(rng, 0.5, 1.0);
            let p_in = sample_shell(rng, 0.8, 1.0);
            vertex_residual(&k.matrix(), &p_out, &p_in)
        });
        assert!(!report.passed());
    }

    #[test]
    fn unitary_embedding_fixes_sigma() {
        // with a in both blocks, Λ^μ_ν a σ^ν a⁻¹ = σ^μ
        let mut rng = RngSeed(8).trial_rng(0);
        for _ in 0..100 {
            let a = sample_u2(&mut rng);
            let l = induced_lorentz(&a);
            let a_inv = a.inverse().unwrap();
            for mu in 0..4 {
                let s = (0..4).fold(CMatrix2::zero(), |acc, nu| {
                    acc + crate::clifford::sigma_upper(nu).unwrap().scale_re(l.entry(mu, nu))
                });
                let lhs = a * s * a_inv;
                assert!(lhs.max_abs_diff(&crate::clifford::sigma_upper(mu).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn trace_oracles() {
        let p1 = FourVector::new(2.0, 0.3, -0.4, 1.1);
        let p2 = FourVector::new(1.4, -0.7, 0.2, 0.5);
        let (m1, m2) = (0.6, 0.9);
        let dot = crate::minkowski::minkowski_dot(p1, p2);
        let t = trace_of_product(&[(p1, m1), (p2, m2)]);
        assert!((t - C64::from(4.0 * (dot + m1 * m2))).norm() < 1e-12);
        let t = trace_of_product(&[(p1, m1), (p2, -m2)]);
        assert!((t - C64::from(4.0 * (dot - m1 * m2))).norm() < 1e-12);
        let p3 = FourVector::new(0.5, 0.1, 0.8, -0.3);
        assert!(trace_of_product(&[(p1, 0.0), (p2, 0.0), (p3, 0.0)]).norm() < 1e-13);
    }
}
