//! The integral mass spectrum: phase-space quadrature over incoming mass
//! shells and outgoing directions, differential and total cross sections,
//! and peak location.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::amplitudes::{Kinematics, ProcessSpec, POLE_EPS};
use crate::cmframe::{cm_boost, CmBoost};
use crate::error::{domain, Error, Result};
use crate::minkowski::{omega, on_shell, FourVector, MassShellPoint};

/// Discretization of each incoming three-momentum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OuterGrid {
    /// Midpoints of `2·N_integral` cells per axis on the cube
    /// `[-Λ, Λ]³`, each weighted by its volume `(Λ/N_integral)³`.
    #[default]
    Box,
    /// Spherical midpoint grid on the ball `|p| <= Λ` with the invariant
    /// weight `r² sinθ ΔrΔθΔφ / (2ω)`.
    Sphere,
}

impl OuterGrid {
    pub fn name(&self) -> &'static str {
        match self {
            OuterGrid::Box => "box",
            OuterGrid::Sphere => "sphere",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "box" => Some(OuterGrid::Box),
            "sphere" => Some(OuterGrid::Sphere),
            _ => None,
        }
    }
}

/// Quadrature parameters, named after the run-listing identifiers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Cutoff of the incoming three-momenta (MeV).
    pub lambda_integral: f64,
    /// Subdivisions of `[0, Λ]` along each radial or axial direction.
    pub n_integral: usize,
    /// Subdivisions per spherical angle, for the outgoing directions and
    /// for the spherical outer grid.
    pub n_int_angle: usize,
    /// Lower edge of the scanned mass window (MeV).
    pub start: f64,
    /// Upper edge of the scanned mass window (MeV).
    pub end: f64,
    /// Number of mass bins.
    pub n_m_prime: usize,
    pub grid: OuterGrid,
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.n_integral == 0 || self.n_int_angle == 0 || self.n_m_prime == 0 {
            return bad("N_integral, N_int_angle and N_m_prime must be at least 1");
        }
        if !(self.start >= 0.0) || !(self.end > self.start) || !self.end.is_finite() {
            return bad("mass window must satisfy 0 <= Start < End");
        }
        if !(self.lambda_integral > 0.0) || !self.lambda_integral.is_finite() {
            return bad("Lambda_integral must be positive");
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        (self.end - self.start) / self.n_m_prime as f64
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.n_m_prime).map(|i| self.start + (i as f64 + 0.5) * w).collect()
    }
}

/// Sampled spectrum density over a mass window.
///
/// The integrand is proportional to the square of the coupling, so the
/// spectrum is computed once at unit coupling (`reduced`) and scaled.
/// Peak positions are located on `reduced` and therefore do not depend on
/// the coupling at all.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumCurve {
    /// `(bin center, density)` pairs with strictly increasing centers.
    pub bins: Vec<(f64, f64)>,
    /// Densities at unit coupling.
    pub reduced: Vec<f64>,
    /// `coupling²`; `bins[i].1 == reduced[i] * coupling_scale`.
    pub coupling_scale: f64,
    pub config: QuadratureConfig,
    pub process: ProcessSpec,
}

impl SpectrumCurve {
    /// A curve from bare samples, with `reduced` equal to the densities.
    pub fn from_bins(bins: Vec<(f64, f64)>, config: QuadratureConfig, process: ProcessSpec) -> Self {
        let reduced = bins.iter().map(|b| b.1).collect();
        SpectrumCurve {
            bins,
            reduced,
            coupling_scale: 1.0,
            config,
            process,
        }
    }

    pub fn masses(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.0).collect()
    }

    pub fn densities(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.1).collect()
    }
}

/// Product rule on the sphere: Gauss-Legendre in `cosθ` times midpoints
/// in `φ`. For `n >= 3` it integrates every quadratic polynomial in the
/// direction exactly, so the outgoing sum of `Φ` (quadratic in the
/// direction in the CM frame) does not depend on the frame's orientation.
#[derive(Clone, Debug)]
struct SphereRule {
    directions: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereRule {
    fn new(n: usize) -> Self {
        let dph = 2.0 * PI / n as f64;
        let mut directions = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (ct, w) in gauss_legendre(n) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n {
                let (sp, cp) = ((j as f64 + 0.5) * dph).sin_cos();
                directions.push([st * cp, st * sp, ct]);
                weights.push(w * dph);
            }
        }
        SphereRule { directions, weights }
    }
}

/// Quadrature nodes and weights for one incoming mass shell.
fn shell_nodes(m: f64, cfg: &QuadratureConfig) -> Result<Vec<(MassShellPoint, f64)>> {
    let n = cfg.n_integral;
    let d = cfg.lambda_integral / n as f64;
    let mut nodes = Vec::new();
    match cfg.grid {
        OuterGrid::Box => {
            let axis: Vec<f64> = (0..2 * n)
                .map(|i| -cfg.lambda_integral + (i as f64 + 0.5) * d)
                .collect();
            let cell = d * d * d;
            for &x in &axis {
                for &y in &axis {
                    for &z in &axis {
                        nodes.push((on_shell(m, [x, y, z])?, cell));
                    }
                }
            }
        }
        OuterGrid::Sphere => {
            let na = cfg.n_int_angle;
            let (dth, dph) = (PI / na as f64, 2.0 * PI / na as f64);
            for k in 0..n {
                let r = (k as f64 + 0.5) * d;
                for i in 0..na {
                    let (st, ct) = ((i as f64 + 0.5) * dth).sin_cos();
                    for j in 0..na {
                        let (sp, cp) = ((j as f64 + 0.5) * dph).sin_cos();
                        let v = [r * st * cp, r * st * sp, r * ct];
                        let w = r * r * st * d * dth * dph / (2.0 * omega(m, v));
                        nodes.push((on_shell(m, v)?, w));
                    }
                }
            }
        }
    }
    Ok(nodes)
}

/// Adds `Φ`-weighted outgoing-direction sums for every candidate mass to
/// `out`, for an incoming pair already boosted to its CM frame.
fn accumulate_pair(
    spec: &ProcessSpec,
    boost: &CmBoost,
    candidates: &[f64],
    sphere: &SphereRule,
    scale: f64,
    out: &mut [f64],
) {
    let e = boost.energy;
    let q2 = 4.0 * e * e;
    for (slot, &cand) in out.iter_mut().zip(candidates) {
        let m_out = spec.outgoing_mass(cand);
        if !(e >= m_out) {
            continue;
        }
        // a node on the pole carries zero weight
        let gap = q2 - cand * cand;
        if spec.process == crate::amplitudes::Process::ZBoson && gap.abs() < POLE_EPS * (cand * cand).max(1.0) {
            continue;
        }
        let q = (e * e - m_out * m_out).max(0.0).sqrt();
        let mut sum = 0.0;
        for (d, w) in sphere.directions.iter().zip(&sphere.weights) {
            let k = Kinematics {
                p1: boost.r1,
                p2: boost.r2,
                p1_out: FourVector::new(e, q * d[0], q * d[1], q * d[2]),
                p2_out: FourVector::new(e, -q * d[0], -q * d[1], -q * d[2]),
            };
            sum += spec.phi_unchecked(cand, &k) * w;
        }
        *slot += scale * sum * q * m_out;
    }
}

/// `σ_{inv,tot}` density at a candidate mass for one incoming pair: the
/// sum of `Φ` over outgoing directions in the CM frame, weighted by
/// `|q'| m_out dω'`.
pub fn sigma_inv_tot(
    spec: &ProcessSpec,
    candidate: f64,
    p1: &MassShellPoint,
    p2: &MassShellPoint,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(candidate > 0.0) {
        return domain("candidate mass must be positive");
    }
    let boost = cm_boost(p1, p2)?;
    let mut out = [0.0];
    accumulate_pair(
        spec,
        &boost,
        &[candidate],
        &SphereRule::new(cfg.n_int_angle),
        1.0,
        &mut out,
    );
    Ok(out[0])
}

/// Integrates `σ_{inv,tot}` over both incoming shells for every mass bin.
///
/// Rows of the outer grid (one per first-particle node) are evaluated in
/// parallel and reduced in row order, so the result does not depend on the
/// number of worker threads.
pub fn integral_mass_spectrum(spec: &ProcessSpec, cfg: &QuadratureConfig, threads: usize) -> Result<SpectrumCurve> {
    cfg.validate()?;
    spec.validate()?;
    let unit = ProcessSpec { coupling: 1.0, ..*spec };
    let coupling_scale = spec.coupling * spec.coupling;
    let nodes = shell_nodes(spec.m_in, cfg)?;
    let sphere = SphereRule::new(cfg.n_int_angle);
    let centers = cfg.bin_centers();
    let nbins = centers.len();

    let row = |(p1, w1): &(MassShellPoint, f64)| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; nbins];
        for (p2, w2) in &nodes {
            let boost = cm_boost(p1, p2)?;
            accumulate_pair(&unit, &boost, &centers, &sphere, w1 * w2, &mut acc);
        }
        Ok(acc)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Vec<f64>> = pool.install(|| nodes.par_iter().map(row).collect::<Result<_>>())?;

    let mut total = vec![0.0; nbins];
    for r in &rows {
        for (t, v) in total.iter_mut().zip(r) {
            *t += v;
        }
    }
    Ok(SpectrumCurve {
        bins: centers
            .into_iter()
            .zip(total.iter().map(|v| v * coupling_scale))
            .collect(),
        reduced: total,
        coupling_scale,
        config: *cfg,
        process: *spec,
    })
}

/// CM-frame kinematics with the incoming pair along `z` and the outgoing
/// pair at polar angle `theta` in the `xz` plane.
pub fn cm_kinematics(m_in: f64, m_out: f64, energy: f64, theta: f64, phi: f64) -> Kinematics {
    let k = (energy * energy - m_in * m_in).sqrt();
    let q = (energy * energy - m_out * m_out).sqrt();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let d = [st * cp, st * sp, ct];
    Kinematics {
        p1: FourVector::new(energy, 0.0, 0.0, k),
        p2: FourVector::new(energy, 0.0, 0.0, -k),
        p1_out: FourVector::new(energy, q * d[0], q * d[1], q * d[2]),
        p2_out: FourVector::new(energy, -q * d[0], -q * d[1], -q * d[2]),
    }
}

fn check_above_threshold(spec: &ProcessSpec, energy: f64, candidate: f64) -> Result<f64> {
    let m_out = spec.outgoing_mass(candidate);
    if !(energy > spec.m_in.max(m_out)) {
        return domain(format!("energy {energy} must exceed both masses"));
    }
    Ok(m_out)
}

/// Differential cross section `(dσ/dΩ)_CM = Ξ / |v₂ - v₁|` with
/// `Ξ = Φ / (32 (2π)² E²)` and `1/|v₂ - v₁| = E / (2 (E² - m²)^½)`.
pub fn cross_section_cm(spec: &ProcessSpec, energy: f64, candidate: f64, theta: f64) -> Result<f64> {
    let m_out = check_above_threshold(spec, energy, candidate)?;
    let k = cm_kinematics(spec.m_in, m_out, energy, theta, 0.0);
    let phi = spec.phi(candidate, &k)?;
    let flux = energy / (2.0 * (energy * energy - spec.m_in * spec.m_in).sqrt());
    Ok(flux * phi / (32.0 * 4.0 * PI * PI * energy * energy))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, `n >= 1`.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                // p1 = P_n(x), p0 = P_{n-1}(x)
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Total CM cross section: the outgoing-direction integral of
/// `(dσ/dΩ)_CM`. The incoming direction average is trivial by rotational
/// symmetry of `Ξ`.
pub fn total_cross_section(spec: &ProcessSpec, energy: f64, candidate: f64) -> Result<f64> {
    let m_out = check_above_threshold(spec, energy, candidate)?;
    let phi_nodes = 16;
    let mut sum = 0.0;
    for (x, w) in gauss_legendre(24) {
        let theta = x.acos();
        for j in 0..phi_nodes {
            let ph = 2.0 * PI * j as f64 / phi_nodes as f64;
            let k = cm_kinematics(spec.m_in, m_out, energy, theta, ph);
            sum += spec.phi(candidate, &k)? * w * 2.0 * PI / phi_nodes as f64;
        }
    }
    let flux = energy / (2.0 * (energy * energy - spec.m_in * spec.m_in).sqrt());
    Ok(flux * sum / (32.0 * 4.0 * PI * PI * energy * energy))
}

/// A located peak of a sampled spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    /// Position after three-point parabolic refinement.
    pub mass: f64,
    pub height: f64,
    pub prominence: f64,
    /// Index of the sample the peak was found at.
    pub index: usize,
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let (d0, d1) = (x[1] - x[0], x[2] - x[1]);
    let s0 = (y[1] - y[0]) / d0;
    let s1 = (y[2] - y[1]) / d1;
    let a = (s1 - s0) / (x[2] - x[0]);
    if !(a < 0.0) {
        return None;
    }
    let b = s0 - a * (x[0] + x[1]);
    let xv = -b / (2.0 * a);
    let yv = y[1] + b * (xv - x[1]) + a * (xv * xv - x[1] * x[1]);
    Some((xv, yv))
}

fn prominence(y: &[f64], i: usize) -> f64 {
    let h = y[i];
    let mut left_min = h;
    for &v in y[..i].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &y[i + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Interior local maxima with prominence at least `min_prominence`, refined
/// by a parabola through the peak sample and its neighbors, ordered by
/// descending height. A flat top counts once, at its middle sample.
///
/// Positions come from the unit-coupling samples; heights and prominences
/// are reported at the actual coupling.
pub fn find_peaks(curve: &SpectrumCurve, min_prominence: f64) -> Vec<Peak> {
    let s = curve.coupling_scale;
    if !(s > 0.0) || curve.reduced.len() != curve.bins.len() {
        return find_peaks_in(&curve.bins, min_prominence);
    }
    let reduced: Vec<(f64, f64)> = curve.bins.iter().zip(&curve.reduced).map(|(b, &r)| (b.0, r)).collect();
    let mut peaks: Vec<Peak> = find_peaks_in(&reduced, 0.0)
        .into_iter()
        .map(|p| Peak {
            height: p.height * s,
            prominence: p.prominence * s,
            ..p
        })
        .filter(|p| p.prominence >= min_prominence)
        .collect();
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height).then(a.index.cmp(&b.index)));
    peaks
}

/// [`find_peaks`] on bare `(mass, density)` samples.
pub fn find_peaks_in(bins: &[(f64, f64)], min_prominence: f64) -> Vec<Peak> {
    let x: Vec<f64> = bins.iter().map(|b| b.0).collect();
    let y: Vec<f64> = bins.iter().map(|b| b.1).collect();
    let n = y.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            // walk across a plateau
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                let c = (i + j) / 2;
                let prom = prominence(&y, c);
                if prom >= min_prominence {
                    let (mass, height) = if i == j {
                        parabola_vertex([x[c - 1], x[c], x[c + 1]], [y[c - 1], y[c], y[c + 1]]).unwrap_or((x[c], y[c]))
                    } else {
                        (x[c], y[c])
                    };
                    peaks.push(Peak {
                        mass,
                        height,
                        prominence: prom,
                        index: c,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height).then(a.index.cmp(&b.index)));
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: Vec<(f64, f64)>) -> SpectrumCurve {
        SpectrumCurve::from_bins(
            points,
            QuadratureConfig {
                lambda_integral: 1.0,
                n_integral: 1,
                n_int_angle: 1,
                start: 0.0,
                end: 1.0,
                n_m_prime: 1,
                grid: OuterGrid::Box,
            },
            ProcessSpec::qed_lepton(0.511, 1.0 / 137.036),
        )
    }

    #[test]
    fn monotone_curve_has_no_peaks() {
        let c = curve((0..10).map(|i| (i as f64, i as f64 * 2.0)).collect());
        assert!(find_peaks(&c, 0.0).is_empty());
    }

    #[test]
    fn parabola_vertex_recovered() {
        let c = curve(
            (0..16)
                .map(|i| {
                    let x = 10.0 + 18.75 * i as f64;
                    (x, 5.0 - 1e-3 * (x - 105.7).powi(2))
                })
                .collect(),
        );
        let p = find_peaks(&c, 0.0);
        assert_eq!(p.len(), 1);
        assert!((p[0].mass - 105.7).abs() < 1e-9);
        assert!((p[0].height - 5.0).abs() < 1e-9);
    }

    #[test]
    fn two_peaks_ordered_by_height() {
        let y = [0.0, 1.0, 3.0, 1.0, 0.5, 2.0, 6.0, 2.0, 0.0];
        let c = curve(y.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect());
        let p = find_peaks(&c, 0.0);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].index, 6);
        assert_eq!(p[1].index, 2);
        assert!(p[0].height > p[1].height);
        assert_eq!(p[1].prominence, 2.5);
        assert_eq!(find_peaks(&c, 2.6).len(), 1);
    }

    #[test]
    fn plateau_takes_center() {
        let y = [0.0, 1.0, 4.0, 4.0, 4.0, 1.0, 0.0];
        let c = curve(y.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect());
        let p = find_peaks(&c, 0.0);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].index, 3);
        assert_eq!(p[0].mass, 3.0);
    }

    #[test]
    fn edge_maxima_ignored() {
        let y = [5.0, 1.0, 2.0, 1.0, 6.0];
        let c = curve(y.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect());
        let p = find_peaks(&c, 0.0);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].index, 2);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(24);
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        let ok = QuadratureConfig {
            lambda_integral: 200.0,
            n_integral: 5,
            n_int_angle: 5,
            start: 0.0,
            end: 300.0,
            n_m_prime: 16,
            grid: OuterGrid::Box,
        };
        assert!(ok.validate().is_ok());
        assert!(QuadratureConfig { end: 0.0, ..ok }.validate().is_err());
        assert!(QuadratureConfig { n_integral: 0, ..ok }.validate().is_err());
        assert!(QuadratureConfig {
            lambda_integral: -1.0,
            ..ok
        }
        .validate()
        .is_err());
        let spec = ProcessSpec::qed_lepton(0.511, 1.0 / 137.036);
        let zero_width = QuadratureConfig {
            start: 10.0,
            end: 10.0,
            ..ok
        };
        assert!(matches!(
            integral_mass_spectrum(&spec, &zero_width, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_shell_above_energy() {
        let spec = ProcessSpec::qed_lepton(0.511, 1.0 / 137.036);
        let cfg = QuadratureConfig {
            lambda_integral: 200.0,
            n_integral: 5,
            n_int_angle: 5,
            start: 0.0,
            end: 300.0,
            n_m_prime: 16,
            grid: OuterGrid::Box,
        };
        let p1 = on_shell(0.511, [10.0, 0.0, 0.0]).unwrap();
        let p2 = on_shell(0.511, [-10.0, 0.0, 0.0]).unwrap();
        assert_eq!(sigma_inv_tot(&spec, 11.0, &p1, &p2, &cfg).unwrap(), 0.0);
        assert!(sigma_inv_tot(&spec, 9.0, &p1, &p2, &cfg).unwrap() > 0.0);
    }
}
