//! Peak tables for spectra: located masses, heights, prominences and the
//! deviation of each mass from an optional reference value.

use std::fmt::Write as _;

use crate::spectrum::{find_peaks_in, Peak, SpectrumCurve};

/// Peaks of a spectrum together with their deviation from a reference.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakReport {
    /// Ordered by descending height; the first entry is the dominant peak.
    pub peaks: Vec<Peak>,
    pub reference: Option<f64>,
}

/// `100·|mass - reference| / reference`.
pub fn deviation_percent(mass: f64, reference: f64) -> f64 {
    100.0 * (mass - reference).abs() / reference
}

impl PeakReport {
    /// Deviation of the dominant peak, when both exist.
    pub fn deviation_percent(&self) -> Option<f64> {
        Some(deviation_percent(self.peaks.first()?.mass, self.reference?))
    }

    pub fn dominant(&self) -> Option<&Peak> {
        self.peaks.first()
    }

    /// Human-readable table, deviations rounded to two decimals.
    pub fn table(&self) -> String {
        let mut s = String::new();
        if self.peaks.is_empty() {
            s.push_str("no peaks found\n");
            return s;
        }
        let _ = writeln!(
            s,
            "{:>4}  {:>14}  {:>14}  {:>14}  {:>9}",
            "rank", "mass", "height", "prominence", "deviation"
        );
        for (i, p) in self.peaks.iter().enumerate() {
            let dev = match self.reference {
                Some(r) => format!("{:.2}%", deviation_percent(p.mass, r)),
                None => "-".to_string(),
            };
            let _ = writeln!(
                s,
                "{:>4}  {:>14.4}  {:>14.6e}  {:>14.6e}  {:>9}",
                i + 1,
                p.mass,
                p.height,
                p.prominence,
                dev
            );
        }
        if let Some(r) = self.reference {
            let _ = writeln!(s, "reference mass {r}");
        }
        s
    }

    /// Machine-readable rows `#peak,rank,mass,height,prominence,deviation_percent`
    /// at full precision; the deviation field is empty without a reference.
    pub fn csv_comments(&self) -> String {
        let mut s = String::from("#peak,rank,mass,height,prominence,deviation_percent\n");
        for (i, p) in self.peaks.iter().enumerate() {
            let dev = self
                .reference
                .map(|r| format_float(deviation_percent(p.mass, r)))
                .unwrap_or_default();
            let _ = writeln!(
                s,
                "#peak,{},{},{},{},{}",
                i + 1,
                format_float(p.mass),
                format_float(p.height),
                format_float(p.prominence),
                dev
            );
        }
        s
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Locates peaks of `curve` and attaches the reference mass.
pub fn report(curve: &SpectrumCurve, min_prominence: f64, reference: Option<f64>) -> PeakReport {
    report_bins(&curve.bins, min_prominence, reference)
}

/// [`report`] on bare `(mass, density)` samples.
pub fn report_bins(bins: &[(f64, f64)], min_prominence: f64, reference: Option<f64>) -> PeakReport {
    PeakReport {
        peaks: find_peaks_in(bins, min_prominence),
        reference,
    }
}
