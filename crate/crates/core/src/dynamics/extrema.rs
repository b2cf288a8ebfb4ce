//! Turning-point detection on observable series.

/// Default swing: one lattice spacing.
pub const DEFAULT_SWING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub step: usize,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Hysteresis turning-point detector.
///
/// Leading samples within `min_swing` of the first value are skipped. After
/// that the detector tracks the running extreme in the current direction and
/// confirms it once the series retreats from it by at least `min_swing`.
/// Confirmed points are strict local extrema; a flat top is reported at its
/// last index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingDetector {
    pub min_swing: f64,
}

impl Default for SwingDetector {
    fn default() -> Self {
        SwingDetector {
            min_swing: DEFAULT_SWING,
        }
    }
}

impl SwingDetector {
    pub fn new(min_swing: f64) -> Self {
        SwingDetector { min_swing }
    }

    /// All confirmed turning points, alternating in kind.
    pub fn extrema(&self, series: &[f64]) -> Vec<Extremum> {
        let mut out = Vec::new();
        if series.len() < 3 {
            return out;
        }
        let start = series[0];
        let Some(first) = series
            .iter()
            .position(|v| (v - start).abs() >= self.min_swing)
        else {
            return out;
        };
        let mut rising = series[first] > start;
        let (mut at, mut best) = (first, series[first]);
        for (j, &v) in series.iter().enumerate().skip(first + 1) {
            let (extends, retreat) = if rising {
                (v >= best, best - v)
            } else {
                (v <= best, v - best)
            };
            if extends {
                at = j;
                best = v;
            } else if retreat >= self.min_swing {
                out.push(Extremum {
                    step: at,
                    value: best,
                    kind: if rising {
                        ExtremumKind::Max
                    } else {
                        ExtremumKind::Min
                    },
                });
                rising = !rising;
                at = j;
                best = v;
            }
        }
        out
    }

    pub fn first(&self, series: &[f64]) -> Option<Extremum> {
        self.extrema(series).into_iter().next()
    }

    pub fn maxima(&self, series: &[f64]) -> Vec<usize> {
        self.extrema(series)
            .into_iter()
            .filter(|e| e.kind == ExtremumKind::Max)
            .map(|e| e.step)
            .collect()
    }

    /// Mean spacing between consecutive maxima.
    pub fn mean_peak_spacing(&self, series: &[f64]) -> Option<f64> {
        let peaks = self.maxima(series);
        if peaks.len() < 2 {
            return None;
        }
        Some((peaks[peaks.len() - 1] - peaks[0]) as f64 / (peaks.len() - 1) as f64)
    }
}

/// Step of the first turning point away from the starting value, using the
/// default one-site swing.
pub fn first_extremum_step(series: &[f64]) -> Option<usize> {
    SwingDetector::default().first(series).map(|e| e.step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_peak_and_trough() {
        assert_eq!(first_extremum_step(&[0.0, 1.0, 2.0, 1.0, 0.0]), Some(2));
        assert_eq!(first_extremum_step(&[0.0, -1.0, -2.0, -3.0, -2.0]), Some(3));
    }

    #[test]
    fn no_extremum() {
        assert_eq!(first_extremum_step(&[0.0, 1.0, 2.0, 3.0]), None);
        assert_eq!(first_extremum_step(&[0.0, 0.1, 0.0, 0.1, 0.0]), None);
        assert_eq!(first_extremum_step(&[1.0, 0.0]), None);
        assert_eq!(first_extremum_step(&[]), None);
    }

    #[test]
    fn plateau_reported_at_last_index() {
        assert_eq!(
            first_extremum_step(&[0.0, 1.0, 2.0, 2.0, 2.0, 1.0]),
            Some(4)
        );
    }

    #[test]
    fn small_wiggles_are_skipped() {
        // Early dip near the start and a shallow notch on the rise.
        let s = [-2.5, -3.0, -2.7, -2.8, -1.5, 0.5, 2.4, 2.3, 2.7, 2.0, 1.0];
        assert_eq!(first_extremum_step(&s), Some(8));
        let d = SwingDetector::new(0.1);
        assert_eq!(d.first(&s).unwrap().step, 1);
    }

    #[test]
    fn alternating_extrema_and_spacing() {
        let s: Vec<f64> = (0..60)
            .map(|n| (2.0 * std::f64::consts::PI * n as f64 / 15.0 - 1.2).sin() * 3.0)
            .collect();
        let ex = SwingDetector::new(1.0).extrema(&s);
        for w in ex.windows(2) {
            assert_ne!(w[0].kind, w[1].kind);
        }
        let spacing = SwingDetector::new(1.0).mean_peak_spacing(&s).unwrap();
        assert!((spacing - 15.0).abs() <= 1.0);
    }
}
