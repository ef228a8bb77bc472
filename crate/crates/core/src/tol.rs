use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the analytic layers.
///
/// Every value is relative to the scale noted next to it; the exact-rational
/// layers never consult this struct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Backward error of a root, relative to `sum |p_i| |r|^i`.
    pub root: f64,
    /// Max-coefficient residual of a composition, relative to the coefficient scale.
    pub decomp: f64,
    /// Clustering radius for coincident critical values, relative to `1 + max |value|`.
    pub cluster: f64,
    /// Moment magnitude, relative to the absolute moment integral.
    pub moments: f64,
    /// Branch-relation residual, relative to the largest branch value.
    pub phi: f64,
    /// Puiseux coefficient support threshold, relative to `max |s_k|`.
    pub series: f64,
    /// Orthogonality of `w_k` against normalized basis vectors of M.
    pub perp: f64,
    /// Coefficient residual of polynomial recovery from a series, relative to scale.
    pub recover: f64,
    /// Point-value equality `W(a) = W(b)`, relative to `1 + |P|_inf`.
    pub point: f64,
    /// Block check of a right factor on continued branch values.
    pub block: f64,
    /// Residual `|P(w) - z|` while tracking, relative to `1 + |z|`.
    pub track: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root: 1e-10,
            decomp: 1e-9,
            cluster: 1e-8,
            moments: 1e-9,
            phi: 1e-9,
            series: 1e-9,
            perp: 1e-9,
            recover: 1e-8,
            point: 1e-9,
            block: 1e-8,
            track: 1e-10,
        }
    }
}
