//! Exchanger area and its annual cost, plus the plane envelopes that stand in
//! for the cost inside the MILP.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::pwl::{fit_convex_planes, tensor_samples, EnvelopeOptions, PlaneEnvelope, PwlError};

/// Chen's approximation of the log-mean temperature difference.
pub fn chen_lmtd(dt1: f64, dt2: f64) -> f64 {
    (dt1 * dt2 * (dt1 + dt2) / 2.0).cbrt()
}

/// Overall coefficient of a match from the two film coefficients.
pub fn match_u(u_hot: f64, u_cold: f64) -> f64 {
    2.0 / (1.0 / u_hot + 1.0 / u_cold)
}

pub fn area(duty: f64, u: f64, dt1: f64, dt2: f64) -> f64 {
    duty / (u * chen_lmtd(dt1, dt2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaCostLaw {
    pub c_v: f64,
    pub beta: f64,
}

impl AreaCostLaw {
    pub fn cost_of_area(&self, a: f64) -> f64 {
        if a <= 0.0 {
            0.0
        } else {
            self.c_v * a.powf(self.beta)
        }
    }

    pub fn cost(&self, duty: f64, u: f64, dt1: f64, dt2: f64) -> f64 {
        self.cost_of_area(area(duty, u, dt1, dt2))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnvelopeSettings {
    pub match_planes: usize,
    pub utility_planes: usize,
    pub duty_samples: usize,
    pub dt_samples: usize,
}

impl Default for EnvelopeSettings {
    fn default() -> Self {
        EnvelopeSettings { match_planes: 8, utility_planes: 5, duty_samples: 7, dt_samples: 9 }
    }
}

/// Match-cost envelopes fitted once per shape on the unit box and rescaled.
///
/// `c_v (q / (U chen(a, b)))^beta` is homogeneous in `q` and jointly in
/// `(a, b)`, so a fit of `q'^beta chen(a', b')^-beta` on
/// `[0, 1] x [r, 1]^2` serves every match whose smallest relative approach
/// is at least `r`. `r` is rounded down to a power of two.
pub struct EnvelopeCache {
    settings: EnvelopeSettings,
    fits: Mutex<HashMap<(i32, u64), PlaneEnvelope>>,
}

impl EnvelopeCache {
    pub fn new(settings: EnvelopeSettings) -> Self {
        EnvelopeCache { settings, fits: Mutex::new(HashMap::new()) }
    }

    pub fn settings(&self) -> EnvelopeSettings {
        self.settings
    }

    fn unit_fit(&self, bucket: i32, beta: f64) -> Result<PlaneEnvelope, PwlError> {
        let key = (bucket, beta.to_bits());
        if let Some(e) = self.fits.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let r = 2f64.powi(bucket);
        let s = self.settings;
        let (pts, vals) = tensor_samples(
            |x| if x[0] <= 0.0 { 0.0 } else { (x[0] / chen_lmtd(x[1], x[2])).powf(beta) },
            &[(0.0, 1.0, s.duty_samples), (r, 1.0, s.dt_samples), (r, 1.0, s.dt_samples)],
            &[false, true, true],
        );
        let e = fit_convex_planes(&pts, &vals, s.match_planes, EnvelopeOptions::default())?;
        self.fits.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    /// Envelope of a match cost over `q in [0, q_max]`, both approaches in
    /// `[dt_lo, dt_hi]`.
    pub fn match_envelope(
        &self,
        law: AreaCostLaw,
        u: f64,
        q_max: f64,
        dt_lo: f64,
        dt_hi: f64,
    ) -> Result<PlaneEnvelope, PwlError> {
        if !(q_max > 0.0 && dt_lo > 0.0 && dt_hi >= dt_lo) {
            return Err(PwlError::Domain(format!("match box q <= {q_max}, dt in [{dt_lo}, {dt_hi}]")));
        }
        let bucket = (dt_lo / dt_hi).log2().floor() as i32;
        let unit = self.unit_fit(bucket, law.beta)?;
        let scale = law.c_v * (q_max / (u * dt_hi)).powf(law.beta);
        Ok(unit.rescaled(scale, &[q_max, dt_hi, dt_hi]))
    }

    /// Envelope of a utility cost over `(q, dt)` with the other approach
    /// held at `dt_other`.
    pub fn utility_envelope(
        &self,
        law: AreaCostLaw,
        u: f64,
        q_max: f64,
        dt_lo: f64,
        dt_hi: f64,
        dt_other: f64,
    ) -> Result<PlaneEnvelope, PwlError> {
        if !(q_max > 0.0 && dt_lo > 0.0 && dt_hi >= dt_lo && dt_other > 0.0) {
            return Err(PwlError::Domain(format!("utility box q <= {q_max}, dt in [{dt_lo}, {dt_hi}]")));
        }
        let s = self.settings;
        let (pts, vals) = tensor_samples(
            |x| if x[0] <= 0.0 { 0.0 } else { (x[0] / chen_lmtd(x[1] * dt_hi, dt_other) * dt_hi).powf(law.beta) },
            &[(0.0, 1.0, s.duty_samples), (dt_lo / dt_hi, 1.0, s.dt_samples)],
            &[false, true],
        );
        let unit = fit_convex_planes(&pts, &vals, s.utility_planes, EnvelopeOptions::default())?;
        let scale = law.c_v * (q_max / (u * dt_hi)).powf(law.beta);
        Ok(unit.rescaled(scale, &[q_max, dt_hi]))
    }
}
