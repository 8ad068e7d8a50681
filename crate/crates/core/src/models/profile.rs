use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Orbit-length function f on the base circle R/Z.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "name"))]
pub enum Profile {
    Constant { value: f64 },
    /// base + amplitude·sin(2π·frequency·s)
    SinBump { base: f64, amplitude: f64, frequency: i64 },
    /// base + amplitude·exp((cos 2π(s − center) − 1)/(2π·width)²), a periodic Gaussian of width `width`
    GaussianBump { base: f64, amplitude: f64, center: f64, width: f64 },
    /// Values at s_i = i/M, trigonometrically interpolated.
    Samples { values: Vec<f64> },
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    /// f(s) = 2 + sin(2πs)
    pub fn two_plus_sin() -> Self {
        Profile::SinBump {
            base: 2.0,
            amplitude: 1.0,
            frequency: 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Profile::Constant { value } => format!("constant({value})"),
            Profile::SinBump {
                base,
                amplitude,
                frequency,
            } => format!("sin-bump({base}, {amplitude}, {frequency})"),
            Profile::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => format!("gaussian-bump({base}, {amplitude}, {center}, {width})"),
            Profile::Samples { values } => format!("samples({})", values.len()),
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::SinBump {
                base,
                amplitude,
                frequency,
            } => base + amplitude * libm::sin(2.0 * PI * *frequency as f64 * s),
            Profile::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                let q = 2.0 * PI * width;
                base + amplitude * libm::exp((libm::cos(2.0 * PI * (s - center)) - 1.0) / (q * q))
            }
            Profile::Samples { values } => trig_eval(values, s, false),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            Profile::Constant { .. } => 0.0,
            Profile::SinBump {
                amplitude, frequency, ..
            } => {
                let w = 2.0 * PI * *frequency as f64;
                amplitude * w * libm::cos(w * s)
            }
            Profile::GaussianBump {
                amplitude,
                center,
                width,
                ..
            } => {
                let q = 2.0 * PI * width;
                let x = 2.0 * PI * (s - center);
                let e = libm::exp((libm::cos(x) - 1.0) / (q * q));
                amplitude * e * (-2.0 * PI * libm::sin(x)) / (q * q)
            }
            Profile::Samples { values } => trig_eval(values, s, true),
        }
    }
}

/// Trigonometric interpolant of equispaced periodic samples (or its derivative).
fn trig_eval(values: &[f64], s: f64, derivative: bool) -> f64 {
    let m = values.len();
    if m == 0 {
        return 0.0;
    }
    let half = m / 2;
    let mut total = 0.0;
    for k in 0..=half {
        let (mut a, mut b) = (0.0, 0.0);
        for (i, v) in values.iter().enumerate() {
            let x = 2.0 * PI * (k * i) as f64 / m as f64;
            a += v * libm::cos(x);
            b += v * libm::sin(x);
        }
        let weight = if k == 0 || (m.is_multiple_of(2) && k == half) { 1.0 } else { 2.0 };
        a *= weight / m as f64;
        b *= weight / m as f64;
        let w = 2.0 * PI * k as f64;
        if m.is_multiple_of(2) && k == half && k != 0 {
            // Nyquist mode: keep only the cosine part so samples are reproduced
            total += if derivative { -a * w * libm::sin(w * s) } else { a * libm::cos(w * s) };
            continue;
        }
        total += if derivative {
            -a * w * libm::sin(w * s) + b * w * libm::cos(w * s)
        } else {
            a * libm::cos(w * s) + b * libm::sin(w * s)
        };
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproduced() {
        let values: Vec<f64> = (0..8).map(|i| 2.0 + libm::sin(2.0 * PI * i as f64 / 8.0) + 0.1 * i as f64).collect();
        let p = Profile::Samples { values: values.clone() };
        for (i, v) in values.iter().enumerate() {
            assert!((p.value(i as f64 / 8.0) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn band_limited_samples_match_closed_form() {
        let exact = Profile::two_plus_sin();
        let values: Vec<f64> = (0..16).map(|i| exact.value(i as f64 / 16.0)).collect();
        let p = Profile::Samples { values };
        for s in [0.03, 0.31, 0.77] {
            assert!((p.value(s) - exact.value(s)).abs() < 1e-12);
            assert!((p.derivative(s) - exact.derivative(s)).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_derivative_by_difference() {
        let p = Profile::GaussianBump {
            base: 1.5,
            amplitude: 0.7,
            center: 0.4,
            width: 0.1,
        };
        let h = 1e-6;
        for s in [0.1, 0.35, 0.5, 0.9] {
            let fd = (p.value(s + h) - p.value(s - h)) / (2.0 * h);
            assert!((fd - p.derivative(s)).abs() < 1e-6);
        }
    }
}
