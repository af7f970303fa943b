use std::io::Read;

use serde::Serialize;

use crate::constants::ELEMENTARY_CHARGE;
use crate::error::{Error, Result};

/// Shape of a one-dimensional barrier. All energies in J, lengths in m.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum BarrierForm {
    /// `height` on the closed interval [-width/2, width/2], zero outside.
    Rectangular { height: f64, width: f64 },
    /// v_max·(1 − (q/half_width)²); curvature −2·v_max/half_width².
    Parabolic { v_max: f64, half_width: f64 },
    /// v_max·exp(−q²/(2σ²))
    Gaussian { v_max: f64, sigma: f64 },
    Tabulated(MonotoneCubic),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierPotential {
    form: BarrierForm,
    domain: (f64, f64),
}

impl BarrierPotential {
    pub fn new(form: BarrierForm, domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("domain", "need finite q_min < q_max"));
        }
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite and > 0"))
            }
        };
        match &form {
            BarrierForm::Rectangular { height, width } => {
                if !height.is_finite() {
                    return Err(Error::invalid("height", "must be finite"));
                }
                positive("width", *width)?;
                if -0.5 * width <= lo || 0.5 * width >= hi {
                    return Err(Error::invalid("domain", "rectangular barrier must lie strictly inside the domain"));
                }
            }
            BarrierForm::Parabolic { v_max, half_width } => {
                if !v_max.is_finite() {
                    return Err(Error::invalid("v_max", "must be finite"));
                }
                positive("half_width", *half_width)?;
            }
            BarrierForm::Gaussian { v_max, sigma } => {
                if !v_max.is_finite() {
                    return Err(Error::invalid("v_max", "must be finite"));
                }
                positive("sigma", *sigma)?;
            }
            BarrierForm::Tabulated(t) => {
                let (a, b) = t.range();
                if lo < a || hi > b {
                    return Err(Error::invalid("domain", "tabulated domain must lie within the table"));
                }
            }
        }
        Ok(Self { form, domain })
    }

    /// Rectangular barrier centred on zero with a domain of three widths.
    pub fn rectangular(height: f64, width: f64) -> Result<Self> {
        Self::new(BarrierForm::Rectangular { height, width }, (-1.5 * width, 1.5 * width))
    }

    /// Parabolic barrier on [-2L, 2L].
    pub fn parabolic(v_max: f64, half_width: f64) -> Result<Self> {
        Self::new(BarrierForm::Parabolic { v_max, half_width }, (-2.0 * half_width, 2.0 * half_width))
    }

    /// Gaussian barrier on [-8σ, 8σ].
    pub fn gaussian(v_max: f64, sigma: f64) -> Result<Self> {
        Self::new(BarrierForm::Gaussian { v_max, sigma }, (-8.0 * sigma, 8.0 * sigma))
    }

    pub fn tabulated(table: MonotoneCubic) -> Result<Self> {
        let domain = table.range();
        Self::new(BarrierForm::Tabulated(table), domain)
    }

    pub fn form(&self) -> &BarrierForm {
        &self.form
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn eval(&self, q: f64) -> f64 {
        match &self.form {
            BarrierForm::Rectangular { height, width } => {
                if q.abs() <= 0.5 * width {
                    *height
                } else {
                    0.0
                }
            }
            BarrierForm::Parabolic { v_max, half_width } => {
                let x = q / half_width;
                v_max * (1.0 - x * x)
            }
            BarrierForm::Gaussian { v_max, sigma } => v_max * (-0.5 * (q / sigma).powi(2)).exp(),
            BarrierForm::Tabulated(t) => t.eval(q),
        }
    }

    /// Location of the maximum of V over the domain.
    pub fn argmax(&self) -> f64 {
        let (lo, hi) = self.domain;
        let edge = if self.eval(lo) >= self.eval(hi) { lo } else { hi };
        match &self.form {
            BarrierForm::Rectangular { .. } | BarrierForm::Parabolic { .. } | BarrierForm::Gaussian { .. } => {
                if lo <= 0.0 && hi >= 0.0 && self.eval(0.0) >= self.eval(edge) {
                    0.0
                } else {
                    edge
                }
            }
            BarrierForm::Tabulated(t) => t
                .knots()
                .filter(|(q, _)| *q >= lo && *q <= hi)
                .fold((edge, self.eval(edge)), |best, (q, v)| if v > best.1 { (q, v) } else { best })
                .0,
        }
    }

    /// Maximum of V over the domain.
    pub fn max_value(&self) -> f64 {
        let (lo, hi) = self.domain;
        match &self.form {
            BarrierForm::Rectangular { height, .. } => height.max(0.0),
            BarrierForm::Parabolic { .. } | BarrierForm::Gaussian { .. } => {
                if lo <= 0.0 && hi >= 0.0 {
                    self.eval(0.0)
                } else {
                    self.eval(lo).max(self.eval(hi))
                }
            }
            // Monotone interpolation never overshoots its knots.
            BarrierForm::Tabulated(t) => t
                .knots()
                .filter(|(q, _)| *q >= lo && *q <= hi)
                .map(|(_, v)| v)
                .fold(self.eval(lo).max(self.eval(hi)), f64::max),
        }
    }
}

/// Fritsch–Carlson monotone piecewise-cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneCubic {
    q: Vec<f64>,
    v: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(q: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if q.len() != v.len() {
            return Err(Error::Table("q and V columns differ in length".into()));
        }
        if q.len() < 4 {
            return Err(Error::Table(format!("need at least 4 rows, got {}", q.len())));
        }
        if q.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::Table("non-finite value".into()));
        }
        if q.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Table("q grid must be strictly increasing".into()));
        }
        let n = q.len();
        let secant: Vec<f64> = (0..n - 1).map(|i| (v[i + 1] - v[i]) / (q[i + 1] - q[i])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secant[0];
        slopes[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secant[i - 1] * secant[i] <= 0.0 {
                0.0
            } else {
                // Weighted harmonic mean (Fritsch–Butland form).
                let h0 = q[i] - q[i - 1];
                let h1 = q[i + 1] - q[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i])
            };
        }
        // Endpoint slopes: keep sign consistent and bounded by 3× the secant.
        for (i, s) in [(0, 0), (n - 1, n - 2)] {
            if slopes[i] * secant[s] <= 0.0 {
                slopes[i] = 0.0;
            } else if slopes[i].abs() > 3.0 * secant[s].abs() {
                slopes[i] = 3.0 * secant[s];
            }
        }
        Ok(Self { q, v, slopes })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.q[0], self.q[self.q.len() - 1])
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.q.iter().copied().zip(self.v.iter().copied())
    }

    /// Evaluates the interpolant; clamps to the end values outside the table.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.q.len();
        if x <= self.q[0] {
            return self.v[0];
        }
        if x >= self.q[n - 1] {
            return self.v[n - 1];
        }
        let i = self.q.partition_point(|&qi| qi <= x) - 1;
        let h = self.q[i + 1] - self.q[i];
        let t = (x - self.q[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.v[i] + h10 * h * self.slopes[i] + h01 * self.v[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Reads a two-column CSV with header `q_m,V_eV` or `q_angstrom,V_eV` into a
/// tabulated barrier (SI internally).
pub fn read_tabulated_csv<R: Read>(reader: R) -> Result<BarrierPotential> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
    if headers.len() != 2 {
        return Err(Error::Table(format!("expected 2 columns, got {}", headers.len())));
    }
    let q_scale = match &headers[0] {
        "q_m" => 1.0,
        "q_angstrom" => 1e-10,
        other => return Err(Error::Table(format!("unknown q column `{other}`; expected q_m or q_angstrom"))),
    };
    if &headers[1] != "V_eV" {
        return Err(Error::Table(format!("unknown V column `{}`; expected V_eV", &headers[1])));
    }
    let mut q = Vec::new();
    let mut v = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Table(format!("row {}: cannot parse `{s}`", line + 2)))
        };
        q.push(parse(&rec[0])? * q_scale);
        v.push(parse(&rec[1])? * ELEMENTARY_CHARGE);
    }
    BarrierPotential::tabulated(MonotoneCubic::new(q, v)?)
}
