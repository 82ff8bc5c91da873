use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    /// The "weaker" of two methods: MC dominates quadrature dominates exact.
    fn join(self, other: Method) -> Method {
        use Method::*;
        match (self, other) {
            (MonteCarlo, _) | (_, MonteCarlo) => MonteCarlo,
            (Quadrature, _) | (_, Quadrature) => Quadrature,
            _ => Exact,
        }
    }
}

/// A numerical value together with its error bar and provenance.
///
/// `error` is an accumulated bound for quadrature and one standard error for
/// Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0, method: Method::Exact, samples: 0, seed: 0 }
    }

    pub fn quadrature(value: f64, error: f64) -> Self {
        Estimate { value, error: error.abs(), method: Method::Quadrature, samples: 0, seed: 0 }
    }

    pub fn monte_carlo(value: f64, std_err: f64, samples: u64, seed: u64) -> Self {
        Estimate { value, error: std_err.abs(), method: Method::MonteCarlo, samples, seed }
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.method == Method::MonteCarlo
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error
        } else {
            self.error / self.value.abs()
        }
    }

    /// Multiply by an exact scalar.
    pub fn scaled(self, c: f64) -> Self {
        Estimate { value: self.value * c, error: self.error * c.abs(), ..self }
    }

    /// Sum of two independent estimates. Errors add linearly, which is a
    /// bound for quadrature and conservative for standard errors.
    pub fn plus(self, other: Estimate) -> Self {
        let method = self.method.join(other.method);
        let (samples, seed) = if self.is_monte_carlo() {
            (self.samples + if other.is_monte_carlo() { other.samples } else { 0 }, self.seed)
        } else if other.is_monte_carlo() {
            (other.samples, other.seed)
        } else {
            (0, 0)
        };
        let error = self.error + other.error;
        let error = if method == Method::Exact { 0.0 } else { error };
        Estimate { value: self.value + other.value, error, method, samples, seed }
    }

    /// Carries over Monte Carlo provenance (sample count and seed) from `src`.
    pub fn with_provenance(self, src: &Estimate) -> Self {
        if src.is_monte_carlo() {
            Estimate { method: Method::MonteCarlo, samples: src.samples, seed: src.seed, ..self }
        } else {
            self
        }
    }

    /// Widened interval `value ± k·error`.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        (self.value - k * self.error, self.value + k * self.error)
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {} ({})", self.value, self.error, self.method.as_str())
    }
}
