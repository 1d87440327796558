//! Model spaces, radial weights and the radial Laplace–Beltrami operator.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::special::gamma_half;

/// One of the three unit-curvature model spaces, by the sign of its curvature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// Euclidean space, weight `r`.
    #[serde(rename = "euclidean")]
    Flat,
    /// The sphere, weight `sin r`, distances in `[0, π]`.
    #[serde(rename = "sphere")]
    Positive,
    /// Hyperbolic space, weight `sinh r`.
    #[serde(rename = "hyperbolic")]
    Negative,
}

impl Space {
    pub const ALL: [Space; 3] = [Space::Flat, Space::Positive, Space::Negative];

    pub fn name(self) -> &'static str {
        match self {
            Space::Flat => "euclidean",
            Space::Positive => "sphere",
            Space::Negative => "hyperbolic",
        }
    }

    /// Upper end of the distance domain (`π` on the sphere, `∞` otherwise).
    pub fn max_distance(self) -> f64 {
        match self {
            Space::Positive => PI,
            _ => f64::INFINITY,
        }
    }

    pub fn contains(self, r: f64) -> bool {
        r.is_finite() && r >= 0.0 && r <= self.max_distance()
    }

    /// Distance from `r` to the nearest zero of the weight.
    pub fn distance_to_pole(self, r: f64) -> f64 {
        match self {
            Space::Positive => r.min(PI - r),
            _ => r,
        }
    }

    pub fn weight(self, r: f64) -> Result<f64> {
        if !self.contains(r) {
            return Err(Error::domain(format!("distance {r} outside the {self} domain")));
        }
        Ok(self.weight_unchecked(r))
    }

    pub(crate) fn weight_unchecked(self, r: f64) -> f64 {
        match self {
            Space::Flat => r,
            Space::Positive => r.sin(),
            Space::Negative => r.sinh(),
        }
    }

    /// `w'(r)`.
    pub fn weight_derivative(self, r: f64) -> f64 {
        match self {
            Space::Flat => 1.0,
            Space::Positive => r.cos(),
            Space::Negative => r.cosh(),
        }
    }

    /// Jet of `w` composed with `x`.
    pub fn weight_jet(self, x: &Jet) -> Jet {
        match self {
            Space::Flat => x.clone(),
            Space::Positive => x.sin(),
            Space::Negative => x.sinh(),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "flat" | "e" => Ok(Space::Flat),
            "sphere" | "spherical" | "positive" | "s" => Ok(Space::Positive),
            "hyperbolic" | "negative" | "h" => Ok(Space::Negative),
            other => Err(Error::domain(format!("unknown space '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Heat,
    Poisson,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Heat => "heat",
            KernelKind::Poisson => "poisson",
        }
    }

    /// Name of the evolution parameter (`t` or `y`).
    pub fn param_name(self) -> &'static str {
        match self {
            KernelKind::Heat => "t",
            KernelKind::Poisson => "y",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heat" => Ok(KernelKind::Heat),
            "poisson" => Ok(KernelKind::Poisson),
            other => Err(Error::domain(format!("unknown kernel kind '{other}'"))),
        }
    }
}

/// Normalization of the curved-space kernels.
///
/// `Paper` kernels solve `∂_t u = (Δ + λ₀) u` with `λ₀ = -(n-1)²/4` on the
/// sphere and `+(n-1)²/4` on hyperbolic space; `Markovian` kernels solve the
/// plain `∂_t u = Δ u`. Euclidean kernels are the same under both.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Paper,
    Markovian,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Paper => "paper",
            Convention::Markovian => "markovian",
        }
    }

    /// The constant `λ` for which the heat kernel solves `∂_t u = (Δ + λ) u`.
    pub fn heat_shift(self, space: Space, n: u32) -> f64 {
        let q = (n as f64 - 1.0).powi(2) / 4.0;
        match (self, space) {
            (Convention::Markovian, _) | (_, Space::Flat) => 0.0,
            (Convention::Paper, Space::Positive) => -q,
            (Convention::Paper, Space::Negative) => q,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(Convention::Paper),
            "markovian" => Ok(Convention::Markovian),
            other => Err(Error::domain(format!("unknown convention '{other}'"))),
        }
    }
}

/// A single kernel evaluation request.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub space: Space,
    pub n: u32,
    pub kind: KernelKind,
    /// `t` for heat, `y` for Poisson.
    pub param: f64,
    pub r: f64,
}

impl KernelQuery {
    pub fn heat(space: Space, n: u32, t: f64, r: f64) -> Self {
        Self { space, n, kind: KernelKind::Heat, param: t, r }
    }

    pub fn poisson(space: Space, n: u32, y: f64, r: f64) -> Self {
        Self { space, n, kind: KernelKind::Poisson, param: y, r }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if !(self.param > 0.0 && self.param.is_finite()) {
            return Err(Error::domain(format!(
                "{} must be positive and finite, got {}",
                self.kind.param_name(),
                self.param
            )));
        }
        if !self.space.contains(self.r) {
            return Err(Error::domain(format!(
                "distance {} outside the {} domain",
                self.r, self.space
            )));
        }
        if self.kind == KernelKind::Poisson && self.space == Space::Negative && self.param >= PI {
            return Err(Error::domain(format!(
                "hyperbolic Poisson height must lie in (0, π), got {}",
                self.param
            )));
        }
        Ok(())
    }
}

/// Total measure of the unit `(n-1)`-sphere, `2π^{n/2}/Γ(n/2)`.
pub fn sphere_surface_coeff(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("sphere_surface_coeff needs n >= 1"));
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n))
}

/// `u''(r) + (n-1) (w'(r)/w(r)) u'(r)` from a jet of `u` at `r`.
pub fn radial_laplacian(space: Space, n: u32, u: &Jet) -> Result<f64> {
    if u.order() < 2 {
        return Err(Error::Jet(format!("radial_laplacian needs order >= 2, got {}", u.order())));
    }
    let r = u.center();
    if !space.contains(r) {
        return Err(Error::domain(format!("distance {r} outside the {space} domain")));
    }
    if space.distance_to_pole(r) == 0.0 {
        return Err(Error::SingularPoint(format!("radial Laplacian at a zero of the {space} weight")));
    }
    let log_w = space.weight_derivative(r) / space.weight_unchecked(r);
    Ok(u.derivative_value(2) + (n as f64 - 1.0) * log_w * u.derivative_value(1))
}
