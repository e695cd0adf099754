use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::mesh_partition::Mesh;
use crate::{Error, Result, C64};

/// Built-in coefficient profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumPreset {
    /// `μ = ε = η = 1`.
    Homogeneous,
    /// Six-petal flower profile, purely propagative.
    FlowerHeterogeneous,
    /// Flower profile with `μ = μ₀(1 + i/4)`, `ε = ε₀(1 + i/6)`.
    FlowerDissipative,
    /// `μ = ε = 1` with the wavenumber scaled by the mean flower coefficients.
    FlowerAveraged,
}

impl MediumPreset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Homogeneous => "homogeneous",
            Self::FlowerHeterogeneous => "flower-heterogeneous",
            Self::FlowerDissipative => "flower-dissipative",
            Self::FlowerAveraged => "flower-averaged",
        }
    }
}

impl fmt::Display for MediumPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MediumPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homogeneous" => Ok(Self::Homogeneous),
            "flower-heterogeneous" => Ok(Self::FlowerHeterogeneous),
            "flower-dissipative" => Ok(Self::FlowerDissipative),
            "flower-averaged" => Ok(Self::FlowerAveraged),
            _ => Err(Error::InvalidArgument(format!("unknown medium {s:?}"))),
        }
    }
}

/// Piecewise constant coefficients: `μ`, `ε` per triangle, `η` per edge
/// (only boundary entries are used) and the wavenumber `κ`.
#[derive(Debug, Clone)]
pub struct Medium {
    pub kappa: f64,
    pub mu: Vec<C64>,
    pub eps: Vec<C64>,
    pub eta: Vec<C64>,
    /// Product of the area-weighted means of the flower `μ₀` and `ε₀`, when
    /// the medium derives from that profile.
    pub kappa0: Option<f64>,
    pub label: String,
}

const DELTA_MU: f64 = 2.5;
const DELTA_EPS: f64 = 1.5;

/// Real flower coefficients `(μ₀, ε₀)` at `x`.
pub fn flower_coefficients(x: [f64; 2]) -> (f64, f64) {
    let r = x[0].hypot(x[1]);
    let theta = x[1].atan2(x[0]);
    let rho = 1.0 + (6.0 * theta).cos() / 2.0;
    let psi = 2.0 * (1.0 + (6.0 * theta).cos() / 6.0) / 3.0;
    if r < rho / 5.0 {
        (2.0 * DELTA_MU, 2.0 * DELTA_EPS)
    } else if r < rho {
        (1.0 + DELTA_MU * psi, 1.0 + DELTA_EPS * psi)
    } else {
        (1.0, 1.0)
    }
}

/// Product of the area-weighted means of `μ₀` and `ε₀` over the mesh.
pub fn flower_kappa0(mesh: &Mesh) -> f64 {
    let (mut total, mut mu, mut eps) = (0.0, 0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let a = mesh.area(t);
        let (m, e) = flower_coefficients(mesh.centroid(t));
        total += a;
        mu += a * m;
        eps += a * e;
    }
    (mu / total) * (eps / total)
}

#[derive(Deserialize)]
struct JsonMedium {
    kappa: f64,
    mu: Vec<[f64; 2]>,
    eps: Vec<[f64; 2]>,
    #[serde(default)]
    eta: Option<[f64; 2]>,
}

impl Medium {
    pub fn homogeneous(mesh: &Mesh, kappa: f64) -> Self {
        let one = C64::new(1.0, 0.0);
        Self {
            kappa,
            mu: vec![one; mesh.num_triangles()],
            eps: vec![one; mesh.num_triangles()],
            eta: vec![one; mesh.num_edges()],
            kappa0: None,
            label: MediumPreset::Homogeneous.name().into(),
        }
    }

    /// Coefficients of `preset` evaluated at triangle centroids, with base wavenumber `kappa`.
    pub fn preset(mesh: &Mesh, preset: MediumPreset, kappa: f64) -> Self {
        let mut m = Self::homogeneous(mesh, kappa);
        m.label = preset.name().into();
        if preset == MediumPreset::Homogeneous {
            return m;
        }
        let kappa0 = flower_kappa0(mesh);
        m.kappa0 = Some(kappa0);
        let (fm, fe) = match preset {
            MediumPreset::FlowerDissipative => (C64::new(1.0, 0.25), C64::new(1.0, 1.0 / 6.0)),
            _ => (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        };
        if preset == MediumPreset::FlowerAveraged {
            m.kappa = kappa * kappa0;
            return m;
        }
        for t in 0..mesh.num_triangles() {
            let (mu0, eps0) = flower_coefficients(mesh.centroid(t));
            m.mu[t] = fm * mu0;
            m.eps[t] = fe * eps0;
        }
        m
    }

    /// Loads `{"kappa": k, "mu": [[re, im], ...], "eps": [[re, im], ...], "eta": [re, im]}`
    /// with one coefficient pair per triangle; `eta` defaults to 1.
    pub fn from_json(mesh: &Mesh, text: &str) -> Result<Self> {
        let raw: JsonMedium = serde_json::from_str(text).map_err(|e| Error::Parse(format!("json medium: {e}")))?;
        let nt = mesh.num_triangles();
        if raw.mu.len() != nt || raw.eps.len() != nt {
            return Err(Error::DimensionMismatch {
                expected: nt,
                got: if raw.mu.len() != nt { raw.mu.len() } else { raw.eps.len() },
            });
        }
        let c = |v: &[f64; 2]| C64::new(v[0], v[1]);
        let eta = raw.eta.map(|v| c(&v)).unwrap_or(C64::new(1.0, 0.0));
        let medium = Self {
            kappa: raw.kappa,
            mu: raw.mu.iter().map(c).collect(),
            eps: raw.eps.iter().map(c).collect(),
            eta: vec![eta; mesh.num_edges()],
            kappa0: None,
            label: "json".into(),
        };
        medium.validate(mesh)?;
        Ok(medium)
    }

    pub fn load(mesh: &Mesh, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(mesh, &text)
    }

    /// Checks sizes, `κ > 0`, positive real parts and nonnegative imaginary parts.
    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {}", self.kappa)));
        }
        if self.mu.len() != mesh.num_triangles() || self.eps.len() != mesh.num_triangles() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_triangles(),
                got: self.mu.len().min(self.eps.len()),
            });
        }
        if self.eta.len() != mesh.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_edges(),
                got: self.eta.len(),
            });
        }
        let bad = |v: &C64| !(v.re > 0.0 && v.im >= 0.0);
        if let Some(t) = (0..mesh.num_triangles()).find(|&t| bad(&self.mu[t]) || bad(&self.eps[t])) {
            return Err(Error::InvalidArgument(format!(
                "triangle {t}: coefficients need Re > 0 and Im >= 0 (mu = {}, eps = {})",
                self.mu[t], self.eps[t]
            )));
        }
        if let Some(&e) = mesh.boundary_edges().iter().find(|&&e| bad(&self.eta[e])) {
            return Err(Error::InvalidArgument(format!("edge {e}: impedance {} needs Re > 0, Im >= 0", self.eta[e])));
        }
        Ok(())
    }

    /// Mean of `Re √(μ/ε)` over the triangles adjacent to edge `e`.
    pub fn mean_impedance(&self, mesh: &Mesh, e: usize) -> f64 {
        let ts = mesh.edge_triangles(e);
        ts.iter().map(|&t| (self.mu[t] / self.eps[t]).sqrt().re).sum::<f64>() / ts.len() as f64
    }

    /// Wavelength `2π/κ`.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.kappa
    }
}
