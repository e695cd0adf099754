use crate::mesh_partition::Mesh;
use crate::{Error, Result, C64, I};

/// Plane wave `E(x) = A p e^{iκ d·x}` with `p = (−d_y, d_x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub direction: [f64; 2],
    pub amplitude: C64,
}

impl PlaneWave {
    pub fn new(direction: [f64; 2], amplitude: C64) -> Result<Self> {
        let n = direction[0].hypot(direction[1]);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("plane-wave direction must be nonzero".into()));
        }
        Ok(Self {
            direction: [direction[0] / n, direction[1] / n],
            amplitude,
        })
    }

    /// Unit amplitude wave travelling along `+x`.
    pub fn from_left() -> Self {
        Self {
            direction: [1.0, 0.0],
            amplitude: C64::new(1.0, 0.0),
        }
    }

    pub fn polarization(&self) -> [f64; 2] {
        [-self.direction[1], self.direction[0]]
    }

    /// Field value at `x`.
    pub fn field(&self, kappa: f64, x: [f64; 2]) -> [C64; 2] {
        let phase = self.amplitude * (I * kappa * (self.direction[0] * x[0] + self.direction[1] * x[1])).exp();
        let p = self.polarization();
        [phase * p[0], phase * p[1]]
    }

    /// Scalar curl at `x`, which equals `iκ` times the phase factor.
    pub fn curl(&self, kappa: f64, x: [f64; 2]) -> C64 {
        self.amplitude * I * kappa * (I * kappa * (self.direction[0] * x[0] + self.direction[1] * x[1])).exp()
    }
}

/// Right-hand side data: a piecewise constant volume source and/or an
/// incoming plane wave entering through the impedance boundary condition.
#[derive(Debug, Clone, Default)]
pub struct SourceSpec {
    pub volume: Option<Vec<[C64; 2]>>,
    pub plane_wave: Option<PlaneWave>,
}

impl SourceSpec {
    pub fn plane_wave(wave: PlaneWave) -> Self {
        Self {
            volume: None,
            plane_wave: Some(wave),
        }
    }

    pub fn volume(values: Vec<[C64; 2]>) -> Self {
        Self {
            volume: Some(values),
            plane_wave: None,
        }
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if self.volume.is_none() && self.plane_wave.is_none() {
            return Err(Error::InvalidArgument("source needs a volume term or a plane wave".into()));
        }
        if let Some(v) = &self.volume {
            if v.len() != mesh.num_triangles() {
                return Err(Error::DimensionMismatch {
                    expected: mesh.num_triangles(),
                    got: v.len(),
                });
            }
        }
        Ok(())
    }
}

/// 4-point Gauss–Legendre rule on `[0, 1]`.
pub(crate) const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_9),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_1),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_1),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_9),
];

/// `∫_e g (φ_e · t) ds` for boundary edge `e`, where `t` is the
/// counterclockwise boundary tangent and
/// `g = μ⁻¹ curl E − i(κ/η)(E·t)`.
pub(crate) fn plane_wave_load(mesh: &Mesh, e: usize, wave: &PlaneWave, kappa: f64, mu: C64, eta: C64) -> C64 {
    let [a, b] = mesh.edges()[e];
    let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
    let sigma = mesh.boundary_orientation(e);
    let tc = mesh.tangent(e);
    let t = [sigma * tc[0], sigma * tc[1]];
    let mut acc = C64::new(0.0, 0.0);
    for (s, w) in GAUSS4 {
        let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
        let field = wave.field(kappa, x);
        let g = wave.curl(kappa, x) / mu - I * (kappa / eta) * (field[0] * t[0] + field[1] * t[1]);
        acc += w * g;
    }
    // φ_e · t = σ / L on the edge, ds = L dσ
    acc * sigma
}
