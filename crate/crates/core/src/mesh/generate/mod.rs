//! Deterministic scenario generators.
//!
//! Boundary loop labels per scenario:
//!
//! | scenario              | loops                                              | χ  |
//! |-----------------------|----------------------------------------------------|----|
//! | `annulus`             | L0 inner circle, L1 outer circle (truncation)      | 0  |
//! | `disk`                | L0 rim                                             | 1  |
//! | `pair_of_pants`       | L0 outer circle, L1 and L2 holes in given order    | -1 |
//! | `hyperbolic_disk`     | L0 rim (truncation)                                | 1  |
//! | `hyperbolic_annulus`  | L0 inner circle, L1 outer circle (truncation)      | 0  |
//! | `hyperbolic_cylinder` | L0 at `t = -T`, L1 at `t = +T` (both truncation)   | 0  |
//! | `collar_annulus`      | L0 inner circle `r = 1`, L1 outer circle           | 0  |
//! | `rectangle`           | L0 whole boundary                                  | 1  |
//! | `glued_plane`         | L0 unit core, L1 Euclidean truncation, L2 hyperbolic truncation | `1-2A` |

mod flat;
mod glued;
mod hyperbolic;

use serde::{Deserialize, Serialize};

use super::{ChartKind, SurfaceMesh};
use crate::error::{Error, Result};

pub use glued::{default_centers, glued_constant, tube_radius_bound, GluedParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hole {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Scenario description; `res` is the number of boundary segments on the reference circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    Annulus {
        r_in: f64,
        r_out: f64,
        res: usize,
    },
    Disk {
        r: f64,
        res: usize,
    },
    PairOfPants {
        radius: f64,
        holes: Vec<Hole>,
        res: usize,
    },
    HyperbolicDisk {
        r_max: f64,
        res: usize,
    },
    HyperbolicAnnulus {
        r_in: f64,
        r_max: f64,
        res: usize,
    },
    HyperbolicCylinder {
        neck: f64,
        half_length: f64,
        res: usize,
    },
    CollarAnnulus {
        r_out: f64,
        res: usize,
    },
    GluedPlane(GluedParams),
    Rectangle {
        w: f64,
        h: f64,
        res: usize,
    },
}

/// Which piece of a glued surface a vertex lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sheet {
    Plane,
    Tube(usize),
    Hyperbolic,
}

/// Per-vertex placement used by end-wise analyses.
///
/// `radial` is the distance-like coordinate of the vertex on its sheet: Euclidean
/// or geodesic radius from the chart origin, or `t` on the hyperbolic cylinder.
/// `handle` holds, for plane vertices near a handle, the handle index and the
/// exact distance to its center (chart coordinates lose that precision).
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub sheet: Vec<Sheet>,
    pub radial: Vec<f64>,
    pub handle: Vec<Option<(usize, f64)>>,
}

impl Layout {
    pub(crate) fn from_chart(mesh: &SurfaceMesh) -> Layout {
        let n = mesh.num_vertices();
        let kind = mesh.chart().kind;
        let sheet = match kind {
            ChartKind::HyperbolicPolar | ChartKind::Fermi { .. } => Sheet::Hyperbolic,
            _ => Sheet::Plane,
        };
        let radial = (0..n)
            .map(|v| match (kind, mesh.xy(v)) {
                (ChartKind::Fermi { .. }, Some(p)) => p[0],
                (_, Some(p)) => p[0].hypot(p[1]),
                (_, None) => f64::NAN,
            })
            .collect();
        Layout {
            sheet: vec![sheet; n],
            radial,
            handle: vec![None; n],
        }
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be positive and finite, got {x}")))
    }
}

fn check_res(res: usize) -> Result<()> {
    if res >= 8 {
        Ok(())
    } else {
        Err(Error::param("res", format!("must be at least 8, got {res}")))
    }
}

impl ScenarioSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioSpec::Annulus { .. } => "annulus",
            ScenarioSpec::Disk { .. } => "disk",
            ScenarioSpec::PairOfPants { .. } => "pair_of_pants",
            ScenarioSpec::HyperbolicDisk { .. } => "hyperbolic_disk",
            ScenarioSpec::HyperbolicAnnulus { .. } => "hyperbolic_annulus",
            ScenarioSpec::HyperbolicCylinder { .. } => "hyperbolic_cylinder",
            ScenarioSpec::CollarAnnulus { .. } => "collar_annulus",
            ScenarioSpec::GluedPlane(_) => "glued_plane",
            ScenarioSpec::Rectangle { .. } => "rectangle",
        }
    }

    /// Euler characteristic of the generated surface.
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            ScenarioSpec::Disk { .. }
            | ScenarioSpec::HyperbolicDisk { .. }
            | ScenarioSpec::Rectangle { .. } => 1,
            ScenarioSpec::PairOfPants { holes, .. } => 1 - holes.len() as i64,
            ScenarioSpec::GluedPlane(p) => 1 - 2 * p.handles as i64,
            _ => 0,
        }
    }

    /// Resolution parameter of the scenario.
    pub fn res(&self) -> usize {
        match self {
            ScenarioSpec::Annulus { res, .. }
            | ScenarioSpec::Disk { res, .. }
            | ScenarioSpec::PairOfPants { res, .. }
            | ScenarioSpec::HyperbolicDisk { res, .. }
            | ScenarioSpec::HyperbolicAnnulus { res, .. }
            | ScenarioSpec::HyperbolicCylinder { res, .. }
            | ScenarioSpec::CollarAnnulus { res, .. }
            | ScenarioSpec::Rectangle { res, .. } => *res,
            ScenarioSpec::GluedPlane(p) => p.res,
        }
    }

    /// The same scenario at resolution `new`.
    pub fn with_res(&self, new: usize) -> ScenarioSpec {
        let mut s = self.clone();
        match &mut s {
            ScenarioSpec::Annulus { res, .. }
            | ScenarioSpec::Disk { res, .. }
            | ScenarioSpec::PairOfPants { res, .. }
            | ScenarioSpec::HyperbolicDisk { res, .. }
            | ScenarioSpec::HyperbolicAnnulus { res, .. }
            | ScenarioSpec::HyperbolicCylinder { res, .. }
            | ScenarioSpec::CollarAnnulus { res, .. }
            | ScenarioSpec::Rectangle { res, .. } => *res = new,
            ScenarioSpec::GluedPlane(p) => p.res = new,
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScenarioSpec::Annulus { r_in, r_out, res } => {
                positive("r_in", *r_in)?;
                positive("r_out", *r_out)?;
                if r_in >= r_out {
                    return Err(Error::param("r_in", "must be smaller than r_out"));
                }
                check_res(*res)
            }
            ScenarioSpec::Disk { r, res } => {
                positive("r", *r)?;
                check_res(*res)
            }
            ScenarioSpec::PairOfPants { radius, holes, res } => {
                positive("radius", *radius)?;
                check_res(*res)?;
                if holes.len() != 2 {
                    return Err(Error::param("holes", "exactly two holes are required"));
                }
                for (i, h) in holes.iter().enumerate() {
                    positive(&format!("holes[{i}].radius"), h.radius)?;
                    let reach = h.center[0].hypot(h.center[1]) + h.radius;
                    if reach >= *radius {
                        return Err(Error::param(format!("holes[{i}]"), "hole leaves the outer disk"));
                    }
                }
                let d = (holes[0].center[0] - holes[1].center[0])
                    .hypot(holes[0].center[1] - holes[1].center[1]);
                if d <= holes[0].radius + holes[1].radius {
                    return Err(Error::param("holes", "holes overlap"));
                }
                Ok(())
            }
            ScenarioSpec::HyperbolicDisk { r_max, res } => {
                positive("r_max", *r_max)?;
                check_res(*res)
            }
            ScenarioSpec::HyperbolicAnnulus { r_in, r_max, res } => {
                positive("r_in", *r_in)?;
                positive("r_max", *r_max)?;
                if r_in >= r_max {
                    return Err(Error::param("r_in", "must be smaller than r_max"));
                }
                check_res(*res)
            }
            ScenarioSpec::HyperbolicCylinder {
                neck,
                half_length,
                res,
            } => {
                positive("neck", *neck)?;
                positive("half_length", *half_length)?;
                check_res(*res)
            }
            ScenarioSpec::CollarAnnulus { r_out, res } => {
                positive("r_out", *r_out)?;
                if *r_out <= 2.0 {
                    return Err(Error::param("r_out", "must exceed 2"));
                }
                check_res(*res)
            }
            ScenarioSpec::GluedPlane(p) => p.validate(),
            ScenarioSpec::Rectangle { w, h, res } => {
                positive("w", *w)?;
                positive("h", *h)?;
                check_res(*res)
            }
        }
    }
}

/// Generates the mesh for `spec`.
pub fn generate(spec: &ScenarioSpec) -> Result<SurfaceMesh> {
    generate_with_layout(spec).map(|(m, _)| m)
}

/// Generates the mesh together with its per-vertex layout.
pub fn generate_with_layout(spec: &ScenarioSpec) -> Result<(SurfaceMesh, Layout)> {
    spec.validate()?;
    let mesh = match spec {
        ScenarioSpec::Annulus { r_in, r_out, res } => flat::annulus(*r_in, *r_out, *res)?,
        ScenarioSpec::Disk { r, res } => flat::disk(*r, *res)?,
        ScenarioSpec::PairOfPants { radius, holes, res } => flat::pair_of_pants(*radius, holes, *res)?,
        ScenarioSpec::HyperbolicDisk { r_max, res } => hyperbolic::disk(*r_max, *res)?,
        ScenarioSpec::HyperbolicAnnulus { r_in, r_max, res } => {
            hyperbolic::annulus(*r_in, *r_max, *res)?
        }
        ScenarioSpec::HyperbolicCylinder {
            neck,
            half_length,
            res,
        } => hyperbolic::cylinder(*neck, *half_length, *res)?,
        ScenarioSpec::CollarAnnulus { r_out, res } => flat::collar_annulus(*r_out, *res)?,
        ScenarioSpec::Rectangle { w, h, res } => flat::rectangle(*w, *h, *res)?,
        ScenarioSpec::GluedPlane(p) => return glued::glued_plane(p),
    };
    let layout = Layout::from_chart(&mesh);
    Ok((mesh, layout))
}
