//! Flat plane and hyperbolic plane joined by thin tubes.
//!
//! The Euclidean sheet is the plane outside the unit disk (loop L0), truncated at
//! `exp(log_radius_plane)` (loop L1). The hyperbolic sheet is a geodesic disk of radius
//! `radius_hyperbolic` (loop L2). Handle `a` (1-based) removes the disk of radius `δ_a`
//! about `x_a = (a + 1, 0)` from the plane and about `y_a` (geodesic radius 1.2, angle
//! `2π(a-1)/A`) from the hyperbolic sheet and joins the two circles by a flat tube of
//! circumference `2πδ_a` and length `δ_a`. Around each handle both sheets are meshed
//! with log-polar rings, so arbitrarily small `δ_a` cost only logarithmically many rings.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::flat::{circle, polar_chord};
use super::hyperbolic::{counts, radial_levels, spacing};
use super::{Layout, Sheet};
use crate::error::{Error, Result};
use crate::mesh::rings::{ring_angles, stitch, Ring};
use crate::mesh::{metric, planar, Builder, Chart, ChartKind, GeometryTag, LoopRole, SurfaceMesh};

const RHO_PLANE: f64 = 0.35;
const RHO_HYP: f64 = 0.3;
const HANDLE_RADIUS_HYP: f64 = 1.2;
const CORE_HYP: f64 = 2.0;

fn default_handles() -> usize {
    4
}

fn default_log_radius() -> f64 {
    3.0
}

fn default_radius_hyp() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluedParams {
    #[serde(default = "default_handles")]
    pub handles: usize,
    /// Handle weights `c_a`; defaults to `a⁻²`.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// Tube radii `δ_a`; defaults to the largest admissible value `exp(-C/c_a)`.
    #[serde(default)]
    pub tube_radii: Option<Vec<f64>>,
    /// Natural log of the Euclidean truncation radius.
    #[serde(default = "default_log_radius")]
    pub log_radius_plane: f64,
    /// Geodesic truncation radius of the hyperbolic sheet.
    #[serde(default = "default_radius_hyp")]
    pub radius_hyperbolic: f64,
    pub res: usize,
}

/// Handle centers `x_a = (a + 1, 0)`, `a = 1..=handles`.
pub fn default_centers(handles: usize) -> Vec<[f64; 2]> {
    (1..=handles).map(|a| [a as f64 + 1.0, 0.0]).collect()
}

/// `C = 1 + Σ c_a log(1 + |x_a|)`.
pub fn glued_constant(weights: &[f64], centers: &[[f64; 2]]) -> f64 {
    1.0 + weights
        .iter()
        .zip(centers)
        .map(|(c, x)| c * (1.0 + x[0].hypot(x[1])).ln())
        .sum::<f64>()
}

/// Largest admissible tube radius `exp(-C/c_a)`.
pub fn tube_radius_bound(constant: f64, weight: f64) -> f64 {
    (-constant / weight).exp()
}

impl GluedParams {
    pub fn with_defaults(res: usize) -> Self {
        GluedParams {
            handles: default_handles(),
            weights: None,
            tube_radii: None,
            log_radius_plane: default_log_radius(),
            radius_hyperbolic: default_radius_hyp(),
            res,
        }
    }

    pub fn resolved_weights(&self) -> Vec<f64> {
        self.weights
            .clone()
            .unwrap_or_else(|| (1..=self.handles).map(|a| 1.0 / (a * a) as f64).collect())
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        default_centers(self.handles)
    }

    pub fn constant(&self) -> f64 {
        glued_constant(&self.resolved_weights(), &self.centers())
    }

    pub fn resolved_tube_radii(&self) -> Vec<f64> {
        let c = self.constant();
        self.tube_radii.clone().unwrap_or_else(|| {
            self.resolved_weights()
                .iter()
                .map(|&w| tube_radius_bound(c, w))
                .collect()
        })
    }

    /// Natural log of the radius where the planar core region meets the log-polar rings.
    pub fn inner_log_radius(&self) -> f64 {
        (self.handles as f64 + 1.0 + 2.0).ln().ceil()
    }

    pub fn validate(&self) -> Result<()> {
        if self.handles == 0 || self.handles > 12 {
            return Err(Error::param("handles", "must be between 1 and 12"));
        }
        if self.res < 8 {
            return Err(Error::param("res", format!("must be at least 8, got {}", self.res)));
        }
        let w = self.resolved_weights();
        if w.len() != self.handles {
            return Err(Error::param("weights", "length must equal handles"));
        }
        for (i, &c) in w.iter().enumerate() {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::param(format!("weights[{i}]"), "must be positive"));
            }
        }
        let c = self.constant();
        let d = self.resolved_tube_radii();
        if d.len() != self.handles {
            return Err(Error::param("tube_radii", "length must equal handles"));
        }
        for (i, (&delta, &wi)) in d.iter().zip(&w).enumerate() {
            let bound = tube_radius_bound(c, wi);
            if !(delta > 0.0) {
                return Err(Error::param(format!("tube_radii[{i}]"), "must be positive"));
            }
            if delta > bound * (1.0 + 1e-12) {
                return Err(Error::param(
                    format!("tube_radii[{i}]"),
                    format!("{delta:e} exceeds exp(-C/c) = {bound:e} (C = {c})"),
                ));
            }
            if delta >= 0.5 * RHO_HYP {
                return Err(Error::param(format!("tube_radii[{i}]"), "tube too wide for the handle region"));
            }
        }
        if self.log_radius_plane < self.inner_log_radius() + 1.0 - 1e-12 {
            return Err(Error::param(
                "log_radius_plane",
                format!("must be at least {}", self.inner_log_radius() + 1.0),
            ));
        }
        if self.radius_hyperbolic <= CORE_HYP {
            return Err(Error::param("radius_hyperbolic", format!("must exceed {CORE_HYP}")));
        }
        Ok(())
    }
}

/// Ring-parameter bookkeeping on top of the builder.
struct Glued {
    b: Builder,
    sheet: Vec<Sheet>,
    radial: Vec<f64>,
    handle: Vec<Option<(usize, f64)>>,
    /// Radial parameter of the ring carrying the vertex (radius, geodesic radius or tube height).
    rp: Vec<f64>,
    ang: Vec<f64>,
}

impl Glued {
    fn vertex(&mut self, xy: Option<[f64; 2]>, sheet: Sheet, radial: f64, rp: f64, ang: f64) -> usize {
        self.sheet.push(sheet);
        self.radial.push(radial);
        self.handle.push(None);
        self.rp.push(rp);
        self.ang.push(ang);
        self.b.vertex(xy)
    }

    fn band_plane(&mut self, inner: &Ring, outer: &Ring) {
        let tris = stitch(inner, outer, false);
        let (rp, ang) = (&self.rp, &self.ang);
        self.b
            .triangles_by_id(&tris, |i, j| polar_chord((rp[i], ang[i]), (rp[j], ang[j])));
    }

    fn band_hyp(&mut self, inner: &Ring, outer: &Ring) {
        let tris = stitch(inner, outer, false);
        let (rp, ang) = (&self.rp, &self.ang);
        let polar = |v: usize| [rp[v] * ang[v].cos(), rp[v] * ang[v].sin()];
        self.b
            .triangles_by_id(&tris, |i, j| metric::hyperbolic_polar(polar(i), polar(j)));
    }

    fn band_tube(&mut self, inner: &Ring, zi: f64, outer: &Ring, zo: f64, delta: f64) {
        let tris = stitch(inner, outer, false);
        let ang = &self.ang;
        let z = |v: usize| if in_ring(inner, v) { zi } else { zo };
        self.b.triangles_by_id(&tris, |i, j| {
            let c = 2.0 * delta * (0.5 * (ang[i] - ang[j])).sin();
            (z(i) - z(j)).hypot(c)
        });
    }
}

fn in_ring(r: &Ring, v: usize) -> bool {
    v.wrapping_sub(r.ids[0]) < r.ids.len()
}

fn offset(parity: usize, n: usize) -> f64 {
    if parity % 2 == 1 {
        PI / n as f64
    } else {
        0.0
    }
}

pub(super) fn glued_plane(p: &GluedParams) -> Result<(SurfaceMesh, Layout)> {
    p.validate()?;
    let res = p.res;
    let centers = p.centers();
    let deltas = p.resolved_tube_radii();
    let a_count = p.handles;
    let h = TAU / res as f64;
    let n_h = (3 * res / 8).max(8);
    let handle_angles = ring_angles(n_h, 0.0);
    let log_in = p.inner_log_radius();
    let r_in = log_in.exp();

    let mut g = Glued {
        b: Builder::new(),
        sheet: Vec::new(),
        radial: Vec::new(),
        handle: Vec::new(),
        rp: Vec::new(),
        ang: Vec::new(),
    };

    // Euclidean core region between the unit circle and radius r_in.
    let n_in = (TAU * r_in / h).round() as usize;
    let outer = circle([0.0, 0.0], r_in, n_in);
    let unit = circle([0.0, 0.0], 1.0, res);
    let mut polys = vec![unit];
    for x in &centers {
        polys.push(circle(*x, RHO_PLANE, n_h));
    }
    let pm = planar::triangulate(&outer, &polys, 0.5 * h * h)?;
    let e_base = g.rp.len();
    let out_angles = ring_angles(n_in, 0.0);
    for (k, q) in pm.points.iter().enumerate() {
        let v = g.vertex(Some(*q), Sheet::Plane, q[0].hypot(q[1]), f64::NAN, f64::NAN);
        if k < n_in {
            g.rp[v] = r_in;
            g.ang[v] = out_angles[k];
        } else if k >= n_in + res && k < n_in + res + a_count * n_h {
            let a = (k - n_in - res) / n_h;
            g.rp[v] = RHO_PLANE;
            g.ang[v] = handle_angles[(k - n_in - res) % n_h];
            g.handle[v] = Some((a, RHO_PLANE));
        }
    }
    let tris: Vec<[usize; 3]> = pm.triangles.iter().map(|t| t.map(|v| v + e_base)).collect();
    g.b.triangles(&tris, metric::euclid);
    let unit_ids: Vec<usize> = (e_base + n_in..e_base + n_in + res).collect();
    let plane_hole = |a: usize| Ring {
        ids: (e_base + n_in + res + a * n_h..e_base + n_in + res + (a + 1) * n_h).collect(),
        angles: handle_angles.clone(),
    };

    // Euclidean log-polar rings out to the truncation radius.
    let mut prev = Ring {
        ids: (e_base..e_base + n_in).collect(),
        angles: out_angles,
    };
    let mut parity = 0;
    let mut j: u32 = 0;
    let mut lo = log_in;
    while lo < p.log_radius_plane - 1e-12 {
        let hi = (lo + 1.0).min(p.log_radius_plane);
        let n = n_in.checked_shr(j).unwrap_or(0).max(16);
        let full = (1.0 / (0.866 * TAU / n as f64)).ceil();
        let steps = ((hi - lo) * full).ceil().max(1.0) as usize;
        for k in 1..=steps {
            let lr = if k == steps { hi } else { lo + (hi - lo) * k as f64 / steps as f64 };
            let r = lr.exp();
            parity += 1;
            let angles = ring_angles(n, offset(parity, n));
            let ids = angles
                .iter()
                .map(|&t| g.vertex(Some([r * t.cos(), r * t.sin()]), Sheet::Plane, r, r, t))
                .collect();
            let ring = Ring { ids, angles };
            g.band_plane(&prev, &ring);
            prev = ring;
        }
        lo = hi;
        j += 1;
    }
    let plane_trunc = prev.ids.clone();

    // Hyperbolic core: geodesic disk of radius CORE_HYP minus the handle disks, in the Poincaré chart.
    let n_core = counts(&[CORE_HYP], |r| TAU * r.sinh(), res, 8)[0];
    let core_angles = ring_angles(n_core, 0.0);
    let outer_h: Vec<[f64; 2]> = core_angles
        .iter()
        .map(|&t| metric::poincare_from_polar(CORE_HYP, t))
        .collect();
    let y: Vec<[f64; 2]> = (0..a_count)
        .map(|a| metric::poincare_from_polar(HANDLE_RADIUS_HYP, TAU * a as f64 / a_count as f64))
        .collect();
    let holes_h: Vec<Vec<[f64; 2]>> = y
        .iter()
        .map(|&c| {
            handle_angles
                .iter()
                .map(|&t| metric::poincare_offset(c, RHO_HYP, -t))
                .collect()
        })
        .collect();
    let rho_edge = (0.5 * CORE_HYP).tanh();
    let hp = spacing(res, CORE_HYP) * (1.0 - rho_edge * rho_edge) / 2.0;
    let pm = planar::triangulate(&outer_h, &holes_h, 0.5 * hp * hp)?;
    let h_base = g.rp.len();
    for (k, q) in pm.points.iter().enumerate() {
        let r = 2.0 * q[0].hypot(q[1]).atanh();
        let v = g.vertex(Some(*q), Sheet::Hyperbolic, r, f64::NAN, f64::NAN);
        if k < n_core {
            g.rp[v] = CORE_HYP;
            g.ang[v] = core_angles[k];
        } else if k < n_core + a_count * n_h {
            g.rp[v] = RHO_HYP;
            g.ang[v] = handle_angles[(k - n_core) % n_h];
        }
    }
    let tris: Vec<[usize; 3]> = pm.triangles.iter().map(|t| t.map(|v| v + h_base)).collect();
    g.b.triangles(&tris, metric::poincare);
    let hyp_hole = |a: usize| Ring {
        ids: (h_base + n_core + a * n_h..h_base + n_core + (a + 1) * n_h).collect(),
        angles: handle_angles.clone(),
    };

    // Hyperbolic polar rings out to the truncation radius.
    let levels = radial_levels(CORE_HYP, p.radius_hyperbolic, res);
    let ns = counts(&levels, |r| TAU * r.sinh(), res, 8);
    let mut prev = Ring {
        ids: (h_base..h_base + n_core).collect(),
        angles: core_angles,
    };
    for (i, (&r, &n)) in levels.iter().zip(&ns).enumerate().skip(1) {
        let angles = ring_angles(n, offset(i, n));
        let ids = angles
            .iter()
            .map(|&t| g.vertex(Some(metric::poincare_from_polar(r, t)), Sheet::Hyperbolic, r, r, t))
            .collect();
        let ring = Ring { ids, angles };
        g.band_hyp(&prev, &ring);
        prev = ring;
    }
    let hyp_trunc = prev.ids.clone();

    // Handles: hyperbolic rings shrinking toward y_a, the tube, plane rings growing from x_a.
    let step = 0.866 * TAU / n_h as f64;
    for a in 0..a_count {
        let delta = deltas[a];
        let mut parity = 0;
        let mut prev = hyp_hole(a);
        let m_h = ((RHO_HYP / delta).ln() / step).ceil() as usize;
        for i in (0..m_h).rev() {
            let s = delta * ((RHO_HYP / delta).ln() * i as f64 / m_h as f64).exp();
            parity += 1;
            let angles = ring_angles(n_h, offset(parity, n_h));
            let ids = angles
                .iter()
                .map(|&t| {
                    let q = metric::poincare_offset(y[a], s, -t);
                    let r = 2.0 * q[0].hypot(q[1]).atanh();
                    g.vertex(Some(q), Sheet::Hyperbolic, r, s, t)
                })
                .collect();
            let ring = Ring { ids, angles };
            g.band_hyp(&prev, &ring);
            prev = ring;
        }
        let mut z_prev = delta;
        for z in [2.0 * delta / 3.0, delta / 3.0] {
            parity += 1;
            let angles = ring_angles(n_h, offset(parity, n_h));
            let ids = angles
                .iter()
                .map(|&t| g.vertex(None, Sheet::Tube(a), f64::NAN, z, t))
                .collect();
            let ring = Ring { ids, angles };
            g.band_tube(&prev, z_prev, &ring, z, delta);
            prev = ring;
            z_prev = z;
        }
        let m_e = ((RHO_PLANE / delta).ln() / step).ceil() as usize;
        let x = centers[a];
        for i in 0..m_e {
            let r = delta * ((RHO_PLANE / delta).ln() * i as f64 / m_e as f64).exp();
            parity += 1;
            let angles = ring_angles(n_h, offset(parity, n_h));
            let ids = angles
                .iter()
                .map(|&t| {
                    let q = [x[0] + r * t.cos(), x[1] + r * t.sin()];
                    let v = g.vertex(Some(q), Sheet::Plane, q[0].hypot(q[1]), r, t);
                    g.handle[v] = Some((a, r));
                    v
                })
                .collect();
            let ring = Ring { ids, angles };
            if i == 0 {
                g.band_tube(&prev, z_prev, &ring, 0.0, delta);
            } else {
                g.band_plane(&prev, &ring);
            }
            prev = ring;
        }
        g.band_plane(&prev, &plane_hole(a));
    }

    g.b.boundary("L0", unit_ids, LoopRole::TrueBoundary);
    g.b.boundary("L1", plane_trunc, LoopRole::Truncation);
    g.b.boundary("L2", hyp_trunc, LoopRole::Truncation);
    let layout = Layout {
        sheet: g.sheet,
        radial: g.radial,
        handle: g.handle,
    };
    let mesh = g.b.finish(GeometryTag::Glued, Chart::new(ChartKind::PiecewiseFlat))?;
    Ok((mesh, layout))
}
