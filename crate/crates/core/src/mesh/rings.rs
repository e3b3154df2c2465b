//! Triangulation of the band between two closed vertex rings.
//!
//! Rings are given as vertex ids with angles increasing counterclockwise. Triangles
//! come out counterclockwise when the inner ring lies at the smaller radial parameter.

use std::f64::consts::TAU;

#[derive(Clone, Debug)]
pub(crate) struct Ring {
    pub ids: Vec<usize>,
    pub angles: Vec<f64>,
}

pub(crate) fn ring_angles(n: usize, offset: f64) -> Vec<f64> {
    (0..n).map(|i| offset + TAU * i as f64 / n as f64).collect()
}

fn unwrap_from(angles: &[f64], start: usize) -> Vec<f64> {
    let n = angles.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = angles[start];
    out.push(prev);
    for m in 1..=n {
        let a = angles[(start + m) % n];
        let mut d = (a - prev).rem_euclid(TAU);
        if m == n {
            d = TAU - (out[n - 1] - out[0]);
        }
        prev += d;
        out.push(prev);
    }
    out
}

/// Triangulates the band between `inner` and `outer` by merging the two angle sequences.
/// On exact angle ties the inner ring advances first unless `outer_first`.
pub(crate) fn stitch(inner: &Ring, outer: &Ring, outer_first: bool) -> Vec<[usize; 3]> {
    let (ni, no) = (inner.ids.len(), outer.ids.len());
    let a0 = inner.angles[0];
    let k0 = (0..no)
        .min_by(|&x, &y| {
            let dx = circ(outer.angles[x] - a0).abs();
            let dy = circ(outer.angles[y] - a0).abs();
            dx.partial_cmp(&dy).unwrap().then(x.cmp(&y))
        })
        .unwrap();
    let ai = unwrap_from(&inner.angles, 0);
    let mut ao = unwrap_from(&outer.angles, k0);
    let base = a0 + circ(outer.angles[k0] - a0) - ao[0];
    for a in &mut ao {
        *a += base;
    }
    let mut tris = Vec::with_capacity(ni + no);
    let (mut j, mut k) = (0usize, 0usize);
    while j < ni || k < no {
        let adv_inner = if j == ni {
            false
        } else if k == no {
            true
        } else {
            let (x, y) = (ai[j + 1], ao[k + 1]);
            let tie = (x - y).abs() <= 1e-12 * (1.0 + x.abs());
            if tie {
                !outer_first
            } else {
                x < y
            }
        };
        let vi = inner.ids[j % ni];
        let vo = outer.ids[(k0 + k) % no];
        if adv_inner {
            tris.push([vi, vo, inner.ids[(j + 1) % ni]]);
            j += 1;
        } else {
            tris.push([vi, vo, outer.ids[(k0 + k + 1) % no]]);
            k += 1;
        }
    }
    tris
}

fn circ(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > std::f64::consts::PI {
        w - TAU
    } else {
        w
    }
}

/// Fan of triangles from `center` to every consecutive pair of `ring`.
pub(crate) fn fan(center: usize, ring: &Ring) -> Vec<[usize; 3]> {
    let n = ring.ids.len();
    (0..n)
        .map(|i| [center, ring.ids[i], ring.ids[(i + 1) % n]])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(start: usize, n: usize, off: f64) -> Ring {
        Ring {
            ids: (start..start + n).collect(),
            angles: ring_angles(n, off),
        }
    }

    #[test]
    fn stitch_uses_every_ring_edge_once() {
        for (ni, no) in [(8, 8), (8, 13), (13, 8), (6, 12)] {
            let a = ring(0, ni, 0.0);
            let b = ring(ni, no, 0.1);
            let tris = stitch(&a, &b, false);
            assert_eq!(tris.len(), ni + no);
            let mut inner_edges = 0;
            let mut outer_edges = 0;
            for t in &tris {
                if t[2] < ni {
                    inner_edges += 1;
                } else {
                    outer_edges += 1;
                }
            }
            assert_eq!((inner_edges, outer_edges), (ni, no));
        }
    }
}
