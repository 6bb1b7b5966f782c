//! Exact memory profile `r ↦ ξ_r` of the whole play family.
//!
//! For inputs starting from a play-initialised state the profile is continuous,
//! piecewise linear with slopes in {−1, 0, 1}, equal to the current input at
//! `r = 0` and constant beyond its last vertex. An input step replaces the
//! profile below a single switching radius and leaves the rest untouched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SLOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryCurve {
    vertices: Vec<(f64, f64)>,
}

impl Default for MemoryCurve {
    fn default() -> Self {
        Self::virgin()
    }
}

impl MemoryCurve {
    pub fn virgin() -> Self {
        Self { vertices: vec![(0.0, 0.0)] }
    }

    /// Profile of `play_init(q0, ·)`.
    pub fn from_initial(q0: f64) -> Self {
        if q0 == 0.0 {
            Self::virgin()
        } else {
            Self { vertices: vec![(0.0, q0), (q0.abs(), 0.0)] }
        }
    }

    /// Rebuilds a profile from stored vertices, checking its structure.
    pub fn from_vertices(vertices: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::Checkpoint(format!("memory curve: {msg}")));
        match vertices.first() {
            None => return bad("no vertices"),
            Some(&(r0, _)) if r0 != 0.0 => return bad("first vertex must sit at r = 0"),
            _ => {}
        }
        if vertices.iter().any(|(r, x)| !(r.is_finite() && x.is_finite())) {
            return bad("non-finite vertex");
        }
        for w in vertices.windows(2) {
            let dr = w[1].0 - w[0].0;
            if dr <= 0.0 {
                return bad("radii must be strictly increasing");
            }
            let s = (w[1].1 - w[0].1) / dr;
            if [-1.0, 0.0, 1.0].iter().all(|t| (s - t).abs() > 1e-6) {
                return bad("slopes must lie in {-1, 0, 1}");
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Current input `ξ_0`.
    #[inline]
    pub fn input(&self) -> f64 {
        self.vertices[0].1
    }

    /// Value beyond the last vertex.
    #[inline]
    pub fn tail(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].1
    }

    /// Radius of the last vertex; the profile is constant beyond it.
    #[inline]
    pub fn support(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].0
    }

    pub fn eval(&self, r: f64) -> f64 {
        let v = &self.vertices;
        let i = v.partition_point(|(ri, _)| *ri <= r);
        if i == v.len() {
            return self.tail();
        }
        if i == 0 {
            return v[0].1;
        }
        let (r0, x0) = v[i - 1];
        let (r1, x1) = v[i];
        x0 + (x1 - x0) * (r - r0) / (r1 - r0)
    }

    /// Slope of the segment `[vertices[i], vertices[i+1]]`.
    #[inline]
    fn slope(&self, i: usize) -> f64 {
        let (r0, x0) = self.vertices[i];
        let (r1, x1) = self.vertices[i + 1];
        (x1 - x0) / (r1 - r0)
    }

    pub fn advance(&mut self, q: f64) {
        let mut next = Self { vertices: Vec::with_capacity(self.vertices.len() + 2) };
        self.advance_into(q, &mut next);
        *self = next;
    }

    /// Writes the profile after applying input `q` into `out`.
    pub fn advance_into(&self, q: f64, out: &mut MemoryCurve) {
        out.vertices.clear();
        let q_prev = self.input();
        if q == q_prev {
            out.vertices.extend_from_slice(&self.vertices);
            return;
        }
        let up = q > q_prev;
        // h(r) is nondecreasing and negative at r = 0; its first zero is the switching radius.
        let h = |r: f64, x: f64| if up { x + r - q } else { q - x + r };
        let v = &self.vertices;
        let mut r_star = None;
        for i in 1..v.len() {
            let hi = h(v[i].0, v[i].1);
            if hi >= 0.0 {
                let (r0, x0) = v[i - 1];
                let s = self.slope(i - 1);
                let rate = if up { 1.0 + s } else { 1.0 - s };
                let r = r0 + (-h(r0, x0)) / rate;
                r_star = Some((r.clamp(r0, v[i].0), i));
                break;
            }
        }
        let (r_star, first_kept) = r_star.unwrap_or_else(|| {
            let (rn, xn) = v[v.len() - 1];
            (rn - h(rn, xn), v.len())
        });
        let x_star = if up { q - r_star } else { q + r_star };
        out.vertices.push((0.0, q));
        out.vertices.push((r_star, x_star));
        let eps = 1e-14 * r_star.max(1.0);
        out.vertices.extend(v[first_kept..].iter().copied().filter(|(r, _)| *r > r_star + eps));
        out.simplify();
    }

    /// Drops collinear interior vertices and a flat trailing segment.
    fn simplify(&mut self) {
        let v = &mut self.vertices;
        let mut k = 1;
        while k + 1 < v.len() {
            let s0 = (v[k].1 - v[k - 1].1) / (v[k].0 - v[k - 1].0);
            let s1 = (v[k + 1].1 - v[k].1) / (v[k + 1].0 - v[k].0);
            if (s0 - s1).abs() <= SLOPE_TOL {
                v.remove(k);
            } else {
                k += 1;
            }
        }
        while v.len() >= 2 {
            let n = v.len();
            if (v[n - 1].1 - v[n - 2].1).abs() <= SLOPE_TOL * (v[n - 1].0 - v[n - 2].0) {
                v.pop();
            } else {
                break;
            }
        }
    }

    /// Radii in `(0, r_hi)` where the profile is not linear or crosses one of `levels`.
    pub fn breakpoints(&self, levels: &[f64], r_hi: f64, out: &mut Vec<f64>) {
        let v = &self.vertices;
        for i in 0..v.len() - 1 {
            let (r0, x0) = v[i];
            let (r1, x1) = v[i + 1];
            if r0 >= r_hi {
                break;
            }
            if r0 > 0.0 {
                out.push(r0);
            }
            let s = (x1 - x0) / (r1 - r0);
            if s.abs() > 0.5 {
                for &level in levels {
                    let r = r0 + (level - x0) / s;
                    if r > r0 && r < r1 && r < r_hi {
                        out.push(r);
                    }
                }
            }
        }
        let rn = self.support();
        if rn > 0.0 && rn < r_hi {
            out.push(rn);
        }
    }
}
