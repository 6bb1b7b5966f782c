//! Densities sampled on a rectangular `(θ, r, v)` grid.
//!
//! At each `r`-node the density is bilinear in `(θ, |v|)`; between `r`-nodes it is
//! linear in `r`, and it vanishes outside `[r_first, r_last]` and for `|v| > v_last`.
//! Primitives in `v` are exact integrals of the piecewise-linear interpolant, and
//! `θ`-derivatives are those of the linear-in-`θ` interpolant (so no second derivatives).

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    thetas: Vec<f64>,
    rs: Vec<f64>,
    vs: Vec<f64>,
    // layout [theta][r][v]
    psi: Vec<f64>,
    g: Vec<f64>,
    moment: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct Row {
    theta: f64,
    r: f64,
    v: f64,
    psi: f64,
}

#[derive(Clone, Copy)]
enum Field {
    Psi,
    G,
    Moment,
}

fn sorted_unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = values.collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn locate(grid: &[f64], x: f64) -> usize {
    // index of the cell [grid[i], grid[i+1]] containing x, assuming grid[0] <= x <= grid[last]
    let i = grid.partition_point(|g| *g <= x);
    i.saturating_sub(1).min(grid.len().saturating_sub(2))
}

impl TabulatedDensity {
    /// Reads a CSV with header `theta,r,v,psi` describing a full rectangular grid.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Table(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
        let expected = ["theta", "r", "v", "psi"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Table(format!(
                "header must be `theta,r,v,psi`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<Row>() {
            rows.push(rec.map_err(|e| Error::Table(e.to_string()))?);
        }
        Self::from_rows(rows.iter().map(|r| (r.theta, r.r, r.v, r.psi)))
    }

    pub fn from_rows(rows: impl IntoIterator<Item = (f64, f64, f64, f64)>) -> Result<Self> {
        let rows: Vec<(f64, f64, f64, f64)> = rows.into_iter().collect();
        if rows.iter().any(|(t, r, v, p)| !(t.is_finite() && r.is_finite() && v.is_finite() && p.is_finite())) {
            return Err(Error::Table("non-finite entry".into()));
        }
        let thetas = sorted_unique(rows.iter().map(|r| r.0));
        let rs = sorted_unique(rows.iter().map(|r| r.1));
        let vs = sorted_unique(rows.iter().map(|r| r.2));
        if thetas.len() < 2 || rs.len() < 2 || vs.len() < 2 {
            return Err(Error::Table("need at least two distinct values of theta, r and v".into()));
        }
        if thetas[0] < 0.0 {
            return Err(Error::Table("theta values must be nonnegative".into()));
        }
        if rs[0] <= 0.0 {
            return Err(Error::Table("r values must be positive".into()));
        }
        if vs[0] != 0.0 {
            return Err(Error::Table("v grid must start at 0 (the density is extended evenly)".into()));
        }
        let (nt, nr, nv) = (thetas.len(), rs.len(), vs.len());
        if rows.len() != nt * nr * nv {
            return Err(Error::Table(format!(
                "grid is not rectangular: {} rows for {nt}×{nr}×{nv} nodes",
                rows.len()
            )));
        }
        let mut psi = vec![f64::NAN; nt * nr * nv];
        for (t, r, v, p) in &rows {
            if *p < 0.0 {
                return Err(Error::Table(format!("negative density {p} at (θ={t}, r={r}, v={v})")));
            }
            let i = thetas.binary_search_by(|x| x.total_cmp(t)).expect("theta node");
            let j = rs.binary_search_by(|x| x.total_cmp(r)).expect("r node");
            let k = vs.binary_search_by(|x| x.total_cmp(v)).expect("v node");
            let idx = (i * nr + j) * nv + k;
            if !psi[idx].is_nan() {
                return Err(Error::Table(format!("duplicate node (θ={t}, r={r}, v={v})")));
            }
            psi[idx] = *p;
        }
        let mut g = vec![0.0; psi.len()];
        let mut moment = vec![0.0; psi.len()];
        for base in (0..nt * nr).map(|c| c * nv) {
            for k in 1..nv {
                let (v0, v1) = (vs[k - 1], vs[k]);
                let (p0, p1) = (psi[base + k - 1], psi[base + k]);
                let h = v1 - v0;
                g[base + k] = g[base + k - 1] + 0.5 * h * (p0 + p1);
                // ∫ s·ψ(s) ds over a cell with linear ψ
                moment[base + k] = moment[base + k - 1] + h * (p0 * (2.0 * v0 + v1) + p1 * (v0 + 2.0 * v1)) / 6.0;
            }
        }
        Ok(Self { thetas, rs, vs, psi, g, moment })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn rs(&self) -> &[f64] {
        &self.rs
    }

    pub fn vs(&self) -> &[f64] {
        &self.vs
    }

    pub fn v_last(&self) -> f64 {
        *self.vs.last().unwrap()
    }

    pub fn r_last(&self) -> f64 {
        *self.rs.last().unwrap()
    }

    fn nr(&self) -> usize {
        self.rs.len()
    }

    fn nv(&self) -> usize {
        self.vs.len()
    }

    /// Value of `field` at node `(i, j)` and `|v| = a`, exact for the piecewise-linear profile.
    fn at_node(&self, field: Field, i: usize, j: usize, a: f64) -> f64 {
        let base = (i * self.nr() + j) * self.nv();
        let vs = &self.vs;
        if a >= self.v_last() {
            return match field {
                Field::Psi => {
                    if a == self.v_last() {
                        self.psi[base + self.nv() - 1]
                    } else {
                        0.0
                    }
                }
                Field::G => self.g[base + self.nv() - 1],
                Field::Moment => self.moment[base + self.nv() - 1],
            };
        }
        let k = locate(vs, a);
        let (v0, v1) = (vs[k], vs[k + 1]);
        let (p0, p1) = (self.psi[base + k], self.psi[base + k + 1]);
        let d = a - v0;
        let slope = (p1 - p0) / (v1 - v0);
        match field {
            Field::Psi => p0 + slope * d,
            Field::G => self.g[base + k] + d * p0 + 0.5 * d * d * slope,
            Field::Moment => {
                // ∫_{v0}^{a} s (p0 + slope (s - v0)) ds
                let m = p0 * 0.5 * (a * a - v0 * v0) + slope * (d * d * (2.0 * a + v0) / 6.0);
                self.moment[base + k] + m
            }
        }
    }

    /// `(value, ∂θ value)` of `field`.
    fn eval_field(&self, field: Field, theta: f64, r: f64, v: f64) -> (f64, f64) {
        let (r0, r1) = (self.rs[0], self.r_last());
        if r < r0 || r > r1 {
            return (0.0, 0.0);
        }
        let a = v.abs();
        let j = locate(&self.rs, r);
        let tr = (r - self.rs[j]) / (self.rs[j + 1] - self.rs[j]);
        let th = theta.max(0.0);
        let (t0, t1) = (self.thetas[0], *self.thetas.last().unwrap());
        let (i, tt, inside) = if th <= t0 {
            (0, 0.0, false)
        } else if th >= t1 {
            (self.thetas.len() - 2, 1.0, false)
        } else {
            let i = locate(&self.thetas, th);
            (i, (th - self.thetas[i]) / (self.thetas[i + 1] - self.thetas[i]), true)
        };
        let dtheta = self.thetas[i + 1] - self.thetas[i];
        let mut value = 0.0;
        let mut deriv = 0.0;
        for (jj, wr) in [(j, 1.0 - tr), (j + 1, tr)] {
            if wr == 0.0 {
                continue;
            }
            let lo = self.at_node(field, i, jj, a);
            let hi = self.at_node(field, i + 1, jj, a);
            value += wr * ((1.0 - tt) * lo + tt * hi);
            if inside {
                deriv += wr * (hi - lo) / dtheta;
            }
        }
        (value, deriv)
    }

    pub fn psi(&self, theta: f64, r: f64, v: f64) -> f64 {
        self.eval_field(Field::Psi, theta, r, v).0
    }

    pub fn psi_theta(&self, theta: f64, r: f64, v: f64) -> f64 {
        self.eval_field(Field::Psi, theta, r, v).1
    }

    pub fn g(&self, theta: f64, r: f64, v: f64) -> f64 {
        v.signum() * self.eval_field(Field::G, theta, r, v).0
    }

    pub fn g_theta(&self, theta: f64, r: f64, v: f64) -> f64 {
        v.signum() * self.eval_field(Field::G, theta, r, v).1
    }

    pub fn moment(&self, theta: f64, r: f64, v: f64) -> f64 {
        self.eval_field(Field::Moment, theta, r, v).0
    }

    pub fn moment_theta(&self, theta: f64, r: f64, v: f64) -> f64 {
        self.eval_field(Field::Moment, theta, r, v).1
    }

    /// `max_θ ∫∫_0^∞ ψ dv dr` (attained at a θ-node; trapezoid in r is exact).
    pub fn mass_bound(&self) -> f64 {
        let nv = self.nv();
        (0..self.thetas.len())
            .map(|i| {
                let col: Vec<f64> =
                    (0..self.nr()).map(|j| self.g[(i * self.nr() + j) * nv + nv - 1]).collect();
                self.rs
                    .windows(2)
                    .zip(col.windows(2))
                    .map(|(r, c)| 0.5 * (r[1] - r[0]) * (c[0] + c[1]))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Upper bound of `sup_{θ,v} ψ(θ, r, v)`.
    pub fn psi_sup_at(&self, r: f64) -> f64 {
        if r < self.rs[0] || r > self.r_last() {
            return 0.0;
        }
        let row_max = |j: usize| {
            (0..self.thetas.len())
                .flat_map(|i| {
                    let base = (i * self.nr() + j) * self.nv();
                    self.psi[base..base + self.nv()].iter().copied()
                })
                .fold(0.0, f64::max)
        };
        let j = locate(&self.rs, r);
        let tr = (r - self.rs[j]) / (self.rs[j + 1] - self.rs[j]);
        (1.0 - tr) * row_max(j) + tr * row_max(j + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table() -> TabulatedDensity {
        let mut csv = String::from("theta,r,v,psi\n");
        for &t in &[0.0, 1.0, 2.0] {
            for &r in &[0.1, 0.5, 1.0] {
                for &v in &[0.0, 0.5, 1.0, 1.5] {
                    let p = (1.0 + 0.1 * t) * (1.5 - v) * (1.2 - r);
                    csv.push_str(&format!("{t},{r},{v},{p}\n"));
                }
            }
        }
        TabulatedDensity::from_csv_reader(csv.as_bytes()).unwrap()
    }

    #[test]
    fn primitive_matches_numeric_integral() {
        let t = table();
        let rule = crate::quadrature::GaussRule::new(8);
        for &(th, r, v) in &[(0.3, 0.2, 1.3), (1.7, 0.8, 0.7), (2.5, 0.5, 1.5)] {
            let numeric: f64 = [(0.0, 0.5), (0.5, 1.0), (1.0, 1.5)]
                .iter()
                .map(|&(a, b): &(f64, f64)| {
                    let (a, b) = (a.min(v), b.min(v));
                    rule.integrate(a, b, |s| t.psi(th, r, s))
                })
                .sum();
            assert_relative_eq!(t.g(th, r, v), numeric, max_relative = 1e-12);
            let numeric_m: f64 = [(0.0, 0.5), (0.5, 1.0), (1.0, 1.5)]
                .iter()
                .map(|&(a, b): &(f64, f64)| {
                    let (a, b) = (a.min(v), b.min(v));
                    rule.integrate(a, b, |s| s * t.psi(th, r, s))
                })
                .sum();
            assert_relative_eq!(t.moment(th, r, v), numeric_m, max_relative = 1e-12);
            assert_relative_eq!(t.g(th, r, -v), -t.g(th, r, v));
        }
    }

    #[test]
    fn theta_derivative_is_slope_of_interpolant() {
        let t = table();
        let (th, r, v) = (0.4, 0.3, 0.8);
        let h = 1e-6;
        let fd = (t.psi(th + h, r, v) - t.psi(th - h, r, v)) / (2.0 * h);
        assert_relative_eq!(t.psi_theta(th, r, v), fd, max_relative = 1e-6);
        assert_eq!(t.psi_theta(-1.0, r, v), 0.0);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(TabulatedDensity::from_csv_reader("t,r,v,psi\n0,1,0,1\n".as_bytes()).is_err());
        let missing = "theta,r,v,psi\n0,1,0,1\n0,1,1,1\n1,1,0,1\n0,2,0,1\n";
        assert!(TabulatedDensity::from_csv_reader(missing.as_bytes()).is_err());
        let neg = TabulatedDensity::from_rows(vec![
            (0.0, 1.0, 0.0, 1.0),
            (0.0, 1.0, 1.0, -1.0),
            (0.0, 2.0, 0.0, 1.0),
            (0.0, 2.0, 1.0, 1.0),
            (1.0, 1.0, 0.0, 1.0),
            (1.0, 1.0, 1.0, 1.0),
            (1.0, 2.0, 0.0, 1.0),
            (1.0, 2.0, 1.0, 1.0),
        ]);
        assert!(neg.is_err());
    }
}
