//! Sine/cosine modal bases on `(0, ℓ)` and the nodal quadrature grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `s_k = √(2/ℓ) sin(kπx/ℓ)` for `k = 1..=m` and `c_0 = 1/√ℓ`,
/// `c_k = √(2/ℓ) cos(kπx/ℓ)`, tabulated on `N` uniform nodes with trapezoid weights.
#[derive(Debug, Clone)]
pub struct Basis {
    m: usize,
    ell: f64,
    x: Vec<f64>,
    w: Vec<f64>,
    // row k-1 holds s_k, s_k', s_k'' at every node
    sin: Vec<f64>,
    dsin: Vec<f64>,
    d2sin: Vec<f64>,
    // row k holds c_k, c_k'
    cos: Vec<f64>,
    dcos: Vec<f64>,
}

impl Basis {
    pub fn new(m: usize, n_nodes: usize, ell: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDiscretization("mode count must be at least 1".into()));
        }
        if n_nodes < 4 * m + 1 {
            return Err(Error::InvalidDiscretization(format!(
                "{n_nodes} nodes for {m} modes; at least {} are needed",
                4 * m + 1
            )));
        }
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidDiscretization(format!("rod length {ell} must be positive")));
        }
        let h = ell / (n_nodes - 1) as f64;
        let x: Vec<f64> = (0..n_nodes).map(|i| if i + 1 == n_nodes { ell } else { h * i as f64 }).collect();
        let mut w = vec![h; n_nodes];
        w[0] = 0.5 * h;
        w[n_nodes - 1] = 0.5 * h;

        let mut b = Self {
            m,
            ell,
            x,
            w,
            sin: Vec::with_capacity(m * n_nodes),
            dsin: Vec::with_capacity(m * n_nodes),
            d2sin: Vec::with_capacity(m * n_nodes),
            cos: Vec::with_capacity((m + 1) * n_nodes),
            dcos: Vec::with_capacity((m + 1) * n_nodes),
        };
        for k in 1..=m {
            for i in 0..n_nodes {
                let xi = b.x[i];
                b.sin.push(b.s(k, xi));
                b.dsin.push(b.ds(k, xi));
                b.d2sin.push(b.d2s(k, xi));
            }
        }
        for k in 0..=m {
            for i in 0..n_nodes {
                let xi = b.x[i];
                b.cos.push(b.c(k, xi));
                b.dcos.push(b.dc(k, xi));
            }
        }
        Ok(b)
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// `kπ/ℓ`.
    #[inline]
    pub fn wavenumber(&self, k: usize) -> f64 {
        k as f64 * PI / self.ell
    }

    /// `λ_k = (kπ/ℓ)²`.
    #[inline]
    pub fn lambda(&self, k: usize) -> f64 {
        let w = self.wavenumber(k);
        w * w
    }

    #[inline]
    fn amp(&self) -> f64 {
        (2.0 / self.ell).sqrt()
    }

    pub fn s(&self, k: usize, x: f64) -> f64 {
        self.amp() * (self.wavenumber(k) * x).sin()
    }

    pub fn ds(&self, k: usize, x: f64) -> f64 {
        let w = self.wavenumber(k);
        self.amp() * w * (w * x).cos()
    }

    pub fn d2s(&self, k: usize, x: f64) -> f64 {
        -self.lambda(k) * self.s(k, x)
    }

    pub fn c(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            1.0 / self.ell.sqrt()
        } else {
            self.amp() * (self.wavenumber(k) * x).cos()
        }
    }

    pub fn dc(&self, k: usize, x: f64) -> f64 {
        let w = self.wavenumber(k);
        -self.amp() * w * (w * x).sin()
    }

    #[inline]
    fn row(table: &[f64], n: usize, j: usize) -> &[f64] {
        &table[j * n..(j + 1) * n]
    }

    /// Nodal values of `s_k`, `k ≥ 1`.
    pub fn sin_row(&self, k: usize) -> &[f64] {
        Self::row(&self.sin, self.len(), k - 1)
    }

    pub fn dsin_row(&self, k: usize) -> &[f64] {
        Self::row(&self.dsin, self.len(), k - 1)
    }

    pub fn d2sin_row(&self, k: usize) -> &[f64] {
        Self::row(&self.d2sin, self.len(), k - 1)
    }

    /// Nodal values of `c_k`, `k ≥ 0`.
    pub fn cos_row(&self, k: usize) -> &[f64] {
        Self::row(&self.cos, self.len(), k)
    }

    pub fn dcos_row(&self, k: usize) -> &[f64] {
        Self::row(&self.dcos, self.len(), k)
    }

    /// `Σ_k a_k s_k^{(d)}(x_i)` at every node, for `d = 0, 1, 2`.
    pub fn synth_sin(&self, coeffs: &[f64], order: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, a) in coeffs.iter().enumerate() {
            let row = match order {
                0 => self.sin_row(j + 1),
                1 => self.dsin_row(j + 1),
                _ => self.d2sin_row(j + 1),
            };
            for (o, s) in out.iter_mut().zip(row) {
                *o += a * s;
            }
        }
    }

    /// `Σ_k a_k c_k^{(d)}(x_i)` at every node, for `d = 0, 1`.
    pub fn synth_cos(&self, coeffs: &[f64], order: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (k, a) in coeffs.iter().enumerate() {
            let row = if order == 0 { self.cos_row(k) } else { self.dcos_row(k) };
            for (o, c) in out.iter_mut().zip(row) {
                *o += a * c;
            }
        }
    }

    /// Trapezoid quadrature `Σ_i w_i f_i`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.w.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    /// `Σ_i w_i f_i row_i`.
    pub fn project(&self, values: &[f64], row: &[f64]) -> f64 {
        self.w.iter().zip(values).zip(row).map(|((w, f), r)| w * f * r).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_floor_is_enforced() {
        assert!(Basis::new(4, 16, 1.0).is_err());
        assert!(Basis::new(4, 17, 1.0).is_ok());
        assert!(Basis::new(0, 17, 1.0).is_err());
    }

    #[test]
    fn trapezoid_is_exact_for_mode_products() {
        let b = Basis::new(5, 41, 2.0).unwrap();
        for j in 1..=5 {
            for k in 1..=5 {
                let prod: Vec<f64> = b.sin_row(j).iter().zip(b.sin_row(k)).map(|(a, c)| a * c).collect();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((b.integrate(&prod) - expect).abs() < 1e-13);
                let dprod: Vec<f64> = b.dsin_row(j).iter().zip(b.dsin_row(k)).map(|(a, c)| a * c).collect();
                let expect = if j == k { b.lambda(k) } else { 0.0 };
                assert!((b.integrate(&dprod) - expect).abs() < 1e-11);
            }
        }
        for j in 0..=5 {
            for k in 0..=5 {
                let prod: Vec<f64> = b.cos_row(j).iter().zip(b.cos_row(k)).map(|(a, c)| a * c).collect();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((b.integrate(&prod) - expect).abs() < 1e-13, "{j} {k}");
            }
        }
    }

    #[test]
    fn boundary_values_vanish() {
        let b = Basis::new(3, 13, 1.5).unwrap();
        let last = b.len() - 1;
        for k in 1..=3 {
            assert!(b.sin_row(k)[0].abs() < 1e-15);
            assert!(b.d2sin_row(k)[0].abs() < 1e-15);
            assert!(b.d2sin_row(k)[last].abs() < 1e-12);
        }
        for k in 0..=3 {
            assert!(b.dcos_row(k)[0].abs() < 1e-15);
            assert!(b.dcos_row(k)[last].abs() < 1e-12);
        }
        assert!((b.ds(1, 0.0) - (std::f64::consts::PI / 1.5) * (2.0f64 / 1.5).sqrt()).abs() < 1e-15);
    }
}
