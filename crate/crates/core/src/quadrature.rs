//! Gauss–Legendre rules and the threshold grid used by play banks.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(degree: usize) -> Self {
        let degree = NonZeroUsize::new(degree).expect("Gauss rule degree must be positive");
        let rule = GaussLegendre::new(degree);
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    #[inline]
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Composite rule with `panels` equal sub-intervals.
    pub fn integrate_composite(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

/// Shared 8-point rule used for piecewise-smooth integrands.
pub fn gauss8() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(8))
}

/// Shared 16-point rule used for initial-data projections.
pub fn gauss16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(16))
}

/// Splits `[lo, hi]` at the interior `breaks` and further into panels no longer than `scale`.
pub fn panels(lo: f64, hi: f64, breaks: &[f64], scale: f64, out: &mut Vec<(f64, f64)>) {
    out.clear();
    if hi <= lo {
        return;
    }
    let mut a = lo;
    let push = |a: f64, b: f64, out: &mut Vec<(f64, f64)>| {
        let n = if scale.is_finite() && scale > 0.0 { ((b - a) / scale).ceil().max(1.0) as usize } else { 1 };
        let h = (b - a) / n as f64;
        for i in 0..n {
            let x0 = a + h * i as f64;
            let x1 = if i + 1 == n { b } else { x0 + h };
            out.push((x0, x1));
        }
    };
    for &b in breaks {
        if b > a && b < hi {
            push(a, b, out);
            a = b;
        }
    }
    push(a, hi, out);
}

/// Nodes and weights of the 8-point rule applied on each panel.
pub fn composite_nodes(panels: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss8();
    let mut nodes = Vec::with_capacity(panels.len() * rule.degree());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for &(a, b) in panels {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

/// Strictly increasing thresholds `r_1 < … < r_J` with positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RGrid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if nodes.len() != weights.len() {
            return Err(Error::InvalidGrid(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(r) = nodes.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidThreshold(*r));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("thresholds must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidGrid("weights must be positive".into()));
        }
        Ok(Self { nodes, weights })
    }

    /// `j`-point Gauss–Legendre grid on `(0, r_max)`.
    pub fn gauss_legendre(j: usize, r_max: f64) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidGrid("grid needs at least one node".into()));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("r_max = {r_max} must be positive")));
        }
        let rule = GaussRule::new(j);
        let half = 0.5 * r_max;
        let nodes = rule.nodes().iter().map(|x| half * (x + 1.0)).collect();
        let weights = rule.weights().iter().map(|w| half * w).collect();
        Self::new(nodes, weights)
    }

    /// Nodes with unit weights, for banks that are only sampled.
    pub fn unweighted(nodes: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; nodes.len()];
        Self::new(nodes, weights)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().expect("grid is nonempty")
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(r, w)| w * f(*r)).sum()
    }
}
