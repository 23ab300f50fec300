//! Gauss-Legendre panels and tensor products for oscillatory integrands.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::intarith::odometer;
use crate::poly::CompiledPoly;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let nf = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Composite rule on `[a, b]` with `panels` equal panels.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let h = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.nodes.len());
        let mut ws = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(lo + 0.5 * h * (x + 1.0));
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }
}

/// `int_{[a,b]^dim} f`, tensor rule with the same 1-D composite rule on each axis.
/// Partial sums over the first axis are reduced in order.
pub fn tensor<F>(dim: usize, xs: &[f64], ws: &[f64], f: F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    if dim == 0 {
        return f(&[]);
    }
    let m = xs.len() as i64;
    let parts: Vec<Complex64> = (0..m)
        .into_par_iter()
        .map(|lead| {
            let mut idx = vec![0i64; dim];
            idx[0] = lead;
            let mut pt = vec![0.0; dim];
            let mut acc = Complex64::new(0.0, 0.0);
            loop {
                let mut w = 1.0;
                for (k, &i) in idx.iter().enumerate() {
                    pt[k] = xs[i as usize];
                    w *= ws[i as usize];
                }
                acc += f(&pt) * w;
                if !odometer(&mut idx[1..], 0, m - 1) {
                    break;
                }
            }
            acc
        })
        .collect();
    parts.into_iter().sum()
}

/// `e(x) = exp(2 pi i x)` with the argument reduced mod 1 first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let t = 2.0 * std::f64::consts::PI * (x - x.round());
    Complex64::new(t.cos(), t.sin())
}

/// Upper bound for `|d/dy_k p|` on `[-b, b]^dim`, all `k`.
pub fn gradient_bound(p: &CompiledPoly, b: f64) -> f64 {
    p.terms
        .iter()
        .map(|(c, vars)| {
            let deg: i32 = vars.iter().map(|(_, k)| k).sum();
            c.abs() * deg as f64 * b.powi(deg - 1)
        })
        .sum()
}

/// Sup of `|p|` on `[-b, b]^dim`.
pub fn sup_bound(p: &CompiledPoly, b: f64) -> f64 {
    p.terms
        .iter()
        .map(|(c, vars)| {
            let deg: i32 = vars.iter().map(|(_, k)| k).sum();
            c.abs() * b.powi(deg)
        })
        .sum()
}

/// Groups variables that share a monomial; returns the components and, per
/// component, its terms with variables renumbered.
pub fn split_components(p: &CompiledPoly, nvars: usize) -> Vec<(Vec<usize>, CompiledPoly)> {
    let mut parent: Vec<usize> = (0..nvars).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (_, vars) in &p.terms {
        if let Some(&(v0, _)) = vars.first() {
            for &(v, _) in vars.iter().skip(1) {
                let (a, b) = (find(&mut parent, v0), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; nvars];
    for v in 0..nvars {
        let r = find(&mut parent, v);
        match root_of[r] {
            Some(c) => comps[c].push(v),
            None => {
                root_of[r] = Some(comps.len());
                comps.push(vec![v]);
            }
        }
    }
    comps
        .into_iter()
        .map(|vars| {
            let local: Vec<(f64, Vec<(usize, i32)>)> = p
                .terms
                .iter()
                .filter(|(_, t)| t.first().is_some_and(|(v, _)| vars.contains(v)))
                .map(|(c, t)| (*c, t.iter().map(|&(v, k)| (vars.iter().position(|&u| u == v).unwrap_or(0), k)).collect()))
                .collect();
            (vars, CompiledPoly { terms: local })
        })
        .collect()
}
