//! Gauss–Legendre panel quadrature in double-double arithmetic, with polar
//! integration over balls in ℂ and ℂ² against `dV₀ = dλ/πⁿ`.

use crate::dd::{Dd, DdC, PI};
use crate::par::{self, Execution};

/// Nodes and weights of the `k`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> Vec<(Dd, Dd)> {
    assert!(k >= 1);
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut x = Dd::new(guess);
        let mut dp = Dd::ONE;
        for _ in 0..6 {
            let (p, d) = legendre(k, x);
            dp = d;
            x -= p / d;
        }
        let (_, d) = legendre(k, x);
        if d.hi != 0.0 {
            dp = d;
        }
        let w = Dd::new(2.0) / ((Dd::ONE - x.sqr()) * dp.sqr());
        out.push((x, w));
    }
    out
}

/// `(P_k(x), P_k'(x))` by the three-term recurrence.
fn legendre(k: usize, x: Dd) -> (Dd, Dd) {
    let mut p0 = Dd::ONE;
    let mut p1 = x;
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((x * p1).mul_f64(2.0 * jf - 1.0) - p0.mul_f64(jf - 1.0)) / Dd::new(jf);
        p0 = p1;
        p1 = p2;
    }
    if k == 0 {
        return (Dd::ONE, Dd::ZERO);
    }
    let d = (x * p1 - p0).mul_f64(k as f64) / (x.sqr() - Dd::ONE);
    (p1, d)
}

/// Panel layout for [`integrate_panels`].
#[derive(Clone, Debug)]
pub struct PanelOptions {
    pub nodes: usize,
    pub first_width: f64,
    pub growth: f64,
    pub max_width: f64,
    /// Never stop early before this abscissa.
    pub min_stop: f64,
    pub max_panels: usize,
}

impl Default for PanelOptions {
    fn default() -> Self {
        PanelOptions { nodes: 20, first_width: 0.5, growth: 1.25, max_width: 3.0, min_stop: 40.0, max_panels: 4000 }
    }
}

/// Vector-valued quadrature result with a per-component error estimate.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: Vec<DdC>,
    pub error: Vec<f64>,
}

fn accumulate(acc: &mut [DdC], v: &[DdC], w: Dd) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x.scale(w);
    }
}

/// `∫_{start}^{end} f(v) dv` for a vector-valued `f`, on panels of growing
/// width. `end` may be infinite, in which case integration stops once three
/// consecutive panels are negligible. Each panel is integrated once whole
/// and once split in two; the difference is the error estimate.
pub fn integrate_panels(
    f: &(dyn Fn(Dd) -> Vec<DdC> + Sync),
    start: f64,
    end: f64,
    opts: &PanelOptions,
    exec: Execution,
) -> Quadrature {
    let rule = gauss_legendre(opts.nodes);
    let mut value: Vec<DdC> = Vec::new();
    let mut error: Vec<f64> = Vec::new();
    let mut a = start;
    let mut width = opts.first_width;
    let mut quiet = 0;
    for _ in 0..opts.max_panels {
        if a >= end {
            break;
        }
        let b = (a + width).min(end);
        let (coarse, fine) = panel(f, &rule, a, b, exec);
        if value.is_empty() {
            value = vec![DdC::ZERO; fine.len()];
            error = vec![0.0; fine.len()];
        }
        let mut biggest = 0.0f64;
        for i in 0..fine.len() {
            value[i] += fine[i];
            error[i] += (coarse[i] - fine[i]).abs().to_f64();
            biggest = biggest.max(fine[i].abs().to_f64());
        }
        let total = value.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max);
        if b >= opts.min_stop && biggest <= 1e-40 * total.max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        a = b;
        width = (width * opts.growth).min(opts.max_width);
    }
    for (e, v) in error.iter_mut().zip(&value) {
        *e += 1e-30 * v.abs().to_f64();
    }
    Quadrature { value, error }
}

fn panel(
    f: &(dyn Fn(Dd) -> Vec<DdC> + Sync),
    rule: &[(Dd, Dd)],
    a: f64,
    b: f64,
    exec: Execution,
) -> (Vec<DdC>, Vec<DdC>) {
    let a = Dd::new(a);
    let b = Dd::new(b);
    let mid = (a + b).mul_f64(0.5);
    let mut points = Vec::with_capacity(3 * rule.len());
    for (lo, hi, tag) in [(a, b, 0u8), (a, mid, 1), (mid, b, 1)] {
        let c = (lo + hi).mul_f64(0.5);
        let h = (hi - lo).mul_f64(0.5);
        for (x, w) in rule {
            points.push((c + h * *x, h * *w, tag));
        }
    }
    let evals = par::map(exec, &points, |(x, _, _)| f(*x));
    let len = evals.first().map_or(0, Vec::len);
    let mut coarse = vec![DdC::ZERO; len];
    let mut fine = vec![DdC::ZERO; len];
    for ((_, w, tag), v) in points.iter().zip(&evals) {
        if *tag == 0 {
            accumulate(&mut coarse, v, *w);
        } else {
            accumulate(&mut fine, v, *w);
        }
    }
    (coarse, fine)
}

/// Polar quadrature over the ball `|z|² ≤ radius_sq` in ℂⁿ, `n ∈ {1, 2}`.
#[derive(Clone, Debug)]
pub struct BallOptions {
    pub n: usize,
    /// Squared radius; may be `f64::INFINITY`.
    pub radius_sq: f64,
    /// Radial scale: panels are laid out in `v = scale · |z|²`.
    pub scale: f64,
    /// Trapezoid points per angle.
    pub angles: usize,
    /// Gauss–Legendre nodes for the split `|z₁|² = x|z|²` when `n = 2`.
    pub split_nodes: usize,
    pub panels: PanelOptions,
}

impl BallOptions {
    pub fn new(n: usize, scale: f64, radius_sq: f64) -> Self {
        BallOptions { n, radius_sq, scale, angles: 16, split_nodes: 12, panels: PanelOptions::default() }
    }
}

/// `∫_{|z|²≤R²} F(z) dV₀` for a vector-valued `F`.
pub fn integrate_ball(
    opts: &BallOptions,
    f: &(dyn Fn(&[DdC]) -> Vec<DdC> + Sync),
    exec: Execution,
) -> Quadrature {
    assert!(opts.n == 1 || opts.n == 2, "polar quadrature supports n ≤ 2");
    let k = opts.angles.max(1);
    let phases: Vec<DdC> = (0..k)
        .map(|i| DdC::cis(PI.mul_f64(2.0 * i as f64) / Dd::new(k as f64)))
        .collect();
    let inv_k = Dd::ONE / Dd::new(k as f64);
    let scale = Dd::new(opts.scale);
    let split: Vec<(Dd, Dd)> = gauss_legendre(opts.split_nodes.max(1))
        .into_iter()
        .map(|(x, w)| ((x + Dd::ONE).mul_f64(0.5), w.mul_f64(0.5)))
        .collect();
    let n = opts.n;
    let radial = |v: Dd| -> Vec<DdC> {
        let u = v / scale;
        let mut acc: Vec<DdC> = Vec::new();
        let mut add = |vals: Vec<DdC>, w: Dd| {
            if acc.is_empty() {
                acc = vec![DdC::ZERO; vals.len()];
            }
            accumulate(&mut acc, &vals, w);
        };
        if n == 1 {
            let r = u.sqrt();
            for ph in &phases {
                add(f(&[ph.scale(r)]), inv_k);
            }
        } else {
            let w_ang = inv_k * inv_k;
            for (x, wx) in &split {
                let r1 = (u * *x).sqrt();
                let r2 = (u * (Dd::ONE - *x)).sqrt();
                for p1 in &phases {
                    let z1 = p1.scale(r1);
                    for p2 in &phases {
                        add(f(&[z1, p2.scale(r2)]), w_ang * *wx * u);
                    }
                }
            }
        }
        // du = dv / scale
        let jac = Dd::ONE / scale;
        acc.iter().map(|a| a.scale(jac)).collect()
    };
    let end = if opts.radius_sq.is_finite() { opts.radius_sq * opts.scale } else { f64::INFINITY };
    integrate_panels(&radial, 0.0, end, &opts.panels, exec)
}
