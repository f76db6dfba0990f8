//! Dense BFGS with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A smooth objective with analytic gradient.
pub trait Objective {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfgsOptions {
    /// Convergence when the largest gradient component is at most this.
    pub gtol: f64,
    pub max_iter: usize,
}

impl BfgsOptions {
    pub fn for_dim(n: usize, gtol: f64) -> Self {
        Self { gtol, max_iter: 10 * n + 50 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub n_evals: usize,
    pub converged: bool,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const MAX_BRACKET: usize = 25;
const MAX_ZOOM: usize = 40;

struct Counter<'a, O: Objective + ?Sized> {
    obj: &'a O,
    n: usize,
    iterations: usize,
    last_finite: Vec<f64>,
}

impl<O: Objective + ?Sized> Counter<'_, O> {
    fn eval(&mut self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        self.n += 1;
        let (f, g) = self.obj.evaluate(x.as_slice())?;
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::OptimizerDiverged {
                iterations: self.iterations,
                last_iterate: self.last_finite.clone(),
            });
        }
        self.last_finite = x.as_slice().to_vec();
        Ok((f, DVector::from_vec(g)))
    }
}

struct Point {
    alpha: f64,
    f: f64,
    g: DVector<f64>,
    slope: f64,
}

/// Minimizer of the cubic through `(a, fa, da)` and `(b, fb, db)`.
fn cubic_min(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> Option<f64> {
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if disc < 0.0 {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let denom = db - da + 2.0 * d2;
    if denom == 0.0 {
        return None;
    }
    let t = b - (b - a) * (db + d2 - d1) / denom;
    t.is_finite().then_some(t)
}

fn probe<O: Objective + ?Sized>(
    c: &mut Counter<'_, O>,
    x: &DVector<f64>,
    d: &DVector<f64>,
    alpha: f64,
) -> Result<Point> {
    let (f, g) = c.eval(&(x + d * alpha))?;
    let slope = g.dot(d);
    Ok(Point { alpha, f, g, slope })
}

fn zoom<O: Objective + ?Sized>(
    c: &mut Counter<'_, O>,
    x: &DVector<f64>,
    d: &DVector<f64>,
    f0: f64,
    s0: f64,
    mut lo: Point,
    mut hi: Point,
) -> Result<Option<Point>> {
    for _ in 0..MAX_ZOOM {
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= f64::EPSILON * b.max(1.0) {
            break;
        }
        let guard = 0.1 * width;
        let trial = cubic_min(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope)
            .filter(|t| *t > a + guard && *t < b - guard)
            .unwrap_or(0.5 * (a + b));
        let p = probe(c, x, d, trial)?;
        if p.f > f0 + C1 * p.alpha * s0 || p.f >= lo.f {
            hi = p;
        } else {
            if p.slope.abs() <= -C2 * s0 {
                return Ok(Some(p));
            }
            if p.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = p;
        }
    }
    // Accept the best sufficient-decrease point found, if any.
    Ok((lo.alpha > 0.0 && lo.f < f0).then_some(lo))
}

fn line_search<O: Objective + ?Sized>(
    c: &mut Counter<'_, O>,
    x: &DVector<f64>,
    f0: f64,
    g0: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<Option<Point>> {
    let s0 = g0.dot(d);
    let mut prev = Point { alpha: 0.0, f: f0, g: g0.clone(), slope: s0 };
    let mut alpha = 1.0;
    for i in 0..MAX_BRACKET {
        let p = probe(c, x, d, alpha)?;
        if p.f > f0 + C1 * alpha * s0 || (i > 0 && p.f >= prev.f) {
            return zoom(c, x, d, f0, s0, prev, p);
        }
        if p.slope.abs() <= -C2 * s0 {
            return Ok(Some(p));
        }
        if p.slope >= 0.0 {
            return zoom(c, x, d, f0, s0, p, prev);
        }
        alpha *= 2.0;
        prev = p;
    }
    Ok(Some(prev).filter(|p| p.alpha > 0.0))
}

/// Minimizes `obj` from `x0`, returning the best point seen.
pub fn minimize<O: Objective + ?Sized>(obj: &O, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsResult> {
    let n = obj.dim();
    if x0.len() != n {
        return Err(Error::ParameterLength { expected: n, found: x0.len() });
    }
    let mut c = Counter { obj, n: 0, iterations: 0, last_finite: x0.to_vec() };
    let mut x = DVector::from_column_slice(x0);
    let (mut f, mut g) = c.eval(&x)?;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut converged = g.amax() <= opts.gtol;
    while !converged && c.iterations < opts.max_iter {
        let mut d = -(&h * &g);
        if g.dot(&d) >= 0.0 {
            h.fill_with_identity();
            fresh = true;
            d = -g.clone();
        }
        let Some(mut p) = line_search(&mut c, &x, f, &g, &d)? else {
            if fresh {
                break;
            }
            h.fill_with_identity();
            fresh = true;
            continue;
        };
        // A cubic step from the accepted point makes line searches exact
        // on quadratics and sharpens them elsewhere.
        let s0 = g.dot(&d);
        if p.slope.abs() > 0.01 * s0.abs() {
            if let Some(t) = cubic_min(0.0, f, s0, p.alpha, p.f, p.slope).filter(|t| *t > 0.0 && *t < 8.0 * p.alpha) {
                let q = probe(&mut c, &x, &d, t)?;
                if q.f < p.f {
                    p = q;
                }
            }
        }
        c.iterations += 1;
        let s = &d * p.alpha;
        let y = &p.g - &g;
        let ys = y.dot(&s);
        x += &s;
        f = p.f;
        g = p.g;
        if ys > 1e-14 * s.norm() * y.norm() && ys > 0.0 {
            if fresh {
                h *= ys / y.dot(&y);
                fresh = false;
            }
            let rho = 1.0 / ys;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H ← H − ρ(s·(Hy)ᵀ + (Hy)·sᵀ) + (ρ² yᵀHy + ρ) s sᵀ
            h -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
            h += (&s * s.transpose()) * (rho * rho * yhy + rho);
        }
        converged = g.amax() <= opts.gtol;
    }
    Ok(BfgsResult {
        x: x.as_slice().to_vec(),
        f,
        grad_inf_norm: g.amax(),
        iterations: c.iterations,
        n_evals: c.n,
        converged,
    })
}
