use lattice_rep::PhaseReducer;
use num_complex::Complex64;
use numlin::{null_space, ComplexMatrix};

use crate::DiffError;

/// `(α, θ, β, z)` of the difference system.
#[derive(Clone, Copy, Debug)]
pub struct SystemParams {
    pub alpha: PhaseReducer,
    pub theta: f64,
    pub beta: f64,
    pub z: Complex64,
}

impl SystemParams {
    /// `παk + θ`, with `αk` reduced before scaling.
    pub fn angle(&self, k: i64) -> f64 {
        std::f64::consts::PI * self.alpha.half_turns(k) + self.theta
    }

    /// Residuals of both equations at `(p, q)`.
    pub fn equations_at(&self, x: impl Fn(i64, i64) -> Complex64, p: i64, q: i64) -> (Complex64, Complex64) {
        let (aq, ap) = (self.angle(q), self.angle(p));
        let (w, e, s, n, c) = (x(p - 1, q), x(p + 1, q), x(p, q - 1), x(p, q + 1), x(p, q));
        let first = (w + e) * aq.cos() + (s + n) * (self.beta * ap.cos()) - self.z * c;
        let second = (w - e) * aq.sin() - (s - n) * (self.beta * ap.sin());
        (first, second)
    }
}

/// Values on the square `|p|, |q| ≤ radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub radius: i64,
    pub values: Vec<Complex64>,
}

impl Grid {
    pub fn zeros(radius: i64) -> Self {
        let side = (2 * radius + 1) as usize;
        Self { radius, values: vec![Complex64::new(0.0, 0.0); side * side] }
    }

    fn index(&self, p: i64, q: i64) -> Option<usize> {
        let r = self.radius;
        (p.abs() <= r && q.abs() <= r).then(|| ((p + r) * (2 * r + 1) + (q + r)) as usize)
    }

    /// Zero outside the square.
    pub fn get(&self, p: i64, q: i64) -> Complex64 {
        self.index(p, q).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn set(&mut self, p: i64, q: i64, v: Complex64) {
        let i = self.index(p, q).expect("site outside the grid");
        self.values[i] = v;
    }

    /// Linear combination `Σ c_k grids[k]`.
    pub fn combine(grids: &[Grid], coeffs: &[Complex64]) -> Grid {
        let mut out = Grid::zeros(grids[0].radius);
        for (g, &c) in grids.iter().zip(coeffs) {
            for (o, v) in out.values.iter_mut().zip(&g.values) {
                *o += c * v;
            }
        }
        out
    }
}

/// Largest residual of either equation over the given sites, relative to
/// the largest value involved.
pub fn system_residual(
    x: impl Fn(i64, i64) -> Complex64,
    params: &SystemParams,
    sites: impl IntoIterator<Item = (i64, i64)>,
) -> f64 {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (p, q) in sites {
        let (a, b) = params.equations_at(&x, p, q);
        worst = worst.max(a.norm()).max(b.norm());
        for (i, j) in [(p, q), (p - 1, q), (p + 1, q), (p, q - 1), (p, q + 1)] {
            scale = scale.max(x(i, j).norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Orthonormal basis of the solutions on a square patch: the null space of
/// both equations imposed at every interior site.
pub fn patch_solutions(params: &SystemParams, radius: i64) -> Result<Vec<Grid>, DiffError> {
    if radius < 2 {
        return Err(DiffError::Parameter(format!("radius {radius} below 2")));
    }
    let template = Grid::zeros(radius);
    let unknowns = template.values.len();
    let inner = 2 * radius - 1;
    let rows = 2 * (inner * inner) as usize;
    let mut m = ComplexMatrix::zeros(rows, unknowns);
    let mut row = 0;
    for p in -radius + 1..radius {
        for q in -radius + 1..radius {
            let (aq, ap) = (params.angle(q), params.angle(p));
            let idx = |i: i64, j: i64| template.index(i, j).unwrap();
            let (ca, cb) = (aq.cos(), params.beta * ap.cos());
            m[(row, idx(p - 1, q))] += Complex64::new(ca, 0.0);
            m[(row, idx(p + 1, q))] += Complex64::new(ca, 0.0);
            m[(row, idx(p, q - 1))] += Complex64::new(cb, 0.0);
            m[(row, idx(p, q + 1))] += Complex64::new(cb, 0.0);
            m[(row, idx(p, q))] -= params.z;
            let (sa, sb) = (aq.sin(), params.beta * ap.sin());
            m[(row + 1, idx(p - 1, q))] += Complex64::new(sa, 0.0);
            m[(row + 1, idx(p + 1, q))] -= Complex64::new(sa, 0.0);
            m[(row + 1, idx(p, q - 1))] -= Complex64::new(sb, 0.0);
            m[(row + 1, idx(p, q + 1))] += Complex64::new(sb, 0.0);
            row += 2;
        }
    }
    Ok(null_space(&m, 1e-11).into_iter().map(|values| Grid { radius, values }).collect())
}
