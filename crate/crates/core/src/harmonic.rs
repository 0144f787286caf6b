//! Five-point Laplace solvers on the rectangle and the auxiliary harmonic
//! functions that drive the reduced vortex dynamics.
//!
//! Both solvers are fast direct methods: the Dirichlet operator on interior
//! nodes is diagonalized by the type-I sine transform, the ghost-node Neumann
//! operator on all nodes by the type-I cosine transform.
//!
//! With `J` the rotation by `+pi/2` and `nu_perp = J nu` the counter-clockwise
//! tangent, the functions built here satisfy
//! `grad R = -J grad Q = -J grad H` and `grad R~ = -J grad Q~ = -grad H~`.

use ndarray::{s, Array2};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, Point};
use crate::initial::{grad_theta, theta, wrap_pi, BoundaryPhase};
use crate::quad;
use crate::transform::Trig2;

/// Residual bound relative to the data scale.
const RESIDUAL_TOL: f64 = 1e-10;
/// Tolerance of the boundary line integrals.
const LINE_TOL: f64 = 1e-13;

/// How the additive constant of a harmonic field is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    FixedBoundary,
    ZeroMean,
}

/// Nodal values of a discrete harmonic function.
#[derive(Clone, Debug)]
pub struct HarmonicField {
    pub grid: Grid2D,
    pub values: Array2<f64>,
    pub gauge: Gauge,
}

impl HarmonicField {
    /// Max-norm of the five-point residual on interior nodes, multiplied by
    /// `hx hy`.
    pub fn interior_residual(&self) -> f64 {
        let g = &self.grid;
        let u = &self.values;
        let (ax, ay) = (g.hy() / g.hx(), g.hx() / g.hy());
        let mut m: f64 = 0.0;
        for i in 1..g.nx() {
            for j in 1..g.ny() {
                let r = ax * (u[[i + 1, j]] - 2.0 * u[[i, j]] + u[[i - 1, j]])
                    + ay * (u[[i, j + 1]] - 2.0 * u[[i, j]] + u[[i, j - 1]]);
                m = m.max(r.abs());
            }
        }
        m
    }

    /// Trapezoidal mean over the rectangle.
    pub fn mean(&self) -> f64 {
        let g = &self.grid;
        let mut s = 0.0;
        for ((i, j), v) in self.values.indexed_iter() {
            s += g.wx(i) * g.wy(j) * v;
        }
        s / g.area()
    }

    pub fn add_constant(&mut self, c: f64) {
        self.values.mapv_inplace(|v| v + c);
    }

    fn check_interior(&self, p: Point) -> Result<()> {
        let min_distance = 2.0 * self.grid.h_max();
        if self.grid.distance_to_boundary(p) < min_distance * (1.0 - 1e-12) {
            return Err(Error::TooCloseToBoundary {
                point: p,
                min_distance,
            });
        }
        Ok(())
    }

    /// Bilinear weights of `p` in its cell.
    fn locate(&self, p: Point) -> (usize, usize, f64, f64) {
        let g = &self.grid;
        let (i, j) = g.cell_of(p);
        let tx = (p.x - g.x(i)) / g.hx();
        let ty = (p.y - g.y(j)) / g.hy();
        (i, j, tx, ty)
    }

    /// Tensor-product cubic Lagrange interpolant of the nodal values on the
    /// 4 x 4 nodes around the cell of `p`.
    pub fn value_at(&self, p: Point) -> Result<f64> {
        self.check_interior(p)?;
        let (i, j, tx, ty) = self.locate(p);
        let wx = cubic_weights(tx);
        let wy = cubic_weights(ty);
        let u = &self.values;
        let mut v = 0.0;
        for (a, wa) in wx.iter().enumerate() {
            for (b, wb) in wy.iter().enumerate() {
                v += wa * wb * u[[i + a - 1, j + b - 1]];
            }
        }
        Ok(v)
    }

    /// Central-difference nodal gradients, interpolated bilinearly to `p`.
    pub fn grad_at(&self, p: Point) -> Result<Point> {
        self.check_interior(p)?;
        let (i, j, tx, ty) = self.locate(p);
        let g = &self.grid;
        let u = &self.values;
        let node = |a: usize, b: usize| {
            Point::new(
                (u[[a + 1, b]] - u[[a - 1, b]]) / (2.0 * g.hx()),
                (u[[a, b + 1]] - u[[a, b - 1]]) / (2.0 * g.hy()),
            )
        };
        Ok(node(i, j) * ((1.0 - tx) * (1.0 - ty))
            + node(i + 1, j) * (tx * (1.0 - ty))
            + node(i, j + 1) * ((1.0 - tx) * ty)
            + node(i + 1, j + 1) * (tx * ty))
    }
}

/// Lagrange weights of nodes `-1, 0, 1, 2` at offset `t` in `[0, 1]`.
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

fn eigenvalues(n: usize, h: f64, range: impl Iterator<Item = usize>) -> Vec<f64> {
    range
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / (2.0 * n as f64)).sin();
            -4.0 * s * s / (h * h)
        })
        .collect()
}

/// Dirichlet Laplace solver for one grid.
#[derive(Clone, Debug)]
pub struct DirichletLaplace {
    grid: Grid2D,
    trig: Trig2,
    /// `scale / (lambda_k + lambda_l)` per interior mode.
    inv: Array2<f64>,
}

impl DirichletLaplace {
    pub fn new(grid: Grid2D) -> Self {
        let (n, l) = (grid.nx(), grid.ny());
        let trig = Trig2::sine(n, l);
        let lx = eigenvalues(n, grid.hx(), 1..n);
        let ly = eigenvalues(l, grid.hy(), 1..l);
        let scale = trig.inverse_scale();
        let inv = Array2::from_shape_fn((n - 1, l - 1), |(k, m)| scale / (lx[k] + ly[m]));
        Self { grid, trig, inv }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Harmonic extension of `trace`, given on [`Grid2D::boundary_nodes`].
    pub fn solve(&self, trace: &[f64]) -> Result<HarmonicField> {
        let g = &self.grid;
        let nodes = g.boundary_nodes();
        if trace.len() != nodes.len() {
            return Err(Error::InvalidParameter(format!(
                "trace has {} values for {} boundary nodes",
                trace.len(),
                nodes.len()
            )));
        }
        if trace.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite boundary trace".into()));
        }
        let (n, l) = (g.nx(), g.ny());
        let mut u = Array2::zeros(g.shape());
        for (&(i, j), &v) in nodes.iter().zip(trace) {
            u[[i, j]] = v;
        }
        let (ihx2, ihy2) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
        let mut r = Array2::from_shape_fn((n - 1, l - 1), |(a, b)| {
            let (i, j) = (a + 1, b + 1);
            let mut s = 0.0;
            if i == 1 {
                s += u[[0, j]] * ihx2;
            }
            if i == n - 1 {
                s += u[[n, j]] * ihx2;
            }
            if j == 1 {
                s += u[[i, 0]] * ihy2;
            }
            if j == l - 1 {
                s += u[[i, l]] * ihy2;
            }
            -s
        });
        self.trig.apply_real(&mut r);
        r *= &self.inv;
        self.trig.apply_real(&mut r);
        u.slice_mut(s![1..n, 1..l]).assign(&r);

        let field = HarmonicField {
            grid: *g,
            values: u,
            gauge: Gauge::FixedBoundary,
        };
        let scale = trace.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
        let res = field.interior_residual();
        if !(res <= RESIDUAL_TOL * scale.max(1.0)) {
            return Err(Error::SolverBreakdown(format!(
                "Dirichlet residual {res:e} at data scale {scale:e}"
            )));
        }
        Ok(field)
    }
}

/// Outward flux of the Neumann problem as a function of boundary point and
/// outward normal.
pub type Flux<'a> = dyn Fn(Point, Point) -> f64 + Sync + 'a;

/// Neumann Laplace solver for one grid, zero-mean gauge.
#[derive(Clone, Debug)]
pub struct NeumannLaplace {
    grid: Grid2D,
    trig: Trig2,
    inv: Array2<f64>,
}

impl NeumannLaplace {
    pub fn new(grid: Grid2D) -> Self {
        let (n, l) = (grid.nx(), grid.ny());
        let trig = Trig2::cosine(n, l);
        let lx = eigenvalues(n, grid.hx(), 0..=n);
        let ly = eigenvalues(l, grid.hy(), 0..=l);
        let scale = trig.inverse_scale();
        let inv = Array2::from_shape_fn((n + 1, l + 1), |(k, m)| {
            if k == 0 && m == 0 {
                0.0
            } else {
                scale / (lx[k] + ly[m])
            }
        });
        Self { grid, trig, inv }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// `int_{boundary} flux ds` and `int |flux| ds`.
    pub fn flux_integrals(&self, flux: &Flux) -> (f64, f64) {
        let mut total = 0.0;
        let mut abs = 0.0;
        for (p, q, nu) in self.grid.sides() {
            total += quad::segment(&|x| flux(x, nu), p, q, LINE_TOL);
            abs += quad::segment(&|x| flux(x, nu).abs(), p, q, 1e-8);
        }
        (total, abs)
    }

    /// Zero-mean solution of `Laplace u = 0`, `du/dnu = flux`.
    ///
    /// The flux enters through ghost nodes (second order); the discrete
    /// right-hand side is projected onto the range of the singular operator.
    pub fn solve(&self, flux: &Flux) -> Result<HarmonicField> {
        let (integral, abs) = self.flux_integrals(flux);
        if !integral.is_finite() {
            return Err(Error::InvalidParameter("non-finite boundary flux".into()));
        }
        let tolerance = 1e-8 * abs.max(1.0);
        if integral.abs() > tolerance {
            return Err(Error::IncompatibleFlux {
                integral,
                tolerance,
            });
        }

        let g = &self.grid;
        let mut b = Array2::<f64>::zeros(g.shape());
        let mut gmax: f64 = 0.0;
        for (i, j) in g.boundary_nodes() {
            let p = g.node(i, j);
            for nu in g.normals_at(i, j) {
                let v = flux(p, nu);
                gmax = gmax.max(v.abs());
                let h = if nu.x != 0.0 { g.hx() } else { g.hy() };
                b[[i, j]] += 2.0 * v / h;
            }
        }
        let mut u = b.mapv(|v| -v);
        self.trig.apply_real(&mut u);
        u *= &self.inv;
        self.trig.apply_real(&mut u);

        let mut field = HarmonicField {
            grid: *g,
            values: u,
            gauge: Gauge::ZeroMean,
        };
        let m = field.mean();
        field.add_constant(-m);

        // residual of the ghost-node system, up to the projected constant
        let scale = field
            .values
            .iter()
            .fold(gmax * g.h_max(), |m, v| m.max(v.abs()))
            .max(1e-300);
        let res = self.projected_residual(&field, &b);
        if !(res <= RESIDUAL_TOL * scale.max(1.0)) {
            return Err(Error::SolverBreakdown(format!(
                "Neumann residual {res:e} at data scale {scale:e}"
            )));
        }
        Ok(field)
    }

    fn projected_residual(&self, field: &HarmonicField, b: &Array2<f64>) -> f64 {
        let g = &self.grid;
        let (n, l) = (g.nx(), g.ny());
        let u = &field.values;
        let (ax, ay) = (g.hy() / g.hx(), g.hx() / g.hy());
        let at = |i: usize, j: usize| {
            // mirrored neighbours at the edges
            let im = if i == 0 { 1 } else { i - 1 };
            let ip = if i == n { n - 1 } else { i + 1 };
            let jm = if j == 0 { 1 } else { j - 1 };
            let jp = if j == l { l - 1 } else { j + 1 };
            ax * (u[[ip, j]] - 2.0 * u[[i, j]] + u[[im, j]])
                + ay * (u[[i, jp]] - 2.0 * u[[i, j]] + u[[i, jm]])
                + g.hx() * g.hy() * b[[i, j]]
        };
        let c = at(0, 0);
        let mut m: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=l {
                m = m.max((at(i, j) - c).abs());
            }
        }
        m
    }
}

pub fn solve_laplace_dirichlet(grid: &Grid2D, trace: &[f64]) -> Result<HarmonicField> {
    DirichletLaplace::new(*grid).solve(trace)
}

pub fn solve_laplace_neumann(grid: &Grid2D, flux: &Flux) -> Result<HarmonicField> {
    NeumannLaplace::new(*grid).solve(flux)
}

fn check_centers(grid: &Grid2D, centers: &[Point], windings: &[i8]) -> Result<()> {
    if centers.len() != windings.len() {
        return Err(Error::InvalidParameter(
            "centers and windings differ in length".into(),
        ));
    }
    for c in centers {
        if !grid.contains_strictly(*c) {
            return Err(Error::InvalidParameter(format!(
                "center ({}, {}) is not interior",
                c.x, c.y
            )));
        }
    }
    Ok(())
}

/// Unwraps a nodal boundary angle sequence into a continuous trace.
fn unwrap_loop(raw: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    let mut acc = raw[0];
    out.push(acc);
    for w in raw.windows(2) {
        acc += wrap_pi(w[1] - w[0]);
        out.push(acc);
    }
    let closing = acc + wrap_pi(raw[0] - raw[raw.len() - 1]) - raw[0];
    if closing.abs() > std::f64::consts::PI {
        return Err(Error::MultiValuedTrace { jump: closing });
    }
    Ok(out)
}

/// Integrates tangential boundary data counter-clockwise from the first
/// boundary node into a Dirichlet trace.
fn integrate_tangential(grid: &Grid2D, data: &Flux) -> Result<Vec<f64>> {
    let nodes = grid.boundary_nodes();
    let pts: Vec<Point> = nodes.iter().map(|&(i, j)| grid.node(i, j)).collect();
    // the normal of the segment (p, q): the tangent (q - p) rotated by -pi/2
    let seg = |p: Point, q: Point| {
        let t = q - p;
        let nu = Point::new(t.y, -t.x) * (1.0 / t.norm());
        quad::segment(&|x| data(x, nu), p, q, LINE_TOL)
    };
    let mut out = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    let mut scale: f64 = 0.0;
    out.push(0.0);
    for w in pts.windows(2) {
        acc += seg(w[0], w[1]);
        scale = scale.max(acc.abs());
        out.push(acc);
    }
    let jump = acc + seg(pts[pts.len() - 1], pts[0]);
    if jump.abs() > 1e-8 * scale.max(1.0) {
        return Err(Error::MultiValuedTrace { jump });
    }
    Ok(out)
}

/// `Q`: harmonic with trace `omega - sum_l n_l theta(x - x_l)`.
pub fn build_q_dirichlet(
    solver: &DirichletLaplace,
    omega: &BoundaryPhase,
    centers: &[Point],
    windings: &[i8],
) -> Result<HarmonicField> {
    let grid = solver.grid();
    check_centers(grid, centers, windings)?;
    let raw: Vec<f64> = grid
        .boundary_nodes()
        .iter()
        .map(|&(i, j)| {
            let p = grid.node(i, j);
            let mut v = omega.value(p);
            for (c, &n) in centers.iter().zip(windings) {
                v -= f64::from(n) * theta(p - *c).unwrap_or(0.0);
            }
            v
        })
        .collect();
    solver.solve(&unwrap_loop(&raw)?)
}

/// `d omega / d nu_perp - d/d nu sum_l n_l ln|x - x_l|`: the tangential data
/// of `H` and the Neumann data of `R`.
fn dirichlet_data<'a>(
    omega: &'a BoundaryPhase,
    centers: &'a [Point],
    windings: &'a [i8],
) -> impl Fn(Point, Point) -> f64 + Sync + 'a {
    move |p, nu| {
        let mut v = omega.gradient(p).dot(nu.rot90());
        for (c, &n) in centers.iter().zip(windings) {
            let d = p - *c;
            v -= f64::from(n) * d.dot(nu) / d.norm_sqr();
        }
        v
    }
}

/// `H`: harmonic with tangential derivative
/// `d omega / d nu_perp - d/d nu sum_l n_l ln|x - x_l|`.
pub fn build_h_dirichlet(
    solver: &DirichletLaplace,
    omega: &BoundaryPhase,
    centers: &[Point],
    windings: &[i8],
) -> Result<HarmonicField> {
    check_centers(solver.grid(), centers, windings)?;
    let data = dirichlet_data(omega, centers, windings);
    solver.solve(&integrate_tangential(solver.grid(), &data)?)
}

/// `R`: zero-mean harmonic with normal derivative
/// `d omega / d nu_perp - d/d nu sum_l n_l ln|x - x_l|`.
pub fn build_r_dirichlet(
    solver: &NeumannLaplace,
    omega: &BoundaryPhase,
    centers: &[Point],
    windings: &[i8],
) -> Result<HarmonicField> {
    check_centers(solver.grid(), centers, windings)?;
    let data = dirichlet_data(omega, centers, windings);
    solver.solve(&data)
}

fn theta_flux<'a>(centers: &'a [Point], windings: &'a [i8]) -> impl Fn(Point, Point) -> f64 + Sync + 'a {
    move |p, nu| {
        -centers
            .iter()
            .zip(windings)
            .map(|(c, &n)| f64::from(n) * grad_theta(p, *c).dot(nu))
            .sum::<f64>()
    }
}

/// `Q~`: zero-mean harmonic with `dQ~/dnu = -d/dnu sum_l n_l theta(x - x_l)`.
pub fn build_qtilde_neumann(
    solver: &NeumannLaplace,
    centers: &[Point],
    windings: &[i8],
) -> Result<HarmonicField> {
    check_centers(solver.grid(), centers, windings)?;
    solver.solve(&theta_flux(centers, windings))
}

/// `H~`: harmonic with tangential derivative
/// `-d/dnu sum_l n_l theta(x - x_l)`, obtained by integrating along the
/// boundary.
pub fn build_htilde_neumann(
    solver: &DirichletLaplace,
    centers: &[Point],
    windings: &[i8],
) -> Result<HarmonicField> {
    check_centers(solver.grid(), centers, windings)?;
    let data = theta_flux(centers, windings);
    solver.solve(&integrate_tangential(solver.grid(), &data)?)
}

/// `R~`: harmonic with trace `-sum_l n_l ln|x - x_l|`, the harmonic conjugate
/// of `-Q~`.
pub fn build_rtilde(
    solver: &DirichletLaplace,
    centers: &[Point],
    windings: &[i8],
) -> Result<HarmonicField> {
    let grid = solver.grid();
    check_centers(grid, centers, windings)?;
    let trace: Vec<f64> = grid
        .boundary_nodes()
        .iter()
        .map(|&(i, j)| {
            let p = grid.node(i, j);
            -centers
                .iter()
                .zip(windings)
                .map(|(c, &n)| f64::from(n) * p.dist(*c).ln())
                .sum::<f64>()
        })
        .collect();
    solver.solve(&trace)
}
