//! Initial data: radial vortex profiles, harmonic phase shifts and the
//! Dirichlet boundary phase.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::{BcKind, Grid2D, Point};
use crate::harmonic;

const TWO_PI: f64 = 2.0 * PI;

/// Polar angle of `p` folded into `[0, 2 pi)`.
pub fn theta(p: Point) -> Result<f64> {
    if p.x == 0.0 && p.y == 0.0 {
        return Err(Error::ThetaAtOrigin);
    }
    Ok(fold_angle(p.y.atan2(p.x)))
}

fn fold_angle(t: f64) -> f64 {
    let t = if t < 0.0 { t + TWO_PI } else { t };
    if t >= TWO_PI {
        0.0
    } else {
        t
    }
}

/// Wraps an angle increment into `(-pi, pi]`.
pub fn wrap_pi(d: f64) -> f64 {
    let r = d - TWO_PI * (d / TWO_PI).round();
    if r <= -PI {
        r + TWO_PI
    } else if r > PI {
        r - TWO_PI
    } else {
        r
    }
}

/// Gradient of `theta(x - c)` with respect to `x`: `J (x - c) / |x - c|^2`.
pub fn grad_theta(x: Point, c: Point) -> Point {
    let p = x - c;
    p.rot90() * (1.0 / p.norm_sqr())
}

/// One vortex of the initial configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VortexSpec {
    pub center: Point,
    pub winding: i8,
}

impl VortexSpec {
    pub fn new(x: f64, y: f64, winding: i8) -> Self {
        Self {
            center: Point::new(x, y),
            winding,
        }
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if self.winding != 1 && self.winding != -1 {
            return Err(Error::InvalidParameter(format!(
                "winding {} is not +1 or -1",
                self.winding
            )));
        }
        if !grid.contains_strictly(self.center) {
            return Err(Error::InvalidParameter(format!(
                "vortex center ({}, {}) is not interior",
                self.center.x, self.center.y
            )));
        }
        Ok(())
    }
}

pub(crate) fn validate_specs(grid: &Grid2D, specs: &[VortexSpec]) -> Result<()> {
    for s in specs {
        s.validate(grid)?;
    }
    for i in 0..specs.len() {
        for j in i + 1..specs.len() {
            if specs[i].center == specs[j].center {
                return Err(Error::CoincidentVortices { i, j });
            }
        }
    }
    Ok(())
}

/// Harmonic phase shift `h` of the initial data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseMode {
    /// `h = 0`
    Mode0,
    /// `h = x + y`
    Mode1,
    /// `h = x - y`
    Mode2,
    /// `h = x^2 - y^2`
    Mode3,
    /// `h = x^2 - y^2 + 2xy`
    Mode4,
    /// `h = x^2 - y^2 - 2xy`
    Mode5,
    /// Zero-mean harmonic shift whose normal derivative cancels that of the
    /// vortex phases, so the data is compatible with a homogeneous Neumann
    /// condition.
    NeumannCompatible,
}

impl PhaseMode {
    pub const CLOSED_FORM: [PhaseMode; 6] = [
        PhaseMode::Mode0,
        PhaseMode::Mode1,
        PhaseMode::Mode2,
        PhaseMode::Mode3,
        PhaseMode::Mode4,
        PhaseMode::Mode5,
    ];

    pub fn is_closed_form(self) -> bool {
        self != PhaseMode::NeumannCompatible
    }

    pub fn bc_kind(self) -> BcKind {
        if self.is_closed_form() {
            BcKind::Dirichlet
        } else {
            BcKind::Neumann
        }
    }

    /// Value of a closed-form mode; zero for the Neumann-compatible shift,
    /// which has no closed form.
    pub fn value(self, p: Point) -> f64 {
        let (x, y) = (p.x, p.y);
        match self {
            PhaseMode::Mode0 | PhaseMode::NeumannCompatible => 0.0,
            PhaseMode::Mode1 => x + y,
            PhaseMode::Mode2 => x - y,
            PhaseMode::Mode3 => x * x - y * y,
            PhaseMode::Mode4 => x * x - y * y + 2.0 * x * y,
            PhaseMode::Mode5 => x * x - y * y - 2.0 * x * y,
        }
    }

    pub fn gradient(self, p: Point) -> Point {
        let (x, y) = (p.x, p.y);
        match self {
            PhaseMode::Mode0 | PhaseMode::NeumannCompatible => Point::default(),
            PhaseMode::Mode1 => Point::new(1.0, 1.0),
            PhaseMode::Mode2 => Point::new(1.0, -1.0),
            PhaseMode::Mode3 => Point::new(2.0 * x, -2.0 * y),
            PhaseMode::Mode4 => Point::new(2.0 * x + 2.0 * y, -2.0 * y + 2.0 * x),
            PhaseMode::Mode5 => Point::new(2.0 * x - 2.0 * y, -2.0 * y - 2.0 * x),
        }
    }
}

/// Boundary phase `omega = h + sum_j n_j theta(x - x_j^0)` of a Dirichlet
/// scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPhase {
    pub mode: PhaseMode,
    pub vortices: Vec<VortexSpec>,
}

impl BoundaryPhase {
    pub fn new(mode: PhaseMode, vortices: Vec<VortexSpec>) -> Result<Self> {
        if !mode.is_closed_form() {
            return Err(Error::InvalidParameter(
                "Dirichlet boundary phase needs a closed-form mode".into(),
            ));
        }
        Ok(Self { mode, vortices })
    }

    /// `omega(x)` with each angle taken in `[0, 2 pi)`; multivalued along
    /// a closed loop.
    pub fn value(&self, p: Point) -> f64 {
        let mut w = self.mode.value(p);
        for v in &self.vortices {
            w += f64::from(v.winding) * theta(p - v.center).unwrap_or(0.0);
        }
        w
    }

    /// `grad omega`, single-valued away from the vortex centers.
    pub fn gradient(&self, p: Point) -> Point {
        let mut g = self.mode.gradient(p);
        for v in &self.vortices {
            g = g + grad_theta(p, v.center) * f64::from(v.winding);
        }
        g
    }

    pub fn total_winding(&self) -> i32 {
        self.vortices.iter().map(|v| i32::from(v.winding)).sum()
    }
}

/// Radial amplitude `f` of a unit-winding vortex on `[0, r_max]`.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    epsilon: f64,
    r_max: f64,
    radii: Vec<f64>,
    values: Vec<f64>,
    residual: f64,
}

/// Spacing of the uniform inner mesh in core units `s = r / epsilon`.
const INNER_SPACING: f64 = 0.05;
const INNER_EXTENT: f64 = 8.0;
const OUTER_GROWTH: f64 = 1.04;
const MAX_NEWTON: usize = 100;

impl RadialProfile {
    /// Solves `f'' + f'/r - f/r^2 + (1 - f^2) f / eps^2 = 0`, `f(0) = 0`,
    /// `f(r_max) = 1` by damped Newton iteration on a graded mesh.
    ///
    /// The problem is posed in the core variable `s = r / eps` (so the inner
    /// spacing `0.05` in `s` is `eps / 20` in `r`); `tol` bounds the max-norm
    /// of the discrete residual in those units.
    pub fn compute(epsilon: f64, r_max: f64, tol: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {epsilon} must lie in (0, 1)"
            )));
        }
        if !(r_max > 4.0 * epsilon) {
            return Err(Error::InvalidParameter(format!(
                "r_max = {r_max} too small for epsilon = {epsilon}"
            )));
        }
        let s_max = r_max / epsilon;
        let s = graded_mesh(s_max);
        let m = s.len();

        let mut f: Vec<f64> = s.iter().map(|&si| (si / (2.0 + si * si).sqrt()).min(1.0)).collect();
        f[0] = 0.0;
        f[m - 1] = 1.0;

        let mut res = profile_residual(&s, &f);
        let mut norm = max_abs(&res);
        let mut iterations = 0;
        while norm > tol {
            if iterations == MAX_NEWTON {
                return Err(Error::ProfileNotConverged {
                    iterations,
                    residual: norm,
                });
            }
            iterations += 1;
            let delta = newton_step(&s, &f, &res);
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = f
                    .iter()
                    .zip(&delta)
                    .map(|(fi, di)| fi + lambda * di)
                    .collect();
                let tres = profile_residual(&s, &trial);
                let tnorm = max_abs(&tres);
                if tnorm < norm || lambda < 1e-4 {
                    f = trial;
                    res = tres;
                    norm = tnorm;
                    break;
                }
                lambda *= 0.5;
            }
        }
        log::debug!("radial profile eps={epsilon}: {iterations} Newton steps, residual {norm:e}");

        Ok(Self {
            epsilon,
            r_max,
            radii: s.iter().map(|si| si * epsilon).collect(),
            values: f,
            residual: norm,
        })
    }

    /// Profile with the default tolerance and `r_max` tied to `grid`.
    pub fn for_grid(epsilon: f64, grid: &Grid2D) -> Result<Self> {
        Self::compute(epsilon, default_r_max(grid), 1e-10)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Piecewise-linear interpolant; `1` beyond `r_max`.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.r_max {
            return 1.0;
        }
        let k = self.radii.partition_point(|&x| x <= r).max(1);
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        let t = (r - r0) / (r1 - r0);
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }
}

/// Outer radius of the profile problem: at least the domain diameter.
pub fn default_r_max(grid: &Grid2D) -> f64 {
    grid.diameter().max(2.0) * 1.05
}

fn graded_mesh(s_max: f64) -> Vec<f64> {
    let mut s = vec![0.0];
    let inner = INNER_EXTENT.min(s_max);
    let n_inner = (inner / INNER_SPACING).round().max(1.0) as usize;
    for k in 1..=n_inner {
        s.push(inner * k as f64 / n_inner as f64);
    }
    let mut h = inner / n_inner as f64;
    let mut last = inner;
    while last < s_max {
        h *= OUTER_GROWTH;
        let next = last + h;
        if next >= s_max || s_max - next < 0.5 * h {
            s.push(s_max);
            break;
        }
        s.push(next);
        last = next;
    }
    s
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Three-point coefficients `(lower, diag, upper)` of `f'' + f'/s` at node `k`.
fn stencil(s: &[f64], k: usize) -> (f64, f64, f64) {
    let hm = s[k] - s[k - 1];
    let hp = s[k + 1] - s[k];
    let sum = hm + hp;
    // second derivative
    let (a2, b2, c2) = (2.0 / (hm * sum), -2.0 / (hm * hp), 2.0 / (hp * sum));
    // first derivative
    let (a1, b1, c1) = (-hp / (hm * sum), (hp - hm) / (hm * hp), hm / (hp * sum));
    let inv = 1.0 / s[k];
    (a2 + a1 * inv, b2 + b1 * inv, c2 + c1 * inv)
}

fn profile_residual(s: &[f64], f: &[f64]) -> Vec<f64> {
    let m = s.len();
    let mut r = vec![0.0; m];
    for k in 1..m - 1 {
        let (a, b, c) = stencil(s, k);
        let fk = f[k];
        r[k] = a * f[k - 1] + b * fk + c * f[k + 1] - fk / (s[k] * s[k]) + (1.0 - fk * fk) * fk;
    }
    r
}

/// Solves `J delta = -res` with the tridiagonal Jacobian (Thomas algorithm);
/// boundary values stay fixed.
fn newton_step(s: &[f64], f: &[f64], res: &[f64]) -> Vec<f64> {
    let m = s.len();
    let n = m - 2;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for k in 1..m - 1 {
        let (a, b, c) = stencil(s, k);
        let fk = f[k];
        lower[k - 1] = a;
        diag[k - 1] = b - 1.0 / (s[k] * s[k]) + 1.0 - 3.0 * fk * fk;
        upper[k - 1] = c;
        rhs[k - 1] = -res[k];
    }
    for k in 1..n {
        let w = lower[k] / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = (rhs[k] - upper[k] * x[k + 1]) / diag[k];
    }
    let mut delta = vec![0.0; m];
    delta[1..m - 1].copy_from_slice(&x);
    delta
}

/// Product of single-vortex factors times `e^{i h}`:
/// `psi_0 = e^{i h} prod_j f(|x - x_j|) e^{i n_j theta(x - x_j)}`.
///
/// A center falling exactly on a node is displaced by `1e-14 h` for the
/// angle evaluation only.
pub fn compose_with(
    grid: &Grid2D,
    bc: BcKind,
    specs: &[VortexSpec],
    profile: &RadialProfile,
    phase: impl Fn(usize, usize) -> f64 + Sync + Send,
) -> ComplexField {
    let nudge = Point::new(1e-14 * grid.h_max(), 0.0);
    let mut field = ComplexField::zeros(*grid, bc);
    crate::exec::for_each_row(&mut field.values, |i, mut row| {
        for (j, v) in row.iter_mut().enumerate() {
            let p = grid.node(i, j);
            let mut z = Complex64::from_polar(1.0, phase(i, j));
            for s in specs {
                let mut d = p - s.center;
                if d.x == 0.0 && d.y == 0.0 {
                    d = nudge;
                }
                let amp = profile.eval(d.norm());
                // theta of a nonzero offset cannot fail
                let ang = theta(d).unwrap_or(0.0);
                let factor = Complex64::from_polar(amp, ang);
                z *= if s.winding > 0 { factor } else { factor.conj() };
            }
            *v = z;
        }
    });
    field
}

/// Initial data for `specs` with phase shift `mode`. The boundary condition
/// follows the mode: closed-form modes give Dirichlet data, the
/// Neumann-compatible shift gives Neumann data.
pub fn compose_initial_data(
    grid: &Grid2D,
    specs: &[VortexSpec],
    mode: PhaseMode,
    epsilon: f64,
) -> Result<ComplexField> {
    validate_specs(grid, specs)?;
    let profile = RadialProfile::for_grid(epsilon, grid)?;
    compose_with_profile(grid, specs, mode, &profile)
}

pub fn compose_with_profile(
    grid: &Grid2D,
    specs: &[VortexSpec],
    mode: PhaseMode,
    profile: &RadialProfile,
) -> Result<ComplexField> {
    match mode {
        PhaseMode::NeumannCompatible => {
            let hn = neumann_phase_shift(grid, specs)?;
            Ok(compose_with(grid, BcKind::Neumann, specs, profile, |i, j| {
                hn[[i, j]]
            }))
        }
        m => Ok(compose_with(grid, BcKind::Dirichlet, specs, profile, |i, j| {
            m.value(grid.node(i, j))
        })),
    }
}

/// Dirichlet data `g = e^{i omega}` on the boundary nodes, ordered as
/// [`Grid2D::boundary_nodes`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValues {
    pub nodes: Vec<(usize, usize)>,
    pub values: Vec<Complex64>,
}

impl BoundaryValues {
    /// Overwrites the boundary nodes of `field`.
    pub fn impose(&self, field: &mut ComplexField) {
        for (&(i, j), &g) in self.nodes.iter().zip(&self.values) {
            field.values[[i, j]] = g;
        }
    }

    /// Total phase increase along the boundary loop (a multiple of `2 pi`).
    pub fn phase_increase(&self) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|k| wrap_pi((self.values[(k + 1) % n] / self.values[k]).arg()))
            .sum()
    }
}

pub fn dirichlet_boundary_values(
    grid: &Grid2D,
    specs: &[VortexSpec],
    mode: PhaseMode,
) -> Result<BoundaryValues> {
    let omega = BoundaryPhase::new(mode, specs.to_vec())?;
    let nodes = grid.boundary_nodes();
    let values = nodes
        .iter()
        .map(|&(i, j)| Complex64::from_polar(1.0, omega.value(grid.node(i, j))))
        .collect();
    Ok(BoundaryValues { nodes, values })
}

/// Zero-mean discrete harmonic `h_n` with
/// `d h_n / d nu = - d/d nu sum_l n_l theta(x - x_l^0)` on the boundary.
pub fn neumann_phase_shift(grid: &Grid2D, specs: &[VortexSpec]) -> Result<Array2<f64>> {
    let flux = |p: Point, nu: Point| -> f64 {
        -specs
            .iter()
            .map(|s| f64::from(s.winding) * grad_theta(p, s.center).dot(nu))
            .sum::<f64>()
    };
    Ok(harmonic::solve_laplace_neumann(grid, &flux)?.values)
}
