//! Strang split-step integration of
//! `(lambda + i beta) psi_t = Laplace psi + (1 - |psi|^2) psi / eps^2`.
//!
//! The nonlinear part is integrated exactly node by node. The linear part is
//! Crank-Nicolson with the fourth-order compact Laplacian under Dirichlet
//! conditions, and the exact exponential of the cosine-pseudospectral
//! Laplacian under Neumann conditions. Both linear propagators are diagonal
//! in a type-I trigonometric basis and are set up once per time step size.

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{gl_energy, ComplexField, Energies};
use crate::grid::{BcKind, Grid2D};
use crate::initial::BoundaryValues;
use crate::transform::Trig2;

/// Physical and discretization parameters of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    epsilon: f64,
    alpha: f64,
    beta: f64,
    lambda: f64,
    tau: f64,
    t_end: f64,
    bc: BcKind,
}

impl SolverParams {
    pub fn new(epsilon: f64, alpha: f64, beta: f64, tau: f64, t_end: f64, bc: BcKind) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {epsilon} must lie in (0, 1)"
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be non-negative")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau = {tau} must be positive")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end = {t_end} must be non-negative")));
        }
        if t_end > 0.0 && tau > t_end {
            return Err(Error::InvalidParameter(format!(
                "tau = {tau} exceeds t_end = {t_end}"
            )));
        }
        Ok(Self {
            epsilon,
            alpha,
            beta,
            lambda: alpha / (1.0 / epsilon).ln(),
            tau,
            t_end,
            bc,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `lambda_eps = alpha / ln(1 / eps)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn bc(&self) -> BcKind {
        self.bc
    }

    /// Same parameters with a different step and horizon.
    pub fn with_schedule(&self, tau: f64, t_end: f64) -> Result<Self> {
        Self::new(self.epsilon, self.alpha, self.beta, tau, t_end, self.bc)
    }

    /// Growth rate of the logistic flow `rho_t = eta (1 - rho) rho`.
    pub fn eta(&self) -> f64 {
        let (l, b) = (self.lambda, self.beta);
        2.0 * l / (self.epsilon * self.epsilon * (l * l + b * b))
    }

    /// Coefficient `c` of the exact phase change `-c ln P`.
    pub fn phase_coefficient(&self) -> f64 {
        self.beta / (2.0 * self.lambda)
    }

    /// `1 / (lambda + i beta)`.
    fn inv_coefficient(&self) -> Complex64 {
        Complex64::new(self.lambda, self.beta).inv()
    }
}

/// Exact flow of `(lambda + i beta) psi_t = (1 - |psi|^2) psi / eps^2` over
/// `dt`, applied at one node.
#[inline]
pub fn nonlinear_node(z: Complex64, eta_dt: f64, c_phase: f64) -> Complex64 {
    let rho = z.norm_sqr();
    if rho == 0.0 {
        return z;
    }
    let p = 1.0 / (rho + (1.0 - rho) * (-eta_dt).exp());
    let lp = p.ln();
    z * Complex64::from_polar(p.sqrt(), -c_phase * lp)
}

pub fn nonlinear_step(field: &mut ComplexField, params: &SolverParams, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let eta_dt = params.eta() * dt;
    let c = params.phase_coefficient();
    exec::for_each_row(&mut field.values, |_, mut row| {
        for z in row.iter_mut() {
            *z = nonlinear_node(*z, eta_dt, c);
        }
    });
    Ok(())
}

/// Symbols of the one-dimensional second difference on interior modes.
fn second_difference_symbols(n: usize, h: f64) -> Vec<f64> {
    (1..n)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / (2.0 * n as f64)).sin();
            -4.0 * s * s / (h * h)
        })
        .collect()
}

/// Crank-Nicolson propagator with the compact fourth-order Laplacian
/// `B^{-1} A`, where
/// `A = dxx + dyy + (hx^2 + hy^2)/12 dxx dyy` and
/// `B = I + hx^2/12 dxx + hy^2/12 dyy`.
///
/// The fixed boundary data enter through the discrete `A`-harmonic lift
/// `phi` (`A phi = 0` inside, `phi = g` on the boundary), so each step only
/// propagates `psi - phi`, which vanishes on the boundary.
#[derive(Clone, Debug)]
pub struct DirichletPropagator {
    trig: Trig2,
    mult: Array2<Complex64>,
    lift: Array2<Complex64>,
    boundary: BoundaryValues,
    buf: Array2<Complex64>,
}

impl DirichletPropagator {
    pub fn new(grid: &Grid2D, boundary: &BoundaryValues, params: &SolverParams, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        if boundary.nodes != grid.boundary_nodes() {
            return Err(Error::GridMismatch);
        }
        let (n, l) = (grid.nx(), grid.ny());
        let (hx2, hy2) = (grid.hx() * grid.hx(), grid.hy() * grid.hy());
        let mx = second_difference_symbols(n, grid.hx());
        let my = second_difference_symbols(l, grid.hy());
        let trig = Trig2::sine(n, l);
        let scale = trig.inverse_scale();
        let c = params.inv_coefficient() * (0.5 * dt);

        let a_sym = |k: usize, m: usize| mx[k] + my[m] + (hx2 + hy2) / 12.0 * mx[k] * my[m];
        let b_sym = |k: usize, m: usize| 1.0 + hx2 / 12.0 * mx[k] + hy2 / 12.0 * my[m];

        let mut mult = Array2::zeros((n - 1, l - 1));
        for ((k, m), v) in mult.indexed_iter_mut() {
            let (a, b) = (a_sym(k, m), b_sym(k, m));
            let den = b - c * a;
            if den.norm() < 1e-14 * b.abs() {
                return Err(Error::SolverBreakdown(format!(
                    "Crank-Nicolson symbol vanishes at mode ({}, {})",
                    k + 1,
                    m + 1
                )));
            }
            *v = (b + c * a) / den * scale;
        }

        // lift: A phi = -A_boundary g on interior nodes
        let mut full = Array2::<Complex64>::zeros(grid.shape());
        for (&(i, j), &g) in boundary.nodes.iter().zip(&boundary.values) {
            full[[i, j]] = g;
        }
        let mut lift = compact_a_interior(&full, grid).mapv(|z| -z);
        trig.apply(&mut lift);
        for ((k, m), v) in lift.indexed_iter_mut() {
            *v *= scale / a_sym(k, m);
        }
        trig.apply(&mut lift);

        Ok(Self {
            trig,
            mult,
            lift,
            boundary: boundary.clone(),
            buf: Array2::zeros((n - 1, l - 1)),
        })
    }

    pub fn apply(&mut self, field: &mut ComplexField) {
        let (n, l) = (field.grid().nx(), field.grid().ny());
        let mut inner = field.values.slice_mut(s![1..n, 1..l]);
        ndarray::Zip::from(&mut self.buf)
            .and(&inner)
            .and(&self.lift)
            .for_each(|b, &z, &p| *b = z - p);
        self.trig.apply(&mut self.buf);
        self.buf *= &self.mult;
        self.trig.apply(&mut self.buf);
        ndarray::Zip::from(&mut inner)
            .and(&self.buf)
            .and(&self.lift)
            .for_each(|z, &b, &p| *z = b + p);
        self.boundary.impose(field);
    }
}

/// `A u` on interior nodes of a full nodal array.
fn compact_a_interior(u: &Array2<Complex64>, grid: &Grid2D) -> Array2<Complex64> {
    let (n, l) = (grid.nx(), grid.ny());
    let (hx2, hy2) = (grid.hx() * grid.hx(), grid.hy() * grid.hy());
    let cross = (hx2 + hy2) / 12.0 / (hx2 * hy2);
    Array2::from_shape_fn((n - 1, l - 1), |(a, b)| {
        let (i, j) = (a + 1, b + 1);
        let dxx = |jj: usize| (u[[i + 1, jj]] - u[[i, jj]] * 2.0 + u[[i - 1, jj]]) / hx2;
        let dyy = (u[[i, j + 1]] - u[[i, j]] * 2.0 + u[[i, j - 1]]) / hy2;
        let dxxyy = (u[[i + 1, j + 1]] - u[[i, j + 1]] * 2.0 + u[[i - 1, j + 1]])
            - (u[[i + 1, j]] - u[[i, j]] * 2.0 + u[[i - 1, j]]) * 2.0
            + (u[[i + 1, j - 1]] - u[[i, j - 1]] * 2.0 + u[[i - 1, j - 1]]);
        dxx(j) + dyy + dxxyy * cross
    })
}

/// Exact propagator of the cosine-pseudospectral Laplacian: mode `(k, l)`
/// is multiplied by `exp(-mu_kl dt / (lambda + i beta))` with
/// `mu_kl = (k pi / width)^2 + (l pi / height)^2`.
#[derive(Clone, Debug)]
pub struct NeumannPropagator {
    trig: Trig2,
    mult: Array2<Complex64>,
}

impl NeumannPropagator {
    pub fn new(grid: &Grid2D, params: &SolverParams, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        let trig = Trig2::cosine(grid.nx(), grid.ny());
        let scale = trig.inverse_scale();
        let w = std::f64::consts::PI / grid.width();
        let h = std::f64::consts::PI / grid.height();
        let c = params.inv_coefficient() * dt;
        let mult = Array2::from_shape_fn(grid.shape(), |(k, m)| {
            let mu = (k as f64 * w).powi(2) + (m as f64 * h).powi(2);
            (-c * mu).exp() * scale
        });
        Ok(Self { trig, mult })
    }

    pub fn apply(&mut self, field: &mut ComplexField) {
        self.trig.apply(&mut field.values);
        field.values *= &self.mult;
        self.trig.apply(&mut field.values);
    }
}

/// Linear propagator for either boundary condition.
#[derive(Clone, Debug)]
pub enum LinearPropagator {
    Dirichlet(DirichletPropagator),
    Neumann(NeumannPropagator),
}

impl LinearPropagator {
    pub fn new(
        grid: &Grid2D,
        params: &SolverParams,
        boundary: Option<&BoundaryValues>,
        dt: f64,
    ) -> Result<Self> {
        match params.bc() {
            BcKind::Dirichlet => {
                let g = boundary.ok_or_else(|| {
                    Error::InvalidParameter("Dirichlet run needs boundary data".into())
                })?;
                Ok(Self::Dirichlet(DirichletPropagator::new(grid, g, params, dt)?))
            }
            BcKind::Neumann => Ok(Self::Neumann(NeumannPropagator::new(grid, params, dt)?)),
        }
    }

    pub fn apply(&mut self, field: &mut ComplexField) {
        match self {
            Self::Dirichlet(p) => p.apply(field),
            Self::Neumann(p) => p.apply(field),
        }
    }
}

fn check_bc(field: &ComplexField, params: &SolverParams) -> Result<()> {
    if field.bc() != params.bc() {
        return Err(Error::InvalidParameter(format!(
            "field carries {:?} data but the run is {:?}",
            field.bc(),
            params.bc()
        )));
    }
    Ok(())
}

pub fn linear_step_dirichlet(
    field: &mut ComplexField,
    boundary: &BoundaryValues,
    params: &SolverParams,
    dt: f64,
) -> Result<()> {
    check_bc(field, params)?;
    let grid = *field.grid();
    DirichletPropagator::new(&grid, boundary, params, dt)?.apply(field);
    Ok(())
}

pub fn linear_step_neumann(field: &mut ComplexField, params: &SolverParams, dt: f64) -> Result<()> {
    check_bc(field, params)?;
    let grid = *field.grid();
    NeumannPropagator::new(&grid, params, dt)?.apply(field);
    Ok(())
}

/// Strang splitting with a fixed step; consecutive nonlinear half steps
/// between two observation points are merged into one full step (the
/// nonlinear flow is exact, so this only changes round-off).
#[derive(Clone, Debug)]
pub struct SplitStepper {
    params: SolverParams,
    dt: f64,
    linear: LinearPropagator,
}

impl SplitStepper {
    pub fn new(grid: &Grid2D, params: SolverParams, boundary: Option<&BoundaryValues>, dt: f64) -> Result<Self> {
        Ok(Self {
            params,
            dt,
            linear: LinearPropagator::new(grid, &params, boundary, dt)?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One step `N(dt/2) L(dt) N(dt/2)`.
    pub fn step(&mut self, field: &mut ComplexField) -> Result<()> {
        self.advance(field, 1)
    }

    /// `steps` consecutive Strang steps.
    pub fn advance(&mut self, field: &mut ComplexField, steps: u64) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        nonlinear_step(field, &self.params, 0.5 * self.dt)?;
        for k in 0..steps {
            self.linear.apply(field);
            let last = k + 1 == steps;
            nonlinear_step(field, &self.params, if last { 0.5 * self.dt } else { self.dt })?;
        }
        Ok(())
    }
}

/// One Strang step of size `params.tau()`.
pub fn strang_step(
    field: &mut ComplexField,
    params: &SolverParams,
    boundary: Option<&BoundaryValues>,
) -> Result<()> {
    check_bc(field, params)?;
    let grid = *field.grid();
    SplitStepper::new(&grid, *params, boundary, params.tau())?.step(field)
}

/// Stop when the max-norm change rate of the field over `window` time units
/// drops below `threshold`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    pub window: f64,
    pub threshold: f64,
}

impl Default for SteadyState {
    fn default() -> Self {
        Self {
            window: 0.01,
            threshold: 1e-6,
        }
    }
}

impl SteadyState {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.threshold > 0.0) {
            return Err(Error::InvalidParameter(
                "steady-state window and threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Steps between observations.
    pub cadence: u64,
    pub steady: Option<SteadyState>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            cadence: 100,
            steady: None,
        }
    }
}

/// What an observer sees at each sample.
pub struct Frame<'a> {
    pub step: u64,
    pub t: f64,
    pub field: &'a ComplexField,
    pub energies: Energies,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub step: u64,
    pub t: f64,
    pub energies: Energies,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    TimeEnd,
    Steady,
}

#[derive(Clone, Debug)]
pub struct EvolutionRecord {
    pub samples: Vec<Sample>,
    pub stop: StopReason,
    pub final_field: ComplexField,
}

/// Advances `initial` to `params.t_end()`, observing every `opts.cadence`
/// steps and at the final time.
pub fn evolve(
    initial: &ComplexField,
    params: &SolverParams,
    boundary: Option<&BoundaryValues>,
    opts: &EvolveOptions,
    observer: &mut dyn FnMut(&Frame) -> Result<()>,
) -> Result<EvolutionRecord> {
    check_bc(initial, params)?;
    if opts.cadence == 0 {
        return Err(Error::InvalidParameter("cadence must be at least 1".into()));
    }
    if let Some(s) = &opts.steady {
        s.validate()?;
    }
    if !initial.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    let grid = *initial.grid();
    let tau = params.tau();
    let eps = params.epsilon();
    let t_end = params.t_end();
    // whole steps, plus a shorter closing step when t_end is not a multiple
    let whole = ((t_end / tau) * (1.0 + 1e-12)).floor() as u64;
    let rest = t_end - whole as f64 * tau;
    let tail = if rest > 1e-9 * tau { rest } else { 0.0 };

    let mut field = initial.clone();
    let mut stepper = SplitStepper::new(&grid, *params, boundary, tau)?;
    let mut samples = Vec::new();

    let mut emit = |field: &ComplexField, step: u64, t: f64, samples: &mut Vec<Sample>| -> Result<()> {
        let energies = gl_energy(field, eps)?;
        samples.push(Sample { step, t, energies });
        observer(&Frame {
            step,
            t,
            field,
            energies,
        })
    };
    emit(&field, 0, 0.0, &mut samples)?;

    let mut reference = (0.0, field.values.clone());
    let mut step = 0u64;
    let mut stop = StopReason::TimeEnd;
    while step < whole {
        let n = opts.cadence.min(whole - step);
        stepper.advance(&mut field, n)?;
        step += n;
        if !field.is_finite() {
            return Err(Error::NonFinite { step });
        }
        let t = step as f64 * tau;
        let at_end = step == whole && tail == 0.0;
        emit(&field, step, if at_end { t_end } else { t }, &mut samples)?;

        if let Some(s) = &opts.steady {
            let dt = t - reference.0;
            if dt >= s.window * (1.0 - 1e-9) {
                let change = max_change(&field.values, &reference.1);
                if change / dt < s.threshold {
                    stop = StopReason::Steady;
                    log::info!("steady state at t = {t} (rate {:e})", change / dt);
                    break;
                }
                reference = (t, field.values.clone());
            }
        }
    }
    if stop == StopReason::TimeEnd && tail > 0.0 {
        SplitStepper::new(&grid, *params, boundary, tail)?.step(&mut field)?;
        step += 1;
        if !field.is_finite() {
            return Err(Error::NonFinite { step });
        }
        emit(&field, step, t_end, &mut samples)?;
    }
    Ok(EvolutionRecord {
        samples,
        stop,
        final_field: field,
    })
}

fn max_change(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    let rows = exec::map_indexed(a.nrows(), |i| {
        a.row(i)
            .iter()
            .zip(b.row(i))
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
    });
    rows.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(bc: BcKind) -> SolverParams {
        SolverParams::new(1.0 / 16.0, 1.0, 1.0, 1e-4, 1e-3, bc).unwrap()
    }

    #[test]
    fn lambda_follows_epsilon() {
        let p = params(BcKind::Neumann);
        assert!((p.lambda() - 1.0 / 16f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_inconsistent_schedule() {
        assert!(SolverParams::new(0.1, 1.0, 1.0, 1e-2, 1e-3, BcKind::Neumann).is_err());
        assert!(SolverParams::new(0.1, 0.0, 1.0, 1e-4, 1e-3, BcKind::Neumann).is_err());
        assert!(SolverParams::new(1.0, 1.0, 1.0, 1e-4, 1e-3, BcKind::Neumann).is_err());
    }

    #[test]
    fn unit_modulus_is_a_fixed_point() {
        let p = params(BcKind::Neumann);
        for a in [0.0, 1.0, 2.5, -3.0] {
            let z = Complex64::from_polar(1.0, a);
            let w = nonlinear_node(z, p.eta() * 1e-3, p.phase_coefficient());
            assert!((w - z).norm() < 1e-15);
        }
        assert_eq!(nonlinear_node(Complex64::default(), 1.0, 1.0), Complex64::default());
    }

    #[test]
    fn zero_beta_keeps_phase() {
        let p = SolverParams::new(0.1, 1.0, 0.0, 1e-4, 1e-3, BcKind::Neumann).unwrap();
        let z = Complex64::from_polar(0.3, 0.7);
        let w = nonlinear_node(z, p.eta() * 1e-3, p.phase_coefficient());
        assert!((w.arg() - 0.7).abs() < 1e-14);
        let rho = 0.09;
        let e = (-p.eta() * 1e-3).exp();
        let expect = rho / (rho + (1.0 - rho) * e);
        assert!((w.norm_sqr() - expect).abs() < 1e-14);
    }
}
