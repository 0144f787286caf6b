//! Reduced dynamical laws for vortex centers:
//! `(alpha I + beta n_j J) dx_j/dt = 2 n_j [grad R(x_j) + sum_{l != j} n_l (x_j - x_l) / |x_j - x_l|^2]`,
//! with `R` the regular part carrying the boundary condition.

use crate::error::{Error, Result};
use crate::grid::{Grid2D, Point};
use crate::harmonic::{self, DirichletLaplace, HarmonicField, NeumannLaplace};
use crate::initial::BoundaryPhase;
use crate::ode::{dopri5, OdeOptions, OdeSolution, OdeStop};

/// Centers and windings at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct RdlState {
    pub t: f64,
    pub centers: Vec<Point>,
    pub windings: Vec<i8>,
}

impl RdlState {
    pub fn new(centers: Vec<Point>, windings: Vec<i8>) -> Self {
        Self {
            t: 0.0,
            centers,
            windings,
        }
    }

    pub fn validate(&self, domain: &Grid2D) -> Result<()> {
        if self.centers.len() != self.windings.len() {
            return Err(Error::InvalidParameter(
                "centers and windings differ in length".into(),
            ));
        }
        for &n in &self.windings {
            if n != 1 && n != -1 {
                return Err(Error::InvalidParameter(format!("winding {n} is not +1 or -1")));
            }
        }
        for c in &self.centers {
            if !domain.contains_strictly(*c) {
                return Err(Error::InvalidParameter(format!(
                    "center ({}, {}) is not interior",
                    c.x, c.y
                )));
            }
        }
        check_separation(&self.centers)
    }
}

fn check_separation(centers: &[Point]) -> Result<()> {
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if centers[i].dist(centers[j]) < 1e-12 {
                return Err(Error::CoincidentVortices { i, j });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopKind {
    Collision { i: usize, j: usize },
    Exit { j: usize },
    TimeEnd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopEvent {
    pub kind: StopKind,
    pub t_stop: f64,
}

/// Boundary condition of the reduced model.
#[derive(Clone, Debug, PartialEq)]
pub enum RdlBoundary {
    /// Dirichlet data with boundary phase `omega`.
    Dirichlet(BoundaryPhase),
    Neumann,
}

/// Which auxiliary harmonic function supplies `grad R` at the centers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhsForm {
    /// `-J grad Q` (Dirichlet) or `-J grad Q~` (Neumann).
    Q,
    /// `-J grad H` (Dirichlet) or `-grad H~` (Neumann).
    H,
    /// `grad R` or `grad R~` directly.
    R,
}

/// Reduced model on a rectangle with its auxiliary Laplace solvers.
#[derive(Clone, Debug)]
pub struct RdlModel {
    alpha: f64,
    beta: f64,
    boundary: RdlBoundary,
    form: RhsForm,
    dir: DirichletLaplace,
    neu: NeumannLaplace,
}

/// Default intervals of the auxiliary grid per direction.
pub const AUX_INTERVALS: usize = 256;

impl RdlModel {
    pub fn new(aux: Grid2D, alpha: f64, beta: f64, boundary: RdlBoundary) -> Result<Self> {
        if !(alpha > 0.0 && beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must be positive and beta = {beta} non-negative"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            boundary,
            form: RhsForm::Q,
            dir: DirichletLaplace::new(aux),
            neu: NeumannLaplace::new(aux),
        })
    }

    /// Auxiliary grid with `intervals` intervals per direction on the
    /// rectangle of `domain`.
    pub fn aux_grid(domain: &Grid2D, intervals: usize) -> Result<Grid2D> {
        let (a, b, c, d) = domain.bounds();
        Grid2D::new(a, b, c, d, intervals, intervals)
    }

    pub fn with_form(mut self, form: RhsForm) -> Self {
        self.form = form;
        self
    }

    pub fn grid(&self) -> &Grid2D {
        self.dir.grid()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn boundary(&self) -> &RdlBoundary {
        &self.boundary
    }

    /// Auxiliary harmonic function of the given form.
    pub fn auxiliary(&self, form: RhsForm, centers: &[Point], windings: &[i8]) -> Result<HarmonicField> {
        match (&self.boundary, form) {
            (RdlBoundary::Dirichlet(w), RhsForm::Q) => {
                harmonic::build_q_dirichlet(&self.dir, w, centers, windings)
            }
            (RdlBoundary::Dirichlet(w), RhsForm::H) => {
                harmonic::build_h_dirichlet(&self.dir, w, centers, windings)
            }
            (RdlBoundary::Dirichlet(w), RhsForm::R) => {
                harmonic::build_r_dirichlet(&self.neu, w, centers, windings)
            }
            (RdlBoundary::Neumann, RhsForm::Q) => {
                harmonic::build_qtilde_neumann(&self.neu, centers, windings)
            }
            (RdlBoundary::Neumann, RhsForm::H) => {
                harmonic::build_htilde_neumann(&self.dir, centers, windings)
            }
            (RdlBoundary::Neumann, RhsForm::R) => harmonic::build_rtilde(&self.dir, centers, windings),
        }
    }

    /// `grad R` at each center, computed through `form`.
    pub fn regular_gradients(&self, form: RhsForm, centers: &[Point], windings: &[i8]) -> Result<Vec<Point>> {
        let f = self.auxiliary(form, centers, windings)?;
        let neumann = self.boundary == RdlBoundary::Neumann;
        centers
            .iter()
            .map(|&c| {
                let g = f.grad_at(c)?;
                Ok(match form {
                    RhsForm::R => g,
                    RhsForm::H if neumann => -g,
                    _ => -g.rot90(),
                })
            })
            .collect()
    }

    /// Driving forces `F_j = -grad_{x_j} W = 2 n_j [grad R(x_j) + sum_{l != j} n_l (x_j - x_l)/|x_j - x_l|^2]`.
    pub fn forces(&self, centers: &[Point], windings: &[i8]) -> Result<Vec<Point>> {
        self.forces_with(self.form, centers, windings)
    }

    pub fn forces_with(&self, form: RhsForm, centers: &[Point], windings: &[i8]) -> Result<Vec<Point>> {
        check_separation(centers)?;
        let grads = self.regular_gradients(form, centers, windings)?;
        Ok(centers
            .iter()
            .enumerate()
            .map(|(j, &xj)| {
                let mut s = grads[j];
                for (l, &xl) in centers.iter().enumerate() {
                    if l != j {
                        let d = xj - xl;
                        s = s + d * (f64::from(windings[l]) / d.norm_sqr());
                    }
                }
                s * (2.0 * f64::from(windings[j]))
            })
            .collect())
    }

    /// Solves `(alpha I + beta n J) v = F` with the closed-form inverse.
    pub fn mobility(&self, n: i8, force: Point) -> Point {
        let bn = self.beta * f64::from(n);
        (force * self.alpha - force.rot90() * bn) * (1.0 / (self.alpha * self.alpha + self.beta * self.beta))
    }

    pub fn velocities(&self, centers: &[Point], windings: &[i8]) -> Result<Vec<Point>> {
        self.velocities_with(self.form, centers, windings)
    }

    pub fn velocities_with(&self, form: RhsForm, centers: &[Point], windings: &[i8]) -> Result<Vec<Point>> {
        let f = self.forces_with(form, centers, windings)?;
        Ok(f.iter()
            .zip(windings)
            .map(|(&fj, &n)| self.mobility(n, fj))
            .collect())
    }

    /// Renormalized energy `W = W_cen + W_bc`.
    pub fn renormalized_energy(&self, centers: &[Point], windings: &[i8]) -> Result<f64> {
        check_separation(centers)?;
        Ok(central_energy(centers, windings) + self.boundary_energy(centers, windings)?)
    }

    /// `W_bc`: `-sum n_j R~(x_j)` under Neumann conditions; under Dirichlet
    /// conditions `-sum n_j R(x_j)` plus the boundary integral of
    /// `[R + sum n_j ln|x - x_j|] d omega / d nu_perp / (2 pi)` by the
    /// trapezoidal rule over boundary nodes, corners averaging the two
    /// one-sided tangential derivatives.
    pub fn boundary_energy(&self, centers: &[Point], windings: &[i8]) -> Result<f64> {
        let r = self.auxiliary(RhsForm::R, centers, windings)?;
        let mut w = 0.0;
        for (&c, &n) in centers.iter().zip(windings) {
            w -= f64::from(n) * r.value_at(c)?;
        }
        if let RdlBoundary::Dirichlet(omega) = &self.boundary {
            let g = self.grid();
            let nodes = g.boundary_nodes();
            let m = nodes.len();
            let pts: Vec<Point> = nodes.iter().map(|&(i, j)| g.node(i, j)).collect();
            let mut integral = 0.0;
            for k in 0..m {
                let (i, j) = nodes[k];
                let p = pts[k];
                let normals = g.normals_at(i, j);
                let dt = normals
                    .iter()
                    .map(|nu| omega.gradient(p).dot(nu.rot90()))
                    .sum::<f64>()
                    / normals.len() as f64;
                let mut val = r.values[[i, j]];
                for (&c, &n) in centers.iter().zip(windings) {
                    val += f64::from(n) * p.dist(c).ln();
                }
                let weight = 0.5 * (p.dist(pts[(k + m - 1) % m]) + p.dist(pts[(k + 1) % m]));
                integral += weight * val * dt;
            }
            w += integral / (2.0 * std::f64::consts::PI);
        }
        Ok(w)
    }

    /// Integrates the reduced model from `state0` until `t_end`, a collision
    /// or an exit, whichever comes first.
    pub fn integrate(&self, state0: &RdlState, t_end: f64, opts: &RdlOptions) -> Result<RdlTrajectory> {
        let domain = *self.grid();
        state0.validate(&domain)?;
        let m = state0.centers.len();
        let windings = state0.windings.clone();
        let delta_e = opts.effective_exit_distance(&domain);
        let delta_c = opts.collision_distance;

        let y0: Vec<f64> = state0.centers.iter().flat_map(|p| [p.x, p.y]).collect();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let unpack = |y: &[f64]| -> Vec<Point> { y.chunks(2).map(|c| Point::new(c[0], c[1])).collect() };

        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            let v = self.velocities(&unpack(y), &windings)?;
            for (k, vk) in v.iter().enumerate() {
                dy[2 * k] = vk.x;
                dy[2 * k + 1] = vk.y;
            }
            Ok(())
        };
        let events = |y: &[f64]| -> Vec<f64> {
            let c = unpack(y);
            let mut g: Vec<f64> = pairs.iter().map(|&(i, j)| c[i].dist(c[j]) - delta_c).collect();
            g.extend(c.iter().map(|p| domain.distance_to_boundary(*p) - delta_e));
            g
        };
        let ode_opts = OdeOptions {
            h_max: opts.max_step,
            ..opts.ode
        };
        let sol = dopri5(rhs, state0.t, &y0, t_end, &ode_opts, events)?;
        let kind = match sol.stop {
            OdeStop::End => StopKind::TimeEnd,
            OdeStop::Event { index, .. } if index < pairs.len() => {
                let (i, j) = pairs[index];
                StopKind::Collision { i, j }
            }
            OdeStop::Event { index, .. } => StopKind::Exit {
                j: index - pairs.len(),
            },
        };
        let stop = StopEvent {
            kind,
            t_stop: sol.t_final(),
        };
        log::debug!("reduced model stopped: {stop:?} after {} steps", sol.steps.len());
        Ok(RdlTrajectory {
            windings,
            solution: sol,
            stop,
        })
    }
}

/// `W_cen = -sum_{i != j} n_i n_j ln|x_i - x_j|` over ordered pairs.
pub fn central_energy(centers: &[Point], windings: &[i8]) -> f64 {
    let mut w = 0.0;
    for i in 0..centers.len() {
        for j in 0..centers.len() {
            if i != j {
                w -= f64::from(windings[i]) * f64::from(windings[j]) * centers[i].dist(centers[j]).ln();
            }
        }
    }
    w
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RdlOptions {
    pub ode: OdeOptions,
    /// Largest accepted step; bounds the spacing of stored states.
    pub max_step: f64,
    pub collision_distance: f64,
    /// Requested exit distance; raised to `2.5 h_aux` if smaller, since the
    /// auxiliary gradients need two cells of clearance.
    pub exit_distance: f64,
}

impl Default for RdlOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            max_step: 5e-3,
            collision_distance: 1e-2,
            exit_distance: 1e-2,
        }
    }
}

impl RdlOptions {
    pub fn effective_exit_distance(&self, aux: &Grid2D) -> f64 {
        self.exit_distance.max(2.5 * aux.h_max())
    }
}

/// Result of [`RdlModel::integrate`].
#[derive(Clone, Debug)]
pub struct RdlTrajectory {
    pub windings: Vec<i8>,
    pub solution: OdeSolution,
    pub stop: StopEvent,
}

impl RdlTrajectory {
    pub fn centers_at(&self, t: f64) -> Vec<Point> {
        let y = self.solution.eval(t.min(self.stop.t_stop));
        y.chunks(2).map(|c| Point::new(c[0], c[1])).collect()
    }

    /// States at the start and at the end of every accepted step.
    pub fn step_states(&self) -> Vec<(f64, Vec<Point>)> {
        let mut out = vec![(self.solution.t0, self.centers_at(self.solution.t0))];
        for s in &self.solution.steps {
            let t = s.t1.min(self.stop.t_stop);
            out.push((t, self.centers_at(t)));
        }
        out
    }

    /// States on the uniform grid `t0, t0 + dt, ...` plus the stop time.
    pub fn sample(&self, dt: f64) -> Vec<(f64, Vec<Point>)> {
        let t0 = self.solution.t0;
        let end = self.stop.t_stop;
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let t = t0 + k as f64 * dt;
            if t > end - 1e-12 {
                break;
            }
            out.push((t, self.centers_at(t)));
            k += 1;
        }
        out.push((end, self.centers_at(end)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(boundary: RdlBoundary) -> RdlModel {
        let aux = Grid2D::new(-1.0, 1.0, -1.0, 1.0, 64, 64).unwrap();
        RdlModel::new(aux, 1.0, 1.0, boundary).unwrap()
    }

    #[test]
    fn mobility_inverts_the_matrix() {
        let m = model(RdlBoundary::Neumann);
        let f = Point::new(0.3, -1.7);
        for n in [1i8, -1] {
            let v = m.mobility(n, f);
            let back = v * m.alpha() + v.rot90() * (m.beta() * f64::from(n));
            assert!((back - f).norm() < 1e-15);
        }
    }

    #[test]
    fn central_energy_signs() {
        let like = central_energy(&[Point::new(-0.1, 0.0), Point::new(0.1, 0.0)], &[1, 1]);
        assert!((like + 2.0 * 0.2f64.ln()).abs() < 1e-15);
        let dip = central_energy(&[Point::new(-0.1, 0.0), Point::new(0.1, 0.0)], &[1, -1]);
        assert!((dip - 2.0 * 0.2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn coincident_centers_rejected() {
        let m = model(RdlBoundary::Neumann);
        let c = [Point::new(0.1, 0.0), Point::new(0.1, 0.0)];
        assert!(matches!(m.velocities(&c, &[1, 1]), Err(Error::CoincidentVortices { .. })));
    }
}
