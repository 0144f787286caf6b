//! Complex order-parameter fields and the Ginzburg-Landau energy diagnostic.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{BcKind, Grid2D, Point};

/// Order parameter sampled on every node of a grid, boundary nodes included.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Grid2D,
    bc: BcKind,
    /// Indexed `[i, j]` with `i` along x.
    pub values: Array2<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid2D, bc: BcKind) -> Self {
        Self {
            grid,
            bc,
            values: Array2::zeros(grid.shape()),
        }
    }

    pub fn from_fn<F>(grid: Grid2D, bc: BcKind, f: F) -> Self
    where
        F: Fn(Point) -> Complex64 + Sync + Send,
    {
        let mut values = Array2::zeros(grid.shape());
        exec::for_each_row(&mut values, |i, mut row| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(grid.node(i, j));
            }
        });
        Self { grid, bc, values }
    }

    pub fn from_values(grid: Grid2D, bc: BcKind, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, bc, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn bc(&self) -> BcKind {
        self.bc
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            bc: self.bc,
            values: self.values.mapv(|z| z.conj()),
        }
    }

    /// Modulus at every node.
    pub fn modulus(&self) -> Array2<f64> {
        self.values.mapv(|z| z.norm())
    }
}

/// Ginzburg-Landau energy split into its gradient and potential parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Energies {
    pub total: f64,
    pub kinetic: f64,
    pub interaction: f64,
}

/// Second-order derivative along one lane at index `k` of `n + 1` samples:
/// central inside, one-sided second order at both ends.
#[inline]
fn diff2(u: impl Fn(usize) -> Complex64, k: usize, n: usize, h: f64) -> Complex64 {
    if k == 0 {
        (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h)
    } else if k == n {
        (3.0 * u(n) - 4.0 * u(n - 1) + u(n - 2)) / (2.0 * h)
    } else {
        (u(k + 1) - u(k - 1)) / (2.0 * h)
    }
}

/// `E = (1/2) int |grad psi|^2 + 1/(4 eps^2) int (1 - |psi|^2)^2` with
/// second-order differences and the trapezoidal rule.
pub fn gl_energy(field: &ComplexField, epsilon: f64) -> Result<Energies> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    let g = field.grid();
    let (n, l) = (g.nx(), g.ny());
    let (hx, hy) = (g.hx(), g.hy());
    let v = &field.values;

    let parts = exec::map_indexed(n + 1, |i| {
        let mut kin = 0.0;
        let mut pot = 0.0;
        for j in 0..=l {
            let dx = diff2(|k| v[[k, j]], i, n, hx);
            let dy = diff2(|k| v[[i, k]], j, l, hy);
            let w = g.wx(i) * g.wy(j);
            kin += w * (dx.norm_sqr() + dy.norm_sqr());
            let s = 1.0 - v[[i, j]].norm_sqr();
            pot += w * s * s;
        }
        (kin, pot)
    });
    let (kin, pot) = parts
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (k, p)| (a + k, b + p));

    let kinetic = 0.5 * kin;
    let interaction = pot / (4.0 * epsilon * epsilon);
    Ok(Energies {
        total: kinetic + interaction,
        kinetic,
        interaction,
    })
}

/// Max-norm and trapezoidal discrete L2 norm of `f1 - f2`.
pub fn field_distance(f1: &ComplexField, f2: &ComplexField) -> Result<(f64, f64)> {
    if f1.grid() != f2.grid() {
        return Err(Error::GridMismatch);
    }
    let g = f1.grid();
    let l = g.ny();
    let rows = exec::map_indexed(g.nx() + 1, |i| {
        let mut m: f64 = 0.0;
        let mut s = 0.0;
        for j in 0..=l {
            let d = (f1.values[[i, j]] - f2.values[[i, j]]).norm();
            m = m.max(d);
            s += g.wx(i) * g.wy(j) * d * d;
        }
        (m, s)
    });
    let (max, sum) = rows
        .into_iter()
        .fold((0.0_f64, 0.0), |(a, b), (m, s)| (a.max(m), b + s));
    Ok((max, sum.sqrt()))
}
