//! Uniform tensor grids on rectangles and the small geometry vocabulary shared
//! by the rest of the crate.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Rotation by +pi/2, i.e. multiplication by `J = [[0, -1], [1, 0]]`.
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Boundary condition attached to a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Uniform grid on `[a, b] x [c, d]` with `nx` intervals in x and `ny` in y.
///
/// Nodes are indexed `(i, j)` with `0 <= i <= nx`, `0 <= j <= ny`; node
/// coordinates are always computed as `a + i * hx`, never accumulated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid2D {
    pub fn new(a: f64, b: f64, c: f64, d: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if b <= a || d <= c {
            return Err(Error::InvalidGrid(format!(
                "degenerate bounds [{a}, {b}] x [{c}, {d}]"
            )));
        }
        for (name, n) in [("N", nx), ("L", ny)] {
            if n % 2 != 0 || n < 8 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be even and at least 8"
                )));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            nx,
            ny,
            hx: (b - a) / nx as f64,
            hy: (d - c) / ny as f64,
        })
    }

    /// Smallest even resolution in each direction whose spacing does not
    /// exceed `h`.
    pub fn with_max_spacing(a: f64, b: f64, c: f64, d: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing {h} must be positive")));
        }
        let even = |len: f64| {
            let n = (len / h - 1e-9).ceil().max(8.0) as usize;
            n + n % 2
        };
        Self::new(a, b, c, d, even(b - a), even(d - c))
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }

    /// Number of intervals in x.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of intervals in y.
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn h_max(&self) -> f64 {
        self.hx.max(self.hy)
    }

    /// Array shape `(nx + 1, ny + 1)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.nx + 1, self.ny + 1)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.a + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.c + j as f64 * self.hy
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(self.x(i), self.y(j))
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains_strictly(&self, p: Point) -> bool {
        p.x > self.a && p.x < self.b && p.y > self.c && p.y < self.d
    }

    /// Distance from `p` to the nearest side (negative outside).
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        (p.x - self.a)
            .min(self.b - p.x)
            .min(p.y - self.c)
            .min(self.d - p.y)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    /// Trapezoidal weight of node `i` along x.
    pub fn wx(&self, i: usize) -> f64 {
        if i == 0 || i == self.nx {
            0.5 * self.hx
        } else {
            self.hx
        }
    }

    pub fn wy(&self, j: usize) -> f64 {
        if j == 0 || j == self.ny {
            0.5 * self.hy
        } else {
            self.hy
        }
    }

    /// Index of the cell containing `p`, clamped to the grid.
    pub fn cell_of(&self, p: Point) -> (usize, usize) {
        let fi = ((p.x - self.a) / self.hx).floor();
        let fj = ((p.y - self.c) / self.hy).floor();
        let i = fi.clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = fj.clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }

    /// Boundary nodes in counter-clockwise order starting at `(a, c)`:
    /// bottom, right, top, left. There are `2 (nx + ny)` of them.
    pub fn boundary_nodes(&self) -> Vec<(usize, usize)> {
        let (n, l) = (self.nx, self.ny);
        let mut out = Vec::with_capacity(2 * (n + l));
        out.extend((0..n).map(|i| (i, 0)));
        out.extend((0..l).map(|j| (n, j)));
        out.extend((1..=n).rev().map(|i| (i, l)));
        out.extend((1..=l).rev().map(|j| (0, j)));
        out
    }

    /// The four sides as `(start, end, outward normal)` traversed
    /// counter-clockwise.
    pub fn sides(&self) -> [(Point, Point, Point); 4] {
        let (a, b, c, d) = self.bounds();
        [
            (Point::new(a, c), Point::new(b, c), Point::new(0.0, -1.0)),
            (Point::new(b, c), Point::new(b, d), Point::new(1.0, 0.0)),
            (Point::new(b, d), Point::new(a, d), Point::new(0.0, 1.0)),
            (Point::new(a, d), Point::new(a, c), Point::new(-1.0, 0.0)),
        ]
    }

    /// Outward normals at boundary node `(i, j)`; corners have two.
    pub fn normals_at(&self, i: usize, j: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(2);
        if j == 0 {
            out.push(Point::new(0.0, -1.0));
        }
        if i == self.nx {
            out.push(Point::new(1.0, 0.0));
        }
        if j == self.ny {
            out.push(Point::new(0.0, 1.0));
        }
        if i == 0 {
            out.push(Point::new(-1.0, 0.0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_is_exact() {
        let g = Grid2D::new(-1.0, 1.0, -1.0, 1.0, 10, 10).unwrap();
        assert_eq!(g.hx(), 0.2);
        assert_eq!(g.hy(), 0.2);
        assert_eq!(g.x(10), 1.0);
    }

    #[test]
    fn type_two_domain() {
        let g = Grid2D::new(-1.0, 1.0, -0.65, 0.65, 16, 8).unwrap();
        assert!((g.hy() - 0.1625).abs() < 1e-15);
        assert_eq!(g.shape(), (17, 9));
    }

    #[test]
    fn rejects_bad_resolution_and_bounds() {
        assert!(Grid2D::new(-1.0, 1.0, -1.0, 1.0, 7, 10).is_err());
        assert!(Grid2D::new(-1.0, 1.0, -1.0, 1.0, 6, 10).is_err());
        assert!(Grid2D::new(1.0, 1.0, -1.0, 1.0, 10, 10).is_err());
        assert!(Grid2D::new(-1.0, 1.0, 1.0, -1.0, 10, 10).is_err());
    }

    #[test]
    fn boundary_enumeration_is_a_closed_ccw_loop() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 2.0, 8, 12).unwrap();
        let b = g.boundary_nodes();
        assert_eq!(b.len(), 2 * (8 + 12));
        for w in b.windows(2).chain(std::iter::once(&[b[b.len() - 1], b[0]][..])) {
            let (i0, j0) = w[0];
            let (i1, j1) = w[1];
            let step = i0.abs_diff(i1) + j0.abs_diff(j1);
            assert_eq!(step, 1);
        }
        // signed area of the polygon is positive for counter-clockwise order
        let pts: Vec<Point> = b.iter().map(|&(i, j)| g.node(i, j)).collect();
        let area: f64 = (0..pts.len())
            .map(|k| {
                let (p, q) = (pts[k], pts[(k + 1) % pts.len()]);
                p.x * q.y - q.x * p.y
            })
            .sum::<f64>()
            / 2.0;
        assert!((area - 2.0).abs() < 1e-12);
    }

    #[test]
    fn max_spacing_picks_even_counts() {
        let g = Grid2D::with_max_spacing(-1.0, 1.0, -0.65, 0.65, 1.0 / 128.0).unwrap();
        assert_eq!(g.nx(), 256);
        assert_eq!(g.ny() % 2, 0);
        assert!(g.hy() <= 1.0 / 128.0);
    }
}
