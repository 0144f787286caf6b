//! Type-I discrete cosine and sine transforms, computed through an FFT of the
//! even (odd) extension.
//!
//! Conventions, for a lane with `n` intervals:
//!
//! * DCT-I acts on `n + 1` samples:
//!   `X_k = x_0 / 2 + (-1)^k x_n / 2 + sum_{j=1}^{n-1} x_j cos(pi j k / n)`.
//!   The mode vectors `cos(pi j k / n)` diagonalize the node-centred Neumann
//!   Laplacian; a constant maps to `X = (n c, 0, ..., 0)`.
//! * DST-I acts on the `n - 1` interior samples:
//!   `S_k = sum_{j=1}^{n-1} x_j sin(pi j k / n)`, `k = 1..n-1`.
//!
//! Both are involutions up to the factor `n / 2`.

use std::sync::Arc;

use ndarray::{Array2, ArrayViewMut1, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::exec;

/// Scratch buffers for one worker.
pub struct Work {
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Cosine,
    Sine,
}

/// A type-I trigonometric transform on lanes with `n` intervals.
#[derive(Clone)]
pub struct Trig1 {
    kind: Kind,
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Trig1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Trig1")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .finish()
    }
}

impl Trig1 {
    pub fn cosine(n: usize) -> Self {
        Self::build(Kind::Cosine, n)
    }

    pub fn sine(n: usize) -> Self {
        Self::build(Kind::Sine, n)
    }

    fn build(kind: Kind, n: usize) -> Self {
        assert!(n >= 2, "transform needs at least two intervals");
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        Self { kind, n, fft }
    }

    /// Number of samples the transform acts on.
    pub fn len(&self) -> usize {
        match self.kind {
            Kind::Cosine => self.n + 1,
            Kind::Sine => self.n - 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scale that turns a double application into the identity.
    pub fn inverse_scale(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn work(&self) -> Work {
        Work {
            buf: vec![Complex64::default(); 2 * self.n],
            scratch: vec![Complex64::default(); self.fft.get_inplace_scratch_len()],
        }
    }

    /// Loads the extension of `get(k)` into the work buffer.
    fn load(&self, work: &mut Work, get: impl Fn(usize) -> Complex64) {
        let n = self.n;
        let buf = &mut work.buf;
        match self.kind {
            Kind::Cosine => {
                for k in 0..=n {
                    buf[k] = get(k);
                }
                for k in 1..n {
                    buf[2 * n - k] = buf[k];
                }
            }
            Kind::Sine => {
                buf[0] = Complex64::default();
                buf[n] = Complex64::default();
                for k in 1..n {
                    let v = get(k - 1);
                    buf[k] = v;
                    buf[2 * n - k] = -v;
                }
            }
        }
    }

    /// Runs the FFT and returns output `k` of the trigonometric transform.
    fn run(&self, work: &mut Work) {
        self.fft
            .process_with_scratch(&mut work.buf, &mut work.scratch);
    }

    #[inline]
    fn out(&self, work: &Work, k: usize) -> Complex64 {
        match self.kind {
            Kind::Cosine => work.buf[k] * 0.5,
            // S_k = i Y_k / 2
            Kind::Sine => {
                let y = work.buf[k + 1];
                Complex64::new(-0.5 * y.im, 0.5 * y.re)
            }
        }
    }

    /// Transforms `lane` in place.
    pub fn apply_lane(&self, mut lane: ArrayViewMut1<Complex64>, work: &mut Work) {
        debug_assert_eq!(lane.len(), self.len());
        self.load(work, |k| lane[k]);
        self.run(work);
        for (k, v) in lane.iter_mut().enumerate() {
            *v = self.out(work, k);
        }
    }

    pub fn apply(&self, x: &mut [Complex64]) {
        let mut work = self.work();
        self.apply_lane(ArrayViewMut1::from(x), &mut work);
    }

    /// Transforms two real lanes at once by packing them into one complex
    /// lane (the kernels are real).
    pub fn apply_real_pair(
        &self,
        mut a: ArrayViewMut1<f64>,
        b: Option<ArrayViewMut1<f64>>,
        work: &mut Work,
    ) {
        match b {
            Some(mut b) => {
                self.load(work, |k| Complex64::new(a[k], b[k]));
                self.run(work);
                for k in 0..self.len() {
                    let z = self.out(work, k);
                    a[k] = z.re;
                    b[k] = z.im;
                }
            }
            None => {
                self.load(work, |k| Complex64::new(a[k], 0.0));
                self.run(work);
                for k in 0..self.len() {
                    a[k] = self.out(work, k).re;
                }
            }
        }
    }
}

/// Separable transform of a 2D array: one lane transform per axis.
#[derive(Clone, Debug)]
pub struct Trig2 {
    pub x: Trig1,
    pub y: Trig1,
}

impl Trig2 {
    pub fn cosine(nx: usize, ny: usize) -> Self {
        Self {
            x: Trig1::cosine(nx),
            y: Trig1::cosine(ny),
        }
    }

    pub fn sine(nx: usize, ny: usize) -> Self {
        Self {
            x: Trig1::sine(nx),
            y: Trig1::sine(ny),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    /// Scale that makes `apply` followed by `apply` the identity.
    pub fn inverse_scale(&self) -> f64 {
        self.x.inverse_scale() * self.y.inverse_scale()
    }

    /// Unnormalized transform along both axes, in place.
    pub fn apply(&self, arr: &mut Array2<Complex64>) {
        debug_assert_eq!(arr.dim(), self.shape());
        exec::for_each_lane(
            arr,
            Axis(1),
            || self.y.work(),
            |w, _, lane| self.y.apply_lane(lane, w),
        );
        exec::for_each_lane(
            arr,
            Axis(0),
            || self.x.work(),
            |w, _, lane| self.x.apply_lane(lane, w),
        );
    }

    /// Real-data version of [`Trig2::apply`].
    pub fn apply_real(&self, arr: &mut Array2<f64>) {
        debug_assert_eq!(arr.dim(), self.shape());
        for (axis, t) in [(Axis(1), &self.y), (Axis(0), &self.x)] {
            let outer = Axis(1 - axis.index());
            exec::for_each_lane_chunk(arr, axis, 2, || t.work(), |w, mut chunk| {
                if chunk.len_of(outer) == 2 {
                    let (a, b) = chunk.view_mut().split_at(outer, 1);
                    let a = a.index_axis_move(outer, 0);
                    let b = b.index_axis_move(outer, 0);
                    t.apply_real_pair(a, Some(b), w);
                } else {
                    let a = chunk.index_axis_mut(outer, 0);
                    t.apply_real_pair(a, None, w);
                }
            });
        }
    }
}
