//! Row-major complex 2-D FFT on top of rustfft.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Fft2 {
    ns: usize,
    nt: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(ns: usize, nt: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            ns,
            nt,
            row_fwd: planner.plan_fft_forward(nt),
            row_inv: planner.plan_fft_inverse(nt),
            col_fwd: planner.plan_fft_forward(ns),
            col_inv: planner.plan_fft_inverse(ns),
        }
    }

    /// X[p, q] = Σ x[m, n] e^{−2πi(pm/ns + qn/nt)}, unnormalized.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_fwd, &self.col_fwd);
    }

    /// Σ X[p, q] e^{+2πi(pm/ns + qn/nt)}, unnormalized.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_inv, &self.col_inv);
    }

    fn run(&self, data: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.ns * self.nt);
        row.process(data);
        let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
        transpose(data, &mut t, self.ns, self.nt);
        col.process(&mut t);
        transpose(&t, data, self.nt, self.ns);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Circular convolution of two complex grids through the FFT, unweighted.
pub fn circular_convolve(fft: &Fft2, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fft.forward(&mut x);
    fft.forward(&mut y);
    for (u, v) in x.iter_mut().zip(&y) {
        *u *= v;
    }
    fft.inverse(&mut x);
    let scale = 1.0 / x.len() as f64;
    x.iter_mut().for_each(|v| *v *= scale);
    x
}
