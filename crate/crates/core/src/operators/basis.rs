//! Orthonormal `n × n` transforms `U` with fast forward (`U x`) and inverse
//! (`U* y = Uᵀ y`) application.

use std::fmt;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3, TransformType4};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// An orthonormal transform of `ℝⁿ`.
#[derive(Clone)]
pub enum OrthoBasis {
    /// Unitary type-II DCT.
    Dct(DctBasis),
    /// `H·P`: the `1/√n`-normalized Walsh–Hadamard transform after a column
    /// permutation `P`.
    Hadamard(HadamardBasis),
    /// Real packing of the unitary 2-D DFT of a real image.
    Fourier2d(RealFourier2d),
}

impl fmt::Debug for OrthoBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrthoBasis::Dct(d) => write!(f, "Dct(n={})", d.n),
            OrthoBasis::Hadamard(h) => write!(f, "Hadamard(n={})", h.perm.len()),
            OrthoBasis::Fourier2d(r) => write!(f, "Fourier2d({}x{})", r.rows, r.cols),
        }
    }
}

impl OrthoBasis {
    pub fn dim(&self) -> usize {
        match self {
            OrthoBasis::Dct(d) => d.n,
            OrthoBasis::Hadamard(h) => h.perm.len(),
            OrthoBasis::Fourier2d(r) => r.rows * r.cols,
        }
    }

    /// `out = U x`
    pub fn forward(&self, x: &[f64], out: &mut [f64]) {
        match self {
            OrthoBasis::Dct(d) => d.forward(x, out),
            OrthoBasis::Hadamard(h) => h.forward(x, out),
            OrthoBasis::Fourier2d(r) => r.forward(x, out),
        }
    }

    /// `out = U* y`
    pub fn inverse(&self, y: &[f64], out: &mut [f64]) {
        match self {
            OrthoBasis::Dct(d) => d.inverse(y, out),
            OrthoBasis::Hadamard(h) => h.inverse(y, out),
            OrthoBasis::Fourier2d(r) => r.inverse(y, out),
        }
    }
}

#[derive(Clone)]
pub struct DctBasis {
    n: usize,
    plan: Arc<dyn TransformType2And3<f64>>,
}

impl DctBasis {
    pub fn new(n: usize) -> Self {
        let plan = DctPlanner::new().plan_dct2(n);
        DctBasis { n, plan }
    }

    fn forward(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        self.plan.process_dct2(out);
        let n = self.n as f64;
        out[0] *= (1.0 / n).sqrt();
        let s = (2.0 / n).sqrt();
        out[1..].iter_mut().for_each(|v| *v *= s);
    }

    fn inverse(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n as f64;
        out[0] = 2.0 * (1.0 / n).sqrt() * y[0];
        let s = (2.0 / n).sqrt();
        for (o, v) in out[1..].iter_mut().zip(&y[1..]) {
            *o = s * v;
        }
        self.plan.process_dct3(out);
    }
}

/// Unitary type-IV DCT. Symmetric, so it is its own inverse.
#[derive(Clone)]
pub struct Dct4Basis {
    n: usize,
    plan: Arc<dyn TransformType4<f64>>,
}

impl Dct4Basis {
    pub fn new(n: usize) -> Self {
        let plan = DctPlanner::new().plan_dct4(n);
        Dct4Basis { n, plan }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        self.plan.process_dct4(out);
        let s = (2.0 / self.n as f64).sqrt();
        out.iter_mut().for_each(|v| *v *= s);
    }
}

#[derive(Clone, Debug)]
pub struct HadamardBasis {
    perm: Vec<usize>,
}

impl HadamardBasis {
    /// `perm[i]` is the input coordinate routed to position `i`: `(P x)[i] = x[perm[i]]`.
    pub fn new(perm: Vec<usize>) -> Self {
        debug_assert!(perm.len().is_power_of_two());
        HadamardBasis { perm }
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn forward(&self, x: &[f64], out: &mut [f64]) {
        for (o, &p) in out.iter_mut().zip(&self.perm) {
            *o = x[p];
        }
        fwht_normalized(out);
    }

    fn inverse(&self, y: &[f64], out: &mut [f64]) {
        let mut z = y.to_vec();
        fwht_normalized(&mut z);
        for (zi, &p) in z.iter().zip(&self.perm) {
            out[p] = *zi;
        }
    }
}

/// In-place Walsh–Hadamard transform scaled by `1/√n` (Sylvester ordering).
pub fn fwht_normalized(data: &mut [f64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
    let s = 1.0 / (n as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= s);
}

/// One real coordinate of the packed 2-D spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralRow {
    /// A self-conjugate frequency (DC or Nyquist); its coefficient is real.
    SelfConjugate(usize),
    /// `√2 · Re X[k]` for the representative `k` of a conjugate pair.
    Real(usize),
    /// `√2 · Im X[k]` for the representative `k` of a conjugate pair.
    Imag(usize),
}

/// Real orthonormal transform built from the unitary 2-D DFT of a
/// row-major `rows × cols` image.
///
/// Frequencies are visited in row-major order. A self-conjugate frequency
/// contributes one row; the first member `k` of each pair `{k, −k}`
/// contributes two consecutive rows (`√2·Re X[k]`, `√2·Im X[k]`). The result
/// has exactly `rows·cols` orthonormal rows.
#[derive(Clone)]
pub struct RealFourier2d {
    rows: usize,
    cols: usize,
    layout: Vec<SpectralRow>,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl RealFourier2d {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        let mut layout = Vec::with_capacity(rows * cols);
        for k in 0..rows * cols {
            let c = conjugate_index(k, rows, cols);
            if c == k {
                layout.push(SpectralRow::SelfConjugate(k));
            } else if k < c {
                layout.push(SpectralRow::Real(k));
                layout.push(SpectralRow::Imag(k));
            }
        }
        RealFourier2d {
            rows,
            cols,
            layout,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn layout(&self) -> &[SpectralRow] {
        &self.layout
    }

    /// Groups of packed-row indices that belong to one frequency pair (or a
    /// single self-conjugate frequency), in layout order.
    pub fn frequency_units(&self) -> Vec<Vec<usize>> {
        let mut units = Vec::new();
        let mut i = 0;
        while i < self.layout.len() {
            match self.layout[i] {
                SpectralRow::SelfConjugate(_) => {
                    units.push(vec![i]);
                    i += 1;
                }
                _ => {
                    units.push(vec![i, i + 1]);
                    i += 2;
                }
            }
        }
        units
    }

    fn fft2(&self, buf: &mut [Complex64], forward: bool) {
        let (rows, cols) = (self.rows, self.cols);
        let (row_plan, col_plan) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        row_plan.process(buf);
        let mut t = vec![Complex64::new(0.0, 0.0); rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                t[j * rows + i] = buf[i * cols + j];
            }
        }
        col_plan.process(&mut t);
        for j in 0..cols {
            for i in 0..rows {
                buf[i * cols + j] = t[j * rows + i];
            }
        }
    }

    fn forward(&self, x: &[f64], out: &mut [f64]) {
        let n = self.rows * self.cols;
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, true);
        let s = 1.0 / (n as f64).sqrt();
        let r2 = std::f64::consts::SQRT_2;
        for (o, row) in out.iter_mut().zip(&self.layout) {
            *o = match *row {
                SpectralRow::SelfConjugate(k) => s * buf[k].re,
                SpectralRow::Real(k) => r2 * s * buf[k].re,
                SpectralRow::Imag(k) => r2 * s * buf[k].im,
            };
        }
    }

    fn inverse(&self, y: &[f64], out: &mut [f64]) {
        let n = self.rows * self.cols;
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (v, row) in y.iter().zip(&self.layout) {
            match *row {
                SpectralRow::SelfConjugate(k) => spec[k].re = *v,
                SpectralRow::Real(k) => {
                    spec[k].re = h * v;
                    spec[conjugate_index(k, self.rows, self.cols)].re = h * v;
                }
                SpectralRow::Imag(k) => {
                    spec[k].im = h * v;
                    spec[conjugate_index(k, self.rows, self.cols)].im = -h * v;
                }
            }
        }
        self.fft2(&mut spec, false);
        let s = 1.0 / (n as f64).sqrt();
        for (o, c) in out.iter_mut().zip(&spec) {
            *o = s * c.re;
        }
    }
}

fn conjugate_index(k: usize, rows: usize, cols: usize) -> usize {
    let (k1, k2) = (k / cols, k % cols);
    ((rows - k1) % rows) * cols + (cols - k2) % cols
}
