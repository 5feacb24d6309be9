//! Fourier coefficients of Haar wavelets on `[0, 1)` and the balancing
//! residual of a truncated Fourier sampling of Haar-sparse signals.
//!
//! Frequencies are ordered `0, 1, -1, 2, -2, ...`; Haar functions are ordered
//! scaling function first, then scales `s = 0..J-1` with shifts ascending.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HaarIndex {
    Scaling,
    /// `psi_{s,k}(t) = 2^{s/2} psi(2^s t - k)`.
    Wavelet { s: u32, k: u64 },
}

impl HaarIndex {
    /// Position `j` in the scaling-first, coarse-to-fine ordering.
    pub fn from_position(j: usize) -> Self {
        if j == 0 {
            return HaarIndex::Scaling;
        }
        let s = usize::BITS - 1 - j.leading_zeros();
        HaarIndex::Wavelet { s, k: (j - (1 << s)) as u64 }
    }

    pub fn position(&self) -> usize {
        match *self {
            HaarIndex::Scaling => 0,
            HaarIndex::Wavelet { s, k } => (1usize << s) + k as usize,
        }
    }
}

/// `l`-th entry of the frequency ordering `0, 1, -1, 2, -2, ...`.
pub fn frequency_at(idx: usize) -> i64 {
    if idx == 0 {
        0
    } else if idx % 2 == 1 {
        idx.div_ceil(2) as i64
    } else {
        -((idx / 2) as i64)
    }
}

pub fn frequency_order(d_freq: usize) -> Vec<i64> {
    (0..d_freq).map(frequency_at).collect()
}

/// `W(theta) = (1 - e^{-i pi theta})^2 / (2 pi i theta)`, `W(0) = 0`.
fn mother_transform(theta: f64) -> Complex64 {
    if theta == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let z = Complex64::from_polar(1.0, -PI * theta);
    let one = Complex64::new(1.0, 0.0);
    (one - z) * (one - z) / Complex64::new(0.0, 2.0 * PI * theta)
}

/// `<phi_l, psi_j> = int_0^1 psi_j(t) e^{-2 pi i l t} dt`.
pub fn haar_fourier_coeff(l: i64, j: HaarIndex) -> Result<Complex64> {
    match j {
        HaarIndex::Scaling => Ok(Complex64::new(if l == 0 { 1.0 } else { 0.0 }, 0.0)),
        HaarIndex::Wavelet { s, k } => {
            if s >= 52 || k >= 1u64 << s {
                return Err(Error::invalid(format!("shift k = {k} out of range for scale s = {s}")));
            }
            let scale = 2f64.powi(s as i32);
            // reduce l k mod 2^s before forming the phase to keep it exact
            let phase_num = (l.rem_euclid(1 << s) as u128 * k as u128 % (1u128 << s)) as f64;
            let phase = Complex64::from_polar(1.0, -2.0 * PI * phase_num / scale);
            Ok(phase * mother_transform(l as f64 / scale) / scale.sqrt())
        }
    }
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid(format!("n = {n} must be a power of two")));
    }
    Ok(())
}

/// The `d_freq x n` block `(<phi_l, psi_j>)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UBlock {
    entries: DMatrix<Complex64>,
    freqs: Vec<i64>,
}

pub fn build_u_block(d_freq: usize, n: usize) -> Result<UBlock> {
    check_power_of_two(n)?;
    if d_freq == 0 {
        return Err(Error::invalid("d_freq must be at least 1"));
    }
    let freqs = frequency_order(d_freq);
    let mut entries = DMatrix::from_element(d_freq, n, Complex64::new(0.0, 0.0));
    for (r, &l) in freqs.iter().enumerate() {
        for c in 0..n {
            entries[(r, c)] = haar_fourier_coeff(l, HaarIndex::from_position(c))?;
        }
    }
    Ok(UBlock { entries, freqs })
}

impl UBlock {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn freqs(&self) -> &[i64] {
        &self.freqs
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn d_freq(&self) -> usize {
        self.entries.nrows()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.entries.column_iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect()
    }

    /// `Re(U^* U)`.
    pub fn real_gram(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut g = DMatrix::zeros(n, n);
        for row in self.entries.row_iter() {
            accumulate_row(&mut g, row.iter().copied());
        }
        g
    }

    /// Real coordinates of `U alpha` in the order `Re c_0, Re c_1, Im c_1,
    /// Re c_{-1}, Im c_{-1}, ...` (the imaginary part at frequency 0 is always
    /// zero and is omitted). Squared norms are preserved.
    pub fn real_stacked(&self, alpha: &[f64]) -> Result<Vector> {
        if alpha.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: alpha.len() });
        }
        let mut out = Vec::with_capacity(2 * self.d_freq());
        for (r, row) in self.entries.row_iter().enumerate() {
            let c: Complex64 = row.iter().zip(alpha).map(|(u, a)| u * a).sum();
            out.push(c.re);
            if r > 0 {
                out.push(c.im);
            }
        }
        Vector::new(out)
    }

    /// CSV with one row per frequency and interleaved `re_j, im_j` columns.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["freq".to_string()];
        for j in 0..self.n() {
            header.push(format!("re_{j}"));
            header.push(format!("im_{j}"));
        }
        w.write_record(&header)?;
        for (r, &l) in self.freqs.iter().enumerate() {
            let mut rec = vec![l.to_string()];
            for z in self.entries.row(r).iter() {
                rec.push(format!("{:e}", z.re));
                rec.push(format!("{:e}", z.im));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of real coordinates produced by [`UBlock::real_stacked`].
pub fn real_stacked_dim(d_freq: usize) -> usize {
    2 * d_freq - 1
}

fn accumulate_row(g: &mut DMatrix<f64>, row: impl Iterator<Item = Complex64> + Clone) {
    let row: Vec<Complex64> = row.collect();
    for (i, a) in row.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            g[(i, j)] += (a.conj() * b).re;
        }
    }
}

fn spectral_deviation(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let dev = g - DMatrix::<f64>::identity(n, n);
    SymmetricEigen::new(dev).eigenvalues.amax()
}

/// `|Re(U^* U) - I|_2`.
pub fn balancing_residual(u: &UBlock) -> f64 {
    spectral_deviation(&u.real_gram())
}

/// Residual after each frequency is appended, for `d = 1..=d_max`.
pub fn residual_curve(n: usize, d_max: usize) -> Result<Vec<f64>> {
    check_power_of_two(n)?;
    let mut g = DMatrix::zeros(n, n);
    (0..d_max)
        .map(|idx| {
            let l = frequency_at(idx);
            let row = (0..n).map(|c| haar_fourier_coeff(l, HaarIndex::from_position(c))).collect::<Result<Vec<_>>>()?;
            accumulate_row(&mut g, row.into_iter());
            Ok(spectral_deviation(&g))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinD {
    pub n: usize,
    pub eps_star: f64,
    pub d: usize,
}

/// Smallest number of frequencies whose balancing residual is at most
/// `eps_star`, scanning `d = 1..=d_max`.
pub fn min_d_for_eps(n: usize, eps_star: f64, d_max: usize) -> Result<MinD> {
    check_power_of_two(n)?;
    if !(eps_star > 0.0 && eps_star < 1.0) {
        return Err(Error::invalid(format!("eps_star = {eps_star} must lie in (0, 1)")));
    }
    if d_max == 0 {
        return Err(Error::invalid("d_max must be at least 1"));
    }
    let mut g = DMatrix::zeros(n, n);
    let mut residual = f64::INFINITY;
    for idx in 0..d_max {
        let l = frequency_at(idx);
        let row = (0..n).map(|c| haar_fourier_coeff(l, HaarIndex::from_position(c))).collect::<Result<Vec<_>>>()?;
        accumulate_row(&mut g, row.into_iter());
        // residual >= (n - trace) / n, so skip the eigen solve while that fails
        let deficit = n as f64 - g.trace();
        if deficit > eps_star * n as f64 && idx + 1 < d_max {
            continue;
        }
        residual = spectral_deviation(&g);
        if residual <= eps_star {
            return Ok(MinD { n, eps_star, d: idx + 1 });
        }
    }
    Err(Error::NotFound { d_max, eps_star, residual })
}
