//! Single-level 2D orthogonal wavelet transform and wavelet basis images.
//!
//! Filtering is periodic. Analysis correlates the signal with the filter and
//! keeps even positions: `lo[j] = Σ_i low[i]·x[(2j + i) mod N]`, likewise for
//! `hi`. Synthesis is the transpose, so the transform is exactly orthogonal
//! for orthonormal filter banks.
//!
//! Band convention (matches MATLAB `dwt2`): filtering along each row is the
//! horizontal pass, filtering along each column the vertical pass.
//!
//! | band | horizontal | vertical |
//! |------|------------|----------|
//! | `cA` | low        | low      |
//! | `cH` | low        | high     |
//! | `cV` | high       | low      |
//! | `cD` | high       | high     |

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array2, ArrayView1, ArrayView2};

use crate::error::{dim, invalid, Error, Result};
use crate::par;

/// Tolerance for the orthonormal filter conditions.
pub const FILTER_TOL: f64 = 1e-12;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

// Daubechies 4-tap low-pass, (1±√3)/(4√2) and (3±√3)/(4√2).
#[allow(clippy::excessive_precision)]
const DB2_LOW: [f64; 4] = [
    0.482_962_913_144_534_10,
    0.836_516_303_737_807_72,
    0.224_143_868_042_013_38,
    -0.129_409_522_551_260_37,
];

#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    name: String,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl FilterBank {
    pub fn haar() -> Self {
        Self::from_low("haar", &[SQRT_HALF, SQRT_HALF]).expect("haar is orthonormal")
    }

    pub fn db2() -> Self {
        Self::from_low("db2", &DB2_LOW).expect("db2 is orthonormal")
    }

    /// Completes `low` with its quadrature mirror `high[i] = (−1)^i · low[L−1−i]`
    /// and checks the orthonormality conditions.
    pub fn from_low(name: &str, low: &[f64]) -> Result<Self> {
        if low.is_empty() || !low.len().is_multiple_of(2) {
            return Err(invalid(format!("filter length must be even and positive, got {}", low.len())));
        }
        let l = low.len();
        let high = (0..l)
            .map(|i| if i % 2 == 0 { low[l - 1 - i] } else { -low[l - 1 - i] })
            .collect();
        let fb = Self { name: name.to_string(), low: low.to_vec(), high };
        let dev = fb.deviation();
        if dev >= FILTER_TOL {
            return Err(invalid(format!("filter '{name}' is not orthonormal (deviation {dev:e})")));
        }
        Ok(fb)
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Self::haar()),
            "db2" | "d4" => Ok(Self::db2()),
            other => Err(invalid(format!("unknown filter '{other}' (expected haar|db2)"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    /// Max violation of `Σ low² = 1`, the even-shift orthogonality of `low`
    /// and `high`, their cross orthogonality, and the mirror relation.
    pub fn deviation(&self) -> f64 {
        let l = self.low.len();
        let shifted = |a: &[f64], b: &[f64], m: usize| -> f64 { (0..l - m).map(|i| a[i] * b[i + m]).sum() };
        let mut worst: f64 = 0.0;
        for m in (0..l).step_by(2) {
            let target = if m == 0 { 1.0 } else { 0.0 };
            worst = worst.max((shifted(&self.low, &self.low, m) - target).abs());
            worst = worst.max((shifted(&self.high, &self.high, m) - target).abs());
            worst = worst.max(shifted(&self.low, &self.high, m).abs());
            worst = worst.max(shifted(&self.high, &self.low, m).abs());
        }
        for i in 0..l {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((self.high[i] - sign * self.low[l - 1 - i]).abs());
        }
        worst
    }

    /// Periodic analysis of one even-length signal into `(lo, hi)` halves.
    pub fn analyze(&self, x: &ArrayView1<'_, f64>) -> (Vec<f64>, Vec<f64>) {
        let n = x.len();
        let half = n / 2;
        let mut lo = vec![0.0; half];
        let mut hi = vec![0.0; half];
        for j in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (i, (l, h)) in self.low.iter().zip(&self.high).enumerate() {
                let v = x[(2 * j + i) % n];
                a += l * v;
                d += h * v;
            }
            lo[j] = a;
            hi[j] = d;
        }
        (lo, hi)
    }

    /// Inverse of [`analyze`](Self::analyze).
    pub fn synthesize(&self, lo: &ArrayView1<'_, f64>, hi: &ArrayView1<'_, f64>) -> Vec<f64> {
        let half = lo.len();
        let n = 2 * half;
        let mut x = vec![0.0; n];
        for j in 0..half {
            for (i, (l, h)) in self.low.iter().zip(&self.high).enumerate() {
                x[(2 * j + i) % n] += l * lo[j] + h * hi[j];
            }
        }
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    A,
    H,
    V,
    D,
}

impl Band {
    pub const ALL: [Band; 4] = [Band::A, Band::H, Band::V, Band::D];
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Band::A => "A",
            Band::H => "H",
            Band::V => "V",
            Band::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" | "CA" | "LL" => Ok(Band::A),
            "H" | "CH" | "LH" => Ok(Band::H),
            "V" | "CV" | "HL" => Ok(Band::V),
            "D" | "CD" | "HH" => Ok(Band::D),
            _ => Err(invalid(format!("unknown band '{s}' (expected A|H|V|D)"))),
        }
    }
}

/// The four `N/2 × N/2` coefficient blocks of a single-level transform.
#[derive(Clone, Debug, PartialEq)]
pub struct DwtCoeffs {
    pub ca: Array2<f64>,
    pub ch: Array2<f64>,
    pub cv: Array2<f64>,
    pub cd: Array2<f64>,
}

impl DwtCoeffs {
    pub fn zeros(half: usize) -> Self {
        let z = Array2::zeros((half, half));
        Self { ca: z.clone(), ch: z.clone(), cv: z.clone(), cd: z }
    }

    pub fn half(&self) -> usize {
        self.ca.nrows()
    }

    pub fn band(&self, band: Band) -> &Array2<f64> {
        match band {
            Band::A => &self.ca,
            Band::H => &self.ch,
            Band::V => &self.cv,
            Band::D => &self.cd,
        }
    }

    pub fn band_mut(&mut self, band: Band) -> &mut Array2<f64> {
        match band {
            Band::A => &mut self.ca,
            Band::H => &mut self.ch,
            Band::V => &mut self.cv,
            Band::D => &mut self.cd,
        }
    }

    /// Keeps only `band`, zeroing the other three.
    pub fn isolate(&self, band: Band) -> Self {
        let mut out = Self::zeros(self.half());
        *out.band_mut(band) = self.band(band).clone();
        out
    }

    pub fn energy(&self) -> f64 {
        Band::ALL.iter().map(|b| crate::ortho::energy(self.band(*b))).sum()
    }

    /// Sum over all four blocks of the entrywise products.
    pub fn inner(&self, other: &DwtCoeffs) -> f64 {
        Band::ALL
            .iter()
            .map(|b| crate::basis::frobenius(&self.band(*b).view(), &other.band(*b).view()))
            .sum()
    }

    fn check(&self) -> Result<()> {
        let shape = self.ca.dim();
        if shape.0 != shape.1 || Band::ALL.iter().any(|b| self.band(*b).dim() != shape) {
            return Err(dim("coefficient blocks must be four equal square matrices"));
        }
        Ok(())
    }

    /// `[[cA, cH], [cV, cD]]` as one `N×N` matrix.
    pub fn to_block_layout(&self) -> Array2<f64> {
        let h = self.half();
        let mut out = Array2::zeros((2 * h, 2 * h));
        out.slice_mut(s![..h, ..h]).assign(&self.ca);
        out.slice_mut(s![..h, h..]).assign(&self.ch);
        out.slice_mut(s![h.., ..h]).assign(&self.cv);
        out.slice_mut(s![h.., h..]).assign(&self.cd);
        out
    }

    pub fn from_block_layout(m: &ArrayView2<'_, f64>) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c || r % 2 != 0 || r == 0 {
            return Err(dim(format!("block layout must be square with even side, got {r}x{c}")));
        }
        let h = r / 2;
        Ok(Self {
            ca: m.slice(s![..h, ..h]).to_owned(),
            ch: m.slice(s![..h, h..]).to_owned(),
            cv: m.slice(s![h.., ..h]).to_owned(),
            cd: m.slice(s![h.., h..]).to_owned(),
        })
    }
}

/// Filters every row, returning the low and high halves side by side.
fn rows_pass(fb: &FilterBank, f: &ArrayView2<'_, f64>) -> (Array2<f64>, Array2<f64>) {
    let (m, n) = f.dim();
    let halves = par::map_range(m, |r| fb.analyze(&f.row(r)));
    let mut lo = Array2::zeros((m, n / 2));
    let mut hi = Array2::zeros((m, n / 2));
    for (r, (l, h)) in halves.into_iter().enumerate() {
        lo.row_mut(r).assign(&ArrayView1::from(&l));
        hi.row_mut(r).assign(&ArrayView1::from(&h));
    }
    (lo, hi)
}

fn rows_unpass(fb: &FilterBank, lo: &ArrayView2<'_, f64>, hi: &ArrayView2<'_, f64>) -> Array2<f64> {
    let (m, h) = lo.dim();
    let rows = par::map_range(m, |r| fb.synthesize(&lo.row(r), &hi.row(r)));
    let mut out = Array2::zeros((m, 2 * h));
    for (r, v) in rows.into_iter().enumerate() {
        out.row_mut(r).assign(&ArrayView1::from(&v));
    }
    out
}

/// Single-level 2D analysis of an `N×N` image, `N` even.
pub fn dwt2(fb: &FilterBank, f: &ArrayView2<'_, f64>) -> Result<DwtCoeffs> {
    let (m, n) = f.dim();
    if m != n {
        return Err(dim(format!("dwt2 needs a square image, got {m}x{n}")));
    }
    if n == 0 || !n.is_multiple_of(2) {
        return Err(invalid(format!("dwt2 needs an even side length, got {n}")));
    }
    // horizontal pass
    let (h_lo, h_hi) = rows_pass(fb, f);
    // vertical pass on the transposes
    let (ca_t, ch_t) = rows_pass(fb, &h_lo.t());
    let (cv_t, cd_t) = rows_pass(fb, &h_hi.t());
    Ok(DwtCoeffs {
        ca: ca_t.reversed_axes(),
        ch: ch_t.reversed_axes(),
        cv: cv_t.reversed_axes(),
        cd: cd_t.reversed_axes(),
    })
}

/// Perfect-reconstruction synthesis.
pub fn idwt2(fb: &FilterBank, g: &DwtCoeffs) -> Result<Array2<f64>> {
    g.check()?;
    let h_lo = rows_unpass(fb, &g.ca.t(), &g.ch.t()).reversed_axes();
    let h_hi = rows_unpass(fb, &g.cv.t(), &g.cd.t()).reversed_axes();
    Ok(rows_unpass(fb, &h_lo.view(), &h_hi.view()))
}

/// `E_(kpX)`: synthesis of a unit matrix placed in band `X`.
#[derive(Clone, Debug)]
pub struct WaveletBasisImage {
    pub band: Band,
    pub k: usize,
    pub p: usize,
    pub pixels: Array2<f64>,
}

pub fn wavelet_basis_image(fb: &FilterBank, band: Band, k: usize, p: usize, n: usize) -> Result<WaveletBasisImage> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(invalid(format!("wavelet basis size must be even, got {n}")));
    }
    let half = n / 2;
    if k >= half || p >= half {
        return Err(invalid(format!("band index ({k}, {p}) out of range for size {n}")));
    }
    let mut g = DwtCoeffs::zeros(half);
    g.band_mut(band)[[k, p]] = 1.0;
    Ok(WaveletBasisImage { band, k, p, pixels: idwt2(fb, &g)? })
}

/// Synthesis from a single band, e.g. `D = Σ cD_kp E_(kpD)`.
pub fn band_reconstruction(fb: &FilterBank, g: &DwtCoeffs, band: Band) -> Result<Array2<f64>> {
    idwt2(fb, &g.isolate(band))
}

/// `J_(xy) = dwt(e_xy)`, the analysis of a spatial unit matrix.
pub fn forward_basis_image(fb: &FilterBank, x: usize, y: usize, n: usize) -> Result<DwtCoeffs> {
    if x >= n || y >= n {
        return Err(invalid(format!("pixel ({x}, {y}) out of range for size {n}")));
    }
    let mut e = Array2::zeros((n, n));
    e[[x, y]] = 1.0;
    dwt2(fb, &e.view())
}

/// Representation over all `4·(N/2)²` wavelet basis images, summed term by term.
pub fn synthesize_from_basis(fb: &FilterBank, g: &DwtCoeffs) -> Result<Array2<f64>> {
    g.check()?;
    let half = g.half();
    let n = 2 * half;
    let mut out = Array2::zeros((n, n));
    for band in Band::ALL {
        for k in 0..half {
            for p in 0..half {
                let c = g.band(band)[[k, p]];
                if c != 0.0 {
                    out.scaled_add(c, &wavelet_basis_image(fb, band, k, p, n)?.pixels);
                }
            }
        }
    }
    Ok(out)
}
