//! Basis images `a_kp = u_k ⊗ u_p` and the 2D transform as a decomposition
//! over them.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{dim, invalid, Result};
use crate::ortho::OrthoMatrix;
use crate::par;

/// A grayscale image in the float pipeline.
pub type ImageMatrix = Array2<f64>;

/// `a_kp(x, y) = U[x][k] · U[y][p]`, tagged with its generator.
#[derive(Clone, Debug)]
pub struct BasisImage {
    k: usize,
    p: usize,
    pixels: Array2<f64>,
    generator: OrthoMatrix,
}

impl BasisImage {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn pixels(&self) -> &Array2<f64> {
        &self.pixels
    }

    pub fn generator(&self) -> &OrthoMatrix {
        &self.generator
    }

    pub fn into_pixels(self) -> Array2<f64> {
        self.pixels
    }
}

/// The unit matrix `e_ab` of order `n`: a single 1 at `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitMatrix {
    n: usize,
    a: usize,
    b: usize,
}

impl UnitMatrix {
    pub fn new(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(invalid(format!("unit matrix index ({a}, {b}) out of range for order {n}")));
        }
        Ok(Self { n, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn position(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn to_matrix(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.n, self.n));
        m[[self.a, self.b]] = 1.0;
        m
    }
}

/// Builds `a_kp` straight from its definition.
pub fn basis_image(u: &OrthoMatrix, k: usize, p: usize) -> Result<BasisImage> {
    let n = u.n();
    if k >= n || p >= n {
        return Err(invalid(format!("basis index ({k}, {p}) out of range for order {n}")));
    }
    let pixels = Array2::from_shape_fn((n, n), |(x, y)| u.get(x, k) * u.get(y, p));
    Ok(BasisImage { k, p, pixels, generator: u.clone() })
}

/// Builds `a_ab = U e_ab Uᵀ` by transforming the unit matrix.
///
/// Pass `u.transpose()` to obtain the dual image `d_ab = Uᵀ e_ab U`.
pub fn basis_from_unit(u: &OrthoMatrix, e: &UnitMatrix) -> Result<BasisImage> {
    if e.n() != u.n() {
        return Err(dim(format!("unit matrix order {} does not match generator order {}", e.n(), u.n())));
    }
    let m = u.entries();
    let pixels = m.dot(&e.to_matrix()).dot(&m.t());
    let (k, p) = e.position();
    Ok(BasisImage { k, p, pixels, generator: u.clone() })
}

/// `G = Uᵀ F V` for an `M×N` image with `U` of order `M` and `V` of order `N`.
pub fn forward_2d(u: &OrthoMatrix, v: &OrthoMatrix, f: &ArrayView2<'_, f64>) -> Result<ImageMatrix> {
    check_shape(u, v, f)?;
    Ok(u.entries().t().dot(f).dot(&v.entries()))
}

/// `F = U G Vᵀ`.
pub fn inverse_2d(u: &OrthoMatrix, v: &OrthoMatrix, g: &ArrayView2<'_, f64>) -> Result<ImageMatrix> {
    check_shape(u, v, g)?;
    Ok(u.entries().dot(g).dot(&v.entries().t()))
}

fn check_shape(u: &OrthoMatrix, v: &OrthoMatrix, f: &ArrayView2<'_, f64>) -> Result<()> {
    let (m, n) = f.dim();
    if m != u.n() || n != v.n() {
        return Err(dim(format!("{m}x{n} image needs generators of order {m} and {n}, got {} and {}", u.n(), v.n())));
    }
    Ok(())
}

/// Frobenius inner product `⟨A, B⟩ = Σ A_xy B_xy`.
pub fn frobenius(a: &ArrayView2<'_, f64>, b: &ArrayView2<'_, f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |acc, x, y| acc + x * y)
}

/// Coefficients `G_kp = ⟨F, a_kp⟩` by explicit inner products with every basis image.
///
/// Deliberately does not use the separable shortcut, so it cross-checks
/// [`forward_2d`].
pub fn decompose(u: &OrthoMatrix, f: &ArrayView2<'_, f64>) -> Result<ImageMatrix> {
    let n = u.n();
    if f.dim() != (n, n) {
        return Err(dim(format!("decompose needs a {n}x{n} image, got {:?}", f.dim())));
    }
    let coeffs = par::map_range(n * n, |idx| {
        let (k, p) = (idx / n, idx % n);
        let mut s = 0.0;
        for x in 0..n {
            let ux = u.get(x, k);
            for y in 0..n {
                s += f[[x, y]] * ux * u.get(y, p);
            }
        }
        s
    });
    Ok(Array2::from_shape_vec((n, n), coeffs).expect("n*n coefficients"))
}

/// `F = Σ_kp a_kp G_kp`, summed image by image.
pub fn resynthesize(u: &OrthoMatrix, g: &ArrayView2<'_, f64>) -> Result<ImageMatrix> {
    let n = u.n();
    if g.dim() != (n, n) {
        return Err(dim(format!("resynthesize needs {n}x{n} coefficients, got {:?}", g.dim())));
    }
    let mut f = Array2::zeros((n, n));
    for k in 0..n {
        for p in 0..n {
            let c = g[[k, p]];
            if c == 0.0 {
                continue;
            }
            let a = basis_image(u, k, p)?;
            f.scaled_add(c, a.pixels());
        }
    }
    Ok(f)
}

/// Matrix product of two basis images of the same generator.
///
/// Equals `δ_pm · a_kn` for `a_kp · a_mn`.
pub fn product(a: &BasisImage, b: &BasisImage) -> Result<ImageMatrix> {
    if a.generator() != b.generator() {
        return Err(invalid("basis images come from different generators"));
    }
    Ok(a.pixels().dot(b.pixels()))
}

/// All `N²` basis images on an `N×N` grid of `N×N` tiles; tile `(k, p)` is
/// `a_kp` rescaled to `[0, 255]` on its own min/max.
pub fn atlas(u: &OrthoMatrix) -> ImageMatrix {
    let n = u.n();
    let tiles = par::map_range(n * n, |idx| {
        let a = basis_image(u, idx / n, idx % n).expect("index in range");
        rescale_tile(&a.pixels().view())
    });
    let mut out = Array2::zeros((n * n, n * n));
    for (idx, tile) in tiles.into_iter().enumerate() {
        let (k, p) = (idx / n, idx % n);
        out.slice_mut(ndarray::s![k * n..(k + 1) * n, p * n..(p + 1) * n]).assign(&tile);
    }
    out
}

/// Affine min/max map onto `[0, 255]`.
///
/// A constant tile maps to 255 if positive, 0 if negative and 128 if zero.
pub fn rescale_tile(tile: &ArrayView2<'_, f64>) -> Array2<f64> {
    let lo = tile.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
        let v = if lo > 0.0 {
            255.0
        } else if lo < 0.0 {
            0.0
        } else {
            128.0
        };
        return Array2::from_elem(tile.dim(), v);
    }
    tile.mapv(|v| 255.0 * (v - lo) / (hi - lo))
}
