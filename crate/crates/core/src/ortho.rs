//! Orthogonal matrices and one-dimensional orthogonal transforms.
//!
//! An [`OrthoMatrix`] `U` is the generator of every basis in this crate. Its
//! columns `u_k` are the basis vectors: the forward transform is `g = Uᵀ f`
//! and the inverse is `f = U g`, so `U e_k = u_k` scatters a single unit
//! sample over a whole column.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayBase, ArrayView1, ArrayView2, Data, Dimension};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{dim, invalid, Error, Result};

/// Per-entry tolerance for `UUᵀ = I` and `UᵀU = I`.
pub const ORTHO_TOL: f64 = 1e-12;

/// A real square matrix with orthonormal rows and columns.
///
/// Cloning is cheap; the entries are shared.
#[derive(Clone)]
pub struct OrthoMatrix {
    entries: Arc<Array2<f64>>,
}

impl OrthoMatrix {
    /// Wraps `entries` after checking orthogonality to [`ORTHO_TOL`].
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c || r == 0 {
            return Err(dim(format!("orthogonal matrix must be square and non-empty, got {r}x{c}")));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let dev = orthogonality_deviation(&entries.view());
        if dev >= ORTHO_TOL {
            return Err(Error::NotOrthogonal(dev));
        }
        Ok(Self { entries: Arc::new(entries) })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("order must be at least 1"));
        }
        Ok(Self { entries: Arc::new(Array2::eye(n)) })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[[row, col]]
    }

    /// Column `k`, the `k`-th basis vector.
    pub fn column(&self, k: usize) -> ArrayView1<'_, f64> {
        self.entries.column(k)
    }

    /// `Uᵀ`, itself orthogonal. Basis images built from it are the duals `d_xy`.
    pub fn transpose(&self) -> OrthoMatrix {
        Self { entries: Arc::new(self.entries.t().to_owned()) }
    }

    /// Max per-entry deviation of `UUᵀ` and `UᵀU` from the identity.
    pub fn deviation(&self) -> f64 {
        orthogonality_deviation(&self.entries.view())
    }
}

impl PartialEq for OrthoMatrix {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.entries, &other.entries) || self.entries == other.entries
    }
}

impl fmt::Debug for OrthoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrthoMatrix").field("n", &self.n()).field("entries", &self.entries).finish()
    }
}

/// Max per-entry deviation of `MMᵀ` and `MᵀM` from the identity.
pub fn orthogonality_deviation(m: &ArrayView2<'_, f64>) -> f64 {
    let n = m.nrows();
    let eye = Array2::<f64>::eye(n);
    let a = m.dot(&m.t());
    let b = m.t().dot(m);
    a.iter()
        .zip(b.iter())
        .zip(eye.iter())
        .map(|((x, y), e)| (x - e).abs().max((y - e).abs()))
        .fold(0.0, f64::max)
}

/// Normalized Walsh–Hadamard matrix of order `2^m` (Sylvester ordering).
///
/// The ±1 pattern is built by the recursion `H₂ₙ = [[Hₙ, Hₙ], [Hₙ, −Hₙ]]` and
/// scaled once by `1/√N`, which keeps entries exact for even powers.
pub fn make_wht(order: usize) -> Result<OrthoMatrix> {
    if order < 2 || !order.is_power_of_two() {
        return Err(invalid(format!("WHT order must be a power of two >= 2, got {order}")));
    }
    let mut signs = Array2::<f64>::ones((1, 1));
    while signs.nrows() < order {
        let h = signs.nrows();
        let mut next = Array2::<f64>::zeros((2 * h, 2 * h));
        for ((i, j), &v) in signs.indexed_iter() {
            next[[i, j]] = v;
            next[[i, j + h]] = v;
            next[[i + h, j]] = v;
            next[[i + h, j + h]] = -v;
        }
        signs = next;
    }
    let scale = 1.0 / (order as f64).sqrt();
    OrthoMatrix::new(signs.mapv(|v| v * scale))
}

/// Orthonormal DCT-II basis.
///
/// Column `k` holds the `k`-th cosine vector, `U[n][k] = c_k·cos(π(2n+1)k/2N)`
/// with `c_0 = 1/√N` and `c_k = √(2/N)`. The forward transform `Uᵀ f` is
/// therefore the usual DCT-II and the basis images are the textbook ones.
pub fn make_dct(order: usize) -> Result<OrthoMatrix> {
    if order == 0 {
        return Err(invalid("DCT order must be at least 1"));
    }
    let n = order as f64;
    let entries = Array2::from_shape_fn((order, order), |(i, k)| {
        if k == 0 {
            1.0 / n.sqrt()
        } else {
            (2.0 / n).sqrt()
                * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * n)).cos()
        }
    });
    OrthoMatrix::new(entries)
}

/// Orthonormal DST-I matrix, `√(2/(N+1))·sin(π(k+1)(n+1)/(N+1))`. Symmetric.
pub fn make_dst(order: usize) -> Result<OrthoMatrix> {
    if order == 0 {
        return Err(invalid("DST order must be at least 1"));
    }
    let np1 = (order + 1) as f64;
    let scale = (2.0 / np1).sqrt();
    let entries = Array2::from_shape_fn((order, order), |(k, i)| {
        scale * (std::f64::consts::PI * ((k + 1) * (i + 1)) as f64 / np1).sin()
    });
    OrthoMatrix::new(entries)
}

/// Seeded random orthogonal matrix.
///
/// A ChaCha8-seeded Gaussian matrix is orthonormalized by Householder QR and
/// each column is flipped so that its first nonzero entry is positive.
pub fn make_random_orthogonal(order: usize, seed: u64) -> Result<OrthoMatrix> {
    if order == 0 {
        return Err(invalid("order must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = nalgebra::DMatrix::<f64>::from_fn(order, order, |_, _| StandardNormal.sample(&mut rng));
    let q = raw.qr().q();
    let mut entries = Array2::from_shape_fn((order, order), |(i, j)| q[(i, j)]);
    for mut col in entries.columns_mut() {
        let lead = col.iter().copied().find(|v| *v != 0.0).unwrap_or(1.0);
        if lead < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
    OrthoMatrix::new(entries)
}

/// `g = Uᵀ f`.
pub fn forward_1d(u: &OrthoMatrix, f: &ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    if f.len() != u.n() {
        return Err(dim(format!("vector length {} does not match order {}", f.len(), u.n())));
    }
    Ok(u.entries().t().dot(f))
}

/// `f = U g`.
pub fn inverse_1d(u: &OrthoMatrix, g: &ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    if g.len() != u.n() {
        return Err(dim(format!("vector length {} does not match order {}", g.len(), u.n())));
    }
    Ok(u.entries().dot(g))
}

/// Sum of squared entries.
pub fn energy<S, D>(x: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    x.iter().map(|v| v * v).sum()
}

/// The named families of generators shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Identity,
    Wht,
    Dct,
    Dst,
    Random,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Identity,
        GeneratorKind::Wht,
        GeneratorKind::Dct,
        GeneratorKind::Dst,
        GeneratorKind::Random,
    ];

    /// Builds the order-`n` generator. `seed` is only read by `Random`.
    pub fn build(self, n: usize, seed: u64) -> Result<OrthoMatrix> {
        match self {
            GeneratorKind::Identity => OrthoMatrix::identity(n),
            GeneratorKind::Wht => make_wht(n),
            GeneratorKind::Dct => make_dct(n),
            GeneratorKind::Dst => make_dst(n),
            GeneratorKind::Random => make_random_orthogonal(n, seed),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Identity => "identity",
            GeneratorKind::Wht => "wht",
            GeneratorKind::Dct => "dct",
            GeneratorKind::Dst => "dst",
            GeneratorKind::Random => "random",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown generator '{s}' (expected identity|wht|dct|dst|random)")))
    }
}
