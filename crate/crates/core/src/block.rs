//! The block matrix whose entries are basis images.
//!
//! `b_mn = a_nm` (note the swapped indices). It satisfies `bb = 1` at block
//! level, so `g = b f` and `f = b g` form a self-inverse transform of block
//! vectors. The untransposed arrangement `β_mn = a_mn` instead satisfies
//! `ββ = N β` and is kept as a counterexample.
//!
//! Blocks are generated on demand from the generator; nothing of size `N⁴`
//! is stored unless [`BlockMatrixB::dense`] is called.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::basis::basis_image;
use crate::error::{dim, invalid, Result};
use crate::ortho::OrthoMatrix;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrangement {
    /// `b_mn = a_nm`
    Transposed,
    /// `β_mn = a_mn`
    Direct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrixB {
    generator: OrthoMatrix,
    arrangement: Arrangement,
}

/// The block matrix `b` of `U`.
pub fn build_b(u: &OrthoMatrix) -> BlockMatrixB {
    BlockMatrixB { generator: u.clone(), arrangement: Arrangement::Transposed }
}

impl BlockMatrixB {
    /// The counterexample `β` with `β_mn = a_mn`.
    pub fn beta(u: &OrthoMatrix) -> Self {
        Self { generator: u.clone(), arrangement: Arrangement::Direct }
    }

    pub fn n(&self) -> usize {
        self.generator.n()
    }

    pub fn generator(&self) -> &OrthoMatrix {
        &self.generator
    }

    pub fn arrangement(&self) -> Arrangement {
        self.arrangement
    }

    /// Indices `(k, p)` of the basis image sitting at block `(m, n)`.
    fn source(&self, m: usize, n: usize) -> (usize, usize) {
        match self.arrangement {
            Arrangement::Transposed => (n, m),
            Arrangement::Direct => (m, n),
        }
    }

    /// Block `(m, n)` as an `N×N` matrix.
    pub fn entry(&self, m: usize, n: usize) -> Result<Array2<f64>> {
        let (k, p) = self.source(m, n);
        Ok(basis_image(&self.generator, k, p)?.into_pixels())
    }

    #[inline]
    fn entry_at(&self, m: usize, n: usize, x: usize, y: usize) -> f64 {
        let (k, p) = self.source(m, n);
        self.generator.get(x, k) * self.generator.get(y, p)
    }

    /// Dense `N²×N²` export; entry `(m·N + x, n·N + y)` is `b_mn(x, y)`.
    pub fn dense(&self) -> Array2<f64> {
        let n = self.n();
        Array2::from_shape_fn((n * n, n * n), |(r, c)| self.entry_at(r / n, c / n, r % n, c % n))
    }
}

/// An `N×N` grid of `N×N` matrices; the result of multiplying block matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    n: usize,
    blocks: Vec<Array2<f64>>,
}

impl BlockMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self, m: usize, n: usize) -> &Array2<f64> {
        &self.blocks[m * self.n + n]
    }

    /// Max per-entry deviation from the block identity `δ_mn · I`.
    pub fn identity_deviation(&self) -> f64 {
        let n = self.n;
        par::max_range(n * n, |idx| {
            let (m, c) = (idx / n, idx % n);
            self.blocks[idx]
                .indexed_iter()
                .map(|((x, y), v)| {
                    let target = if m == c && x == y { 1.0 } else { 0.0 };
                    (v - target).abs()
                })
                .fold(0.0, f64::max)
        })
    }

    /// Max per-entry deviation from `scale · other`.
    pub fn deviation_from(&self, other: &BlockMatrixB, scale: f64) -> f64 {
        let n = self.n;
        par::max_range(n * n, |idx| {
            let (m, c) = (idx / n, idx % n);
            self.blocks[idx]
                .indexed_iter()
                .map(|((x, y), v)| (v - scale * other.entry_at(m, c, x, y)).abs())
                .fold(0.0, f64::max)
        })
    }
}

/// `(b b')_mn = Σ_k b_mk · b'_kn` with matrix products between blocks.
pub fn block_mul(b1: &BlockMatrixB, b2: &BlockMatrixB) -> Result<BlockMatrix> {
    if b1.generator() != b2.generator() {
        return Err(invalid("block matrices come from different generators"));
    }
    let n = b1.n();
    // every block of b2 is reused N times
    let right: Vec<Array2<f64>> = par::map_range(n * n, |idx| b2.entry(idx / n, idx % n).expect("in range"));
    let blocks = par::map_range(n * n, |idx| {
        let (m, c) = (idx / n, idx % n);
        let mut acc = Array2::zeros((n, n));
        for k in 0..n {
            let left = b1.entry(m, k).expect("in range");
            ndarray::linalg::general_mat_mul(1.0, &left, &right[k * n + c], 1.0, &mut acc);
        }
        acc
    });
    Ok(BlockMatrix { n, blocks })
}

/// Gram matrix of the block rows, `G_mn = Σ_k b_mk · b_nk`.
///
/// Unlike `bb`, this pairs two rows; for `b` it equals `a_mn`, so the block
/// rows are not orthonormal among themselves.
pub fn block_row_gram(b: &BlockMatrixB) -> BlockMatrix {
    let n = b.n();
    let blocks = par::map_range(n * n, |idx| {
        let (m, c) = (idx / n, idx % n);
        let mut acc = Array2::zeros((n, n));
        for k in 0..n {
            acc += &b.entry(m, k).expect("in range").dot(&b.entry(c, k).expect("in range"));
        }
        acc
    });
    BlockMatrix { n, blocks }
}

/// `N` component matrices of one common shape `N×Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    components: Vec<Array2<f64>>,
}

impl BlockVector {
    pub fn new(components: Vec<Array2<f64>>) -> Result<Self> {
        let n = components.len();
        let Some(first) = components.first() else {
            return Err(invalid("block vector needs at least one component"));
        };
        let shape = first.dim();
        if shape.0 != n || shape.1 == 0 {
            return Err(dim(format!("components must be {n}xQ with Q >= 1, got {}x{}", shape.0, shape.1)));
        }
        if components.iter().any(|c| c.dim() != shape) {
            return Err(dim("all components must share one shape"));
        }
        Ok(Self { components })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn q(&self) -> usize {
        self.components[0].ncols()
    }

    pub fn component(&self, k: usize) -> &Array2<f64> {
        &self.components[k]
    }

    pub fn components(&self) -> &[Array2<f64>] {
        &self.components
    }

    pub fn max_abs_diff(&self, other: &BlockVector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// `g = b f`, i.e. `g_p = Σ_k b_pk f_k`; for `b` this is `Σ_k a_kp f_k`.
///
/// Applying it twice returns `f`.
pub fn block_apply(b: &BlockMatrixB, f: &BlockVector) -> Result<BlockVector> {
    let n = b.n();
    if f.n() != n {
        return Err(dim(format!("block vector has {} components, block matrix order is {n}", f.n())));
    }
    let components = par::map_range(n, |p| {
        let mut acc = Array2::zeros((n, f.q()));
        for (k, fk) in f.components().iter().enumerate() {
            let block = b.entry(p, k).expect("in range");
            ndarray::linalg::general_mat_mul(1.0, &block, fk, 1.0, &mut acc);
        }
        acc
    });
    BlockVector::new(components)
}

/// Primitive rows `r_kx`: row `x` of every block in block row `k`, laid end
/// to end. Row `k·N + x` of the result is `r_kx`, column `n·N + y` picks
/// `b_kn(x, y)`.
pub fn primitive_rows(b: &BlockMatrixB) -> Array2<f64> {
    b.dense()
}

fn check_flat(b: &BlockMatrixB, v: &ArrayView1<'_, f64>) -> Result<usize> {
    let n = b.n();
    if v.len() != n * n {
        return Err(dim(format!("flattened block vector must have {} entries, got {}", n * n, v.len())));
    }
    Ok(n)
}

/// Coefficients against the rows, `g_k(x) = ⟨r_kx, f⟩`.
///
/// `f` is a block vector with `Q = 1` flattened component-major:
/// entry `n·N + y` is `f_n(y)`. The result uses the same layout.
pub fn biorthogonal_coeffs(b: &BlockMatrixB, f: &ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    let n = check_flat(b, f)?;
    let coeffs = par::map_range(n * n, |row| {
        let (k, x) = (row / n, row % n);
        let mut s = 0.0;
        for m in 0..n {
            for y in 0..n {
                s += b.entry_at(k, m, x, y) * f[m * n + y];
            }
        }
        s
    });
    Ok(Array1::from(coeffs))
}

/// `f = Σ_k b_k g_k` over the block columns `b_k = (b_1k, …, b_Nk)`.
pub fn biorthogonal_synthesis(b: &BlockMatrixB, g: &ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    let n = check_flat(b, g)?;
    let mut f = Array1::zeros(n * n);
    for k in 0..n {
        let gk = g.slice(s![k * n..(k + 1) * n]);
        for m in 0..n {
            let block = b.entry(m, k)?;
            let contrib = block.dot(&gk);
            f.slice_mut(s![m * n..(m + 1) * n]).scaled_add(1.0, &contrib);
        }
    }
    Ok(f)
}

/// Max deviation of `M Mᵀ` from the identity; used for the primitive-row Gram check.
pub fn row_gram_deviation(m: &ArrayView2<'_, f64>) -> f64 {
    let g = m.dot(&m.t());
    g.indexed_iter()
        .map(|((i, j), v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::{make_dct, make_random_orthogonal, make_wht};
    use ndarray::arr2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_block_vector(n: usize, q: usize, seed: u64) -> BlockVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BlockVector::new((0..n).map(|_| Array2::from_shape_fn((n, q), |_| rng.random_range(-1.0..1.0))).collect())
            .unwrap()
    }

    fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_generator_entries_are_transposed_units() {
        let b = build_b(&OrthoMatrix::identity(3).unwrap());
        for m in 0..3 {
            for n in 0..3 {
                let mut e = Array2::zeros((3, 3));
                e[[n, m]] = 1.0;
                assert_eq!(b.entry(m, n).unwrap(), e);
            }
        }
    }

    #[test]
    fn wht2_entry_is_a21() {
        let b = build_b(&make_wht(2).unwrap());
        let expected = arr2(&[[0.5, 0.5], [-0.5, -0.5]]);
        assert!(max_diff(&b.entry(0, 1).unwrap(), &expected) < 1e-15);
    }

    #[test]
    fn wht2_bb_blocks_by_hand() {
        let b = build_b(&make_wht(2).unwrap());
        let bb = block_mul(&b, &b).unwrap();
        assert!(max_diff(bb.block(0, 0), &Array2::eye(2)) < 1e-15);
        assert!(bb.block(0, 1).iter().all(|v| v.abs() < 1e-15));
    }

    /// bb computed by scalar loops over the 4D array K_kpxy, independent of `block_mul`.
    fn bb_by_loops(u: &OrthoMatrix) -> f64 {
        let n = u.n();
        let a = |k: usize, p: usize, x: usize, y: usize| u.get(x, k) * u.get(y, p);
        let mut worst: f64 = 0.0;
        for m in 0..n {
            for c in 0..n {
                for x in 0..n {
                    for y in 0..n {
                        let mut s = 0.0;
                        for k in 0..n {
                            for z in 0..n {
                                // b_mk = a_km, b_kc = a_ck
                                s += a(k, m, x, z) * a(c, k, z, y);
                            }
                        }
                        let t = if m == c && x == y { 1.0 } else { 0.0 };
                        worst = worst.max((s - t).abs());
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn bb_is_identity_for_dct4() {
        let u = make_dct(4).unwrap();
        assert!(bb_by_loops(&u) < 1e-12);
        assert!(block_mul(&build_b(&u), &build_b(&u)).unwrap().identity_deviation() < 1e-12);
    }

    #[test]
    fn beta_squares_to_n_beta() {
        for u in [make_wht(2).unwrap(), make_dct(4).unwrap(), make_random_orthogonal(3, 8).unwrap()] {
            let beta = BlockMatrixB::beta(&u);
            let bb = block_mul(&beta, &beta).unwrap();
            assert!(bb.deviation_from(&beta, u.n() as f64) < 1e-12);
            assert!(bb.identity_deviation() > 0.1);
        }
    }

    #[test]
    fn mismatched_generators() {
        let b1 = build_b(&make_dct(4).unwrap());
        let b2 = build_b(&make_wht(4).unwrap());
        assert!(block_mul(&b1, &b2).is_err());
    }

    #[test]
    fn block_apply_examples() {
        let h = make_wht(2).unwrap();
        let b = build_b(&h);
        let f = BlockVector::new(vec![Array2::eye(2), Array2::zeros((2, 2))]).unwrap();
        let g = block_apply(&b, &f).unwrap();
        assert!(max_diff(g.component(0), basis_image(&h, 0, 0).unwrap().pixels()) < 1e-15);
        assert!(max_diff(g.component(1), basis_image(&h, 0, 1).unwrap().pixels()) < 1e-15);

        let id = build_b(&OrthoMatrix::identity(3).unwrap());
        let f = random_block_vector(3, 2, 1);
        let g = block_apply(&id, &f).unwrap();
        // row k of g_p is row p of f_k
        for p in 0..3 {
            for k in 0..3 {
                assert_eq!(g.component(p).row(k), f.component(k).row(p));
            }
        }
        assert_eq!(block_apply(&id, &g).unwrap(), f);
    }

    #[test]
    fn block_apply_is_an_involution() {
        let b = build_b(&make_dct(4).unwrap());
        let f = random_block_vector(4, 3, 5);
        let back = block_apply(&b, &block_apply(&b, &f).unwrap()).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-10);
    }

    #[test]
    fn block_vector_validation() {
        assert!(BlockVector::new(vec![]).is_err());
        assert!(BlockVector::new(vec![Array2::zeros((2, 0)), Array2::zeros((2, 0))]).is_err());
        assert!(BlockVector::new(vec![Array2::zeros((3, 1)), Array2::zeros((3, 1))]).is_err());
        assert!(BlockVector::new(vec![Array2::zeros((2, 1)), Array2::zeros((2, 2))]).is_err());
        let b = build_b(&make_dct(4).unwrap());
        assert!(block_apply(&b, &random_block_vector(2, 1, 0)).is_err());
    }

    #[test]
    fn biorthogonal_decomposition() {
        let id = build_b(&OrthoMatrix::identity(3).unwrap());
        let f = Array1::from_iter((0..9).map(|v| v as f64));
        let mut g = biorthogonal_coeffs(&id, &f.view()).unwrap().to_vec();
        let mut sorted = f.to_vec();
        g.sort_by(f64::total_cmp);
        sorted.sort_by(f64::total_cmp);
        assert_eq!(g, sorted);

        let b = build_b(&make_wht(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Array1::from_shape_fn(4, |_| rng.random_range(-1.0..1.0));
        let g = biorthogonal_coeffs(&b, &f.view()).unwrap();
        let back = biorthogonal_synthesis(&b, &g.view()).unwrap();
        assert!(back.iter().zip(f.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!(biorthogonal_coeffs(&b, &Array1::zeros(3).view()).is_err());
    }

    #[test]
    fn coefficients_agree_with_block_apply() {
        let u = make_random_orthogonal(3, 12);
        let b = build_b(&u.unwrap());
        let f = random_block_vector(3, 1, 4);
        let flat = Array1::from_iter(f.components().iter().flat_map(|c| c.iter().copied()));
        let g = biorthogonal_coeffs(&b, &flat.view()).unwrap();
        let g2 = block_apply(&b, &f).unwrap();
        let flat2 = Array1::from_iter(g2.components().iter().flat_map(|c| c.iter().copied()));
        assert!(g.iter().zip(flat2.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn primitive_rows_are_orthonormal() {
        let b = build_b(&make_dct(4).unwrap());
        assert!(row_gram_deviation(&primitive_rows(&b).view()) < 1e-12);
    }

    #[test]
    fn block_rows_are_not_orthonormal() {
        let u = make_wht(2).unwrap();
        let gram = block_row_gram(&build_b(&u));
        assert!(gram.identity_deviation() > 1e-6);
        // G_mn = a_mn
        assert!(gram.deviation_from(&BlockMatrixB::beta(&u), 1.0) < 1e-15);
    }

    #[test]
    fn dense_layout() {
        let u = make_dct(3).unwrap();
        let b = build_b(&u);
        let d = b.dense();
        for m in 0..3 {
            for n in 0..3 {
                let blk = b.entry(m, n).unwrap();
                assert_eq!(d.slice(s![m * 3..m * 3 + 3, n * 3..n * 3 + 3]), blk);
            }
        }
    }
}
