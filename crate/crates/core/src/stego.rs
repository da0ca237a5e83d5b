//! Non-separable block representation and frequency-domain message embedding.
//!
//! With separable spatial components `f_k = 1 ⊗ ψ_k`, the block transform
//! gives frequency components `g_p = Σ_k a_kp ⊗ ψ_k`. These are sums of tensor
//! products, hence non-separable, and every single one of them still carries
//! every `ψ_k`: `⟨a_kp, g_p⟩ = ψ_k` for any `p`.
//!
//! The two-component (`N = 2`) embedding replaces the `ψ_k` with four
//! messages, two per frequency component:
//!
//! ```text
//! g_1M = a_11 ⊗ M_1 + a_21 ⊗ M_2      f_1M = a_11 ⊗ M_1 + a_22 ⊗ M_3
//! g_2M = a_12 ⊗ M_3 + a_22 ⊗ M_4      f_2M = a_11 ⊗ M_2 + a_22 ⊗ M_4
//! ```
//!
//! and either spatial component alone yields two messages by inner products
//! with `a_11` and `a_22`.

use ndarray::{s, Array2, Array4, ArrayView2, Ix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{basis_image, ImageMatrix};
use crate::error::{dim, invalid, Result};
use crate::ortho::{GeneratorKind, OrthoMatrix};
use crate::par;

/// A message payload. Binary payloads hold `±strength`.
pub type MessageMatrix = Array2<f64>;

/// Gray level added to every sample when a tensor block is flattened to an image.
pub const IMAGE_OFFSET: f64 = 128.0;

/// Default antipodal amplitude in gray levels.
pub const DEFAULT_STRENGTH: f64 = 16.0;

/// 4D array indexed `(x, y, α, β)`: `(x, y)` in basis-image space,
/// `(α, β)` in message space.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorBlock {
    data: Array4<f64>,
}

impl TensorBlock {
    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        Self { data: Array4::zeros((n, n, rows, cols)) }
    }

    pub fn from_array(data: Array4<f64>) -> Result<Self> {
        let (a, b, _, _) = data.dim();
        if a != b {
            return Err(dim(format!("basis-image axes must match, got {a} and {b}")));
        }
        Ok(Self { data })
    }

    /// `a ⊗ ψ`.
    pub fn outer(a: &ArrayView2<'_, f64>, psi: &ArrayView2<'_, f64>) -> Self {
        let mut t = Self::zeros(a.nrows(), psi.nrows(), psi.ncols());
        t.add_outer(1.0, a, psi);
        t
    }

    fn add_outer(&mut self, scale: f64, a: &ArrayView2<'_, f64>, psi: &ArrayView2<'_, f64>) {
        for ((x, y), &w) in a.indexed_iter() {
            if w != 0.0 {
                self.data.slice_mut(s![x, y, .., ..]).scaled_add(scale * w, psi);
            }
        }
    }

    /// Order of the basis-image axes.
    pub fn n(&self) -> usize {
        self.data.dim().0
    }

    /// Shape of the message axes.
    pub fn message_shape(&self) -> (usize, usize) {
        let (_, _, r, c) = self.data.dim();
        (r, c)
    }

    pub fn data(&self) -> &Array4<f64> {
        &self.data
    }

    /// The `(x, y)` slice, a message-space matrix.
    pub fn slice(&self, x: usize, y: usize) -> ArrayView2<'_, f64> {
        self.data.slice(s![x, y, .., ..])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &TensorBlock) -> f64 {
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `(x·N + y) × (α·C + β)` unfolding.
    pub fn unfold(&self) -> Array2<f64> {
        let n = self.n();
        let (r, c) = self.message_shape();
        self.data
            .as_standard_layout()
            .into_owned()
            .into_shape_with_order((n * n, r * c))
            .expect("contiguous")
    }

    /// `1 ⊗ ψ`, i.e. `δ_xy ψ(α, β)`.
    pub fn identity_outer(n: usize, psi: &ArrayView2<'_, f64>) -> Self {
        Self::outer(&Array2::<f64>::eye(n).view(), psi)
    }
}

fn check_messages(psis: &[MessageMatrix]) -> Result<(usize, usize)> {
    let first = psis.first().ok_or_else(|| invalid("need at least one message matrix"))?;
    let shape = first.dim();
    if shape.0 == 0 || shape.1 == 0 || psis.iter().any(|m| m.dim() != shape) {
        return Err(dim("message matrices must share one non-empty shape"));
    }
    Ok(shape)
}

fn basis_pixels(u: &OrthoMatrix, k: usize, p: usize) -> Array2<f64> {
    basis_image(u, k, p).expect("index in range").into_pixels()
}

/// `g_p = Σ_k a_kp ⊗ ψ_k` for every `p`.
pub fn mix(u: &OrthoMatrix, psis: &[MessageMatrix]) -> Result<Vec<TensorBlock>> {
    let n = u.n();
    if psis.len() != n {
        return Err(dim(format!("need {n} matrices for a generator of order {n}, got {}", psis.len())));
    }
    let (r, c) = check_messages(psis)?;
    Ok(par::map_range(n, |p| {
        let mut g = TensorBlock::zeros(n, r, c);
        for (k, psi) in psis.iter().enumerate() {
            g.add_outer(1.0, &basis_pixels(u, k, p).view(), &psi.view());
        }
        g
    }))
}

/// Inverse block relation `f_k = Σ_p (a_pk ⊗ 1) g_p`, the product acting on
/// the basis-image axes.
///
/// On a [`mix`] output this returns `1 ⊗ ψ_k`.
pub fn unmix(u: &OrthoMatrix, gs: &[TensorBlock]) -> Result<Vec<TensorBlock>> {
    let n = u.n();
    if gs.len() != n || gs.iter().any(|g| g.n() != n) {
        return Err(dim(format!("need {n} tensor blocks of order {n}")));
    }
    let (r, c) = gs[0].message_shape();
    if gs.iter().any(|g| g.message_shape() != (r, c)) {
        return Err(dim("tensor blocks must share one message shape"));
    }
    // g_p as an N × (N·R·C) matrix, x major
    let flat: Vec<Array2<f64>> = gs
        .iter()
        .map(|g| {
            g.data
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((n, n * r * c))
                .expect("contiguous")
        })
        .collect();
    Ok(par::map_range(n, |k| {
        let mut acc = Array2::<f64>::zeros((n, n * r * c));
        for (p, gp) in flat.iter().enumerate() {
            ndarray::linalg::general_mat_mul(1.0, &basis_pixels(u, p, k), gp, 1.0, &mut acc);
        }
        TensorBlock { data: acc.into_shape_with_order((n, n, r, c)).expect("same size") }
    }))
}

/// `⟨a_kp, g⟩ = Σ_xy a_kp(x, y) g(x, y, ·, ·)`.
///
/// For `g = g_p` from [`mix`] this is `ψ_k`, whichever `p` is used.
pub fn extract(u: &OrthoMatrix, g: &TensorBlock, k: usize, p: usize) -> Result<MessageMatrix> {
    let n = u.n();
    if g.n() != n {
        return Err(dim(format!("tensor block order {} does not match generator order {n}", g.n())));
    }
    if k >= n || p >= n {
        return Err(invalid(format!("basis index ({k}, {p}) out of range for order {n}")));
    }
    Ok(contract(&basis_pixels(u, k, p).view(), g))
}

fn contract(a: &ArrayView2<'_, f64>, g: &TensorBlock) -> MessageMatrix {
    let (r, c) = g.message_shape();
    let weights = a.as_standard_layout().into_owned().into_shape_with_order(a.len()).expect("contiguous");
    weights
        .dot(&g.unfold())
        .into_shape_with_order((r, c))
        .expect("r*c entries")
        .into_dimensionality::<Ix2>()
        .expect("2d")
}

fn require_pair(u: &OrthoMatrix) -> Result<()> {
    if u.n() != 2 {
        return Err(invalid(format!("the two-component scheme needs a 2x2 generator, got order {}", u.n())));
    }
    Ok(())
}

/// Embeds `g2M` into the second frequency component of the block vector
/// `(f1, f2)` and returns the modified spatial items
/// `f1M = a_11 f1 + a_21 g2M`, `f2M = a_11 f2 + a_22 g2M`.
///
/// `a_11 f_k` equals `a_1k g_1`, so these are the spatial items of
/// `(g_1, g2M)`.
pub fn standard_embed(
    u: &OrthoMatrix,
    f1: &ArrayView2<'_, f64>,
    f2: &ArrayView2<'_, f64>,
    g2m: &ArrayView2<'_, f64>,
) -> Result<(ImageMatrix, ImageMatrix)> {
    require_pair(u)?;
    let shape = f1.dim();
    if shape.0 != 2 || shape.1 == 0 || f2.dim() != shape || g2m.dim() != shape {
        return Err(dim("components must all be 2xQ with Q >= 1"));
    }
    let a11 = basis_pixels(u, 0, 0);
    let a21 = basis_pixels(u, 1, 0);
    let a22 = basis_pixels(u, 1, 1);
    let f1m = a11.dot(f1) + a21.dot(g2m);
    let f2m = a11.dot(f2) + a22.dot(g2m);
    Ok((f1m, f2m))
}

/// `g2M = a_12 f1M + a_22 f2M`; needs both spatial items.
pub fn standard_detect(u: &OrthoMatrix, f1m: &ArrayView2<'_, f64>, f2m: &ArrayView2<'_, f64>) -> Result<ImageMatrix> {
    require_pair(u)?;
    if f1m.nrows() != 2 || f1m.dim() != f2m.dim() {
        return Err(dim("components must both be 2xQ"));
    }
    Ok(basis_pixels(u, 0, 1).dot(f1m) + basis_pixels(u, 1, 1).dot(f2m))
}

/// Frequency components `(g_1M, g_2M)` carrying four messages.
pub fn embed4_frequency(u: &OrthoMatrix, messages: &[MessageMatrix; 4]) -> Result<[TensorBlock; 2]> {
    require_pair(u)?;
    check_messages(messages)?;
    let [m1, m2, m3, m4] = messages;
    let a = |k, p| basis_pixels(u, k, p);
    let mut g1 = TensorBlock::outer(&a(0, 0).view(), &m1.view());
    g1.add_outer(1.0, &a(1, 0).view(), &m2.view());
    let mut g2 = TensorBlock::outer(&a(0, 1).view(), &m3.view());
    g2.add_outer(1.0, &a(1, 1).view(), &m4.view());
    Ok([g1, g2])
}

/// Spatial components `(f_1M, f_2M)` carrying `M1..M4`.
///
/// Built by embedding in the frequency domain and mapping back with the
/// block relation.
pub fn embed4(u: &OrthoMatrix, messages: &[MessageMatrix; 4]) -> Result<(TensorBlock, TensorBlock)> {
    let g = embed4_frequency(u, messages)?;
    let mut f = unmix(u, &g)?;
    let f2 = f.pop().expect("two components");
    let f1 = f.pop().expect("two components");
    Ok((f1, f2))
}

/// Recovers two messages from one spatial component: `(⟨a_11, fM⟩, ⟨a_22, fM⟩)`.
///
/// Component 1 yields `(M1, M3)`, component 2 yields `(M2, M4)`. Degraded
/// input gives degraded messages; nothing is flagged.
pub fn detect4(u: &OrthoMatrix, fm: &TensorBlock, which: usize) -> Result<(MessageMatrix, MessageMatrix)> {
    require_pair(u)?;
    if which != 1 && which != 2 {
        return Err(invalid(format!("component must be 1 or 2, got {which}")));
    }
    if fm.n() != 2 {
        return Err(dim("spatial component must have 2x2 basis-image axes"));
    }
    let pair = par::map_range(2, |i| contract(&basis_pixels(u, i, i).view(), fm));
    let mut it = pair.into_iter();
    Ok((it.next().expect("two"), it.next().expect("two")))
}

/// `σ₂/σ₁` of the `(xy) × (αβ)` unfolding; 0 for a single tensor product.
pub fn separability_index(g: &TensorBlock) -> f64 {
    let m = g.unfold();
    let (rows, cols) = m.dim();
    if rows.min(cols) < 2 {
        return 0.0;
    }
    let mat = nalgebra::DMatrix::from_fn(rows, cols, |i, j| m[[i, j]]);
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv[0] <= f64::MIN_POSITIVE {
        return 0.0;
    }
    sv[1] / sv[0]
}

/// Bits `{0, 1}` to `{−s, +s}`.
pub fn encode_bits(bits: &Array2<u8>, strength: f64) -> MessageMatrix {
    bits.mapv(|b| if b != 0 { strength } else { -strength })
}

/// Sign decision at 0: positive values are 1.
pub fn decode_bits(m: &ArrayView2<'_, f64>) -> Array2<u8> {
    m.mapv(|v| u8::from(v > 0.0))
}

/// Fraction of differing bits; shapes must match.
pub fn bit_error_rate(sent: &Array2<u8>, received: &Array2<u8>) -> Result<f64> {
    if sent.dim() != received.dim() {
        return Err(dim("bit matrices differ in shape"));
    }
    if sent.is_empty() {
        return Ok(0.0);
    }
    let errors = sent.iter().zip(received.iter()).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / sent.len() as f64)
}

pub fn random_bits<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<u8> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(0..=1u8))
}

/// `N·R × N·C` image of `R×C` tiles; tile `(x, y)` is the slice `(x, y)`
/// plus [`IMAGE_OFFSET`].
pub fn flatten(t: &TensorBlock) -> ImageMatrix {
    let n = t.n();
    let (r, c) = t.message_shape();
    Array2::from_shape_fn((n * r, n * c), |(i, j)| t.data[[i / r, j / c, i % r, j % c]] + IMAGE_OFFSET)
}

/// Inverse of [`flatten`] for a known order `n`.
pub fn unflatten(img: &ArrayView2<'_, f64>, n: usize) -> Result<TensorBlock> {
    let (h, w) = img.dim();
    if n == 0 || h % n != 0 || w % n != 0 || h == 0 || w == 0 {
        return Err(dim(format!("{h}x{w} image does not tile into {n}x{n} blocks")));
    }
    let (r, c) = (h / n, w / n);
    let data = Array4::from_shape_fn((n, n, r, c), |(x, y, a, b)| img[[x * r + a, y * c + b]] - IMAGE_OFFSET);
    Ok(TensorBlock { data })
}

/// The secret parameter set shared by embedder and detector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StegoKey {
    pub generator: GeneratorKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    pub p: usize,
    #[serde(default = "default_strength")]
    pub strength: f64,
}

fn default_strength() -> f64 {
    DEFAULT_STRENGTH
}

impl StegoKey {
    pub fn new(generator: GeneratorKind, seed: u64, p: usize, strength: f64) -> Self {
        Self { generator, n: 2, seed, p, strength }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 {
            return Err(invalid(format!("the four-message scheme needs n = 2, got {}", self.n)));
        }
        if self.p == 0 {
            return Err(invalid("message size p must be at least 1"));
        }
        if !(self.strength.is_finite() && self.strength > 0.0) {
            return Err(invalid(format!("strength must be positive, got {}", self.strength)));
        }
        Ok(())
    }

    pub fn generator(&self) -> Result<OrthoMatrix> {
        self.validate()?;
        self.generator.build(self.n, self.seed)
    }
}

/// Outcome of one embed → (quantize) → detect trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub clean_ber: f64,
    pub quantized_ber: f64,
}

/// Four random `p×p` bit messages, embedded with `key`, detected from each
/// spatial component both directly and after an 8-bit image round trip.
pub fn quantization_trial(key: &StegoKey, trial: u64) -> Result<TrialOutcome> {
    let u = key.generator()?;
    let mut rng = ChaCha8Rng::seed_from_u64(key.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial);
    let bits: Vec<Array2<u8>> = (0..4).map(|_| random_bits(key.p, key.p, &mut rng)).collect();
    let messages = [0, 1, 2, 3].map(|i| encode_bits(&bits[i], key.strength));
    let (f1, f2) = embed4(&u, &messages)?;

    let mut clean_errors = 0.0;
    let mut quant_errors = 0.0;
    for (which, fm, idx) in [(1, &f1, [0, 2]), (2, &f2, [1, 3])] {
        let (a, b) = detect4(&u, fm, which)?;
        clean_errors += bit_error_rate(&bits[idx[0]], &decode_bits(&a.view()))?;
        clean_errors += bit_error_rate(&bits[idx[1]], &decode_bits(&b.view()))?;

        let stored = crate::formats::to_gray8(&flatten(fm).view()).mapv(f64::from);
        let degraded = unflatten(&stored.view(), 2)?;
        let (a, b) = detect4(&u, &degraded, which)?;
        quant_errors += bit_error_rate(&bits[idx[0]], &decode_bits(&a.view()))?;
        quant_errors += bit_error_rate(&bits[idx[1]], &decode_bits(&b.view()))?;
    }
    Ok(TrialOutcome { trial, clean_ber: clean_errors / 4.0, quantized_ber: quant_errors / 4.0 })
}

/// Runs trials `0..trials` in parallel.
pub fn quantization_experiment(key: &StegoKey, trials: u64) -> Result<Vec<TrialOutcome>> {
    par::map_range(trials as usize, |t| quantization_trial(key, t as u64)).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::{make_dct, make_random_orthogonal, make_wht};
    use ndarray::arr2;

    fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        Array2::from_shape_fn((r, c), |_| rng.random_range(-1.0..1.0))
    }

    fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn unit(n: usize, a: usize, b: usize) -> Array2<f64> {
        let mut m = Array2::zeros((n, n));
        m[[a, b]] = 1.0;
        m
    }

    #[test]
    fn mix_with_one_message_is_separable() {
        let h = make_wht(2).unwrap();
        let psi1 = arr2(&[[1.0, 2.0], [3.0, 4.0]]);
        let g = mix(&h, &[psi1.clone(), Array2::zeros((2, 2))]).unwrap();
        for (p, gp) in g.iter().enumerate() {
            let expected = TensorBlock::outer(&basis_pixels(&h, 0, p).view(), &psi1.view());
            assert!(gp.max_abs_diff(&expected) < 1e-15);
            assert!(separability_index(gp) < 1e-12);
        }
    }

    #[test]
    fn mix_unit_messages_by_hand() {
        let h = make_wht(2).unwrap();
        let g = mix(&h, &[unit(2, 0, 0), unit(2, 1, 1)]).unwrap();
        let (a11, a21) = (basis_pixels(&h, 0, 0), basis_pixels(&h, 1, 0));
        for x in 0..2 {
            for y in 0..2 {
                for al in 0..2 {
                    for be in 0..2 {
                        let d = |i: usize, j: usize| if al == i && be == j { 1.0 } else { 0.0 };
                        let expected = a11[[x, y]] * d(0, 0) + a21[[x, y]] * d(1, 1);
                        assert!((g[0].data()[[x, y, al, be]] - expected).abs() < 1e-15);
                    }
                }
            }
        }
        // orthogonal equal-norm messages: two equal singular values
        assert!((separability_index(&g[0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unmix_recovers_identity_outer() {
        let u = make_dct(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psis: Vec<_> = (0..4).map(|_| random_matrix(3, 3, &mut rng)).collect();
        let g = mix(&u, &psis).unwrap();
        let f = unmix(&u, &g).unwrap();
        for (k, fk) in f.iter().enumerate() {
            assert!(fk.max_abs_diff(&TensorBlock::identity_outer(4, &psis[k].view())) < 1e-12);
        }
    }

    #[test]
    fn extraction_from_any_component() {
        let u = make_dct(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let psis: Vec<_> = (0..4).map(|_| random_matrix(8, 8, &mut rng)).collect();
        let g = mix(&u, &psis).unwrap();
        for (k, psi) in psis.iter().enumerate() {
            for (p, gp) in g.iter().enumerate() {
                assert!(max_diff(&extract(&u, gp, k, p).unwrap(), psi) < 1e-12);
            }
        }
        assert!(extract(&u, &g[0], 4, 0).is_err());
    }

    #[test]
    fn zero_message_extracts_to_zero() {
        let h = make_wht(2).unwrap();
        let g = mix(&h, &[arr2(&[[1.0]]), arr2(&[[0.0]])]).unwrap();
        assert!(extract(&h, &g[1], 1, 1).unwrap().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn mix_shape_errors() {
        let h = make_wht(2).unwrap();
        assert!(mix(&h, &[Array2::zeros((2, 2))]).is_err());
        assert!(mix(&h, &[Array2::zeros((2, 2)), Array2::zeros((3, 2))]).is_err());
    }

    #[test]
    fn standard_scheme() {
        let h = make_wht(2).unwrap();
        let f1 = arr2(&[[1.0, 0.0], [0.0, 0.0]]);
        let f2 = arr2(&[[0.0, 0.0], [0.0, 1.0]]);
        let (f1m, f2m) = standard_embed(&h, &f1.view(), &f2.view(), &Array2::zeros((2, 2)).view()).unwrap();
        let a11 = basis_pixels(&h, 0, 0);
        assert!(max_diff(&f1m, &a11.dot(&f1)) < 1e-15);
        assert!(max_diff(&f2m, &a11.dot(&f2)) < 1e-15);

        // unit inputs by hand: a_11 e_11 = ½[[1,0],[1,0]], a_21 e_22 = ½[[0,1],[0,-1]]
        let g2m = arr2(&[[0.0, 0.0], [0.0, 1.0]]);
        let (f1m, f2m) = standard_embed(&h, &f1.view(), &f2.view(), &g2m.view()).unwrap();
        assert!(max_diff(&f1m, &arr2(&[[0.5, 0.5], [0.5, -0.5]])) < 1e-15);
        // a_11 e_22 = ½[[0,1],[0,1]], a_22 e_22 = ½[[0,-1],[0,1]]
        assert!(max_diff(&f2m, &arr2(&[[0.0, 0.0], [0.0, 1.0]])) < 1e-15);
        let back = standard_detect(&h, &f1m.view(), &f2m.view()).unwrap();
        assert!(max_diff(&back, &g2m) < 1e-12);
        let zero = standard_detect(&h, &Array2::zeros((2, 3)).view(), &Array2::zeros((2, 3)).view()).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn standard_scheme_matches_block_relation() {
        let u = make_random_orthogonal(2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (f1, f2, g2m) =
            (random_matrix(2, 5, &mut rng), random_matrix(2, 5, &mut rng), random_matrix(2, 5, &mut rng));
        let (f1m, f2m) = standard_embed(&u, &f1.view(), &f2.view(), &g2m.view()).unwrap();
        // g_1 from the block transform, then f_kM = a_1k g_1 + a_2k g2M
        let g1 = basis_pixels(&u, 0, 0).dot(&f1) + basis_pixels(&u, 1, 0).dot(&f2);
        let e1 = basis_pixels(&u, 0, 0).dot(&g1) + basis_pixels(&u, 1, 0).dot(&g2m);
        let e2 = basis_pixels(&u, 0, 1).dot(&g1) + basis_pixels(&u, 1, 1).dot(&g2m);
        assert!(max_diff(&f1m, &e1) < 1e-12 && max_diff(&f2m, &e2) < 1e-12);
        assert!(max_diff(&standard_detect(&u, &f1m.view(), &f2m.view()).unwrap(), &g2m) < 1e-12);
    }

    #[test]
    fn standard_scheme_errors() {
        let u = make_dct(4).unwrap();
        let z = Array2::zeros((2, 2));
        assert!(standard_embed(&u, &z.view(), &z.view(), &z.view()).is_err());
        let h = make_wht(2).unwrap();
        let w = Array2::zeros((2, 3));
        assert!(standard_embed(&h, &z.view(), &w.view(), &z.view()).is_err());
        assert!(standard_detect(&h, &z.view(), &w.view()).is_err());
    }

    #[test]
    fn embed4_matches_spatial_display() {
        for u in [make_wht(2).unwrap(), make_random_orthogonal(2, 3).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let m: [Array2<f64>; 4] = std::array::from_fn(|_| random_matrix(8, 8, &mut rng));
            let (f1, f2) = embed4(&u, &m).unwrap();
            let a = |k, p| basis_pixels(&u, k, p);
            let mut e1 = TensorBlock::outer(&a(0, 0).view(), &m[0].view());
            e1.add_outer(1.0, &a(1, 1).view(), &m[2].view());
            let mut e2 = TensorBlock::outer(&a(0, 0).view(), &m[1].view());
            e2.add_outer(1.0, &a(1, 1).view(), &m[3].view());
            assert!(f1.max_abs_diff(&e1) < 1e-12);
            assert!(f2.max_abs_diff(&e2) < 1e-12);

            let (m1, m3) = detect4(&u, &f1, 1).unwrap();
            let (m2, m4) = detect4(&u, &f2, 2).unwrap();
            for (got, want) in [(&m1, &m[0]), (&m2, &m[1]), (&m3, &m[2]), (&m4, &m[3])] {
                assert!(max_diff(got, want) < 1e-12);
            }
        }
    }

    #[test]
    fn embed4_single_message() {
        let h = make_wht(2).unwrap();
        let z = Array2::zeros((2, 2));
        let (f1, f2) = embed4(&h, &[unit(2, 0, 0), z.clone(), z.clone(), z.clone()]).unwrap();
        assert!(f1.max_abs_diff(&TensorBlock::outer(&basis_pixels(&h, 0, 0).view(), &unit(2, 0, 0).view())) < 1e-15);
        assert!(f2.max_abs() < 1e-15);

        let (f1, f2) = embed4(&h, &[z.clone(), z.clone(), z.clone(), z]).unwrap();
        assert_eq!(f1.max_abs(), 0.0);
        let (a, b) = detect4(&h, &f2, 2).unwrap();
        assert!(a.iter().chain(b.iter()).all(|v| *v == 0.0));
    }

    #[test]
    fn no_crosstalk_between_paired_messages() {
        let h = make_wht(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m1 = random_matrix(8, 8, &mut rng);
        let z = Array2::zeros((8, 8));
        let (f1, _) = embed4(&h, &[m1, z.clone(), z.clone(), z]).unwrap();
        let (_, m3) = detect4(&h, &f1, 1).unwrap();
        assert!(m3.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn detect4_rejects_bad_component() {
        let h = make_wht(2).unwrap();
        assert!(detect4(&h, &TensorBlock::zeros(2, 2, 2), 3).is_err());
        assert!(detect4(&make_dct(4).unwrap(), &TensorBlock::zeros(4, 2, 2), 1).is_err());
    }

    #[test]
    fn bits_round_trip_and_ber() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bits = random_bits(4, 4, &mut rng);
        let m = encode_bits(&bits, 16.0);
        assert!(m.iter().all(|v| v.abs() == 16.0));
        assert_eq!(decode_bits(&m.view()), bits);
        let mut flipped = bits.clone();
        flipped[[0, 0]] ^= 1;
        assert_eq!(bit_error_rate(&bits, &flipped).unwrap(), 1.0 / 16.0);
        assert!(bit_error_rate(&bits, &Array2::zeros((2, 2))).is_err());
    }

    #[test]
    fn flatten_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = TensorBlock::from_array(Array4::from_shape_fn((2, 2, 3, 3), |_| rng.random_range(-20.0..20.0))).unwrap();
        let img = flatten(&t);
        assert_eq!(img.dim(), (6, 6));
        assert!((img[[4, 1]] - (t.data()[[1, 0, 1, 1]] + IMAGE_OFFSET)).abs() < 1e-12);
        assert!(unflatten(&img.view(), 2).unwrap().max_abs_diff(&t) < 1e-12);
        assert!(unflatten(&img.view(), 4).is_err());
    }

    #[test]
    fn key_json() {
        let key: StegoKey =
            serde_json::from_str(r#"{"generator":"wht","n":2,"seed":0,"p":8,"strength":16.0}"#).unwrap();
        assert_eq!(key, StegoKey::new(GeneratorKind::Wht, 0, 8, 16.0));
        assert!(serde_json::from_str::<StegoKey>(r#"{"generator":"wht","n":2,"p":8,"extra":1}"#).is_err());
        let key: StegoKey = serde_json::from_str(r#"{"generator":"dct","n":2,"p":4}"#).unwrap();
        assert_eq!(key.strength, DEFAULT_STRENGTH);
        let bad = StegoKey { n: 4, ..key.clone() };
        assert!(bad.validate().is_err());
        let bad = StegoKey { strength: 0.0, ..key };
        assert!(bad.generator().is_err());
    }

    #[test]
    fn clean_trial_is_error_free() {
        let out = quantization_trial(&StegoKey::new(GeneratorKind::Wht, 0, 8, 16.0), 0).unwrap();
        assert_eq!(out.clean_ber, 0.0);
        assert_eq!(out.quantized_ber, 0.0);
    }
}
