//! Invariant suites, reported as max deviations against fixed tolerances.
//!
//! Each `*_deviation` function measures one identity over every index
//! combination (sampled for orders above [`EXHAUSTIVE_LIMIT`]) and returns
//! the largest absolute deviation. [`verify`] bundles them into a [`Report`].

use std::fmt;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{basis_from_unit, basis_image, decompose, forward_2d, frobenius, inverse_2d, product, resynthesize, UnitMatrix};
use crate::block::{
    biorthogonal_coeffs, biorthogonal_synthesis, block_apply, block_mul, block_row_gram, build_b, primitive_rows,
    row_gram_deviation, BlockMatrixB, BlockVector,
};
use crate::color::{color_basis_image, forward_3d, inverse_3d, Volume};
use crate::error::Result;
use crate::ortho::{energy, forward_1d, inverse_1d, make_random_orthogonal, GeneratorKind, OrthoMatrix};
use crate::par;
use crate::stego::{detect4, embed4, extract, mix, separability_index, standard_detect, standard_embed, unmix, TensorBlock};
use crate::wavelet::{dwt2, forward_basis_image, idwt2, synthesize_from_basis, wavelet_basis_image, Band, FilterBank};

pub const TOL_EXACT: f64 = 1e-12;
pub const TOL_ROUND_TRIP: f64 = 1e-10;

/// Orders up to this are checked over every index combination.
pub const EXHAUSTIVE_LIMIT: usize = 16;

const SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    /// value < threshold
    Below,
    /// value > threshold
    Above,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub expect: Expect,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, expect: Expect::Below }
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, expect: Expect::Above }
    }

    pub fn passed(&self) -> bool {
        match self.expect {
            Expect::Below => self.value < self.threshold,
            Expect::Above => self.value > self.threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let rel = match self.expect {
            Expect::Below => "<",
            Expect::Above => ">",
        };
        write!(f, "[{verdict}] {}: {:.3e} (want {rel} {:.0e})", self.name, self.value, self.threshold)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    /// Measurements that are reported but not asserted.
    pub notes: Vec<String>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for n in &self.notes {
            writeln!(f, "[NOTE] {n}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0))
}

/// Index tuples to sweep: all of `0..n^arity` when small, else a seeded sample.
fn sweep(n: usize, arity: u32, seed: u64) -> Vec<Vec<usize>> {
    let total = n.pow(arity);
    let decode = |mut idx: usize| {
        let mut t = vec![0; arity as usize];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    };
    if n <= EXHAUSTIVE_LIMIT && total <= 1 << 20 {
        (0..total).map(decode).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..SAMPLES).map(|_| decode(rng.random_range(0..total))).collect()
    }
}

// ---------------------------------------------------------------- 1D

/// `|E(f) − E(Uᵀf)| / max(1, E(f))` over `trials` seeded random vectors.
pub fn energy_deviation(u: &OrthoMatrix, trials: usize, seed: u64) -> f64 {
    let n = u.n();
    par::max_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
        let f = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
        let ef = energy(&f);
        let eg = energy(&forward_1d(u, &f.view()).expect("length matches"));
        (ef - eg).abs() / ef.max(1.0)
    })
}

/// Max `|U e_k − u_k|`; zero when scattering reproduces the stored columns exactly.
pub fn scattering_deviation(u: &OrthoMatrix) -> f64 {
    let n = u.n();
    par::max_range(n, |k| {
        let mut e = Array1::zeros(n);
        e[k] = 1.0;
        let col = inverse_1d(u, &e.view()).expect("length matches");
        col.iter().zip(u.column(k).iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    })
}

pub fn round_trip_1d_deviation(u: &OrthoMatrix, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Array1::from_shape_fn(u.n(), |_| rng.random_range(-1.0..1.0));
    let back = inverse_1d(u, &forward_1d(u, &f.view()).expect("len").view()).expect("len");
    back.iter().zip(f.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- basis images

/// `⟨a_kp, a_mn⟩ − δ_km δ_pn`.
pub fn basis_orthonormality_deviation(u: &OrthoMatrix) -> f64 {
    let n = u.n();
    let images: Vec<Array2<f64>> = (0..n * n).map(|i| basis_image(u, i / n, i % n).expect("in range").into_pixels()).collect();
    let pairs = sweep(n * n, 2, 1);
    par::max_range(pairs.len(), |i| {
        let (a, b) = (pairs[i][0], pairs[i][1]);
        let target = if a == b { 1.0 } else { 0.0 };
        (frobenius(&images[a].view(), &images[b].view()) - target).abs()
    })
}

/// `Σ_k a_kk = I` and `trace(a_kp) = δ_kp`.
pub fn trace_deviation(u: &OrthoMatrix) -> f64 {
    let n = u.n();
    let mut sum = Array2::<f64>::zeros((n, n));
    for k in 0..n {
        sum += basis_image(u, k, k).expect("in range").pixels();
    }
    let total = max_abs_diff(&sum, &Array2::eye(n));
    let traces = par::max_range(n * n, |i| {
        let (k, p) = (i / n, i % n);
        let a = basis_image(u, k, p).expect("in range");
        let tr: f64 = a.pixels().diag().sum();
        (tr - if k == p { 1.0 } else { 0.0 }).abs()
    });
    total.max(traces)
}

/// `a_kp · a_mn − δ_pm a_kn`.
pub fn product_deviation(u: &OrthoMatrix) -> f64 {
    let n = u.n();
    let images: Vec<_> = (0..n * n).map(|i| basis_image(u, i / n, i % n).expect("in range")).collect();
    let quads = sweep(n, 4, 2);
    par::max_range(quads.len(), |i| {
        let [k, p, m, c] = [quads[i][0], quads[i][1], quads[i][2], quads[i][3]];
        let prod = product(&images[k * n + p], &images[m * n + c]).expect("same generator");
        let expected = if p == m { images[k * n + c].pixels().clone() } else { Array2::zeros((n, n)) };
        max_abs_diff(&prod, &expected)
    })
}

/// `U e_kp Uᵀ − a_kp`.
pub fn generation_deviation(u: &OrthoMatrix) -> f64 {
    let n = u.n();
    par::max_range(n * n, |i| {
        let (k, p) = (i / n, i % n);
        let via_unit = basis_from_unit(u, &UnitMatrix::new(n, k, p).expect("in range")).expect("same order");
        max_abs_diff(via_unit.pixels(), basis_image(u, k, p).expect("in range").pixels())
    })
}

/// Largest 2×2 minor over every basis image (zero for rank one).
pub fn rank_one_deviation(u: &OrthoMatrix) -> f64 {
    let n = u.n();
    if n < 2 {
        return 0.0;
    }
    par::max_range(n * n, |i| {
        let a = basis_image(u, i / n, i % n).expect("in range").into_pixels();
        let a = a.as_standard_layout();
        let rows: Vec<&[f64]> = a.as_slice().expect("contiguous").chunks(n).collect();
        let mut worst: f64 = 0.0;
        for (r1, top) in rows.iter().enumerate() {
            for bottom in &rows[r1 + 1..] {
                for c1 in 0..n {
                    for c2 in c1 + 1..n {
                        let minor = top[c1] * bottom[c2] - top[c2] * bottom[c1];
                        worst = worst.max(minor.abs());
                    }
                }
            }
        }
        worst
    })
}

// ---------------------------------------------------------------- color

/// `⟨t_kps, t_mnq⟩ − δδδ` over all `3N²` color basis items.
pub fn color_orthonormality_deviation(u: &OrthoMatrix, w: &OrthoMatrix) -> f64 {
    let n = u.n();
    let items: Vec<_> = (0..3 * n * n)
        .map(|i| color_basis_image(u, w, i / (3 * n), (i / 3) % n, i % 3).expect("in range"))
        .collect();
    let pairs = sweep(items.len(), 2, 3);
    par::max_range(pairs.len(), |i| {
        let (a, b) = (&items[pairs[i][0]], &items[pairs[i][1]]);
        let ip: f64 = (0..3).map(|c| frobenius(&a.channels[c].view(), &b.channels[c].view())).sum();
        (ip - if pairs[i][0] == pairs[i][1] { 1.0 } else { 0.0 }).abs()
    })
}

// ---------------------------------------------------------------- block matrix

pub fn bb_deviation(u: &OrthoMatrix) -> f64 {
    let b = build_b(u);
    block_mul(&b, &b).expect("same generator").identity_deviation()
}

/// `ββ − Nβ`.
pub fn beta_deviation(u: &OrthoMatrix) -> f64 {
    let beta = BlockMatrixB::beta(u);
    block_mul(&beta, &beta).expect("same generator").deviation_from(&beta, u.n() as f64)
}

/// `ββ − 1`; large for `N > 1`.
pub fn beta_identity_deviation(u: &OrthoMatrix) -> f64 {
    let beta = BlockMatrixB::beta(u);
    block_mul(&beta, &beta).expect("same generator").identity_deviation()
}

/// `b(b f) − f` for a seeded random block vector with `q` columns.
pub fn involution_deviation(u: &OrthoMatrix, q: usize, seed: u64) -> f64 {
    let n = u.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = BlockVector::new((0..n).map(|_| random_matrix(n, q, &mut rng)).collect()).expect("valid shapes");
    let b = build_b(u);
    let g = block_apply(&b, &f).expect("valid shapes");
    block_apply(&b, &g).expect("valid shapes").max_abs_diff(&f)
}

pub fn biorthogonal_deviation(u: &OrthoMatrix, seed: u64) -> f64 {
    let n = u.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Array1::from_shape_fn(n * n, |_| rng.random_range(-1.0..1.0));
    let b = build_b(u);
    let g = biorthogonal_coeffs(&b, &f.view()).expect("length");
    let back = biorthogonal_synthesis(&b, &g.view()).expect("length");
    back.iter().zip(f.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- non-separable

fn random_psis(n: usize, p: usize, seed: u64) -> Vec<Array2<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_matrix(p, p, &mut rng)).collect()
}

/// `⟨a_kp, g_p⟩ − ψ_k` for every `(k, p)`.
pub fn extraction_deviation(u: &OrthoMatrix, p: usize, seed: u64) -> f64 {
    let n = u.n();
    let psis = random_psis(n, p, seed);
    let g = mix(u, &psis).expect("shapes");
    par::max_range(n * n, |i| {
        let (k, c) = (i / n, i % n);
        max_abs_diff(&extract(u, &g[c], k, c).expect("in range"), &psis[k])
    })
}

/// `Σ_p (a_pk ⊗ 1) g_p − 1 ⊗ ψ_k`.
pub fn completeness_deviation(u: &OrthoMatrix, p: usize, seed: u64) -> f64 {
    let n = u.n();
    let psis = random_psis(n, p, seed);
    let f = unmix(u, &mix(u, &psis).expect("shapes")).expect("shapes");
    f.iter()
        .zip(&psis)
        .map(|(fk, psi)| fk.max_abs_diff(&TensorBlock::identity_outer(n, &psi.view())))
        .fold(0.0, f64::max)
}

/// Smallest separability index over the components of a two-message mix
/// with orthogonal equal-norm messages.
pub fn two_message_separability(u: &OrthoMatrix) -> f64 {
    let n = u.n();
    let mut psis = vec![Array2::zeros((2, 2)); n];
    psis[0][[0, 0]] = 1.0;
    psis[1][[1, 1]] = 1.0;
    mix(u, &psis).expect("shapes").iter().map(separability_index).fold(f64::INFINITY, f64::min)
}

/// Clean four-message round trip and `M1 → M3` crosstalk (2×2 generators).
pub fn embed4_deviation(u: &OrthoMatrix, p: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m: [Array2<f64>; 4] = std::array::from_fn(|_| random_matrix(p, p, &mut rng));
    let (f1, f2) = embed4(u, &m).expect("2x2 generator");
    let (m1, m3) = detect4(u, &f1, 1).expect("valid");
    let (m2, m4) = detect4(u, &f2, 2).expect("valid");
    let round_trip = [(&m1, &m[0]), (&m2, &m[1]), (&m3, &m[2]), (&m4, &m[3])]
        .iter()
        .map(|(a, b)| max_abs_diff(a, b))
        .fold(0.0, f64::max);

    let z = Array2::zeros((p, p));
    let (f1, _) = embed4(u, &[m[0].clone(), z.clone(), z.clone(), z]).expect("2x2 generator");
    let (_, leak) = detect4(u, &f1, 1).expect("valid");
    let crosstalk = leak.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (round_trip, crosstalk)
}

pub fn standard_scheme_deviation(u: &OrthoMatrix, q: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f1, f2, g2m) = (random_matrix(2, q, &mut rng), random_matrix(2, q, &mut rng), random_matrix(2, q, &mut rng));
    let (f1m, f2m) = standard_embed(u, &f1.view(), &f2.view(), &g2m.view()).expect("2x2 generator");
    max_abs_diff(&standard_detect(u, &f1m.view(), &f2m.view()).expect("shapes"), &g2m)
}

// ---------------------------------------------------------------- wavelets

pub fn wavelet_round_trip_deviation(fb: &FilterBank, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Array2::from_shape_fn((n, n), |_| rng.random_range(0.0..255.0));
    let g = dwt2(fb, &f.view()).expect("even size");
    max_abs_diff(&idwt2(fb, &g).expect("valid blocks"), &f)
}

pub fn wavelet_energy_deviation(fb: &FilterBank, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Array2::from_shape_fn((n, n), |_| rng.random_range(0.0..255.0));
    let e = energy(&f);
    (dwt2(fb, &f.view()).expect("even size").energy() - e).abs() / e.max(1.0)
}

/// `⟨E_(kpX), E_(mnY)⟩ − δ_XY δ_km δ_pn` over the whole wavelet basis.
pub fn wavelet_basis_deviation(fb: &FilterBank, n: usize) -> f64 {
    let half = n / 2;
    let items: Vec<Array2<f64>> = Band::ALL
        .iter()
        .flat_map(|&b| (0..half * half).map(move |i| (b, i / half, i % half)))
        .map(|(b, k, p)| wavelet_basis_image(fb, b, k, p, n).expect("in range").pixels)
        .collect();
    let pairs = sweep(items.len(), 2, 4);
    par::max_range(pairs.len(), |i| {
        let (a, b) = (pairs[i][0], pairs[i][1]);
        (frobenius(&items[a].view(), &items[b].view()) - if a == b { 1.0 } else { 0.0 }).abs()
    })
}

/// `⟨J_(xy), J_(x'y')⟩ − δ δ` summed over blocks.
pub fn forward_basis_deviation(fb: &FilterBank, n: usize) -> f64 {
    let items: Vec<_> = (0..n * n).map(|i| forward_basis_image(fb, i / n, i % n, n).expect("in range")).collect();
    let pairs = sweep(items.len(), 2, 5);
    par::max_range(pairs.len(), |i| {
        let (a, b) = (pairs[i][0], pairs[i][1]);
        (items[a].inner(&items[b]) - if a == b { 1.0 } else { 0.0 }).abs()
    })
}

/// Sum of the four band reconstructions against the full synthesis.
pub fn band_additivity_deviation(fb: &FilterBank, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Array2::from_shape_fn((n, n), |_| rng.random_range(0.0..255.0));
    let g = dwt2(fb, &f.view()).expect("even size");
    let mut sum = Array2::zeros((n, n));
    for band in Band::ALL {
        sum += &crate::wavelet::band_reconstruction(fb, &g, band).expect("valid");
    }
    max_abs_diff(&sum, &idwt2(fb, &g).expect("valid"))
}

pub fn wavelet_completeness_deviation(fb: &FilterBank, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Array2::from_shape_fn((n, n), |_| rng.random_range(0.0..255.0));
    let g = dwt2(fb, &f.view()).expect("even size");
    max_abs_diff(&synthesize_from_basis(fb, &g).expect("valid"), &f)
}

// ---------------------------------------------------------------- suites

/// Every generator-level invariant for `u`.
pub fn generator_report(u: &OrthoMatrix, seed: u64) -> Report {
    let n = u.n();
    let mut r = Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    r.push(Check::below("orthogonality UU^T = U^T U = I", u.deviation(), TOL_EXACT));
    r.push(Check::below("scattering U e_k = u_k (exact)", scattering_deviation(u), f64::MIN_POSITIVE));
    r.push(Check::below("energy preservation, 1000 vectors", energy_deviation(u, 1000, seed), TOL_EXACT));
    r.push(Check::below("1D round trip", round_trip_1d_deviation(u, seed), TOL_EXACT));

    r.push(Check::below("basis image orthonormality", basis_orthonormality_deviation(u), TOL_EXACT));
    r.push(Check::below("trace identities", trace_deviation(u), TOL_EXACT));
    if n <= 8 {
        r.push(Check::below("product identity a_kp a_mn = d_pm a_kn", product_deviation(u), TOL_EXACT));
    }
    r.push(Check::below("generation U e_kp U^T = a_kp", generation_deviation(u), TOL_EXACT));
    r.push(Check::below("basis images have rank one", rank_one_deviation(u), TOL_EXACT));

    let f = random_matrix(n, n, &mut rng);
    let g = forward_2d(u, u, &f.view()).expect("square");
    r.push(Check::below(
        "decompose = forward_2d",
        max_abs_diff(&decompose(u, &f.view()).expect("square"), &g),
        TOL_EXACT,
    ));
    r.push(Check::below(
        "resynthesis from basis images",
        max_abs_diff(&resynthesize(u, &g.view()).expect("square"), &f),
        TOL_ROUND_TRIP,
    ));
    r.push(Check::below(
        "2D round trip",
        max_abs_diff(&inverse_2d(u, u, &g.view()).expect("square"), &f),
        TOL_ROUND_TRIP,
    ));
    r.push(Check::below("2D energy preservation", (energy(&g) - energy(&f)).abs() / energy(&f).max(1.0), TOL_EXACT));

    let w = make_random_orthogonal(3, seed.wrapping_add(1)).expect("order 3");
    let t = Volume::from_fn(n, n, 3, |_, _, _| rng.random_range(-1.0..1.0));
    let tau = forward_3d(u, u, &w, &t).expect("dims");
    r.push(Check::below("3D energy preservation", (tau.energy() - t.energy()).abs() / t.energy().max(1.0), TOL_EXACT));
    r.push(Check::below(
        "3D round trip",
        inverse_3d(u, u, &w, &tau).expect("dims").max_abs_diff(&t),
        TOL_ROUND_TRIP,
    ));
    if n <= 8 {
        r.push(Check::below("color basis orthonormality", color_orthonormality_deviation(u, &w), TOL_EXACT));
    }

    r.push(Check::below("bb = 1", bb_deviation(u), TOL_EXACT));
    r.push(Check::below("beta beta = N beta", beta_deviation(u), TOL_EXACT));
    if n > 1 {
        r.push(Check::above("beta beta = 1 fails (expected)", beta_identity_deviation(u), 1e-6));
        r.push(Check::above(
            "block rows not mutually orthonormal (expected)",
            block_row_gram(&build_b(u)).identity_deviation(),
            1e-6,
        ));
    }
    for q in [1, 3] {
        r.push(Check::below(format!("block involution b(bf) = f, Q={q}"), involution_deviation(u, q, seed), TOL_ROUND_TRIP));
    }
    r.push(Check::below("biorthogonal reconstruction", biorthogonal_deviation(u, seed), TOL_ROUND_TRIP));
    r.push(Check::below("primitive rows r_kx orthonormal", row_gram_deviation(&primitive_rows(&build_b(u)).view()), TOL_EXACT));
    let dense = build_b(u).dense();
    r.notes.push(format!(
        "dense N^2 x N^2 export of b: orthogonality deviation {:.3e}",
        crate::ortho::orthogonality_deviation(&dense.view())
    ));

    r.push(Check::below("extraction <a_kp, g_p> = psi_k for every p", extraction_deviation(u, 4, seed), TOL_EXACT));
    r.push(Check::below("completeness sum_p (a_pk x 1) g_p = 1 x psi_k", completeness_deviation(u, 4, seed), TOL_EXACT));
    if n > 1 {
        r.push(Check::above("two-message mix is non-separable", two_message_separability(u), 0.5));
    }
    if n == 2 {
        let (rt, leak) = embed4_deviation(u, 8, seed);
        r.push(Check::below("embed4/detect4 round trip", rt, TOL_EXACT));
        r.push(Check::below("M1/M3 crosstalk", leak, TOL_EXACT));
        r.push(Check::below("standard embed/detect round trip", standard_scheme_deviation(u, 8, seed), TOL_EXACT));
    }
    r
}

/// Wavelet invariants for Haar and db2.
pub fn wavelet_report(seed: u64) -> Report {
    let mut r = Report::default();
    for fb in [FilterBank::haar(), FilterBank::db2()] {
        let name = fb.name().to_string();
        r.push(Check::below(format!("{name}: filter orthonormality"), fb.deviation(), TOL_EXACT));
        for n in [16, 32] {
            r.push(Check::below(
                format!("{name}: perfect reconstruction {n}x{n}"),
                wavelet_round_trip_deviation(&fb, n, seed),
                TOL_ROUND_TRIP,
            ));
        }
        r.push(Check::below(format!("{name}: energy preservation 16x16"), wavelet_energy_deviation(&fb, 16, seed), TOL_ROUND_TRIP));
        r.push(Check::below(format!("{name}: wavelet basis orthonormality n=4"), wavelet_basis_deviation(&fb, 4), TOL_EXACT));
        r.push(Check::below(format!("{name}: forward basis J orthonormality n=4"), forward_basis_deviation(&fb, 4), TOL_EXACT));
        r.push(Check::below(format!("{name}: four-band additivity 8x8"), band_additivity_deviation(&fb, 8, seed), TOL_ROUND_TRIP));
        r.push(Check::below(format!("{name}: basis completeness 8x8"), wavelet_completeness_deviation(&fb, 8, seed), TOL_ROUND_TRIP));
    }
    r
}

/// Full suite for one generator plus the wavelet suite.
pub fn verify(kind: GeneratorKind, n: usize, seed: u64) -> Result<Report> {
    let u = kind.build(n, seed)?;
    let mut report = generator_report(&u, seed);
    report.extend(wavelet_report(seed));
    Ok(report)
}

/// Orders swept by [`full_report`].
pub const FULL_ORDERS: [usize; 4] = [2, 4, 8, 16];

/// Every generator kind at every order in [`FULL_ORDERS`] (WHT only at
/// powers of two, which they all are), then the wavelet suite.
pub fn full_report(seed: u64) -> Report {
    let mut report = Report::default();
    for kind in GeneratorKind::ALL {
        for n in FULL_ORDERS {
            let u = kind.build(n, seed).expect("valid order");
            let mut sub = generator_report(&u, seed);
            for c in &mut sub.checks {
                c.name = format!("{kind} N={n}: {}", c.name);
            }
            for note in &mut sub.notes {
                *note = format!("{kind} N={n}: {note}");
            }
            report.extend(sub);
        }
    }
    report.extend(wavelet_report(seed));
    report
}
