//! Three-dimensional orthogonal transforms and color basis images.
//!
//! A [`Volume`] is an `M×N×Z` array indexed `(m, n, q)` and stored planar:
//! plane `q` is the `M×N` matrix of channel `q`. For RGB images `Z = 3` and
//! the planes are R, G and B.

use ndarray::{s, Array2, Array3, ArrayView2};

use crate::basis::{basis_image, forward_2d, inverse_2d};
use crate::error::{dim, invalid, Result};
use crate::ortho::OrthoMatrix;
use crate::par;

#[derive(Clone, Debug, PartialEq)]
pub struct Volume {
    // (q, m, n)
    planes: Array3<f64>,
}

impl Volume {
    pub fn zeros(m: usize, n: usize, z: usize) -> Self {
        Self { planes: Array3::zeros((z, m, n)) }
    }

    pub fn from_fn(m: usize, n: usize, z: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        Self { planes: Array3::from_shape_fn((z, m, n), |(q, i, j)| f(i, j, q)) }
    }

    /// Stacks equally sized planes, `cat(3, ...)` style.
    pub fn from_planes(planes: &[Array2<f64>]) -> Result<Self> {
        let first = planes.first().ok_or_else(|| invalid("volume needs at least one plane"))?;
        let (m, n) = first.dim();
        if planes.iter().any(|p| p.dim() != (m, n)) {
            return Err(dim("all planes must share one shape"));
        }
        let mut out = Self::zeros(m, n, planes.len());
        for (q, p) in planes.iter().enumerate() {
            out.planes.slice_mut(s![q, .., ..]).assign(p);
        }
        Ok(out)
    }

    /// `(M, N, Z)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        let (z, m, n) = self.planes.dim();
        (m, n, z)
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize, q: usize) -> f64 {
        self.planes[[q, m, n]]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, q: usize, v: f64) {
        self.planes[[q, m, n]] = v;
    }

    pub fn plane(&self, q: usize) -> ArrayView2<'_, f64> {
        self.planes.slice(s![q, .., ..])
    }

    pub fn energy(&self) -> f64 {
        crate::ortho::energy(&self.planes)
    }

    pub fn max_abs_diff(&self, other: &Volume) -> f64 {
        self.planes
            .iter()
            .zip(other.planes.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_dims(u: &OrthoMatrix, v: &OrthoMatrix, w: &OrthoMatrix, t: &Volume) -> Result<()> {
    let (m, n, z) = t.dims();
    if (m, n, z) != (u.n(), v.n(), w.n()) {
        return Err(dim(format!(
            "{m}x{n}x{z} array needs generators of order ({m}, {n}, {z}), got ({}, {}, {})",
            u.n(),
            v.n(),
            w.n()
        )));
    }
    Ok(())
}

// out_s = Σ_q coeff(q, s) · plane_q
fn mix_planes(planes: &[Array2<f64>], coeff: impl Fn(usize, usize) -> f64 + Sync + Send) -> Vec<Array2<f64>> {
    let z = planes.len();
    par::map_range(z, |s| {
        let mut acc = Array2::zeros(planes[0].dim());
        for (q, p) in planes.iter().enumerate() {
            acc.scaled_add(coeff(q, s), p);
        }
        acc
    })
}

/// `τ_kps = Σ_mnq U_mk V_np W_qs T_mnq`.
pub fn forward_3d(u: &OrthoMatrix, v: &OrthoMatrix, w: &OrthoMatrix, t: &Volume) -> Result<Volume> {
    check_dims(u, v, w, t)?;
    let (_, _, z) = t.dims();
    let spatial = par::map_range(z, |q| forward_2d(u, v, &t.plane(q)).expect("checked dims"));
    Volume::from_planes(&mix_planes(&spatial, |q, s| w.get(q, s)))
}

/// `T = Σ_kps (u_k ⊗ v_p ⊗ w_s) τ_kps`.
pub fn inverse_3d(u: &OrthoMatrix, v: &OrthoMatrix, w: &OrthoMatrix, tau: &Volume) -> Result<Volume> {
    check_dims(u, v, w, tau)?;
    let (_, _, z) = tau.dims();
    let spectral: Vec<Array2<f64>> = (0..z).map(|s| tau.plane(s).to_owned()).collect();
    // T_q = Σ_s W_qs · (U τ_s Vᵀ)
    let channel = mix_planes(&spectral, |s, q| w.get(q, s));
    let planes = par::map_range(z, |q| inverse_2d(u, v, &channel[q].view()).expect("checked dims"));
    Volume::from_planes(&planes)
}

/// `t_kps = cat(3, a_kp·W_1s, a_kp·W_2s, a_kp·W_3s)`.
#[derive(Clone, Debug)]
pub struct ColorBasisImage {
    pub k: usize,
    pub p: usize,
    pub s: usize,
    pub channels: [Array2<f64>; 3],
}

impl ColorBasisImage {
    /// Frobenius norm over all three channels.
    pub fn stacked_norm(&self) -> f64 {
        self.channels.iter().map(crate::ortho::energy).sum::<f64>().sqrt()
    }

    pub fn to_volume(&self) -> Volume {
        Volume::from_planes(&self.channels).expect("channels share a shape")
    }
}

pub fn color_basis_image(u: &OrthoMatrix, w: &OrthoMatrix, k: usize, p: usize, s: usize) -> Result<ColorBasisImage> {
    if w.n() != 3 {
        return Err(invalid(format!("channel matrix must be 3x3, got order {}", w.n())));
    }
    if s >= 3 {
        return Err(invalid(format!("channel index {s} out of range")));
    }
    let a = basis_image(u, k, p)?;
    let channels = [0, 1, 2].map(|c| a.pixels().mapv(|v| v * w.get(c, s)));
    Ok(ColorBasisImage { k, p, s, channels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::frobenius;
    use crate::ortho::{make_dct, make_random_orthogonal, make_wht};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_volume(m: usize, n: usize, z: usize, seed: u64) -> Volume {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = (0..m * n * z).map(|_| rng.random_range(-1.0..1.0)).collect();
        Volume::from_fn(m, n, z, |i, j, q| vals[(i * n + j) * z + q])
    }

    /// Quadruple loop straight from the coefficient formula.
    fn forward_by_definition(u: &OrthoMatrix, v: &OrthoMatrix, w: &OrthoMatrix, t: &Volume) -> Volume {
        let (m, n, z) = t.dims();
        Volume::from_fn(m, n, z, |k, p, s| {
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..n {
                    for q in 0..z {
                        acc += u.get(i, k) * v.get(j, p) * w.get(q, s) * t.get(i, j, q);
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn identity_generators_do_nothing() {
        let t = random_volume(3, 2, 3, 1);
        let (i3, i2) = (OrthoMatrix::identity(3).unwrap(), OrthoMatrix::identity(2).unwrap());
        assert_eq!(forward_3d(&i3, &i2, &i3, &t).unwrap(), t);
        assert_eq!(inverse_3d(&i3, &i2, &i3, &t).unwrap(), t);
    }

    #[test]
    fn forward_matches_definition_and_preserves_energy() {
        let (u, w) = (make_dct(4).unwrap(), make_random_orthogonal(3, 5).unwrap());
        let t = random_volume(4, 4, 3, 2);
        let tau = forward_3d(&u, &u, &w, &t).unwrap();
        assert!(tau.max_abs_diff(&forward_by_definition(&u, &u, &w, &t)) < 1e-12);
        assert!((tau.energy() - t.energy()).abs() <= 1e-12 * t.energy());
        let back = inverse_3d(&u, &u, &w, &tau).unwrap();
        assert!(back.max_abs_diff(&t) < 1e-10);
    }

    #[test]
    fn channelwise_with_identity_w_is_forward_2d() {
        let u = make_wht(4).unwrap();
        let t = random_volume(4, 4, 3, 3);
        let tau = forward_3d(&u, &u, &OrthoMatrix::identity(3).unwrap(), &t).unwrap();
        for q in 0..3 {
            let g = forward_2d(&u, &u, &t.plane(q)).unwrap();
            assert!(g.iter().zip(tau.plane(q).iter()).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn single_coefficient_synthesizes_a_color_basis_item() {
        let (u, w) = (make_dct(4).unwrap(), make_random_orthogonal(3, 9).unwrap());
        let mut tau = Volume::zeros(4, 4, 3);
        tau.set(1, 2, 0, 1.0);
        let t = inverse_3d(&u, &u, &w, &tau).unwrap();
        let a = basis_image(&u, 1, 2).unwrap();
        let expected = Volume::from_fn(4, 4, 3, |m, n, q| a.pixels()[[m, n]] * w.get(q, 0));
        assert!(t.max_abs_diff(&expected) < 1e-12);
        let item = color_basis_image(&u, &w, 1, 2, 0).unwrap();
        assert!(item.to_volume().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn color_basis_examples() {
        let u = make_wht(2).unwrap();
        let item = color_basis_image(&u, &OrthoMatrix::identity(3).unwrap(), 0, 1, 0).unwrap();
        assert_eq!(item.channels[0], *basis_image(&u, 0, 1).unwrap().pixels());
        assert!(item.channels[1].iter().chain(item.channels[2].iter()).all(|v| *v == 0.0));

        let w = make_random_orthogonal(3, 4).unwrap();
        let item = color_basis_image(&u, &w, 1, 1, 2).unwrap();
        assert!((item.stacked_norm() - 1.0).abs() < 1e-12);

        assert!(color_basis_image(&u, &u, 0, 0, 0).is_err());
        assert!(color_basis_image(&u, &w, 0, 0, 3).is_err());
    }

    #[test]
    fn pure_red_lands_in_first_channel() {
        let u = make_dct(4).unwrap();
        let red = Volume::from_fn(4, 4, 3, |_, _, q| if q == 0 { 200.0 } else { 0.0 });
        let tau = forward_3d(&u, &u, &OrthoMatrix::identity(3).unwrap(), &red).unwrap();
        assert!(tau.plane(1).iter().chain(tau.plane(2).iter()).all(|v| *v == 0.0));
        assert!(tau.plane(0).iter().any(|v| v.abs() > 1.0));
    }

    #[test]
    fn color_basis_is_orthonormal_at_n2() {
        let u = make_wht(2).unwrap();
        let w = make_random_orthogonal(3, 2).unwrap();
        let items: Vec<_> = (0..12)
            .map(|i| color_basis_image(&u, &w, i / 6, (i / 3) % 2, i % 3).unwrap())
            .collect();
        for (i, a) in items.iter().enumerate() {
            for (j, b) in items.iter().enumerate() {
                let ip: f64 = (0..3).map(|c| frobenius(&a.channels[c].view(), &b.channels[c].view())).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ip - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let u = make_dct(4).unwrap();
        let t = Volume::zeros(4, 4, 2);
        assert!(forward_3d(&u, &u, &OrthoMatrix::identity(3).unwrap(), &t).is_err());
        assert!(inverse_3d(&u, &u, &OrthoMatrix::identity(3).unwrap(), &t).is_err());
        assert!(Volume::from_planes(&[]).is_err());
    }
}
