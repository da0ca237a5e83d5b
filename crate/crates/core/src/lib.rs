//! Orthogonal transforms viewed as decompositions over basis images.
//!
//! The crate covers grayscale, color and single-level wavelet basis images,
//! the block matrix whose entries are basis images (with its involution
//! `bb = 1`), and a frequency-domain embedding scheme built on the
//! non-separable arrays that the block matrix produces.
//!
//! Indices are 0-based throughout the API.
//!
//! With the default `parallel` feature the inner sweeps (block products,
//! basis enumeration, filter passes, invariant checks) run on rayon; build
//! with `--no-default-features` for a purely sequential library.

pub mod basis;
pub mod block;
pub mod color;
pub mod error;
pub mod formats;
pub mod ortho;
pub mod par;
pub mod stego;
pub mod verify;
pub mod wavelet;

pub use basis::{
    atlas, basis_from_unit, basis_image, decompose, forward_2d, frobenius, inverse_2d, product,
    resynthesize, BasisImage, ImageMatrix, UnitMatrix,
};
pub use block::{
    biorthogonal_coeffs, biorthogonal_synthesis, block_apply, block_mul, build_b, Arrangement,
    BlockMatrix, BlockMatrixB, BlockVector,
};
pub use color::{color_basis_image, forward_3d, inverse_3d, ColorBasisImage, Volume};
pub use error::{Error, Result};
pub use ortho::{
    energy, forward_1d, inverse_1d, make_dct, make_dst, make_random_orthogonal, make_wht,
    GeneratorKind, OrthoMatrix,
};
pub use stego::{
    detect4, embed4, extract, mix, separability_index, standard_detect, standard_embed, unmix,
    MessageMatrix, StegoKey, TensorBlock,
};
pub use wavelet::{
    band_reconstruction, dwt2, forward_basis_image, idwt2, wavelet_basis_image, Band, DwtCoeffs,
    FilterBank, WaveletBasisImage,
};
