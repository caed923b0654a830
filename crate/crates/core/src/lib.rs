#![cfg_attr(not(feature = "std"), no_std)]
//! Direct inversion of the 3D pseudo-polar Fourier transform.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.
//! FFTs are supplied through [`fft::FftBackend`]; the default `rustfft`
//! feature provides [`fft::RustFft`].

extern crate alloc;

pub mod error;
pub mod fft;
pub mod geometry;
pub mod inverse;
pub mod nufft;
mod par;
pub mod ppft;
pub mod resample;
pub mod toeplitz;

pub use error::{Error, Result};
