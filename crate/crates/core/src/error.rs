use thiserror::Error;

use crate::apps::AppError;
use crate::cli::ParseError;
use crate::kyp::KypError;
use crate::poly::PolyError;
use crate::reduce::ReduceError;
use crate::sdp::SdpError;

/// Crate-wide error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Kyp(#[from] KypError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    App(#[from] AppError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
