//! Direct inversion of the pseudo-polar transform: onion peeling onto the
//! decimated Cartesian grid, then separable decimated-frequency inversion.

pub mod decimated;
pub mod peel;

pub use decimated::{
    adj_f_decimated, f_decimated, fd_condition_number, fd_gram_column, fd_matrix, forward_decimated,
    inv_decimated_freq, make_fd_plan, CartesianCube, FdPlan,
};
pub use peel::{peel, peel_nodes, peel_with, recover2d, IppftOptions, PeelPlan, PeelStage, Slice, OVERLAP_TOL};

use crate::error::Result;
use crate::fft::FftBackend;
use crate::geometry::GridParams;
use crate::ppft::{PpftData, Volume};

/// Everything [`ippft`] precomputes for one grid.
#[derive(Debug, Clone)]
pub struct IppftPlan {
    peel: PeelPlan,
    fd: FdPlan,
}

impl IppftPlan {
    pub fn new(fft: &dyn FftBackend, g: GridParams, opts: IppftOptions) -> Result<Self> {
        Ok(Self {
            peel: PeelPlan::new(fft, g, opts)?,
            fd: make_fd_plan(fft, g)?,
        })
    }

    pub fn grid(&self) -> GridParams {
        self.peel.grid()
    }

    pub fn peel_plan(&self) -> &PeelPlan {
        &self.peel
    }

    pub fn fd_plan(&self) -> &FdPlan {
        &self.fd
    }
}

/// Inverts the pseudo-polar transform with a prepared plan.
pub fn ippft_with_plan(fft: &dyn FftBackend, plan: &IppftPlan, data: &PpftData) -> Result<Volume> {
    let cube = peel(fft, &plan.peel, data)?;
    inv_decimated_freq(fft, &plan.fd, &cube)
}

/// Inverts the pseudo-polar transform, building the plan on the fly.
pub fn ippft(fft: &dyn FftBackend, data: &PpftData) -> Result<Volume> {
    let plan = IppftPlan::new(fft, data.grid(), IppftOptions::default())?;
    ippft_with_plan(fft, &plan, data)
}
