pub mod bounds;
pub mod optimize;
pub mod scaling;
pub mod simulate;
pub mod stencil;

use crate::CliError;
use friction_core::bounds::BoundsError;

impl From<BoundsError> for CliError {
    fn from(err: BoundsError) -> Self {
        CliError::Config(err.to_string())
    }
}
