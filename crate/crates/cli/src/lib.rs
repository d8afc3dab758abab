//! File formats, instance generation and the `conerefine` command line.

pub mod app;
pub mod clock;
pub mod error;
pub mod gen;
pub mod record;
pub mod sdpa;
pub mod warm;

pub use app::{run_cli, run_cli_with};
pub use gen::{generate_instance, perturbed_start, GenMode, Instance, Planted};
pub use sdpa::{parse_sdpa, write_sdpa, SdpaFile};
pub use warm::WarmStartFile;
