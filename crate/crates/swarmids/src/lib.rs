//! File formats, scenario documents and the command-line frontend for
//! [`swarmids_core`].

pub mod catalog_io;
pub mod commands;
pub mod output;
pub mod scenario_file;

pub use catalog_io::{load_catalog, read_catalog, write_catalog, CatalogIoError};
pub use scenario_file::{bundled_scenario, load_scenario, ScenarioFile};
