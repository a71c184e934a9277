//! Hidden-source drivers: image densities, geometric forms and the ikeda map.

mod density;
mod faces;
mod geom;
mod ikeda;

pub use density::{load_density_image, sample_density_cells, sample_from_density, DensityGrid, GrayImage};
pub use faces::{face_density, face_image, Expression};
pub use geom::{sample_geometric, GeomForm, GeomVariant};
pub use ikeda::{generate_ikeda_sources, ikeda_step, default_ikeda_params, IkedaParams};
