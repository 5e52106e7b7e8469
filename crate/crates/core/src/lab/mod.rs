//! Flat-torus deformation experiments for HL and RS submanifolds.

pub mod field;
pub mod grid;
pub mod immersion;
pub mod linearize;
pub mod model;

pub use field::{Direction, FieldComponent, FieldSpec, FourierTerm, NormalField, Profile};
pub use grid::{exterior_derivative, metric_hodge_star, Grid, SampledForm};
pub use immersion::{
    deform, pullback_form, sample_immersion, ImmersionSpec, SampledSubmanifold, SubmanifoldKind,
};
pub use linearize::{
    cartan_linearization, compare_linearizations, continuum_cartan, deformation_map,
    fd_linearization, grid_refinement_study, run_deformation, DeformationReport, DeformationSpec,
    GridStudy, MIN_ORDER,
};
pub use model::{
    build_flat_model, cy_product, cy_product_form, cy_product_star, standard_cy, CyData, CyProduct,
    FlatModel, SignedRelabeling,
};
