//! Morphisms between complexes, families of marked curves and the maps they induce to the
//! moduli fan.

pub mod constructors;
pub mod curve;
pub mod equivalence;
pub mod family;
pub mod morphism;
pub mod surjective;

pub use constructors::{forgetful_family, product_family, pullback_family, real_line, standard_line};
pub use curve::{Edge, FibreCurve, Leaf, Position};
pub use equivalence::{
    check_equivalence, equivalence_map, fibre_transport, transport_point, EdgeImage, EquivalenceReport, Transport,
};
pub use family::{
    chart_samples, check_marking, check_prefamily, face_points, random_point, Domain, Family, MarkingChart, MarkingReport,
    PrefamilyReport,
};
pub use morphism::{
    check_integrality, distance_map, distance_morphism, fibre_morphism, is_pseudomorphism, linear_on_flats, raw_to_quotient,
    IntegralityReport, PseudoEntry, PseudoMorphismReport,
};
pub use surjective::{is_locally_surjective, is_locally_surjective_at, SurjectivityReport};
