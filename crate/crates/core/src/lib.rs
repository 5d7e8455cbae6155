//! Finite-field projective geometry of quadrics in PG(3,q) and the
//! functional codes they define.

pub mod bounds;
pub mod engine;
pub mod error;
pub mod funcodes;
pub mod gf;
pub mod intersections;
pub mod linalg;
pub mod pg;
pub mod quadric;
pub mod wordgeom;

pub use bounds::{bound_suite, case_labels, cone_pair_with_four_lines, BoundReport, Certificate, Rule, SuiteMode, SuiteOptions};
pub use error::{Error, Result};
pub use engine::{ScanOptions, Visitor};
pub use funcodes::{
    build_code, expected_params, weight_hierarchy, ExpectedParams, FunctionalCode, WeightDistribution, WeightHierarchy,
};
pub use gf::{Fe, Field};
pub use intersections::{
    common_lines, intersection_count, spectrum, spectrum_pattern, IntersectionReport, SpectrumCertificate, SpectrumMode,
};
pub use pg::{shared_geometry, Geometry, Line, Plane, Point2, Point3, ProjPoint};
pub use quadric::{
    canonical_form, classify3, classify4, line_class, plane_class, reguli, singular_points, zero_set,
    ConicClass, Form3, Form4, LineClass, PlaneClass, Quadric, QuadricClass, Regulus,
};
pub use wordgeom::{census, listed_types, theorem_check, word_type, GeometricType, TheoremCheck, Tier, WordCensus};
