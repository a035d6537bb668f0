use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("complex is not balanced at {0} codimension-one faces")]
    NotBalanced(usize),
    #[error("weight is not integral: {0}")]
    NotIntegral(String),
    #[error("ground set of size {size} exceeds the limit {limit} (set TROPMOD_MAX_GROUND to raise it)")]
    GroundTooLarge { size: usize, limit: usize },
    #[error("map is not integral: {0}")]
    NonIntegralMap(String),
    #[error("point is not in the support: {0}")]
    NotInSupport(String),
    #[error("point is outside the domain of the map: {0}")]
    OutsideDomain(String),
    #[error("map is not locally surjective: {0}")]
    NotLocallySurjective(String),
    #[error("no positive integer weights balance the complex: {0}")]
    WeightAssignment(String),
    #[error("fibre lengths are not affine on a cell: {0}")]
    NonAffine(String),
    #[error("not a tropical curve of the expected shape: {0}")]
    BadFibre(String),
    #[error("family condition violated: {0}")]
    Family(String),
    #[error("fibre product weights are ambiguous: {0}")]
    Ambiguous(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Dimension(_) => "dimension",
            Error::Invalid(_) => "invalid",
            Error::NotBalanced(_) => "not_balanced",
            Error::NotIntegral(_) => "not_integral",
            Error::GroundTooLarge { .. } => "ground_too_large",
            Error::NonIntegralMap(_) => "non_integral_map",
            Error::NotInSupport(_) => "not_in_support",
            Error::OutsideDomain(_) => "outside_domain",
            Error::NotLocallySurjective(_) => "not_locally_surjective",
            Error::WeightAssignment(_) => "weight_assignment",
            Error::NonAffine(_) => "non_affine",
            Error::BadFibre(_) => "bad_fibre",
            Error::Family(_) => "family",
            Error::Ambiguous(_) => "ambiguous",
            Error::Json(_) => "json",
        }
    }
}
