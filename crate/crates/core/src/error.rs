use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// A `(model, presentation)` pair the isotropy catalog has no value for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unsupported {
    pub model: String,
    pub presentation: String,
    /// Cell of the orbit space carrying the offending label, when known.
    pub cell: Option<String>,
}

impl core::fmt::Display for Unsupported {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "unsupported combination: isotropy {} with Γ = {}", self.model, self.presentation)?;
        if let Some(cell) = &self.cell {
            write!(f, " (stratum {cell})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // cell spaces
    #[error("cell id must be non-empty (cell #{0})")]
    EmptyCellId(usize),
    #[error("duplicate cell id `{0}`")]
    DuplicateCellId(String),
    #[error("cell id `{0}` contains the reserved separator `⊗`")]
    ReservedSeparator(String),
    #[error("id collision `{0}` while forming a product space")]
    IdCollision(String),
    #[error("unknown cell id `{0}`")]
    UnknownCell(String),
    #[error("no value given for cell `{0}`")]
    MissingValue(String),
    #[error("value given for `{0}`, which is not a cell of the space")]
    ExtraValue(String),
    #[error("cell `{source_cell}` (dim {source_dim}) is mapped to `{target_cell}` of larger dimension {target_dim}")]
    DimensionIncrease { source_cell: String, source_dim: u32, target_cell: String, target_dim: u32 },
    #[error("function is defined on a different space than the map's source")]
    SpaceMismatch,
    #[error("integer overflow in exact arithmetic")]
    Overflow,

    // finite groups
    #[error("a group needs at least one element")]
    EmptyGroup,
    #[error("table row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("table entry ({row},{col}) = {value} is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("element 0 is not the identity")]
    IdentityNotZero,
    #[error("row {0} is not a permutation")]
    RowNotPermutation(usize),
    #[error("column {0} is not a permutation")]
    ColumnNotPermutation(usize),
    #[error("associativity fails for ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} is out of range for a group of order {1}")]
    ElementOutOfRange(usize, usize),
    #[error("tuple has {got} entries, expected {expected}")]
    TupleLength { got: usize, expected: usize },
    #[error("element list is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("tuple set is not closed under simultaneous conjugation")]
    NotConjugationClosed,

    // presentations
    #[error("relator {relator} contains letter {letter}, valid letters are ±1..=±{generators}")]
    InvalidLetter { relator: usize, letter: i32, generators: usize },
    #[error("cyclic presentation needs order ≥ 1")]
    InvalidCyclicOrder,

    // catalog
    #[error("{0}")]
    Unsupported(Box<Unsupported>),
    #[error("torus dimension must be positive")]
    InvalidTorus,
    #[error("product isotropy model needs at least one factor")]
    EmptyProduct,
    #[error("bundle fiber must be abelian (finite abelian group or torus), got {0}")]
    NonAbelianFiber(String),

    // group actions
    #[error("action is missing the map for group element {0}")]
    ActionMissing(usize),
    #[error("action of the identity is not the identity map")]
    ActionIdentity,
    #[error("action of element {0} is not a bijection of cells")]
    ActionNotBijective(usize),
    #[error("action of element {element} changes the dimension of cell `{cell}`")]
    ActionDimension { element: usize, cell: String },
    #[error("action is not a homomorphism at ({0}, {1})")]
    ActionNotHomomorphism(usize, usize),

    #[error("cell set is not invariant under the group action (cell `{0}` leaves it)")]
    NotInvariant(String),

    // evaluation
    #[error("order {requested} exceeds the recursion cap {cap}")]
    RecursionCap { requested: usize, cap: usize },
    #[error("atlas piece {index}: {source}")]
    AtlasPiece { index: usize, source: Box<Error> },
    #[error("internal disagreement in {name}: {lhs} ≠ {rhs}")]
    Disagreement { name: String, lhs: i64, rhs: i64 },
}

impl Error {
    pub(crate) fn unsupported(model: String, presentation: String) -> Self {
        Error::Unsupported(Box::new(Unsupported { model, presentation, cell: None }))
    }

    /// Attach a stratum id to an unsupported-combination error.
    pub(crate) fn at_cell(self, cell: &str) -> Self {
        match self {
            Error::Unsupported(mut u) => {
                u.cell.get_or_insert_with(|| cell.into());
                Error::Unsupported(u)
            }
            other => other,
        }
    }

    pub fn is_unsupported(&self) -> bool {
        match self {
            Error::Unsupported(_) => true,
            Error::AtlasPiece { source, .. } => source.is_unsupported(),
            _ => false,
        }
    }
}

pub(crate) fn checked_sum<I: IntoIterator<Item = i64>>(it: I) -> Result<i64> {
    it.into_iter().try_fold(0i64, |acc, v| acc.checked_add(v).ok_or(Error::Overflow))
}

pub(crate) fn checked_mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}
