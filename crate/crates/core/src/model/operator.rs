use std::fmt;

use super::validate::{ValidationReport, Violation};

/// Which family a base combination operator belongs to. Only used for
/// naming and serialization; behaviour is entirely defined by the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Or,
    And,
    Max,
    SatSum,
    Custom,
}

impl OperatorKind {
    pub fn keyword(self) -> &'static str {
        match self {
            OperatorKind::Or => "or",
            OperatorKind::And => "and",
            OperatorKind::Max => "max",
            OperatorKind::SatSum => "satsum",
            OperatorKind::Custom => "custom",
        }
    }
}

/// A binary operator on the value indices `0..cardinality` of a frame,
/// stored as a dense `cardinality x cardinality` table.
///
/// Construction does not check the algebraic laws; call
/// [`validate_operator`] for that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseOperator {
    kind: OperatorKind,
    cardinality: usize,
    table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OperatorError {
    #[error("operator table has {rows} rows but row {row} has {len} entries")]
    Ragged { rows: usize, row: usize, len: usize },
    #[error("operator table is {found}x{found} but the frame has {expected} values")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{kind} is only defined on binary frames, got {cardinality} values")]
    NotBinary { kind: &'static str, cardinality: usize },
    #[error("operator frame must have at least one value")]
    Empty,
}

impl BaseOperator {
    pub fn or() -> Self {
        Self::from_fn(OperatorKind::Or, 2, |a, b| a | b)
    }

    pub fn and() -> Self {
        Self::from_fn(OperatorKind::And, 2, |a, b| a & b)
    }

    /// Noisy-MAX: the larger index wins.
    pub fn max(cardinality: usize) -> Self {
        Self::from_fn(OperatorKind::Max, cardinality, usize::max)
    }

    /// Noisy adder over a finite frame: index addition clamped to the top value.
    pub fn sat_sum(cardinality: usize) -> Self {
        Self::from_fn(OperatorKind::SatSum, cardinality, move |a, b| {
            (a + b).min(cardinality - 1)
        })
    }

    /// Looks up a built-in operator by keyword for a frame of the given size.
    pub fn builtin(keyword: &str, cardinality: usize) -> Result<Option<Self>, OperatorError> {
        let op = match keyword {
            "or" | "and" if cardinality != 2 => {
                let kind = if keyword == "or" { "or" } else { "and" };
                return Err(OperatorError::NotBinary { kind, cardinality });
            }
            "or" => Self::or(),
            "and" => Self::and(),
            "max" => Self::max(cardinality),
            "satsum" => Self::sat_sum(cardinality),
            _ => return Ok(None),
        };
        Ok(Some(op))
    }

    /// An explicit operator table, `rows[i][j] = i * j`.
    pub fn custom(rows: Vec<Vec<usize>>) -> Result<Self, OperatorError> {
        let n = rows.len();
        if n == 0 {
            return Err(OperatorError::Empty);
        }
        let mut table = Vec::with_capacity(n * n);
        for (row, values) in rows.into_iter().enumerate() {
            if values.len() != n {
                return Err(OperatorError::Ragged { rows: n, row, len: values.len() });
            }
            table.extend(values);
        }
        Ok(BaseOperator { kind: OperatorKind::Custom, cardinality: n, table })
    }

    /// An explicit operator table for a frame of `cardinality` values, flattened row-major.
    pub fn custom_flat(cardinality: usize, table: Vec<usize>) -> Result<Self, OperatorError> {
        if cardinality == 0 {
            return Err(OperatorError::Empty);
        }
        if table.len() != cardinality * cardinality {
            let found = (table.len() as f64).sqrt() as usize;
            return Err(OperatorError::DimensionMismatch { expected: cardinality, found });
        }
        Ok(BaseOperator { kind: OperatorKind::Custom, cardinality, table })
    }

    fn from_fn(kind: OperatorKind, cardinality: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(cardinality * cardinality);
        for a in 0..cardinality {
            for b in 0..cardinality {
                table.push(f(a, b));
            }
        }
        BaseOperator { kind, cardinality, table }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    #[inline]
    pub fn apply(&self, a: usize, b: usize) -> usize {
        self.table[a * self.cardinality + b]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.table.chunks(self.cardinality)
    }

    /// Folds a sequence of values; `None` for an empty sequence.
    pub fn fold(&self, values: impl IntoIterator<Item = usize>) -> Option<usize> {
        values.into_iter().reduce(|acc, v| self.apply(acc, v))
    }
}

impl fmt::Display for BaseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.kind.keyword(), self.cardinality)
    }
}

/// Exhaustively checks closure, commutativity and associativity.
///
/// Frames are capped at 64 values so the O(d^3) associativity sweep stays cheap.
pub fn validate_operator(op: &BaseOperator) -> ValidationReport {
    let mut report = ValidationReport::default();
    let d = op.cardinality;
    if op.table.len() != d * d {
        report.push(Violation::OperatorDimension { cardinality: d, len: op.table.len() });
        return report;
    }
    let mut closed = true;
    for i in 0..d {
        for j in 0..d {
            let v = op.apply(i, j);
            if v >= d {
                report.push(Violation::OperatorClosure { left: i, right: j, value: v });
                closed = false;
            }
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if op.apply(i, j) != op.apply(j, i) {
                report.push(Violation::OperatorCommutativity { left: i, right: j });
            }
        }
    }
    // associativity only makes sense once every product is a valid index
    if closed {
        'outer: for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if op.apply(op.apply(i, j), k) != op.apply(i, op.apply(j, k)) {
                        report.push(Violation::OperatorAssociativity { a: i, b: j, c: k });
                        break 'outer;
                    }
                }
            }
        }
    }
    report
}
