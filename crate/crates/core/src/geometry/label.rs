use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Index of a phase in a three-phase cluster. Ordered `Minus < Zero < Plus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum PhaseLabel {
    Minus,
    Zero,
    Plus,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 3] = [PhaseLabel::Minus, PhaseLabel::Zero, PhaseLabel::Plus];

    pub fn value(self) -> i8 {
        match self {
            PhaseLabel::Minus => -1,
            PhaseLabel::Zero => 0,
            PhaseLabel::Plus => 1,
        }
    }

    /// Position in [`PhaseLabel::ALL`].
    pub fn index(self) -> usize {
        (self.value() + 1) as usize
    }

    pub fn from_value(v: i8) -> Result<Self> {
        match v {
            -1 => Ok(PhaseLabel::Minus),
            0 => Ok(PhaseLabel::Zero),
            1 => Ok(PhaseLabel::Plus),
            _ => Err(LabError::invalid("label", format!("{v} is not one of -1, 0, 1"))),
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '-' => Ok(PhaseLabel::Minus),
            '0' => Ok(PhaseLabel::Zero),
            '+' => Ok(PhaseLabel::Plus),
            _ => Err(LabError::invalid("labels", format!("unexpected character {c:?}"))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PhaseLabel::Minus => '-',
            PhaseLabel::Zero => '0',
            PhaseLabel::Plus => '+',
        }
    }

    /// The two labels different from `self`, in increasing order.
    pub fn others(self) -> [PhaseLabel; 2] {
        match self {
            PhaseLabel::Minus => [PhaseLabel::Zero, PhaseLabel::Plus],
            PhaseLabel::Zero => [PhaseLabel::Minus, PhaseLabel::Plus],
            PhaseLabel::Plus => [PhaseLabel::Minus, PhaseLabel::Zero],
        }
    }

    /// The label different from both `a` and `b` (which must differ).
    pub fn third(a: PhaseLabel, b: PhaseLabel) -> PhaseLabel {
        debug_assert_ne!(a, b);
        PhaseLabel::ALL
            .into_iter()
            .find(|&l| l != a && l != b)
            .expect("three labels")
    }

    /// True for the unordered pair {-1, +1}.
    pub fn is_direct_pair(a: PhaseLabel, b: PhaseLabel) -> bool {
        matches!(
            (a, b),
            (PhaseLabel::Minus, PhaseLabel::Plus) | (PhaseLabel::Plus, PhaseLabel::Minus)
        )
    }
}

impl TryFrom<i8> for PhaseLabel {
    type Error = LabError;
    fn try_from(v: i8) -> Result<Self> {
        PhaseLabel::from_value(v)
    }
}

impl From<PhaseLabel> for i8 {
    fn from(l: PhaseLabel) -> i8 {
        l.value()
    }
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.value())
    }
}
