//! Cell-level differences between two schedules.

use dynsched_core::{Cells, ModelError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellChange {
    /// Row-major offset inside the family.
    pub flat: usize,
    pub index: Vec<usize>,
    pub old: i64,
    pub new: i64,
}

/// Changed cells of one family in row-major order. The length equals the
/// Hamming distance between the two schedules.
pub fn diff_schedules(old: &Cells, new: &Cells) -> Result<Vec<CellChange>, ModelError> {
    Ok(old
        .changed_cells(new)?
        .into_iter()
        .map(|flat| CellChange {
            flat,
            index: old.unflatten(flat),
            old: old.values[flat],
            new: new.values[flat],
        })
        .collect())
}
