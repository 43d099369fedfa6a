//! Tabular schedule documents.

use std::fmt::Write;

use dynsched_core::{Cells, ProblemKind};
use dynsched_solver::SolveStatus;
use serde::{Deserialize, Serialize};

/// Grid view of a schedule: one row per worker or nurse, one column per
/// hour or day. A cell lists the shift ids worked, or marks a worked hour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleGrid {
    pub kind: ProblemKind,
    pub family: String,
    pub row_label: String,
    pub column_label: String,
    pub cells: Vec<Vec<String>>,
    pub status: SolveStatus,
    pub objective: Option<i64>,
}

/// Marker written in a worked hour cell.
pub const HOUR_MARK: &str = "x";

impl ScheduleGrid {
    pub fn new(kind: ProblemKind, cells: &Cells, status: SolveStatus, objective: Option<i64>) -> Self {
        let (rows, cols) = (cells.dims[0], cells.dims.get(1).copied().unwrap_or(1));
        let inner: usize = cells.dims.iter().skip(2).product();
        let grid = (0..rows)
            .map(|r| {
                (0..cols)
                    .map(|c| {
                        let base = (r * cols + c) * inner;
                        let on: Vec<String> = (0..inner)
                            .filter(|k| cells.values[base + k] != 0)
                            .map(|k| k.to_string())
                            .collect();
                        match (cells.dims.len(), on.is_empty()) {
                            (_, true) => String::new(),
                            (2, false) => HOUR_MARK.to_string(),
                            _ => on.join("+"),
                        }
                    })
                    .collect()
            })
            .collect();
        let (row_label, column_label) = match kind {
            ProblemKind::Gsp => ("worker", "hour"),
            ProblemKind::Nsp | ProblemKind::StaticNurse => ("nurse", "day"),
        };
        ScheduleGrid {
            kind,
            family: cells.name.clone(),
            row_label: row_label.into(),
            column_label: column_label.into(),
            cells: grid,
            status,
            objective,
        }
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn columns(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    fn header(&self) -> Vec<String> {
        std::iter::once(self.row_label.clone())
            .chain((0..self.columns()).map(|c| format!("{}{c}", self.column_label)))
            .collect()
    }

    /// Aligned plain-text table followed by status and objective.
    pub fn to_text(&self) -> String {
        let mut rows = vec![self.header()];
        for (r, line) in self.cells.iter().enumerate() {
            let mut row = vec![r.to_string()];
            row.extend(line.iter().map(|c| if c.is_empty() { ".".to_string() } else { c.clone() }));
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        let objective = self.objective.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(out, "status: {}  objective: {objective}", self.status.as_str());
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for (r, line) in self.cells.iter().enumerate() {
            w.write_record(std::iter::once(r.to_string()).chain(line.iter().cloned()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

/// Grid of a session's current schedule.
pub fn export_schedule(session: &crate::session::Session) -> Result<ScheduleGrid, crate::error::ServiceError> {
    let cells = session.cells()?;
    let report = session.report.as_ref().ok_or(crate::error::ServiceError::NoSchedule)?;
    Ok(ScheduleGrid::new(session.kind, &cells, report.status, report.objective))
}
