//! The three-section planning answer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PARAMS_HEADER: &str = "New Parameters:";
pub const VARS_HEADER: &str = "New Variables:";
pub const CONSTRAINTS_HEADER: &str = "New Constraints:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanItem {
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanSections {
    pub new_params: Vec<PlanItem>,
    pub new_vars: Vec<PlanItem>,
    pub new_constraints_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("planning answer has no `{missing}` section")]
pub struct PlanParseError {
    pub missing: String,
}

/// Heading recognized on a line, ignoring case and markdown decoration.
fn heading(line: &str) -> Option<(usize, &str)> {
    let bare = line.trim().trim_start_matches(['#', '*', ' ']);
    [PARAMS_HEADER, VARS_HEADER, CONSTRAINTS_HEADER]
        .iter()
        .enumerate()
        .find_map(|(i, h)| {
            let head = bare.get(..h.len())?;
            head.eq_ignore_ascii_case(h)
                .then(|| (i, bare[h.len()..].trim_start_matches('*').trim()))
        })
}

impl PlanSections {
    /// Splits an answer at the three headings. Text before the first heading
    /// is ignored; each section runs to the next heading.
    pub fn parse(text: &str) -> Result<Self, PlanParseError> {
        let mut sections: [Option<Vec<&str>>; 3] = [None, None, None];
        let mut current: Option<usize> = None;
        for line in text.lines() {
            if let Some((i, rest)) = heading(line) {
                let body = sections[i].get_or_insert_with(Vec::new);
                if !rest.is_empty() {
                    body.push(rest);
                }
                current = Some(i);
            } else if let Some(i) = current {
                sections[i].as_mut().expect("open section").push(line);
            }
        }
        let take = |i: usize, name: &str| {
            sections[i].clone().ok_or_else(|| PlanParseError {
                missing: name.trim_end_matches(':').to_string(),
            })
        };
        let params = take(0, PARAMS_HEADER)?;
        let vars = take(1, VARS_HEADER)?;
        let constraints = take(2, CONSTRAINTS_HEADER)?;
        Ok(PlanSections {
            new_params: items(&params),
            new_vars: items(&vars),
            new_constraints_text: constraints.join("\n").trim().to_string(),
        })
    }

    /// Canonical text of the plan, in the format the parser reads.
    pub fn render(&self) -> String {
        let list = |items: &[PlanItem]| {
            if items.is_empty() {
                "None".to_string()
            } else {
                items
                    .iter()
                    .map(|i| {
                        if i.description.is_empty() {
                            i.name.clone()
                        } else {
                            format!("{}: {}", i.name, i.description)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        };
        let constraints = if self.new_constraints_text.is_empty() {
            "None"
        } else {
            &self.new_constraints_text
        };
        format!(
            "{PARAMS_HEADER}\n{}\n\n{VARS_HEADER}\n{}\n\n{CONSTRAINTS_HEADER}\n{constraints}",
            list(&self.new_params),
            list(&self.new_vars)
        )
    }
}

fn strip_bullet(line: &str) -> &str {
    let t = line.trim();
    for b in ["- ", "* ", "• "] {
        if let Some(rest) = t.strip_prefix(b) {
            return rest.trim();
        }
    }
    let digits = t.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 {
        if let Some(rest) = t[digits..].strip_prefix(['.', ')']) {
            return rest.trim();
        }
    }
    t
}

fn items(lines: &[&str]) -> Vec<PlanItem> {
    lines
        .iter()
        .map(|l| strip_bullet(l))
        .filter(|l| !l.is_empty() && !l.trim_end_matches('.').eq_ignore_ascii_case("none"))
        .map(|l| {
            let (name, description) = l.split_once(':').unwrap_or((l, ""));
            PlanItem {
                name: name.trim().trim_matches(['`', '*']).to_string(),
                description: description.trim().to_string(),
            }
        })
        .collect()
}
