//! Listing of flows, field suites and checks.

use lieflow_core::kinematics::{FlowMap, DEFAULT_DT};
use lieflow_core::standard::scalar_suite;
use lieflow_core::tensor::{ProductKind, Variance};
use serde::Serialize;

use crate::checks::CHECKS;

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Entry {
    Flow {
        name: String,
        params: Vec<(String, f64)>,
        closed_form_f: bool,
        steady: bool,
    },
    Suite {
        name: String,
        members: Vec<String>,
    },
    Check {
        name: String,
        theorem: String,
        tolerance: f64,
        description: String,
    },
}

impl Entry {
    pub fn name(&self) -> &str {
        match self {
            Entry::Flow { name, .. } | Entry::Suite { name, .. } | Entry::Check { name, .. } => name,
        }
    }
}

pub fn entries() -> Vec<Entry> {
    let mut out: Vec<Entry> = FlowMap::catalog()
        .into_iter()
        .map(|f| Entry::Flow {
            name: f.name(),
            params: f.params(),
            closed_form_f: f.has_analytic_f(),
            steady: f.is_steady(),
        })
        .collect();
    let variances: Vec<String> = Variance::ALL.iter().map(|v| v.name().to_string()).collect();
    out.push(Entry::Suite {
        name: "transported".into(),
        members: variances.clone(),
    });
    out.push(Entry::Suite {
        name: "witnesses".into(),
        members: variances.iter().map(|v| format!("(1+t) {v}")).collect(),
    });
    out.push(Entry::Suite {
        name: "scalar-suite".into(),
        members: scalar_suite().iter().map(|f| f.name().to_string()).collect(),
    });
    out.push(Entry::Suite {
        name: "products".into(),
        members: ProductKind::ALL.iter().map(|k| k.name().to_string()).collect(),
    });
    out.extend(CHECKS.iter().map(|c| Entry::Check {
        name: c.name.into(),
        theorem: c.theorem.into(),
        tolerance: c.tolerance,
        description: c.description.into(),
    }));
    out
}

/// Entries whose name or tag contains `filter`; an empty filter keeps all.
pub fn filtered(filter: &str) -> Vec<Entry> {
    entries()
        .into_iter()
        .filter(|e| {
            filter.is_empty()
                || e.name().contains(filter)
                || matches!(e, Entry::Check { theorem, .. } if theorem.contains(filter))
        })
        .collect()
}

pub fn list_catalog(filter: &str, json: bool) -> String {
    let entries = filtered(filter);
    if json {
        let mut s = serde_json::to_string_pretty(&entries).expect("serialisable");
        s.push('\n');
        return s;
    }
    let mut s = String::new();
    let section = |s: &mut String, title: &str| {
        if !s.is_empty() {
            s.push('\n');
        }
        s.push_str(title);
        s.push('\n');
    };
    let flows: Vec<&Entry> = entries.iter().filter(|e| matches!(e, Entry::Flow { .. })).collect();
    if !flows.is_empty() {
        section(&mut s, "flows:");
        for e in flows {
            if let Entry::Flow { name, params, closed_form_f, .. } = e {
                let p: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let f = if *closed_form_f { "closed-form F" } else { "integrated F" };
                s.push_str(&format!("  {name:<12} [{}]  {f}\n", p.join(", ")));
            }
        }
        s.push_str(&format!(
            "  (any velocity given as three expressions runs with RK4, default dt = {DEFAULT_DT})\n"
        ));
    }
    let suites: Vec<&Entry> = entries.iter().filter(|e| matches!(e, Entry::Suite { .. })).collect();
    if !suites.is_empty() {
        section(&mut s, "field suites:");
        for e in suites {
            if let Entry::Suite { name, members } = e {
                s.push_str(&format!("  {name:<12} {}\n", members.join("; ")));
            }
        }
    }
    let checks: Vec<&Entry> = entries.iter().filter(|e| matches!(e, Entry::Check { .. })).collect();
    if !checks.is_empty() {
        section(&mut s, "checks:");
        for e in checks {
            if let Entry::Check { name, theorem, tolerance, description } = e {
                s.push_str(&format!("  {name:<24} {theorem:<32} tol {tolerance:e}  {description}\n"));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_listing() {
        let all = entries();
        assert_eq!(all.iter().filter(|e| matches!(e, Entry::Flow { .. })).count(), 5);
        assert!(all.iter().filter(|e| matches!(e, Entry::Check { .. })).count() >= 10);
        assert_eq!(list_catalog("", false), list_catalog("", false));
        assert_eq!(filtered(""), all);
    }

    #[test]
    fn json_is_an_array() {
        let v: serde_json::Value = serde_json::from_str(&list_catalog("", true)).unwrap();
        assert!(v.as_array().unwrap().len() >= 15);
        let v: serde_json::Value = serde_json::from_str(&list_catalog("kelvin", true)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
    }

    #[test]
    fn text_filter() {
        let s = list_catalog("shear", false);
        assert!(s.contains("shear"));
        assert!(!s.contains("rotation"));
    }
}
