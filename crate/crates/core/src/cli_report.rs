//! Run configuration, check orchestration and versioned reports.

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::collections::{enumerate_collection, euler_characteristic, verify_invariance};
use crate::core_model::{
    git_form, half_index, relations, taut_form, taut_to_git, BundleKind, GitLineBundle, MarkingSet, MAX_N,
};
use crate::error::{Error, Result};
use crate::exceptionality::{verify_collection_exceptional, ExceptionalityReport};
use crate::fullness::verify_fullness_with;
use crate::windows::{maxmin_audit, window_audit};

pub const REPORT_SCHEMA: &str = "zn-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Enumerate,
    Invariance,
    Windows,
    Maxmin,
    Exceptional,
    Gram,
    Fullness,
    Dictionary,
}

impl Check {
    /// All checks in execution order.
    pub const ALL: [Check; 8] = [
        Check::Enumerate,
        Check::Invariance,
        Check::Windows,
        Check::Maxmin,
        Check::Exceptional,
        Check::Gram,
        Check::Fullness,
        Check::Dictionary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Enumerate => "enumerate",
            Check::Invariance => "invariance",
            Check::Windows => "windows",
            Check::Maxmin => "maxmin",
            Check::Exceptional => "exceptional",
            Check::Gram => "gram",
            Check::Fullness => "fullness",
            Check::Dictionary => "dictionary",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown check '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Structured,
    Tabular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Finding,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Finding => "FINDING",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub checks: Vec<Check>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Extra fullness targets: every `L_{E,p}` with `|p| <= max_p`.
    pub max_p: Option<i64>,
}

impl RunConfig {
    pub fn new(n: usize, checks: &[Check]) -> Result<Self> {
        let c = Self { n, checks: checks.to_vec(), jobs: None, out: None, format: Format::Structured, max_p: None };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_N {
            return Err(Error::Config(format!("n must lie in 2..={MAX_N}, got {}", self.n)));
        }
        if self.checks.is_empty() {
            return Err(Error::Config("no checks selected".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("--jobs must be positive".into()));
        }
        if matches!(self.max_p, Some(p) if p < 0) {
            return Err(Error::Config("--max-p must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub check: Check,
    pub status: Status,
    pub summary: String,
    pub evidence: Value,
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub n: usize,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.sections.iter().all(|s| s.status != Status::Fail)
    }

    pub fn status_of(&self, c: Check) -> Option<Status> {
        self.sections.iter().find(|s| s.check == c).map(|s| s.status)
    }

    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.sections.iter_mut().for_each(|s| s.millis = None);
        r
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("# {} {} n={}\n", self.schema, self.tool_version, self.n);
        for s in &self.sections {
            let ms = s.millis.map(|m| format!("{m}ms")).unwrap_or_default();
            out.push_str(&format!("{:<12} {:<8} {:>8}  {}\n", s.check.name(), s.status, ms, s.summary));
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Structured => self.to_json(),
            Format::Tabular => Ok(self.to_table()),
        }
    }
}

/// Divisor-class identities that must hold through the dictionary.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryAudit {
    pub relations_checked: usize,
    pub forms_checked: usize,
    pub failures: Vec<String>,
}

/// Relations map to zero, and the tautological expressions of `L, R, Q, V`
/// map to their linearized forms, for `|p| <= s + 2`.
pub fn dictionary_audit(n: usize) -> Result<DictionaryAudit> {
    let mut a = DictionaryAudit::default();
    for (name, rel) in relations(n) {
        a.relations_checked += 1;
        let img = taut_to_git(&rel, n)?;
        if img != GitLineBundle::trivial(n) {
            a.failures.push(format!("relation {name} maps to {img}"));
        }
    }
    let kinds: &[BundleKind] =
        if n % 2 == 0 { &[BundleKind::L, BundleKind::R, BundleKind::Q, BundleKind::V] } else { &[BundleKind::L] };
    let pmax = half_index(n) as i64 + 2;
    let per_set: Vec<(usize, Vec<String>)> = MarkingSet::all_subsets(n)
        .into_par_iter()
        .map(|e| -> Result<(usize, Vec<String>)> {
            let mut checked = 0;
            let mut bad = Vec::new();
            for p in (-pmax..=pmax).filter(|p| (e.len() as i64 + p) % 2 == 0) {
                for &kind in kinds {
                    checked += 1;
                    let via = taut_to_git(&taut_form(kind, n, &e, p)?, n)?;
                    let direct = git_form(kind, n, &e, p)?;
                    if via != direct {
                        bad.push(format!("{kind}[{e};{p}]: {via} vs {direct}"));
                    }
                }
            }
            Ok((checked, bad))
        })
        .collect::<Result<Vec<_>>>()?;
    for (checked, bad) in per_set {
        a.forms_checked += checked;
        a.failures.extend(bad);
    }
    Ok(a)
}

fn section(check: Check, status: Status, summary: impl Into<String>, evidence: Value) -> Section {
    Section { check, status, summary: summary.into(), evidence, millis: None }
}

fn pass_fail(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

struct Runner {
    n: usize,
    max_p: Option<i64>,
    exceptional: Option<ExceptionalityReport>,
}

impl Runner {
    fn exceptional(&mut self) -> Result<&ExceptionalityReport> {
        if self.exceptional.is_none() {
            self.exceptional = Some(verify_collection_exceptional(self.n)?);
        }
        Ok(self.exceptional.as_ref().expect("just computed"))
    }

    fn gram_ok(&mut self) -> Result<bool> {
        let n = self.n;
        let r = self.exceptional()?;
        let chi = euler_characteristic(n)?;
        Ok(r.gram_unitriangular
            && (r.determinant == "1" || r.determinant == "-1")
            && num_bigint::BigUint::from(r.gram.size()) == chi)
    }

    fn run_one(&mut self, check: Check) -> Result<Section> {
        let n = self.n;
        Ok(match check {
            Check::Enumerate => {
                let c = enumerate_collection(n)?;
                let chi = euler_characteristic(n)?;
                let items: Vec<Value> =
                    c.items.iter().map(|x| json!({ "item": x.label(), "level": c.level[x].to_string() })).collect();
                let ok = num_bigint::BigUint::from(c.len()) == chi;
                section(
                    check,
                    pass_fail(ok),
                    format!("{} items ({} torsion), Euler characteristic {chi}", c.len(), c.torsion_count()),
                    json!({ "count": c.len(), "euler_characteristic": chi.to_string(), "items": items }),
                )
            }
            Check::Invariance => {
                let r = verify_invariance(n)?;
                section(
                    check,
                    pass_fail(r.closed),
                    format!("{} generators, {} violations", r.generators_checked, r.violations.len()),
                    serde_json::to_value(&r).map_err(|e| Error::Io(e.to_string()))?,
                )
            }
            Check::Windows => {
                let a = window_audit(n)?;
                let off: Vec<Value> = a
                    .strata
                    .iter()
                    .filter(|s| !s.anchor_ok)
                    .map(|s| json!({ "stratum": s.stratum, "min": s.min, "max": s.max, "eta": s.eta, "anchor": s.printed_anchor }))
                    .collect();
                let no_window: Vec<&str> =
                    a.strata.iter().filter(|s| !s.window_exists).map(|s| s.stratum.as_str()).collect();
                let status = if !no_window.is_empty() {
                    Status::Fail
                } else if !off.is_empty() {
                    Status::Finding
                } else {
                    Status::Pass
                };
                section(
                    check,
                    status,
                    format!(
                        "{} strata, {} without a window, {} outside the printed anchor",
                        a.strata.len(),
                        no_window.len(),
                        off.len()
                    ),
                    json!({ "strata": a.strata.len(), "without_window": no_window, "anchor_mismatches": off }),
                )
            }
            Check::Maxmin => {
                if n % 2 == 1 {
                    section(check, Status::Pass, "not applicable for odd n", json!({ "applicable": false }))
                } else {
                    let a = maxmin_audit(n)?;
                    let bad: Vec<_> = a.mismatches().cloned().collect();
                    section(
                        check,
                        if bad.is_empty() { Status::Pass } else { Status::Finding },
                        format!("{} index sets, {} mismatches", a.entries.len(), bad.len()),
                        json!({ "entries": a.entries.len(), "mismatches": bad }),
                    )
                }
            }
            Check::Exceptional => {
                let r = self.exceptional()?;
                section(
                    check,
                    pass_fail(r.passed()),
                    format!("{} pairs, {} failures", r.pairs_checked, r.failures.len()),
                    json!({
                        "pairs": r.pairs_checked,
                        "methods": r.method_counts,
                        "failures": r.failures,
                        "torsion_to_line_bundle_nonzero": r.torsion_to_line_bundle_nonzero,
                    }),
                )
            }
            Check::Gram => {
                let ok = self.gram_ok()?;
                let r = self.exceptional()?;
                section(
                    check,
                    pass_fail(ok),
                    format!("size {}, unitriangular {}, det {}", r.gram.size(), r.gram_unitriangular, r.determinant),
                    json!({ "size": r.gram.size(), "unitriangular": r.gram_unitriangular, "determinant": r.determinant }),
                )
            }
            Check::Fullness => {
                if !self.gram_ok()? {
                    return Ok(section(check, Status::Fail, "Gram matrix not unimodular", Value::Null));
                }
                let r = verify_fullness_with(n, self.max_p)?;
                let failing: Vec<_> = r.targets.iter().filter(|t| !t.passed).collect();
                let largest = r.targets.iter().map(|t| t.nodes).max().unwrap_or(0);
                let sizes: BTreeMap<&str, usize> = r.targets.iter().map(|t| (t.target.as_str(), t.nodes)).collect();
                section(
                    check,
                    pass_fail(failing.is_empty()),
                    format!(
                        "{} targets certified of {}, {} nodes, largest certificate {largest}",
                        r.targets.len() - failing.len(),
                        r.targets.len(),
                        r.total_nodes
                    ),
                    json!({ "targets": r.targets.len(), "nodes": r.total_nodes, "certificate_sizes": sizes, "failing": failing }),
                )
            }
            Check::Dictionary => {
                let a = dictionary_audit(n)?;
                section(
                    check,
                    pass_fail(a.failures.is_empty()),
                    format!("{} relations, {} forms, {} failures", a.relations_checked, a.forms_checked, a.failures.len()),
                    serde_json::to_value(&a).map_err(|e| Error::Io(e.to_string()))?,
                )
            }
        })
    }
}

fn execute(config: &RunConfig) -> Report {
    let mut checks = config.checks.clone();
    checks.sort();
    checks.dedup();
    let mut runner = Runner { n: config.n, max_p: config.max_p, exceptional: None };
    let mut sections = Vec::new();
    for check in checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| runner.run_one(check)));
        let mut s = match outcome {
            Ok(Ok(s)) => s,
            Ok(Err(e)) => section(check, Status::Fail, format!("error: {e}"), Value::Null),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "unknown panic".into());
                section(check, Status::Fail, format!("panic: {msg}"), Value::Null)
            }
        };
        s.millis = Some(start.elapsed().as_millis());
        sections.push(s);
    }
    Report { schema: REPORT_SCHEMA.into(), tool_version: TOOL_VERSION.into(), n: config.n, sections }
}

/// Runs the selected checks in dependency order and writes the report if an
/// output path is set.
pub fn run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let report = match config.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| execute(config)),
        None => execute(config),
    };
    if let Some(path) = &config.out {
        std::fs::write(path, report.render(config.format)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(matches!(RunConfig::new(1, &[Check::Enumerate]), Err(Error::Config(_))));
        assert!(RunConfig::new(4, &[]).is_err());
        assert!("gram".parse::<Check>().is_ok());
        assert!("bogus".parse::<Check>().is_err());
    }

    #[test]
    fn enumerate_only() {
        let r = run(&RunConfig::new(3, &[Check::Enumerate]).unwrap()).unwrap();
        assert_eq!(r.sections.len(), 1);
        assert_eq!(r.sections[0].status, Status::Pass);
        assert_eq!(r.sections[0].evidence["items"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn n4_all_checks() {
        let r = run(&RunConfig::new(4, &Check::ALL).unwrap()).unwrap();
        assert_eq!(r.sections.len(), 8);
        for s in &r.sections {
            assert!(
                s.status == Status::Pass || (s.check == Check::Windows && s.status == Status::Finding),
                "{s:?}"
            );
        }
        assert!(r.ok());
        let again = run(&RunConfig::new(4, &Check::ALL).unwrap()).unwrap();
        assert_eq!(r.without_timing().to_json().unwrap(), again.without_timing().to_json().unwrap());
    }

    #[test]
    fn odd_anchor_findings_do_not_fail() {
        let r = run(&RunConfig::new(3, &[Check::Windows]).unwrap()).unwrap();
        assert_eq!(r.status_of(Check::Windows), Some(Status::Finding));
        assert!(r.ok());
    }

    #[test]
    fn dictionary_small() {
        for n in 2..=7 {
            let a = dictionary_audit(n).unwrap();
            assert!(a.failures.is_empty(), "n={n}: {:?}", a.failures);
        }
    }
}
