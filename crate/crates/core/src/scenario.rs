//! Scenario files: a group, its maximal-subgroup data and the class tuples
//! to decide.
//!
//! ```text
//! [group]
//! table = j1.ctb
//! gens = j1.prm
//!
//! [subgroup]
//! name = L2(11)
//! order = 660
//! soluble = false
//! table = l2_11.ctb
//! fusion = 1A:1A,2A:2A,3A:3A,5A:5A,5B:5B,6A:6A,11A:11A,11B:11A
//! copies = 2;action:j1.prm
//!
//! [tuple]
//! classes = 2A,3A,11A
//! ```
//!
//! `[subgroup]` sections before the first `[tuple]` apply to every tuple;
//! `[subgroup]`, `[ree]` and `[external]` sections after a tuple apply to
//! that tuple only. Paths are relative to the scenario file. `fusion` is
//! either an inline `h:g` list or a file holding one. `copies` lists one or
//! more sources separated by `;`, which must agree: an integer,
//! `action:<prm>` (fixed points of the target class in that coset action) or
//! `fusion` (the permutation character read off the fusion map).

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::analysis::{ree_test, AnalysisError, Scenario, SubgroupRecord};
use crate::chartable::{lint_table, parse_table, CharacterTable, Diagnostic, TableError};
use crate::classalg::{
    check_restrictions, copies_from_fusion, ClassAlgError, ClassTuple, FusionMap,
};
use crate::oracle::{copies_containing, identify_classes, ClassIdentification, OracleError};
use crate::perm::{parse_prm, PermError, PermGroup};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{file}:{line}: {msg}")]
    Syntax {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}: {source}")]
    Table { path: String, source: TableError },
    #[error("{path}: table fails lint: {}", first_diag(.diagnostics))]
    Lint {
        path: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("{path}: {source}")]
    Prm { path: String, source: PermError },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    ClassAlg(ClassAlgError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

fn first_diag(d: &[Diagnostic]) -> String {
    d.first().map(|d| d.to_string()).unwrap_or_default()
}

impl From<ClassAlgError> for ScenarioError {
    fn from(e: ClassAlgError) -> Self {
        match e {
            ClassAlgError::UnknownClass(c) => ScenarioError::UnknownClass(c),
            other => ScenarioError::ClassAlg(other),
        }
    }
}

/// One `[section]` with its `key = value` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<(String, String, usize)>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    fn require(&self, key: &str, file: &str) -> Result<&str, ScenarioError> {
        self.get(key).ok_or_else(|| ScenarioError::Syntax {
            file: file.to_string(),
            line: self.line,
            msg: format!("[{}] needs `{key}`", self.name),
        })
    }
}

/// Splits SCN text into sections.
pub fn parse_sections(text: &str, file: &str) -> Result<Vec<Section>, ScenarioError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let err = |msg: &str| ScenarioError::Syntax {
            file: file.to_string(),
            line,
            msg: msg.to_string(),
        };
        if let Some(name) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim();
            if !matches!(name, "group" | "tuple" | "subgroup" | "ree" | "external") {
                return Err(err(&format!("unknown section [{name}]")));
            }
            out.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((k, v)) = s.split_once('=') else {
            return Err(err("expected `key = value`"));
        };
        let Some(sec) = out.last_mut() else {
            return Err(err("entry outside any section"));
        };
        sec.entries
            .push((k.trim().to_string(), v.trim().to_string(), line));
    }
    Ok(out)
}

type Reader = dyn Fn(&Path) -> std::io::Result<String> + Send + Sync;

/// Loads and caches the files a scenario refers to.
pub struct Loader {
    read: Box<Reader>,
    tables: Mutex<HashMap<PathBuf, Arc<CharacterTable>>>,
    groups: Mutex<HashMap<PathBuf, Arc<PermGroup>>>,
    idents: Mutex<HashMap<(PathBuf, PathBuf), Arc<ClassIdentification>>>,
}

impl Default for Loader {
    fn default() -> Self {
        Loader::new(Box::new(|p: &Path| std::fs::read_to_string(p)))
    }
}

impl Loader {
    pub fn new(read: Box<Reader>) -> Loader {
        Loader {
            read,
            tables: Mutex::new(HashMap::new()),
            groups: Mutex::new(HashMap::new()),
            idents: Mutex::new(HashMap::new()),
        }
    }

    pub fn read(&self, path: &Path) -> Result<String, ScenarioError> {
        (self.read)(path).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }

    /// Parses and lints a character table.
    pub fn table(&self, path: &Path) -> Result<Arc<CharacterTable>, ScenarioError> {
        if let Some(t) = self.tables.lock().unwrap().get(path) {
            return Ok(t.clone());
        }
        let name = path.display().to_string();
        let t = parse_table(&self.read(path)?).map_err(|source| ScenarioError::Table {
            path: name.clone(),
            source,
        })?;
        let diagnostics = lint_table(&t);
        if !diagnostics.is_empty() {
            return Err(ScenarioError::Lint {
                path: name,
                diagnostics,
            });
        }
        let t = Arc::new(t);
        self.tables
            .lock()
            .unwrap()
            .insert(path.to_path_buf(), t.clone());
        Ok(t)
    }

    pub fn group(&self, path: &Path) -> Result<Arc<PermGroup>, ScenarioError> {
        if let Some(g) = self.groups.lock().unwrap().get(path) {
            return Ok(g.clone());
        }
        let prm_err = |source| ScenarioError::Prm {
            path: path.display().to_string(),
            source,
        };
        let (n, gens) = parse_prm(&self.read(path)?).map_err(prm_err)?;
        let g = Arc::new(PermGroup::new(n, gens).map_err(prm_err)?);
        self.groups
            .lock()
            .unwrap()
            .insert(path.to_path_buf(), g.clone());
        Ok(g)
    }

    /// Class labels of `table` on the group generated by `prm`.
    pub fn identification(
        &self,
        table: &Path,
        prm: &Path,
    ) -> Result<Arc<ClassIdentification>, ScenarioError> {
        let key = (table.to_path_buf(), prm.to_path_buf());
        if let Some(id) = self.idents.lock().unwrap().get(&key) {
            return Ok(id.clone());
        }
        let id = Arc::new(identify_classes(self.group(prm)?, self.table(table)?)?);
        self.idents.lock().unwrap().insert(key, id.clone());
        Ok(id)
    }

    /// Loads every scenario in an SCN file.
    pub fn load_scenarios(&self, path: &Path) -> Result<ScenarioSet, ScenarioError> {
        let text = self.read(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        self.scenarios_from_str(&text, base, &path.display().to_string())
    }

    /// Builds scenarios from SCN text whose paths are relative to `base`.
    pub fn scenarios_from_str(
        &self,
        text: &str,
        base: &Path,
        file: &str,
    ) -> Result<ScenarioSet, ScenarioError> {
        let sections = parse_sections(text, file)?;
        let Some(group) = sections.iter().find(|s| s.name == "group") else {
            if sections.is_empty() {
                return Ok(ScenarioSet::default());
            }
            return Err(ScenarioError::Syntax {
                file: file.to_string(),
                line: 0,
                msg: "missing [group] section".into(),
            });
        };
        let table_path = base.join(group.require("table", file)?);
        let table = self.table(&table_path)?;
        let gens = group.get("gens").map(|g| base.join(g));

        let mut global: Vec<&Section> = Vec::new();
        let mut tuples: Vec<(&Section, Vec<&Section>)> = Vec::new();
        for s in &sections {
            match (s.name.as_str(), tuples.last_mut()) {
                ("group", _) => {}
                ("tuple", _) => tuples.push((s, Vec::new())),
                ("subgroup", None) => global.push(s),
                (_, Some((_, attached))) => attached.push(s),
                (other, None) => {
                    return Err(ScenarioError::Syntax {
                        file: file.to_string(),
                        line: s.line,
                        msg: format!("[{other}] must follow a [tuple]"),
                    })
                }
            }
        }

        let mut scenarios = Vec::new();
        for (tsec, attached) in tuples {
            let names: Vec<&str> = tsec
                .require("classes", file)?
                .split(',')
                .map(str::trim)
                .collect();
            let tuple = ClassTuple::from_names(&table, &names)?;
            let mut subgroups = Vec::new();
            for s in global
                .iter()
                .chain(attached.iter().filter(|s| s.name == "subgroup"))
            {
                subgroups.push(self.subgroup(s, base, file, &table_path, &table, &tuple)?);
            }
            let mut ree = None;
            let mut external = Vec::new();
            for s in &attached {
                match s.name.as_str() {
                    "ree" => {
                        let action = base.join(s.require("action", file)?);
                        let classes: Vec<&str> = match s.get("classes") {
                            Some(c) => c.split(',').map(str::trim).collect(),
                            None => names.clone(),
                        };
                        let id = self.identification(&table_path, &action)?;
                        let types = classes
                            .iter()
                            .map(|c| {
                                table
                                    .class_index(c)
                                    .map(|i| id.representative(i).cycle_type())
                                    .ok_or_else(|| ScenarioError::UnknownClass(c.to_string()))
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        ree = Some(ree_test(id.group().degree(), &types)?);
                    }
                    "external" => external.push(s.require("ref", file)?.to_string()),
                    _ => {}
                }
            }
            scenarios.push(Scenario {
                table: table.clone(),
                tuple,
                subgroups,
                ree,
                external,
            });
        }
        Ok(ScenarioSet {
            table: Some(table),
            table_path: Some(table_path),
            gens,
            scenarios,
        })
    }

    fn subgroup(
        &self,
        s: &Section,
        base: &Path,
        file: &str,
        big_path: &Path,
        big: &Arc<CharacterTable>,
        tuple: &ClassTuple,
    ) -> Result<SubgroupRecord, ScenarioError> {
        let bad = |msg: String| ScenarioError::Syntax {
            file: file.to_string(),
            line: s.line,
            msg,
        };
        let name = s.require("name", file)?.to_string();
        let order: u64 = s
            .require("order", file)?
            .parse()
            .map_err(|_| bad(format!("bad order for {name}")))?;
        if order == 0 || !big.group_order.is_multiple_of(order) {
            return Err(ScenarioError::Invalid(format!(
                "{name}: order {order} does not divide {}",
                big.group_order
            )));
        }
        let soluble = match s.require("soluble", file)? {
            "true" | "yes" => true,
            "false" | "no" => false,
            other => return Err(bad(format!("bad soluble flag `{other}`"))),
        };
        let sub_table = s
            .get("table")
            .map(|p| self.table(&base.join(p)))
            .transpose()?;
        if let Some(t) = &sub_table {
            if t.group_order != order {
                return Err(ScenarioError::Invalid(format!(
                    "{name}: table order {} differs from {order}",
                    t.group_order
                )));
            }
        }
        let fusion = match (s.get("fusion"), &sub_table) {
            (None, _) => None,
            (Some(_), None) => return Err(bad(format!("{name}: fusion needs a table"))),
            (Some(spec), Some(t)) => {
                let text = if spec.contains(':') {
                    spec.to_string()
                } else {
                    self.read(&base.join(spec))?.trim().to_string()
                };
                let f = parse_fusion(&text, t.clone(), big.clone())?;
                check_restrictions(&f)?;
                Some(f)
            }
        };
        let target = match (s.get("target"), &sub_table) {
            (None, _) => None,
            (Some(c), Some(t)) => Some(
                t.class_index(c)
                    .ok_or_else(|| ScenarioError::UnknownClass(c.to_string()))?,
            ),
            (Some(_), None) => return Err(bad(format!("{name}: target needs a table"))),
        };
        let (copies, copies_source) = match s.get("copies") {
            None => (None, "none".to_string()),
            Some(spec) => {
                let mut found: Vec<(String, u64)> = Vec::new();
                for part in spec.split(';').map(str::trim) {
                    if let Some(p) = part.strip_prefix("action:") {
                        let prm = base.join(p.trim());
                        let id = self.identification(big_path, &prm)?;
                        let c = copies_containing(id.representative(tuple.target()));
                        found.push(("action".into(), c));
                    } else if part == "fusion" {
                        let f = fusion
                            .as_ref()
                            .ok_or_else(|| bad(format!("{name}: copies=fusion needs a fusion")))?;
                        found.push(("fusion".into(), copies_from_fusion(f, tuple.target())?));
                    } else {
                        let c = part
                            .parse::<u64>()
                            .map_err(|_| bad(format!("bad copies `{part}`")))?;
                        found.push(("scenario".into(), c));
                    }
                }
                if let Some((src, c)) = found.iter().find(|(_, c)| *c != found[0].1) {
                    return Err(ScenarioError::Invalid(format!(
                        "{name}: copies from {} = {} but from {src} = {c}",
                        found[0].0, found[0].1
                    )));
                }
                let sources: Vec<&str> = found.iter().map(|(s, _)| s.as_str()).collect();
                (found.first().map(|f| f.1), sources.join("+"))
            }
        };
        Ok(SubgroupRecord {
            name,
            order,
            soluble,
            fusion,
            copies,
            copies_source,
            target,
        })
    }
}

/// Parses `h:g,h:g,…` into a validated fusion map.
pub fn parse_fusion(
    text: &str,
    sub: Arc<CharacterTable>,
    sup: Arc<CharacterTable>,
) -> Result<FusionMap, ScenarioError> {
    let pairs = text
        .split(',')
        .map(|p| {
            p.split_once(':')
                .map(|(h, g)| (h.trim(), g.trim()))
                .ok_or_else(|| ScenarioError::Invalid(format!("bad fusion entry `{p}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FusionMap::from_names(sub, sup, &pairs)?)
}

/// Scenarios loaded from one file.
#[derive(Debug, Clone, Default)]
pub struct ScenarioSet {
    pub table: Option<Arc<CharacterTable>>,
    pub table_path: Option<PathBuf>,
    /// Generators of the whole group, for oracle cross-checks.
    pub gens: Option<PathBuf>,
    pub scenarios: Vec<Scenario>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_errors() {
        let s = parse_sections(
            "# c\n[group]\ntable = x.ctb\n\n[tuple]\nclasses=2A,3A,5A\n",
            "t",
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].get("table"), Some("x.ctb"));
        assert_eq!(s[1].get("classes"), Some("2A,3A,5A"));
        assert!(matches!(
            parse_sections("table = x\n", "t"),
            Err(ScenarioError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_sections("[bogus]\n", "t"),
            Err(ScenarioError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_sections("[group]\nno equals\n", "t"),
            Err(ScenarioError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn empty_file_gives_no_scenarios() {
        let set = Loader::default()
            .scenarios_from_str("# nothing\n", Path::new("."), "t")
            .unwrap();
        assert!(set.scenarios.is_empty());
    }
}
