//! Theory stack: ordered theories with their LAWS, CONJECTURES and THEOREMS
//! tables, table editing, promotion and JSON persistence.
//!
//! The stack is stored bottom first; `_ROOT` is always at index 0. A theory
//! sees its own laws and theorems plus everything below it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::focus::FocusPath;
use crate::syntax::{parse_schema, parse_term, render_schema, render_term, SyntaxError};
use crate::term::{NotFreeIn, SideCondition, Term};
use crate::types::{infer, TypeError};

pub const ROOT_THEORY: &str = "_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Axiom,
    Proven,
    Asserted,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Axiom => "axiom",
            Provenance::Proven => "proven",
            Provenance::Asserted => "asserted",
        })
    }
}

/// Which side of an equational law is matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Match the left side, replace with the right.
    LtoR,
    /// Match the right side, replace with the left.
    RtoL,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::LtoR, Direction::RtoL];

    pub fn label(self) -> &'static str {
        match self {
            Direction::LtoR => "L-to-R",
            Direction::RtoL => "R-to-L",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L-to-R" => Ok(Direction::LtoR),
            "R-to-L" => Ok(Direction::RtoL),
            other => Err(format!("unknown direction `{other}` (expected L-to-R or R-to-L)")),
        }
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Law {
    pub name: String,
    pub provenance: Provenance,
    pub side_condition: SideCondition,
    /// Pattern form: free variables are schematic.
    pub schema: Term,
    /// Owning theory name.
    pub owner: String,
}

impl Law {
    /// `(lhs, rhs)` for laws whose top operator is `==` or `=`.
    pub fn sides(&self) -> Option<(&Term, &Term)> {
        match &self.schema {
            Term::Conn(crate::term::Connective::Equiv, args)
            | Term::App(crate::term::Operator::Eq, args) => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    /// `(pattern, replacement)` for the given direction.
    pub fn oriented(&self, dir: Direction) -> Option<(&Term, &Term)> {
        let (l, r) = self.sides()?;
        Some(match dir {
            Direction::LtoR => (l, r),
            Direction::RtoL => (r, l),
        })
    }

    pub fn is_rewritable(&self) -> bool {
        self.sides().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjecture {
    pub name: String,
    pub schema: Term,
    pub side_condition: SideCondition,
}

/// One applied step as kept with a theorem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredStep {
    pub law: String,
    pub direction: Direction,
    pub path: FocusPath,
    pub instantiation: BTreeMap<String, String>,
    /// Goal after the step, rendered.
    pub goal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredProof {
    pub strategy: String,
    pub steps: Vec<StoredStep>,
    pub transcript: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem {
    pub name: String,
    pub schema: Term,
    pub side_condition: SideCondition,
    pub proof: StoredProof,
}

impl Theorem {
    /// The theorem as a usable law.
    pub fn as_law(&self, owner: &str) -> Law {
        Law {
            name: self.name.clone(),
            provenance: Provenance::Proven,
            side_condition: self.side_condition.clone(),
            schema: self.schema.schematized(),
            owner: owner.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Theory {
    pub name: String,
    pub version: u64,
    pub laws: Vec<Law>,
    pub conjectures: Vec<Conjecture>,
    pub theorems: Vec<Theorem>,
    /// Serialized content at the last load or save; `None` for a theory
    /// that has never been persisted.
    baseline: Option<String>,
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.version == other.version
            && self.laws == other.laws
            && self.conjectures == other.conjectures
            && self.theorems == other.theorems
    }
}

impl Eq for Theory {}

impl Theory {
    pub fn new(name: impl Into<String>) -> Self {
        Theory {
            name: name.into(),
            version: 0,
            laws: Vec::new(),
            conjectures: Vec::new(),
            theorems: Vec::new(),
            baseline: None,
        }
    }

    /// `Sets$0`.
    pub fn display_name(&self) -> String {
        format!("{}${}", self.name, self.version)
    }

    pub fn law(&self, name: &str) -> Option<&Law> {
        self.laws.iter().find(|l| l.name == name)
    }

    pub fn conjecture(&self, name: &str) -> Option<&Conjecture> {
        self.conjectures.iter().find(|c| c.name == name)
    }

    pub fn theorem(&self, name: &str) -> Option<&Theorem> {
        self.theorems.iter().find(|t| t.name == name)
    }

    fn has_name(&self, name: &str) -> bool {
        self.law(name).is_some() || self.conjecture(name).is_some() || self.theorem(name).is_some()
    }

    /// Laws then theorems, as usable laws.
    pub fn usable_laws(&self) -> impl Iterator<Item = Law> + '_ {
        self.laws
            .iter()
            .cloned()
            .chain(self.theorems.iter().map(|t| t.as_law(&self.name)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    Laws,
    Conjectures,
    Theorems,
}

impl FromStr for Table {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "laws" => Ok(Table::Laws),
            "conjectures" => Ok(Table::Conjectures),
            "theorems" => Ok(Table::Theorems),
            other => Err(format!("unknown table `{other}`")),
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Table::Laws => "laws",
            Table::Conjectures => "conjectures",
            Table::Theorems => "theorems",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditAction {
    Add,
    Update,
    Delete,
}

/// A table row as entered by a user. For deletes only `name` matters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RowInput {
    pub name: String,
    #[serde(default)]
    pub schema: String,
    #[serde(default)]
    pub side_conditions: Vec<SideConditionFile>,
    #[serde(default)]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("no row `{name}` in {table}")]
    UnknownRow { table: Table, name: String },
    #[error("name `{0}` already used in this theory")]
    DuplicateName(String),
    #[error("theory `{0}` appears twice in the stack")]
    DuplicateTheory(String),
    #[error("{table} table is not editable")]
    NotEditable { table: Table },
    #[error("{context}: {source}")]
    Syntax {
        context: String,
        #[source]
        source: SyntaxError,
    },
    #[error("{context}: {source}")]
    Type {
        context: String,
        #[source]
        source: TypeError,
    },
    #[error("{context}: side condition names `{target}`, which is not a schematic variable of the law")]
    InvalidSideCondition { context: String, target: String },
    #[error("{context}: binder `{name}` is bound more than once")]
    RepeatedBinder { context: String, name: String },
    #[error("{context}: provenance `proven` is reserved for theorems")]
    ProvenLawWithoutProof { context: String },
    #[error("{file}:{line}:{column}: {message}")]
    Format {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryStack {
    theories: Vec<Theory>,
}

impl Default for TheoryStack {
    fn default() -> Self {
        Self::new()
    }
}

impl TheoryStack {
    /// A stack holding only `_ROOT`.
    pub fn new() -> Self {
        TheoryStack {
            theories: vec![Theory::new(ROOT_THEORY)],
        }
    }

    /// Build from theories listed bottom first.
    pub fn from_theories(theories: Vec<Theory>) -> Result<Self, StoreError> {
        let stack = TheoryStack { theories };
        stack.validate("<memory>")?;
        Ok(stack)
    }

    fn validate(&self, file: &str) -> Result<(), StoreError> {
        match self.theories.first() {
            Some(t) if t.name == ROOT_THEORY => {}
            _ => {
                return Err(StoreError::Format {
                    file: file.to_string(),
                    line: 1,
                    column: 1,
                    message: format!("`{ROOT_THEORY}` must be the bottom theory"),
                })
            }
        }
        let mut seen = BTreeSet::new();
        for t in &self.theories {
            if !seen.insert(t.name.as_str()) {
                return Err(StoreError::DuplicateTheory(t.name.clone()));
            }
            let mut names = BTreeSet::new();
            let all = t
                .laws
                .iter()
                .map(|l| &l.name)
                .chain(t.conjectures.iter().map(|c| &c.name))
                .chain(t.theorems.iter().map(|c| &c.name));
            for n in all {
                if !names.insert(n) {
                    return Err(StoreError::DuplicateName(n.clone()));
                }
            }
        }
        Ok(())
    }

    /// Bottom first.
    pub fn theories(&self) -> &[Theory] {
        &self.theories
    }

    pub fn theory(&self, name: &str) -> Result<&Theory, StoreError> {
        self.theories
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| StoreError::UnknownTheory(name.to_string()))
    }

    fn index_of(&self, name: &str) -> Result<usize, StoreError> {
        self.theories
            .iter()
            .position(|t| t.name == name)
            .ok_or_else(|| StoreError::UnknownTheory(name.to_string()))
    }

    /// Push a new theory on top.
    pub fn push(&mut self, theory: Theory) -> Result<(), StoreError> {
        if self.theories.iter().any(|t| t.name == theory.name) {
            return Err(StoreError::DuplicateTheory(theory.name));
        }
        self.theories.push(theory);
        Ok(())
    }

    /// Laws visible from `from`: its own laws and theorems, then those of
    /// each theory below, nearest first.
    pub fn visible_laws(&self, from: &str) -> Result<Vec<Law>, StoreError> {
        let top = self.index_of(from)?;
        Ok(self.theories[..=top]
            .iter()
            .rev()
            .flat_map(Theory::usable_laws)
            .collect())
    }

    /// Distance from `from` down to `owner` (0 = same theory).
    pub fn depth_below(&self, from: &str, owner: &str) -> Option<usize> {
        let top = self.index_of(from).ok()?;
        let own = self.index_of(owner).ok()?;
        top.checked_sub(own)
    }

    /// Apply a table edit, returning the new stack.
    pub fn edit_table(
        &self,
        theory: &str,
        table: Table,
        action: EditAction,
        row: &RowInput,
    ) -> Result<TheoryStack, StoreError> {
        let idx = self.index_of(theory)?;
        let mut next = self.clone();
        let th = &mut next.theories[idx];
        let context = format!("{}/{}/{}", theory, table, row.name);
        let missing = || StoreError::UnknownRow {
            table,
            name: row.name.clone(),
        };
        match (table, action) {
            (Table::Theorems, _) => return Err(StoreError::NotEditable { table }),
            (Table::Laws, EditAction::Delete) => {
                let pos = th.laws.iter().position(|l| l.name == row.name).ok_or_else(missing)?;
                th.laws.remove(pos);
            }
            (Table::Conjectures, EditAction::Delete) => {
                let pos = th
                    .conjectures
                    .iter()
                    .position(|c| c.name == row.name)
                    .ok_or_else(missing)?;
                th.conjectures.remove(pos);
            }
            (Table::Laws, EditAction::Add) => {
                if th.has_name(&row.name) {
                    return Err(StoreError::DuplicateName(row.name.clone()));
                }
                let law = law_from_row(row, theory, Provenance::Asserted, &context)?;
                th.laws.push(law);
            }
            (Table::Laws, EditAction::Update) => {
                let pos = th.laws.iter().position(|l| l.name == row.name).ok_or_else(missing)?;
                let keep = th.laws[pos].provenance;
                th.laws[pos] = law_from_row(row, theory, keep, &context)?;
            }
            (Table::Conjectures, EditAction::Add) => {
                if th.has_name(&row.name) {
                    return Err(StoreError::DuplicateName(row.name.clone()));
                }
                th.conjectures.push(conjecture_from_row(row, &context)?);
            }
            (Table::Conjectures, EditAction::Update) => {
                let pos = th
                    .conjectures
                    .iter()
                    .position(|c| c.name == row.name)
                    .ok_or_else(missing)?;
                th.conjectures[pos] = conjecture_from_row(row, &context)?;
            }
        }
        Ok(next)
    }

    /// Move a conjecture to the THEOREMS table with its proof attached.
    pub fn promote_conjecture(
        &self,
        theory: &str,
        name: &str,
        proof: StoredProof,
    ) -> Result<TheoryStack, StoreError> {
        let idx = self.index_of(theory)?;
        let mut next = self.clone();
        let th = &mut next.theories[idx];
        let pos = th
            .conjectures
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| StoreError::UnknownRow {
                table: Table::Conjectures,
                name: name.to_string(),
            })?;
        let conj = th.conjectures.remove(pos);
        th.theorems.push(Theorem {
            name: conj.name,
            schema: conj.schema,
            side_condition: conj.side_condition,
            proof,
        });
        Ok(next)
    }

    /// Serialized form with the current version numbers.
    pub fn to_json(&self) -> String {
        let file = StackFile {
            theories: self.theories.iter().map(TheoryFile::from_theory).collect(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("stack serializes");
        out.push('\n');
        out
    }

    /// Parse a stack document. `file` is used in diagnostics only.
    pub fn from_json(src: &str, file: &str) -> Result<TheoryStack, StoreError> {
        let parsed: StackFile = serde_json::from_str(src).map_err(|e| StoreError::Format {
            file: file.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut theories = Vec::with_capacity(parsed.theories.len());
        for tf in parsed.theories {
            let mut th = tf.into_theory()?;
            th.baseline = Some(content_fingerprint(&th));
            theories.push(th);
        }
        let stack = TheoryStack { theories };
        stack.validate(file)?;
        Ok(stack)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TheoryStack, StoreError> {
        let path = path.as_ref();
        let file = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|source| StoreError::Io {
            file: file.clone(),
            source,
        })?;
        Self::from_json(&src, &file)
    }

    /// Bump the version of every theory whose content differs from what was
    /// last loaded or saved. Theories never persisted keep their version.
    pub fn commit_versions(&mut self) {
        for th in &mut self.theories {
            let now = content_fingerprint(th);
            if th.baseline.as_ref().is_some_and(|b| *b != now) {
                th.version += 1;
            }
            th.baseline = Some(now);
        }
    }

    pub fn save(&mut self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        self.commit_versions();
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| StoreError::Io {
            file: path.display().to_string(),
            source,
        })
    }
}

fn parse_side_conditions(rows: &[SideConditionFile]) -> SideCondition {
    SideCondition(
        rows.iter()
            .map(|r| NotFreeIn {
                var: r.not_free_in.0.clone(),
                target: r.not_free_in.1.clone(),
            })
            .collect(),
    )
}

pub(crate) fn law_from_row(row: &RowInput, owner: &str, default: Provenance, context: &str) -> Result<Law, StoreError> {
    let provenance = row.provenance.unwrap_or(default);
    if provenance == Provenance::Proven {
        return Err(StoreError::ProvenLawWithoutProof {
            context: context.to_string(),
        });
    }
    let schema = parse_schema(&row.schema).map_err(|source| StoreError::Syntax {
        context: context.to_string(),
        source,
    })?;
    infer(&schema).map_err(|source| StoreError::Type {
        context: context.to_string(),
        source,
    })?;
    if let Some(name) = repeated_binder(&schema) {
        return Err(StoreError::RepeatedBinder {
            context: context.to_string(),
            name,
        });
    }
    let side_condition = parse_side_conditions(&row.side_conditions);
    let metas = schema.metas();
    if let Some(bad) = side_condition.0.iter().find(|c| !metas.contains(&c.target)) {
        return Err(StoreError::InvalidSideCondition {
            context: context.to_string(),
            target: bad.target.clone(),
        });
    }
    Ok(Law {
        name: row.name.clone(),
        provenance,
        side_condition,
        schema,
        owner: owner.to_string(),
    })
}

/// Law binders map to goal names one to one, so a law may bind each name
/// only once.
pub fn repeated_binder(t: &Term) -> Option<String> {
    fn go(t: &Term, seen: &mut BTreeSet<String>) -> Option<String> {
        if let Term::Quant(_, bs, _) = t {
            for b in bs {
                if !seen.insert(b.clone()) {
                    return Some(b.clone());
                }
            }
        }
        t.children().into_iter().find_map(|c| go(c, seen))
    }
    go(t, &mut BTreeSet::new())
}

pub(crate) fn conjecture_from_row(row: &RowInput, context: &str) -> Result<Conjecture, StoreError> {
    let schema = parse_term(&row.schema).map_err(|source| StoreError::Syntax {
        context: context.to_string(),
        source,
    })?;
    infer(&schema).map_err(|source| StoreError::Type {
        context: context.to_string(),
        source,
    })?;
    Ok(Conjecture {
        name: row.name.clone(),
        schema,
        side_condition: parse_side_conditions(&row.side_conditions),
    })
}

fn content_fingerprint(th: &Theory) -> String {
    let mut tf = TheoryFile::from_theory(th);
    tf.version = 0;
    serde_json::to_string(&tf).expect("theory serializes")
}

// On-disk shapes.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StackFile {
    theories: Vec<TheoryFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct TheoryFile {
    name: String,
    version: u64,
    #[serde(default)]
    laws: Vec<LawFile>,
    #[serde(default)]
    conjectures: Vec<ConjectureFile>,
    #[serde(default)]
    theorems: Vec<TheoremFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SideConditionFile {
    /// `[var, schematic]`.
    pub not_free_in: (String, String),
}

impl From<&NotFreeIn> for SideConditionFile {
    fn from(c: &NotFreeIn) -> Self {
        SideConditionFile {
            not_free_in: (c.var.clone(), c.target.clone()),
        }
    }
}

pub fn side_condition_rows(sc: &SideCondition) -> Vec<SideConditionFile> {
    sc.0.iter().map(SideConditionFile::from).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct LawFile {
    name: String,
    provenance: Provenance,
    schema: String,
    #[serde(default)]
    side_conditions: Vec<SideConditionFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ConjectureFile {
    name: String,
    schema: String,
    #[serde(default)]
    side_conditions: Vec<SideConditionFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct TheoremFile {
    name: String,
    schema: String,
    #[serde(default)]
    side_conditions: Vec<SideConditionFile>,
    proof: StoredProof,
}

impl TheoryFile {
    fn from_theory(th: &Theory) -> Self {
        TheoryFile {
            name: th.name.clone(),
            version: th.version,
            laws: th
                .laws
                .iter()
                .map(|l| LawFile {
                    name: l.name.clone(),
                    provenance: l.provenance,
                    schema: render_schema(&l.schema),
                    side_conditions: side_condition_rows(&l.side_condition),
                })
                .collect(),
            conjectures: th
                .conjectures
                .iter()
                .map(|c| ConjectureFile {
                    name: c.name.clone(),
                    schema: render_term(&c.schema),
                    side_conditions: side_condition_rows(&c.side_condition),
                })
                .collect(),
            theorems: th
                .theorems
                .iter()
                .map(|t| TheoremFile {
                    name: t.name.clone(),
                    schema: render_term(&t.schema),
                    side_conditions: side_condition_rows(&t.side_condition),
                    proof: t.proof.clone(),
                })
                .collect(),
        }
    }

    fn into_theory(self) -> Result<Theory, StoreError> {
        let mut th = Theory::new(self.name.clone());
        th.version = self.version;
        for l in self.laws {
            let context = format!("{}/laws/{}", self.name, l.name);
            let row = RowInput {
                name: l.name,
                schema: l.schema,
                side_conditions: l.side_conditions,
                provenance: Some(l.provenance),
            };
            th.laws.push(law_from_row(&row, &self.name, Provenance::Axiom, &context)?);
        }
        for c in self.conjectures {
            let context = format!("{}/conjectures/{}", self.name, c.name);
            let row = RowInput {
                name: c.name,
                schema: c.schema,
                side_conditions: c.side_conditions,
                provenance: None,
            };
            th.conjectures.push(conjecture_from_row(&row, &context)?);
        }
        for t in self.theorems {
            let context = format!("{}/theorems/{}", self.name, t.name);
            let schema = parse_term(&t.schema).map_err(|source| StoreError::Syntax {
                context: context.clone(),
                source,
            })?;
            th.theorems.push(Theorem {
                name: t.name,
                schema,
                side_condition: parse_side_conditions(&t.side_conditions),
                proof: t.proof,
            });
        }
        Ok(th)
    }
}
