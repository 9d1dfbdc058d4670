//! JSON shapes sent to clients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use eqproof::focus::{FocusPath, Move};
use eqproof::matcher::{default_instantiation, MatchResult, MenuEntry, UnboundKind};
use eqproof::proof::{ProofState, Strategy};
use eqproof::syntax::{render_schema, render_term, render_with_spans, SpanTree};
use eqproof::term::{free_vars, Binding};
use eqproof::theory::{side_condition_rows, Direction, EditAction, Provenance, RowInput, SideConditionFile, Table, Theory};
use eqproof::types::{infer_focus, FocusClass};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TheorySummary {
    pub name: String,
    pub version: u64,
    pub display_name: String,
    pub laws: usize,
    pub conjectures: usize,
    pub theorems: usize,
}

impl From<&Theory> for TheorySummary {
    fn from(t: &Theory) -> Self {
        TheorySummary {
            name: t.name.clone(),
            version: t.version,
            display_name: t.display_name(),
            laws: t.laws.len(),
            conjectures: t.conjectures.len(),
            theorems: t.theorems.len(),
        }
    }
}

/// Theories bottom first.
#[derive(Debug, Clone, Serialize)]
pub struct StackSummary {
    pub theories: Vec<TheorySummary>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RowView {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    /// Display form, e.g. `x notin P`.
    pub side_condition: String,
    pub side_conditions: Vec<SideConditionFile>,
    pub schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableView {
    pub theory: String,
    pub table: Table,
    pub rows: Vec<RowView>,
}

pub fn table_view(t: &Theory, table: Table) -> TableView {
    let rows = match table {
        Table::Laws => t
            .laws
            .iter()
            .map(|l| RowView {
                name: l.name.clone(),
                provenance: Some(l.provenance),
                side_condition: l.side_condition.to_string(),
                side_conditions: side_condition_rows(&l.side_condition),
                schema: render_schema(&l.schema),
                transcript: None,
            })
            .collect(),
        Table::Conjectures => t
            .conjectures
            .iter()
            .map(|c| RowView {
                name: c.name.clone(),
                provenance: None,
                side_condition: c.side_condition.to_string(),
                side_conditions: side_condition_rows(&c.side_condition),
                schema: render_term(&c.schema),
                transcript: None,
            })
            .collect(),
        Table::Theorems => t
            .theorems
            .iter()
            .map(|th| RowView {
                name: th.name.clone(),
                provenance: Some(Provenance::Proven),
                side_condition: th.side_condition.to_string(),
                side_conditions: side_condition_rows(&th.side_condition),
                schema: render_term(&th.schema),
                transcript: Some(th.proof.transcript.clone()),
            })
            .collect(),
    };
    TableView {
        theory: t.name.clone(),
        table,
        rows,
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct EditRequest {
    pub action: EditAction,
    pub row: RowInput,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StartRequest {
    pub theory: String,
    pub conjecture: String,
    #[serde(default = "default_strategy")]
    pub strategy: String,
}

fn default_strategy() -> String {
    Strategy::Reduce.key().to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FocusRequest {
    #[serde(rename = "move")]
    pub mv: Option<Move>,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApplyRequest {
    pub law_name: String,
    pub direction: Direction,
    /// Defaults to the current focus.
    pub path: Option<String>,
    /// Instances for unbound names, as concrete syntax.
    pub instantiation: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct MatchesQuery {
    pub limit: Option<usize>,
    pub heuristic: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarType {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepView {
    pub law: String,
    pub direction: Direction,
    pub path: FocusPath,
    pub justification: String,
    pub goal: String,
}

/// Everything a client needs to draw a proof window.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProofView {
    pub id: String,
    pub theory: String,
    pub conjecture: String,
    pub strategy: Strategy,
    pub strategy_phrase: &'static str,
    pub schema: String,
    pub side_condition: String,
    pub target: String,
    pub goal: String,
    /// Character spans of every node of `goal`, keyed by path.
    pub spans: SpanTree,
    pub focus: FocusPath,
    pub focus_span: Span,
    pub focus_text: String,
    /// `EXPR : B`-style line.
    pub status: String,
    pub focus_class: Option<FocusClass>,
    pub focus_type: Option<String>,
    /// Free variables of the focus with their types.
    pub free_vars: Vec<VarType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub active_side: Option<usize>,
    pub complete: bool,
    pub can_undo: bool,
    pub steps: Vec<StepView>,
}

pub fn proof_view(id: &str, st: &ProofState) -> ProofView {
    let (goal, spans) = render_with_spans(st.current());
    let focus = st.focus_path().clone();
    let node = spans.find(&focus).expect("focus path is valid");
    let focus_span = Span {
        start: node.start,
        end: node.end,
    };
    let focused = st.focused();
    let typing = infer_focus(&focused).ok();
    let fv = free_vars(focused.focus());
    let free = fv
        .iter()
        .map(|v| VarType {
            name: v.clone(),
            ty: typing
                .as_ref()
                .and_then(|a| a.var_types.get(v))
                .map_or_else(|| "?".to_string(), ToString::to_string),
        })
        .collect();
    ProofView {
        id: id.to_string(),
        theory: st.theory.clone(),
        conjecture: st.name.clone(),
        strategy: st.strategy,
        strategy_phrase: st.strategy.phrase(),
        schema: render_term(&st.schema),
        side_condition: st.side_condition.to_string(),
        target: st.target_text(),
        goal,
        spans: spans.clone(),
        focus,
        focus_span,
        focus_text: render_term(focused.focus()),
        status: typing
            .as_ref()
            .map_or_else(|| "ill-typed".to_string(), |a| a.status_line()),
        focus_class: typing.as_ref().map(|a| a.focus_class),
        focus_type: typing.as_ref().map(|a| a.focus_type.to_string()),
        free_vars: free,
        active_side: st.active_side(),
        complete: st.is_complete(),
        can_undo: !st.steps().is_empty(),
        steps: st
            .steps()
            .iter()
            .map(|s| StepView {
                law: s.law.clone(),
                direction: s.direction,
                path: s.path.clone(),
                justification: s.justification(),
                goal: render_term(&s.after),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FocusResponse {
    /// The move or path was refused; the view is unchanged.
    pub blocked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub view: ProofView,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnboundView {
    pub name: String,
    pub kind: UnboundKind,
    /// Offered default instance, as concrete syntax.
    pub default: String,
}

pub fn unbound_views(m: &MatchResult, defaults: &Binding) -> Vec<UnboundView> {
    m.unbound
        .iter()
        .map(|u| UnboundView {
            name: u.name.clone(),
            kind: u.kind,
            default: match u.kind {
                UnboundKind::Binder => defaults.binders[&u.name].clone(),
                _ => render_term(&defaults.terms[&u.name]),
            },
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchView {
    pub index: usize,
    #[serde(flatten)]
    pub entry: MenuEntry,
    pub provenance: Provenance,
    pub unbound_details: Vec<UnboundView>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchesView {
    pub path: FocusPath,
    pub entries: Vec<MatchView>,
}

pub fn matches_view(st: &ProofState, menu: &[MatchResult]) -> MatchesView {
    let focused = st.focused();
    MatchesView {
        path: st.focus_path().clone(),
        entries: menu
            .iter()
            .enumerate()
            .map(|(i, m)| MatchView {
                index: i,
                entry: MenuEntry::from(m),
                provenance: m.law.provenance,
                unbound_details: unbound_views(m, &default_instantiation(m, &focused)),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApplyResponse {
    pub needs_instantiation: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unbound: Vec<UnboundView>,
    pub view: ProofView,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PromoteResponse {
    pub theory: String,
    pub theorem: String,
    pub theorems: TableView,
    pub view: ProofView,
}
