use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use eqproof::seed::seed_stack;
use eqproof::theory::TheoryStack;
use eqproof_server::{router, AppState};

const GOLDEN: &str = include_str!("../../../data/intsct-comm.golden");

struct Client {
    state: Arc<AppState>,
    app: Router,
}

impl Client {
    fn new() -> Self {
        Self::with_state(AppState::new(seed_stack()))
    }

    fn with_state(state: AppState) -> Self {
        let state = Arc::new(state);
        Client {
            app: router(state.clone()),
            state,
        }
    }

    async fn raw(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, String) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let resp = self.app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    async fn get(&self, uri: &str) -> (StatusCode, Value) {
        let (s, b) = self.raw(Method::GET, uri, None).await;
        (s, serde_json::from_str(&b).unwrap_or(Value::Null))
    }

    async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        let (s, b) = self.raw(Method::POST, uri, Some(body)).await;
        (s, serde_json::from_str(&b).unwrap_or(Value::Null))
    }

    async fn start(&self, theory: &str, conjecture: &str) -> String {
        let (s, v) = self
            .post("/proofs", json!({"theory": theory, "conjecture": conjecture, "strategy": "reduce"}))
            .await;
        assert_eq!(s, StatusCode::CREATED, "{v}");
        v["id"].as_str().unwrap().to_string()
    }

    async fn apply(&self, id: &str, law: &str, dir: &str, path: &str, inst: Option<Value>) -> (StatusCode, Value) {
        let mut body = json!({"lawName": law, "direction": dir, "path": path});
        if let Some(i) = inst {
            body["instantiation"] = i;
        }
        self.post(&format!("/proofs/{id}/apply"), body).await
    }
}

async fn prove_intsct_comm(c: &Client) -> String {
    let id = c.start("Sets", "intsct-comm").await;
    let (s, v) = c.apply(&id, "set-extensionality", "L-to-R", "@", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["needsInstantiation"], true);
    let (s, _) = c
        .apply(&id, "set-extensionality", "L-to-R", "@", Some(json!({"x": "x"})))
        .await;
    assert_eq!(s, StatusCode::OK);
    for (law, dir, path) in [
        ("in-intersect", "L-to-R", "@1.1"),
        ("in-intersect", "L-to-R", "@1.2"),
        ("/\\-comm", "R-to-L", "@1.2"),
        ("Ax-==-id", "R-to-L", "@1"),
        ("forall-vac", "L-to-R", "@"),
    ] {
        let (s, v) = c.apply(&id, law, dir, path, None).await;
        assert_eq!(s, StatusCode::OK, "{law}: {v}");
        assert_eq!(v["needsInstantiation"], false);
    }
    id
}

#[tokio::test]
async fn api_replay_gives_golden_transcript() {
    let c = Client::new();
    let id = prove_intsct_comm(&c).await;
    let (s, v) = c.get(&format!("/proofs/{id}")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["complete"], true);
    assert_eq!(v["goal"], "TRUE");
    assert_eq!(v["steps"].as_array().unwrap().len(), 6);
    let (s, text) = c.raw(Method::GET, &format!("/proofs/{id}/transcript"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(text, GOLDEN);
}

#[tokio::test]
async fn binder_default_can_be_overridden() {
    let c = Client::new();
    let id = c.start("Sets", "intsct-comm").await;
    let (_, v) = c.apply(&id, "set-extensionality", "L-to-R", "@", None).await;
    let unbound = v["unbound"].as_array().unwrap();
    assert_eq!(unbound.len(), 1);
    assert_eq!(unbound[0]["name"], "x");
    assert_eq!(unbound[0]["kind"], "binder");
    assert!(!unbound[0]["default"].as_str().unwrap().is_empty());
    // nothing applied yet
    assert_eq!(v["view"]["goal"], "e1 intsct e2 = e2 intsct e1");

    let (s, v) = c
        .apply(&id, "set-extensionality", "L-to-R", "@", Some(json!({"?x": "y"})))
        .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["view"]["goal"], "forall y @ (y in (e1 intsct e2)) == (y in (e2 intsct e1))");
}

#[tokio::test]
async fn moving_up_at_root_is_blocked() {
    let c = Client::new();
    let id = c.start("Sets", "intsct-comm").await;
    let (s, v) = c.post(&format!("/proofs/{id}/focus"), json!({"move": "up"})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["blocked"], true);
    assert_eq!(v["view"]["focus"], "@");

    let (_, v) = c.post(&format!("/proofs/{id}/focus"), json!({"move": "down"})).await;
    assert_eq!(v["blocked"], false);
    assert_eq!(v["view"]["focus"], "@1");
    assert_eq!(v["view"]["focusText"], "e1 intsct e2");
    let span = &v["view"]["focusSpan"];
    let goal = v["view"]["goal"].as_str().unwrap();
    let (a, b) = (span["start"].as_u64().unwrap() as usize, span["end"].as_u64().unwrap() as usize);
    assert_eq!(&goal[a..b], "e1 intsct e2");
}

#[tokio::test]
async fn status_line_reports_class_and_type() {
    let c = Client::new();
    let id = c.start("Sets", "intsct-comm").await;
    c.apply(&id, "set-extensionality", "L-to-R", "@", Some(json!({"x": "x"})))
        .await;
    let (_, v) = c.post(&format!("/proofs/{id}/focus"), json!({"path": "@1.1"})).await;
    assert_eq!(v["view"]["focusText"], "(x in (e1 intsct e2))");
    assert_eq!(v["view"]["status"], "EXPR : B");
    assert_eq!(v["view"]["focusClass"], "EXPR");
    let (_, v) = c.post(&format!("/proofs/{id}/focus"), json!({"path": "@1"})).await;
    assert_eq!(v["view"]["focusClass"], "PRED");
    let (_, v) = c.post(&format!("/proofs/{id}/focus"), json!({"path": "@1.1.1"})).await;
    assert_eq!(v["view"]["focusText"], "x");
    assert_eq!(v["view"]["focusClass"], "EXPR");
    assert_eq!(v["view"]["freeVars"][0]["name"], "x");
}

#[tokio::test]
async fn menu_lists_ranked_matches() {
    let c = Client::new();
    let id = c.start("Sets", "intsct-comm").await;
    let (s, v) = c.get(&format!("/proofs/{id}/matches")).await;
    assert_eq!(s, StatusCode::OK);
    let entries = v["entries"].as_array().unwrap();
    assert!(!entries.is_empty() && entries.len() <= 20);
    assert!(entries
        .iter()
        .any(|e| e["lawName"] == "set-extensionality" && e["direction"] == "L-to-R"));
    for (i, e) in entries.iter().enumerate() {
        assert_eq!(e["index"], i);
        assert_eq!(e["path"], "@");
    }
    let (_, v) = c.get(&format!("/proofs/{id}/matches?limit=1&heuristic=alphabetical")).await;
    assert_eq!(v["entries"].as_array().unwrap().len(), 1);
    let (s, v) = c.get(&format!("/proofs/{id}/matches?heuristic=bogus")).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "BadRequest");
}

#[tokio::test]
async fn errors_carry_status_and_code() {
    let c = Client::new();
    let (s, v) = c.get("/proofs/p99").await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownSession")));
    let (s, v) = c.get("/theories/Nope/laws").await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownTheory")));
    let (s, v) = c
        .post("/proofs", json!({"theory": "Sets", "conjecture": "nope"}))
        .await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownConjecture")));

    let id = c.start("Sets", "intsct-comm").await;
    let (s, v) = c.post(&format!("/proofs/{id}/undo"), json!({})).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::CONFLICT, Some("NothingToUndo")));
    let (s, v) = c.apply(&id, "no-such-law", "L-to-R", "@", None).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownLaw")));
    let (s, v) = c.post(&format!("/proofs/{id}/promote"), json!({})).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::CONFLICT, Some("NotComplete")));
    let (s, v) = c.post(&format!("/proofs/{id}/focus"), json!({"path": "@1.("})).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::BAD_REQUEST, Some("SyntaxError")));
    assert!(v["position"]["column"].is_u64());

    let (s, v) = c
        .post(
            "/theories/Sets/laws",
            json!({"action": "add", "row": {"name": "in-union", "schema": "TRUE == TRUE"}}),
        )
        .await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::CONFLICT, Some("DuplicateName")));
    let (s, v) = c
        .post(
            "/theories/Sets/conjectures",
            json!({"action": "add", "row": {"name": "bad", "schema": "e1 intsct"}}),
        )
        .await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::BAD_REQUEST, Some("SyntaxError")));
    assert!(v["position"].is_object());
}

#[tokio::test]
async fn side_condition_violation_is_rejected() {
    let c = Client::new();
    let (s, _) = c
        .post(
            "/theories/Logic/conjectures",
            json!({"action": "add", "row": {"name": "vac", "schema": "forall x @ x in s"}}),
        )
        .await;
    assert_eq!(s, StatusCode::OK);
    let id = c.start("Logic", "vac").await;
    let (s, v) = c.apply(&id, "forall-vac", "L-to-R", "@", None).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert_eq!(v["code"], "SideConditionViolated");
    let (_, v) = c.get(&format!("/proofs/{id}")).await;
    assert_eq!(v["steps"].as_array().unwrap().len(), 0);
}

#[tokio::test]
async fn gets_are_idempotent() {
    let c = Client::new();
    let id = prove_intsct_comm(&c).await;
    for uri in [
        "/theories".to_string(),
        "/theories/Sets/laws".to_string(),
        format!("/proofs/{id}"),
        format!("/proofs/{id}/matches"),
        format!("/proofs/{id}/transcript"),
    ] {
        let first = c.raw(Method::GET, &uri, None).await;
        let second = c.raw(Method::GET, &uri, None).await;
        assert_eq!(first, second, "{uri}");
    }
}

#[tokio::test]
async fn promotion_adds_theorem_and_bumps_on_save() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("stack.json");
    let mut seed = seed_stack();
    seed.save(&file).unwrap();
    let c = Client::with_state(AppState::new(TheoryStack::load(&file).unwrap()).with_stack_path(&file));
    let id = prove_intsct_comm(&c).await;
    let (s, v) = c.post(&format!("/proofs/{id}/promote"), json!({})).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["theorems"]["rows"][0]["name"], "intsct-comm");
    assert_eq!(v["theorems"]["rows"][0]["transcript"], GOLDEN);
    let (_, v) = c.get("/theories/Sets/conjectures").await;
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["name"] != "intsct-comm"));

    // a fresh proof sees the theorem as a law
    c.post(
        "/theories/Sets/conjectures",
        json!({"action": "add", "row": {"name": "ab", "schema": "a intsct b = b intsct a"}}),
    )
    .await;
    let id2 = c.start("Sets", "ab").await;
    c.post(&format!("/proofs/{id2}/focus"), json!({"path": "@1"})).await;
    let (_, v) = c.get(&format!("/proofs/{id2}/matches")).await;
    let hit = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["lawName"] == "intsct-comm")
        .expect("promoted theorem in menu");
    assert_eq!(hit["provenance"], "proven");

    let before = TheoryStack::load(&file).unwrap();
    let v_sets = before.theory("Sets").unwrap().version;
    let v_logic = before.theory("Logic").unwrap().version;
    assert!(c.state.is_dirty());
    assert!(c.state.save().unwrap());
    assert!(!c.state.save().unwrap());
    let after = TheoryStack::load(&file).unwrap();
    assert_eq!(after.theory("Sets").unwrap().version, v_sets + 1);
    assert_eq!(after.theory("Logic").unwrap().version, v_logic);
    let (_, list) = c.get("/theories").await;
    let sets = list["theories"].as_array().unwrap().iter().find(|t| t["name"] == "Sets").unwrap().clone();
    assert_eq!(sets["version"], v_sets + 1);
}
