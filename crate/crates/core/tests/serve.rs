use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use siltsurf::cli::run;
use tower::ServiceExt;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn algebra(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

async fn call(app: &Router, method: &str, uri: &str, token: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("x-session", token)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn post(app: &Router, uri: &str, token: &str, body: Value) -> (StatusCode, Value) {
    call(app, "POST", uri, token, Some(body.to_string())).await
}

async fn get(app: &Router, uri: &str, token: &str) -> (StatusCode, Value) {
    call(app, "GET", uri, token, None).await
}

#[tokio::test]
async fn load_mutate_undo() {
    let app = siltsurf::serve::router();
    let (st, _) = get(&app, "/state", "t").await;
    assert_eq!(st, StatusCode::CONFLICT);
    let (st, loaded) = post(&app, "/load", "t", json!({ "algebra": algebra("a3.json") })).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(loaded["report"]["tilting"], true);
    assert_eq!(loaded["arcs"].as_array().unwrap().len(), 3);
    let (st, m) = post(&app, "/mutate", "t", json!({ "arc": "g2", "direction": "left" })).await;
    assert_eq!(st, StatusCode::OK, "{m}");
    assert_eq!(m["state"]["history"].as_array().unwrap().len(), 1);
    assert_eq!(m["state"]["report"]["silting"], true);
    let (_, after) = get(&app, "/state", "t").await;
    assert_eq!(after, m["state"]);
    let (st, undone) = post(&app, "/undo", "t", json!({})).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(undone, loaded);
    let (st, e) = post(&app, "/undo", "t", json!({})).await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert_eq!(e["error"]["kind"], "precondition");
}

#[tokio::test]
async fn errors_map_to_statuses() {
    let app = siltsurf::serve::router();
    let (st, e) = call(&app, "POST", "/load", "e", Some("{not json".into())).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"]["kind"], "parse");
    let bad = json!({ "vertices": ["1"], "arrows": [{ "id": "a", "source": "1", "target": "9" }] });
    let (st, _) = post(&app, "/load", "e", json!({ "algebra": bad })).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    post(&app, "/load", "e", json!({ "algebra": algebra("a2.json") })).await;
    let (st, _) = post(&app, "/mutate", "e", json!({ "arc": "g1", "direction": "sideways" })).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    let (st, _) = post(&app, "/mutate", "e", json!({ "arc": "g9", "direction": "left" })).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    let (st, _) = post(&app, "/mutate", "e", json!({ "arc": "g1", "direction": "left", "extra": 1 })).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let (st, _) = get(&app, "/hom?src=g1", "e").await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let (st, _) = post(&app, "/orbit", "e", json!({ "curve": {} })).await;
    assert_eq!(st, StatusCode::CONFLICT);
}

#[tokio::test]
async fn cutting_a_loop_is_refused_without_a_state_change() {
    let app = siltsurf::serve::router();
    let (_, before) = post(&app, "/load", "l", json!({ "algebra": algebra("dual_numbers.json") })).await;
    let (st, e) = post(&app, "/cut", "l", json!({ "arc": "g1" })).await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert!(e["error"]["message"].as_str().unwrap().contains("loop"));
    assert_eq!(get(&app, "/state", "l").await.1, before);
}

#[tokio::test]
async fn hom_surface_cut_and_orbit() {
    let app = siltsurf::serve::router();
    post(&app, "/load", "h", json!({ "algebra": algebra("a3.json") })).await;
    let (st, h) = get(&app, "/hom?src=g1&dst=g2", "h").await;
    assert_eq!(st, StatusCode::OK);
    assert!(h["perDegree"].is_object());
    let (st, s) = get(&app, "/surface", "h").await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(s["surface"]["schema"], "silt-surf/1");
    let (st, c) = post(&app, "/cut", "h", json!({ "arc": "g2" })).await;
    assert_eq!(st, StatusCode::OK, "{c}");
    assert_eq!(c["state"]["cut"], c["cut"]);
    let g1 = c["state"]["dissection"]["arcs"][0].clone();
    let (st, o) = post(&app, "/orbit", "h", json!({ "curve": g1 })).await;
    assert_eq!(st, StatusCode::OK, "{o}");
    assert_eq!(o["pattern"], o["predicted"]);
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = siltsurf::serve::router();
    post(&app, "/load", "a", json!({ "algebra": algebra("a2.json") })).await;
    post(&app, "/load", "b", json!({ "algebra": algebra("a3.json") })).await;
    post(&app, "/mutate", "a", json!({ "arc": "g1", "direction": "right" })).await;
    let (_, b) = get(&app, "/state", "b").await;
    assert!(b["history"].as_array().unwrap().is_empty());
    let (_, a) = get(&app, "/state", "a").await;
    assert_eq!(a["history"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn service_agrees_with_the_command_line() {
    let app = siltsurf::serve::router();
    post(&app, "/load", "p", json!({ "algebra": algebra("kronecker.json") })).await;
    let (_, m) = post(&app, "/mutate", "p", json!({ "arc": "g1", "direction": "left" })).await;
    let out = run(["siltsurf", "mutate", &data("kronecker.json"), "--arc", "g1", "--dir", "left"]);
    assert_eq!(out.code, 0);
    let cli: Value = serde_json::from_str(&out.stdout).unwrap();
    let mut exchange = cli.clone();
    exchange.as_object_mut().unwrap().remove("dissection");
    assert_eq!(m["exchange"], exchange);
    assert_eq!(m["state"]["dissection"], cli["dissection"]);
}

#[tokio::test]
async fn busy_port_is_reported() {
    let held = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let port = held.local_addr().unwrap().port();
    assert!(siltsurf::serve::serve("127.0.0.1", port).await.is_err());
}
