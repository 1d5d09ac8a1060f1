mod common;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use gsd_alloc::service::router;

use common::*;

async fn call(method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(v) => Body::from(v.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let response = router().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn fixture_value() -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture_path()).unwrap()).unwrap()
}

#[tokio::test]
async fn health_is_ok() {
    let (status, body) = call("GET", "/api/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["status"], "ok");
}

#[tokio::test]
async fn validate_accepts_the_fixture() {
    let (status, body) = call("POST", "/api/validate", Some(fixture_value())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["valid"], true);
}

#[tokio::test]
async fn zero_weights_are_rejected_with_the_violation_list() {
    let mut project = fixture_value();
    project["weights"] = json!({"w_cost": 0, "w_time": 0, "w_quality": 0});
    let (status, body) = call("POST", "/api/validate", Some(project)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let report: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(report["valid"], false);
    assert!(report["violations"].as_array().unwrap().iter().any(|v| v["path"] == "weights"));
}

#[tokio::test]
async fn rank_is_byte_identical_across_requests() {
    let request = json!({"project": fixture_value(), "runs": 1000, "seed": 42});
    let (s1, b1) = call("POST", "/api/rank", Some(request.clone())).await;
    let (s2, b2) = call("POST", "/api/rank", Some(request)).await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(b1, b2);
    let doc: Value = serde_json::from_str(&b1).unwrap();
    assert_eq!(doc["runs"], 1000);
    assert_eq!(doc["assignments"][0]["rank"], 1);
}

#[tokio::test]
async fn concurrent_identical_requests_agree() {
    let request = json!({"project_file": fixture_path(), "runs": 200, "seed": 9, "top_k": 3});
    let calls = (0..4).map(|_| call("POST", "/api/rank", Some(request.clone())));
    let results = futures_join(calls.collect()).await;
    assert!(results.iter().all(|r| r == &results[0] && r.0 == StatusCode::OK));
    let doc: Value = serde_json::from_str(&results[0].1).unwrap();
    assert_eq!(doc["assignments"].as_array().unwrap().len(), 3);
}

async fn futures_join<F: std::future::Future<Output = (StatusCode, String)> + Send + 'static>(
    futures: Vec<F>,
) -> Vec<(StatusCode, String)> {
    let handles: Vec<_> = futures.into_iter().map(tokio::spawn).collect();
    let mut out = Vec::new();
    for h in handles {
        out.push(h.await.unwrap());
    }
    out
}

#[tokio::test]
async fn rank_with_an_invalid_project_returns_the_report() {
    let mut project = fixture_value();
    project["sites"][0]["cost_rate"] = json!(0);
    let (status, body) = call("POST", "/api/rank", Some(json!({"project": project, "runs": 10}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let report: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(report["violations"][0]["path"], "sites[0].cost_rate");
}

#[tokio::test]
async fn configuration_errors_answer_422() {
    let mut project = fixture_value();
    project["model_config"] = json!("tuned");
    let (status, _) = call("POST", "/api/rank", Some(json!({"project": project, "runs": 10}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn evaluate_returns_a_report() {
    let assignment: serde_json::Map<String, Value> = ["Reqs", "Des A", "Impl A", "Des B", "Impl B", "Des C", "Impl C", "Integr"]
        .iter()
        .map(|t| (t.to_string(), json!("US")))
        .collect();
    let request = json!({"project": fixture_value(), "assignment": assignment, "runs": 100, "seed": 1});
    let (status, body) = call("POST", "/api/evaluate", Some(request)).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let report: Value = serde_json::from_str(&body).unwrap();
    // every task at one site: only execution costs count
    assert!(report["expected_total"].as_f64().unwrap() <= 8.0);
    assert_eq!(report["seed"], 1);
}

#[tokio::test]
async fn malformed_bodies_are_bad_requests() {
    let request = Request::builder()
        .method("POST")
        .uri("/api/rank")
        .header("content-type", "application/json")
        .body(Body::from("{"))
        .unwrap();
    let response = router().oneshot(request).await.unwrap();
    assert_eq!(response.status(), StatusCode::BAD_REQUEST);
}
