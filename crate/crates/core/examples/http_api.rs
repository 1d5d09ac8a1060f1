//! Drives the JSON API in-process: health, validate and a small rank call.
//! `gsd-alloc serve` exposes the same router on a TCP port.
//!
//! ```bash
//! cargo run --release --example http_api
//! ```

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use gsd_alloc::service::router;

async fn call(method: &str, uri: &str, body: Option<Value>) -> Result<(u16, String), Box<dyn std::error::Error>> {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |v| Body::from(v.to_string())))?;
    let response = router().oneshot(request).await?;
    let status = response.status().as_u16();
    let bytes = response.into_body().collect().await?.to_bytes();
    Ok((status, String::from_utf8(bytes.to_vec())?))
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gsd3.json");

    let (status, body) = call("GET", "/api/health", None).await?;
    println!("GET /api/health -> {status} {body}");

    let project: Value = serde_json::from_str(&std::fs::read_to_string(fixture)?)?;
    let (status, _) = call("POST", "/api/validate", Some(project)).await?;
    println!("POST /api/validate -> {status}");

    let request = json!({"project_file": fixture, "runs": 200, "seed": 42, "top_k": 2});
    let (status, body) = call("POST", "/api/rank", Some(request)).await?;
    println!("POST /api/rank -> {status}\n{body}");
    Ok(())
}
