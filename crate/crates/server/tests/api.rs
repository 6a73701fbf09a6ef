use std::collections::HashMap;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use classilist_core::analytics::{
    build_all_histograms, build_histogram, confusion_matrix, select_cell, HistogramSpec,
};
use classilist_core::{Dataset, PredictionRecord, RawDataset};
use classilist_server::{router, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn t1_raw() -> RawDataset {
    let rows: [(&str, usize, [f64; 3]); 6] = [
        ("s1", 0, [0.9, 0.1, 0.0]),
        ("s2", 0, [0.4, 0.5, 0.1]),
        ("s3", 1, [0.2, 0.7, 0.1]),
        ("s4", 2, [0.5, 0.2, 0.3]),
        ("s5", 2, [0.0, 0.0, 1.0]),
        ("s6", 1, [0.5, 0.5, 0.0]),
    ];
    RawDataset {
        classes: vec!["A".into(), "B".into(), "C".into()],
        feature_names: vec!["f1".into()],
        records: rows
            .iter()
            .enumerate()
            .map(|(i, (id, actual, scores))| {
                PredictionRecord::new(*id, *actual, scores.to_vec()).with_features(vec![Some(i as f64 + 1.0)])
            })
            .collect(),
        normalized: false,
    }
}

fn t1() -> Dataset {
    Dataset::new(t1_raw()).unwrap()
}

fn app() -> Router {
    router(AppState::with_dataset(t1()))
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, HashMap<String, String>, Vec<u8>) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res
        .headers()
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_str().unwrap_or_default().to_string()))
        .collect();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, headers, body)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (status, _, body) = call(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (status, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (status, _, body) = call(app, req).await;
    (status, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

#[tokio::test]
async fn meta_describes_t1() {
    let (status, meta) = get(&app(), "/api/meta").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(meta["classes"], json!(["A", "B", "C"]));
    assert_eq!(meta["n"], 6);
    assert_eq!(meta["features"], json!(["f1"]));
    assert_eq!(meta["has_images"], false);
    assert_eq!(
        meta["per_class_counts"][0],
        json!({"class": "A", "tp": 1, "fp": 2, "fn": 1, "tn": 2})
    );
    let (_, again) = get(&router(AppState::with_dataset(t1())), "/api/meta").await;
    assert_eq!(meta["fingerprint"], again["fingerprint"]);
    assert_eq!(meta["fingerprint"].as_str().unwrap().len(), 64);
}

#[tokio::test]
async fn every_endpoint_is_503_without_a_dataset() {
    let app = router(AppState::new());
    for uri in ["/api/meta", "/api/histograms", "/api/confusion", "/api/samples?ids=s1", "/api/feature-stats", "/api/image/s1"] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE, "{uri}");
        assert!(body["error"].is_string());
    }
    let (status, _) = post(&app, "/api/whatif", json!({"weights": [1, 1, 1]})).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    let (status, _) = post(&app, "/api/selection", json!({"cell": {"actual": "A", "predicted": "A"}})).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn class_a_histogram_matches_engine() {
    let (status, doc) = get(&app(), "/api/histograms?class=A&bins=10").await;
    assert_eq!(status, StatusCode::OK);
    let hs = doc["histograms"].as_array().unwrap();
    assert_eq!(hs.len(), 1);
    let h = &hs[0];
    assert_eq!(h["class"], "A");
    assert_eq!(h["edges"].as_array().unwrap().len(), 11);

    let engine = build_histogram(&t1(), 0, &HistogramSpec::default()).unwrap();
    for (b, bin) in engine.bins.iter().enumerate() {
        assert_eq!(h["bins"][b]["counts"], serde_json::to_value(bin.counts()).unwrap());
        assert_eq!(h["bins"][b]["lo"].as_f64().unwrap(), bin.lo);
        assert!(h["bins"][b].get("members").is_none());
    }
    // FN at [0.4,0.5), two FPs at [0.5,0.6), TP at [0.9,1.0]
    let nonzero: Vec<(usize, Value)> = h["bins"]
        .as_array()
        .unwrap()
        .iter()
        .enumerate()
        .filter(|(_, b)| b["counts"] != json!({"tp": 0, "fp": 0, "fn": 0, "tn": 0}))
        .map(|(i, b)| (i, b["counts"].clone()))
        .collect();
    assert_eq!(
        nonzero,
        vec![
            (4, json!({"tp": 0, "fp": 0, "fn": 1, "tn": 0})),
            (5, json!({"tp": 0, "fp": 2, "fn": 0, "tn": 0})),
            (9, json!({"tp": 1, "fp": 0, "fn": 0, "tn": 0})),
        ]
    );
    assert_eq!(h["effective_range"], json!({"lo": 0.4, "hi": 0.9}));
    assert_eq!(h["excluded_below"], 0);
}

#[tokio::test]
async fn histogram_members_and_filters() {
    let app = app();
    let (_, doc) = get(&app, "/api/histograms?class=0&members=true&groups=tp,fp,fn,tn&tn_min=0.1").await;
    let bins = &doc["histograms"][0]["bins"];
    assert_eq!(bins[5]["members"]["fp"], json!(["s4", "s6"]));
    assert_eq!(bins[2]["members"]["tn"], json!(["s3"]));
    assert_eq!(doc["spec"]["groups"], json!(["tp", "fp", "fn", "tn"]));

    let (_, doc) = get(&app, "/api/histograms?tp_max=0.8").await;
    assert_eq!(doc["histograms"].as_array().unwrap().len(), 3);
    assert_eq!(doc["histograms"][0]["bins"][9]["counts"]["tp"], 0);

    let (_, doc) = get(&app, "/api/histograms?class=C&class=A&bins=5&lo=0.2&hi=1.0").await;
    assert_eq!(doc["histograms"][0]["class"], "C");
    let edges: Vec<f64> = serde_json::from_value(doc["histograms"][1]["edges"].clone()).unwrap();
    let want = [0.2, 0.36, 0.52, 0.68, 0.84, 1.0];
    assert_eq!(edges.len(), want.len());
    assert!(edges.iter().zip(want).all(|(e, w)| (e - w).abs() < 1e-12), "{edges:?}");
    assert_eq!((edges[0], edges[5]), (0.2, 1.0));
}

#[tokio::test]
async fn invalid_histogram_specs_are_400() {
    let app = app();
    let (status, body) = get(&app, "/api/histograms?tn_min=0").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("non-zero"));
    for uri in [
        "/api/histograms?bins=0",
        "/api/histograms?lo=0.6&hi=0.5",
        "/api/histograms?class=Z",
        "/api/histograms?class=7",
        "/api/histograms?tp_max=1.5",
        "/api/histograms?bogus=1",
    ] {
        assert_eq!(get(&app, uri).await.0, StatusCode::BAD_REQUEST, "{uri}");
    }
}

#[tokio::test]
async fn confusion_document() {
    let (status, doc) = get(&app(), "/api/confusion?members=true").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["matrix"], json!([[1, 1, 0], [1, 1, 0], [1, 0, 1]]));
    assert_eq!(doc["total"], 6);
    assert_eq!(doc["members"][2][0], json!(["s4"]));
    assert_eq!(doc["matrix"], serde_json::to_value(confusion_matrix(&t1()).rows()).unwrap());
}

#[tokio::test]
async fn cell_selection_matches_engine() {
    let (status, doc) = post(&app(), "/api/selection", json!({"cell": {"actual": "C", "predicted": "A"}})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["sample_ids"], json!(["s4"]));
    assert_eq!(doc["cells"], json!([{"actual": "C", "predicted": "A"}]));
    assert_eq!(doc["selector"], json!({"cell": {"actual": "C", "predicted": "A"}}));
    assert_eq!(doc["spec"], serde_json::to_value(HistogramSpec::default()).unwrap());

    let ds = t1();
    let hs = build_all_histograms(&ds, &HistogramSpec::default()).unwrap();
    let engine = select_cell(&ds, &hs, 2, 0).unwrap();
    let highlights: Vec<(String, u64)> = doc["highlights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| (h["class"].as_str().unwrap().to_string(), h["bin"].as_u64().unwrap()))
        .collect();
    let expected: Vec<(String, u64)> = engine
        .highlights
        .iter()
        .map(|h| (ds.class_name(h.class).to_string(), h.bin as u64))
        .collect();
    assert_eq!(highlights, expected);
    assert_eq!(highlights, vec![("A".to_string(), 5), ("C".to_string(), 3)]);
}

#[tokio::test]
async fn bar_selection_links_views() {
    let (status, doc) = post(
        &app(),
        "/api/selection",
        json!({"bar": {"class": "A", "bin": 5, "group": "fp"}, "spec": {"bins": 10}}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["sample_ids"], json!(["s4", "s6"]));
    let hl: Vec<(String, u64)> = doc["highlights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| (h["class"].as_str().unwrap().to_string(), h["bin"].as_u64().unwrap()))
        .collect();
    assert!(hl.contains(&("B".to_string(), 5)));
    assert!(hl.contains(&("C".to_string(), 3)));
    assert_eq!(
        doc["cells"],
        json!([{"actual": "C", "predicted": "A"}, {"actual": "B", "predicted": "A"}])
    );
}

#[tokio::test]
async fn selection_errors() {
    let app = app();
    let cases = [
        (json!({"bar": {"class": "A", "bin": 10}}), StatusCode::BAD_REQUEST),
        (json!({"bar": {"class": "A", "bin": 1}, "spec": {"tn_min": 0}}), StatusCode::BAD_REQUEST),
        (json!({"cell": {"actual": "Q", "predicted": "A"}}), StatusCode::BAD_REQUEST),
        (json!({"spec": {}}), StatusCode::BAD_REQUEST),
        (json!({"samples": {"ids": ["s1", "nope"]}}), StatusCode::NOT_FOUND),
    ];
    for (body, status) in cases {
        assert_eq!(post(&app, "/api/selection", body.clone()).await.0, status, "{body}");
    }
    let (status, doc) = post(&app, "/api/selection", json!({"samples": {"ids": ["s6", "s1"]}})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["sample_ids"], json!(["s1", "s6"]));
}

#[tokio::test]
async fn samples_and_feature_stats() {
    let app = app();
    let (status, doc) = get(&app, "/api/samples?ids=s4,s1&outcomes=true").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc[0]["id"], "s4");
    assert_eq!(doc[0]["actual"], "C");
    assert_eq!(doc[0]["predicted"], "A");
    assert_eq!(doc[0]["scores"], json!([0.5, 0.2, 0.3]));
    assert_eq!(doc[0]["outcomes"][0], json!({"class": "A", "outcome": "fp"}));
    assert_eq!(doc[0]["features"], json!([4.0]));
    assert_eq!(doc[0]["image_url"], Value::Null);

    let (_, plain) = get(&app, "/api/samples?ids=s1&ids=s2").await;
    assert_eq!(plain.as_array().unwrap().len(), 2);
    assert!(plain[0].get("outcomes").is_none());

    assert_eq!(get(&app, "/api/samples?ids=sX").await.0, StatusCode::NOT_FOUND);

    let (status, doc) = get(&app, "/api/feature-stats?ids=s1,s2,s3,s4").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["features"][0]["name"], "f1");
    assert_eq!(doc["features"][0]["count"], 4);
    assert_eq!(doc["features"][0]["summary"]["median"], 2.5);
    let (_, empty) = get(&app, "/api/feature-stats").await;
    assert_eq!(empty["features"][0]["count"], 0);
    assert_eq!(get(&app, "/api/feature-stats?ids=zz").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn whatif_endpoint() {
    let app = app();
    let (status, doc) = post(&app, "/api/whatif", json!({"weights": [1, 1, 1]})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["changed"], json!([]));
    assert_eq!(doc["before"], doc["after"]);

    let (_, doc) = post(&app, "/api/whatif", json!({"weights": [1, 2, 1]})).await;
    let changed: Vec<&str> = doc["changed"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert!(changed.contains(&"s6"));
    assert_eq!(doc["new_true_positives"][1]["ids"], json!(["s6"]));

    for bad in [json!({"weights": [1, 1]}), json!({"weights": [1, 0, 1]}), json!({"w": 1}), json!("x")] {
        assert_eq!(post(&app, "/api/whatif", bad.clone()).await.0, StatusCode::BAD_REQUEST, "{bad}");
    }
}

#[tokio::test]
async fn images_are_served() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::create_dir(dir.join("images")).unwrap();
    std::fs::write(dir.join("images/s1.png"), b"\x89PNG fake").unwrap();
    let mut raw = t1_raw();
    raw.records[0].image_ref = Some("s1.png".into());
    let ds = Dataset::new(raw).unwrap().with_image_dir(dir.join("images"));
    let app = router(AppState::with_dataset(ds));

    let (_, samples) = get(&app, "/api/samples?ids=s1").await;
    assert_eq!(samples[0]["image_url"], "/api/image/s1");
    let (status, headers, body) = call(&app, Request::get("/api/image/s1").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(headers["content-type"], "image/png");
    assert_eq!(body, b"\x89PNG fake");
    assert_eq!(get(&app, "/api/image/s2").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/image/zz").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn static_assets_and_unknown_routes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("index.html"), "<html>ui</html>").unwrap();
    let served = router(AppState::with_dataset(t1()).with_assets(dir));
    let (status, _, body) = call(&served, Request::get("/index.html").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<html>ui</html>");
    let (status, _, body) = call(&served, Request::get("/").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<html>ui</html>");
    assert_eq!(get(&app(), "/nope").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn identical_requests_are_byte_identical_and_tagged() {
    let app = app();
    let uri = "/api/histograms?members=true&groups=tp,fp,fn,tn";
    let (_, h1, b1) = call(&app, Request::get(uri).body(Body::empty()).unwrap()).await;
    let (_, h2, b2) = call(&app, Request::get(uri).body(Body::empty()).unwrap()).await;
    assert_eq!(b1, b2);
    let etag = h1["etag"].clone();
    assert_eq!(etag, h2["etag"]);
    let req = Request::get(uri).header(header::IF_NONE_MATCH, &etag).body(Body::empty()).unwrap();
    let (status, _, body) = call(&app, req).await;
    assert_eq!(status, StatusCode::NOT_MODIFIED);
    assert!(body.is_empty());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn reload_never_exposes_a_torn_state() {
    let a = t1();
    let mut raw = t1_raw();
    raw.records.truncate(4);
    raw.records[0].scores = vec![0.1, 0.8, 0.1];
    let b = Dataset::new(raw).unwrap();

    let state = AppState::with_dataset(a.clone());
    let app = router(state.clone());
    let uri = "/api/histograms?members=true";

    // expected (etag, body) for each version
    let mut expected = HashMap::new();
    for ds in [&a, &b] {
        let app = router(AppState::with_dataset(ds.clone()));
        let (_, h, body) = call(&app, Request::get(uri).body(Body::empty()).unwrap()).await;
        expected.insert(h["etag"].clone(), body);
    }
    assert_eq!(expected.len(), 2);

    let writer = {
        let state = state.clone();
        tokio::spawn(async move {
            for i in 0..200 {
                state.replace(if i % 2 == 0 { b.clone() } else { a.clone() });
                tokio::task::yield_now().await;
            }
        })
    };
    let readers: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            let expected = expected.clone();
            tokio::spawn(async move {
                for _ in 0..50 {
                    let (status, h, body) = call(&app, Request::get(uri).body(Body::empty()).unwrap()).await;
                    assert_eq!(status, StatusCode::OK);
                    assert_eq!(expected.get(&h["etag"]), Some(&body));
                }
            })
        })
        .collect();
    writer.await.unwrap();
    for r in readers {
        r.await.unwrap();
    }
}
