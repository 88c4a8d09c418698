mod common;

use axum::http::{Method, StatusCode};
use axum::Router;
use common::{floats, point, send, send_csv, send_raw, PEOPLE_CSV};
use drx_service::{router, AppState};
use serde_json::{json, Value};

async fn app_with_pca() -> (Router, String, Value) {
    let app = router(AppState::new(None));
    let (status, ds) = send_csv(&app, "/datasets?id_column=name", PEOPLE_CSV).await;
    assert_eq!(status, StatusCode::CREATED, "{ds}");
    let uri = format!("/datasets/{}/models", ds["dataset_id"].as_str().unwrap());
    let (status, fit) = send(&app, Method::POST, &uri, Some(json!({ "method": "pca" }))).await;
    assert_eq!(status, StatusCode::CREATED, "{fit}");
    (app, fit["model_id"].as_str().unwrap().to_string(), fit)
}

#[tokio::test]
async fn dataset_upload_reports_shape_and_stats() {
    let app = router(AppState::new(None));
    let (status, body) = send_csv(&app, "/datasets?id_column=name", PEOPLE_CSV).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["n"], 8);
    assert_eq!(body["d"], 4);
    assert_eq!(body["feature_names"], json!(["Height", "Weight", "Age", "Score"]));
    assert_eq!(body["ids"][0], "ann");
    assert_eq!(body["stats"][0]["min"], 158.0);
    assert_eq!(body["stats"][0]["max"], 190.0);

    let (status, got) = send(&app, Method::GET, &format!("/datasets/{}", body["dataset_id"].as_str().unwrap()), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(got["values"][1], json!([160.0, 55.0, 45.0, 6.0]));
}

#[tokio::test]
async fn csv_errors_carry_diagnostics() {
    let app = router(AppState::new(None));
    let (status, body) = send_csv(&app, "/datasets", "a,b,c\n1,2,3\n4,5\n").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_csv");
    assert_eq!(body["details"], json!({ "row": 2, "expected": 3, "found": 2 }));

    let (status, body) = send_csv(&app, "/datasets", "a,b\n1,x\n2,3\n").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["details"]["column"], "b");

    let (status, body) = send_csv(&app, "/datasets?id_column=id", "a,b\n1,2\n2,3\n").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["message"].as_str().unwrap().contains("id"));
}

#[tokio::test]
async fn model_creation_errors() {
    let app = router(AppState::new(None));
    let (status, body) = send(&app, Method::POST, "/datasets/ds404/models", Some(json!({ "method": "pca" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "not_found");

    let (_, ds) = send_csv(&app, "/datasets", "a,b,c\n1,2,3\n2,4,6\n3,6,9\n").await;
    let uri = format!("/datasets/{}/models", ds["dataset_id"].as_str().unwrap());
    let (status, body) = send(&app, Method::POST, &uri, Some(json!({ "method": "tsne" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["details"]["method"], "tsne");

    // Perfectly collinear columns leave a single principal direction.
    let (status, body) = send(&app, Method::POST, &uri, Some(json!({ "method": "pca" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "degenerate_fit");

    let (status, body) = send_raw(&app, Method::POST, &uri, "application/json", "{not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_body");
}

#[tokio::test]
async fn forward_backward_reset_cycle() {
    let (app, model, fit) = app_with_pca().await;
    let original = point(&fit["positions"][0]);
    let fwd = format!("/models/{model}/forward");

    let (status, r) = send(&app, Method::POST, &fwd, Some(json!({ "point_id": "ann", "features": {} }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(point(&r["position"]), original);
    assert_eq!(point(&r["delta_y"]), [0.0, 0.0]);

    let (_, r) = send(&app, Method::POST, &fwd, Some(json!({ "point_id": "ann", "features": { "Age": 30.0 } }))).await;
    assert_eq!(point(&r["delta_y"]), [0.0, 0.0]);

    let body = json!({ "point_id": "ann", "features": { "Score": 9.5 } });
    let (_, a) = send(&app, Method::POST, &fwd, Some(body.clone())).await;
    let (_, b) = send(&app, Method::POST, &fwd, Some(body)).await;
    assert_eq!(a, b);
    assert_ne!(point(&a["delta_y"]), [0.0, 0.0]);

    let (status, r) = send(&app, Method::POST, &fwd, Some(json!({ "point_id": "ann", "features": { "Shoe": 1.0 } }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r["code"], "unknown_feature");
    let (status, _) = send(&app, Method::POST, &fwd, Some(json!({ "point_id": "zed", "features": {} }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    // Dropping the point where it already is changes nothing.
    let current = point(&a["position"]);
    let bwd = format!("/models/{model}/backward");
    let (_, r) = send(&app, Method::POST, &bwd, Some(json!({ "point_id": "ann", "target_position": current, "constrained": true }))).await;
    assert!(r["position_feasible"].as_bool().unwrap());
    for (u, v) in floats(&r["features"]).iter().zip(floats(&a["features"])) {
        assert!((u - v).abs() < 1e-9);
    }

    let target = [current[0] + 0.5, current[1] - 0.25];
    let (_, r) = send(&app, Method::POST, &bwd, Some(json!({ "point_id": "ann", "target_position": target, "constrained": false }))).await;
    assert!(r["residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(point(&r["snapped_position"]), point(&r["position"]));

    let (_, state) = send(&app, Method::GET, &format!("/models/{model}/points/ann"), None).await;
    assert_eq!(state["touched"], true);
    assert_eq!(state["features"], r["features"]);

    let (status, r) = send(&app, Method::POST, &format!("/models/{model}/reset"), Some(json!({ "point_id": "ann" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["features"], json!([174.0, 68.0, 30.0, 8.5]));
    assert_eq!(point(&r["position"]), original);
    let (_, r) = send(&app, Method::POST, &fwd, Some(json!({ "point_id": "ann", "features": {} }))).await;
    assert_eq!(point(&r["position"]), original);

    // Reset of an untouched point is a no-op.
    let (status, r) = send(&app, Method::POST, &format!("/models/{model}/reset"), Some(json!({ "point_id": "bob" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(point(&r["position"]), point(&fit["positions"][1]));
}

#[tokio::test]
async fn constraints_and_feasibility() {
    let (app, model, _) = app_with_pca().await;
    let uri = format!("/models/{model}/constraints");

    let (status, _) = send(&app, Method::PUT, &uri, Some(json!({ "point_id": "ann", "constraints": {} }))).await;
    assert_eq!(status, StatusCode::NO_CONTENT);

    let feas = format!("/models/{model}/feasibility");
    let (status, map) = send(&app, Method::POST, &feas, Some(json!({ "point_id": "ann" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(map["resolution"], json!([32, 32]));
    assert!(map["mask"].as_array().unwrap().iter().flat_map(|c| c.as_array().unwrap()).all(|b| b == true));

    let cs = json!({
        "Height": { "lower": 0.0 },
        "Weight": { "lower": 0.0 },
        "Age": { "lock": 30.0 },
        "Score": { "lower": 8.0, "upper": 10.0 }
    });
    let (status, _) = send(&app, Method::PUT, &uri, Some(json!({ "point_id": "ann", "constraint_set": cs }))).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (_, got) = send(&app, Method::GET, &format!("{uri}?point_id=ann"), None).await;
    assert_eq!(got["constraints"]["Age"], json!({ "lock": 30.0, "lower": null, "upper": null }));
    assert_eq!(got["constraints"]["Score"], json!({ "lock": null, "lower": 8.0, "upper": 10.0 }));

    let (_, map) = send(&app, Method::POST, &feas, Some(json!({ "point_id": "ann", "resolution": [12, 8] }))).await;
    assert_eq!(map["mask"].as_array().unwrap().len(), 12);
    assert_eq!(map["mask"][0].as_array().unwrap().len(), 8);

    // Constrained drags respect the lock exactly.
    let (_, fit) = send(&app, Method::GET, &format!("/models/{model}"), None).await;
    let p = point(&fit["positions"][0]);
    let (_, r) = send(
        &app,
        Method::POST,
        &format!("/models/{model}/backward"),
        Some(json!({ "point_id": "ann", "target_position": [p[0] + 1.0, p[1] + 1.0], "constrained": true })),
    )
    .await;
    let f = floats(&r["features"]);
    assert_eq!(f[2], 30.0);
    assert!(f[3] >= 8.0 && f[3] <= 10.0);

    let bad = json!({ "point_id": "ann", "constraints": { "Age": { "lower": 50.0, "upper": 40.0 } } });
    let (status, body) = send(&app, Method::PUT, &uri, Some(bad)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "invalid_constraint");

    // A lock outside its own bounds is storable but cannot be solved.
    let clash = json!({ "point_id": "ann", "constraints": { "Age": { "lock": 70.0, "lower": 20.0, "upper": 40.0 } } });
    assert_eq!(send(&app, Method::PUT, &uri, Some(clash)).await.0, StatusCode::NO_CONTENT);
    let (status, body) = send(
        &app,
        Method::POST,
        &format!("/models/{model}/backward"),
        Some(json!({ "point_id": "ann", "target_position": p, "constrained": true })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "infeasible_constraints");
}

#[tokio::test]
async fn prolines_and_knn() {
    let (app, model, fit) = app_with_pca().await;
    let (status, all) = send(&app, Method::GET, &format!("/models/{model}/prolines?point_id=cat"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(all["prolines"].as_array().unwrap().len(), 4);
    assert_eq!(all["marks"].as_array().unwrap().len(), 4);
    let (_, top) = send(&app, Method::GET, &format!("/models/{model}/prolines?point_id=cat&top_k=2&c=0.5"), None).await;
    assert_eq!(top["prolines"].as_array().unwrap().len(), 2);
    assert_eq!(top["prolines"][0]["feature_index"], top["lengths"][0]["feature_index"]);

    let (status, r) = send(&app, Method::GET, &format!("/models/{model}/knn?point_id=ann"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{r}");
    let (status, r) = send(&app, Method::GET, &format!("/models/{model}/knn?point_id=ann&k=3"), None).await;
    assert_eq!(status, StatusCode::OK);
    let positions: Vec<[f64; 2]> = fit["positions"].as_array().unwrap().iter().map(point).collect();
    let oracle = drx_core::evaluation::knn(&positions, 0, 3);
    let got: Vec<usize> = r["neighbors"].as_array().unwrap().iter().map(|n| n["index"].as_u64().unwrap() as usize).collect();
    assert_eq!(got, oracle.iter().map(|o| o.0).collect::<Vec<_>>());
}

#[tokio::test]
async fn knn_on_two_points() {
    let app = router(AppState::new(None));
    let (_, ds) = send_csv(&app, "/datasets", "a,b,c\n1,0,2\n0,1,5\n").await;
    let (status, fit) = send(
        &app,
        Method::POST,
        &format!("/datasets/{}/models", ds["dataset_id"].as_str().unwrap()),
        // Two rows cannot support a 2-component PCA.
        Some(json!({ "method": "autoencoder", "train_config": { "epochs": 2, "hidden": [4] } })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{fit}");
    let model = fit["model_id"].as_str().unwrap();
    let (_, r) = send(&app, Method::GET, &format!("/models/{model}/knn?point_id=0&k=1"), None).await;
    assert_eq!(r["neighbors"][0]["id"], "1");
}

#[tokio::test]
async fn autoencoder_session() {
    let app = router(AppState::new(None));
    let mut csv = String::from("u,v,uv,s\n");
    for i in 0..40 {
        let (u, v) = ((i % 8) as f64 / 7.0, (i / 8) as f64 / 4.0);
        csv.push_str(&format!("{u},{v},{},{}\n", u * v, (3.0 * u).sin()));
    }
    let (_, ds) = send_csv(&app, "/datasets", &csv).await;
    let cfg = json!({ "method": "autoencoder", "train_config": { "epochs": 30, "hidden": [8], "seed": 3 } });
    let (status, fit) = send(&app, Method::POST, &format!("/datasets/{}/models", ds["dataset_id"].as_str().unwrap()), Some(cfg)).await;
    assert_eq!(status, StatusCode::CREATED, "{fit}");
    assert_eq!(fit["kind"], "autoencoder");
    let positions: Vec<[f64; 2]> = fit["positions"].as_array().unwrap().iter().map(point).collect();
    assert_eq!(positions.len(), 40);
    assert!(positions.iter().flatten().all(|v| v.is_finite() && v.abs() <= 1.0));
    assert!(fit["training"]["final_mse"].as_f64().unwrap() < fit["training"]["initial_mse"].as_f64().unwrap());

    let model = fit["model_id"].as_str().unwrap();
    let (_, r) = send(
        &app,
        Method::POST,
        &format!("/models/{model}/backward"),
        Some(json!({ "point_id": "3", "target_position": [0.1, -0.2], "constrained": true })),
    )
    .await;
    assert_eq!(r["position_feasible"], true);
    assert_eq!(point(&r["snapped_position"]), [0.1, -0.2]);
    let (_, map) = send(&app, Method::POST, &format!("/models/{model}/feasibility"), Some(json!({ "point_id": "3", "resolution": 8 }))).await;
    assert_eq!(map["mask"].as_array().unwrap().len(), 8);
}

#[tokio::test]
async fn snapshot_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(Some(dir.path().to_path_buf())));
    let (_, ds) = send_csv(&app, "/datasets?id_column=name", PEOPLE_CSV).await;
    let (_, fit) = send(&app, Method::POST, &format!("/datasets/{}/models", ds["dataset_id"].as_str().unwrap()), Some(json!({ "method": "pca" }))).await;
    let model = fit["model_id"].as_str().unwrap();
    let (status, r) = send(&app, Method::POST, &format!("/models/{model}/snapshot"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(std::path::Path::new(r["path"].as_str().unwrap()).exists());

    let (status, _) = send(&app, Method::POST, "/models/m999/snapshot", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn concurrent_requests_on_one_session_stay_consistent() {
    let (app, model, _) = app_with_pca().await;
    let fwd = format!("/models/{model}/forward");
    let mut handles = Vec::new();
    for k in 0..32 {
        let app = app.clone();
        let fwd = fwd.clone();
        handles.push(tokio::spawn(async move {
            let id = ["ann", "bob", "cat", "dan"][k % 4];
            send(&app, Method::POST, &fwd, Some(json!({ "point_id": id, "features": { "Score": 7.0 } }))).await
        }));
    }
    let mut results = Vec::new();
    for h in handles {
        let (status, body) = h.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        results.push(body);
    }
    for (k, r) in results.iter().enumerate() {
        assert_eq!(r, &results[k % 4]);
    }
}
