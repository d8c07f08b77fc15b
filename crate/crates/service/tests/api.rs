use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use raycut::phantom::PhantomSpec;
use raycut::volume::{Geometry, Volume, ScalarKind};
use raycut::{SegParams, Seed};
use raycut_service::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn phantom() -> PhantomSpec {
    let mut spec = PhantomSpec::centered(64, 1.0, [20.0; 3]).unwrap();
    spec.noise_sigma = 10.0;
    spec.rng_seed = 3;
    spec
}

fn phantom_app() -> (Router, PhantomSpec) {
    let spec = phantom();
    let state = AppState::with_volume(spec.generate().unwrap(), Some(spec.truth())).unwrap();
    (router(state), spec)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    let res = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn post(app: &Router, uri: &str, body: &str) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn decode_png(bytes: &[u8]) -> (u32, u32, Vec<u8>) {
    let mut reader = png::Decoder::new(std::io::Cursor::new(bytes)).read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    assert_eq!(info.color_type, png::ColorType::Grayscale);
    buf.truncate(info.buffer_size());
    (info.width, info.height, buf)
}

#[tokio::test]
async fn endpoints_404_before_load() {
    let app = router(AppState::new());
    assert_eq!(get(&app, "/api/volume").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/slice/z/0").await.0, StatusCode::NOT_FOUND);
    assert_eq!(post(&app, "/api/segment", r#"{"seed":[0,0,0]}"#).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn volume_metadata() {
    let g = Geometry::new([256, 256, 40], [0.5, 0.5, 2.0], [1.0, 2.0, 3.0]).unwrap();
    let vol = Volume::new(g, (0..g.len()).map(|i| (i % 7) as f64).collect(), ScalarKind::Int16).unwrap();
    let app = router(AppState::with_volume(vol, None).unwrap());
    let (status, body) = get(&app, "/api/volume").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        json_of(&body),
        json!({
            "dims": [256, 256, 40],
            "spacing_mm": [0.5, 0.5, 2.0],
            "origin_mm": [1.0, 2.0, 3.0],
            "intensity_range": [0.0, 6.0],
            "has_truth": false,
        })
    );
}

#[tokio::test]
async fn truth_with_other_dims_is_rejected() {
    let spec = phantom();
    let other = PhantomSpec::centered(32, 1.0, [5.0; 3]).unwrap().truth();
    assert!(AppState::with_volume(spec.generate().unwrap(), Some(other)).is_err());
}

#[tokio::test]
async fn uniform_slice_is_constant() {
    let g = Geometry::new([5, 4, 3], [1.0; 3], [0.0; 3]).unwrap();
    let vol = Volume::new(g, vec![7.0; g.len()], ScalarKind::Float32).unwrap();
    let app = router(AppState::with_volume(vol, None).unwrap());
    for (axis, w, h) in [("z", 5, 4), ("y", 5, 3), ("x", 4, 3)] {
        let (status, body) = get(&app, &format!("/api/slice/{axis}/1")).await;
        assert_eq!(status, StatusCode::OK);
        let (pw, ph, px) = decode_png(&body);
        assert_eq!((pw, ph), (w, h));
        assert!(px.iter().all(|&p| p == px[0]));
    }
}

#[tokio::test]
async fn slice_window_mapping() {
    let g = Geometry::new([4, 1, 1], [1.0; 3], [0.0; 3]).unwrap();
    let vol = Volume::new(g, vec![0.0, 10.0, 20.0, 30.0], ScalarKind::Float32).unwrap();
    let app = router(AppState::with_volume(vol, None).unwrap());
    let (_, body) = get(&app, "/api/slice/z/0").await;
    assert_eq!(decode_png(&body).2, vec![0, 85, 170, 255]);
    let (_, body) = get(&app, "/api/slice/z/0?window=10,20").await;
    assert_eq!(decode_png(&body).2, vec![0, 0, 255, 255]);
}

#[tokio::test]
async fn slice_errors() {
    let (app, _) = phantom_app();
    for uri in [
        "/api/slice/w/0",
        "/api/slice/z/64",
        "/api/slice/z/-1",
        "/api/slice/z/0?window=0,0",
        "/api/slice/z/0?window=5,1",
        "/api/slice/z/0?window=abc",
    ] {
        assert_eq!(get(&app, uri).await.0, StatusCode::BAD_REQUEST, "{uri}");
    }
}

#[tokio::test]
async fn segment_phantom_and_contours() {
    let (app, spec) = phantom_app();
    let (status, body) = post(&app, "/api/segment", r#"{"seed":[32,32,32]}"#).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert!(body["dsc_pct"].as_f64().unwrap() >= 95.0);
    for key in ["rays", "graph", "mincut", "voxelize"] {
        assert!(body["phase_ms"][key].as_f64().unwrap() >= 0.0);
    }
    let id = body["result_id"].as_u64().unwrap();

    // matches a direct pipeline run
    let direct = raycut::segment(&spec.generate().unwrap(), Seed::Voxel([32; 3]), &SegParams::default()).unwrap();
    assert_eq!(body["volume_mm3"].as_f64().unwrap(), direct.volume_mm3());
    let (bmin, bmax) = direct.boundary_range();
    assert_eq!(body["boundary_stats"], json!({ "min": bmin, "max": bmax }));

    // equatorial slice: one closed curve of radius ~20 px around the centre
    let (status, body) = get(&app, &format!("/api/result/{id}/contour/z/32")).await;
    assert_eq!(status, StatusCode::OK);
    let lines: Vec<Vec<[f64; 2]>> = serde_json::from_slice(&body).unwrap();
    assert_eq!(lines.len(), 1);
    let mean_r = lines[0].iter().map(|p| ((p[0] - 32.0).powi(2) + (p[1] - 32.0).powi(2)).sqrt()).sum::<f64>()
        / lines[0].len() as f64;
    assert!((mean_r - 20.0).abs() <= 1.0, "mean radius {mean_r}");

    let (_, body) = get(&app, &format!("/api/result/{id}/contour/z/2")).await;
    assert_eq!(json_of(&body), json!([]));
}

#[tokio::test]
async fn identical_requests_are_deterministic_with_fresh_ids() {
    let (app, _) = phantom_app();
    let req = r#"{"seed":[30,33,31],"subdiv":2,"samples":30,"radius_mm":30}"#;
    let (_, a) = post(&app, "/api/segment", req).await;
    let (_, b) = post(&app, "/api/segment", req).await;
    assert_eq!(a["volume_mm3"], b["volume_mm3"]);
    assert_eq!(a["dsc_pct"], b["dsc_pct"]);
    assert!(b["result_id"].as_u64() > a["result_id"].as_u64());
}

#[tokio::test]
async fn delta_zero_gives_flat_boundary() {
    let (app, _) = phantom_app();
    let (status, body) = post(&app, "/api/segment", r#"{"seed":[32,32,32],"delta_r":0,"subdiv":2}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["boundary_stats"]["min"], body["boundary_stats"]["max"]);
}

#[tokio::test]
async fn segment_errors() {
    let (app, _) = phantom_app();
    for seed in ["[64,0,0]", "[-1,5,5]"] {
        let (status, body) = post(&app, "/api/segment", &format!(r#"{{"seed":{seed}}}"#)).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(body["error"], "seed outside volume");
    }
    for body in ["", "{", r#"{"seed":[1,2]}"#, r#"{"seed":"x"}"#, r#"{"delta_r":1}"#, r#"{"seed":[1,2,3],"bogus":1}"#] {
        assert_eq!(post(&app, "/api/segment", body).await.0, StatusCode::BAD_REQUEST, "{body}");
    }
    assert_eq!(post(&app, "/api/segment", r#"{"seed":[1,2,3],"samples":0}"#).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(post(&app, "/api/segment", r#"{"seed":[1,2,3],"subdiv":40}"#).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn contour_errors() {
    let (app, _) = phantom_app();
    assert_eq!(get(&app, "/api/result/1/contour/z/0").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/result/abc/contour/z/0").await.0, StatusCode::NOT_FOUND);
    let (_, body) = post(&app, "/api/segment", r#"{"seed":[32,32,32],"subdiv":1,"samples":20}"#).await;
    let id = body["result_id"].as_u64().unwrap();
    assert_eq!(get(&app, &format!("/api/result/{id}/contour/q/0")).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, &format!("/api/result/{id}/contour/x/64")).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn concurrent_segments_do_not_interfere() {
    let (app, spec) = phantom_app();
    let vol = spec.generate().unwrap();
    let params = SegParams { subdiv: 2, samples: 30, max_radius_mm: 30.0, ..SegParams::default() };
    let seeds = [[32, 32, 32], [28, 34, 30], [36, 30, 33], [31, 29, 35]];
    let handles: Vec<_> = seeds
        .iter()
        .map(|s| {
            let app = app.clone();
            let body = format!(r#"{{"seed":[{},{},{}],"subdiv":2,"samples":30,"radius_mm":30}}"#, s[0], s[1], s[2]);
            tokio::spawn(async move { post(&app, "/api/segment", &body).await.1 })
        })
        .collect();
    let mut ids = Vec::new();
    for (h, s) in handles.into_iter().zip(seeds) {
        let body = h.await.unwrap();
        let direct = raycut::segment(&vol, Seed::Voxel(s), &params).unwrap();
        assert_eq!(body["volume_mm3"].as_f64().unwrap(), direct.volume_mm3());
        ids.push(body["result_id"].as_u64().unwrap());
    }
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), seeds.len());
}

#[tokio::test]
async fn cors_headers_present() {
    let (app, _) = phantom_app();
    let req = Request::get("/api/volume").header("origin", "http://localhost:5173").body(Body::empty()).unwrap();
    let res = app.oneshot(req).await.unwrap();
    assert!(res.headers().contains_key("access-control-allow-origin"));
}
