use std::collections::HashMap;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use raycut::contour::{slice_contours, Axis};
use raycut::volume::Volume;
use raycut::{eval, SegParams, Seed};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::state::{AppState, Session, StoredResult};

type ApiResult<T> = Result<T, ApiError>;

fn loaded(state: &AppState) -> ApiResult<std::sync::Arc<Session>> {
    state.session().ok_or_else(|| ApiError::not_found("no volume loaded"))
}

pub async fn volume_info(State(state): State<AppState>) -> ApiResult<Json<Value>> {
    let s = loaded(&state)?;
    let v = &s.volume;
    let (lo, hi) = v.intensity_range();
    Ok(Json(json!({
        "dims": v.dims(),
        "spacing_mm": v.spacing(),
        "origin_mm": v.origin(),
        "intensity_range": [lo, hi],
        "has_truth": s.truth.is_some(),
    })))
}

fn parse_axis(axis: &str) -> ApiResult<Axis> {
    axis.parse().map_err(|e: raycut::Error| ApiError::bad_request(e.to_string()))
}

fn parse_index(index: &str, axis: Axis, dims: [usize; 3]) -> ApiResult<usize> {
    match index.parse::<usize>() {
        Ok(i) if i < dims[axis.index()] => Ok(i),
        _ => Err(ApiError::bad_request(format!("slice index `{index}` out of range"))),
    }
}

fn parse_window(text: &str) -> ApiResult<(f64, f64)> {
    let bad = || ApiError::bad_request(format!("window must be `lo,hi` with lo < hi, got `{text}`"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// 8-bit grayscale rendering of one slice with a linear window.
pub fn render_slice(vol: &Volume, axis: Axis, index: usize, window: (f64, f64)) -> Vec<u8> {
    let (w, h) = axis.slice_size(vol.dims());
    let (lo, hi) = window;
    let mut pixels = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            let [i, j, k] = axis.voxel(index, u, v);
            let value = vol.get(i, j, k);
            let g = if hi > lo { ((value - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) } else { 0.0 };
            pixels.push(g as u8);
        }
    }
    pixels
}

fn encode_png(width: usize, height: usize, pixels: &[u8]) -> ApiResult<Vec<u8>> {
    let mut out = Vec::new();
    let internal = |e: png::EncodingError| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string());
    let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().map_err(internal)?;
    writer.write_image_data(pixels).map_err(internal)?;
    writer.finish().map_err(internal)?;
    Ok(out)
}

pub async fn slice_png(
    State(state): State<AppState>,
    Path((axis, index)): Path<(String, String)>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let s = loaded(&state)?;
    let axis = parse_axis(&axis)?;
    let index = parse_index(&index, axis, s.volume.dims())?;
    let window = match query.get("window") {
        Some(text) => parse_window(text)?,
        None => s.volume.intensity_range(),
    };
    let (w, h) = axis.slice_size(s.volume.dims());
    let png = encode_png(w, h, &render_slice(&s.volume, axis, index, window))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRequest {
    seed: [i64; 3],
    delta_r: Option<usize>,
    subdiv: Option<u32>,
    samples: Option<usize>,
    radius_mm: Option<f64>,
}

pub async fn segment(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let s = loaded(&state)?;
    let req: SegmentRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))?;
    let defaults = SegParams::default();
    let params = SegParams {
        subdiv: req.subdiv.unwrap_or(defaults.subdiv),
        samples: req.samples.unwrap_or(defaults.samples),
        max_radius_mm: req.radius_mm.unwrap_or(defaults.max_radius_mm),
        delta_r: req.delta_r.unwrap_or(defaults.delta_r),
        ..defaults
    };
    params.validate()?;
    if req.seed.iter().any(|&c| c < 0) {
        return Err(raycut::Error::SeedOutsideVolume.into());
    }
    let seed = Seed::Voxel(req.seed.map(|c| c as usize));

    let worker = s.clone();
    let seg = tokio::task::spawn_blocking(move || raycut::segment(&worker.volume, seed, &params))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;

    let dsc_pct = match &s.truth {
        Some(t) => Some(eval::dice(&seg.mask, t)? * 100.0),
        None => None,
    };
    let (bmin, bmax) = seg.boundary_range();
    let volume_mm3 = seg.volume_mm3();
    let t = seg.timings;
    let id = state.insert_result(StoredResult {
        mask: seg.mask,
        mesh: seg.mesh,
        cut: seg.cut,
        params,
        runtime_ms: t.total,
    });
    let mut body = json!({
        "result_id": id,
        "runtime_ms": t.total,
        "phase_ms": { "rays": t.rays, "graph": t.graph, "mincut": t.mincut, "voxelize": t.voxelize },
        "volume_mm3": volume_mm3,
        "boundary_stats": { "min": bmin, "max": bmax },
    });
    if let Some(d) = dsc_pct {
        body["dsc_pct"] = json!(d);
    }
    Ok(Json(body))
}

pub async fn contour(
    State(state): State<AppState>,
    Path((id, axis, index)): Path<(String, String, String)>,
) -> ApiResult<Json<Value>> {
    let result = id
        .parse::<u64>()
        .ok()
        .and_then(|id| state.result(id))
        .ok_or_else(|| ApiError::not_found(format!("unknown result `{id}`")))?;
    let axis = parse_axis(&axis)?;
    let index = parse_index(&index, axis, result.mask.dims())?;
    let lines = slice_contours(&result.mask, axis, index)?;
    Ok(Json(json!(lines)))
}
