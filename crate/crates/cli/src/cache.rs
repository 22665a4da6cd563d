//! On-disk cache of field moduli keyed by (p, r, D).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use mrdlab_core::{FieldContext, FieldParams, Result};

#[derive(Serialize, Deserialize)]
struct Entry {
    artifact_version: String,
    p: u32,
    r: u32,
    degree: u32,
    modulus: Vec<u32>,
}

pub fn load_context(params: FieldParams, dir: Option<&Path>) -> Result<FieldContext> {
    params.validate()?;
    let Some(dir) = dir else {
        return FieldContext::new(params);
    };
    let path = dir.join(format!("modulus-p{}-r{}-d{}.json", params.p, params.r, params.degree()));
    let cached = fs::read_to_string(&path)
        .ok()
        .and_then(|text| serde_json::from_str::<Entry>(&text).ok())
        .filter(|e| e.artifact_version == crate::ARTIFACT_VERSION);
    if let Some(entry) = cached {
        if let Ok(ctx) = FieldContext::with_modulus(params, entry.modulus) {
            return Ok(ctx);
        }
    }
    let ctx = FieldContext::new(params)?;
    let entry = Entry {
        artifact_version: crate::ARTIFACT_VERSION.to_string(),
        p: params.p,
        r: params.r,
        degree: params.degree(),
        modulus: ctx.modulus().to_vec(),
    };
    // a cache that cannot be written is only a missed speed-up
    if fs::create_dir_all(dir).is_ok() {
        let _ = fs::write(&path, serde_json::to_string_pretty(&entry).expect("serializable"));
    }
    Ok(ctx)
}
