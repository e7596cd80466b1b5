//! Content-addressed JSON cache for computed objects.
//!
//! Files are named by the SHA-256 of the canonical key and wrap the payload
//! with an embedded checksum; corrupt entries are detected and reported as
//! misses so callers recompute and overwrite.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cache_key(kind: &str, n: usize, deg: usize, key: &str) -> Value {
    json!({"kind": kind, "n": n, "deg": deg, "key": key})
}

fn path_for(dir: &Path, key: &Value) -> PathBuf {
    let mut h = Sha256::new();
    h.update(key.to_string().as_bytes());
    dir.join(format!("{}.json", hex(&h.finalize())))
}

pub fn put(dir: &Path, key: &Value, payload: &Value) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut h = Sha256::new();
    h.update(payload.to_string().as_bytes());
    let wrapped = json!({
        "key": key,
        "checksum": hex(&h.finalize()),
        "payload": payload,
    });
    let path = path_for(dir, key);
    fs::write(&path, serde_json::to_string_pretty(&wrapped)?)?;
    Ok(path)
}

/// Returns the payload when present and intact; `None` on miss or
/// corruption.
pub fn get(dir: &Path, key: &Value) -> Option<Value> {
    let path = path_for(dir, key);
    let text = fs::read_to_string(path).ok()?;
    let wrapped: Value = serde_json::from_str(&text).ok()?;
    if wrapped.get("key") != Some(key) {
        return None;
    }
    let payload = wrapped.get("payload")?.clone();
    let mut h = Sha256::new();
    h.update(payload.to_string().as_bytes());
    if wrapped.get("checksum")?.as_str()? != hex(&h.finalize()) {
        return None;
    }
    Some(payload)
}

/// Remove corrupt entries (or everything with `all`). Returns the number of
/// files removed.
pub fn gc(dir: &Path, all: bool) -> std::io::Result<usize> {
    let mut removed = 0;
    if !dir.exists() {
        return Ok(0);
    }
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if path.extension().map(|e| e != "json").unwrap_or(true) {
            continue;
        }
        let intact = (|| -> Option<bool> {
            let text = fs::read_to_string(&path).ok()?;
            let wrapped: Value = serde_json::from_str(&text).ok()?;
            let payload = wrapped.get("payload")?;
            let mut h = Sha256::new();
            h.update(payload.to_string().as_bytes());
            Some(wrapped.get("checksum")?.as_str()? == hex(&h.finalize()))
        })()
        .unwrap_or(false);
        if all || !intact {
            fs::remove_file(&path)?;
            removed += 1;
        }
    }
    Ok(removed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = std::env::temp_dir().join(format!("kpeterson-cache-test-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let key = cache_key("gkschur", 3, 4, "2,1");
        let payload = json!({"D": 4, "terms": [{"h": [1], "coeff": "1"}]});
        put(&dir, &key, &payload).unwrap();
        assert_eq!(get(&dir, &key), Some(payload.clone()));
        // different degree is a different key
        let other = cache_key("gkschur", 3, 6, "2,1");
        assert_eq!(get(&dir, &other), None);
        // corrupt the file: checksum mismatch → miss; gc removes it
        let path = path_for(&dir, &key);
        let mut wrapped: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        wrapped["payload"]["D"] = json!(99);
        fs::write(&path, wrapped.to_string()).unwrap();
        assert_eq!(get(&dir, &key), None);
        assert_eq!(gc(&dir, false).unwrap(), 1);
        // put again and byte-identical retrieval
        put(&dir, &key, &payload).unwrap();
        assert_eq!(get(&dir, &key), Some(payload));
        assert_eq!(gc(&dir, true).unwrap(), 1);
        let _ = fs::remove_dir_all(&dir);
    }
}
