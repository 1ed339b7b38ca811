use serde_json::Value;

/// Flatten a JSON value into `path,value` rows, one per leaf.
pub fn flatten_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    walk(v, String::new(), &mut rows);
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["key", "value"]).expect("write to memory");
    for (k, val) in rows {
        w.write_record([k, val]).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

fn walk(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                walk(x, join(k), rows);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                walk(x, join(&i.to_string()), rows);
            }
        }
        Value::String(s) => rows.push((path, s.clone())),
        Value::Null => rows.push((path, String::new())),
        other => rows.push((path, other.to_string())),
    }
}
