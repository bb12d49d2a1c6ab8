use serde_json::{json, Value};

fn op(summary: &str, body: Option<&str>, ok: &str, errors: &[u16]) -> Value {
    let mut responses = serde_json::Map::new();
    responses.insert(ok.into(), json!({ "description": "success" }));
    for code in errors {
        responses.insert(code.to_string(), json!({ "$ref": "#/components/responses/Error" }));
    }
    let mut o = json!({ "summary": summary, "responses": responses });
    if let Some(schema) = body {
        o["requestBody"] = json!({ "content": { "application/json": { "schema": { "$ref": format!("#/components/schemas/{schema}") } } } });
    }
    o
}

/// OpenAPI description served at `/api/spec`.
pub fn document() -> Value {
    json!({
        "openapi": "3.0.3",
        "info": { "title": "relim workbench", "version": env!("CARGO_PKG_VERSION") },
        "paths": {
            "/problems/parse": { "post": op("Parse and canonicalize a problem", Some("ProblemInput"), "200", &[400, 409]) },
            "/sessions": { "post": op("Create a session rooted at a problem", Some("ProblemInput"), "201", &[400, 409]) },
            "/sessions/{id}": { "get": op("Session tree", None, "200", &[404]) },
            "/sessions/{id}/nodes/{n}/speedup": { "post": op("Apply one speedup step", Some("SpeedupRequest"), "201", &[400, 404, 409]) },
            "/sessions/{id}/nodes/{n}/merge": { "post": op("Merge labels by a total mapping", Some("MergeRequest"), "201", &[400, 404, 422]) },
            "/sessions/{id}/nodes/{n}/zero-round": { "post": op("Zero-round solvability with witness or refutations", Some("SideRequest"), "200", &[400, 404]) },
            "/sessions/{id}/nodes/{n}/strength-order": { "post": op("Strength order of the labels", Some("SideRequest"), "200", &[400, 404]) },
            "/certificates/build": { "post": op("Build a lower-bound certificate", Some("CertificateRequest"), "201", &[400, 409]) },
            "/certificates/{id}": { "get": op("Stored certificate", None, "200", &[404]) },
            "/jobs/{id}": { "get": op("Background job status", None, "200", &[404]) },
            "/jobs/{id}/cancel": { "post": op("Request cancellation", None, "200", &[404]) }
        },
        "components": {
            "responses": {
                "Error": { "description": "error", "content": { "application/json": { "schema": {
                    "type": "object",
                    "properties": { "error": { "type": "object", "properties": {
                        "code": { "type": "string", "enum": ["invalid_input", "not_found", "engine_cap", "map_not_total", "internal"] },
                        "message": { "type": "string" }
                    } } }
                } } } }
            },
            "schemas": {
                "ProblemInput": { "type": "object", "properties": { "text": { "type": "string" }, "problem": { "type": "object" } } },
                "SpeedupRequest": { "type": "object", "properties": { "async": { "type": "boolean" } } },
                "MergeRequest": { "type": "object", "required": ["mapping"], "properties": { "mapping": { "type": "object", "additionalProperties": { "type": "string" } } } },
                "SideRequest": { "type": "object", "properties": { "side": { "type": "string", "enum": ["active", "passive"] } } },
                "CertificateRequest": { "type": "object", "required": ["delta", "maxT"], "properties": {
                    "delta": { "type": "integer", "minimum": 1 }, "maxT": { "type": "integer", "minimum": 0 }, "async": { "type": "boolean" }
                } }
            }
        }
    })
}
