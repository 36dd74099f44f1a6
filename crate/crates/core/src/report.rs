//! JSON envelope shared by every machine-readable artifact.

use serde::Serialize;

use crate::SCHEMA;

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub kind: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(kind: impl Into<String>, body: T) -> Self {
        Self { schema: SCHEMA, kind: kind.into(), body }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
