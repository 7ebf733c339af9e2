//! Instance input documents: parsing, validation, canonical serialization,
//! and content digests.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use tan2theta::linalg::{DenseRect, DenseSymmetric};
use tan2theta::model::{BlockOperatorSpec, Layout};

use crate::json::Json;

/// One operator instance as stored on disk: the two diagonal blocks (by
/// magnitude), the coupling block, the layout tag that fixes the signs, and
/// an optional gap hint.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub label: String,
    pub layout: String,
    pub a_plus: Vec<Vec<f64>>,
    pub a_minus: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    #[serde(default)]
    pub hint: Option<(f64, f64)>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile, String> {
        let instance: InstanceFile =
            serde_json::from_str(text).map_err(|e| format!("invalid instance document: {e}"))?;
        for (name, block) in [
            ("a_plus", &instance.a_plus),
            ("a_minus", &instance.a_minus),
            ("w", &instance.w),
        ] {
            if block.is_empty() || block[0].is_empty() {
                return Err(format!("block {name:?} must have at least one row and column"));
            }
            let cols = block[0].len();
            if block.iter().any(|row| row.len() != cols) {
                return Err(format!("block {name:?} is not rectangular"));
            }
            if block.iter().flatten().any(|x| !x.is_finite()) {
                return Err(format!("block {name:?} contains a non-finite entry"));
            }
        }
        if let Some((lo, hi)) = instance.hint {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(format!("gap hint ({lo}, {hi}) is not an ordered finite interval"));
            }
        }
        Ok(instance)
    }

    /// Converts to the library's block specification; layout and dimension
    /// errors surface as library errors.
    pub fn to_spec(&self) -> tan2theta::Result<BlockOperatorSpec> {
        let layout = Layout::parse(&self.layout)?;
        let a_plus = DenseSymmetric::from_rows(&self.a_plus)?;
        let a_minus = DenseSymmetric::from_rows(&self.a_minus)?;
        let w = DenseRect::from_rows(&self.w)?;
        BlockOperatorSpec::new(self.label.clone(), layout, a_plus, a_minus, w)
    }

    /// Canonical serialization: fixed field order, 17-significant-digit
    /// floats.  Serializing a parsed canonical document reproduces it byte
    /// for byte.
    pub fn canonical(&self) -> String {
        let block = |rows: &[Vec<f64>]| {
            Json::Array(
                rows.iter()
                    .map(|row| Json::from(row.clone()))
                    .collect(),
            )
        };
        let mut doc = Json::object()
            .field("label", self.label.as_str())
            .field("layout", self.layout.as_str())
            .field("a_plus", block(&self.a_plus))
            .field("a_minus", block(&self.a_minus))
            .field("w", block(&self.w));
        if let Some((lo, hi)) = self.hint {
            doc = doc.field("hint", vec![lo, hi]);
        }
        doc.to_document()
    }

    /// Hex SHA-256 digest of the canonical serialization.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical().as_bytes());
        let bytes = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in bytes {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> &'static str {
        r#"{
            "label": "example",
            "layout": "central",
            "a_plus": [[1.0]],
            "a_minus": [[1.0]],
            "w": [[1.0]],
            "hint": [-1.5, 1.5]
        }"#
    }

    #[test]
    fn parses_and_converts_a_valid_document() {
        let instance = InstanceFile::parse(example()).unwrap();
        assert_eq!(instance.label, "example");
        assert_eq!(instance.hint, Some((-1.5, 1.5)));
        let spec = instance.to_spec().unwrap();
        assert_eq!(spec.n_plus() + spec.n_minus(), 2);
    }

    #[test]
    fn canonical_serialization_is_idempotent() {
        let instance = InstanceFile::parse(example()).unwrap();
        let once = instance.canonical();
        let reparsed = InstanceFile::parse(&once).unwrap();
        assert_eq!(reparsed.canonical(), once);
        assert_eq!(reparsed.digest(), instance.digest());
    }

    #[test]
    fn digest_changes_with_content() {
        let a = InstanceFile::parse(example()).unwrap();
        let mut b = a.clone();
        b.w[0][0] = 2.0;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(InstanceFile::parse("{").is_err());
        assert!(InstanceFile::parse("{\"label\": \"x\"}").is_err());
        // Unknown fields are rejected.
        let extra = example().replace("\"hint\"", "\"extra\": 1, \"hint\"");
        assert!(InstanceFile::parse(&extra).is_err());
        // Ragged blocks are rejected.
        let ragged = r#"{"label":"x","layout":"central","a_plus":[[1.0]],"a_minus":[[1.0]],"w":[[1.0],[2.0,3.0]]}"#;
        assert!(InstanceFile::parse(ragged).is_err());
        // Degenerate hints are rejected.
        let bad_hint = example().replace("[-1.5, 1.5]", "[1.5, -1.5]");
        assert!(InstanceFile::parse(&bad_hint).is_err());
    }

    #[test]
    fn bad_layout_tag_surfaces_as_library_error() {
        let doc = example().replace("central", "diagonal");
        let instance = InstanceFile::parse(&doc).unwrap();
        assert!(instance.to_spec().is_err());
    }
}
