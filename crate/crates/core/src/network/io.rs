//! JSON model files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Architecture, Dense, Network, NetworkError, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Everything stored next to the parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelMeta {
    /// Pipeline settings the model was trained against.
    pub feature_config: serde_json::Value,
    /// Label for each output index.
    pub label_table: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format_version: u32,
    architecture: Vec<usize>,
    layers: Vec<LayerDoc>,
    #[serde(default)]
    feature_config: serde_json::Value,
    #[serde(default)]
    label_table: Vec<String>,
}

pub fn save_model(net: &Network, path: &Path) -> Result<()> {
    save_model_with(net, &ModelMeta::default(), path)
}

pub fn save_model_with(net: &Network, meta: &ModelMeta, path: &Path) -> Result<()> {
    let doc = ModelDoc {
        format_version: FORMAT_VERSION,
        architecture: net.architecture().sizes().to_vec(),
        layers: net
            .layers
            .iter()
            .map(|l| LayerDoc {
                weights: l.weights.chunks(l.inputs).map(<[f64]>::to_vec).collect(),
                biases: l.biases.clone(),
            })
            .collect(),
        feature_config: meta.feature_config.clone(),
        label_table: meta.label_table.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| NetworkError::SchemaMismatch(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<Network> {
    load_model_with_meta(path).map(|(net, _)| net)
}

pub fn load_model_with_meta(path: &Path) -> Result<(Network, ModelMeta)> {
    let text = fs::read_to_string(path)?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| NetworkError::SchemaMismatch(e.to_string()))?;
    match raw
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
    {
        Some(v) if v == u64::from(FORMAT_VERSION) => {}
        Some(v) => {
            return Err(NetworkError::SchemaMismatch(format!(
                "unknown format_version {v}"
            )));
        }
        None => {
            return Err(NetworkError::SchemaMismatch(
                "missing format_version".into(),
            ))
        }
    }
    let doc: ModelDoc =
        serde_json::from_value(raw).map_err(|e| NetworkError::SchemaMismatch(e.to_string()))?;

    let arch = Architecture::new(doc.architecture)
        .map_err(|e| NetworkError::ShapeMismatch(e.to_string()))?;
    let sizes = arch.sizes();
    if doc.layers.len() != sizes.len() - 1 {
        return Err(NetworkError::ShapeMismatch(format!(
            "architecture {arch} declares {} layers, file has {}",
            sizes.len() - 1,
            doc.layers.len()
        )));
    }
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (i, (l, w)) in doc.layers.into_iter().zip(sizes.windows(2)).enumerate() {
        let (inputs, outputs) = (w[0], w[1]);
        if l.weights.len() != outputs || l.weights.iter().any(|r| r.len() != inputs) {
            return Err(NetworkError::ShapeMismatch(format!(
                "layer {i}: weights are not {outputs}x{inputs}"
            )));
        }
        if l.biases.len() != outputs {
            return Err(NetworkError::ShapeMismatch(format!(
                "layer {i}: expected {outputs} biases, found {}",
                l.biases.len()
            )));
        }
        layers.push(Dense {
            inputs,
            outputs,
            weights: l.weights.concat(),
            biases: l.biases,
        });
    }
    let net = Network::from_layers(layers)?;
    Ok((
        net,
        ModelMeta {
            feature_config: doc.feature_config,
            label_table: doc.label_table,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::init_network;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tmp();
        let path = dir.path().join("m.json");
        let mut net = init_network(&Architecture::new(vec![7, 5, 3]).unwrap(), 4);
        // awkward values that lose bits under naive formatting
        net.layers[0].weights[0] = 0.1 + 0.2;
        net.layers[1].biases[2] = f64::MIN_POSITIVE;
        net.layers[1].weights[1] = -1.0 / 3.0;
        let meta = ModelMeta {
            feature_config: serde_json::json!({"k": 8, "coeff_count": 14}),
            label_table: vec!["a".into(), "b".into(), "c".into()],
        };
        save_model_with(&net, &meta, &path).unwrap();
        let (back, back_meta) = load_model_with_meta(&path).unwrap();
        assert_eq!(back_meta, meta);
        for (a, b) in net.layers.iter().zip(&back.layers) {
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a.weights), bits(&b.weights));
            assert_eq!(bits(&a.biases), bits(&b.biases));
        }
    }

    #[test]
    fn file_layout() {
        let dir = tmp();
        let path = dir.path().join("m.json");
        let net = Network::zeros(&Architecture::new(vec![2, 1]).unwrap());
        save_model(&net, &path).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["architecture"], serde_json::json!([2, 1]));
        assert_eq!(v["layers"][0]["weights"], serde_json::json!([[0.0, 0.0]]));
        assert_eq!(v["layers"][0]["biases"], serde_json::json!([0.0]));
    }

    #[test]
    fn shape_mismatch() {
        let dir = tmp();
        let path = dir.path().join("m.json");
        fs::write(
            &path,
            r#"{"format_version":1,"architecture":[2,1],"layers":[{"weights":[[0.0]],"biases":[0.0]}]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(NetworkError::ShapeMismatch(_))
        ));
        fs::write(
            &path,
            r#"{"format_version":1,"architecture":[2,1,1],"layers":[{"weights":[[0.0,0.0]],"biases":[0.0]}]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(NetworkError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn schema_mismatch() {
        let dir = tmp();
        let path = dir.path().join("m.json");
        fs::write(
            &path,
            r#"{"format_version":2,"architecture":[1,1],"layers":[]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(NetworkError::SchemaMismatch(_))
        ));
        fs::write(&path, "not json").unwrap();
        assert!(matches!(
            load_model(&path),
            Err(NetworkError::SchemaMismatch(_))
        ));
        assert!(matches!(
            load_model(&dir.path().join("absent.json")),
            Err(NetworkError::IoFailure(_))
        ));
    }
}
