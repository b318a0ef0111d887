//! JSON network documents.
//!
//! Format: `{"arch":[N0,...,NL], "layers":[{"A":[[...],...],"b":[...]}, ...]}`.
//! Floats are written in shortest round-trip form, so decoding restores
//! every finite double bit for bit.

use crate::error::{Error, Result};
use crate::network::{Layer, LayerDoc, Matrix, Network, NetworkDoc};

pub(crate) fn to_doc(net: &Network) -> NetworkDoc {
    NetworkDoc {
        arch: net.arch().dims().to_vec(),
        layers: net
            .layers()
            .iter()
            .map(|l| LayerDoc {
                a: l.weights.to_rows(),
                b: l.bias.clone(),
            })
            .collect(),
    }
}

pub fn to_json(net: &Network) -> Result<String> {
    if net.params().iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "network contains non-finite parameters".into(),
        ));
    }
    serde_json::to_string(&to_doc(net)).map_err(|e| Error::Validation(e.to_string()))
}

pub fn to_json_value(net: &Network) -> serde_json::Value {
    serde_json::to_value(to_doc(net)).expect("network documents always serialize")
}

pub fn from_json(text: &str) -> Result<Network> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: NetworkDoc = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    from_doc(doc)
}

pub(crate) fn from_doc(doc: NetworkDoc) -> Result<Network> {
    if doc.layers.is_empty() {
        return Err(Error::Validation("document has no layers".into()));
    }
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (l, layer) in doc.layers.into_iter().enumerate() {
        let cols = layer.a.first().map_or(0, Vec::len);
        if let Some((i, row)) = layer.a.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Parse {
                path: format!("layers[{l}].A[{i}]"),
                message: format!("row has length {}, expected {cols}", row.len()),
            });
        }
        let weights = Matrix::from_rows(&layer.a).map_err(|e| Error::Parse {
            path: format!("layers[{l}].A"),
            message: e.to_string(),
        })?;
        let layer = Layer::new(weights, layer.b).map_err(|e| Error::Parse {
            path: format!("layers[{l}].b"),
            message: e.to_string(),
        })?;
        if let Some(prev) = layers.last() {
            let prev: &Layer = prev;
            if prev.out_dim() != layer.in_dim() {
                return Err(Error::Parse {
                    path: format!("layers[{l}]"),
                    message: format!(
                        "layer expects input width {} but layer {} produces {}",
                        layer.in_dim(),
                        l - 1,
                        prev.out_dim()
                    ),
                });
            }
        }
        layers.push(layer);
    }
    let net = Network::new(layers).map_err(|e| Error::Validation(e.to_string()))?;
    if net.arch().dims() != doc.arch.as_slice() {
        return Err(Error::Validation(format!(
            "arch field {:?} disagrees with layer shapes {}",
            doc.arch,
            net.arch()
        )));
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_witness() -> Network {
        Network::new(vec![
            Layer::from_rows(&[vec![8.0], vec![8.0]], &[0.0, -1.0]).unwrap(),
            Layer::from_rows(&[vec![1.0, -1.0]], &[0.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn round_trip_step_witness() {
        let net = step_witness();
        let back = from_json(&to_json(&net).unwrap()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn round_trip_awkward_doubles() {
        let vals = [
            0.1,
            1.0 / 3.0,
            -2.0e-308,
            1.7976931348623157e308,
            5e-324,
            -0.0,
        ];
        let net = Network::new(vec![Layer::from_rows(
            &[vals.to_vec()],
            &[std::f64::consts::PI],
        )
        .unwrap()])
        .unwrap();
        let back = from_json(&to_json(&net).unwrap()).unwrap();
        for (a, b) in back.params().iter().zip(net.params()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn row_length_mismatch_names_layer() {
        let doc = r#"{"arch":[2,2,1],"layers":[
            {"A":[[1,2],[3,4]],"b":[0,0]},
            {"A":[[1,2,3]],"b":[0]}]}"#;
        match from_json(doc) {
            Err(Error::Parse { path, .. }) => assert!(path.starts_with("layers[1]"), "{path}"),
            other => panic!("expected parse error, got {other:?}"),
        }
        let ragged = r#"{"arch":[2,2,1],"layers":[
            {"A":[[1,2],[3]],"b":[0,0]},
            {"A":[[1,2]],"b":[0]}]}"#;
        match from_json(ragged) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "layers[0].A[1]"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_arch_field() {
        let doc = r#"{"arch":[1,3,1],"layers":[
            {"A":[[1],[1]],"b":[0,-1]},
            {"A":[[1,-1]],"b":[0]}]}"#;
        assert!(matches!(from_json(doc), Err(Error::Validation(_))));
    }

    #[test]
    fn type_errors_carry_a_path() {
        let doc = r#"{"arch":[1,1],"layers":[{"A":[["x"]],"b":[0]}]}"#;
        match from_json(doc) {
            Err(Error::Parse { path, .. }) => assert!(path.contains("layers[0].A"), "{path}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
