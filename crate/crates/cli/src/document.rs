use serde::{Deserialize, Serialize};
use tverberg_core::colorful::ColorfulCertificate;
use tverberg_core::hamsandwich::DepthCertificate;
use tverberg_core::tverberg::{Mode, SelectionRule, TverbergCertificate};

pub const SCHEMA_VERSION: &str = "tverberg-nd/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema_version: String,
    pub input_digest: String,
    pub parameters: Parameters,
    pub certificate: Certificate,
    /// Wall-clock time of the algorithm, only with `--record-timing` so that
    /// documents are otherwise reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<SelectionRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Tverberg(TverbergCertificate),
    Colorful(ColorfulCertificate),
    HamSandwich(DepthCertificate),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Tverberg(_) => "tverberg",
            Certificate::Colorful(_) => "colorful",
            Certificate::HamSandwich(_) => "ham_sandwich",
        }
    }
}

impl CertificateDocument {
    pub fn new(input_digest: String, parameters: Parameters, certificate: Certificate) -> Self {
        CertificateDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            input_digest,
            parameters,
            certificate,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
