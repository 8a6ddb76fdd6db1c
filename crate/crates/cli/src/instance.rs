//! On-disk instance description and flag overrides.

use chandisc_core::channels::{Channel, ChannelJson, DensityMatrix};
use chandisc_core::error::Error;
use serde::{Deserialize, Serialize};

/// Sweep grid over one scalar parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    /// `"epsilon"` or `"p"`.
    pub variable: String,
    pub values: Vec<f64>,
}

/// Instance file: priors and error budget plus two or more channels (or a
/// pair of states), with an optional sweep grid. Command-line flags override
/// the scalar fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<ChannelJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<ChannelJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl InstanceFile {
    pub fn load(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read instance file {path:?}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| {
            Error::Validation(format!("instance file {path:?} is not valid JSON: {e}"))
        })
    }

    pub fn channels(&self) -> Result<Vec<Channel>, Error> {
        let specs = self
            .channels
            .as_ref()
            .ok_or_else(|| Error::Validation("instance file has no \"channels\"".into()))?;
        specs.iter().map(|c| c.to_channel()).collect()
    }

    pub fn channel_pair(&self) -> Result<(Channel, Channel), Error> {
        let chans = self.channels()?;
        if chans.len() != 2 {
            return Err(Error::Validation(format!(
                "binary commands need exactly 2 channels, found {}",
                chans.len()
            )));
        }
        let mut it = chans.into_iter();
        Ok((it.next().unwrap(), it.next().unwrap()))
    }

    pub fn state_pair(&self) -> Result<(DensityMatrix, DensityMatrix), Error> {
        let specs = self
            .states
            .as_ref()
            .ok_or_else(|| Error::Validation("instance file has no \"states\"".into()))?;
        if specs.len() != 2 {
            return Err(Error::Validation(format!(
                "state commands need exactly 2 states, found {}",
                specs.len()
            )));
        }
        Ok((specs[0].to_state()?, specs[1].to_state()?))
    }

    pub fn require_p(&self) -> Result<f64, Error> {
        self.p
            .ok_or_else(|| Error::Validation("prior p missing (set \"p\" or pass --p)".into()))
    }

    pub fn require_epsilon(&self) -> Result<f64, Error> {
        self.epsilon.ok_or_else(|| {
            Error::Validation("error budget missing (set \"epsilon\" or pass --eps)".into())
        })
    }

    pub fn require_delta(&self) -> Result<f64, Error> {
        self.delta.ok_or_else(|| {
            Error::Validation("type-II budget missing (set \"delta\" or pass --delta)".into())
        })
    }
}
