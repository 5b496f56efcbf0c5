use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Stock device profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Button,
    Led,
    Notification,
    Gps,
    Light,
    Sms,
    /// Logic-only node with the virtual timer.
    Generic,
}

impl NodeKind {
    pub const ALL: [NodeKind; 7] = [
        NodeKind::Button,
        NodeKind::Led,
        NodeKind::Notification,
        NodeKind::Gps,
        NodeKind::Light,
        NodeKind::Sms,
        NodeKind::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Button => "button",
            NodeKind::Led => "led",
            NodeKind::Notification => "notification",
            NodeKind::Gps => "gps",
            NodeKind::Light => "light",
            NodeKind::Sms => "sms",
            NodeKind::Generic => "generic",
        }
    }

    /// Feature names offered by this kind.
    pub fn features(self) -> Vec<String> {
        let name = match self {
            NodeKind::Generic => "timer",
            k => k.name(),
        };
        vec![name.to_string()]
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown node kind `{s}`"))
    }
}
