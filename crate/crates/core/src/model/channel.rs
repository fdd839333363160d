use serde::{Deserialize, Serialize};

use super::ComparisonResult;

/// The ten scalar fields exported per receiver. Angular components are
/// reported in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Hrt,
    Crt,
    HrtDtau,
    HrtDp,
    HrtDdodDeg,
    HrtDdoaDeg,
    CrtDtau,
    CrtDp,
    CrtDdodDeg,
    CrtDdoaDeg,
}

impl Channel {
    pub const ALL: [Channel; 10] = [
        Channel::Hrt,
        Channel::Crt,
        Channel::HrtDtau,
        Channel::HrtDp,
        Channel::HrtDdodDeg,
        Channel::HrtDdoaDeg,
        Channel::CrtDtau,
        Channel::CrtDp,
        Channel::CrtDdodDeg,
        Channel::CrtDdoaDeg,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Channel::Hrt => "hrt",
            Channel::Crt => "crt",
            Channel::HrtDtau => "hrt_dtau",
            Channel::HrtDp => "hrt_dp",
            Channel::HrtDdodDeg => "hrt_ddod_deg",
            Channel::HrtDdoaDeg => "hrt_ddoa_deg",
            Channel::CrtDtau => "crt_dtau",
            Channel::CrtDp => "crt_dp",
            Channel::CrtDdodDeg => "crt_ddod_deg",
            Channel::CrtDdoaDeg => "crt_ddoa_deg",
        }
    }

    pub fn parse(s: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn is_angle(&self) -> bool {
        matches!(
            self,
            Channel::HrtDdodDeg | Channel::HrtDdoaDeg | Channel::CrtDdodDeg | Channel::CrtDdoaDeg
        )
    }

    /// Channel value of a result; `None` unless the status is ok.
    pub fn value(&self, r: &ComparisonResult) -> Option<f64> {
        if !r.is_ok() {
            return None;
        }
        let d = r.distances?;
        Some(match self {
            Channel::Hrt => d.hrt,
            Channel::Crt => d.crt,
            Channel::HrtDtau => d.hrt_components.d_tau,
            Channel::HrtDp => d.hrt_components.d_p,
            Channel::HrtDdodDeg => d.hrt_angles_deg().0,
            Channel::HrtDdoaDeg => d.hrt_angles_deg().1,
            Channel::CrtDtau => d.crt_components.d_tau,
            Channel::CrtDp => d.crt_components.d_p,
            Channel::CrtDdodDeg => d.crt_angles_deg().0,
            Channel::CrtDdoaDeg => d.crt_angles_deg().1,
        })
    }

    pub fn values(r: &ComparisonResult) -> [Option<f64>; 10] {
        Channel::ALL.map(|c| c.value(r))
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Channel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Channel::parse(s).ok_or_else(|| format!("unknown channel {s:?}"))
    }
}
