//! Outage and throughput of wireless-powered cooperative uplinks.
//!
//! A hybrid access point charges a source and a relay over the downlink; both
//! spend the harvested energy on the uplink. Three protocols are modeled:
//! harvest-then-transmit (HTT), harvest-then-cooperate (HTC), and an adaptive
//! protocol (AT) that uses the direct link whenever it suffices and falls back
//! to cooperation otherwise. All links are Nakagami-m with integer severity.
//!
//! The crate provides closed-form outage probabilities ([`analytic`]), a
//! seeded Monte Carlo simulator ([`montecarlo`]), a grid optimizer for the
//! energy-transfer fraction ([`optimizer`]) and a sweep harness that produces
//! figure-ready CSV tables ([`scenario`]).

pub mod acceptance;
pub mod analytic;
pub mod channel;
pub mod error;
pub mod exec;
pub mod montecarlo;
pub mod optimizer;
pub mod oracle;
pub mod protocol;
pub mod scenario;
pub mod specfun;

pub use analytic::{outage_cf, throughput_cf};
pub use channel::{LinkSpec, Topology};
pub use error::{Error, Result};
pub use exec::Backend;
pub use montecarlo::{OutageEstimate, Simulator};
pub use protocol::{ChannelRealization, ProtocolKind, RelayMode, Severities, SystemParams};
