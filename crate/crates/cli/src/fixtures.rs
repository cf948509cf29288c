//! The example systems shipped in `fixtures/`, embedded for `selftest`.

use crate::parse::{parse_system, SystemFile};

pub const ADDITIVE: &str = include_str!("../../../fixtures/additive.sys");
pub const SQUARING: &str = include_str!("../../../fixtures/squaring.sys");
pub const SCALING: &str = include_str!("../../../fixtures/scaling.sys");

pub const ALL: [(&str, &str); 3] = [("additive", ADDITIVE), ("squaring", SQUARING), ("scaling", SCALING)];

pub fn load(text: &str) -> SystemFile {
    parse_system(text).expect("embedded fixtures parse")
}
