//! The shipped example graphs of groups.

use crate::gog::{parse, GraphOfGroups};

pub const DINF: &str = include_str!("../fixtures/dinf.gog");
pub const PSL2Z: &str = include_str!("../fixtures/psl2z.gog");
pub const HNN: &str = include_str!("../fixtures/hnn.gog");
pub const F2: &str = include_str!("../fixtures/f2.gog");
pub const AMALGAM2: &str = include_str!("../fixtures/amalgam2.gog");

/// Fixture names with their documents, in a fixed order.
pub const DOCUMENTS: [(&str, &str); 5] =
    [("dinf", DINF), ("psl2z", PSL2Z), ("hnn", HNN), ("f2", F2), ("amalgam2", AMALGAM2)];

fn load(text: &str) -> GraphOfGroups {
    parse(text).expect("shipped fixture parses")
}

/// `C2 * C2`, vertices `v1 = {1, a}` and `v2 = {1, b}`.
pub fn dinf() -> GraphOfGroups {
    load(DINF)
}

/// `C2 * C3`, vertices `v1 = {1, c2}` and `v2 = {1, c3, c3^2}`.
pub fn psl2z() -> GraphOfGroups {
    load(PSL2Z)
}

/// `C2 x Z`: vertex `v = {1, c}` with loop `t`.
pub fn hnn() -> GraphOfGroups {
    load(HNN)
}

/// Free group on the loops `x` and `y`.
pub fn f2() -> GraphOfGroups {
    load(F2)
}

/// `S3 *_{C2} (C2 x C2) *_{C2} C4`.
pub fn amalgam2() -> GraphOfGroups {
    load(AMALGAM2)
}

pub fn by_name(name: &str) -> Option<GraphOfGroups> {
    DOCUMENTS.iter().find(|(n, _)| *n == name).map(|(_, t)| load(t))
}

pub fn all() -> Vec<(&'static str, GraphOfGroups)> {
    DOCUMENTS.iter().map(|(n, t)| (*n, load(t))).collect()
}
