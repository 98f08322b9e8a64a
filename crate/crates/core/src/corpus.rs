//! Protocols shipped with the crate.

/// `(file name, source)` for every valid bundled protocol.
pub const PROTOCOLS: &[(&str, &str)] = &[
    ("teleport.qpr", TELEPORT),
    ("teleport_noX.qpr", TELEPORT_NO_X),
    ("teleport_noZ.qpr", TELEPORT_NO_Z),
    ("identity1.qpr", include_str!("../corpus/identity1.qpr")),
    ("identity_hh.qpr", include_str!("../corpus/identity_hh.qpr")),
    ("identity2_xx.qpr", include_str!("../corpus/identity2_xx.qpr")),
    ("swap_cnot.qpr", include_str!("../corpus/swap_cnot.qpr")),
    ("swap_relabel.qpr", include_str!("../corpus/swap_relabel.qpr")),
];

/// Sources that must be rejected with a diagnostic.
pub const INVALID: &[(&str, &str)] = &[
    ("bad_syntax.qpr", include_str!("../corpus/invalid/bad_syntax.qpr")),
    ("non_clifford.qpr", include_str!("../corpus/invalid/non_clifford.qpr")),
    ("undeclared_cbit.qpr", include_str!("../corpus/invalid/undeclared_cbit.qpr")),
];

pub const TELEPORT: &str = include_str!("../corpus/teleport.qpr");
pub const TELEPORT_NO_X: &str = include_str!("../corpus/teleport_noX.qpr");
pub const TELEPORT_NO_Z: &str = include_str!("../corpus/teleport_noZ.qpr");

/// Looks up a bundled file, with or without its `.qpr` extension.
pub fn get(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".qpr").unwrap_or(name);
    PROTOCOLS.iter().chain(INVALID).find(|(n, _)| n.strip_suffix(".qpr") == Some(stem)).map(|(_, s)| *s)
}
