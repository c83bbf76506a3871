//! Shipped example machines.
//!
//! * `parity`: one quantum state; accepts exactly the words over `{a, b}` with an
//!   even number of `a`s after a single left-to-right sweep.
//! * `rotation`: rotates a qubit by `alpha` on `a` and by `-alpha` on `b`, measures
//!   at `#R`, rejects on `|q1>`, and otherwise walks back to `#L` where it accepts
//!   with probability `p_accept` or starts another sweep. Makes no bounded-error claim.
//! * `coin`: accepts or rejects with probability 1/2 on its first step.

use super::TwoQcfaSpec;

pub const PARITY_JSON: &str = include_str!("../../fixtures/parity.json");
pub const ROTATION_JSON: &str = include_str!("../../fixtures/rotation.json");
pub const COIN_JSON: &str = include_str!("../../fixtures/coin.json");

pub fn parity() -> TwoQcfaSpec {
    TwoQcfaSpec::from_json_str(PARITY_JSON).expect("parity fixture is valid")
}

pub fn rotation() -> TwoQcfaSpec {
    TwoQcfaSpec::from_json_str(ROTATION_JSON).expect("rotation fixture is valid")
}

pub fn coin() -> TwoQcfaSpec {
    TwoQcfaSpec::from_json_str(COIN_JSON).expect("coin fixture is valid")
}

/// Fixture by name: `parity`, `rotation` or `coin`.
pub fn by_name(name: &str) -> Option<TwoQcfaSpec> {
    match name {
        "parity" => Some(parity()),
        "rotation" => Some(rotation()),
        "coin" => Some(coin()),
        _ => None,
    }
}

pub fn all() -> Vec<(&'static str, TwoQcfaSpec)> {
    vec![("parity", parity()), ("rotation", rotation()), ("coin", coin())]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let p = parity();
        assert_eq!((p.k(), p.d()), (1, 5));
        let r = rotation();
        assert_eq!((r.k(), r.d(), r.results().len()), (2, 4, 2));
        let c = coin();
        assert_eq!((c.k(), c.d()), (1, 3));
    }
}
