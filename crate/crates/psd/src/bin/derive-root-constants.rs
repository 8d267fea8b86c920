//! Regenerates src/roots/constants.rs from the symbolic expansion.

fn main() {
    let derived = psd::roots::constants::derive();
    let names = [
        "SQ_PURE",
        "SQ_TRIPLE",
        "SQ_PAIR_DIAG",
        "SQ_PAIR_CROSS",
        "SQ_SINGLE_DIAG",
        "SQ_SINGLE_CROSS",
        "SQ_DISTINCT",
    ];
    println!("// Derived square-root identity constants (numerator, denominator):");
    for (name, (num, den)) in names.iter().zip(derived.iter()) {
        println!("pub const {}: (i64, i64) = ({}, {});", name, num, den);
    }
}
