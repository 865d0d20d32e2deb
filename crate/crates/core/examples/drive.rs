// End-to-end drive: verify a known identity, build the Frey curve, run a
// bound scan, and combine discard conditions, through the public API only.
use num_bigint::BigInt;
use sextic_core::discard::{combine_conditions, SymplecticCondition};
use sextic_core::ellenberg::{eval_e4, find_bound, BoundParams, TermImpls};
use sextic_core::frey::{frey_curve, verify_solution};

fn main() -> sextic_core::Result<()> {
    // d = 7: 1^2 + 7*1^6 = 2^3 drives the solution plumbing.
    verify_solution(&BigInt::from(1), &BigInt::from(1), &BigInt::from(2), 7, 3)?;
    let e = frey_curve(&BigInt::from(1), &BigInt::from(1), 7);
    println!("frey curve singular: {}", e.is_singular());

    let params = BoundParams::new(7, 38, TermImpls::reference())?;
    let report = find_bound(7, &params)?;
    println!("q = 7 first positive prime: {}", report.first_positive_prime);
    println!("E4(23, 7) = {}", eval_e4(23, 7, 38));

    let tied_a = SymplecticCondition::tied(-6, "drive")?;
    let tied_b = SymplecticCondition::tied(-2, "drive")?;
    let result = combine_conditions(&[vec![tied_a, tied_b]]);
    println!(
        "excluded {:?} mod {} (density {})",
        result.excluded_classes, result.modulus, result.density
    );
    Ok(())
}
