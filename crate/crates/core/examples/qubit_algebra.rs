//! Rotations, adjoints and why the two secret transforms must commute.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

use threestage::{adjoint, apply, commutator_norm, compose, fidelity, rotation, Qubit, Unitary2};

fn main() -> threestage::Result<()> {
    let r6 = rotation(FRAC_PI_6)?;
    let r3 = rotation(FRAC_PI_3)?;
    let quarter = compose(&r6, &r3);
    let q = apply(&quarter, &Qubit::zero());
    println!("R(pi/6) R(pi/3) |0> = {:?}", q);
    println!("fidelity with |1>   = {:.15}", fidelity(&q, &Qubit::one()));

    let back = apply(&adjoint(&quarter), &q);
    println!("after adjoint       = {:?}", back);

    let (a, b) = (rotation(0.4)?, rotation(1.1)?);
    println!("||[R(0.4), R(1.1)]|| = {:e}", commutator_norm(&a, &b));
    println!(
        "||[R(0.4), Z]||      = {:.6}",
        commutator_norm(&a, &Unitary2::pauli_z())
    );
    Ok(())
}
