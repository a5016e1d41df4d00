//! Residue groups, coset equivalence and the primitivity criterion for uniqueness.

use scalelab::automata::builtin;
use scalelab::perm::PermGroup;
use scalelab::residue::{coset_equivalence_check, residue, uniqueness_criterion};

fn main() -> scalelab::Result<()> {
    let g = builtin("gupta_sidki_3")?;
    for d in 1..=3 {
        let r = residue(&g, d)?;
        println!("level {d}: order {}, generators {:?}", r.fingerprint.order, r.generators());
    }
    let eq = coset_equivalence_check(&g, 2, &[0, 0])?;
    println!("level-2 action equivalent to the coset action: {}", eq.equivalent);
    for q in 3..=5 {
        let u = uniqueness_criterion(&PermGroup::symmetric(q))?;
        println!("Sym({q}) natural action: unique {}", u.unique_up_to_conjugacy);
    }
    let u = uniqueness_criterion(&PermGroup::cyclic(4))?;
    println!("C4 regular: unique {}, blocks {:?}", u.unique_up_to_conjugacy, u.witness_blocks.map(|b| b.blocks));
    Ok(())
}
