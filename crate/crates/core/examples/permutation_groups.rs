//! Orders, orbits and block systems of small permutation groups.

use scalelab::perm::{parse_cycles, PermGroup};

fn main() -> scalelab::Result<()> {
    let flip = parse_cycles("(0 3)(1 4)(2 5)", 6)?;
    let rot = parse_cycles("(0 1 2)(3 4 5)", 6)?;
    let g = PermGroup::new(6, vec![flip, rot])?;
    println!("order {} abelian {} transitive {}", g.order()?, g.is_abelian(), g.is_transitive());
    for b in g.minimal_blocks()? {
        println!("minimal block system {:?}", b.blocks);
    }
    let s4 = PermGroup::symmetric(4);
    println!("Sym(4): order {}, primitive {}", s4.order()?, s4.is_primitive()?);
    Ok(())
}
