//! End-fixing isometries given by a translation and a finite portrait of local permutations.

use std::collections::BTreeMap;

use scalelab::perm::parse_cycles;
use scalelab::portraits::PortraitElement;
use scalelab::trees::UnrootedVertex;

fn main() -> scalelab::Result<()> {
    let q = 3;
    let v = |s: &str| UnrootedVertex::parse(q, s);
    let c = parse_cycles("(0 1 2)", q)?;
    let a = PortraitElement::new(q, 1, BTreeMap::from([(v("0:")?, c.clone())]))?;
    let b = PortraitElement::single(v("1:2")?, parse_cycles("(0 1)", q)?)?;
    let ab = a.compose(&b)?;
    let x = v("2:21")?;
    println!("a(b({x})) = {}", ab.apply(&x));
    println!("elliptic: a {}, b {}", a.is_elliptic(), b.is_elliptic());
    let section = b.section(&UnrootedVertex::spine(q, 0))?;
    println!("section of b below the base vertex moves 2 -> {:?}", section.apply(&[2, 0]));
    println!("{}", serde_json::to_string(&ab).expect("portraits serialize"));
    Ok(())
}
