//! The shift on G(F, A): tidy subgroups, the coset tree, local permutations and residue groups.

use scalelab::gfa::{build_coset_tree, make_gfa, profile_residue, profile_tidiness, FSeqElement, FiniteGroup, TidyProfile};
use scalelab::trees::Window;

fn main() -> scalelab::Result<()> {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let alt3 = f.generate(&[f.element_by_name("t").expect("named")]);
    let pf = TidyProfile::band(&ctx, alt3, 1)?;
    let tidy = profile_tidiness(&pf)?;
    println!("q = {}, tidy {}, index {}", ctx.q(), tidy.tidy, tidy.index_of_shift);
    let tree = build_coset_tree(&ctx, &pf, Window::new(6, 1, 2))?;
    let sigma = f.element_by_name("s").expect("named");
    for (v, p) in tree.local_permutations(&FSeqElement::single(0, sigma), 0)?.into_iter().take(3) {
        println!("s at coordinate 0 permutes the children of {v} by {p}");
    }
    for d in 1..=3 {
        let r = profile_residue(&pf, d)?;
        println!("d = {d}: order {}, generators {:?}", r.order(), r.report.generators());
    }
    Ok(())
}
