//! DOT rendering of a labelled window: the coset tree of G(Sym(3)) around the base vertex.

use scalelab::cli::{export_dot, LabelledWindowTree};
use scalelab::gfa::{build_coset_tree, make_gfa, FiniteGroup, TidyProfile};
use scalelab::trees::Window;

fn main() -> scalelab::Result<()> {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let tree = build_coset_tree(&ctx, &TidyProfile::v0(&ctx), Window::from_range(6, -1, 1))?;
    print!("{}", export_dot(&LabelledWindowTree::from_coset_tree(&tree)?)?);
    Ok(())
}
