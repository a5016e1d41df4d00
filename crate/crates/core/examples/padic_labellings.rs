//! The affine group of Q_p on its Bruhat-Tits tree: digit arithmetic, the action on
//! vertices and one compatible labelling per unit.

use scalelab::corr::check_compatible;
use scalelab::padic::{label_edges, odometer_extract, AffineElement, PAdicVertex, PAdicWindow};
use scalelab::trees::{TreeAction, Window};

fn main() -> scalelab::Result<()> {
    let half = PAdicWindow::from_rational(5, 1, 2, 6)?;
    println!("1/2 in Z_5 = {half}");
    let x = AffineElement::integers(5, 1, 5)?;
    let v = PAdicVertex::new(&PAdicWindow::exact_integer(5, 7)?, 1)?;
    let image = PAdicVertex::from_unrooted(&x.act(&v.to_unrooted())?)?;
    println!("(1, 5) sends {v} to {image}");
    let window = Window::from_range(5, -1, 3);
    for b in 1..5u64 {
        let labels = label_edges(&PAdicWindow::exact_integer(5, b)?, &window)?;
        let gens = [AffineElement::integers(5, 1, 1)?, AffineElement::integers(5, 0, 5 * b)?];
        let g: Vec<&dyn TreeAction> = gens.iter().map(|a| a as &dyn TreeAction).collect();
        println!("b = {b}: {}", check_compatible(&labels, &window, &g, 20, 1)?);
    }
    let odo = odometer_extract(3, 3)?;
    println!("odometer at p = 3, depth 3: order {}, matches builtin {}", odo.order, odo.identical);
    Ok(())
}
