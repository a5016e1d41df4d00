//! From a self-replicating group to a scale group and back: compatible labelling,
//! extraction at the base vertex and comparison of level quotients.

use scalelab::automata::builtin;
use scalelab::corr::{build_labelling, check_compatible, correspondence_round_trip, ScaleGroupData};
use scalelab::trees::{TreeAction, UnrootedVertex};

fn main() -> scalelab::Result<()> {
    let data = ScaleGroupData::new(builtin("grigorchuk")?, 1, 3)?;
    let xs = data.transversal()?;
    let acts: Vec<_> = xs.iter().map(|x| data.action(x)).collect();
    let t: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    let built = build_labelling(&t, &UnrootedVertex::spine(2, 0), &data.window())?;
    let gens: Vec<_> = data.generators().iter().map(|x| data.action(x)).collect();
    let g: Vec<&dyn TreeAction> = gens.iter().map(|a| a as &dyn TreeAction).collect();
    let report = check_compatible(&built.labels, &data.window(), &g, 30, 1)?;
    println!("labelled {} vertices; compatibility: {report}", built.labels.labels.len());
    for name in ["odometer(2)", "odometer(3)", "grigorchuk", "gupta_sidki_3"] {
        let r = correspondence_round_trip(&builtin(name)?, 1, 3)?;
        let orders: Vec<_> = r.levels.iter().map(|l| l.order.clone()).collect();
        println!("{name}: round trip ok {}, orders {}", r.ok(), orders.join(" "));
    }
    Ok(())
}
