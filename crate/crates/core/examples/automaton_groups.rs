//! Level quotients and the self-replication test for the bundled automaton groups.

use scalelab::automata::{builtin, check_self_replicating, level_quotient};

fn main() -> scalelab::Result<()> {
    for name in ["odometer(2)", "odometer(3)", "grigorchuk", "gupta_sidki_3", "full_sym_level(3)"] {
        let g = builtin(name)?;
        let orders = (1..=4)
            .map(|d| level_quotient(&g, d).and_then(|lq| lq.group.order()).map(|o| o.to_string()))
            .collect::<scalelab::Result<Vec<_>>>()?;
        let sr = check_self_replicating(&g, 3)?;
        println!("{name}: level orders {}, self-replicating to depth 3: {}", orders.join(" "), sr.passed());
    }
    let g = builtin("grigorchuk")?;
    let b = g.parse_word("b")?;
    let (image, section) = g.section_word(&b, &[0]);
    println!("grigorchuk b at 0: image {image:?}, section has {} letters", section.len());
    Ok(())
}
