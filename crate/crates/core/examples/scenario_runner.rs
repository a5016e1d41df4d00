//! Running a scenario from text and printing its JSON report lines.

use std::path::Path;

use scalelab::cli::{parse_scenario, run_scenario};

const SCENARIO: &str = r#"
gfa F=sym3 A=1 tidy=V r=1
residue d=1 expect-order=6 expect-abelian=true
tidiness
group builtin=grigorchuk
check-sr depth=3 expect=pass
"#;

fn main() -> scalelab::Result<()> {
    let sc = parse_scenario(SCENARIO, Path::new("."))?;
    for report in run_scenario(&sc, true) {
        println!("{}", report.to_json_line());
    }
    Ok(())
}
