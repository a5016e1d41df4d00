//! Vertices of the regular tree relative to a fixed end: levels, parents, spine translation.

use scalelab::trees::{EdgeLabelling, UnrootedVertex, Window};

fn main() -> scalelab::Result<()> {
    let v = UnrootedVertex::parse(3, "2:102")?;
    println!("{v}: busemann {}, parent {}, children {:?}", v.busemann(), v.parent(), v.children());
    println!("translated along the spine: {}", v.x0_translate(1));
    let window = Window::new(3, 1, 2);
    println!("window {}..{} holds {} vertices", window.top, window.bottom, window.vertex_count());
    let labels = EdgeLabelling::standard(&window);
    let path = labels.check_conditions(&window)?;
    println!("0-labelled path: {}", path.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> "));
    Ok(())
}
