fn main() {
    let pal = pfspec_core::graph::Palette::empty();
    let ctx = pfspec_core::theory::TheoryCtx::new(pal);
    let opts = pfspec_core::algebra::closure::ClosureOptions::for_depth(0);
    eprintln!("building closure d=0...");
    let table = pfspec_core::algebra::closure::closure(&ctx, 0, opts).unwrap();
    eprintln!("entries: {}", table.entries.len());
    for (t, e) in &table.entries {
        eprintln!("{:?} class={:?} size={}", t, e.class, e.size);
    }
}
