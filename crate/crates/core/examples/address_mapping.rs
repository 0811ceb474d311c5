use memsplace::{cmu_defaults, mems_to_rs, rs_to_mems, RsAddr};

fn main() -> memsplace::Result<()> {
    let p = cmu_defaults();
    for (r, s) in [(1, 1), (81, 28), (6400, 67_500)] {
        let phys = rs_to_mems(RsAddr::new(r, s), &p)?;
        let back = mems_to_rs(phys, &p)?;
        println!("({r}, {s}) -> {phys} -> {back}");
    }
    if let Err(e) = rs_to_mems(RsAddr::new(6401, 1), &p) {
        println!("rejected: {e}");
    }
    Ok(())
}
