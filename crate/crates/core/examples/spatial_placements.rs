use memsplace::spatial::{
    build_block_grid, Curve, QueryRegion, SpLayout, SpatialSpace, SsyLayout, WorkloadProfile,
};
use memsplace::{cmu_defaults, Emulator};

fn main() -> memsplace::Result<()> {
    let p = cmu_defaults();
    let space = SpatialSpace::new(6400, 6400, 64)?;
    let q = QueryRegion {
        x0: 1001,
        y0: 2001,
        qx: 256,
        qy: 64,
    };

    let ssy = SsyLayout::new(space, &p)?;
    let t = Emulator::new(p).execute(&ssy.compile(&q))?;
    println!("SSY: {:.4} s, {} seeks", t.total_s, t.n_seeks);

    let profile = WorkloadProfile::single(q.qx, q.qy);
    for curve in [Curve::Hilbert, Curve::ZOrder] {
        let grid = build_block_grid(&space, &profile, curve, &p)?;
        let (bx, by) = (grid.b_x, grid.b_y);
        let sp = SpLayout::new(space, grid, &p)?;
        let t = Emulator::new(p).execute(&sp.compile(&q))?;
        println!(
            "SP {curve} ({bx} x {by} blocks): {:.4} s, {} seeks, {} blocks",
            t.total_s,
            t.n_seeks,
            sp.query_blocks(&q).len()
        );
    }
    Ok(())
}
