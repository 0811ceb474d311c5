use std::io;

use memsplace::bench::{run_spatial, write_csv, BenchConfig, Placement, SpatialSweep};
use memsplace::spatial::Curve;

fn main() -> memsplace::Result<()> {
    let cfg = BenchConfig {
        repeats: 5,
        curve: Curve::ZOrder,
        ..BenchConfig::default()
    };
    let sweep = SpatialSweep {
        query_sizes: vec![0.0001, 0.001, 0.01],
        aspects: vec![4.0, 1.0, 0.25],
        ..SpatialSweep::default()
    };
    let rows = run_spatial(&Placement::SPATIAL, &sweep, &cfg)?;
    write_csv(&rows, io::stdout().lock())
}
