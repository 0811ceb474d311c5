use std::io;

use memsplace::bench::{run_relational, write_csv, BenchConfig, Placement, RelationalSweep};

fn main() -> memsplace::Result<()> {
    let cfg = BenchConfig {
        repeats: 3,
        ..BenchConfig::default()
    };
    let sweep = RelationalSweep {
        sizes_mb: vec![5.0, 10.0, 20.0],
        n_projections: vec![1, 4, 8, 16],
        projection_sweep_mb: 20.0,
        ..RelationalSweep::default()
    };
    let rows = run_relational(&Placement::RELATIONAL, &sweep, &cfg)?;
    write_csv(&rows, io::stdout().lock())
}
