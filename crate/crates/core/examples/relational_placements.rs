use memsplace::relational::{RangeQuery, RpLayout, RsyLayout};
use memsplace::workload::{gen_relation, tuples_for_mb, Distribution};
use memsplace::{cmu_defaults, Emulator};

fn main() -> memsplace::Result<()> {
    let p = cmu_defaults();
    let n = tuples_for_mb(20.0, 16, 8)?;
    let rel = gen_relation(n, 16, 8, 0.1, Distribution::Uniform, 42, &p)?;
    let q = RangeQuery::new(vec![1, 4, 9], 1, 0.1);
    println!("{n} tuples, {} qualify", rel.qualifying.len());

    let rsy = RsyLayout::new(rel.schema, &p)?;
    println!("RSY: tuple 7 attr 4 at {}", rsy.map(7, 4)?);
    let t = Emulator::new(p).execute(&rsy.compile(&q)?)?;
    println!("RSY: {:.4} s, {} seeks", t.total_s, t.n_seeks);

    let rp = RpLayout::new(rel.schema, &p)?;
    println!("RP: tuple 7 attr 4 at {}", rp.map(7, 4)?);
    let t = Emulator::new(p).execute(&rp.compile(&q, &rel.qualifying)?)?;
    println!("RP: {:.4} s, {} seeks", t.total_s, t.n_seeks);
    Ok(())
}
