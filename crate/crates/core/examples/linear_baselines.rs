use memsplace::linear::{DsmLayout, LinearMap, NsmLayout};
use memsplace::relational::RangeQuery;
use memsplace::workload::{gen_relation, tuples_for_mb, Distribution};
use memsplace::{cmu_defaults, Emulator};

fn main() -> memsplace::Result<()> {
    let p = cmu_defaults();
    let lin = LinearMap::new(&p)?;
    println!(
        "{} blocks of {} sectors, {} tip groups",
        lin.lba_count(),
        lin.block_sectors(),
        lin.groups()
    );
    for lba in [1, 2, 28, 136] {
        println!("LBA {lba}: {:?}", lin.locate(lba)?);
    }

    let n = tuples_for_mb(40.0, 16, 8)?;
    let rel = gen_relation(n, 16, 8, 0.1, Distribution::Uniform, 5, &p)?;
    let nsm = NsmLayout::new(rel.schema, &p)?;
    let dsm = DsmLayout::new(rel.schema, &p)?;
    for np in [1, 8, 16] {
        let q = RangeQuery::leading(np, 0.1);
        let a = Emulator::new(p).execute(&nsm.compile(&q)?)?;
        let b = Emulator::new(p).execute(&dsm.compile(&q)?)?;
        println!(
            "N_projection {np:2}: NSM {:.3} s, DSM {:.3} s",
            a.total_s, b.total_s
        );
    }
    Ok(())
}
