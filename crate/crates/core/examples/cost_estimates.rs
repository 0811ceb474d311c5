use memsplace::bench::measure;
use memsplace::cost::{estimate, lower_bound, CostInput};
use memsplace::relational::{answer_bits, RangeQuery, RsyLayout};
use memsplace::workload::{gen_relation, Distribution};
use memsplace::{cmu_defaults, rs_params, SeekModel};

fn main() -> memsplace::Result<()> {
    let p = cmu_defaults();
    let rs = rs_params(&p);
    let rel = gen_relation(500_000, 16, 8, 0.1, Distribution::Uniform, 1, &p)?;
    let rsy = RsyLayout::new(rel.schema, &p)?;

    for np in [1, 4, 16] {
        let q = RangeQuery::leading(np, 0.1);
        let k = rsy.k_values(&q);
        let est = estimate(&k, &rs)?;
        let m = measure(&rsy.compile(&q)?, &p, SeekModel::Average)?;
        let lb = lower_bound(
            answer_bits(&rel.schema, &q, rel.qualifying.len() as u32),
            &rs,
            p.n_apt,
        );
        println!(
            "N_projection {np:2}: model {:.4} s, emulated {:.4} s, bound {:.4} s",
            est.total_s, m.timing.total_s, lb.total_s
        );
    }

    let one_seek = CostInput {
        retrieval_data_bits: 0.0,
        k_parallel: 1.0,
        k_random: 1.0,
    };
    println!(
        "one random seek: {:.3} ms",
        estimate(&one_seek, &rs)?.total_s * 1e3
    );
    Ok(())
}
