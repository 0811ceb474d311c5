use memsplace::{cmu_defaults, rs_read, Emulator, MediaImage, RsAddr, SeekModel};

fn main() -> memsplace::Result<()> {
    let p = cmu_defaults();
    let mut media = MediaImage::new(&p);
    for r in 1..=4 {
        media.write_rs(RsAddr::new(r, 10), &[r as u8; 8], &p)?;
    }

    let plan = rs_read(&[1, 2, 3, 4], 10, 1, &p)?;
    print!("{}", plan.to_text());
    let (t, bytes) = Emulator::new(p).read(&plan, &media)?;
    println!(
        "read {:?}",
        bytes.chunks(8).map(|c| c[0]).collect::<Vec<_>>()
    );
    println!("{:.4} ms in {} seek(s)", t.total_s * 1e3, t.n_seeks);

    let regions: Vec<u32> = (1..=6400).collect();
    let plan = rs_read(&regions, 1, 1000, &p)?;
    for model in [SeekModel::Average, SeekModel::Distance] {
        let t = Emulator::new(p).with_seek_model(model).execute(&plan)?;
        println!(
            "{model}: {:.3} s total, {:.3} s transfer, {} scans, k_parallel {}",
            t.total_s,
            t.transfer_s,
            plan.len(),
            t.k_parallel()
        );
    }
    Ok(())
}
