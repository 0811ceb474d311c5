use memsplace::{cmu_defaults, rs_params, DeviceConfig};

fn main() -> memsplace::Result<()> {
    let p = cmu_defaults();
    let d = p.derive()?;
    let rs = rs_params(&p);
    print!("{}", DeviceConfig::from_params(&p).to_toml());
    println!("capacity: {} MB", p.capacity_bits() / 8 / 1_000_000);
    println!("regions: {}, sectors per region: {}", p.n_r(), p.n_s());
    println!("region read time: {:.3} ms", d.region_read_time_s * 1e3);
    println!("RS transfer rate: {:.4} Mbit/s", rs.transfer_rate_rs / 1e6);
    println!("RS seek time: {:.3} ms", rs.seek_time_rs * 1e3);
    Ok(())
}
