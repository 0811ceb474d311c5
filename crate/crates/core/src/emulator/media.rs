use super::PhysAddr;
use crate::error::{Error, Result};
use crate::params::DeviceParams;
use crate::rs::{rs_to_mems, RsAddr};

/// Byte contents of every tip sector, addressed physically.
/// Sectors never written read back as zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaImage {
    r_x: u32,
    r_y: u32,
    s_x: u32,
    s_y: u32,
    sector_bytes: usize,
    data: Vec<u8>,
}

impl MediaImage {
    pub fn new(p: &DeviceParams) -> Self {
        let sector_bytes = p.sector_bytes();
        let len = p.capacity_sectors() as usize * sector_bytes;
        MediaImage {
            r_x: p.r_x,
            r_y: p.r_y,
            s_x: p.s_x,
            s_y: p.s_y,
            sector_bytes,
            data: vec![0; len],
        }
    }

    pub fn sector_bytes(&self) -> usize {
        self.sector_bytes
    }

    pub fn matches(&self, p: &DeviceParams) -> bool {
        (self.r_x, self.r_y, self.s_x, self.s_y, self.sector_bytes)
            == (p.r_x, p.r_y, p.s_x, p.s_y, p.sector_bytes())
    }

    fn offset(&self, a: PhysAddr) -> Result<usize> {
        let ok = (1..=self.r_x).contains(&a.r_x)
            && (1..=self.r_y).contains(&a.r_y)
            && (1..=self.s_x).contains(&a.s_x)
            && (1..=self.s_y).contains(&a.s_y);
        if !ok {
            return Err(Error::OutOfBounds(format!("{a:?} outside media")));
        }
        let region = (a.r_y - 1) as usize * self.r_x as usize + (a.r_x - 1) as usize;
        let sector = (a.s_x - 1) as usize * self.s_y as usize + (a.s_y - 1) as usize;
        let per_region = self.s_x as usize * self.s_y as usize;
        Ok((region * per_region + sector) * self.sector_bytes)
    }

    pub fn sector(&self, a: PhysAddr) -> Result<&[u8]> {
        let o = self.offset(a)?;
        Ok(&self.data[o..o + self.sector_bytes])
    }

    /// Writes one sector; shorter input is zero-padded.
    pub fn write(&mut self, a: PhysAddr, bytes: &[u8]) -> Result<()> {
        if bytes.len() > self.sector_bytes {
            return Err(Error::InvalidQuery(format!(
                "{} bytes do not fit a {}-byte sector",
                bytes.len(),
                self.sector_bytes
            )));
        }
        let o = self.offset(a)?;
        let dst = &mut self.data[o..o + self.sector_bytes];
        dst.fill(0);
        dst[..bytes.len()].copy_from_slice(bytes);
        Ok(())
    }

    /// Writes `bytes` starting at `a`, spilling into the following RS rows of
    /// the same region, one sector per row.
    pub fn write_rs(&mut self, a: RsAddr, bytes: &[u8], p: &DeviceParams) -> Result<()> {
        for (i, chunk) in bytes.chunks(self.sector_bytes).enumerate() {
            let at = rs_to_mems(RsAddr::new(a.r, a.s + i as u32), p)?;
            self.write(at, chunk)?;
        }
        Ok(())
    }
}
