//! Device geometry and timing constants.
//!
//! All sizes are kept in bits and all times in seconds. The config file
//! format uses the conventional symbols (`R_x`, `S_y`, `N_APT`, `T_X`, ...)
//! with transfer rate in Mbit/s and times in milliseconds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emulator::SeekModel;
use crate::error::{Error, Result};

/// Geometry and timing of a probe-based MEMS storage device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Regions along X.
    pub r_x: u32,
    /// Regions along Y.
    pub r_y: u32,
    /// Tip sectors per region along X (columns per region).
    pub s_x: u32,
    /// Tip sectors per region along Y (sectors per column).
    pub s_y: u32,
    /// Maximum number of simultaneously active probe tips.
    pub n_apt: u32,
    pub sector_size_bits: u32,
    /// Per-tip media transfer rate.
    pub transfer_rate_bits_per_s: f64,
    /// Average X move time.
    pub t_x: f64,
    /// Average Y move time.
    pub t_y: f64,
    /// Settle time after any X movement.
    pub t_s: f64,
    /// Turnaround time when the Y direction reverses.
    pub t_t: f64,
}

/// Quantities derived from [`DeviceParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub region_size_bits: u64,
    /// Time for one tip to transfer one tip sector.
    pub sector_time_s: f64,
    /// Time for one tip to read a whole region in column-prime order,
    /// counting one settle per column.
    pub region_read_time_s: f64,
}

/// The CMU device used throughout the literature.
pub fn cmu_defaults() -> DeviceParams {
    DeviceParams {
        r_x: 80,
        r_y: 80,
        s_x: 2500,
        s_y: 27,
        n_apt: 1280,
        sector_size_bits: 64,
        transfer_rate_bits_per_s: 0.7e6,
        t_x: 0.52e-3,
        t_y: 0.35e-3,
        t_s: 0.215e-3,
        t_t: 0.06e-3,
    }
}

impl Default for DeviceParams {
    fn default() -> Self {
        cmu_defaults()
    }
}

impl DeviceParams {
    /// Number of regions, `R_x * R_y`.
    pub fn n_r(&self) -> u32 {
        self.r_x * self.r_y
    }

    /// Tip sectors per region, `S_x * S_y`.
    pub fn n_s(&self) -> u32 {
        self.s_x * self.s_y
    }

    /// One probe tip per region.
    pub fn n_pt(&self) -> u32 {
        self.n_r()
    }

    pub fn sector_bytes(&self) -> usize {
        (self.sector_size_bits as usize).div_ceil(8)
    }

    pub fn capacity_sectors(&self) -> u64 {
        self.n_r() as u64 * self.n_s() as u64
    }

    pub fn capacity_bits(&self) -> u64 {
        self.capacity_sectors() * self.sector_size_bits as u64
    }

    /// Average seek between two random positions: the larger of the X
    /// branch (move + settle) and the Y branch (move + turnaround).
    pub fn average_seek_s(&self) -> f64 {
        (self.t_x + self.t_s).max(self.t_y + self.t_t)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("R_x", self.r_x),
            ("R_y", self.r_y),
            ("S_x", self.s_x),
            ("S_y", self.s_y),
            ("N_APT", self.n_apt),
            ("SectorSize", self.sector_size_bits),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidParams {
                    name,
                    reason: "must be positive".into(),
                });
            }
        }
        if (self.r_x as u64 * self.r_y as u64) > u32::MAX as u64
            || (self.s_x as u64 * self.s_y as u64) > u32::MAX as u64
        {
            return Err(Error::InvalidParams {
                name: "geometry",
                reason: "region or sector count overflows u32".into(),
            });
        }
        if self.n_apt > self.n_pt() {
            return Err(Error::InvalidParams {
                name: "N_APT",
                reason: format!("{} exceeds N_PT = {}", self.n_apt, self.n_pt()),
            });
        }
        if !(self.transfer_rate_bits_per_s > 0.0) || !self.transfer_rate_bits_per_s.is_finite() {
            return Err(Error::InvalidParams {
                name: "TransferRate",
                reason: "must be a positive finite rate".into(),
            });
        }
        let times = [
            ("T_X", self.t_x),
            ("T_Y", self.t_y),
            ("T_S", self.t_s),
            ("T_T", self.t_t),
        ];
        for (name, t) in times {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidParams {
                    name,
                    reason: format!("must be a positive finite time, got {t}"),
                });
            }
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive(self)
    }
}

pub fn derive(params: &DeviceParams) -> Result<DerivedParams> {
    params.validate()?;
    let region_size_bits = params.s_x as u64 * params.s_y as u64 * params.sector_size_bits as u64;
    let sector_time_s = params.sector_size_bits as f64 / params.transfer_rate_bits_per_s;
    let region_read_time_s =
        region_size_bits as f64 / params.transfer_rate_bits_per_s + params.s_x as f64 * params.t_s;
    Ok(DerivedParams {
        region_size_bits,
        sector_time_s,
        region_read_time_s,
    })
}

/// On-disk device description. Every key is optional; missing keys fall
/// back to the base parameters handed to [`DeviceConfig::apply`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    #[serde(rename = "R_x")]
    pub r_x: Option<u32>,
    #[serde(rename = "R_y")]
    pub r_y: Option<u32>,
    #[serde(rename = "N_R")]
    pub n_r: Option<u32>,
    #[serde(rename = "S_x")]
    pub s_x: Option<u32>,
    #[serde(rename = "S_y")]
    pub s_y: Option<u32>,
    #[serde(rename = "N_S")]
    pub n_s: Option<u32>,
    #[serde(rename = "N_PT")]
    pub n_pt: Option<u32>,
    #[serde(rename = "N_APT")]
    pub n_apt: Option<u32>,
    /// Bits.
    #[serde(rename = "SectorSize")]
    pub sector_size: Option<u32>,
    /// Mbit/s.
    #[serde(rename = "TransferRate")]
    pub transfer_rate: Option<f64>,
    /// Milliseconds.
    #[serde(rename = "T_X")]
    pub t_x: Option<f64>,
    #[serde(rename = "T_Y")]
    pub t_y: Option<f64>,
    #[serde(rename = "T_S")]
    pub t_s: Option<f64>,
    #[serde(rename = "T_T")]
    pub t_t: Option<f64>,
    pub seek_model: Option<SeekModel>,
}

/// Drops binary rounding noise from a unit conversion.
fn tidy(x: f64) -> f64 {
    let scale = 1e12;
    (x * scale).round() / scale
}

impl DeviceConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Describes `params` in config-file units.
    pub fn from_params(params: &DeviceParams) -> Self {
        DeviceConfig {
            r_x: Some(params.r_x),
            r_y: Some(params.r_y),
            n_r: Some(params.n_r()),
            s_x: Some(params.s_x),
            s_y: Some(params.s_y),
            n_s: Some(params.n_s()),
            n_pt: Some(params.n_pt()),
            n_apt: Some(params.n_apt),
            sector_size: Some(params.sector_size_bits),
            transfer_rate: Some(tidy(params.transfer_rate_bits_per_s / 1e6)),
            t_x: Some(tidy(params.t_x * 1e3)),
            t_y: Some(tidy(params.t_y * 1e3)),
            t_s: Some(tidy(params.t_s * 1e3)),
            t_t: Some(tidy(params.t_t * 1e3)),
            seek_model: None,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("device config is always representable as TOML")
    }

    /// Overlays the keys present in this config onto `base` and validates
    /// the result, including any derived counts the file states.
    pub fn apply(&self, base: DeviceParams) -> Result<DeviceParams> {
        let mut p = base;
        if let Some(v) = self.r_x {
            p.r_x = v;
        }
        if let Some(v) = self.r_y {
            p.r_y = v;
        }
        if let Some(v) = self.s_x {
            p.s_x = v;
        }
        if let Some(v) = self.s_y {
            p.s_y = v;
        }
        if let Some(v) = self.n_apt {
            p.n_apt = v;
        }
        if let Some(v) = self.sector_size {
            p.sector_size_bits = v;
        }
        if let Some(v) = self.transfer_rate {
            p.transfer_rate_bits_per_s = v * 1e6;
        }
        if let Some(v) = self.t_x {
            p.t_x = v * 1e-3;
        }
        if let Some(v) = self.t_y {
            p.t_y = v * 1e-3;
        }
        if let Some(v) = self.t_s {
            p.t_s = v * 1e-3;
        }
        if let Some(v) = self.t_t {
            p.t_t = v * 1e-3;
        }
        p.validate()?;
        let checks = [
            ("N_R", self.n_r, p.n_r()),
            ("N_S", self.n_s, p.n_s()),
            ("N_PT", self.n_pt, p.n_pt()),
        ];
        for (name, stated, actual) in checks {
            if let Some(stated) = stated {
                if stated != actual {
                    return Err(Error::InvalidParams {
                        name,
                        reason: format!("config states {stated} but geometry gives {actual}"),
                    });
                }
            }
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cmu_table_values() {
        let p = cmu_defaults();
        assert_eq!(p.n_apt, 1280);
        assert_eq!(p.n_pt(), 6400);
        assert_eq!(p.n_s(), 67_500);
        assert_eq!((p.s_x, p.s_y, p.sector_size_bits), (2500, 27, 64));
        assert_eq!(p.t_x, 0.52e-3);
        assert_eq!(p.t_s, 0.215e-3);
        assert_eq!(p.t_y, 0.35e-3);
        assert_eq!(p.t_t, 0.06e-3);
    }

    #[test]
    fn derived_cmu() {
        let d = derive(&cmu_defaults()).unwrap();
        assert_eq!(d.region_size_bits, 4_320_000);
        assert!((d.sector_time_s - 91.428_571e-6).abs() < 1e-11);
        // 4.32e6 / 0.7e6 + 2500 * 0.215 ms
        assert!((d.region_read_time_s - (6.171_428_571 + 0.5375)).abs() < 1e-8);
    }

    #[test]
    fn unit_sector_time() {
        let mut p = cmu_defaults();
        p.transfer_rate_bits_per_s = p.sector_size_bits as f64;
        assert_eq!(derive(&p).unwrap().sector_time_s, 1.0);
    }

    #[test]
    fn rejects_bad_fields() {
        let mut p = cmu_defaults();
        p.s_y = 0;
        assert!(matches!(
            derive(&p),
            Err(Error::InvalidParams { name: "S_y", .. })
        ));

        let mut p = cmu_defaults();
        p.t_s = -1.0;
        assert!(matches!(
            derive(&p),
            Err(Error::InvalidParams { name: "T_S", .. })
        ));

        let mut p = cmu_defaults();
        p.n_apt = 6401;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParams { name: "N_APT", .. })
        ));

        let mut p = cmu_defaults();
        p.transfer_rate_bits_per_s = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn config_uses_table_symbols_and_units() {
        let cfg = DeviceConfig::parse(
            "R_x = 8\nR_y = 8\nS_x = 20\nS_y = 5\nN_APT = 16\nTransferRate = 0.7\nT_X = 0.52\n",
        )
        .unwrap();
        let p = cfg.apply(cmu_defaults()).unwrap();
        assert_eq!(p.n_r(), 64);
        assert_eq!(p.n_s(), 100);
        assert_eq!(p.n_apt, 16);
        assert!((p.t_x - 0.52e-3).abs() < 1e-15);
        assert_eq!(p.t_s, cmu_defaults().t_s);
    }

    #[test]
    fn config_checks_stated_products() {
        let cfg = DeviceConfig::parse("R_x = 8\nR_y = 8\nN_APT = 16\nN_R = 65\n").unwrap();
        assert!(matches!(
            cfg.apply(cmu_defaults()),
            Err(Error::InvalidParams { name: "N_R", .. })
        ));
        assert!(DeviceConfig::parse("Bogus = 1").is_err());
    }

    #[test]
    fn config_round_trip_reproduces_cmu() {
        let text = DeviceConfig::from_params(&cmu_defaults()).to_toml();
        let back = DeviceConfig::parse(&text)
            .unwrap()
            .apply(cmu_defaults())
            .unwrap();
        let p = cmu_defaults();
        assert_eq!(back.n_r(), p.n_r());
        assert!((back.t_x - p.t_x).abs() < 1e-15);
        assert!((back.transfer_rate_bits_per_s - p.transfer_rate_bits_per_s).abs() < 1e-6);
    }
}
