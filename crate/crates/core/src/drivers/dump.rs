//! Binary dump of step samples.
//!
//! Layout (all little endian): magic `ASRIDRV1`, then a `u32` header length
//! and a UTF-8 header line `model=<descriptor>;hash=<hex>`, then a `u64`
//! sample count. Each sample stores as 64-bit floats `t0`, `h`, the Wiener
//! increments, the `L` level-one and `L*L` level-two values, and per jump
//! process an event count followed by `(offset, size)` pairs.

use std::io::{Read, Write};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::model::DriverModel;
use super::sample::StepSample;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"ASRIDRV1";

/// Hex SHA-256 of a configuration description.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn put(out: &mut impl Write, x: f64) -> Result<()> {
    out.write_all(&x.to_le_bytes())?;
    Ok(())
}

fn get(inp: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    inp.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_dump(out: &mut impl Write, model: &DriverModel, config: &str, samples: &[StepSample]) -> Result<()> {
    out.write_all(MAGIC)?;
    let header = format!("model={};hash={}", model.descriptor(), config_hash(config));
    out.write_all(&(header.len() as u32).to_le_bytes())?;
    out.write_all(header.as_bytes())?;
    out.write_all(&(samples.len() as u64).to_le_bytes())?;
    for s in samples {
        put(out, s.t0)?;
        put(out, s.h)?;
        for &x in s.wiener.iter().chain(s.level1_all()).chain(s.level2_all()) {
            put(out, x)?;
        }
        for ev in &s.events {
            out.write_all(&(ev.len() as u64).to_le_bytes())?;
            for &(t, v) in ev {
                put(out, t)?;
                put(out, v)?;
            }
        }
    }
    Ok(())
}

/// Reads a dump written for `model`; returns the header hash and samples.
pub fn read_dump(inp: &mut impl Read, model: &Arc<DriverModel>) -> Result<(String, Vec<StepSample>)> {
    let mut magic = [0u8; 8];
    inp.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not a driver dump".into()));
    }
    let mut len = [0u8; 4];
    inp.read_exact(&mut len)?;
    let mut header = vec![0u8; u32::from_le_bytes(len) as usize];
    inp.read_exact(&mut header)?;
    let header = String::from_utf8(header).map_err(|_| Error::Parse("bad dump header".into()))?;
    let (m, hash) = header
        .strip_prefix("model=")
        .and_then(|r| r.split_once(";hash="))
        .ok_or_else(|| Error::Parse("bad dump header".into()))?;
    if m != model.descriptor() {
        return Err(Error::Parse("dump was written for another model".into()));
    }
    let mut cnt = [0u8; 8];
    inp.read_exact(&mut cnt)?;
    let l = model.letter_count();
    let mut samples = Vec::new();
    for _ in 0..u64::from_le_bytes(cnt) {
        let t0 = get(inp)?;
        let h = get(inp)?;
        let wiener = (0..model.wiener_count()).map(|_| get(inp)).collect::<Result<Vec<_>>>()?;
        let level1 = (0..l).map(|_| get(inp)).collect::<Result<Vec<_>>>()?;
        let level2 = (0..l * l).map(|_| get(inp)).collect::<Result<Vec<_>>>()?;
        let mut events = Vec::new();
        for _ in model.jumps() {
            inp.read_exact(&mut cnt)?;
            let n = u64::from_le_bytes(cnt);
            events.push((0..n).map(|_| Ok((get(inp)?, get(inp)?))).collect::<Result<Vec<_>>>()?);
        }
        samples.push(StepSample::from_parts(model.clone(), t0, h, wiener, events, level1, level2));
    }
    Ok((hash.to_string(), samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::{sample_step, DriverConfig};
    use crate::word::Alphabet;
    use crate::q;

    #[test]
    fn dump_round_trip() {
        let a = Alphabet::standard(2, &[q(3)], 3).unwrap();
        let m = Arc::new(DriverModel::new(&a));
        let cfg = DriverConfig::new(m.clone(), 0.5, 4, 9).unwrap();
        let samples: Vec<_> = (0..20).map(|k| sample_step(&cfg, 0, k)).collect();
        let mut buf = Vec::new();
        write_dump(&mut buf, &m, "cfg", &samples).unwrap();
        let (hash, back) = read_dump(&mut buf.as_slice(), &m).unwrap();
        assert_eq!(hash, config_hash("cfg"));
        assert_eq!(back, samples);
        let other = Arc::new(DriverModel::new(&Alphabet::standard(1, &[], 3).unwrap()));
        assert!(read_dump(&mut buf.as_slice(), &other).is_err());
    }
}
