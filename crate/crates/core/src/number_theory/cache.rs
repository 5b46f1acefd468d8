//! On-disk prime cache: `SCLTPRIM`, the limit as u64 LE, then every prime as
//! u64 LE.

use super::PrimeTable;
use crate::error::{Error, Result};
use std::io::{Read, Write};

pub const PRIME_CACHE_MAGIC: &[u8; 8] = b"SCLTPRIM";

pub fn write_prime_cache<W: Write>(table: &PrimeTable, mut out: W) -> Result<()> {
    out.write_all(PRIME_CACHE_MAGIC)?;
    out.write_all(&table.limit().to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * 4096);
    for chunk in table.primes().chunks(4096) {
        buf.clear();
        for &p in chunk {
            buf.extend_from_slice(&(p as u64).to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_prime_cache<R: Read>(mut input: R) -> Result<PrimeTable> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[..8] != PRIME_CACHE_MAGIC {
        return Err(Error::Parse("prime cache: bad magic".into()));
    }
    let limit = u64::from_le_bytes(header[8..].try_into().unwrap());
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() % 8 != 0 {
        return Err(Error::Parse("prime cache: truncated entry".into()));
    }
    let mut primes = Vec::with_capacity(body.len() / 8);
    let mut prev = 0u64;
    for word in body.chunks_exact(8) {
        let p = u64::from_le_bytes(word.try_into().unwrap());
        if p <= prev || p > limit || p > u32::MAX as u64 {
            return Err(Error::Parse(format!(
                "prime cache: entry {p} out of order or above limit {limit}"
            )));
        }
        primes.push(p as u32);
        prev = p;
    }
    Ok(PrimeTable::from_parts(limit, primes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::sieve_primes;

    #[test]
    fn round_trip_and_layout() {
        let t = sieve_primes(30).unwrap();
        let mut bytes = Vec::new();
        write_prime_cache(&t, &mut bytes).unwrap();
        assert_eq!(&bytes[..8], b"SCLTPRIM");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 30);
        assert_eq!(bytes.len(), 16 + 8 * t.len());
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2);
        assert_eq!(read_prime_cache(bytes.as_slice()).unwrap(), t);
    }

    #[test]
    fn rejects_corruption() {
        let t = sieve_primes(30).unwrap();
        let mut bytes = Vec::new();
        write_prime_cache(&t, &mut bytes).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_prime_cache(bad.as_slice()).is_err());
        let truncated = &bytes[..bytes.len() - 3];
        assert!(read_prime_cache(truncated).is_err());
        let mut unordered = bytes.clone();
        unordered[16..24].copy_from_slice(&7u64.to_le_bytes());
        assert!(read_prime_cache(unordered.as_slice()).is_err());
    }
}
