use std::io::Write;

use crate::error::{Error, Result};

/// A lossless compressor reduced to what NCD needs: the size of its output.
///
/// `name` identifies the algorithm *and* every setting that can change output
/// size; the size cache keys on it.
pub trait Compressor: Send + Sync {
    fn name(&self) -> String;

    fn compress(&self, input: &[u8]) -> Result<Vec<u8>>;

    fn compressed_size(&self, input: &[u8]) -> Result<u64> {
        Ok(self.compress(input)?.len() as u64)
    }

    /// Longest distance back the compressor can reference, if bounded. NCD
    /// degrades once a concatenated pair no longer fits.
    fn window(&self) -> Option<usize> {
        None
    }
}

fn failure(name: String, len: usize, err: impl std::fmt::Display) -> Error {
    Error::Compression {
        compressor: name,
        subject: format!("{len}-byte input"),
        message: err.to_string(),
    }
}

/// LZMA in the `.lzma` (LZMA-alone) container. The dictionary grows with the
/// input so the whole input is always inside the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lzma {
    pub preset: u32,
    pub extreme: bool,
}

impl Default for Lzma {
    fn default() -> Self {
        Lzma {
            preset: 9,
            extreme: false,
        }
    }
}

const LZMA_DICT_MIN: usize = 4096;
const LZMA_DICT_MAX: usize = 1536 << 20;

impl Lzma {
    fn dict_size(len: usize) -> u32 {
        len.max(LZMA_DICT_MIN)
            .checked_next_power_of_two()
            .unwrap_or(LZMA_DICT_MAX)
            .min(LZMA_DICT_MAX) as u32
    }
}

/// liblzma's `LZMA_PRESET_EXTREME` flag, not re-exported by `xz2`.
const LZMA_PRESET_EXTREME: u32 = 0x8000_0000;

impl Compressor for Lzma {
    fn name(&self) -> String {
        format!(
            "lzma:preset={}{}:dict=auto",
            self.preset,
            if self.extreme { "e" } else { "" }
        )
    }

    fn compress(&self, input: &[u8]) -> Result<Vec<u8>> {
        let fail = |e: &dyn std::fmt::Display| failure(self.name(), input.len(), e);
        let preset = self.preset | if self.extreme { LZMA_PRESET_EXTREME } else { 0 };
        let mut opts = xz2::stream::LzmaOptions::new_preset(preset).map_err(|e| fail(&e))?;
        opts.dict_size(Self::dict_size(input.len()));
        let stream = xz2::stream::Stream::new_lzma_encoder(&opts).map_err(|e| fail(&e))?;
        let mut enc = xz2::write::XzEncoder::new_stream(Vec::new(), stream);
        enc.write_all(input).map_err(|e| fail(&e))?;
        enc.finish().map_err(|e| fail(&e))
    }
}

/// DEFLATE in a gzip container with a zeroed header timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gzip {
    pub level: u32,
}

impl Compressor for Gzip {
    fn name(&self) -> String {
        format!("gzip:level={}", self.level)
    }

    fn compress(&self, input: &[u8]) -> Result<Vec<u8>> {
        let fail = |e: std::io::Error| failure(self.name(), input.len(), e);
        let mut enc = flate2::GzBuilder::new()
            .mtime(0)
            .write(Vec::new(), flate2::Compression::new(self.level));
        enc.write_all(input).map_err(fail)?;
        enc.finish().map_err(fail)
    }

    fn window(&self) -> Option<usize> {
        Some(32 * 1024)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bzip2 {
    pub level: u32,
}

impl Compressor for Bzip2 {
    fn name(&self) -> String {
        format!("bzip2:level={}", self.level)
    }

    fn compress(&self, input: &[u8]) -> Result<Vec<u8>> {
        let fail = |e: std::io::Error| failure(self.name(), input.len(), e);
        let mut enc = bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::new(self.level));
        enc.write_all(input).map_err(fail)?;
        enc.finish().map_err(fail)
    }

    fn window(&self) -> Option<usize> {
        Some(self.level as usize * 100_000)
    }
}

/// Parses `lzma`, `lzma:6`, `lzma:9e`, `gzip`, `gzip:6`, `bzip2`, `bzip2:9`.
pub fn compressor_from_name(spec: &str) -> Result<Box<dyn Compressor>> {
    let (algo, setting) = match spec.split_once(':') {
        Some((a, s)) => (a, Some(s)),
        None => (spec, None),
    };
    let bad = || Error::invalid(format!("unknown compressor `{spec}`"));
    let level = |default: u32, max: u32| -> Result<u32> {
        match setting {
            None => Ok(default),
            Some(s) => s
                .parse()
                .ok()
                .filter(|l| *l <= max && *l >= 1)
                .ok_or_else(bad),
        }
    };
    Ok(match algo {
        "lzma" => {
            let (digits, extreme) = match setting {
                Some(s) => match s.strip_suffix('e') {
                    Some(d) => (Some(d), true),
                    None => (Some(s), false),
                },
                None => (None, false),
            };
            let preset = match digits {
                None => 9,
                Some(d) => d.parse().ok().filter(|p| *p <= 9).ok_or_else(bad)?,
            };
            Box::new(Lzma { preset, extreme })
        }
        "gzip" => Box::new(Gzip {
            level: level(9, 9)?,
        }),
        "bzip2" => Box::new(Bzip2 {
            level: level(9, 9)?,
        }),
        _ => return Err(bad()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        assert_eq!(
            compressor_from_name("lzma").unwrap().name(),
            "lzma:preset=9:dict=auto"
        );
        assert_eq!(
            compressor_from_name("lzma:6e").unwrap().name(),
            "lzma:preset=6e:dict=auto"
        );
        assert_eq!(
            compressor_from_name("gzip:6").unwrap().name(),
            "gzip:level=6"
        );
        assert_eq!(
            compressor_from_name("bzip2").unwrap().name(),
            "bzip2:level=9"
        );
        for bad in ["zip", "lzma:10", "gzip:0", "gzip:x", "lzma:"] {
            assert!(compressor_from_name(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sizes_are_deterministic_and_finite_on_empty() {
        for name in ["lzma", "gzip", "bzip2"] {
            let c = compressor_from_name(name).unwrap();
            let empty = c.compressed_size(b"").unwrap();
            assert!(empty > 0 && empty < 64, "{name}: {empty}");
            let text = b"abracadabra ".repeat(200);
            assert_eq!(
                c.compressed_size(&text).unwrap(),
                c.compressed_size(&text).unwrap()
            );
            assert!(c.compressed_size(&text).unwrap() < text.len() as u64 / 4);
        }
    }

    #[test]
    fn lzma_round_trips() {
        use std::io::Read;
        let text = b"it was the best of times, it was the worst of times".repeat(50);
        let packed = Lzma::default().compress(&text).unwrap();
        let mut out = Vec::new();
        xz2::read::XzDecoder::new_stream(
            &packed[..],
            xz2::stream::Stream::new_lzma_decoder(u64::MAX).unwrap(),
        )
        .read_to_end(&mut out)
        .unwrap();
        assert_eq!(out, text);
    }

    #[test]
    fn dictionary_covers_input() {
        assert_eq!(Lzma::dict_size(0), 4096);
        assert_eq!(Lzma::dict_size(5000), 8192);
        assert_eq!(Lzma::dict_size(1 << 20), 1 << 20);
    }
}
