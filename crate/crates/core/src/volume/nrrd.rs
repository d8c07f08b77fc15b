//! Reader and writer for a subset of the NRRD format: attached headers,
//! three spatial axes, raw or gzip encoding, axis-aligned geometry.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::{Geometry, MaskVolume, ScalarKind, Volume};
use crate::error::{Error, Result};
use crate::geom::Vec3;

const AXIS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Encoding {
    Raw,
    Gzip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Endian {
    Little,
    Big,
}

pub fn read_nrrd(path: impl AsRef<Path>) -> Result<Volume> {
    let bytes = fs::read(path)?;
    read_nrrd_bytes(&bytes)
}

/// Parses a complete NRRD file held in memory.
pub fn read_nrrd_bytes(bytes: &[u8]) -> Result<Volume> {
    let (header, payload) = split_header(bytes)?;
    let header = Header::parse(&header)?;
    let raw = match header.encoding {
        Encoding::Raw => payload.to_vec(),
        Encoding::Gzip => {
            let mut out = Vec::new();
            MultiGzDecoder::new(payload)
                .read_to_end(&mut out)
                .map_err(|e| Error::MalformedHeader(format!("gzip payload: {e}")))?;
            out
        }
    };
    let n = header.geometry.len();
    let expected = n * header.kind.byte_size();
    if raw.len() != expected {
        return Err(Error::SizeMismatch { expected, actual: raw.len() });
    }
    let data = decode(&raw, header.kind, header.endian);
    Volume::new(header.geometry, data, header.kind)
}

/// Writes a volume using its own scalar kind, gzip encoded.
pub fn write_nrrd(vol: &Volume, path: impl AsRef<Path>) -> Result<()> {
    let payload = encode(vol.data(), vol.scalar_kind());
    let bytes = encode_file(vol.geometry(), vol.scalar_kind(), &payload, Encoding::Gzip)?;
    fs::write(path, bytes)?;
    Ok(())
}

/// Writes a mask as `type: uchar`, `encoding: gzip`.
pub fn write_nrrd_mask(mask: &MaskVolume, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_file(mask.geometry(), ScalarKind::Uint8, mask.data(), Encoding::Gzip)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub(crate) fn encode_file(
    geometry: &Geometry,
    kind: ScalarKind,
    payload: &[u8],
    encoding: Encoding,
) -> Result<Vec<u8>> {
    let [nx, ny, nz] = geometry.dims;
    let [sx, sy, sz] = geometry.spacing;
    let [ox, oy, oz] = geometry.origin;
    let mut out = String::from("NRRD0004\n");
    out.push_str(&format!("type: {}\n", kind.nrrd_name()));
    out.push_str("dimension: 3\n");
    out.push_str("space dimension: 3\n");
    out.push_str(&format!("sizes: {nx} {ny} {nz}\n"));
    out.push_str(&format!("space directions: ({sx},0,0) (0,{sy},0) (0,0,{sz})\n"));
    out.push_str("kinds: domain domain domain\n");
    if kind.byte_size() > 1 {
        out.push_str("endian: little\n");
    }
    out.push_str(match encoding {
        Encoding::Raw => "encoding: raw\n",
        Encoding::Gzip => "encoding: gzip\n",
    });
    out.push_str(&format!("space origin: ({ox},{oy},{oz})\n\n"));

    let mut bytes = out.into_bytes();
    match encoding {
        Encoding::Raw => bytes.extend_from_slice(payload),
        Encoding::Gzip => {
            let mut enc = GzEncoder::new(bytes, Compression::default());
            enc.write_all(payload)?;
            bytes = enc.finish()?;
        }
    }
    Ok(bytes)
}

fn split_header(bytes: &[u8]) -> Result<(String, &[u8])> {
    let mut pos = 0;
    let mut lines = Vec::new();
    loop {
        let Some(rel) = bytes[pos..].iter().position(|&b| b == b'\n') else {
            return Err(Error::MalformedHeader(
                "header is not terminated by a blank line".into(),
            ));
        };
        let line = &bytes[pos..pos + rel];
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        pos += rel + 1;
        if line.is_empty() {
            break;
        }
        let line = std::str::from_utf8(line)
            .map_err(|_| Error::MalformedHeader("header is not valid UTF-8".into()))?;
        lines.push(line.to_string());
    }
    Ok((lines.join("\n"), &bytes[pos..]))
}

struct Header {
    geometry: Geometry,
    kind: ScalarKind,
    encoding: Encoding,
    endian: Endian,
}

impl Header {
    fn parse(text: &str) -> Result<Header> {
        let mut lines = text.lines();
        let magic = lines.next().unwrap_or_default();
        let version_ok = magic
            .strip_prefix("NRRD000")
            .is_some_and(|v| matches!(v, "1" | "2" | "3" | "4" | "5"));
        if !version_ok {
            return Err(Error::MalformedHeader(format!("bad magic `{magic}`")));
        }

        let mut dimension = None;
        let mut kind = None;
        let mut encoding = None;
        let mut endian = Endian::Little;
        let mut sizes = None;
        let mut spacings = None;
        let mut directions = None;
        let mut origin = None;

        for line in lines {
            if line.starts_with('#') {
                continue;
            }
            // key:=value pairs carry no structural information
            if line.contains(":=") {
                continue;
            }
            let Some((field, value)) = line.split_once(": ") else {
                return Err(Error::MalformedHeader(format!("unparseable line `{line}`")));
            };
            let value = value.trim();
            match field.trim().to_ascii_lowercase().as_str() {
                "dimension" => {
                    let d: usize = value
                        .parse()
                        .map_err(|_| Error::MalformedHeader(format!("dimension `{value}`")))?;
                    if d != 3 {
                        return Err(Error::UnsupportedDimension(d));
                    }
                    dimension = Some(d);
                }
                "type" => kind = Some(parse_type(value)?),
                "encoding" => {
                    encoding = Some(match value.to_ascii_lowercase().as_str() {
                        "raw" => Encoding::Raw,
                        "gzip" | "gz" => Encoding::Gzip,
                        other => return Err(Error::UnsupportedEncoding(other.to_string())),
                    })
                }
                "endian" => {
                    endian = match value.to_ascii_lowercase().as_str() {
                        "little" => Endian::Little,
                        "big" => Endian::Big,
                        other => {
                            return Err(Error::MalformedHeader(format!("endian `{other}`")))
                        }
                    }
                }
                "sizes" => sizes = Some(parse_list::<usize>(value, "sizes")?),
                "spacings" => spacings = Some(parse_list::<f64>(value, "spacings")?),
                "space directions" => directions = Some(parse_vectors(value)?),
                "space origin" => {
                    let v = parse_vectors(value)?;
                    if v.len() != 1 {
                        return Err(Error::MalformedHeader("space origin".into()));
                    }
                    origin = Some(v[0].clone());
                }
                "data file" | "datafile" => {
                    return Err(Error::MalformedHeader(
                        "detached data files are not supported".into(),
                    ))
                }
                "line skip" | "lineskip" | "byte skip" | "byteskip" if value != "0" => {
                    return Err(Error::MalformedHeader(format!("{field} is not supported")));
                }
                _ => {}
            }
        }

        if dimension.is_none() {
            return Err(Error::MalformedHeader("missing dimension".into()));
        }
        let kind = kind.ok_or_else(|| Error::MalformedHeader("missing type".into()))?;
        let encoding = encoding.ok_or_else(|| Error::MalformedHeader("missing encoding".into()))?;
        let sizes = sizes.ok_or_else(|| Error::MalformedHeader("missing sizes".into()))?;
        if sizes.len() != 3 {
            return Err(Error::MalformedHeader(format!("expected 3 sizes, got {}", sizes.len())));
        }

        let spacing = match (directions, spacings) {
            (Some(dirs), _) => spacing_from_directions(&dirs)?,
            (None, Some(sp)) => {
                if sp.len() != 3 {
                    return Err(Error::MalformedHeader("expected 3 spacings".into()));
                }
                [sp[0], sp[1], sp[2]]
            }
            (None, None) => {
                return Err(Error::MalformedHeader(
                    "neither spacings nor space directions given".into(),
                ))
            }
        };
        let origin = match origin {
            Some(o) if o.len() == 3 => [o[0], o[1], o[2]],
            Some(_) => return Err(Error::MalformedHeader("space origin must have 3 components".into())),
            None => [0.0; 3],
        };
        let geometry = Geometry::new([sizes[0], sizes[1], sizes[2]], spacing, origin)
            .map_err(|e| Error::MalformedHeader(e.to_string()))?;
        Ok(Header { geometry, kind, encoding, endian })
    }
}

fn parse_type(value: &str) -> Result<ScalarKind> {
    let kind = match value {
        "uchar" | "unsigned char" | "uint8" | "uint8_t" => ScalarKind::Uint8,
        "short" | "short int" | "signed short" | "signed short int" | "int16" | "int16_t" => {
            ScalarKind::Int16
        }
        "ushort" | "unsigned short" | "unsigned short int" | "uint16" | "uint16_t" => {
            ScalarKind::Uint16
        }
        "int" | "signed int" | "int32" | "int32_t" => ScalarKind::Int32,
        "float" => ScalarKind::Float32,
        "double" => ScalarKind::Float64,
        other => return Err(Error::UnsupportedType(other.to_string())),
    };
    Ok(kind)
}

fn parse_list<T: std::str::FromStr>(value: &str, what: &str) -> Result<Vec<T>> {
    value
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::MalformedHeader(format!("{what}: `{t}`"))))
        .collect()
}

/// Parses `(a,b,c) (d,e,f) ...`.
fn parse_vectors(value: &str) -> Result<Vec<Vec<f64>>> {
    value
        .split_whitespace()
        .map(|tok| {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::MalformedHeader(format!("vector `{tok}`")))?;
            inner
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::MalformedHeader(format!("vector component `{c}`")))
                })
                .collect()
        })
        .collect()
}

/// Axis `a` must point along world axis `a`; its length is the spacing.
/// Negative diagonal entries (flipped axes) keep their magnitude.
fn spacing_from_directions(dirs: &[Vec<f64>]) -> Result<Vec3> {
    if dirs.len() != 3 || dirs.iter().any(|d| d.len() != 3) {
        return Err(Error::MalformedHeader("space directions must be three 3-vectors".into()));
    }
    let mut spacing = [0.0; 3];
    for (a, d) in dirs.iter().enumerate() {
        let len = d.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len == 0.0 || !len.is_finite() {
            return Err(Error::MalformedHeader(format!("space direction {a} has zero length")));
        }
        let off = (0..3).filter(|&b| b != a).map(|b| d[b].abs()).fold(0.0, f64::max);
        if off > AXIS_TOLERANCE * len {
            return Err(Error::NonAxisAlignedDirections);
        }
        spacing[a] = d[a].abs();
    }
    Ok(spacing)
}

fn decode(raw: &[u8], kind: ScalarKind, endian: Endian) -> Vec<f64> {
    macro_rules! conv {
        ($t:ty) => {{
            const N: usize = std::mem::size_of::<$t>();
            raw.chunks_exact(N)
                .map(|c| {
                    let b: [u8; N] = c.try_into().unwrap();
                    (match endian {
                        Endian::Little => <$t>::from_le_bytes(b),
                        Endian::Big => <$t>::from_be_bytes(b),
                    }) as f64
                })
                .collect()
        }};
    }
    match kind {
        ScalarKind::Uint8 => raw.iter().map(|&b| b as f64).collect(),
        ScalarKind::Int16 => conv!(i16),
        ScalarKind::Uint16 => conv!(u16),
        ScalarKind::Int32 => conv!(i32),
        ScalarKind::Float32 => conv!(f32),
        ScalarKind::Float64 => conv!(f64),
    }
}

/// Little-endian payload; integer kinds round and saturate.
fn encode(data: &[f64], kind: ScalarKind) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() * kind.byte_size());
    for &v in data {
        match kind {
            ScalarKind::Uint8 => out.push(v.round() as u8),
            ScalarKind::Int16 => out.extend_from_slice(&(v.round() as i16).to_le_bytes()),
            ScalarKind::Uint16 => out.extend_from_slice(&(v.round() as u16).to_le_bytes()),
            ScalarKind::Int32 => out.extend_from_slice(&(v.round() as i32).to_le_bytes()),
            ScalarKind::Float32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
            ScalarKind::Float64 => out.extend_from_slice(&v.to_le_bytes()),
        }
    }
    out
}
