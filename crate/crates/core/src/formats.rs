//! Plain-text and Netpbm file formats.
//!
//! * `MTX1`: header line `MTX1 <rows> <cols>`, then one line per row of
//!   space-separated floats written with 17 significant digits.
//! * PGM `P5` / PPM `P6` with maxval 255 (binary). Plain `P2` / `P3` are
//!   accepted on read.
//! * Bitmaps: one line per row of `0`/`1` characters.
//!
//! Float images are clipped to `[0, 255]` and rounded half away from zero only
//! when written.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use crate::color::Volume;
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn write_mtx<W: Write>(mut w: W, m: &ArrayView2<'_, f64>) -> Result<()> {
    let (r, c) = m.dim();
    writeln!(w, "MTX1 {r} {c}")?;
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_mtx<R: BufRead>(r: R) -> Result<Array2<f64>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty MTX1 file"))??;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("MTX1") {
        return Err(parse_err("missing MTX1 magic"));
    }
    let mut dim = || -> Result<usize> {
        parts
            .next()
            .ok_or_else(|| parse_err("MTX1 header needs rows and cols"))?
            .parse()
            .map_err(|e| parse_err(format!("bad MTX1 dimension: {e}")))
    };
    let (rows, cols) = (dim()?, dim()?);
    let mut data = Vec::with_capacity(rows * cols);
    for line in lines {
        let line = line?;
        for tok in line.split_whitespace() {
            data.push(tok.parse::<f64>().map_err(|e| parse_err(format!("bad MTX1 value '{tok}': {e}")))?);
        }
    }
    if data.len() != rows * cols {
        return Err(parse_err(format!("MTX1 expects {} values, found {}", rows * cols, data.len())));
    }
    Array2::from_shape_vec((rows, cols), data).map_err(|e| parse_err(e.to_string()))
}

/// Clip to `[0, 255]` and round half away from zero.
pub fn to_gray8(m: &ArrayView2<'_, f64>) -> Array2<u8> {
    m.mapv(quantize)
}

#[inline]
fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.round().clamp(0.0, 255.0) as u8
}

/// Reads whitespace-separated header tokens, skipping `#` comments.
struct Header<'a, R: Read> {
    bytes: std::iter::Peekable<std::io::Bytes<&'a mut R>>,
}

impl<'a, R: Read> Header<'a, R> {
    #[allow(clippy::unbuffered_bytes)]
    fn new(r: &'a mut R) -> Self {
        Self { bytes: r.bytes().peekable() }
    }

    fn byte(&mut self) -> Result<Option<u8>> {
        self.bytes.next().transpose().map_err(Error::from)
    }

    fn token(&mut self) -> Result<String> {
        let mut tok = String::new();
        loop {
            match self.byte()? {
                None if tok.is_empty() => return Err(parse_err("unexpected end of Netpbm header")),
                None => return Ok(tok),
                Some(b'#') if tok.is_empty() => {
                    while !matches!(self.byte()?, None | Some(b'\n')) {}
                }
                Some(b) if b.is_ascii_whitespace() => {
                    if !tok.is_empty() {
                        return Ok(tok);
                    }
                }
                Some(b) => tok.push(b as char),
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse().map_err(|_| parse_err(format!("bad Netpbm header value '{t}'")))
    }

    fn rest(mut self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        while let Some(b) = self.byte()? {
            out.push(b);
        }
        Ok(out)
    }
}

/// Returns `(magic, width, height, samples)` with `channels` samples per pixel.
fn read_netpbm<R: Read>(mut r: R, binary: &str, plain: &str, channels: usize) -> Result<(usize, usize, Vec<u8>)> {
    let mut h = Header::new(&mut r);
    let magic = h.token()?;
    if magic != binary && magic != plain {
        return Err(parse_err(format!("expected {binary} or {plain}, found '{magic}'")));
    }
    let (w, ht, maxval) = (h.number()?, h.number()?, h.number()?);
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(format!("only maxval <= 255 is supported, got {maxval}")));
    }
    let count = w * ht * channels;
    let scale = |v: usize| ((v * 255 + maxval / 2) / maxval) as u8;
    let samples = if magic == binary {
        // the single whitespace byte after maxval was consumed by `token`
        let data = h.rest()?;
        if data.len() < count {
            return Err(parse_err(format!("expected {count} samples, found {}", data.len())));
        }
        data[..count].iter().map(|&v| scale(v as usize)).collect()
    } else {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let v = h.number()?;
            if v > maxval {
                return Err(parse_err(format!("sample {v} exceeds maxval {maxval}")));
            }
            out.push(scale(v));
        }
        out
    };
    Ok((w, ht, samples))
}

pub fn write_pgm<W: Write>(mut w: W, img: &ArrayView2<'_, u8>) -> Result<()> {
    let (h, wd) = img.dim();
    write!(w, "P5\n{wd} {h}\n255\n")?;
    let bytes: Vec<u8> = img.iter().copied().collect();
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_pgm<R: Read>(r: R) -> Result<Array2<u8>> {
    let (w, h, samples) = read_netpbm(r, "P5", "P2", 1)?;
    Array2::from_shape_vec((h, w), samples).map_err(|e| parse_err(e.to_string()))
}

/// RGB volume (`Z = 3`) as a `P6` image.
pub fn write_ppm<W: Write>(mut w: W, img: &Volume) -> Result<()> {
    let (h, wd, z) = img.dims();
    if z != 3 {
        return Err(Error::Dimension(format!("PPM needs 3 channels, got {z}")));
    }
    write!(w, "P6\n{wd} {h}\n255\n")?;
    let mut bytes = Vec::with_capacity(h * wd * 3);
    for i in 0..h {
        for j in 0..wd {
            for q in 0..3 {
                bytes.push(quantize(img.get(i, j, q)));
            }
        }
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_ppm<R: Read>(r: R) -> Result<Volume> {
    let (w, h, samples) = read_netpbm(r, "P6", "P3", 3)?;
    Ok(Volume::from_fn(h, w, 3, |i, j, q| f64::from(samples[(i * w + j) * 3 + q])))
}

pub fn write_bitmap<W: Write>(mut w: W, bits: &ArrayView2<'_, u8>) -> Result<()> {
    for row in bits.rows() {
        let line: String = row.iter().map(|&b| if b != 0 { '1' } else { '0' }).collect();
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_bitmap<R: BufRead>(r: R) -> Result<Array2<u8>> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(parse_err(format!("bitmap may only contain 0 and 1, found '{other}'"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push(row);
    }
    let width = rows.first().map(Vec::len).ok_or_else(|| parse_err("empty bitmap"))?;
    if rows.iter().any(|r| r.len() != width) {
        return Err(parse_err("bitmap rows differ in length"));
    }
    let h = rows.len();
    Array2::from_shape_vec((h, width), rows.concat()).map_err(|e| parse_err(e.to_string()))
}

pub fn save_mtx(path: impl AsRef<Path>, m: &ArrayView2<'_, f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mtx(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn load_mtx(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    read_mtx(BufReader::new(File::open(path)?))
}

pub fn save_pgm(path: impl AsRef<Path>, img: &ArrayView2<'_, u8>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pgm(&mut w, img)?;
    w.flush()?;
    Ok(())
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Array2<u8>> {
    read_pgm(BufReader::new(File::open(path)?))
}

pub fn save_ppm(path: impl AsRef<Path>, img: &Volume) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ppm(&mut w, img)?;
    w.flush()?;
    Ok(())
}

pub fn load_ppm(path: impl AsRef<Path>) -> Result<Volume> {
    read_ppm(BufReader::new(File::open(path)?))
}

pub fn save_bitmap(path: impl AsRef<Path>, bits: &ArrayView2<'_, u8>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_bitmap(&mut w, bits)?;
    w.flush()?;
    Ok(())
}

pub fn load_bitmap(path: impl AsRef<Path>) -> Result<Array2<u8>> {
    read_bitmap(BufReader::new(File::open(path)?))
}

/// Loads a grayscale image from `.mtx` (floats) or any PGM.
pub fn load_gray(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        load_mtx(path)
    } else {
        Ok(load_pgm(path)?.mapv(f64::from))
    }
}

/// Saves to `.pgm` (clipped, rounded) or MTX1 for any other extension.
pub fn save_gray(path: impl AsRef<Path>, m: &ArrayView2<'_, f64>) -> Result<()> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        save_pgm(path, &to_gray8(m).view())
    } else {
        save_mtx(path, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use proptest::prelude::*;

    #[test]
    fn mtx_text_layout() {
        let m = arr2(&[[1.0, -0.5], [0.1, 2.0]]);
        let mut buf = Vec::new();
        write_mtx(&mut buf, &m.view()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("MTX1 2 2\n1.0000000000000000e0 -5.0000000000000000e-1\n"));
        assert_eq!(read_mtx(&buf[..]).unwrap(), m);
    }

    #[test]
    fn mtx_errors() {
        assert!(read_mtx(&b""[..]).is_err());
        assert!(read_mtx(&b"MTX2 1 1\n0\n"[..]).is_err());
        assert!(read_mtx(&b"MTX1 2 2\n0 1 2\n"[..]).is_err());
        assert!(read_mtx(&b"MTX1 1 1\nabc\n"[..]).is_err());
    }

    proptest! {
        #[test]
        fn mtx_round_trip_is_bit_exact(vals in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..40)) {
            let n = vals.len();
            let m = Array2::from_shape_vec((1, n), vals).unwrap();
            let mut buf = Vec::new();
            write_mtx(&mut buf, &m.view()).unwrap();
            let back = read_mtx(&buf[..]).unwrap();
            prop_assert!(back.iter().zip(m.iter()).all(|(a, b)| a.to_bits() == b.to_bits() || (*a == 0.0 && *b == 0.0)));
        }

        #[test]
        fn pgm_round_trip(w in 1usize..9, h in 1usize..9, seed in any::<u64>()) {
            let img = Array2::from_shape_fn((h, w), |(i, j)| (seed.wrapping_mul(31).wrapping_add((i * w + j) as u64 * 2654435761) % 256) as u8);
            let mut buf = Vec::new();
            write_pgm(&mut buf, &img.view()).unwrap();
            prop_assert_eq!(read_pgm(&buf[..]).unwrap(), img);
        }
    }

    #[test]
    fn pgm_header_and_comments() {
        let mut buf = Vec::new();
        write_pgm(&mut buf, &arr2(&[[0u8, 255], [10, 20]]).view()).unwrap();
        assert_eq!(&buf[..11], b"P5\n2 2\n255\n");
        let plain = b"P2\n# comment\n2 1\n15\n0 15\n";
        assert_eq!(read_pgm(&plain[..]).unwrap(), arr2(&[[0u8, 255]]));
        assert!(read_pgm(&b"P5\n2 2\n255\n\x01"[..]).is_err());
        assert!(read_pgm(&b"P6\n1 1\n255\n\x01\x01\x01"[..]).is_err());
    }

    #[test]
    fn gray8_rounding_and_clipping() {
        let m = arr2(&[[-3.0, 0.5, 1.49, 254.5, 300.0, 127.5]]);
        assert_eq!(to_gray8(&m.view()), arr2(&[[0u8, 1, 1, 255, 255, 128]]));
    }

    #[test]
    fn ppm_round_trip() {
        let v = Volume::from_fn(2, 3, 3, |i, j, q| ((i * 3 + j) * 3 + q) as f64 * 10.0);
        let mut buf = Vec::new();
        write_ppm(&mut buf, &v).unwrap();
        assert_eq!(&buf[..11], b"P6\n3 2\n255\n");
        assert_eq!(read_ppm(&buf[..]).unwrap(), v);
        assert!(write_ppm(&mut Vec::new(), &Volume::zeros(1, 1, 2)).is_err());
    }

    #[test]
    fn bitmap_round_trip() {
        let bits = arr2(&[[0u8, 1, 1], [1, 0, 0]]);
        let mut buf = Vec::new();
        write_bitmap(&mut buf, &bits.view()).unwrap();
        assert_eq!(buf, b"011\n100\n");
        assert_eq!(read_bitmap(&buf[..]).unwrap(), bits);
        assert!(read_bitmap(&b"012\n"[..]).is_err());
        assert!(read_bitmap(&b"01\n1\n"[..]).is_err());
        assert!(read_bitmap(&b"\n"[..]).is_err());
    }
}
