//! Image ingestion: comma-separated grids and PGM (P2/P5).

use std::path::Path;

use crate::error::{Error, Result};
use crate::vision::grid::{ImageGrid, GRID_SIDE};

/// Raw intensities in [0, 1] with their original dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct RawImage {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

/// Rows of comma-separated intensities; scaled by 1/255 when any value exceeds 1.
pub fn parse_grid_csv(text: &str) -> Result<RawImage> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("line {}: `{s}` is not a number", idx + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return err(format!("line {}: expected {} columns, found {}", idx + 1, first.len(), row.len()));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return err("image file contains no rows");
    }
    let (n_rows, n_cols) = (rows.len(), rows[0].len());
    let mut data: Vec<f64> = rows.into_iter().flatten().collect();
    if let Some(v) = data.iter().find(|v| !(0.0..=255.0).contains(*v)) {
        return err(format!("intensity {v} outside [0, 255]"));
    }
    if data.iter().any(|&v| v > 1.0) {
        data.iter_mut().for_each(|v| *v /= 255.0);
    }
    Ok(RawImage { rows: n_rows, cols: n_cols, data })
}

/// Whitespace-separated header tokens, skipping `#` comments.
struct PgmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmHeader<'a> {
    fn token(&mut self) -> Result<&'a str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return err("truncated PGM header");
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).or_else(|_| err("non-ASCII PGM header"))
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse().or_else(|_| err(format!("bad PGM header value `{t}`")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<RawImage> {
    let mut h = PgmHeader { bytes, pos: 0 };
    let magic = h.token()?;
    if magic != "P2" && magic != "P5" {
        return err(format!("unsupported PGM magic `{magic}`"));
    }
    let cols = h.number()?;
    let rows = h.number()?;
    let maxval = h.number()?;
    if cols == 0 || rows == 0 || maxval == 0 || maxval > 65535 {
        return err(format!("bad PGM header ({cols}x{rows}, maxval {maxval})"));
    }
    let n = rows * cols;
    let raw: Vec<usize> = if magic == "P2" {
        (0..n).map(|_| h.number()).collect::<Result<_>>()?
    } else {
        // exactly one whitespace byte separates the header from the raster
        let start = h.pos + 1;
        let width = if maxval < 256 { 1 } else { 2 };
        let body =
            bytes.get(start..start + n * width).ok_or_else(|| Error::InvalidInput("truncated PGM raster".into()))?;
        if width == 1 {
            body.iter().map(|&b| b as usize).collect()
        } else {
            body.chunks(2).map(|c| (c[0] as usize) << 8 | c[1] as usize).collect()
        }
    };
    if let Some(v) = raw.iter().find(|&&v| v > maxval) {
        return err(format!("PGM sample {v} exceeds maxval {maxval}"));
    }
    let data = raw.into_iter().map(|v| v as f64 / maxval as f64).collect();
    Ok(RawImage { rows, cols, data })
}

/// Center-crop to a square, then area-average down to `side x side`.
pub fn crop_and_resize(img: &RawImage, side: usize) -> Result<ImageGrid> {
    let sq = img.rows.min(img.cols);
    if sq < side {
        return err(format!("image is {}x{}, smaller than {side}x{side}", img.rows, img.cols));
    }
    let (r0, c0) = ((img.rows - sq) / 2, (img.cols - sq) / 2);
    let scale = sq as f64 / side as f64;
    let at = |r: usize, c: usize| img.data[(r0 + r) * img.cols + c0 + c];
    // overlap of source cell [k, k+1) with [a, b)
    let overlap = |k: usize, a: f64, b: f64| ((k + 1) as f64).min(b) - (k as f64).max(a);
    let mut out = Vec::with_capacity(side * side);
    for i in 0..side {
        let (ya, yb) = (i as f64 * scale, (i + 1) as f64 * scale);
        for j in 0..side {
            let (xa, xb) = (j as f64 * scale, (j + 1) as f64 * scale);
            let mut acc = 0.0;
            for r in ya.floor() as usize..(yb.ceil() as usize).min(sq) {
                let wy = overlap(r, ya, yb);
                for c in xa.floor() as usize..(xb.ceil() as usize).min(sq) {
                    acc += wy * overlap(c, xa, xb) * at(r, c);
                }
            }
            out.push((acc / (scale * scale)).clamp(0.0, 1.0));
        }
    }
    ImageGrid::new(side, side, out)
}

/// Load a 20x20 image; larger images are cropped and resized only when `allow_resize`.
pub fn load_image(path: &Path, allow_resize: bool) -> Result<ImageGrid> {
    let wrap = |e: Error| Error::Data { path: path.display().to_string(), msg: e.to_string() };
    let bytes = std::fs::read(path).map_err(|e| wrap(e.into()))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let raw = if ext == "pgm" || bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        parse_pgm(&bytes)
    } else {
        std::str::from_utf8(&bytes).map_err(|_| Error::InvalidInput("not a text grid".into())).and_then(parse_grid_csv)
    }
    .map_err(wrap)?;
    if raw.rows == GRID_SIDE && raw.cols == GRID_SIDE {
        return ImageGrid::new(raw.rows, raw.cols, raw.data).map_err(wrap);
    }
    if !allow_resize {
        return Err(wrap(Error::InvalidInput(format!(
            "image is {}x{}, expected {GRID_SIDE}x{GRID_SIDE} (enable resizing to accept larger images)",
            raw.rows, raw.cols
        ))));
    }
    crop_and_resize(&raw, GRID_SIDE).map_err(wrap)
}

/// Read a grid CSV (such as an exported array state) without rescaling.
pub fn load_state_grid(path: &Path) -> Result<ImageGrid> {
    let wrap = |e: Error| Error::Data { path: path.display().to_string(), msg: e.to_string() };
    let text = std::fs::read_to_string(path).map_err(|e| wrap(e.into()))?;
    let raw = parse_grid_csv(&text).map_err(wrap)?;
    ImageGrid::new(raw.rows, raw.cols, raw.data).map_err(wrap)
}

/// ASCII PGM (P2) with maxval 255.
pub fn to_pgm(img: &ImageGrid) -> String {
    let mut out = format!("P2\n{} {}\n255\n", img.cols(), img.rows());
    for r in 0..img.rows() {
        let row: Vec<String> = (0..img.cols()).map(|c| ((img.get(r, c) * 255.0).round() as u32).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_scales_by_max_value() {
        let a = parse_grid_csv("0,255\n128,0\n").unwrap();
        assert_eq!((a.rows, a.cols), (2, 2));
        assert_eq!(a.data[1], 1.0);
        let b = parse_grid_csv("0,1\n0.5,0\n").unwrap();
        assert_eq!(b.data, vec![0.0, 1.0, 0.5, 0.0]);
        assert!(parse_grid_csv("0,1\n0\n").is_err());
        assert!(parse_grid_csv("0,300\n").is_err());
        assert!(parse_grid_csv("").is_err());
    }

    #[test]
    fn pgm_ascii_and_binary() {
        let p2 = parse_pgm(b"P2\n# comment\n2 2\n255\n0 255\n51 102\n").unwrap();
        assert_eq!((p2.rows, p2.cols), (2, 2));
        assert_eq!(p2.data, vec![0.0, 1.0, 0.2, 0.4]);
        let mut p5 = b"P5\n2 1\n255\n".to_vec();
        p5.extend_from_slice(&[255, 0]);
        let p5 = parse_pgm(&p5).unwrap();
        assert_eq!(p5.data, vec![1.0, 0.0]);
        assert!(parse_pgm(b"P6\n1 1\n255\n").is_err());
        assert!(parse_pgm(b"P5\n4 4\n255\n\x00").is_err());
    }

    #[test]
    fn resize_box_filter() {
        // 40x40 with a bright left half: exact 2x2 averaging
        let data = (0..1600).map(|i| if i % 40 < 20 { 1.0 } else { 0.0 }).collect();
        let g = crop_and_resize(&RawImage { rows: 40, cols: 40, data }, 20).unwrap();
        assert_eq!(g.get(0, 9), 1.0);
        assert_eq!(g.get(0, 10), 0.0);
        // 30 -> 20 straddles source cells; a constant image stays constant
        let g = crop_and_resize(&RawImage { rows: 30, cols: 50, data: vec![0.4; 1500] }, 20).unwrap();
        assert!(g.values().iter().all(|v| (v - 0.4).abs() < 1e-12));
        assert!(crop_and_resize(&RawImage { rows: 10, cols: 50, data: vec![0.0; 500] }, 20).is_err());
    }

    #[test]
    fn pgm_writer_round_trips() {
        let g = ImageGrid::from_fn(20, 20, |r, c| ((r + c) % 2) as f64).unwrap();
        let back = parse_pgm(to_pgm(&g).as_bytes()).unwrap();
        assert_eq!(back.data, g.values());
    }
}
