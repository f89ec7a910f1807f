//! Reading and writing grayscale masks as netpbm PGM images (ASCII `P2` and
//! binary `P5`).
//!
//! Pixel values are mapped onto `[0, 1]` by dividing by the image's maxval on
//! read, and quantized to a maxval of 255 on write, so a write/read round
//! trip moves a value by at most `1/255`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use railmask_core::MaskGrid;

use crate::error::CliError;

/// On-disk PGM flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`: ASCII decimal samples.
    Ascii,
    /// `P5`: one raw byte per sample.
    Binary,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> CliError {
        CliError::Input(format!("{}: {message}", self.path.display()))
    }

    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next_token(&mut self) -> Result<&'a [u8], CliError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("unexpected end of file"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn next_number(&mut self, what: &str) -> Result<usize, CliError> {
        let token = self.next_token()?;
        std::str::from_utf8(token)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| {
                self.error(&format!(
                    "invalid {what}: {:?}",
                    String::from_utf8_lossy(token)
                ))
            })
    }
}

/// Reads a `P2` or `P5` PGM file into a grid of values in `[0, 1]`.
pub fn read_pgm(path: &Path) -> Result<MaskGrid, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut parser = Parser {
        bytes: &bytes,
        pos: 0,
        path,
    };
    let magic = parser.next_token()?;
    let format = match magic {
        b"P2" => PgmFormat::Ascii,
        b"P5" => PgmFormat::Binary,
        other => {
            return Err(parser.error(&format!(
                "unsupported magic {:?} (expected P2 or P5)",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = parser.next_number("width")?;
    let height = parser.next_number("height")?;
    let maxval = parser.next_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(parser.error(&format!("degenerate image size {width}x{height}")));
    }
    if !(1..=255).contains(&maxval) {
        return Err(parser.error(&format!("unsupported maxval {maxval} (expected 1..=255)")));
    }
    let scale = 1.0 / maxval as f64;
    let count = width * height;
    let values = match format {
        PgmFormat::Ascii => {
            let mut values = Vec::with_capacity(count);
            for _ in 0..count {
                let sample = parser.next_number("sample")?;
                if sample > maxval {
                    return Err(parser.error(&format!("sample {sample} exceeds maxval {maxval}")));
                }
                values.push(sample as f64 * scale);
            }
            values
        }
        PgmFormat::Binary => {
            // Exactly one whitespace byte separates the maxval from the
            // sample bytes.
            if parser.pos >= bytes.len() || !bytes[parser.pos].is_ascii_whitespace() {
                return Err(parser.error("missing whitespace before binary samples"));
            }
            let start = parser.pos + 1;
            let data = bytes
                .get(start..start + count)
                .ok_or_else(|| parser.error("truncated binary sample data"))?;
            let mut values = Vec::with_capacity(count);
            for &byte in data {
                if byte as usize > maxval {
                    return Err(parser.error(&format!("sample {byte} exceeds maxval {maxval}")));
                }
                values.push(byte as f64 * scale);
            }
            values
        }
    };
    MaskGrid::new(height, width, values)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes a grid of values in `[0, 1]` as a PGM file with maxval 255.
pub fn write_pgm(path: &Path, grid: &MaskGrid, format: PgmFormat) -> Result<(), CliError> {
    if grid.min_value() < 0.0 || grid.max_value() > 1.0 {
        return Err(CliError::Failure(format!(
            "cannot write {}: values outside [0, 1]",
            path.display()
        )));
    }
    let file = fs::File::create(path)
        .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    let write_err =
        |e: std::io::Error| CliError::Failure(format!("cannot write {}: {e}", path.display()));
    let quantize = |v: f64| (v * 255.0).round() as u8;
    match format {
        PgmFormat::Ascii => {
            write!(out, "P2\n{} {}\n255\n", grid.width(), grid.height()).map_err(write_err)?;
            for row in 0..grid.height() {
                let line = (0..grid.width())
                    .map(|col| quantize(grid.get(row, col)).to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(out, "{line}").map_err(write_err)?;
            }
        }
        PgmFormat::Binary => {
            write!(out, "P5\n{} {}\n255\n", grid.width(), grid.height()).map_err(write_err)?;
            let data: Vec<u8> = grid.values().iter().map(|&v| quantize(v)).collect();
            out.write_all(&data).map_err(write_err)?;
        }
    }
    out.flush().map_err(write_err)
}
