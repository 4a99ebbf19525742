//! JSON files for phase factors and Chebyshev coefficients.
//!
//! ```text
//! {"parity": "even", "reduced_phases": [ ... ]}
//! {"parity": "odd",  "coeffs": [ ... ]}
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! finite double exactly.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::chebyshev::infinity_norm_default;
use crate::error::{QspError, Result};
use crate::types::{ChebCoeffs, Parity, ReducedPhases};

/// Formats `v` with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty-printing JSON formatter that writes every `f64` with 17
/// significant digits.
struct PreciseFormatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident$(($arg:ident: $ty:ty))?),* $(,)?) => {$(
        fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)?) -> io::Result<()> {
            self.0.$name(writer $(, $arg)?)
        }
    )*};
}

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    delegate!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        begin_object_value,
        end_object_value,
    );
}

/// Pretty JSON with 17-significant-digit floats. Non-finite floats are
/// written as `null`.
pub fn to_json_precise<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, PreciseFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(QspError::InvalidInput(format!("cannot serialize {v}"))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct PhaseFileOut<'a> {
    parity: Parity,
    reduced_phases: &'a [f64],
}

#[derive(Serialize)]
struct CoeffFileOut<'a> {
    parity: Parity,
    coeffs: &'a [f64],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseFileIn {
    parity: Parity,
    reduced_phases: Vec<f64>,
    #[serde(default)]
    degree: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffFileIn {
    parity: Parity,
    coeffs: Vec<f64>,
    #[serde(default)]
    degree: Option<usize>,
}

pub fn phases_to_json(phi: &ReducedPhases) -> Result<String> {
    check_finite(phi.phases())?;
    to_json_precise(&PhaseFileOut {
        parity: phi.parity(),
        reduced_phases: phi.phases(),
    })
}

pub fn coeffs_to_json(c: &ChebCoeffs) -> Result<String> {
    check_finite(c.coeffs())?;
    to_json_precise(&CoeffFileOut {
        parity: c.parity(),
        coeffs: c.coeffs(),
    })
}

pub fn save_phases(path: impl AsRef<Path>, phi: &ReducedPhases) -> Result<()> {
    fs::write(path, phases_to_json(phi)? + "\n")?;
    Ok(())
}

pub fn save_coeffs(path: impl AsRef<Path>, c: &ChebCoeffs) -> Result<()> {
    fs::write(path, coeffs_to_json(c)? + "\n")?;
    Ok(())
}

fn schema(path: &Path, message: impl Into<String>) -> QspError {
    QspError::Schema {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn check_values(path: &Path, parity: Parity, values: &[f64], degree: Option<usize>) -> Result<()> {
    if values.is_empty() {
        return Err(schema(path, "empty vector"));
    }
    if let Some(d) = degree {
        let implied = parity.full_degree(values.len());
        if d != implied {
            return Err(schema(
                path,
                format!(
                    "degree {d} inconsistent with {} {parity} entries (degree {implied})",
                    values.len()
                ),
            ));
        }
    }
    Ok(())
}

pub fn load_phases(path: impl AsRef<Path>) -> Result<ReducedPhases> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let file: PhaseFileIn = serde_json::from_str(&text).map_err(|e| schema(path, e.to_string()))?;
    check_values(path, file.parity, &file.reduced_phases, file.degree)?;
    ReducedPhases::new(file.parity, file.reduced_phases)
}

/// A coefficient file together with its sup norm on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct LoadedCoeffs {
    pub coeffs: ChebCoeffs,
    pub infinity_norm: f64,
    /// Set when `‖f‖_∞ > 1`; such targets have no exact phase factors.
    pub exceeds_unit_norm: bool,
}

pub fn load_coeffs(path: impl AsRef<Path>) -> Result<LoadedCoeffs> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let file: CoeffFileIn = serde_json::from_str(&text).map_err(|e| schema(path, e.to_string()))?;
    check_values(path, file.parity, &file.coeffs, file.degree)?;
    let coeffs = ChebCoeffs::new(file.parity, file.coeffs)?;
    let infinity_norm = infinity_norm_default(&coeffs);
    Ok(LoadedCoeffs {
        coeffs,
        infinity_norm,
        exceeds_unit_norm: infinity_norm > 1.0,
    })
}
