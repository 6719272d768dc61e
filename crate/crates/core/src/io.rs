//! JSON wire formats for measures, partitions and expansions.
//!
//! Rationals travel as strings `"p/q"` (or `"p"` for integers) so fixtures
//! never pick up float drift; integer digit sets and frequency sets are plain
//! JSON integers. The measure description is tagged by `"type"`:
//!
//! ```json
//! {"type":"step","dim":1,"cells":[{"box":[["0","1"]],"value":"2/3"}]}
//! {"type":"atomic","dim":1,"points":[["0"],["1/8"]],"spectrum":[0,1]}
//! {"type":"ifs","R":4,"B":[0,10],"L":[0,1]}
//! {"type":"ifs-pair","first":{...},"second":{...}}
//! {"type":"partition","dim":1,"pieces":[{"shift":[0],"region":[[["0","1"]]]}]}
//! ```

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atomic::{AtomicError, AtomicMeasure, FrequencySet};
use crate::density::{CongruencePartition, DensityError, StepDensity};
use crate::exactnum::{parse_rational, NumError, RationalBox};
use crate::ifs::{AffineIfs, IfsError};
use crate::localtrans::SpectralExpansion;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Atomic(#[from] AtomicError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// A parsed and validated measure description.
#[derive(Debug, Clone)]
pub enum MeasureInput {
    Step(StepDensity),
    Atomic {
        measure: AtomicMeasure,
        spectrum: Option<FrequencySet>,
    },
    Ifs {
        ifs: AffineIfs,
        dual: Option<Vec<i64>>,
    },
    IfsPair {
        first: AffineIfs,
        first_dual: Option<Vec<i64>>,
        second: AffineIfs,
        second_dual: Option<Vec<i64>>,
    },
    Partition(CongruencePartition),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum MeasureJson {
    #[serde(rename = "step")]
    Step { dim: usize, cells: Vec<CellJson> },
    #[serde(rename = "atomic")]
    Atomic {
        dim: usize,
        points: Vec<Vec<String>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        spectrum: Option<SpectrumJson>,
    },
    #[serde(rename = "ifs")]
    Ifs(IfsJson),
    #[serde(rename = "ifs-pair")]
    IfsPair { first: IfsJson, second: IfsJson },
    #[serde(rename = "partition")]
    Partition { dim: usize, pieces: Vec<PieceJson> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellJson {
    #[serde(rename = "box")]
    bounds: Vec<[String; 2]>,
    value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SpectrumJson {
    Flat(Vec<i64>),
    Nested(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsJson {
    #[serde(rename = "R")]
    scale: i64,
    #[serde(rename = "B")]
    digits: Vec<i64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    dual: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceJson {
    shift: Vec<i64>,
    region: Vec<Vec<[String; 2]>>,
}

fn box_from_json(bounds: &[[String; 2]]) -> Result<RationalBox, IoError> {
    let intervals = bounds
        .iter()
        .map(|[lo, hi]| Ok((parse_rational(lo)?, parse_rational(hi)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(RationalBox::new(intervals)?)
}

fn box_to_json(bx: &RationalBox) -> Vec<[String; 2]> {
    bx.intervals()
        .iter()
        .map(|(lo, hi)| [lo.to_string(), hi.to_string()])
        .collect()
}

fn spectrum_from_json(spec: SpectrumJson) -> Result<FrequencySet, IoError> {
    let nested = match spec {
        SpectrumJson::Flat(v) => v.into_iter().map(|f| vec![f]).collect(),
        SpectrumJson::Nested(v) => v,
    };
    Ok(FrequencySet::new(nested)?)
}

fn ifs_from_json(json: IfsJson) -> Result<(AffineIfs, Option<Vec<i64>>), IoError> {
    let ifs = AffineIfs::new(json.scale, json.digits)?;
    Ok((ifs, json.dual))
}

/// Parses and validates a measure description.
pub fn parse_measure(json: &str) -> Result<MeasureInput, IoError> {
    let parsed: MeasureJson = serde_json::from_str(json)?;
    match parsed {
        MeasureJson::Step { dim, cells } => {
            let cells = cells
                .iter()
                .map(|c| {
                    let bx = box_from_json(&c.bounds)?;
                    if bx.dim() != dim {
                        return Err(IoError::Invalid(format!(
                            "cell dimension {} does not match declared dimension {dim}",
                            bx.dim()
                        )));
                    }
                    Ok((bx, parse_rational(&c.value)?))
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            Ok(MeasureInput::Step(StepDensity::new(cells)?))
        }
        MeasureJson::Atomic {
            dim,
            points,
            spectrum,
        } => {
            let atoms = points
                .iter()
                .map(|p| {
                    if p.len() != dim {
                        return Err(IoError::Invalid(format!(
                            "atom dimension {} does not match declared dimension {dim}",
                            p.len()
                        )));
                    }
                    p.iter()
                        .map(|s| Ok(parse_rational(s)?))
                        .collect::<Result<Vec<_>, IoError>>()
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            let measure = AtomicMeasure::new(atoms)?;
            let spectrum = spectrum.map(spectrum_from_json).transpose()?;
            if let Some(s) = &spectrum {
                if s.dim() != dim {
                    return Err(IoError::Invalid(format!(
                        "spectrum dimension {} does not match declared dimension {dim}",
                        s.dim()
                    )));
                }
            }
            Ok(MeasureInput::Atomic { measure, spectrum })
        }
        MeasureJson::Ifs(json) => {
            let (ifs, dual) = ifs_from_json(json)?;
            Ok(MeasureInput::Ifs { ifs, dual })
        }
        MeasureJson::IfsPair { first, second } => {
            let (first, first_dual) = ifs_from_json(first)?;
            let (second, second_dual) = ifs_from_json(second)?;
            Ok(MeasureInput::IfsPair {
                first,
                first_dual,
                second,
                second_dual,
            })
        }
        MeasureJson::Partition { dim, pieces } => {
            let pieces = pieces
                .iter()
                .map(|p| {
                    if p.shift.len() != dim {
                        return Err(IoError::Invalid(format!(
                            "shift dimension {} does not match declared dimension {dim}",
                            p.shift.len()
                        )));
                    }
                    let shift: Vec<BigInt> = p.shift.iter().map(|&k| BigInt::from(k)).collect();
                    let region = p.region.iter().map(|b| box_from_json(b)).collect::<Result<
                        Vec<_>,
                        IoError,
                    >>(
                    )?;
                    Ok((shift, region))
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            Ok(MeasureInput::Partition(CongruencePartition::new(pieces)?))
        }
    }
}

/// Serializes a step density into its wire format.
pub fn step_density_to_json(d: &StepDensity) -> serde_json::Value {
    let cells = d
        .cells()
        .iter()
        .map(|(bx, v)| CellJson {
            bounds: box_to_json(bx),
            value: v.to_string(),
        })
        .collect();
    serde_json::to_value(MeasureJson::Step {
        dim: d.dim(),
        cells,
    })
    .expect("step density serializes")
}

/// Serializes a congruence partition into its wire format.
pub fn partition_to_json(p: &CongruencePartition) -> serde_json::Value {
    let pieces = p
        .pieces()
        .iter()
        .map(|(shift, region)| PieceJson {
            shift: shift
                .iter()
                .map(|k| i64::try_from(k).expect("shift fits in i64"))
                .collect(),
            region: region.iter().map(box_to_json).collect(),
        })
        .collect();
    serde_json::to_value(MeasureJson::Partition {
        dim: p.dim(),
        pieces,
    })
    .expect("partition serializes")
}

#[derive(Debug, Serialize, Deserialize)]
struct ExpansionJson {
    spectrum: Vec<serde_json::Value>,
    coefficients: Vec<[f64; 2]>,
}

/// Serializes an expansion as `{"spectrum":[λ…],"coefficients":[[re,im]…]}`;
/// one-dimensional frequencies flatten to plain numbers.
pub fn expansion_to_json(f: &SpectralExpansion) -> serde_json::Value {
    let spectrum = f
        .frequencies()
        .iter()
        .map(|lambda| {
            if lambda.len() == 1 {
                serde_json::json!(lambda[0])
            } else {
                serde_json::json!(lambda)
            }
        })
        .collect();
    let coefficients = f.coefficients().iter().map(|c| [c.re, c.im]).collect();
    serde_json::to_value(ExpansionJson {
        spectrum,
        coefficients,
    })
    .expect("expansion serializes")
}

/// Parses an expansion from its wire format.
pub fn expansion_from_json(json: &str) -> Result<SpectralExpansion, IoError> {
    let parsed: ExpansionJson = serde_json::from_str(json)?;
    let frequencies = parsed
        .spectrum
        .iter()
        .map(|v| {
            if let Some(x) = v.as_f64() {
                Ok(vec![x])
            } else if let Some(arr) = v.as_array() {
                arr.iter()
                    .map(|x| {
                        x.as_f64()
                            .ok_or_else(|| IoError::Invalid("non-numeric frequency".into()))
                    })
                    .collect()
            } else {
                Err(IoError::Invalid("non-numeric frequency".into()))
            }
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let coefficients = parsed
        .coefficients
        .iter()
        .map(|[re, im]| crate::exactnum::Complex::new(*re, *im))
        .collect();
    SpectralExpansion::new(frequencies, coefficients).map_err(|e| IoError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};

    #[test]
    fn parse_step_density() {
        let json = r#"{"type":"step","dim":1,"cells":[
            {"box":[["0","1"]],"value":"2/3"},
            {"box":[["1","2"]],"value":"1/3"}
        ]}"#;
        let MeasureInput::Step(d) = parse_measure(json).unwrap() else {
            panic!("expected step density");
        };
        assert_eq!(d.dim(), 1);
        assert_eq!(d.cells().len(), 2);
        assert_eq!(d.cells()[0].1, rat(2, 3));

        // Round trip through the emitter.
        let emitted = step_density_to_json(&d).to_string();
        let MeasureInput::Step(d2) = parse_measure(&emitted).unwrap() else {
            panic!("expected step density");
        };
        assert_eq!(d, d2);
    }

    #[test]
    fn parse_atomic_with_flat_spectrum() {
        let json = r#"{"type":"atomic","dim":1,
            "points":[["0"],["1/8"],["1/2"],["5/8"]],
            "spectrum":[0,1,4,5]}"#;
        let MeasureInput::Atomic { measure, spectrum } = parse_measure(json).unwrap() else {
            panic!("expected atomic measure");
        };
        assert_eq!(measure.len(), 4);
        assert_eq!(
            spectrum.unwrap().frequencies(),
            &[vec![0], vec![1], vec![4], vec![5]]
        );
    }

    #[test]
    fn parse_ifs_and_pair() {
        let json = r#"{"type":"ifs","R":4,"B":[0,10],"L":[0,1]}"#;
        let MeasureInput::Ifs { ifs, dual } = parse_measure(json).unwrap() else {
            panic!("expected ifs");
        };
        assert_eq!(ifs.scale(), 4);
        assert_eq!(ifs.digits(), &[0, 10]);
        assert_eq!(dual, Some(vec![0, 1]));

        let json = r#"{"type":"ifs-pair",
            "first":{"R":4,"B":[0,2],"L":[0,1]},
            "second":{"R":4,"B":[0,10],"L":[0,1]}}"#;
        let MeasureInput::IfsPair { first, second, .. } = parse_measure(json).unwrap() else {
            panic!("expected pair");
        };
        assert_eq!(first.digits(), &[0, 2]);
        assert_eq!(second.digits(), &[0, 10]);
    }

    #[test]
    fn parse_partition_round_trip() {
        let json = r#"{"type":"partition","dim":1,"pieces":[
            {"shift":[0],"region":[[["0","1/2"]]]},
            {"shift":[1],"region":[[["1/2","1"]]]}
        ]}"#;
        let MeasureInput::Partition(p) = parse_measure(json).unwrap() else {
            panic!("expected partition");
        };
        assert_eq!(p.pieces().len(), 2);
        let emitted = partition_to_json(&p).to_string();
        let MeasureInput::Partition(p2) = parse_measure(&emitted).unwrap() else {
            panic!("expected partition");
        };
        assert_eq!(p, p2);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(parse_measure("not json").is_err());
        // Unknown type tag.
        assert!(parse_measure(r#"{"type":"magic"}"#).is_err());
        // Zero denominator.
        assert!(parse_measure(
            r#"{"type":"step","dim":1,"cells":[{"box":[["0","1/0"]],"value":"1"}]}"#
        )
        .is_err());
        // Mass must be one for step inputs.
        assert!(parse_measure(
            r#"{"type":"step","dim":1,"cells":[{"box":[["0","1/2"]],"value":"1"}]}"#
        )
        .is_err());
        // Empty interval.
        assert!(parse_measure(
            r#"{"type":"step","dim":1,"cells":[{"box":[["1","1"]],"value":"1"}]}"#
        )
        .is_err());
    }

    #[test]
    fn expansion_round_trip() {
        let f = SpectralExpansion::new(
            vec![vec![0.0], vec![1.0], vec![4.0]],
            vec![
                crate::exactnum::Complex::new(1.0, 0.0),
                crate::exactnum::Complex::new(0.0, -0.5),
                crate::exactnum::Complex::new(0.25, 0.25),
            ],
        )
        .unwrap();
        let json = expansion_to_json(&f).to_string();
        let parsed = expansion_from_json(&json).unwrap();
        assert_eq!(parsed, f);
        let _ = rat_int(0);
    }
}
