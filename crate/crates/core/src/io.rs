//! Serialized forms shared by the library, the CLI and the Python bindings.
//!
//! Vectors are JSON arrays of `[re, im]` pairs in basis order `HH, HV, VH,
//! VV`; matrices are arrays of rows in the same form. Deserializing a
//! [`PureState2Q`] checks the norm and a [`DensityMatrix2Q`] goes through
//! [`DensityMatrix2Q::from_external`].

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{CMat, CVec, C64};
use crate::states::{DensityMatrix2Q, PureState2Q};

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

impl<const N: usize> Serialize for CVec<N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(pair))
    }
}

impl<'de, const N: usize> Deserialize<'de> for CVec<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if raw.len() != N {
            return Err(D::Error::invalid_length(raw.len(), &format!("{N} [re, im] pairs").as_str()));
        }
        let mut v = CVec::<N>::zeros();
        for (k, [re, im]) in raw.into_iter().enumerate() {
            v.0[k] = C64::new(re, im);
        }
        Ok(v)
    }
}

impl<const N: usize> Serialize for CMat<N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|row| row.iter().map(pair).collect::<Vec<_>>()))
    }
}

impl<'de, const N: usize> Deserialize<'de> for CMat<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<CVec<N>> = Vec::deserialize(d)?;
        if rows.len() != N {
            return Err(D::Error::invalid_length(rows.len(), &format!("{N} rows").as_str()));
        }
        let mut m = CMat::<N>::zeros();
        for (r, row) in rows.into_iter().enumerate() {
            m.0[r] = row.0;
        }
        Ok(m)
    }
}

impl Serialize for PureState2Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState2Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = CVec::<4>::deserialize(d)?;
        PureState2Q::new(v).map_err(D::Error::custom)
    }
}

impl Serialize for DensityMatrix2Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.mat().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix2Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = CMat::<4>::deserialize(d)?;
        DensityMatrix2Q::from_external(m).map_err(D::Error::custom)
    }
}

/// Real and imaginary parts of a density matrix as two labelled 4×4 CSV
/// blocks, rows and columns in basis order.
pub fn density_csv_blocks(rho: &DensityMatrix2Q) -> String {
    const LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];
    let mut out = String::new();
    for (title, part) in [("real", 0usize), ("imag", 1usize)] {
        out.push_str(&format!("# {title} part\n"));
        out.push_str("row,HH,HV,VH,VV\n");
        for (r, label) in LABELS.iter().enumerate() {
            out.push_str(label);
            for c in 0..4 {
                let z = rho.mat()[(r, c)];
                let x = if part == 0 { z.re } else { z.im };
                out.push_str(&format!(",{x:.10}"));
            }
            out.push('\n');
        }
    }
    out
}
