use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{total_dim, Operator, PureState, C64};

/// Wire form of an [`Operator`]: row-major real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Wire form of a [`PureState`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        let d = op.dim();
        let m = op.matrix();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self {
            dims: op.dims().to_vec(),
            re,
            im,
        }
    }
}

impl From<Operator> for OperatorJson {
    fn from(op: Operator) -> Self {
        Self::from(&op)
    }
}

impl TryFrom<OperatorJson> for Operator {
    type Error = String;

    fn try_from(j: OperatorJson) -> Result<Self, String> {
        let d = total_dim(&j.dims).map_err(|e| e.to_string())?;
        if j.re.len() != d * d || j.im.len() != d * d {
            return Err(format!(
                "operator with dims {:?} needs {} entries in \"re\" and \"im\", got {} and {}",
                j.dims,
                d * d,
                j.re.len(),
                j.im.len()
            ));
        }
        let m = DMatrix::from_fn(d, d, |r, c| C64::new(j.re[r * d + c], j.im[r * d + c]));
        Operator::new(j.dims, m).map_err(|e| e.to_string())
    }
}

impl From<&PureState> for StateJson {
    fn from(s: &PureState) -> Self {
        Self {
            dims: s.dims().to_vec(),
            re: s.amplitudes().iter().map(|z| z.re).collect(),
            im: s.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

impl From<PureState> for StateJson {
    fn from(s: PureState) -> Self {
        Self::from(&s)
    }
}

impl TryFrom<StateJson> for PureState {
    type Error = String;

    fn try_from(j: StateJson) -> Result<Self, String> {
        if j.re.len() != j.im.len() {
            return Err("\"re\" and \"im\" lengths differ".into());
        }
        let v = DVector::from_iterator(
            j.re.len(),
            j.re.iter().zip(&j.im).map(|(&a, &b)| C64::new(a, b)),
        );
        PureState::new(j.dims, v).map_err(|e| e.to_string())
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        Operator::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        StateJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = StateJson::deserialize(d)?;
        PureState::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_round_trip_is_bit_exact() {
        let m = DMatrix::from_fn(4, 4, |r, c| C64::new(r as f64 / 3.0, -(c as f64) / 7.0));
        let op = Operator::new(vec![2, 2], m).unwrap();
        let text = serde_json::to_string(&op).unwrap();
        let back: Operator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn wrong_entry_count_is_rejected() {
        let bad = r#"{"dims":[2],"re":[1,0,0],"im":[0,0,0,0]}"#;
        assert!(serde_json::from_str::<Operator>(bad).is_err());
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let bad = r#"{"dims":[2],"re":[1,1],"im":[0,0]}"#;
        assert!(serde_json::from_str::<PureState>(bad).is_err());
    }
}
