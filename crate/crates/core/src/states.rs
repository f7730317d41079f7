//! Target states: Bell, maximally entangled qudits, GHZ, Schmidt-form, W,
//! Dicke, and the named-state grammar used by the command line.

use std::path::Path;

use nalgebra::DVector;

use crate::error::{QsvError, Result};
use crate::graphs::{graph_state, Graph};
use crate::qmath::{total_dim, PureState, C64};

/// Descending, unit-norm Schmidt coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtVector {
    coeffs: Vec<f64>,
}

impl SchmidtVector {
    /// Accepts coefficients within `1e-9` of a valid vector, sorting and
    /// renormalizing them. Anything further off is rejected.
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(QsvError::invalid("Schmidt vector is empty"));
        }
        if coeffs.iter().any(|x| !x.is_finite() || *x < -1e-9) {
            return Err(QsvError::invalid(format!(
                "Schmidt coefficients must be nonnegative: {coeffs:?}"
            )));
        }
        let norm_sqr: f64 = coeffs.iter().map(|x| x * x).sum();
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(QsvError::invalid(format!(
                "Schmidt coefficients have squared norm {norm_sqr}, expected 1"
            )));
        }
        let norm = norm_sqr.sqrt();
        let mut c: Vec<f64> = coeffs.iter().map(|x| x.max(0.0) / norm).collect();
        c.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { coeffs: c })
    }

    /// `(cos θ, sin θ)` reordered so the larger comes first.
    pub fn two_qubit(theta: f64) -> Result<Self> {
        Self::new(&[theta.cos().abs(), theta.sin().abs()])
    }

    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(QsvError::invalid("dimension must be positive"));
        }
        Self::new(&vec![1.0 / (d as f64).sqrt(); d])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn largest(&self) -> f64 {
        self.coeffs[0]
    }
}

pub fn bell_state() -> PureState {
    mes_qudit(2).expect("d = 2 is valid")
}

pub fn mes_qudit(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(QsvError::invalid(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    schmidt_state(&SchmidtVector::uniform(d)?)
}

/// `Σ λ_α |αα⟩` on `d ⊗ d`.
pub fn schmidt_state(lambda: &SchmidtVector) -> Result<PureState> {
    let d = lambda.dim();
    let dd = total_dim(&[d, d])?;
    let mut v = DVector::from_element(dd, C64::new(0.0, 0.0));
    for (a, &l) in lambda.coeffs().iter().enumerate() {
        v[a * d + a] = C64::new(l, 0.0);
    }
    PureState::normalized(vec![d, d], v)
}

/// `cos θ|00⟩ + sin θ|11⟩`, amplitudes kept exactly as given.
pub fn two_qubit_state(theta: f64) -> Result<PureState> {
    let mut v = DVector::from_element(4, C64::new(0.0, 0.0));
    v[0] = C64::new(theta.cos(), 0.0);
    v[3] = C64::new(theta.sin(), 0.0);
    PureState::normalized(vec![2, 2], v)
}

fn qubit_dims(n: usize, min: usize, what: &str) -> Result<Vec<usize>> {
    if n < min {
        return Err(QsvError::invalid(format!("{what} needs n >= {min}, got {n}")));
    }
    let dims = vec![2; n];
    total_dim(&dims)?;
    Ok(dims)
}

pub fn ghz(n: usize) -> Result<PureState> {
    let dims = qubit_dims(n, 2, "GHZ state")?;
    let d = 1usize << n;
    let mut v = DVector::from_element(d, C64::new(0.0, 0.0));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = C64::new(h, 0.0);
    v[d - 1] = C64::new(h, 0.0);
    PureState::new(dims, v)
}

pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(QsvError::invalid(format!("W state needs n >= 2, got {n}")));
    }
    dicke(n, 1)
}

/// Uniform superposition of all weight-`k` basis states.
pub fn dicke(n: usize, k: usize) -> Result<PureState> {
    let dims = qubit_dims(n, 1, "Dicke state")?;
    if k > n {
        return Err(QsvError::invalid(format!("Dicke state needs k <= n, got k={k}, n={n}")));
    }
    let d = 1usize << n;
    let count = (0..d).filter(|b| b.count_ones() as usize == k).count();
    let amp = 1.0 / (count as f64).sqrt();
    let v = DVector::from_fn(d, |b, _| {
        if b.count_ones() as usize == k {
            C64::new(amp, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    PureState::normalized(dims, v)
}

/// Parses the named-state grammar:
/// `bell`, `mes:d`, `ghz:n`, `w:n`, `dicke:n:k`, `schmidt:l1,l2,...`,
/// `graph:FILE`, `twoqubit:theta`.
pub fn from_spec(spec: &str) -> Result<PureState> {
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (spec, None),
    };
    let arg = |name: &str| {
        rest.ok_or_else(|| QsvError::invalid(format!("state '{name}' needs a parameter")))
    };
    let int = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| QsvError::invalid(format!("'{s}' is not a nonnegative integer")))
    };
    let real = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| QsvError::invalid(format!("'{s}' is not a number")))
    };
    match head {
        "bell" if rest.is_none() => Ok(bell_state()),
        "mes" => mes_qudit(int(arg("mes")?)?),
        "ghz" => ghz(int(arg("ghz")?)?),
        "w" => w_state(int(arg("w")?)?),
        "dicke" => {
            let (n, k) = arg("dicke")?
                .split_once(':')
                .ok_or_else(|| QsvError::invalid("dicke expects dicke:n:k"))?;
            dicke(int(n)?, int(k)?)
        }
        "schmidt" => {
            let coeffs = arg("schmidt")?
                .split(',')
                .map(real)
                .collect::<Result<Vec<_>>>()?;
            schmidt_state(&SchmidtVector::new(&coeffs)?)
        }
        "twoqubit" => two_qubit_state(real(arg("twoqubit")?)?),
        "graph" => graph_state(&Graph::read_file(Path::new(arg("graph")?))?),
        _ => Err(QsvError::invalid(format!("unknown state '{spec}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{partial_trace, hermitian_eigenvalues};

    #[test]
    fn bell_is_mes_two() {
        let b = bell_state();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.amplitude(0).re - h).abs() < 1e-15 && (b.amplitude(3).re - h).abs() < 1e-15);
        assert_eq!(b.dims(), &[2, 2]);
    }

    #[test]
    fn schmidt_validation() {
        let s = SchmidtVector::new(&[0.6, 0.8]).unwrap();
        assert_eq!(s.coeffs(), &[0.8, 0.6]);
        assert!(SchmidtVector::new(&[0.6, 0.7]).is_err());
        assert!(SchmidtVector::new(&[1.0, -0.1]).is_err());
        assert!(SchmidtVector::new(&[1.0 + 1e-10]).is_ok());
    }

    #[test]
    fn separable_limit() {
        let s = schmidt_state(&SchmidtVector::new(&[1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(s.amplitude(0), C64::new(1.0, 0.0));
    }

    #[test]
    fn dicke_counts() {
        let d = dicke(4, 2).unwrap();
        let nz: Vec<_> = d.amplitudes().iter().filter(|z| z.norm() > 0.0).collect();
        assert_eq!(nz.len(), 6);
        assert!((nz[0].re - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert_eq!(dicke(3, 0).unwrap().amplitude(0), C64::new(1.0, 0.0));
        assert!(dicke(3, 4).is_err());
        assert_eq!(dicke(3, 1).unwrap(), w_state(3).unwrap());
    }

    #[test]
    fn w_reduced_state() {
        for n in 2..7 {
            let w = w_state(n).unwrap();
            let r = partial_trace(&w.projector(), &[0]).unwrap();
            let ev = hermitian_eigenvalues(&r).unwrap();
            assert!((ev[0] - (n as f64 - 1.0) / n as f64).abs() < 1e-12);
            assert!((ev[1] - 1.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_schmidt_rank_two() {
        let g = ghz(5).unwrap();
        for keep in [vec![0], vec![0, 1], vec![1, 3, 4]] {
            let r = partial_trace(&g.projector(), &keep).unwrap();
            let ev = hermitian_eigenvalues(&r).unwrap();
            assert_eq!(ev.iter().filter(|&&x| x > 1e-12).count(), 2);
        }
    }

    #[test]
    fn spec_grammar() {
        assert_eq!(from_spec("bell").unwrap(), bell_state());
        assert_eq!(from_spec("mes:3").unwrap(), mes_qudit(3).unwrap());
        assert_eq!(from_spec("dicke:4:2").unwrap(), dicke(4, 2).unwrap());
        assert!((from_spec("schmidt:0.6,0.8").unwrap().amplitude(0).re - 0.8).abs() < 1e-15);
        assert!(from_spec("ghz").is_err());
        assert!(from_spec("nope").is_err());
        assert!(from_spec("ghz:13").is_err());
    }
}
