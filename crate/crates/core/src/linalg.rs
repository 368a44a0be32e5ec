//! Small fixed-size complex matrices and state vectors.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Row-major `N x N` complex matrix.
pub type CMatrix<const N: usize> = [[C64; N]; N];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Complex amplitudes in the diabatic basis `|1>, ..., |N>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector<const N: usize>(#[serde(with = "amps")] pub [C64; N]);

impl<const N: usize> StateVector<N> {
    /// Basis state `|index>` with 1-based `index`.
    pub fn basis(index: usize) -> Result<Self> {
        if index == 0 || index > N {
            return Err(Error::invalid(
                "initial_state",
                format!("basis index {index} outside 1..={N}"),
            ));
        }
        let mut amps = [ZERO; N];
        amps[index - 1] = ONE;
        Ok(Self(amps))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn populations(&self) -> [f64; N] {
        self.0.map(|c| c.norm_sqr())
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let n = self.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > tolerance {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(())
    }
}

impl<const N: usize> Index<usize> for StateVector<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for StateVector<N> {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

mod amps {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[C64; N], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[C64; N], D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        let len = pairs.len();
        let amps: Vec<C64> = pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        amps.try_into()
            .map_err(|_| serde::de::Error::custom(format!("expected {N} amplitudes, got {len}")))
    }
}

pub fn identity<const N: usize>() -> CMatrix<N> {
    let mut m = [[ZERO; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn mat_mul<const N: usize>(a: &CMatrix<N>, b: &CMatrix<N>) -> CMatrix<N> {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[i][j] = (0..N).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_vec<const N: usize>(m: &CMatrix<N>, v: &[C64; N]) -> [C64; N] {
    std::array::from_fn(|i| (0..N).map(|k| m[i][k] * v[k]).sum())
}

pub fn adjoint<const N: usize>(m: &CMatrix<N>) -> CMatrix<N> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].conj()))
}

pub fn trace<const N: usize>(m: &CMatrix<N>) -> C64 {
    (0..N).map(|i| m[i][i]).sum()
}

/// `max` that lets NaN win, so a NaN anywhere poisons the result.
pub fn nan_max(acc: f64, x: f64) -> f64 {
    if x.is_nan() || x > acc {
        x
    } else {
        acc
    }
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff<const N: usize>(a: &CMatrix<N>, b: &CMatrix<N>) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, nan_max)
}

/// `max |(U^dagger U - 1)_ij|`.
pub fn unitarity_defect<const N: usize>(u: &CMatrix<N>) -> f64 {
    max_abs_diff(&mat_mul(&adjoint(u), u), &identity())
}

/// `max |(H - H^dagger)_ij|`.
pub fn hermiticity_defect<const N: usize>(h: &CMatrix<N>) -> f64 {
    max_abs_diff(h, &adjoint(h))
}

pub fn det2(m: &CMatrix<2>) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn from_real<const N: usize>(m: [[f64; N]; N]) -> CMatrix<N> {
    m.map(|row| row.map(|x| C64::new(x, 0.0)))
}

/// Elementwise squared moduli; for a unitary this is a doubly stochastic matrix.
pub fn squared_moduli<const N: usize>(m: &CMatrix<N>) -> [[f64; N]; N] {
    m.map(|row| row.map(|c| c.norm_sqr()))
}
