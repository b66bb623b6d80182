use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::flux::StateVector;

/// Minimal vector-space operation the Runge-Kutta schemes need.
pub trait Axpy: Copy + Send + Sync {
    /// `self + a * x`
    fn axpy(self, a: f64, x: Self) -> Self;
    fn zero() -> Self;
}

impl Axpy for f64 {
    #[inline]
    fn axpy(self, a: f64, x: Self) -> Self {
        self + a * x
    }
    fn zero() -> Self {
        0.0
    }
}

impl<const D: usize> Axpy for StateVector<D> {
    #[inline]
    fn axpy(self, a: f64, x: Self) -> Self {
        StateVector::axpy(&self, a, &x)
    }
    fn zero() -> Self {
        StateVector::ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeScheme {
    Rk4,
    WrayRk3,
}

impl TimeScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            TimeScheme::Rk4 => "rk4",
            TimeScheme::WrayRk3 => "wray3",
        }
    }
}

impl fmt::Display for TimeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(TimeScheme::Rk4),
            "wray3" | "wray" | "wray_rk3" | "rk3" => Ok(TimeScheme::WrayRk3),
            other => Err(format!("unknown integrator '{other}'; valid names: rk4, wray3")),
        }
    }
}

fn resize<T: Axpy>(v: &mut Vec<T>, n: usize) {
    if v.len() != n {
        v.clear();
        v.resize(n, T::zero());
    }
}

/// Classical four-stage Runge-Kutta with reusable stage storage.
#[derive(Debug, Clone, Default)]
pub struct Rk4<T> {
    acc: Vec<T>,
    stage: Vec<T>,
    k: Vec<T>,
}

impl<T: Axpy> Rk4<T> {
    pub fn new() -> Self {
        Self {
            acc: Vec::new(),
            stage: Vec::new(),
            k: Vec::new(),
        }
    }

    pub fn step<F, Err>(&mut self, u: &mut [T], dt: f64, mut rhs: F) -> Result<(), Err>
    where
        F: FnMut(&[T], &mut [T]) -> Result<(), Err>,
    {
        let n = u.len();
        resize(&mut self.acc, n);
        resize(&mut self.stage, n);
        resize(&mut self.k, n);
        let weights = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0];
        let offsets = [0.5 * dt, 0.5 * dt, dt];

        rhs(u, &mut self.k)?;
        combine(&mut self.acc, u, weights[0], &self.k);
        combine(&mut self.stage, u, offsets[0], &self.k);
        for s in 1..4 {
            rhs(&self.stage, &mut self.k)?;
            accumulate(&mut self.acc, weights[s], &self.k);
            if s < 3 {
                combine(&mut self.stage, u, offsets[s], &self.k);
            }
        }
        u.par_iter_mut().zip(&self.acc).for_each(|(x, a)| *x = *a);
        Ok(())
    }
}

/// Wray's three-stage low-storage scheme.
#[derive(Debug, Clone, Default)]
pub struct WrayRk3<T> {
    previous: Vec<T>,
    k: Vec<T>,
}

impl<T: Axpy> WrayRk3<T> {
    pub const GAMMA: [f64; 3] = [8.0 / 15.0, 5.0 / 12.0, 3.0 / 4.0];
    pub const ZETA: [f64; 3] = [0.0, -17.0 / 60.0, -5.0 / 12.0];

    pub fn new() -> Self {
        Self {
            previous: Vec::new(),
            k: Vec::new(),
        }
    }

    pub fn step<F, Err>(&mut self, u: &mut [T], dt: f64, mut rhs: F) -> Result<(), Err>
    where
        F: FnMut(&[T], &mut [T]) -> Result<(), Err>,
    {
        let n = u.len();
        resize(&mut self.previous, n);
        resize(&mut self.k, n);
        for s in 0..3 {
            rhs(u, &mut self.k)?;
            let (g, z) = (Self::GAMMA[s] * dt, Self::ZETA[s] * dt);
            u.par_iter_mut()
                .zip(self.k.par_iter())
                .zip(self.previous.par_iter_mut())
                .for_each(|((x, k), p)| {
                    *x = if s == 0 { x.axpy(g, *k) } else { x.axpy(g, *k).axpy(z, *p) };
                    *p = *k;
                });
        }
        Ok(())
    }
}

/// `out = u + a k`
fn combine<T: Axpy>(out: &mut [T], u: &[T], a: f64, k: &[T]) {
    out.par_iter_mut()
        .zip(u.par_iter().zip(k.par_iter()))
        .for_each(|(o, (x, y))| *o = x.axpy(a, *y));
}

/// `out += a k`
fn accumulate<T: Axpy>(out: &mut [T], a: f64, k: &[T]) {
    out.par_iter_mut()
        .zip(k.par_iter())
        .for_each(|(o, y)| *o = o.axpy(a, *y));
}

/// One classical Runge-Kutta step with freshly allocated storage.
pub fn rk4_step<T: Axpy, F, Err>(u: &mut [T], rhs: F, dt: f64) -> Result<(), Err>
where
    F: FnMut(&[T], &mut [T]) -> Result<(), Err>,
{
    Rk4::new().step(u, dt, rhs)
}

/// One Wray step with freshly allocated storage.
pub fn wray_rk3_step<T: Axpy, F, Err>(u: &mut [T], rhs: F, dt: f64) -> Result<(), Err>
where
    F: FnMut(&[T], &mut [T]) -> Result<(), Err>,
{
    WrayRk3::new().step(u, dt, rhs)
}
