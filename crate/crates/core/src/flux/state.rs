use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use crate::eos::{EosError, HelmholtzEos, ThermoState};

/// A vector laid out like the conserved variables: `[rho, m_1..m_D, E]`.
///
/// The same layout carries tendencies, fluxes, entropy variables and the
/// kinetic-energy gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector<const D: usize> {
    pub rho: f64,
    pub momentum: [f64; D],
    pub energy: f64,
}

/// Cell-averaged `(rho, m, E)`.
pub type ConservedState<const D: usize> = StateVector<D>;

impl<const D: usize> Default for StateVector<D> {
    fn default() -> Self {
        Self::ZERO
    }
}

impl<const D: usize> StateVector<D> {
    /// Number of components, `D + 2`.
    pub const LEN: usize = D + 2;

    pub const ZERO: Self = Self {
        rho: 0.0,
        momentum: [0.0; D],
        energy: 0.0,
    };

    pub const fn new(rho: f64, momentum: [f64; D], energy: f64) -> Self {
        Self {
            rho,
            momentum,
            energy,
        }
    }

    /// Builds the conserved state from density, velocity and specific
    /// internal energy.
    pub fn from_primitive(rho: f64, velocity: [f64; D], internal_energy: f64) -> Self {
        let momentum = velocity.map(|v| rho * v);
        let v2: f64 = velocity.iter().map(|v| v * v).sum();
        Self::new(rho, momentum, rho * (internal_energy + 0.5 * v2))
    }

    pub fn velocity(&self) -> [f64; D] {
        self.momentum.map(|m| m / self.rho)
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.momentum.iter().map(|m| m * m).sum::<f64>() / self.rho
    }

    /// Specific internal energy `(E - k) / rho`.
    pub fn internal_energy(&self) -> f64 {
        (self.energy - self.kinetic_energy()) / self.rho
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let mut acc = self.rho * other.rho;
        for (a, b) in self.momentum.iter().zip(&other.momentum) {
            acc += a * b;
        }
        acc + self.energy * other.energy
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.rho)
            .chain(self.momentum.iter().copied())
            .chain(std::iter::once(self.energy))
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::new(f(self.rho), self.momentum.map(&mut f), f(self.energy))
    }

    pub fn zip_map(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut momentum = [0.0; D];
        for (k, m) in momentum.iter_mut().enumerate() {
            *m = f(self.momentum[k], other.momentum[k]);
        }
        Self::new(f(self.rho, other.rho), momentum, f(self.energy, other.energy))
    }

    /// `self + s * other`.
    #[inline]
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + s * b)
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl<const D: usize> Index<usize> for StateVector<D> {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        match k {
            0 => &self.rho,
            k if k <= D => &self.momentum[k - 1],
            k if k == D + 1 => &self.energy,
            _ => panic!("component {k} out of range for dimension {D}"),
        }
    }
}

impl<const D: usize> IndexMut<usize> for StateVector<D> {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        match k {
            0 => &mut self.rho,
            k if k <= D => &mut self.momentum[k - 1],
            k if k == D + 1 => &mut self.energy,
            _ => panic!("component {k} out of range for dimension {D}"),
        }
    }
}

impl<const D: usize> Add for StateVector<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_map(&rhs, |a, b| a + b)
    }
}

impl<const D: usize> Sub for StateVector<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_map(&rhs, |a, b| a - b)
    }
}

impl<const D: usize> Mul<StateVector<D>> for f64 {
    type Output = StateVector<D>;
    fn mul(self, rhs: StateVector<D>) -> StateVector<D> {
        rhs.map(|x| self * x)
    }
}

impl<const D: usize> AddAssign for StateVector<D> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Numerical or physical flux through faces normal to `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxVector<const D: usize> {
    pub axis: usize,
    pub value: StateVector<D>,
}

/// Everything the two-point fluxes need from one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitives<const D: usize> {
    pub rho: f64,
    pub velocity: [f64; D],
    pub temperature: f64,
    pub beta: f64,
    pub pressure: f64,
    /// Specific internal energy.
    pub internal_energy: f64,
    /// Specific Gibbs energy.
    pub gibbs: f64,
    /// Specific entropy.
    pub entropy: f64,
}

impl<const D: usize> Default for Primitives<D> {
    fn default() -> Self {
        Self {
            rho: 0.0,
            velocity: [0.0; D],
            temperature: 0.0,
            beta: 0.0,
            pressure: 0.0,
            internal_energy: 0.0,
            gibbs: 0.0,
            entropy: 0.0,
        }
    }
}

impl<const D: usize> Primitives<D> {
    pub fn from_thermo<E: HelmholtzEos + ?Sized>(
        eos: &E,
        state: ThermoState,
        velocity: [f64; D],
    ) -> Result<Self, EosError> {
        let d = eos.derivatives(state)?;
        Ok(Self {
            rho: state.rho,
            velocity,
            temperature: state.temperature,
            beta: state.beta(),
            pressure: d.pressure(state),
            internal_energy: d.internal_energy(state),
            gibbs: d.gibbs(state),
            entropy: d.entropy(),
        })
    }

    /// Recovers the primitives of `u`, warm-starting the temperature solve
    /// with `guess`.
    pub fn from_conserved<E: HelmholtzEos + ?Sized>(
        eos: &E,
        u: &ConservedState<D>,
        guess: Option<f64>,
    ) -> Result<Self, EosError> {
        let thermo = crate::eos::conserved_to_thermo(eos, u, guess)?;
        Self::from_thermo(eos, thermo, u.velocity())
    }

    pub fn thermo(&self) -> ThermoState {
        ThermoState::new(self.rho, self.temperature)
    }

    pub fn speed_squared(&self) -> f64 {
        self.velocity.iter().map(|v| v * v).sum()
    }

    pub fn conserved(&self) -> ConservedState<D> {
        ConservedState::from_primitive(self.rho, self.velocity, self.internal_energy)
    }

    #[inline]
    pub fn p_beta(&self) -> f64 {
        self.pressure * self.beta
    }

    #[inline]
    pub fn g_beta(&self) -> f64 {
        self.gibbs * self.beta
    }

    /// Entropy density `s = -rho sigma`.
    pub fn entropy_density(&self) -> f64 {
        -self.rho * self.entropy
    }

    pub fn kinetic_energy_density(&self) -> f64 {
        0.5 * self.rho * self.speed_squared()
    }

    /// Gradient of `s` with respect to the conserved variables.
    pub fn entropy_variables(&self) -> StateVector<D> {
        StateVector::new(
            (self.gibbs - 0.5 * self.speed_squared()) * self.beta,
            self.velocity.map(|v| v * self.beta),
            -self.beta,
        )
    }

    /// Gradient of `k` with respect to the conserved variables.
    pub fn ke_gradient(&self) -> StateVector<D> {
        StateVector::new(-0.5 * self.speed_squared(), self.velocity, 0.0)
    }
}

/// Arithmetic mean and jump of a two-point quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPair {
    pub left: f64,
    pub right: f64,
}

impl MeanPair {
    pub const fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }

    #[inline]
    pub fn bar(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.right - self.left
    }

    pub fn swap(&self) -> Self {
        Self::new(self.right, self.left)
    }

    pub fn product(&self, other: &Self) -> Self {
        Self::new(self.left * other.left, self.right * other.right)
    }
}

/// Arithmetic mean of two vectors.
#[inline]
pub fn mean<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    let mut out = [0.0; D];
    for k in 0..D {
        out[k] = 0.5 * (a[k] + b[k]);
    }
    out
}
