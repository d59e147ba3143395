//! Hybrid reflecting-surface state.
//!
//! Element `n` applies the coefficient `phi_n = a_n exp(j alpha_n)`. Passive
//! elements are phase-only (`a_n = 1` always); active elements also control
//! their amplitude. The diagonal reflection matrix splits as
//! `Phi = Phi_a + Phi_p` with `Phi_a` supported on the active set and `Phi_p`
//! on the passive set.

use nalgebra::DVector;
use num_complex::Complex64;

use super::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct HybridRisState {
    phases: Vec<f64>,
    amplitudes: Vec<f64>,
    active: Vec<usize>,
    passive: Vec<usize>,
    is_active: Vec<bool>,
}

impl HybridRisState {
    /// Builds a state with the given active set; all phases zero and all
    /// amplitudes one.
    pub fn new(n: usize, active_set: &[usize]) -> Result<Self, ModelError> {
        let mut is_active = vec![false; n];
        for &i in active_set {
            if i >= n {
                return Err(ModelError::Parameter(format!(
                    "active index {i} out of range for {n} elements"
                )));
            }
            if is_active[i] {
                return Err(ModelError::Parameter(format!("duplicate active index {i}")));
            }
            is_active[i] = true;
        }
        let mut active: Vec<usize> = active_set.to_vec();
        active.sort_unstable();
        let passive = (0..n).filter(|i| !is_active[*i]).collect();
        Ok(Self {
            phases: vec![0.0; n],
            amplitudes: vec![1.0; n],
            active,
            passive,
            is_active,
        })
    }

    /// First `na` elements active, the rest passive.
    pub fn with_leading_active(n: usize, na: usize) -> Result<Self, ModelError> {
        if na > n {
            return Err(ModelError::Parameter(format!("Na = {na} exceeds N = {n}")));
        }
        let active: Vec<usize> = (0..na).collect();
        Self::new(n, &active)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn active_set(&self) -> &[usize] {
        &self.active
    }

    pub fn passive_set(&self) -> &[usize] {
        &self.passive
    }

    pub fn is_active(&self, n: usize) -> bool {
        self.is_active[n]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn set_phase(&mut self, n: usize, alpha: f64) {
        self.phases[n] = alpha.rem_euclid(2.0 * std::f64::consts::PI);
    }

    /// Sets the amplitude of an active element. Panics on passive indices:
    /// their amplitude is pinned to one.
    pub fn set_active_amplitude(&mut self, n: usize, a: f64) {
        assert!(self.is_active[n], "element {n} is passive (unit modulus)");
        assert!(a >= 0.0, "amplitude must be non-negative");
        self.amplitudes[n] = a;
    }

    /// Amplitudes over the active set, in active-set order.
    pub fn active_amplitudes(&self) -> Vec<f64> {
        self.active.iter().map(|&n| self.amplitudes[n]).collect()
    }

    pub fn coefficient(&self, n: usize) -> Complex64 {
        Complex64::from_polar(self.amplitudes[n], self.phases[n])
    }

    /// Diagonal of the full reflection matrix.
    pub fn diag(&self) -> DVector<Complex64> {
        DVector::from_fn(self.len(), |n, _| self.coefficient(n))
    }

    /// Diagonal of the active part (zero at passive indices).
    pub fn diag_active(&self) -> DVector<Complex64> {
        DVector::from_fn(self.len(), |n, _| {
            if self.is_active[n] {
                self.coefficient(n)
            } else {
                Complex64::ZERO
            }
        })
    }

    /// Diagonal of the passive part (zero at active indices).
    pub fn diag_passive(&self) -> DVector<Complex64> {
        DVector::from_fn(self.len(), |n, _| {
            if self.is_active[n] {
                Complex64::ZERO
            } else {
                self.coefficient(n)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_all_elements_once() {
        let s = HybridRisState::new(6, &[1, 4]).unwrap();
        assert_eq!(s.active_set(), &[1, 4]);
        assert_eq!(s.passive_set(), &[0, 2, 3, 5]);
        let full = s.diag();
        let sum = s.diag_active() + s.diag_passive();
        assert_eq!(full, sum);
    }

    #[test]
    fn passive_elements_keep_unit_modulus() {
        let mut s = HybridRisState::with_leading_active(4, 2).unwrap();
        s.set_phase(3, 1.0);
        assert!((s.coefficient(3).norm() - 1.0).abs() < 1e-15);
        s.set_active_amplitude(0, 2.5);
        assert!((s.coefficient(0).norm() - 2.5).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "passive")]
    fn amplitude_on_passive_element_panics() {
        let mut s = HybridRisState::with_leading_active(4, 1).unwrap();
        s.set_active_amplitude(2, 0.5);
    }

    #[test]
    fn rejects_out_of_range_active_index() {
        assert!(HybridRisState::new(4, &[4]).is_err());
        assert!(HybridRisState::new(4, &[1, 1]).is_err());
    }
}
