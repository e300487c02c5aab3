use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr};
use crate::C64;

pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-12;

/// Pure state of the two cavity modes on `{|m,n⟩ : m, n ≤ n_max}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoModeState {
    n_max: usize,
    /// Row-major `c[m][n]`.
    amps: Vec<C64>,
    tail_mass: f64,
    tail_threshold: f64,
    raw_norm_sqr: f64,
}

impl TwoModeState {
    /// Wraps amplitudes, normalizes them and records the boundary tail mass.
    pub fn new(n_max: usize, mut amps: Vec<C64>, tail_threshold: f64) -> Self {
        let d = n_max + 1;
        assert_eq!(amps.len(), d * d, "amplitude count does not match truncation");
        let norm = norm_sqr(&amps).sqrt();
        if norm > 0.0 {
            for a in &mut amps {
                *a /= norm;
            }
        }
        let tail_mass = (0..d)
            .flat_map(|m| (0..d).map(move |n| (m, n)))
            .filter(|&(m, n)| m == n_max || n == n_max)
            .map(|(m, n)| amps[m * d + n].norm_sqr())
            .sum();
        Self {
            n_max,
            amps,
            tail_mass,
            tail_threshold,
            raw_norm_sqr: norm * norm,
        }
    }

    pub fn vacuum(n_max: usize) -> Self {
        let d = n_max + 1;
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        amps[0] = C64::new(1.0, 0.0);
        Self::new(n_max, amps, DEFAULT_TAIL_THRESHOLD)
    }

    /// `|n,n⟩`
    pub fn pair(n_max: usize, n: usize) -> Self {
        assert!(n <= n_max);
        let d = n_max + 1;
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        amps[n * d + n] = C64::new(1.0, 0.0);
        Self::new(n_max, amps, DEFAULT_TAIL_THRESHOLD)
    }

    pub(crate) fn with_tail_mass(mut self, tail: f64) -> Self {
        self.tail_mass = tail;
        self
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amp(&self, m: usize, n: usize) -> C64 {
        let d = self.n_max + 1;
        if m > self.n_max || n > self.n_max {
            C64::new(0.0, 0.0)
        } else {
            self.amps[m * d + n]
        }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Squared norm of the amplitudes as produced, before normalization.
    pub fn raw_norm_sqr(&self) -> f64 {
        self.raw_norm_sqr
    }

    pub fn converged(&self) -> bool {
        self.tail_mass <= self.tail_threshold
    }

    pub fn require_converged(self) -> Result<Self> {
        if self.converged() {
            Ok(self)
        } else {
            Err(Error::Unconverged {
                tail: self.tail_mass,
                threshold: self.tail_threshold,
            })
        }
    }

    /// Total probability on states with unequal photon numbers.
    pub fn off_pair_mass(&self) -> f64 {
        let d = self.n_max + 1;
        (0..d)
            .flat_map(|m| (0..d).map(move |n| (m, n)))
            .filter(|&(m, n)| m != n)
            .map(|(m, n)| self.amps[m * d + n].norm_sqr())
            .sum()
    }

    /// `⟨n₁ − n₂⟩`
    pub fn number_difference(&self) -> f64 {
        let d = self.n_max + 1;
        let mut acc = 0.0;
        for m in 0..d {
            for n in 0..d {
                acc += (m as f64 - n as f64) * self.amps[m * d + n].norm_sqr();
            }
        }
        acc
    }

    fn padded(&self, n_max: usize) -> Vec<C64> {
        let d = n_max + 1;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for m in 0..=self.n_max.min(n_max) {
            for n in 0..=self.n_max.min(n_max) {
                out[m * d + n] = self.amp(m, n);
            }
        }
        out
    }
}

/// Photon-pair distribution `p_n = |c[n][n]|²`.
pub fn pair_distribution(s: &TwoModeState) -> Vec<f64> {
    let total = s.norm_sqr();
    (0..=s.n_max).map(|n| s.amp(n, n).norm_sqr() / total).collect()
}

/// Entanglement entropy in nats of a pure pair-correlated state.
pub fn entanglement_entropy(s: &TwoModeState) -> f64 {
    pair_distribution(s)
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// `|⟨s1|s2⟩|²`, padding the smaller truncation with zeros.
pub fn fidelity(s1: &TwoModeState, s2: &TwoModeState) -> f64 {
    let n = s1.n_max.max(s2.n_max);
    let (a, b) = (s1.padded(n), s2.padded(n));
    let f = inner(&a, &b).norm_sqr() / (norm_sqr(&a) * norm_sqr(&b));
    f.clamp(0.0, 1.0)
}

/// Pure state of cavity modes `a₁`, `a₂` and the collective mode `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeModeState {
    /// Highest Fock level kept for `a₁`, `a₂`, `b`.
    truncations: [usize; 3],
    /// Row-major `c[m][n][k]`.
    amps: Vec<C64>,
    tail_threshold: f64,
}

impl ThreeModeState {
    pub fn new(truncations: [usize; 3], mut amps: Vec<C64>, tail_threshold: f64) -> Self {
        let len: usize = truncations.iter().map(|t| t + 1).product();
        assert_eq!(amps.len(), len, "amplitude count does not match truncations");
        let norm = norm_sqr(&amps).sqrt();
        if norm > 0.0 {
            for a in &mut amps {
                *a /= norm;
            }
        }
        Self {
            truncations,
            amps,
            tail_threshold,
        }
    }

    pub fn vacuum(truncations: [usize; 3]) -> Self {
        let len: usize = truncations.iter().map(|t| t + 1).product();
        let mut amps = vec![C64::new(0.0, 0.0); len];
        amps[0] = C64::new(1.0, 0.0);
        Self::new(truncations, amps, DEFAULT_TAIL_THRESHOLD)
    }

    pub fn truncations(&self) -> [usize; 3] {
        self.truncations
    }

    pub(crate) fn index(truncations: [usize; 3], m: usize, n: usize, k: usize) -> usize {
        let [_, t2, tb] = truncations;
        (m * (t2 + 1) + n) * (tb + 1) + k
    }

    pub fn amp(&self, m: usize, n: usize, k: usize) -> C64 {
        self.amps[Self::index(self.truncations, m, n, k)]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    fn levels(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let [t1, t2, tb] = self.truncations;
        (0..=t1).flat_map(move |m| (0..=t2).flat_map(move |n| (0..=tb).map(move |k| (m, n, k))))
    }

    /// Probability at the truncation boundary of each mode.
    pub fn tail_masses(&self) -> [f64; 3] {
        let mut tails = [0.0; 3];
        for (m, n, k) in self.levels() {
            let p = self.amp(m, n, k).norm_sqr();
            for (slot, (level, top)) in tails
                .iter_mut()
                .zip([m, n, k].into_iter().zip(self.truncations))
            {
                if level == top {
                    *slot += p;
                }
            }
        }
        tails
    }

    pub fn converged(&self) -> bool {
        self.tail_masses().iter().all(|&t| t <= self.tail_threshold)
    }

    pub fn require_converged(self) -> Result<Self> {
        let worst = self.tail_masses().into_iter().fold(0.0, f64::max);
        if worst <= self.tail_threshold {
            Ok(self)
        } else {
            Err(Error::Unconverged {
                tail: worst,
                threshold: self.tail_threshold,
            })
        }
    }

    /// Mean and variance of `n_b + n₁ − n₂`.
    pub fn charge_moments(&self) -> (f64, f64) {
        let mut mean = 0.0;
        let mut second = 0.0;
        for (m, n, k) in self.levels() {
            let q = k as f64 + m as f64 - n as f64;
            let p = self.amp(m, n, k).norm_sqr();
            mean += q * p;
            second += q * q * p;
        }
        (mean, second - mean * mean)
    }

    /// `⟨n_b⟩`
    pub fn collective_occupation(&self) -> f64 {
        self.levels()
            .map(|(m, n, k)| k as f64 * self.amp(m, n, k).norm_sqr())
            .sum()
    }
}

/// Density operator of the two cavity modes, row-major over `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    n_max: [usize; 2],
    rho: Vec<C64>,
}

impl ReducedState {
    fn dim(&self) -> usize {
        (self.n_max[0] + 1) * (self.n_max[1] + 1)
    }

    pub fn element(&self, row: (usize, usize), col: (usize, usize)) -> C64 {
        let d2 = self.n_max[1] + 1;
        self.rho[(row.0 * d2 + row.1) * self.dim() + col.0 * d2 + col.1]
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.rho[i * d + i].re).sum()
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩`, which is the Uhlmann fidelity when one side is pure.
    pub fn fidelity_with(&self, psi: &TwoModeState) -> f64 {
        let d = self.dim();
        let d2 = self.n_max[1] + 1;
        let coef = |i: usize| psi.amp(i / d2, i % d2);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            let ci = coef(i).conj();
            if ci == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                acc += ci * self.rho[i * d + j] * coef(j);
            }
        }
        (acc.re / psi.norm_sqr()).clamp(0.0, 1.0)
    }
}

/// Partial trace over the collective mode.
pub fn reduce_to_two_modes(s: &ThreeModeState) -> ReducedState {
    let [t1, t2, tb] = s.truncations;
    let d2 = t2 + 1;
    let d = (t1 + 1) * d2;
    let mut rho = vec![C64::new(0.0, 0.0); d * d];
    let norm = s.norm_sqr();
    for i in 0..d {
        let (m, n) = (i / d2, i % d2);
        for j in 0..d {
            let (mp, np) = (j / d2, j % d2);
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..=tb {
                acc += s.amp(m, n, k) * s.amp(mp, np, k).conj();
            }
            rho[i * d + j] = acc / norm;
        }
    }
    ReducedState {
        n_max: [t1, t2],
        rho,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(n_max: usize, r: C64) -> TwoModeState {
        let d = n_max + 1;
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        for n in 0..d {
            amps[n * d + n] = r.powu(n as u32);
        }
        TwoModeState::new(n_max, amps, DEFAULT_TAIL_THRESHOLD)
    }

    #[test]
    fn fidelity_basics() {
        let a = TwoModeState::vacuum(3);
        let b = TwoModeState::pair(3, 1);
        assert_eq!(fidelity(&a, &a), 1.0);
        assert_eq!(fidelity(&a, &b), 0.0);
        // padding
        assert!((fidelity(&TwoModeState::vacuum(2), &TwoModeState::vacuum(7)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_pair_distribution() {
        let s = geometric(80, C64::new(0.0, 0.5));
        let p = pair_distribution(&s);
        for (n, &pn) in p.iter().enumerate().take(20) {
            assert!((pn - 0.75 * 0.25f64.powi(n as i32)).abs() < 1e-14);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mean: f64 = p.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();
        assert!((mean - 0.25 / 0.75).abs() < 1e-12);
    }

    #[test]
    fn entropy_vacuum_and_monotone() {
        assert_eq!(entanglement_entropy(&TwoModeState::vacuum(5)), 0.0);
        // brute force over a |Γ| grid, compared with the closed form for a
        // geometric distribution
        let mut prev = -1.0;
        for i in 1..60 {
            let r = i as f64 / 64.0;
            let s = geometric(400, C64::new(r, 0.0));
            let h = entanglement_entropy(&s);
            let x = r * r;
            let exact = -(1.0 - x).ln() - x * x.ln() / (1.0 - x);
            assert!((h - exact).abs() < 1e-9, "r={r}: {h} vs {exact}");
            assert!(h > prev);
            prev = h;
        }
        let tiny = entanglement_entropy(&geometric(10, C64::new(1e-6, 0.0)));
        assert!(tiny < 1e-9);
    }

    #[test]
    fn tail_and_flags() {
        let s = geometric(5, C64::new(0.9, 0.0));
        assert!(!s.converged());
        assert!(matches!(s.clone().require_converged(), Err(Error::Unconverged { .. })));
        assert!(s.tail_mass() > 0.0);
        assert_eq!(TwoModeState::vacuum(4).off_pair_mass(), 0.0);
        assert_eq!(TwoModeState::pair(4, 2).number_difference(), 0.0);
    }

    #[test]
    fn reduce_vacuum_is_pure_vacuum() {
        let s = ThreeModeState::vacuum([3, 3, 2]);
        let r = reduce_to_two_modes(&s);
        assert!((r.trace() - 1.0).abs() < 1e-15);
        assert!((r.purity() - 1.0).abs() < 1e-15);
        assert!((r.fidelity_with(&TwoModeState::vacuum(3)) - 1.0).abs() < 1e-15);
        assert_eq!(s.charge_moments(), (0.0, 0.0));
    }

    #[test]
    fn reduction_ignores_collective_phases() {
        // (|0,0⟩ + |1,1⟩)/√2 ⊗ (|0⟩ + e^{iφ}|1⟩)/√2 for two phases
        let t = [1, 1, 1];
        let build = |phi: f64| {
            let mut amps = vec![C64::new(0.0, 0.0); 8];
            for (m, n) in [(0, 0), (1, 1)] {
                amps[ThreeModeState::index(t, m, n, 0)] = C64::new(1.0, 0.0);
                amps[ThreeModeState::index(t, m, n, 1)] = C64::from_polar(1.0, phi);
            }
            reduce_to_two_modes(&ThreeModeState::new(t, amps, 1.0))
        };
        let (a, b) = (build(0.0), build(2.1));
        for (x, y) in a.rho.iter().zip(&b.rho) {
            assert!((x - y).norm() < 1e-15);
        }
        assert!((a.trace() - 1.0).abs() < 1e-15);
        assert!((a.element((1, 1), (0, 0)).re - 0.5).abs() < 1e-15);
    }
}
