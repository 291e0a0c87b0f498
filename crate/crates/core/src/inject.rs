//! Fault sites, phase-shift grids, faulty-circuit construction and campaign
//! plans.
//!
//! A fault is a `U(θ, φ, 0)` gate inserted right after a gate of the
//! transpiled circuit. The shift grid steps both angles by 15°: θ over
//! `[0, π]` (13 values) and φ over `[0, 2π)` (24 values), 312 shifts per
//! site.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::circuit::{Circuit, GateOp};
use crate::error::{Error, Result};
use crate::sim::NoiseModel;
use crate::transpile::{neighbors_of, TranspiledCircuit};

/// Angular resolution of the finest grid: 15°.
pub const GRID_STEP: f64 = PI / 12.0;
/// θ values on the 15° grid.
pub const THETA_POINTS: usize = 13;
/// φ values on the 15° grid.
pub const PHI_POINTS: usize = 24;

const GRID_TOL: f64 = 1e-9;

/// Injected phase shift; λ is always 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShift {
    pub theta: f64,
    pub phi: f64,
}

impl PhaseShift {
    pub const ZERO: PhaseShift = PhaseShift { theta: 0.0, phi: 0.0 };

    /// Shift at 15°-grid indices `(theta_index, phi_index)`.
    pub fn on_grid(theta_index: usize, phi_index: usize) -> Self {
        PhaseShift { theta: theta_index as f64 * GRID_STEP, phi: phi_index as f64 * GRID_STEP }
    }

    /// 15°-grid indices, if the shift lies on the grid.
    pub fn grid_index(&self) -> Option<(usize, usize)> {
        let snap = |x: f64, points: usize| {
            let k = libm::round(x / GRID_STEP);
            ((x - k * GRID_STEP).abs() <= GRID_TOL && k >= 0.0 && (k as usize) < points).then_some(k as usize)
        };
        Some((snap(self.theta, THETA_POINTS)?, snap(self.phi, PHI_POINTS)?))
    }

    /// True when both angles are at most those of `other`.
    pub fn within(&self, other: &PhaseShift) -> bool {
        self.theta <= other.theta + GRID_TOL && self.phi <= other.phi + GRID_TOL
    }
}

/// Shift grid with a step that is a multiple of 15° dividing 180°, so both
/// θ endpoints and φ = 0 are always included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngleGrid {
    /// Step in units of 15°.
    stride: usize,
}

impl AngleGrid {
    pub const FINE: AngleGrid = AngleGrid { stride: 1 };

    pub fn from_degrees(step: u32) -> Result<Self> {
        if step == 0 || !step.is_multiple_of(15) || !180u32.is_multiple_of(step) {
            return Err(Error::invalid(format!(
                "grid step {step}° must be a multiple of 15° that divides 180°"
            )));
        }
        Ok(AngleGrid { stride: (step / 15) as usize })
    }

    pub fn step_degrees(&self) -> u32 {
        self.stride as u32 * 15
    }

    fn theta_indices(&self) -> impl Iterator<Item = usize> {
        (0..THETA_POINTS).step_by(self.stride)
    }

    fn phi_indices(&self) -> impl Iterator<Item = usize> {
        (0..PHI_POINTS).step_by(self.stride)
    }

    /// Number of shifts on this grid.
    pub fn len(&self) -> usize {
        self.theta_indices().count() * self.phi_indices().count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All shifts, θ-major.
    pub fn shifts(&self) -> Vec<PhaseShift> {
        let phis: Vec<usize> = self.phi_indices().collect();
        self.theta_indices().flat_map(|t| phis.iter().map(move |&p| PhaseShift::on_grid(t, p))).collect()
    }

    pub fn contains(&self, shift: &PhaseShift) -> bool {
        shift.grid_index().is_some_and(|(t, p)| t % self.stride == 0 && p % self.stride == 0)
    }

    /// Grid shifts with θ1 ≤ θ0 and φ1 ≤ φ0, including (0, 0) and `first`.
    pub fn double_shifts(&self, first: &PhaseShift) -> Result<Vec<PhaseShift>> {
        if !self.contains(first) {
            return Err(Error::invalid(format!(
                "first shift (θ={}, φ={}) is not on the {}° grid",
                first.theta,
                first.phi,
                self.step_degrees()
            )));
        }
        let (t0, p0) = first.grid_index().expect("on grid");
        let phis: Vec<usize> = self.phi_indices().filter(|&p| p <= p0).collect();
        Ok(self
            .theta_indices()
            .filter(|&t| t <= t0)
            .flat_map(|t| phis.iter().map(move |&p| PhaseShift::on_grid(t, p)))
            .collect())
    }

    fn double_count(&self, first: &PhaseShift) -> usize {
        let (t0, p0) = first.grid_index().expect("on grid");
        self.theta_indices().filter(|&t| t <= t0).count() * self.phi_indices().filter(|&p| p <= p0).count()
    }
}

impl Default for AngleGrid {
    fn default() -> Self {
        AngleGrid::FINE
    }
}

/// The full 15° sweep: 312 shifts, θ-major.
pub fn enumerate_angles() -> Vec<PhaseShift> {
    AngleGrid::FINE.shifts()
}

/// Second-fault shifts for `first` on the 15° grid.
pub fn enumerate_double(first: &PhaseShift) -> Result<Vec<PhaseShift>> {
    AngleGrid::FINE.double_shifts(first)
}

/// Position right after op `op_index`, acting on logical `qubit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaultSite {
    pub op_index: usize,
    pub qubit: usize,
}

/// Correlated fault on a neighbor of the first fault's qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFault {
    pub qubit: usize,
    pub shift: PhaseShift,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultSpec {
    pub site: FaultSite,
    pub shift: PhaseShift,
    pub second: Option<SecondFault>,
}

impl FaultSpec {
    pub fn single(site: FaultSite, shift: PhaseShift) -> Self {
        FaultSpec { site, shift, second: None }
    }
}

/// One site per (unitary op, operand) in circuit order. Ops on idle device
/// qubits are skipped so every site names a circuit qubit.
pub fn enumerate_sites(t: &TranspiledCircuit) -> Vec<FaultSite> {
    let mut sites = Vec::new();
    for (op_index, op) in t.circuit.ops().iter().enumerate() {
        if !op.is_injectable() {
            continue;
        }
        for qubit in t.logical_operands(op_index) {
            if qubit < t.n_logical {
                sites.push(FaultSite { op_index, qubit });
            }
        }
    }
    sites
}

fn check_site(t: &TranspiledCircuit, site: &FaultSite) -> Result<usize> {
    let op = t
        .circuit
        .ops()
        .get(site.op_index)
        .ok_or_else(|| Error::invalid(format!("site op index {} out of range", site.op_index)))?;
    if !op.is_injectable() {
        return Err(Error::invalid(format!("op {} ({}) is not an injection site", site.op_index, op.kind.name())));
    }
    let layout = t.layout_at(site.op_index);
    if site.qubit >= t.n_logical || !op.qubits.contains(&layout.physical(site.qubit)) {
        return Err(Error::invalid(format!("qubit {} is not an operand of op {}", site.qubit, site.op_index)));
    }
    Ok(layout.physical(site.qubit))
}

/// Copy of the transpiled circuit with the injector(s) of `spec` inserted
/// right after the site op; a second fault goes right after the first
/// injector.
pub fn build_faulty_circuit(t: &TranspiledCircuit, spec: &FaultSpec) -> Result<Circuit> {
    let physical = check_site(t, &spec.site)?;
    let mut faulty = t.circuit.clone();
    faulty.insert(spec.site.op_index + 1, GateOp::injector(physical, spec.shift.theta, spec.shift.phi)?)?;
    if let Some(second) = &spec.second {
        if second.qubit == spec.site.qubit {
            return Err(Error::invalid("second fault must target a different qubit"));
        }
        if !neighbors_of(t, &t.coupling, spec.site.qubit).contains(&second.qubit) {
            return Err(Error::invalid(format!(
                "qubit {} is not a neighbor of qubit {}",
                second.qubit, spec.site.qubit
            )));
        }
        if !second.shift.within(&spec.shift) {
            return Err(Error::invalid("second shift must not exceed the first in θ or φ"));
        }
        let p2 = t.layout_at(spec.site.op_index).physical(second.qubit);
        faulty.insert(spec.site.op_index + 2, GateOp::injector(p2, second.shift.theta, second.shift.phi)?)?;
    }
    Ok(faulty)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Double,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Double => "double",
        }
    }
}

/// How each faulty circuit is executed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Execution {
    /// Exact noiseless distribution.
    Exact,
    /// Trajectory sampling with `shots` executions per fault.
    Sampled { shots: u64, noise: NoiseModel },
}

impl Execution {
    pub fn shots(&self) -> u64 {
        match self {
            Execution::Exact => 0,
            Execution::Sampled { shots, .. } => *shots,
        }
    }
}

/// Ordered, duplicate-free list of faults with deterministic per-fault seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignPlan {
    pub circuit_id: String,
    pub mode: Mode,
    pub grid: AngleGrid,
    pub execution: Execution,
    pub base_seed: u64,
    pub specs: Vec<FaultSpec>,
}

impl CampaignPlan {
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn seed_for(&self, index: usize) -> u64 {
        derive_seed(self.base_seed, index as u64)
    }
}

/// Bijective in `index` for a fixed base: an odd-multiplier offset followed
/// by the SplitMix64 finalizer.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Number of specs [`plan_campaign`] would produce, without building them.
pub fn plan_size(t: &TranspiledCircuit, mode: Mode, grid: &AngleGrid) -> Result<usize> {
    let sites = enumerate_sites(t);
    match mode {
        Mode::Single => Ok(sites.len() * grid.len()),
        Mode::Double => {
            require_neighbors(t)?;
            let per_neighbor: usize = grid.shifts().iter().map(|s| grid.double_count(s)).sum();
            Ok(sites.iter().map(|s| neighbors_of(t, &t.coupling, s.qubit).len() * per_neighbor).sum())
        }
    }
}

fn require_neighbors(t: &TranspiledCircuit) -> Result<()> {
    if crate::transpile::neighbor_pairs(t, &t.coupling).is_empty() {
        return Err(Error::configuration("double-fault campaign needs at least one pair of neighboring qubits"));
    }
    Ok(())
}

/// Builds the fault list. Single mode: every site × every grid shift.
/// Double mode: every site × first shift × neighbor of the site qubit ×
/// smaller-or-equal second shift.
pub fn plan_campaign(
    t: &TranspiledCircuit,
    mode: Mode,
    grid: AngleGrid,
    execution: Execution,
    base_seed: u64,
) -> Result<CampaignPlan> {
    let sites = enumerate_sites(t);
    let shifts = grid.shifts();
    let mut specs = Vec::new();
    match mode {
        Mode::Single => {
            for &site in &sites {
                specs.extend(shifts.iter().map(|&shift| FaultSpec::single(site, shift)));
            }
        }
        Mode::Double => {
            require_neighbors(t)?;
            for &site in &sites {
                let neighbors = neighbors_of(t, &t.coupling, site.qubit);
                for &shift in &shifts {
                    let seconds = grid.double_shifts(&shift)?;
                    for &qubit in &neighbors {
                        specs.extend(seconds.iter().map(|&s| FaultSpec {
                            site,
                            shift,
                            second: Some(SecondFault { qubit, shift: s }),
                        }));
                    }
                }
            }
        }
    }
    Ok(CampaignPlan { circuit_id: String::from(t.circuit.name()), mode, grid, execution, base_seed, specs })
}
