//! Pauli-frame simulation of the Surface-17 memory experiment.
//!
//! The ideal circuit from |0..0> is Clifford, and with the X-stabilizer
//! sign gauge fixed to +1 every ideal ancilla readout is 0.  An actual
//! noisy run then needs only the Pauli frame: X and Z flip masks
//! relative to the ideal state, conjugated through each gate and XORed
//! with channel draws.  A readout returns the ancilla's x-frame bit
//! (plus a possible misreport), measurement clears the ancilla's
//! z-frame bit (projection destroys phase) and keeps the x-frame bit
//! (qubits are reused without reset).
//!
//! Readouts accumulate without reset, so the syndrome is the first
//! difference of readouts, s_i(t) = m_i(t) xor m_i(t-1), and the
//! decoder input is the second difference, ds_i(t) = s_i(t) xor
//! s_i(t-1).  Consequences worth remembering: a lone misreport at
//! cycle t shows up as ds_i(t) and ds_i(t+2), while an ancilla
//! bit-flip error shows as the consecutive pair ds_i(t), ds_i(t+1).
//!
//! One cycle is the seven scheduled steps.  In a coherent step every
//! qubit first passes through its gate, then independently draws
//! exactly one of {X, Y, Z, nothing} with probabilities p_x, p_y, p_z.
//! In the measurement step the ancillas are read out (each with a p_m
//! misreport chance) and only the data qubits see the channel.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{CodeLayout, Gate, Pauli, StabKind, CYCLE_STEPS, N_DATA, N_QUBITS, N_STABS};
use crate::rng::rng_from_seed;

const DATA_MASK: u32 = (1 << N_DATA) - 1;

/// Per-step Pauli channel and readout misreport probabilities.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct ErrorParams {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub p_m: f64,
}

impl ErrorParams {
    pub fn zero() -> Self {
        ErrorParams {
            p_x: 0.0,
            p_y: 0.0,
            p_z: 0.0,
            p_m: 0.0,
        }
    }

    /// Default study point: p_x = p_y = p_z = 0.048%, p_m = 0.14%,
    /// about 1% physical error per data qubit per cycle.
    pub fn operating_point() -> Self {
        ErrorParams {
            p_x: 4.8e-4,
            p_y: 4.8e-4,
            p_z: 4.8e-4,
            p_m: 1.4e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [self.p_x, self.p_y, self.p_z, self.p_m];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p) || !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "error probabilities must lie in [0, 1]: {self:?}"
            )));
        }
        if self.p_x + self.p_y + self.p_z > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "p_x + p_y + p_z must not exceed 1: {self:?}"
            )));
        }
        Ok(())
    }

    /// Probability that a step produces a net Y, with X and Z errors
    /// drawn independently: p_y(1-p_x)(1-p_z) + p_x p_z(1-p_y).  With
    /// p_y = 0 this is the (small) residual rate of coincident X and Z
    /// rather than zero: p_y controls the X-Z correlation.
    pub fn y_error_prob(&self) -> f64 {
        self.p_y * (1.0 - self.p_x) * (1.0 - self.p_z)
            + self.p_x * self.p_z * (1.0 - self.p_y)
    }
}

/// X/Z flip masks over the 17 qubits, relative to the ideal state.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct PauliFrame {
    pub x: u32,
    pub z: u32,
}

impl PauliFrame {
    pub fn apply(&mut self, qubit: usize, pauli: Pauli) {
        let m = 1u32 << qubit;
        match pauli {
            Pauli::I => {}
            Pauli::X => self.x ^= m,
            Pauli::Z => self.z ^= m,
            Pauli::Y => {
                self.x ^= m;
                self.z ^= m;
            }
        }
    }

    pub fn compose(&mut self, other: PauliFrame) {
        self.x ^= other.x;
        self.z ^= other.z;
    }
}

/// Conjugate the frame through one gate: H swaps the x and z bits of
/// its qubit, CNOT copies x from control to target and z from target
/// to control.  Idle and Measure leave the frame alone here.
pub fn apply_gate(frame: &mut PauliFrame, gate: Gate) {
    match gate {
        Gate::H(q) => {
            let m = 1u32 << q;
            let xb = frame.x & m;
            let zb = frame.z & m;
            frame.x = (frame.x & !m) | zb;
            frame.z = (frame.z & !m) | xb;
        }
        Gate::Cnot { control, target } => {
            if frame.x & (1 << control) != 0 {
                frame.x ^= 1 << target;
            }
            if frame.z & (1 << target) != 0 {
                frame.z ^= 1 << control;
            }
        }
        Gate::Idle(_) | Gate::Measure(_) => {}
    }
}

/// One channel pass over `active` qubits: each independently receives
/// exactly one of X (p_x), Y (p_y), Z (p_z) or nothing.  Returns the
/// number of qubits that drew an error.
pub fn step_errors(
    frame: &mut PauliFrame,
    params: &ErrorParams,
    rng: &mut ChaCha8Rng,
    active: &[usize],
) -> u64 {
    let total = params.p_x + params.p_y + params.p_z;
    if total == 0.0 {
        return 0;
    }
    let mut events = 0;
    for &q in active {
        let u: f64 = rng.random();
        if u < params.p_x {
            frame.apply(q, Pauli::X);
        } else if u < params.p_x + params.p_y {
            frame.apply(q, Pauli::Y);
        } else if u < total {
            frame.apply(q, Pauli::Z);
        } else {
            continue;
        }
        events += 1;
    }
    events
}

/// Readouts and their differences for one cycle; bit g of each field
/// is global stabilizer g (X0..X3 = bits 0..3, Z0..Z3 = bits 4..7).
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct CycleRecord {
    /// Raw ancilla readouts m_i(t).
    pub m: u8,
    /// Syndrome s_i(t) = m_i(t) xor m_i(t-1).
    pub s: u8,
    /// Increment ds_i(t) = s_i(t) xor s_i(t-1), the decoder input.
    pub ds: u8,
}

/// Per-cycle virtual final readouts, recorded for test datasets.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PerCycle {
    /// Final-syndrome increment df(t), bits 0..4 = Z0..Z3.
    pub final_increment_z: Vec<u8>,
    /// Parity of data readout flips after cycle t, 0 or 1.
    pub label_z: Vec<u8>,
}

/// Everything a decoder may see from one experiment, plus the label.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SyndromeSequence {
    /// Number of full cycles T.
    pub cycles: usize,
    /// Increment bytes ds(1..=T); bit order as in `CycleRecord`.
    pub increments: Vec<u8>,
    /// df(T) from the destructive data readout, bits 0..4 = Z0..Z3.
    pub final_increment_z: u8,
    /// Parity of all data-qubit readout flips, 0 or 1.
    pub label_z: u8,
    /// Present on test datasets: virtual readouts after every cycle.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_cycle: Option<PerCycle>,
    /// Seed this sequence was generated from.
    pub seed: u64,
}

impl SyndromeSequence {
    /// Increments truncated to the first `t` cycles together with the
    /// cycle-t final increment and label; requires per-cycle records.
    pub fn truncated(&self, t: usize) -> Result<(&[u8], u8, u8)> {
        let pc = self.per_cycle.as_ref().ok_or_else(|| {
            Error::InvalidArgument("per-cycle records required for truncation".into())
        })?;
        if t < 1 || t > self.cycles {
            return Err(Error::InvalidArgument(format!(
                "truncation cycle {t} outside 1..={}",
                self.cycles
            )));
        }
        Ok((
            &self.increments[..t],
            pc.final_increment_z[t - 1],
            pc.label_z[t - 1],
        ))
    }
}

/// Counts of stochastic events in one experiment.
#[derive(Clone, Copy, Default, Debug)]
pub struct SimStats {
    pub data_pauli_events: u64,
    pub ancilla_pauli_events: u64,
    pub misreports: u64,
}

/// Deterministic fault injection for tests: Pauli errors placed
/// between cycles (after the measurement step of `after_cycle`, with 0
/// meaning before the first cycle) or at the end of a specific
/// schedule step, and forced readout misreports.
#[derive(Clone, Copy, Debug)]
pub enum Injection {
    Pauli {
        after_cycle: usize,
        qubit: usize,
        pauli: Pauli,
    },
    /// Applied after the gates and channel draws of `step` (1..=7)
    /// in `cycle`; probes intra-cycle fault propagation.
    PauliAtStep {
        cycle: usize,
        step: usize,
        qubit: usize,
        pauli: Pauli,
    },
    Misreport {
        cycle: usize,
        stab: usize,
    },
}

/// Simulate T cycles plus a destructive z-basis data readout.
pub fn run_experiment(
    layout: &CodeLayout,
    cycles: usize,
    params: &ErrorParams,
    seed: u64,
    record_every_cycle: bool,
) -> Result<SyndromeSequence> {
    run_experiment_with(layout, cycles, params, seed, record_every_cycle, &[])
        .map(|(seq, _)| seq)
}

/// As `run_experiment`, with forced faults and event counters exposed.
pub fn run_experiment_with(
    layout: &CodeLayout,
    cycles: usize,
    params: &ErrorParams,
    seed: u64,
    record_every_cycle: bool,
    injections: &[Injection],
) -> Result<(SyndromeSequence, SimStats)> {
    if cycles < 1 {
        return Err(Error::InvalidArgument("cycle count must be at least 1".into()));
    }
    params.validate()?;
    for inj in injections {
        match *inj {
            Injection::Pauli {
                after_cycle, qubit, ..
            } => {
                if qubit >= N_QUBITS {
                    return Err(Error::InvalidQubit(qubit));
                }
                if after_cycle > cycles {
                    return Err(Error::InvalidArgument(format!(
                        "injection after cycle {after_cycle} beyond T={cycles}"
                    )));
                }
            }
            Injection::PauliAtStep { cycle, step, qubit, .. } => {
                if qubit >= N_QUBITS {
                    return Err(Error::InvalidQubit(qubit));
                }
                if cycle < 1 || cycle > cycles || step < 1 || step > CYCLE_STEPS {
                    return Err(Error::InvalidArgument(format!(
                        "step injection (cycle {cycle}, step {step}) out of range"
                    )));
                }
            }
            Injection::Misreport { cycle, stab } => {
                if stab >= N_STABS || cycle < 1 || cycle > cycles {
                    return Err(Error::InvalidArgument(format!(
                        "misreport injection ({cycle}, {stab}) out of range"
                    )));
                }
            }
        }
    }

    let mut rng = rng_from_seed(seed);
    let mut frame = PauliFrame::default();
    let mut stats = SimStats::default();

    // Support masks over data qubits for the Z stabilizers, used for
    // the virtual final readout.
    let z_masks: Vec<u32> = (0..4)
        .map(|i| {
            layout
                .stabilizer(StabKind::Z, i)
                .support
                .iter()
                .fold(0u32, |m, &q| m | 1 << q)
        })
        .collect();
    let data_active: Vec<usize> = (0..N_DATA).collect();
    let ancilla_active: Vec<usize> = (N_DATA..N_QUBITS).collect();

    let mut m_prev = 0u8;
    let mut s_prev = 0u8;
    let mut increments = Vec::with_capacity(cycles);
    let mut per_cycle = record_every_cycle.then(|| PerCycle {
        final_increment_z: Vec::with_capacity(cycles),
        label_z: Vec::with_capacity(cycles),
    });
    let mut last_final = 0u8;
    let mut last_label = 0u8;

    for inj in injections {
        if let Injection::Pauli {
            after_cycle: 0,
            qubit,
            pauli,
        } = *inj
        {
            frame.apply(qubit, pauli);
        }
    }

    for t in 1..=cycles {
        let mut m = 0u8;
        for (step_idx, step) in layout.schedule.iter().enumerate() {
            if step_idx + 1 == layout.schedule.len() {
                // Measurement step: read ancillas first, then the data
                // channel; ancillas see only the misreport chance.
                for s in &layout.stabilizers {
                    let mut bit = (frame.x >> s.ancilla) & 1;
                    if params.p_m > 0.0 && rng.random::<f64>() < params.p_m {
                        bit ^= 1;
                        stats.misreports += 1;
                    }
                    m |= (bit as u8) << (s.ancilla - N_DATA);
                    frame.z &= !(1u32 << s.ancilla);
                }
                stats.data_pauli_events +=
                    step_errors(&mut frame, params, &mut rng, &data_active);
            } else {
                for g in step {
                    apply_gate(&mut frame, *g);
                }
                // Qubit ids are drawn in ascending order, so splitting
                // the pass by class consumes the stream exactly as one
                // pass over 0..17 would.
                stats.data_pauli_events +=
                    step_errors(&mut frame, params, &mut rng, &data_active);
                stats.ancilla_pauli_events +=
                    step_errors(&mut frame, params, &mut rng, &ancilla_active);
            }
            for inj in injections {
                if let Injection::PauliAtStep { cycle, step, qubit, pauli } = *inj {
                    if cycle == t && step == step_idx + 1 {
                        frame.apply(qubit, pauli);
                    }
                }
            }
        }
        for inj in injections {
            if let Injection::Misreport { cycle, stab } = *inj {
                if cycle == t {
                    m ^= 1 << stab;
                }
            }
        }
        let s = m ^ m_prev;
        let ds = s ^ s_prev;
        increments.push(ds);
        m_prev = m;
        s_prev = s;

        for inj in injections {
            if let Injection::Pauli {
                after_cycle,
                qubit,
                pauli,
            } = *inj
            {
                if after_cycle == t {
                    frame.apply(qubit, pauli);
                }
            }
        }

        let needed = record_every_cycle || t == cycles;
        if needed {
            let mut f = 0u8;
            for (i, mask) in z_masks.iter().enumerate() {
                f |= ((((frame.x & mask).count_ones() & 1) as u8) ^ ((s >> (4 + i)) & 1)) << i;
            }
            let label = ((frame.x & DATA_MASK).count_ones() & 1) as u8;
            last_final = f;
            last_label = label;
            if let Some(pc) = per_cycle.as_mut() {
                pc.final_increment_z.push(f);
                pc.label_z.push(label);
            }
        }
    }

    Ok((
        SyndromeSequence {
            cycles,
            increments,
            final_increment_z: last_final,
            label_z: last_label,
            per_cycle,
            seed,
        },
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::build_surface17;
    use approx::assert_relative_eq;

    fn quiet(
        cycles: usize,
        injections: &[Injection],
    ) -> SyndromeSequence {
        let layout = build_surface17();
        run_experiment_with(&layout, cycles, &ErrorParams::zero(), 7, true, injections)
            .unwrap()
            .0
    }

    #[test]
    fn zero_noise_means_zero_record() {
        for cycles in [1, 2, 5, 40] {
            let seq = quiet(cycles, &[]);
            assert!(seq.increments.iter().all(|&b| b == 0));
            assert_eq!(seq.final_increment_z, 0);
            assert_eq!(seq.label_z, 0);
            let pc = seq.per_cycle.unwrap();
            assert!(pc.final_increment_z.iter().all(|&b| b == 0));
            assert!(pc.label_z.iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn frame_composition_is_xor() {
        let mut a = PauliFrame::default();
        a.apply(3, Pauli::X);
        a.apply(5, Pauli::Y);
        let mut b = PauliFrame::default();
        b.apply(5, Pauli::Y);
        b.apply(16, Pauli::Z);
        a.compose(b);
        assert_eq!(a, PauliFrame { x: 1 << 3, z: 1 << 16 });
    }

    #[test]
    fn hadamard_twice_restores_frame() {
        let mut f = PauliFrame { x: 0b1010, z: 0b0100 };
        let orig = f;
        apply_gate(&mut f, Gate::H(1));
        assert_eq!(f, PauliFrame { x: 0b1000, z: 0b0110 });
        apply_gate(&mut f, Gate::H(1));
        assert_eq!(f, orig);
    }

    #[test]
    fn cnot_propagates_x_forward_and_z_backward() {
        let mut f = PauliFrame { x: 1 << 2, z: 0 };
        apply_gate(&mut f, Gate::Cnot { control: 2, target: 9 });
        assert_eq!(f.x, (1 << 2) | (1 << 9));
        let mut g = PauliFrame { x: 0, z: 1 << 9 };
        apply_gate(&mut g, Gate::Cnot { control: 2, target: 9 });
        assert_eq!(g.z, (1 << 2) | (1 << 9));
    }

    #[test]
    fn bulk_x_error_fires_its_two_z_stabilizers_once() {
        // X on d4 between cycles 1 and 2 flips Z0 and Z3 (global 4, 7)
        // at cycle 2 only; the final readout agrees with the syndrome,
        // so df stays clear, and the flip parity is odd.
        let seq = quiet(3, &[Injection::Pauli {
            after_cycle: 1,
            qubit: 4,
            pauli: Pauli::X,
        }]);
        assert_eq!(seq.increments, vec![0, (1 << 4) | (1 << 7), 0]);
        assert_eq!(seq.final_increment_z, 0);
        assert_eq!(seq.label_z, 1);
    }

    #[test]
    fn x_error_after_last_cycle_lands_in_the_final_increment() {
        let seq = quiet(3, &[Injection::Pauli {
            after_cycle: 3,
            qubit: 4,
            pauli: Pauli::X,
        }]);
        assert_eq!(seq.increments, vec![0, 0, 0]);
        assert_eq!(seq.final_increment_z, (1 << 0) | (1 << 3));
        assert_eq!(seq.label_z, 1);
    }

    #[test]
    fn z_error_fires_x_stabilizers_and_leaves_the_label_alone() {
        let seq = quiet(3, &[Injection::Pauli {
            after_cycle: 1,
            qubit: 4,
            pauli: Pauli::Z,
        }]);
        assert_eq!(seq.increments, vec![0, (1 << 1) | (1 << 2), 0]);
        assert_eq!(seq.final_increment_z, 0);
        assert_eq!(seq.label_z, 0);
    }

    #[test]
    fn misreport_signature_spans_two_cycles() {
        // A lone readout misreport at cycle t corrupts s(t) and
        // s(t+1), so the second difference shows ds at t and t+2.
        let seq = quiet(6, &[Injection::Misreport { cycle: 2, stab: 4 }]);
        assert_eq!(seq.increments, vec![0, 1 << 4, 0, 1 << 4, 0, 0]);
        assert_eq!(seq.final_increment_z, 0);
        assert_eq!(seq.label_z, 0);
    }

    #[test]
    fn misreport_in_the_last_cycle_pairs_with_the_final_increment() {
        let seq = quiet(3, &[Injection::Misreport { cycle: 3, stab: 4 }]);
        assert_eq!(seq.increments, vec![0, 0, 1 << 4]);
        assert_eq!(seq.final_increment_z, 1 << 0);
        assert_eq!(seq.label_z, 0);
    }

    #[test]
    fn ancilla_bit_flip_gives_consecutive_increments() {
        // X on the Z0 ancilla (qubit 13) persists in the state, so the
        // readout chain flips from the next cycle on: ds fires at t+1
        // and t+2 — the consecutive-time signature, unlike misreports.
        let seq = quiet(6, &[Injection::Pauli {
            after_cycle: 2,
            qubit: 13,
            pauli: Pauli::X,
        }]);
        assert_eq!(seq.increments, vec![0, 0, 1 << 4, 1 << 4, 0, 0]);
        assert_eq!(seq.final_increment_z, 0);
        assert_eq!(seq.label_z, 0);
    }

    #[test]
    fn injections_after_noise_stops_settle_within_two_cycles() {
        // With stochastic noise off throughout and faults confined to
        // cycle t0 = 2, nothing may fire after t0 + 2.
        let seq = quiet(8, &[
            Injection::Misreport { cycle: 2, stab: 5 },
            Injection::Pauli { after_cycle: 2, qubit: 1, pauli: Pauli::X },
        ]);
        for (i, &ds) in seq.increments.iter().enumerate() {
            let t = i + 1;
            if t > 4 {
                assert_eq!(ds, 0, "increment fired at cycle {t}");
            }
        }
    }

    #[test]
    fn per_cycle_records_end_with_the_final_values() {
        let layout = build_surface17();
        let (seq, _) = run_experiment_with(
            &layout,
            20,
            &ErrorParams::operating_point(),
            123,
            true,
            &[],
        )
        .unwrap();
        let pc = seq.per_cycle.as_ref().unwrap();
        assert_eq!(pc.final_increment_z.len(), 20);
        assert_eq!(*pc.final_increment_z.last().unwrap(), seq.final_increment_z);
        assert_eq!(*pc.label_z.last().unwrap(), seq.label_z);
    }

    #[test]
    fn same_seed_reproduces_the_sequence() {
        let layout = build_surface17();
        let params = ErrorParams::operating_point();
        let a = run_experiment(&layout, 30, &params, 99, true).unwrap();
        let b = run_experiment(&layout, 30, &params, 99, true).unwrap();
        assert_eq!(a, b);
        let c = run_experiment(&layout, 30, &params, 100, true).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn y_error_prob_frozen_values() {
        let p = ErrorParams { p_x: 0.1, p_y: 0.0, p_z: 0.1, p_m: 0.0 };
        assert_relative_eq!(p.y_error_prob(), 0.01, max_relative = 1e-12);
        // With equal probabilities the expression collapses to p(1-p).
        let op = ErrorParams::operating_point();
        assert_relative_eq!(op.y_error_prob(), 4.797696e-4, max_relative = 1e-12);
        assert!((op.y_error_prob() - 4.798e-4).abs() < 1e-6);
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        let layout = build_surface17();
        let bad = ErrorParams { p_x: 0.6, p_y: 0.3, p_z: 0.2, p_m: 0.0 };
        assert!(bad.validate().is_err());
        assert!(run_experiment(&layout, 0, &ErrorParams::zero(), 1, false).is_err());
        let oob = [Injection::Pauli { after_cycle: 0, qubit: 17, pauli: Pauli::X }];
        assert!(run_experiment_with(&layout, 2, &ErrorParams::zero(), 1, false, &oob).is_err());
        let late = [Injection::Misreport { cycle: 3, stab: 0 }];
        assert!(run_experiment_with(&layout, 2, &ErrorParams::zero(), 1, false, &late).is_err());
    }

    #[test]
    fn truncation_requires_per_cycle_records_and_valid_t() {
        let layout = build_surface17();
        let with = run_experiment(&layout, 5, &ErrorParams::zero(), 1, true).unwrap();
        let (inc, f, l) = with.truncated(3).unwrap();
        assert_eq!(inc.len(), 3);
        assert_eq!((f, l), (0, 0));
        assert!(with.truncated(0).is_err());
        assert!(with.truncated(6).is_err());
        let without = run_experiment(&layout, 5, &ErrorParams::zero(), 1, false).unwrap();
        assert!(without.truncated(3).is_err());
    }
}
