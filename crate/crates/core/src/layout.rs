//! Surface-17 code layout: qubit indexing, stabilizer supports, and the
//! seven-step measurement schedule.
//!
//! Geometry.  Nine data qubits sit on a 3x3 grid in row-major order:
//!
//! ```text
//!     d0 d1 d2
//!     d3 d4 d5
//!     d6 d7 d8
//! ```
//!
//! Checkerboard-colouring the lattice squares and keeping the boundary
//! half-squares that continue the alternation gives four X and four Z
//! stabilizers, two of each weight four and two of each weight two.
//! Ancilla k sits at the centre of stabilizer k; global qubit ids are
//! data 0..9 and ancilla 9..17, with stabilizers ordered X0..X3 then
//! Z0..Z3 (row-major by centre within each kind).
//!
//! Schedule.  One cycle is seven steps: Hadamards on the X ancillas,
//! four CNOT steps, Hadamards again, then ancilla readout.  Z ancillas
//! visit their data corners in the order NW, SW, NE, SE and X ancillas
//! in the order NW, NE, SW, SE.  The complementary orders keep every
//! qubit in at most one gate per step, and this particular assignment
//! also tames hook errors: an ancilla fault mid-sequence copies onto
//! the corners visited afterwards, and with these orders the copied
//! pair always lies perpendicular to the logical operator its
//! stabilizer family protects, so it acts like a benign boundary pair
//! rather than half a logical.  Qubits with no gate in a step carry an
//! explicit `Idle` so the error channel knows they are live.

use std::fmt;

use crate::error::{Error, Result};

pub const N_DATA: usize = 9;
pub const N_ANCILLA: usize = 8;
pub const N_QUBITS: usize = N_DATA + N_ANCILLA;
pub const N_STABS: usize = 8;
pub const N_STABS_PER_KIND: usize = 4;
pub const CYCLE_STEPS: usize = 7;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum StabKind {
    X,
    Z,
}

impl StabKind {
    pub fn other(self) -> StabKind {
        match self {
            StabKind::X => StabKind::Z,
            StabKind::Z => StabKind::X,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub kind: StabKind,
    /// Index within the kind, 0..4.
    pub index: usize,
    /// Global qubit id of the measuring ancilla.
    pub ancilla: usize,
    /// Data qubit ids, sorted ascending.
    pub support: Vec<usize>,
    /// Centre on the doubled grid: data qubit (r, c) sits at (2r, 2c).
    pub center: (i32, i32),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Gate {
    H(usize),
    Cnot { control: usize, target: usize },
    Idle(usize),
    Measure(usize),
}

impl Gate {
    /// Qubits this gate acts on.
    pub fn operands(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Gate::H(q) | Gate::Idle(q) | Gate::Measure(q) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        };
        std::iter::once(a).chain(b)
    }
}

#[derive(Clone, Debug)]
pub struct CodeLayout {
    /// All eight stabilizers; position in this list is the global
    /// stabilizer index (0..4 = X0..X3, 4..8 = Z0..Z3).
    pub stabilizers: Vec<Stabilizer>,
    /// Seven steps, each listing every qubit exactly once.
    pub schedule: Vec<Vec<Gate>>,
    /// Minimal logical Z operator support (top row).
    pub logical_z_support: Vec<usize>,
    /// Minimal logical X operator support (left column).
    pub logical_x_support: Vec<usize>,
}

/// Supports and doubled-grid centres, X0..X3 then Z0..Z3.
const STAB_TABLE: [(StabKind, &[usize], (i32, i32)); N_STABS] = [
    (StabKind::X, &[0, 1], (-1, 1)),
    (StabKind::X, &[1, 2, 4, 5], (1, 3)),
    (StabKind::X, &[3, 4, 6, 7], (3, 1)),
    (StabKind::X, &[7, 8], (5, 3)),
    (StabKind::Z, &[0, 1, 3, 4], (1, 1)),
    (StabKind::Z, &[2, 5], (1, 5)),
    (StabKind::Z, &[3, 6], (3, -1)),
    (StabKind::Z, &[4, 5, 7, 8], (3, 3)),
];

/// Corner offsets on the doubled grid.
const NW: (i32, i32) = (-1, -1);
const NE: (i32, i32) = (-1, 1);
const SW: (i32, i32) = (1, -1);
const SE: (i32, i32) = (1, 1);

const Z_CORNER_ORDER: [(i32, i32); 4] = [NW, SW, NE, SE];
const X_CORNER_ORDER: [(i32, i32); 4] = [NW, NE, SW, SE];

fn data_at(pos: (i32, i32)) -> Option<usize> {
    let (r2, c2) = pos;
    if r2 % 2 != 0 || c2 % 2 != 0 {
        return None;
    }
    let (r, c) = (r2 / 2, c2 / 2);
    if (0..3).contains(&r) && (0..3).contains(&c) {
        Some((r * 3 + c) as usize)
    } else {
        None
    }
}

pub fn build_surface17() -> CodeLayout {
    let stabilizers: Vec<Stabilizer> = STAB_TABLE
        .iter()
        .enumerate()
        .map(|(g, &(kind, support, center))| Stabilizer {
            kind,
            index: g % N_STABS_PER_KIND,
            ancilla: N_DATA + g,
            support: support.to_vec(),
            center,
        })
        .collect();

    let mut schedule = Vec::with_capacity(CYCLE_STEPS);
    let h_step: Vec<Gate> = stabilizers
        .iter()
        .filter(|s| s.kind == StabKind::X)
        .map(|s| Gate::H(s.ancilla))
        .collect();
    schedule.push(pad_with_idles(h_step.clone()));
    for k in 0..4 {
        let mut gates = Vec::new();
        for s in &stabilizers {
            let corner = match s.kind {
                StabKind::Z => Z_CORNER_ORDER[k],
                StabKind::X => X_CORNER_ORDER[k],
            };
            let pos = (s.center.0 + corner.0, s.center.1 + corner.1);
            if let Some(d) = data_at(pos) {
                debug_assert!(s.support.contains(&d));
                let gate = match s.kind {
                    StabKind::Z => Gate::Cnot {
                        control: d,
                        target: s.ancilla,
                    },
                    StabKind::X => Gate::Cnot {
                        control: s.ancilla,
                        target: d,
                    },
                };
                gates.push(gate);
            }
        }
        schedule.push(pad_with_idles(gates));
    }
    schedule.push(pad_with_idles(h_step));
    let measure: Vec<Gate> = stabilizers.iter().map(|s| Gate::Measure(s.ancilla)).collect();
    schedule.push(pad_with_idles(measure));

    CodeLayout {
        stabilizers,
        schedule,
        logical_z_support: vec![0, 1, 2],
        logical_x_support: vec![0, 3, 6],
    }
}

fn pad_with_idles(mut gates: Vec<Gate>) -> Vec<Gate> {
    let mut used = [false; N_QUBITS];
    for g in &gates {
        for q in g.operands() {
            debug_assert!(!used[q], "qubit {q} used twice in one step");
            used[q] = true;
        }
    }
    for (q, used) in used.iter().enumerate() {
        if !used {
            gates.push(Gate::Idle(q));
        }
    }
    gates
}

impl CodeLayout {
    pub fn stabilizer(&self, kind: StabKind, index: usize) -> &Stabilizer {
        let g = match kind {
            StabKind::X => index,
            StabKind::Z => N_STABS_PER_KIND + index,
        };
        &self.stabilizers[g]
    }

    /// Stabilizers of `kind` whose support contains data qubit `q`,
    /// as indices within the kind (0..4).
    pub fn stabs_on(&self, kind: StabKind, q: usize) -> Vec<usize> {
        self.stabilizers
            .iter()
            .filter(|s| s.kind == kind && s.support.contains(&q))
            .map(|s| s.index)
            .collect()
    }

    /// CNOT slot (1..=4) in which the `kind`-family stabilizer
    /// `index` reads data qubit `q`, straight from the schedule.
    pub fn cnot_slot(&self, kind: StabKind, index: usize, q: usize) -> Option<usize> {
        let ancilla = self.stabilizer(kind, index).ancilla;
        for (slot, step) in self.schedule[1..=4].iter().enumerate() {
            for g in step {
                if let Gate::Cnot { control, target } = *g {
                    let hit = match kind {
                        StabKind::Z => control == q && target == ancilla,
                        StabKind::X => control == ancilla && target == q,
                    };
                    if hit {
                        return Some(slot + 1);
                    }
                }
            }
        }
        None
    }
}

/// Global stabilizer indices (0..8) whose measurement flips when the
/// given Pauli error lands on data qubit `qubit`: Z stabilizers detect
/// the X component, X stabilizers the Z component, Y fires both.
pub fn single_error_defects(
    layout: &CodeLayout,
    qubit: usize,
    pauli: Pauli,
) -> Result<Vec<usize>> {
    if qubit >= N_DATA {
        return Err(Error::InvalidQubit(qubit));
    }
    let fires = |kind: StabKind| match (pauli, kind) {
        (Pauli::X, StabKind::Z) | (Pauli::Z, StabKind::X) | (Pauli::Y, _) => true,
        _ => false,
    };
    Ok(layout
        .stabilizers
        .iter()
        .enumerate()
        .filter(|(_, s)| fires(s.kind) && s.support.contains(&qubit))
        .map(|(g, _)| g)
        .collect())
}

impl fmt::Display for CodeLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "surface-17: 9 data qubits (d0..d8), 8 ancillas (a9..a16)")?;
        writeln!(f, "    d0 d1 d2")?;
        writeln!(f, "    d3 d4 d5")?;
        writeln!(f, "    d6 d7 d8")?;
        for (g, s) in self.stabilizers.iter().enumerate() {
            let q: Vec<String> = s.support.iter().map(|d| format!("d{d}")).collect();
            writeln!(
                f,
                "stab {g}: {:?}{} ancilla a{} on {}",
                s.kind,
                s.index,
                s.ancilla,
                q.join(" ")
            )?;
        }
        writeln!(
            f,
            "logical Z on {:?}, logical X on {:?}; readout label uses the all-data parity",
            self.logical_z_support, self.logical_x_support
        )?;
        for (i, step) in self.schedule.iter().enumerate() {
            let mut parts = Vec::new();
            for g in step {
                match *g {
                    Gate::H(q) => parts.push(format!("H a{q}")),
                    Gate::Cnot { control, target } => parts.push(format!("CX {control}>{target}")),
                    Gate::Measure(q) => parts.push(format!("M a{q}")),
                    Gate::Idle(_) => {}
                }
            }
            let body = if parts.is_empty() {
                "idle".to_string()
            } else {
                parts.join(", ")
            };
            writeln!(f, "step {i}: {body}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pauli string on all 17 qubits as X/Z bit masks, used to check
    /// commutation and gate conjugation independently of the lookup
    /// tables under test.
    #[derive(Clone, Copy, PartialEq, Eq, Debug)]
    struct PauliString {
        x: u32,
        z: u32,
    }

    impl PauliString {
        fn identity() -> Self {
            PauliString { x: 0, z: 0 }
        }

        fn with(mut self, q: usize, p: Pauli) -> Self {
            match p {
                Pauli::I => {}
                Pauli::X => self.x ^= 1 << q,
                Pauli::Z => self.z ^= 1 << q,
                Pauli::Y => {
                    self.x ^= 1 << q;
                    self.z ^= 1 << q;
                }
            }
            self
        }

        fn anticommutes(self, other: PauliString) -> bool {
            let overlap =
                (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
            overlap % 2 == 1
        }

        /// Conjugate by one gate (H and CNOT are self-inverse, so the
        /// same rule serves forward and backward walks).
        fn conjugate(mut self, gate: Gate) -> Self {
            match gate {
                Gate::H(q) => {
                    let m = 1 << q;
                    let xb = self.x & m;
                    let zb = self.z & m;
                    self.x = (self.x & !m) | zb;
                    self.z = (self.z & !m) | xb;
                }
                Gate::Cnot { control, target } => {
                    if self.x & (1 << control) != 0 {
                        self.x ^= 1 << target;
                    }
                    if self.z & (1 << target) != 0 {
                        self.z ^= 1 << control;
                    }
                }
                Gate::Idle(_) | Gate::Measure(_) => {}
            }
            self
        }
    }

    fn stab_operator(s: &Stabilizer) -> PauliString {
        let p = match s.kind {
            StabKind::X => Pauli::X,
            StabKind::Z => Pauli::Z,
        };
        s.support
            .iter()
            .fold(PauliString::identity(), |acc, &q| acc.with(q, p))
    }

    #[test]
    fn stabilizer_counts_and_weights() {
        let layout = build_surface17();
        for kind in [StabKind::X, StabKind::Z] {
            let of_kind: Vec<_> = layout
                .stabilizers
                .iter()
                .filter(|s| s.kind == kind)
                .collect();
            assert_eq!(of_kind.len(), 4);
            let mut weights: Vec<usize> = of_kind.iter().map(|s| s.support.len()).collect();
            weights.sort();
            assert_eq!(weights, [2, 2, 4, 4]);
        }
        for (g, s) in layout.stabilizers.iter().enumerate() {
            assert_eq!(s.ancilla, N_DATA + g);
            assert_eq!(s.index, g % 4);
        }
    }

    #[test]
    fn every_data_qubit_lies_in_one_or_two_stabilizers_of_each_kind() {
        let layout = build_surface17();
        for q in 0..N_DATA {
            for kind in [StabKind::X, StabKind::Z] {
                let n = layout.stabs_on(kind, q).len();
                assert!(
                    (1..=2).contains(&n),
                    "qubit {q} lies in {n} {kind:?} stabilizers"
                );
            }
        }
    }

    #[test]
    fn x_and_z_stabilizers_overlap_on_zero_or_two_qubits() {
        let layout = build_surface17();
        for sx in layout.stabilizers.iter().filter(|s| s.kind == StabKind::X) {
            for sz in layout.stabilizers.iter().filter(|s| s.kind == StabKind::Z) {
                let shared = sx
                    .support
                    .iter()
                    .filter(|q| sz.support.contains(q))
                    .count();
                assert!(shared == 0 || shared == 2);
                assert!(!stab_operator(sx).anticommutes(stab_operator(sz)));
            }
        }
    }

    #[test]
    fn logical_operators_commute_with_stabilizers_and_anticommute_with_each_other() {
        let layout = build_surface17();
        let lz = layout
            .logical_z_support
            .iter()
            .fold(PauliString::identity(), |acc, &q| acc.with(q, Pauli::Z));
        let lx = layout
            .logical_x_support
            .iter()
            .fold(PauliString::identity(), |acc, &q| acc.with(q, Pauli::X));
        for s in &layout.stabilizers {
            assert!(!lz.anticommutes(stab_operator(s)));
            assert!(!lx.anticommutes(stab_operator(s)));
        }
        assert!(lz.anticommutes(lx));

        // Neither logical operator is a product of stabilizers of its
        // own kind: try all 16 subsets per kind.
        for (kind, logical) in [(StabKind::Z, lz), (StabKind::X, lx)] {
            let gens: Vec<PauliString> = layout
                .stabilizers
                .iter()
                .filter(|s| s.kind == kind)
                .map(stab_operator)
                .collect();
            for mask in 0..16u32 {
                let mut prod = PauliString::identity();
                for (i, g) in gens.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        prod.x ^= g.x;
                        prod.z ^= g.z;
                    }
                }
                assert_ne!(prod, logical);
            }
        }
    }

    #[test]
    fn schedule_shape_and_gate_budget() {
        let layout = build_surface17();
        assert_eq!(layout.schedule.len(), CYCLE_STEPS);
        let kind_of = |step: &[Gate]| {
            let mut h = 0;
            let mut cx = 0;
            let mut m = 0;
            for g in step {
                match g {
                    Gate::H(_) => h += 1,
                    Gate::Cnot { .. } => cx += 1,
                    Gate::Measure(_) => m += 1,
                    Gate::Idle(_) => {}
                }
            }
            (h, cx, m)
        };
        assert_eq!(kind_of(&layout.schedule[0]), (4, 0, 0));
        for k in 1..=4 {
            let (h, cx, m) = kind_of(&layout.schedule[k]);
            assert_eq!((h, m), (0, 0));
            assert!(cx >= 6, "step {k} has only {cx} CNOTs");
        }
        assert_eq!(kind_of(&layout.schedule[5]), (4, 0, 0));
        assert_eq!(kind_of(&layout.schedule[6]), (0, 0, 8));
    }

    #[test]
    fn each_step_touches_every_qubit_exactly_once() {
        let layout = build_surface17();
        for step in &layout.schedule {
            let mut count = [0usize; N_QUBITS];
            for g in step {
                for q in g.operands() {
                    count[q] += 1;
                }
            }
            assert_eq!(count, [1; N_QUBITS]);
        }
    }

    #[test]
    fn cnot_slots_are_frozen_and_conflict_free() {
        let layout = build_surface17();
        let slots: &[(StabKind, usize, &[(usize, usize)])] = &[
            (StabKind::Z, 0, &[(0, 1), (3, 2), (1, 3), (4, 4)]),
            (StabKind::Z, 1, &[(2, 1), (5, 2)]),
            (StabKind::Z, 2, &[(3, 3), (6, 4)]),
            (StabKind::Z, 3, &[(4, 1), (7, 2), (5, 3), (8, 4)]),
            (StabKind::X, 0, &[(0, 3), (1, 4)]),
            (StabKind::X, 1, &[(1, 1), (2, 2), (4, 3), (5, 4)]),
            (StabKind::X, 2, &[(3, 1), (4, 2), (6, 3), (7, 4)]),
            (StabKind::X, 3, &[(7, 1), (8, 2)]),
        ];
        for &(kind, idx, pairs) in slots {
            for &(q, slot) in pairs {
                assert_eq!(
                    layout.cnot_slot(kind, idx, q),
                    Some(slot),
                    "{kind:?}{idx} on d{q}"
                );
            }
            assert_eq!(layout.cnot_slot(kind, idx, 9), None);
        }
        // No data qubit is read twice in one slot.
        for q in 0..N_DATA {
            let mut taken = [false; 5];
            for s in &layout.stabilizers {
                if let Some(slot) = layout.cnot_slot(s.kind, s.index, q) {
                    assert!(!taken[slot], "d{q} read twice in slot {slot}");
                    taken[slot] = true;
                }
            }
        }
    }

    #[test]
    fn cnots_connect_each_ancilla_to_exactly_its_support() {
        let layout = build_surface17();
        for s in &layout.stabilizers {
            let mut partners = Vec::new();
            for step in &layout.schedule {
                for g in step {
                    if let Gate::Cnot { control, target } = *g {
                        match s.kind {
                            StabKind::Z if target == s.ancilla => partners.push(control),
                            StabKind::X if control == s.ancilla => partners.push(target),
                            _ => {}
                        }
                    }
                }
            }
            partners.sort();
            assert_eq!(partners, s.support);
        }
    }

    #[test]
    fn cycle_measures_the_intended_operators() {
        // Heisenberg check: pulling the measured observable Z_ancilla
        // backwards through one cycle must give Z_ancilla times the
        // stabilizer, i.e. each readout accumulates exactly its
        // stabilizer's parity on top of the ancilla's prior state.
        let layout = build_surface17();
        for s in &layout.stabilizers {
            let mut obs = PauliString::identity().with(s.ancilla, Pauli::Z);
            for step in layout.schedule.iter().rev() {
                for g in step {
                    obs = obs.conjugate(*g);
                }
            }
            let expected = {
                let mut e = stab_operator(s);
                e.z ^= 1 << s.ancilla;
                e
            };
            assert_eq!(obs, expected, "stabilizer {:?}{}", s.kind, s.index);
        }
    }

    #[test]
    fn single_error_defects_match_symplectic_oracle() {
        // Independent oracle: a stabilizer fires iff its operator
        // anticommutes with the error, computed via the symplectic
        // product rather than support lookups.
        let layout = build_surface17();
        for q in 0..N_DATA {
            for p in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                let err = PauliString::identity().with(q, p);
                let expected: Vec<usize> = layout
                    .stabilizers
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| stab_operator(s).anticommutes(err))
                    .map(|(g, _)| g)
                    .collect();
                let got = single_error_defects(&layout, q, p).unwrap();
                assert_eq!(got, expected, "qubit {q} pauli {p:?}");
            }
        }
    }

    #[test]
    fn single_error_defect_counts_frozen() {
        let layout = build_surface17();
        // Bulk X error fires two Z stabilizers; corner X fires one.
        assert_eq!(single_error_defects(&layout, 4, Pauli::X).unwrap(), vec![4, 7]);
        assert_eq!(single_error_defects(&layout, 0, Pauli::X).unwrap(), vec![4]);
        // Column-boundary Z error fires one X stabilizer.
        assert_eq!(single_error_defects(&layout, 2, Pauli::Z).unwrap(), vec![1]);
        assert_eq!(single_error_defects(&layout, 4, Pauli::Z).unwrap(), vec![1, 2]);
        assert_eq!(single_error_defects(&layout, 8, Pauli::Y).unwrap(), vec![3, 7]);
        // Only the anticommuting kind appears.
        for q in 0..N_DATA {
            for g in single_error_defects(&layout, q, Pauli::X).unwrap() {
                assert_eq!(layout.stabilizers[g].kind, StabKind::Z);
            }
            for g in single_error_defects(&layout, q, Pauli::Z).unwrap() {
                assert_eq!(layout.stabilizers[g].kind, StabKind::X);
            }
        }
    }

    #[test]
    fn ancilla_index_rejected() {
        let layout = build_surface17();
        assert!(matches!(
            single_error_defects(&layout, 9, Pauli::X),
            Err(Error::InvalidQubit(9))
        ));
    }

    #[test]
    fn display_lists_all_stabilizers_and_steps() {
        let layout = build_surface17();
        let text = layout.to_string();
        for g in 0..N_STABS {
            assert!(text.contains(&format!("stab {g}:")));
        }
        for i in 0..CYCLE_STEPS {
            assert!(text.contains(&format!("step {i}:")));
        }
    }
}
