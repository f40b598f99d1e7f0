// Copyright 2026 The qisxml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Program execution.
//!
//! Memory is simulated as a dense [`StateVector`] or, while it remains a
//! computational basis state and every gate is a 0/1 permutation, as a
//! plain bit vector. The bit path has no width limit; the dense one is
//! capped at [`MAX_DENSE_QUBITS`].

use crate::expr::EvalContext;
use crate::linalg::DenseMatrix;
use crate::model::*;
use crate::resolver::{ResolutionContext, ResolveError};
use crate::rewrite::{application_matrix, flatten, Netlist, RewriteError};
use crate::Scalar;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

pub const MAX_DENSE_QUBITS: usize = 24;
/// Largest memory for which final probabilities are reported.
pub const MAX_PROBABILITY_QUBITS: usize = 20;
pub const PURITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RegisterError {
    #[error("qubit {index} is outside the {memory}-qubit memory")]
    OutOfMemoryRange { index: usize, memory: usize },
    #[error("register declares {declared} qubit(s) but selects {resolved}")]
    SizeMismatch { declared: usize, resolved: usize },
    #[error("unknown register `{0}`")]
    UnknownRegisterReference(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Register(#[from] RegisterError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} qubits exceed the dense simulation limit of {MAX_DENSE_QUBITS}")]
    TooWide(usize),
    #[error("prepare value with modulus {modulus} on qubit {qubit} cannot be normalized")]
    NonNormalizable { qubit: usize, modulus: f64 },
    #[error("PREPARE_AFTER_ENTANGLEMENT: qubit {0} is entangled with the rest of memory")]
    PrepareAfterEntanglement(usize),
    #[error("register of {register} qubit(s) cannot execute a {circuit}-qubit circuit")]
    SizeMismatch { register: usize, circuit: usize },
    #[error("nested programs are not supported")]
    Subprogram,
}

/// Amplitudes of `n` qubits, qubit 1 being the most significant bit of
/// the 0-based basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    pub n: usize,
    pub amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[index] = Complex::new(T::one(), T::zero());
        Self { n, amps }
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n - qubit)
    }

    /// Applies `m` to `qubits`, the first listed qubit being the most
    /// significant bit of the gate-local index.
    pub fn apply_matrix(&mut self, m: &DenseMatrix<T>, qubits: &[usize]) {
        let k = qubits.len();
        let local = 1usize << k;
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let all: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..local)
            .map(|l| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| l & (1 << (k - 1 - j)) != 0)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();
        let zero = Complex::new(T::zero(), T::zero());
        let mut input = vec![zero; local];
        for base in 0..self.amps.len() {
            if base & all != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                input[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = zero;
                for (c, v) in m.row(r).iter().zip(&input) {
                    acc = acc + c * v;
                }
                self.amps[base | off] = acc;
            }
        }
    }

    /// Probability of reading 1 on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> T {
        let m = self.mask(qubit);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr())
    }

    /// Projects `qubit` onto `bit` and renormalizes.
    pub fn collapse(&mut self, qubit: usize, bit: u8) {
        let m = self.mask(qubit);
        let keep = if bit == 1 { m } else { 0 };
        let mut total = T::zero();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != keep {
                *a = Complex::new(T::zero(), T::zero());
            } else {
                total = total + a.norm_sqr();
            }
        }
        let s = T::one() / total.sqrt();
        for a in &mut self.amps {
            *a = a.scale(s);
        }
    }

    /// Reduced density matrix of one qubit: `(rho00, rho11, rho10)`.
    fn reduced(&self, qubit: usize) -> (T, T, Complex<T>) {
        let m = self.mask(qubit);
        let mut r00 = T::zero();
        let mut r11 = T::zero();
        let mut r10 = Complex::new(T::zero(), T::zero());
        for i in 0..self.amps.len() {
            if i & m != 0 {
                continue;
            }
            let a0 = self.amps[i];
            let a1 = self.amps[i | m];
            r00 = r00 + a0.norm_sqr();
            r11 = r11 + a1.norm_sqr();
            r10 = r10 + a1 * a0.conj();
        }
        (r00, r11, r10)
    }

    /// Purity `tr(rho^2)` of one qubit's reduced state.
    pub fn purity(&self, qubit: usize) -> T {
        let (r00, r11, r10) = self.reduced(qubit);
        let two = T::one() + T::one();
        r00 * r00 + r11 * r11 + two * r10.norm_sqr()
    }

    /// Replaces the state of an unentangled `qubit` by `(a0, a1)`.
    pub fn set_qubit(&mut self, qubit: usize, a0: Complex<T>, a1: Complex<T>) -> Result<(), SimError> {
        if (T::one() - self.purity(qubit)).to_f64() > PURITY_TOLERANCE {
            return Err(SimError::PrepareAfterEntanglement(qubit));
        }
        let (r00, _, r10) = self.reduced(qubit);
        let eps = T::from_f64(1e-12);
        let (p0, p1) = if r00 > eps {
            let s = r00.sqrt();
            (Complex::new(s, T::zero()), r10.unscale(s))
        } else {
            (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()))
        };
        let m = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & m != 0 {
                continue;
            }
            let rest = p0.conj() * self.amps[i] + p1.conj() * self.amps[i | m];
            self.amps[i] = a0 * rest;
            self.amps[i | m] = a1 * rest;
        }
        Ok(())
    }

    /// Appends a qubit in state `|bit>` after the current least significant one.
    pub fn push_qubit(&mut self, bit: u8) {
        let zero = Complex::new(T::zero(), T::zero());
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        for a in &self.amps {
            if bit == 0 {
                amps.push(*a);
                amps.push(zero);
            } else {
                amps.push(zero);
                amps.push(*a);
            }
        }
        self.n += 1;
        self.amps = amps;
    }
}

/// Absolute memory indices addressed by `reg`.
pub fn resolve_register(
    reg: &RegisterSpec,
    memory_size: usize,
    globals: &[RegisterSpec],
) -> Result<Vec<usize>, RegisterError> {
    resolve_inner(reg, memory_size, globals, 0)
}

fn resolve_inner(reg: &RegisterSpec, memory: usize, globals: &[RegisterSpec], depth: usize) -> Result<Vec<usize>, RegisterError> {
    let check = |index: usize| {
        if index == 0 || index > memory {
            Err(RegisterError::OutOfMemoryRange { index, memory })
        } else {
            Ok(index)
        }
    };
    let mut out = Vec::new();
    if reg.selectors.is_empty() {
        for i in 1..=reg.size {
            out.push(check(i)?);
        }
    }
    for sel in &reg.selectors {
        match sel {
            QubitSelector::Index(i) => out.push(check(*i)?),
            QubitSelector::Range { start, end } => {
                for i in *start..=*end {
                    out.push(check(i)?);
                }
            }
            QubitSelector::Register(r) => {
                let target = globals
                    .iter()
                    .find(|g| g.identification.as_ref().is_some_and(|id| id.id == r.id))
                    .filter(|_| depth < globals.len())
                    .ok_or_else(|| RegisterError::UnknownRegisterReference(r.id.clone()))?;
                out.extend(resolve_inner(target, memory, globals, depth + 1)?);
            }
        }
    }
    if out.len() != reg.size {
        return Err(RegisterError::SizeMismatch {
            declared: reg.size,
            resolved: out.len(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// Last measured value of every measured memory qubit, ascending.
    pub measured_bits: Vec<(usize, u8)>,
    /// Memory basis index to probability after the last Execute, when the
    /// memory is small enough to enumerate.
    pub final_probabilities: Option<BTreeMap<usize, f64>>,
    pub seed_used: u64,
}

impl RunResult {
    /// `qubit=bit` pairs separated by spaces.
    pub fn dump(&self) -> String {
        self.measured_bits
            .iter()
            .map(|(q, b)| format!("{q}={b}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn bit(&self, qubit: usize) -> Option<u8> {
        self.measured_bits.iter().find(|(q, _)| *q == qubit).map(|(_, b)| *b)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub shots: usize,
    /// Target model for equivalence substitution while flattening.
    pub model: Option<String>,
    /// Skip the bit-level fast path.
    pub force_dense: bool,
}

enum Engine<T> {
    Bits(Vec<u8>),
    Dense(StateVector<T>),
}

impl<T: Scalar> Engine<T> {
    fn width(&self) -> usize {
        match self {
            Engine::Bits(b) => b.len(),
            Engine::Dense(s) => s.n,
        }
    }

    fn densify(&mut self) -> Result<&mut StateVector<T>, SimError> {
        if let Engine::Bits(bits) = self {
            if bits.len() > MAX_DENSE_QUBITS {
                return Err(SimError::TooWide(bits.len()));
            }
            let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            *self = Engine::Dense(StateVector::basis(bits.len(), index));
        }
        match self {
            Engine::Dense(s) => Ok(s),
            Engine::Bits(_) => unreachable!(),
        }
    }

    fn push_qubit(&mut self, bit: u8) -> Result<(), SimError> {
        match self {
            Engine::Bits(b) => b.push(bit),
            Engine::Dense(s) => {
                if s.n + 1 > MAX_DENSE_QUBITS {
                    return Err(SimError::TooWide(s.n + 1));
                }
                s.push_qubit(bit)
            }
        }
        Ok(())
    }

    fn set_qubit(&mut self, qubit: usize, a0: Complex<T>, a1: Complex<T>) -> Result<(), SimError> {
        let zero = Complex::new(T::zero(), T::zero());
        if let Engine::Bits(b) = self {
            if a1 == zero {
                b[qubit - 1] = 0;
                return Ok(());
            }
            if a0 == zero {
                b[qubit - 1] = 1;
                return Ok(());
            }
        }
        self.densify()?.set_qubit(qubit, a0, a1)
    }

    fn measure(&mut self, qubit: usize, rng: &mut ChaCha8Rng) -> u8 {
        let draw: f64 = rng.random();
        match self {
            Engine::Bits(b) => b[qubit - 1],
            Engine::Dense(s) => {
                let p1 = s.probability_one(qubit).to_f64();
                let bit = if p1 >= 1.0 - 1e-12 {
                    1
                } else if p1 <= 1e-12 {
                    0
                } else {
                    u8::from(draw < p1)
                };
                s.collapse(qubit, bit);
                bit
            }
        }
    }

    fn probabilities(&self, memory: usize) -> Option<BTreeMap<usize, f64>> {
        if memory > MAX_PROBABILITY_QUBITS {
            return None;
        }
        let mut out = BTreeMap::new();
        match self {
            Engine::Bits(b) => {
                let index = b[..memory].iter().fold(0usize, |acc, &x| (acc << 1) | x as usize);
                out.insert(index, 1.0);
            }
            Engine::Dense(s) => {
                let scratch = s.n - memory;
                for (i, a) in s.amps.iter().enumerate() {
                    let p = a.norm_sqr().to_f64();
                    if p > 0.0 {
                        *out.entry(i >> scratch).or_insert(0.0) += p;
                    }
                }
            }
        }
        Some(out)
    }
}

/// A flattened application ready to run: absolute state qubits plus the
/// matrix, or its permutation image when it has one.
struct Compiled<T> {
    qubits: Vec<usize>,
    matrix: DenseMatrix<T>,
    image: Option<Vec<usize>>,
}

enum Action<T> {
    Prepare { qubit: usize, a0: Complex<T>, a1: Complex<T> },
    Scratch(u8),
    Gates(Vec<Compiled<T>>),
    Measure(usize),
}

/// Everything needed to run one shot, precomputed once.
struct Plan<T> {
    memory: usize,
    init: Vec<(usize, Complex<T>, Complex<T>)>,
    actions: Vec<Action<T>>,
    /// Index into `actions` after which final probabilities are taken.
    last_execute: Option<usize>,
    measure_all: bool,
}

fn prepare_amplitudes<T: Scalar>(qubit: usize, v: &ComplexValue) -> Result<(Complex<T>, Complex<T>), SimError> {
    let mut warnings = Vec::new();
    let a: Complex<T> = v.evaluate(&EvalContext::new(), &mut warnings)?;
    let modulus = a.norm().to_f64();
    if modulus > 1.0 + 1e-12 {
        return Err(SimError::NonNormalizable { qubit, modulus });
    }
    let rest = (T::one() - a.norm_sqr()).max(T::zero()).sqrt();
    Ok((Complex::new(rest, T::zero()), a))
}

fn prepare_actions<T: Scalar>(
    reg: &RegisterSpec,
    indices: &[usize],
    p: &Program,
    out: &mut Vec<Action<T>>,
) -> Result<(), SimError> {
    for set in &reg.prepare {
        let mut targets = Vec::new();
        for sel in &set.targets {
            match sel {
                QubitSelector::Index(i) => targets.push(*i),
                QubitSelector::Range { start, end } => targets.extend(*start..=*end),
                QubitSelector::Register(r) => {
                    // A referenced register already names memory qubits.
                    let g = p
                        .global_registers
                        .iter()
                        .find(|g| g.identification.as_ref().is_some_and(|id| id.id == r.id))
                        .ok_or_else(|| RegisterError::UnknownRegisterReference(r.id.clone()))?;
                    for q in resolve_register(g, p.memory_size, &p.global_registers)? {
                        let (a0, a1) = prepare_amplitudes(q, &set.value)?;
                        out.push(Action::Prepare { qubit: q, a0, a1 });
                    }
                }
            }
        }
        for t in targets {
            let qubit = *indices.get(t.wrapping_sub(1)).ok_or(RegisterError::OutOfMemoryRange {
                index: t,
                memory: indices.len(),
            })?;
            let (a0, a1) = prepare_amplitudes(qubit, &set.value)?;
            out.push(Action::Prepare { qubit, a0, a1 });
        }
    }
    Ok(())
}

fn compile_netlist<T: Scalar>(
    n: &Netlist,
    indices: &[usize],
    ctx: &ResolutionContext,
    width: &mut usize,
    out: &mut Vec<Action<T>>,
) -> Result<(), SimError> {
    // Netlist qubit k maps to register qubit k; ancillas get fresh scratch.
    let mut map: Vec<usize> = indices.to_vec();
    for &(_, bit) in &n.ancillas {
        *width += 1;
        map.push(*width);
        out.push(Action::Scratch(bit));
    }
    let mut cache: Vec<(crate::rewrite::GateApplication, DenseMatrix<T>)> = Vec::new();
    let mut gates = Vec::new();
    let mut measurements = n.measurements.iter().peekable();
    for (k, app) in n.apps.iter().enumerate() {
        while let Some(&&(_, q)) = measurements.peek().filter(|(pos, _)| *pos == k) {
            out.push(Action::Gates(std::mem::take(&mut gates)));
            out.push(Action::Measure(map[q - 1]));
            measurements.next();
        }
        let key_match = |(a, _): &&(crate::rewrite::GateApplication, DenseMatrix<T>)| {
            a.gate == app.gate && a.reversed == app.reversed && a.bindings == app.bindings
        };
        let matrix = match cache.iter().find(key_match) {
            Some((_, m)) => m.clone(),
            None => {
                let m = application_matrix::<T>(app, ctx)?;
                cache.push((app.clone(), m.clone()));
                m
            }
        };
        gates.push(Compiled {
            qubits: app.qubits.iter().map(|&q| map[q - 1]).collect(),
            image: matrix.permutation_image(),
            matrix,
        });
    }
    out.push(Action::Gates(gates));
    for &(_, q) in measurements {
        out.push(Action::Measure(map[q - 1]));
    }
    Ok(())
}

fn plan<T: Scalar>(p: &Program, ctx: &ResolutionContext, model: Option<&str>) -> Result<Plan<T>, SimError> {
    let mut init = Vec::new();
    for q in &p.memory_init {
        let mut w = Vec::new();
        let z: Complex<T> = q.zero.evaluate(&EvalContext::new(), &mut w)?;
        let o: Complex<T> = q.one.evaluate(&EvalContext::new(), &mut w)?;
        let norm = (z.norm_sqr() + o.norm_sqr()).sqrt();
        if norm.to_f64() == 0.0 {
            return Err(SimError::NonNormalizable { qubit: q.index, modulus: 0.0 });
        }
        if q.index == 0 || q.index > p.memory_size {
            return Err(RegisterError::OutOfMemoryRange {
                index: q.index,
                memory: p.memory_size,
            }
            .into());
        }
        init.push((q.index, z.unscale(norm), o.unscale(norm)));
    }
    let mut actions = Vec::new();
    let mut width = p.memory_size;
    let mut last_execute = None;
    let mut measure_all = true;
    for step in &p.steps {
        match step {
            ProgramStep::Execute { register, body } => {
                let indices = resolve_register(register, p.memory_size, &p.global_registers)?;
                let circuit: &Circuit = match body {
                    ExecuteBody::Inline(c) => c,
                    ExecuteBody::Reference(r) => ctx.resolve_circuit(r)?,
                    ExecuteBody::Subprogram(_) => return Err(SimError::Subprogram),
                };
                if circuit.size != register.size {
                    return Err(SimError::SizeMismatch {
                        register: register.size,
                        circuit: circuit.size,
                    });
                }
                prepare_actions(register, &indices, p, &mut actions)?;
                let n = flatten(circuit, ctx, model)?;
                compile_netlist(&n, &indices, ctx, &mut width, &mut actions)?;
                last_execute = Some(actions.len());
            }
            ProgramStep::Measure { register } => {
                measure_all = false;
                for q in resolve_register(register, p.memory_size, &p.global_registers)? {
                    actions.push(Action::Measure(q));
                }
            }
        }
    }
    Ok(Plan {
        memory: p.memory_size,
        init,
        actions,
        last_execute,
        measure_all,
    })
}

fn initial_engine<T: Scalar>(plan: &Plan<T>, force_dense: bool) -> Result<Engine<T>, SimError> {
    let mut e = Engine::Bits(vec![0u8; plan.memory]);
    if force_dense {
        e.densify()?;
    }
    for &(q, a0, a1) in &plan.init {
        e.set_qubit(q, a0, a1)?;
    }
    Ok(e)
}

fn run_gates<T: Scalar>(e: &mut Engine<T>, gates: &[Compiled<T>]) -> Result<(), SimError> {
    if let Engine::Bits(bits) = e {
        if gates.iter().all(|g| g.image.is_some()) {
            for g in gates {
                let image = g.image.as_ref().unwrap();
                let local = g.qubits.iter().fold(0usize, |acc, &q| (acc << 1) | bits[q - 1] as usize);
                let out = image[local];
                let k = g.qubits.len();
                for (j, &q) in g.qubits.iter().enumerate() {
                    bits[q - 1] = ((out >> (k - 1 - j)) & 1) as u8;
                }
            }
            return Ok(());
        }
    }
    let s = e.densify()?;
    for g in gates {
        s.apply_matrix(&g.matrix, &g.qubits);
    }
    Ok(())
}

fn run_shot<T: Scalar>(plan: &Plan<T>, seed: u64, force_dense: bool) -> Result<RunResult, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = initial_engine(plan, force_dense)?;
    let mut bits = BTreeMap::new();
    let mut probs = None;
    if plan.last_execute.is_none() {
        probs = e.probabilities(plan.memory);
    }
    for (k, a) in plan.actions.iter().enumerate() {
        match a {
            Action::Prepare { qubit, a0, a1 } => e.set_qubit(*qubit, *a0, *a1)?,
            Action::Scratch(bit) => e.push_qubit(*bit)?,
            Action::Gates(g) => run_gates(&mut e, g)?,
            Action::Measure(q) => {
                let b = e.measure(*q, &mut rng);
                if *q <= plan.memory {
                    bits.insert(*q, b);
                }
            }
        }
        if plan.last_execute == Some(k + 1) {
            probs = e.probabilities(plan.memory);
        }
    }
    if plan.measure_all {
        for q in 1..=plan.memory {
            bits.insert(q, e.measure(q, &mut rng));
        }
    }
    debug_assert!(e.width() >= plan.memory);
    Ok(RunResult {
        measured_bits: bits.into_iter().collect(),
        final_probabilities: probs,
        seed_used: seed,
    })
}

/// Memory state before the first circuit runs: memory initialisation plus
/// the first Execute's Prepare, if the program starts with one.
pub fn prepare_state<T: Scalar>(p: &Program, ctx: &ResolutionContext) -> Result<StateVector<T>, SimError> {
    let mut plan = plan::<T>(p, ctx, None)?;
    let first_gates = plan
        .actions
        .iter()
        .position(|a| !matches!(a, Action::Prepare { .. }))
        .unwrap_or(plan.actions.len());
    plan.actions.truncate(first_gates);
    let mut e = initial_engine(&plan, false)?;
    for a in &plan.actions {
        if let Action::Prepare { qubit, a0, a1 } = a {
            e.set_qubit(*qubit, *a0, *a1)?;
        }
    }
    Ok(e.densify()?.clone())
}

/// Applies one gate application, given its resolved gate.
pub fn apply_gate<T: Scalar>(
    s: &StateVector<T>,
    app: &crate::rewrite::GateApplication,
    gate: &Gate,
) -> Result<StateVector<T>, SimError> {
    let m = gate.matrix::<T>(&app.bindings)?;
    let m = if app.reversed { m.adjoint() } else { m };
    let mut out = s.clone();
    out.apply_matrix(&m, &app.qubits);
    Ok(out)
}

/// Runs `shots` shots; shot `k` draws from a generator seeded with `seed + k`.
pub fn run_program(p: &Program, ctx: &ResolutionContext, seed: u64, shots: usize) -> Result<Vec<RunResult>, SimError> {
    run_program_with::<f64>(
        p,
        ctx,
        &RunOptions {
            seed,
            shots,
            ..RunOptions::default()
        },
    )
}

pub fn run_program_with<T: Scalar>(p: &Program, ctx: &ResolutionContext, opts: &RunOptions) -> Result<Vec<RunResult>, SimError> {
    let plan = plan::<T>(p, ctx, opts.model.as_deref())?;
    (0..opts.shots as u64)
        .map(|k| run_shot(&plan, opts.seed.wrapping_add(k), opts.force_dense))
        .collect()
}
