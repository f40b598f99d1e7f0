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

//! In-memory QIS-XML domain types, independent of serialization.

use crate::expr::{self, EvalContext, ExprError};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;
use num_complex::Complex;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("cell ({row}, {col}) lies outside a {dim}x{dim} transformation")]
    CellOutOfBounds { row: usize, col: usize, dim: usize },
}

impl From<ExprError> for ModelError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::UnboundParameter(name) => ModelError::UnboundParameter(name),
            other => ModelError::Expression(other.to_string()),
        }
    }
}

/// One presentation of a value as an expression, tagged with its syntax.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbolic {
    pub syntax: Option<String>,
    pub expression: String,
}

/// Complex number with optional symbolic forms.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub symbolic: Vec<Symbolic>,
}

impl ComplexValue {
    pub const ONE: ComplexValue = ComplexValue {
        re: 1.0,
        im: 0.0,
        symbolic: Vec::new(),
    };

    pub fn new(re: f64, im: f64) -> Self {
        Self {
            re,
            im,
            symbolic: Vec::new(),
        }
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0)
    }

    pub fn symbolic(expression: impl Into<String>) -> Self {
        Self {
            re: 0.0,
            im: 0.0,
            symbolic: vec![Symbolic {
                syntax: None,
                expression: expression.into(),
            }],
        }
    }

    pub fn with_symbolic(mut self, syntax: Option<&str>, expression: impl Into<String>) -> Self {
        self.symbolic.push(Symbolic {
            syntax: syntax.map(str::to_string),
            expression: expression.into(),
        });
        self
    }

    pub fn numeric(&self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }

    pub fn is_one(&self) -> bool {
        self.re == 1.0 && self.im == 0.0 && self.symbolic.is_empty()
    }

    /// Resolves the value under `bindings`.
    ///
    /// The symbolic form is used when bindings are present or when the
    /// numeric fields are both zero (i.e. only an expression was written).
    /// Expressions that fail to parse fall back to the numeric fields and
    /// push a message onto `warnings`.
    pub fn evaluate<T: Scalar>(
        &self,
        bindings: &EvalContext<T>,
        warnings: &mut Vec<String>,
    ) -> Result<Complex<T>, ModelError> {
        let numeric = Complex::new(T::from_f64(self.re), T::from_f64(self.im));
        let wants_symbolic = !bindings.bindings.is_empty() || (self.re == 0.0 && self.im == 0.0);
        if !wants_symbolic || self.symbolic.is_empty() {
            return Ok(numeric);
        }
        let mut last_err = None;
        for sym in &self.symbolic {
            match expr::parse_expr(&sym.expression) {
                Ok(node) => return Ok(expr::eval_expr(&node, bindings)?),
                Err(e) => last_err = Some(e),
            }
        }
        if let Some(e) = last_err {
            warnings.push(format!(
                "symbolic value `{}` not evaluable ({e}); using numeric fields",
                self.symbolic[0].expression
            ));
        }
        Ok(numeric)
    }
}

/// Multiplier-scaled sparse unitary over `size` qubits, 1-based cells.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseUnitary {
    pub size: usize,
    pub multiplier: ComplexValue,
    pub cells: BTreeMap<(usize, usize), ComplexValue>,
}

impl SparseUnitary {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            multiplier: ComplexValue::ONE,
            cells: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.size
    }

    pub fn with_multiplier(mut self, m: ComplexValue) -> Self {
        self.multiplier = m;
        self
    }

    pub fn cell(mut self, row: usize, col: usize, value: ComplexValue) -> Self {
        self.cells.insert((row, col), value);
        self
    }

    /// Builds a transformation with value 1 at `(perm[c], c)` for each
    /// 1-based column `c`.
    pub fn permutation(size: usize, image: impl Fn(usize) -> usize) -> Self {
        let mut t = Self::new(size);
        for col in 1..=t.dim() {
            t.cells.insert((image(col), col), ComplexValue::real(1.0));
        }
        t
    }

    /// Dense matrix `multiplier × cell(r, c)`, zero where no cell is given.
    pub fn effective_matrix<T: Scalar>(&self, bindings: &EvalContext<T>) -> Result<DenseMatrix<T>, ModelError> {
        self.effective_matrix_with_warnings(bindings, &mut Vec::new())
    }

    pub fn effective_matrix_with_warnings<T: Scalar>(
        &self,
        bindings: &EvalContext<T>,
        warnings: &mut Vec<String>,
    ) -> Result<DenseMatrix<T>, ModelError> {
        let dim = self.dim();
        let mult = self.multiplier.evaluate(bindings, warnings)?;
        let mut m = DenseMatrix::zeros(dim);
        for (&(row, col), value) in &self.cells {
            if row == 0 || col == 0 || row > dim || col > dim {
                return Err(ModelError::CellOutOfBounds { row, col, dim });
            }
            m[(row - 1, col - 1)] = mult * value.evaluate(bindings, warnings)?;
        }
        Ok(m)
    }

    /// All free identifiers used by any symbolic form in the transformation.
    pub fn referenced_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for v in std::iter::once(&self.multiplier).chain(self.cells.values()) {
            for sym in &v.symbolic {
                if let Ok(node) = expr::parse_expr(&sym.expression) {
                    for n in expr::free_idents(&node) {
                        if !names.contains(&n) {
                            names.push(n);
                        }
                    }
                }
            }
        }
        names
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Identification {
    pub id: String,
    pub agency: Option<String>,
    pub version: Option<String>,
}

impl Identification {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            agency: None,
            version: None,
        }
    }

    pub fn as_reference(&self) -> Reference {
        Reference {
            id: self.id.clone(),
            agency: self.agency.clone(),
            version: self.version.clone(),
            library_id: None,
            uri: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Reference {
    pub id: String,
    pub agency: Option<String>,
    pub version: Option<String>,
    pub library_id: Option<String>,
    pub uri: Option<String>,
}

impl Reference {
    pub fn to(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            ..Self::default()
        }
    }
}

/// Name/description pair describing a gate, circuit or program port.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Port {
    pub name: String,
    pub description: Option<String>,
}

/// XML fragment carried through untouched (source text of the element).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpaqueXml(pub String);

#[derive(Clone, Debug, PartialEq)]
pub struct GateParameter {
    pub name: String,
    pub default: Option<ComplexValue>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub identification: Identification,
    pub name: String,
    pub nickname: Option<String>,
    pub description: Option<String>,
    pub parameters: Vec<GateParameter>,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
    pub transformation: SparseUnitary,
    pub image: Option<OpaqueXml>,
    pub proprietary_data: Option<OpaqueXml>,
}

impl Gate {
    pub fn new(id: &str, name: &str, transformation: SparseUnitary) -> Self {
        Self {
            identification: Identification::new(id),
            name: name.to_string(),
            nickname: None,
            description: None,
            parameters: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            transformation,
            image: None,
            proprietary_data: None,
        }
    }

    pub fn size(&self) -> usize {
        self.transformation.size
    }

    pub fn is_parametric(&self) -> bool {
        !self.parameters.is_empty()
    }

    /// Merges explicit `bindings` over the declared parameter defaults.
    pub fn bindings<T: Scalar>(&self, explicit: &BTreeMap<String, ComplexValue>) -> Result<EvalContext<T>, ModelError> {
        let mut ctx = EvalContext::new();
        let mut warnings = Vec::new();
        for p in &self.parameters {
            if let Some(d) = &p.default {
                ctx.bindings.insert(p.name.clone(), d.evaluate(&EvalContext::new(), &mut warnings)?);
            }
        }
        for (name, value) in explicit {
            ctx.bindings.insert(name.clone(), value.evaluate(&EvalContext::new(), &mut warnings)?);
        }
        Ok(ctx)
    }

    /// Effective matrix under defaults overridden by `explicit`.
    pub fn matrix<T: Scalar>(&self, explicit: &BTreeMap<String, ComplexValue>) -> Result<DenseMatrix<T>, ModelError> {
        self.transformation.effective_matrix(&self.bindings(explicit)?)
    }
}

/// Feed for one gate input: a circuit qubit or a constant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSource {
    Qubit(usize),
    Fixed(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitMap {
    pub source: MapSource,
    pub input: usize,
}

impl QubitMap {
    pub fn qubit(qubit: usize, input: usize) -> Self {
        Self {
            source: MapSource::Qubit(qubit),
            input,
        }
    }

    pub fn fixed(value: u8, input: usize) -> Self {
        Self {
            source: MapSource::Fixed(value),
            input,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperationTarget {
    Gate(Reference),
    Circuit(Reference),
    /// Computational-basis measurement of one circuit qubit.
    Measurement(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operation {
    pub maps: Vec<QubitMap>,
    pub target: OperationTarget,
    pub reverse: bool,
    pub bindings: BTreeMap<String, ComplexValue>,
}

impl Operation {
    pub fn gate(id: &str, qubits: &[usize]) -> Self {
        Self {
            maps: qubits
                .iter()
                .enumerate()
                .map(|(k, &q)| QubitMap::qubit(q, k + 1))
                .collect(),
            target: OperationTarget::Gate(Reference::to(id)),
            reverse: false,
            bindings: BTreeMap::new(),
        }
    }

    pub fn circuit(id: &str, qubits: &[usize]) -> Self {
        Self {
            target: OperationTarget::Circuit(Reference::to(id)),
            ..Self::gate(id, qubits)
        }
    }

    pub fn measurement(qubit: usize) -> Self {
        Self {
            maps: Vec::new(),
            target: OperationTarget::Measurement(qubit),
            reverse: false,
            bindings: BTreeMap::new(),
        }
    }

    pub fn reversed(mut self) -> Self {
        self.reverse = true;
        self
    }

    /// Circuit qubits this operation touches.
    pub fn qubits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .maps
            .iter()
            .filter_map(|m| match m.source {
                MapSource::Qubit(q) => Some(q),
                MapSource::Fixed(_) => None,
            })
            .collect();
        if let OperationTarget::Measurement(q) = self.target {
            out.push(q);
        }
        out
    }
}

pub type Step = Vec<Operation>;

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub identification: Option<Identification>,
    pub size: usize,
    pub name: Option<String>,
    pub description: Option<String>,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
    pub steps: Vec<Step>,
    pub proprietary_data: Option<OpaqueXml>,
}

impl Circuit {
    pub fn new(id: &str, name: &str, size: usize) -> Self {
        Self {
            identification: Some(Identification::new(id)),
            size,
            name: Some(name.to_string()),
            description: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            steps: Vec::new(),
            proprietary_data: None,
        }
    }

    pub fn id(&self) -> &str {
        self.identification.as_ref().map(|i| i.id.as_str()).unwrap_or("")
    }

    pub fn step(mut self, ops: Vec<Operation>) -> Self {
        self.steps.push(ops);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateEquivalentCircuit {
    pub gate_reference: Reference,
    pub model: Option<String>,
    pub circuit: Circuit,
    /// `input` names the equivalent circuit's qubit; the source is the
    /// replaced gate's input number (as `Qubit`) or a constant bit.
    pub input_remapping: Vec<QubitMap>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QubitSelector {
    Index(usize),
    Range { start: usize, end: usize },
    Register(Reference),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitSetSpec {
    pub targets: Vec<QubitSelector>,
    pub value: ComplexValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegisterSpec {
    pub identification: Option<Identification>,
    pub size: usize,
    pub selectors: Vec<QubitSelector>,
    pub prepare: Vec<QubitSetSpec>,
}

impl RegisterSpec {
    pub fn whole(size: usize) -> Self {
        Self {
            identification: None,
            size,
            selectors: Vec::new(),
            prepare: Vec::new(),
        }
    }

    pub fn indices(indices: &[usize]) -> Self {
        Self {
            selectors: indices.iter().map(|&i| QubitSelector::Index(i)).collect(),
            ..Self::whole(indices.len())
        }
    }
}

/// Initial amplitudes of one memory qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitInit {
    pub index: usize,
    pub zero: ComplexValue,
    pub one: ComplexValue,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExecuteBody {
    Inline(Box<Circuit>),
    Reference(Reference),
    /// Nested program or program reference; carried through verbatim and
    /// rejected by validation.
    Subprogram(OpaqueXml),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProgramStep {
    Execute { register: RegisterSpec, body: ExecuteBody },
    Measure { register: RegisterSpec },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub identification: Identification,
    pub name: Option<String>,
    pub memory_size: usize,
    pub memory_init: Vec<QubitInit>,
    pub global_registers: Vec<RegisterSpec>,
    pub steps: Vec<ProgramStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Library<M> {
    pub identification: Identification,
    pub name: Option<String>,
    pub members: Vec<M>,
}

impl<M> Library<M> {
    pub fn new(id: &str, members: Vec<M>) -> Self {
        Self {
            identification: Identification::new(id),
            name: None,
            members,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitMember {
    Circuit(Circuit),
    Equivalent(GateEquivalentCircuit),
}

pub type GateLibrary = Library<Gate>;
pub type CircuitLibrary = Library<CircuitMember>;
pub type ProgramLibrary = Library<Program>;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Instance {
    pub gate_libraries: Vec<GateLibrary>,
    pub circuit_libraries: Vec<CircuitLibrary>,
    pub program_libraries: Vec<ProgramLibrary>,
    pub external_library_refs: Vec<Reference>,
}

impl Instance {
    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.gate_libraries.iter().flat_map(|l| l.members.iter())
    }

    pub fn circuits(&self) -> impl Iterator<Item = &Circuit> {
        self.circuit_libraries.iter().flat_map(|l| {
            l.members.iter().filter_map(|m| match m {
                CircuitMember::Circuit(c) => Some(c),
                CircuitMember::Equivalent(_) => None,
            })
        })
    }

    pub fn equivalents(&self) -> impl Iterator<Item = &GateEquivalentCircuit> {
        self.circuit_libraries.iter().flat_map(|l| {
            l.members.iter().filter_map(|m| match m {
                CircuitMember::Equivalent(e) => Some(e),
                CircuitMember::Circuit(_) => None,
            })
        })
    }

    pub fn programs(&self) -> impl Iterator<Item = &Program> {
        self.program_libraries.iter().flat_map(|l| l.members.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hadamard() -> SparseUnitary {
        SparseUnitary::new(1)
            .with_multiplier(
                ComplexValue::real(0.707106781)
                    .with_symbolic(Some("odf"), "1/sqrt(2)")
                    .with_symbolic(Some("html"), "1/sqrt(2)"),
            )
            .cell(1, 1, ComplexValue::real(1.0))
            .cell(1, 2, ComplexValue::real(1.0))
            .cell(2, 1, ComplexValue::real(1.0))
            .cell(2, 2, ComplexValue::real(-1.0))
    }

    #[test]
    fn hadamard_effective_matrix_uses_stored_multiplier() {
        let m: DenseMatrix<f64> = hadamard().effective_matrix(&EvalContext::new()).unwrap();
        assert_eq!(m[(0, 0)], Complex::new(0.707106781, 0.0));
        assert_eq!(m[(1, 1)], Complex::new(-0.707106781, 0.0));
        assert!(m.is_unitary(1e-9));
    }

    #[test]
    fn pauli_z_and_zero_fill() {
        let z = SparseUnitary::new(1)
            .cell(1, 1, ComplexValue::real(1.0))
            .cell(2, 2, ComplexValue::real(-1.0));
        let m: DenseMatrix<f64> = z.effective_matrix(&EvalContext::new()).unwrap();
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(1, 1)].re, -1.0);
        assert_eq!(m[(0, 1)].norm(), 0.0);
        let empty: DenseMatrix<f64> = SparseUnitary::new(1).effective_matrix(&EvalContext::new()).unwrap();
        assert_eq!(empty, DenseMatrix::zeros(2));
        assert!(!empty.is_unitary(1e-9));
    }

    #[test]
    fn cell_order_does_not_matter() {
        let a = hadamard();
        let mut b = SparseUnitary::new(1).with_multiplier(a.multiplier.clone());
        for (k, v) in a.cells.iter().rev() {
            b.cells.insert(*k, v.clone());
        }
        let ma: DenseMatrix<f64> = a.effective_matrix(&EvalContext::new()).unwrap();
        let mb: DenseMatrix<f64> = b.effective_matrix(&EvalContext::new()).unwrap();
        assert_eq!(ma, mb);
    }

    #[test]
    fn symbolic_wins_under_bindings() {
        let t = SparseUnitary::new(1)
            .cell(1, 1, ComplexValue::real(1.0))
            .cell(2, 2, ComplexValue::real(1.0).with_symbolic(None, "exp(i*theta)"));
        let plain: DenseMatrix<f64> = t.effective_matrix(&EvalContext::new()).unwrap();
        assert_eq!(plain[(1, 1)], Complex::new(1.0, 0.0));
        let ctx = EvalContext::new().with("theta", Complex::new(std::f64::consts::PI, 0.0));
        let bound: DenseMatrix<f64> = t.effective_matrix(&ctx).unwrap();
        assert!((bound[(1, 1)] - Complex::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unbound_parameter_is_reported() {
        let t = SparseUnitary::new(1).cell(1, 1, ComplexValue::symbolic("phi"));
        assert_eq!(
            t.effective_matrix::<f64>(&EvalContext::new()),
            Err(ModelError::UnboundParameter("phi".into()))
        );
    }

    #[test]
    fn unparsable_symbolic_falls_back_with_warning() {
        let v = ComplexValue::real(0.5).with_symbolic(Some("html"), "<sup>1</sup>/2");
        let mut warnings = Vec::new();
        let ctx = EvalContext::new().with("x", Complex::new(1.0, 0.0));
        let z: Complex<f64> = v.evaluate(&ctx, &mut warnings).unwrap();
        assert_eq!(z, Complex::new(0.5, 0.0));
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn out_of_bounds_cell() {
        let t = SparseUnitary::new(1).cell(3, 1, ComplexValue::real(1.0));
        assert!(matches!(
            t.effective_matrix::<f64>(&EvalContext::new()),
            Err(ModelError::CellOutOfBounds { row: 3, .. })
        ));
    }

    #[test]
    fn absent_multiplier_is_one() {
        let t = SparseUnitary::new(1).cell(1, 2, ComplexValue::new(0.0, 2.0));
        let explicit = t.clone().with_multiplier(ComplexValue::real(1.0));
        let a: DenseMatrix<f64> = t.effective_matrix(&EvalContext::new()).unwrap();
        let b: DenseMatrix<f64> = explicit.effective_matrix(&EvalContext::new()).unwrap();
        assert_eq!(a, b);
    }
}
