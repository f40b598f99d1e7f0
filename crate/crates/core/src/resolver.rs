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

//! Symbol tables over loaded instances and reference resolution.
//!
//! Every gate, circuit and program is registered under
//! `(kind, agency, id, version)`, where a missing agency or version is
//! inherited from the enclosing library. A [`Reference`] resolves by
//! filtering candidates with the same id on whichever of agency, version
//! and library id it names; exactly one survivor is required. When nothing
//! matches and the reference carries a `uri`, the lookup is repeated inside
//! the document behind that URI.
//!
//! URIs are loaded eagerly while the context is built so that a finished
//! context is immutable and can be shared across threads.

use crate::model::*;
use crate::xmlio;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Gate,
    Circuit,
    Program,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Gate => "gate",
            Kind::Circuit => "circuit",
            Kind::Program => "program",
        })
    }
}

/// Fully qualified identity of a registered object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub kind: Kind,
    pub agency: Option<String>,
    pub id: String,
    pub version: Option<String>,
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.kind)?;
        if let Some(a) = &self.agency {
            write!(f, "{a}:")?;
        }
        f.write_str(&self.id)?;
        if let Some(v) = &self.version {
            write!(f, "@{v}")?;
        }
        Ok(())
    }
}

fn describe(r: &Reference) -> String {
    let mut s = r.id.clone();
    if let Some(a) = &r.agency {
        s = format!("{a}:{s}");
    }
    if let Some(v) = &r.version {
        s.push_str(&format!("@{v}"));
    }
    if let Some(l) = &r.library_id {
        s.push_str(&format!(" in library {l}"));
    }
    if let Some(u) = &r.uri {
        s.push_str(&format!(" from {u}"));
    }
    s
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolveError {
    #[error("duplicate identifier {0}")]
    DuplicateIdentifier(Key),
    #[error("{kind} `{}` not found", describe(.reference))]
    NotFound { kind: Kind, reference: Reference },
    #[error("{kind} reference `{}` is ambiguous between {}", describe(.reference), .candidates.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "))]
    Ambiguous {
        kind: Kind,
        reference: Reference,
        candidates: Vec<Key>,
    },
    #[error("cannot load `{uri}`: {reason}")]
    LoaderFailure { uri: String, reason: String },
}

/// Bytes of a document fetched by a [`DocumentLoader`].
#[derive(Clone, Debug)]
pub struct LoadedDocument {
    /// Absolute identity used for cycle detection and de-duplication.
    pub canonical: String,
    /// Location against which the document's own relative URIs resolve.
    pub location: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

/// Fetches documents named by `uri` attributes.
pub trait DocumentLoader {
    fn load(&self, uri: &str, base: Option<&Path>) -> Result<LoadedDocument, String>;
}

/// Loads local files, resolving relative paths against the referencing
/// document's directory. Schemes other than `file:` are refused.
#[derive(Clone, Copy, Debug, Default)]
pub struct FileLoader;

impl DocumentLoader for FileLoader {
    fn load(&self, uri: &str, base: Option<&Path>) -> Result<LoadedDocument, String> {
        let path_part = if let Some(rest) = uri.strip_prefix("file://") {
            rest
        } else if let Some((scheme, _)) = uri.split_once("://") {
            return Err(format!("scheme `{scheme}` is not supported by the file loader"));
        } else {
            uri
        };
        let mut path = PathBuf::from(path_part);
        if path.is_relative() {
            if let Some(dir) = base.and_then(|b| if b.is_dir() { Some(b) } else { b.parent() }) {
                path = dir.join(path);
            }
        }
        let canon = path.canonicalize().map_err(|e| format!("{}: {e}", path.display()))?;
        let bytes = std::fs::read(&canon).map_err(|e| format!("{}: {e}", canon.display()))?;
        Ok(LoadedDocument {
            canonical: canon.display().to_string(),
            location: Some(canon),
            bytes,
        })
    }
}

/// An instance together with where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceDocument {
    pub instance: Instance,
    pub location: Option<PathBuf>,
}

impl From<Instance> for SourceDocument {
    fn from(instance: Instance) -> Self {
        Self {
            instance,
            location: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Slot {
    doc: usize,
    lib: usize,
    member: usize,
}

#[derive(Clone, Debug)]
struct Entry {
    key: Key,
    library_id: String,
    slot: Slot,
}

pub const DEFAULT_URI_DEPTH: usize = 4;

/// Immutable symbol table over a set of documents.
pub struct ResolutionContext {
    documents: Vec<SourceDocument>,
    /// Entries per document.
    doc_entries: Vec<Vec<Entry>>,
    /// Documents whose entries are visible to unqualified lookups.
    global_docs: Vec<usize>,
    /// Document loaded for each `(base location, uri)` pair.
    by_uri: BTreeMap<(Option<PathBuf>, String), Result<usize, String>>,
    equivalents: Vec<(Option<Key>, Slot)>,
}

impl fmt::Debug for ResolutionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResolutionContext")
            .field("documents", &self.documents.len())
            .field("gates", &self.count(Kind::Gate))
            .field("circuits", &self.count(Kind::Circuit))
            .field("programs", &self.count(Kind::Program))
            .finish()
    }
}

fn entries_of(doc: usize, inst: &Instance) -> Vec<Entry> {
    let mut out = Vec::new();
    let inherit = |own: &Identification, lib: &Identification, kind: Kind| Key {
        kind,
        agency: own.agency.clone().or_else(|| lib.agency.clone()),
        id: own.id.clone(),
        version: own.version.clone().or_else(|| lib.version.clone()),
    };
    for (li, lib) in inst.gate_libraries.iter().enumerate() {
        for (mi, g) in lib.members.iter().enumerate() {
            out.push(Entry {
                key: inherit(&g.identification, &lib.identification, Kind::Gate),
                library_id: lib.identification.id.clone(),
                slot: Slot { doc, lib: li, member: mi },
            });
        }
    }
    for (li, lib) in inst.circuit_libraries.iter().enumerate() {
        for (mi, m) in lib.members.iter().enumerate() {
            if let CircuitMember::Circuit(c) = m {
                if let Some(ident) = &c.identification {
                    out.push(Entry {
                        key: inherit(ident, &lib.identification, Kind::Circuit),
                        library_id: lib.identification.id.clone(),
                        slot: Slot { doc, lib: li, member: mi },
                    });
                }
            }
        }
    }
    for (li, lib) in inst.program_libraries.iter().enumerate() {
        for (mi, p) in lib.members.iter().enumerate() {
            out.push(Entry {
                key: inherit(&p.identification, &lib.identification, Kind::Program),
                library_id: lib.identification.id.clone(),
                slot: Slot { doc, lib: li, member: mi },
            });
        }
    }
    out
}

/// Every reference in the instance that names a URI.
fn uri_references(inst: &Instance) -> Vec<String> {
    fn circuit_refs(c: &Circuit, out: &mut Vec<String>) {
        for op in c.steps.iter().flatten() {
            if let OperationTarget::Gate(r) | OperationTarget::Circuit(r) = &op.target {
                out.extend(r.uri.clone());
            }
        }
    }
    fn register_refs(reg: &RegisterSpec, out: &mut Vec<String>) {
        for s in &reg.selectors {
            if let QubitSelector::Register(r) = s {
                out.extend(r.uri.clone());
            }
        }
    }
    let mut out = Vec::new();
    for c in inst.circuits() {
        circuit_refs(c, &mut out);
    }
    for e in inst.equivalents() {
        out.extend(e.gate_reference.uri.clone());
        circuit_refs(&e.circuit, &mut out);
    }
    for p in inst.programs() {
        for r in &p.global_registers {
            register_refs(r, &mut out);
        }
        for s in &p.steps {
            match s {
                ProgramStep::Execute { register, body } => {
                    register_refs(register, &mut out);
                    match body {
                        ExecuteBody::Reference(r) => out.extend(r.uri.clone()),
                        ExecuteBody::Inline(c) => circuit_refs(c, &mut out),
                        ExecuteBody::Subprogram(_) => {}
                    }
                }
                ProgramStep::Measure { register } => register_refs(register, &mut out),
            }
        }
    }
    out
}

struct Builder<'l> {
    loader: &'l dyn DocumentLoader,
    max_depth: usize,
    ctx: ResolutionContext,
    canonical: BTreeMap<String, usize>,
    lib_edges: Vec<(usize, usize)>,
}

impl Builder<'_> {
    fn add(&mut self, doc: SourceDocument) -> usize {
        let idx = self.ctx.documents.len();
        self.ctx.doc_entries.push(entries_of(idx, &doc.instance));
        self.ctx.documents.push(doc);
        idx
    }

    fn load(&mut self, uri: &str, base: Option<&Path>, depth: usize) -> Result<usize, String> {
        let cache_key = (base.map(Path::to_path_buf), uri.to_string());
        if let Some(r) = self.ctx.by_uri.get(&cache_key) {
            return r.clone();
        }
        let result = self.load_uncached(uri, base, depth);
        self.ctx.by_uri.insert(cache_key, result.clone());
        result
    }

    fn load_uncached(&mut self, uri: &str, base: Option<&Path>, depth: usize) -> Result<usize, String> {
        if depth > self.max_depth {
            return Err(format!("reference depth limit {} exceeded", self.max_depth));
        }
        let loaded = self.loader.load(uri, base)?;
        if let Some(&idx) = self.canonical.get(&loaded.canonical) {
            return Ok(idx);
        }
        let text = String::from_utf8(loaded.bytes).map_err(|e| format!("not UTF-8: {e}"))?;
        let (instance, diags) = xmlio::parse_instance(&text).map_err(|e| e.to_string())?;
        if let Some(d) = diags.iter().find(|d| d.severity == xmlio::Severity::Error) {
            return Err(d.to_string());
        }
        let idx = self.add(SourceDocument {
            instance,
            location: loaded.location,
        });
        self.canonical.insert(loaded.canonical, idx);
        self.follow(idx, depth)?;
        Ok(idx)
    }

    /// Loads the libraries and references named by document `idx`.
    fn follow(&mut self, idx: usize, depth: usize) -> Result<(), String> {
        let location = self.ctx.documents[idx].location.clone();
        let libs: Vec<String> = self.ctx.documents[idx]
            .instance
            .external_library_refs
            .iter()
            .filter_map(|r| r.uri.clone())
            .collect();
        for uri in libs {
            let loaded = self.load(&uri, location.as_deref(), depth + 1)?;
            self.lib_edges.push((idx, loaded));
        }
        for uri in uri_references(&self.ctx.documents[idx].instance) {
            // Failures surface when the reference is resolved.
            let _ = self.load(&uri, location.as_deref(), depth + 1);
        }
        Ok(())
    }
}

impl ResolutionContext {
    /// Builds a context over in-memory instances with the default file loader.
    pub fn build(docs: Vec<Instance>) -> Result<Self, ResolveError> {
        Self::build_with_loader(docs.into_iter().map(SourceDocument::from).collect(), &FileLoader)
    }

    pub fn build_with_loader(docs: Vec<SourceDocument>, loader: &dyn DocumentLoader) -> Result<Self, ResolveError> {
        Self::build_with_options(docs, loader, DEFAULT_URI_DEPTH)
    }

    pub fn build_with_options(
        docs: Vec<SourceDocument>,
        loader: &dyn DocumentLoader,
        max_depth: usize,
    ) -> Result<Self, ResolveError> {
        let mut b = Builder {
            loader,
            max_depth,
            ctx: ResolutionContext {
                documents: Vec::new(),
                doc_entries: Vec::new(),
                global_docs: Vec::new(),
                by_uri: BTreeMap::new(),
                equivalents: Vec::new(),
            },
            canonical: BTreeMap::new(),
            lib_edges: Vec::new(),
        };
        let mut roots = Vec::new();
        for d in docs {
            let canon = d
                .location
                .as_ref()
                .and_then(|p| p.canonicalize().ok())
                .map(|p| p.display().to_string());
            let idx = b.add(d);
            if let Some(c) = canon {
                b.canonical.insert(c, idx);
            }
            b.ctx.global_docs.push(idx);
            roots.push(idx);
        }
        for idx in roots {
            if let Err(reason) = b.follow(idx, 0) {
                let uri = b.ctx.documents[idx]
                    .instance
                    .external_library_refs
                    .iter()
                    .filter_map(|r| r.uri.clone())
                    .next()
                    .unwrap_or_default();
                return Err(ResolveError::LoaderFailure { uri, reason });
            }
        }
        // Libraries pulled in by a global document are global themselves.
        let mut changed = true;
        while changed {
            changed = false;
            for &(from, to) in &b.lib_edges {
                if b.ctx.global_docs.contains(&from) && !b.ctx.global_docs.contains(&to) {
                    b.ctx.global_docs.push(to);
                    changed = true;
                }
            }
        }
        let mut ctx = b.ctx;
        // Uniqueness holds across the globally visible set and within every
        // other document.
        let mut seen = BTreeSet::new();
        for &d in &ctx.global_docs {
            for e in &ctx.doc_entries[d] {
                if !seen.insert(e.key.clone()) {
                    return Err(ResolveError::DuplicateIdentifier(e.key.clone()));
                }
            }
        }
        for (d, entries) in ctx.doc_entries.iter().enumerate() {
            if ctx.global_docs.contains(&d) {
                continue;
            }
            let mut local = BTreeSet::new();
            for e in entries {
                if !local.insert(e.key.clone()) {
                    return Err(ResolveError::DuplicateIdentifier(e.key.clone()));
                }
            }
        }
        let mut equivalents = Vec::new();
        for d in 0..ctx.documents.len() {
            for (li, lib) in ctx.documents[d].instance.circuit_libraries.iter().enumerate() {
                for (mi, m) in lib.members.iter().enumerate() {
                    if let CircuitMember::Equivalent(e) = m {
                        let key = ctx.lookup(Kind::Gate, &e.gate_reference).ok().map(|(k, _)| k.clone());
                        equivalents.push((key, Slot { doc: d, lib: li, member: mi }));
                    }
                }
            }
        }
        ctx.equivalents = equivalents;
        Ok(ctx)
    }

    pub fn documents(&self) -> &[SourceDocument] {
        &self.documents
    }

    /// Number of registered objects of `kind` across all loaded documents.
    pub fn count(&self, kind: Kind) -> usize {
        self.doc_entries.iter().flatten().filter(|e| e.key.kind == kind).count()
    }

    pub fn keys(&self, kind: Kind) -> Vec<&Key> {
        self.global_docs
            .iter()
            .flat_map(|&d| self.doc_entries[d].iter())
            .filter(|e| e.key.kind == kind)
            .map(|e| &e.key)
            .collect()
    }

    fn filter<'a>(entries: impl Iterator<Item = &'a Entry>, kind: Kind, r: &Reference) -> Vec<&'a Entry> {
        entries
            .filter(|e| e.key.kind == kind && e.key.id == r.id)
            .filter(|e| r.agency.is_none() || e.key.agency == r.agency)
            .filter(|e| r.version.is_none() || e.key.version == r.version)
            .filter(|e| r.library_id.as_ref().is_none_or(|l| &e.library_id == l))
            .collect()
    }

    fn pick<'a>(cands: Vec<&'a Entry>, kind: Kind, r: &Reference) -> Result<Option<&'a Entry>, ResolveError> {
        match cands.len() {
            0 => Ok(None),
            1 => Ok(Some(cands[0])),
            _ => Err(ResolveError::Ambiguous {
                kind,
                reference: r.clone(),
                candidates: cands.iter().map(|e| e.key.clone()).collect(),
            }),
        }
    }

    fn lookup(&self, kind: Kind, r: &Reference) -> Result<(&Key, Slot), ResolveError> {
        let global = Self::filter(self.global_docs.iter().flat_map(|&d| self.doc_entries[d].iter()), kind, r);
        if let Some(e) = Self::pick(global, kind, r)? {
            return Ok((&e.key, e.slot));
        }
        if let Some(uri) = &r.uri {
            let loaded = self
                .by_uri
                .iter()
                .find(|((_, u), _)| u == uri)
                .map(|(_, res)| res.clone());
            match loaded {
                Some(Ok(d)) => {
                    let local = Self::filter(self.doc_entries[d].iter(), kind, r);
                    if let Some(e) = Self::pick(local, kind, r)? {
                        return Ok((&e.key, e.slot));
                    }
                }
                Some(Err(reason)) => {
                    return Err(ResolveError::LoaderFailure {
                        uri: uri.clone(),
                        reason,
                    })
                }
                None => {
                    return Err(ResolveError::LoaderFailure {
                        uri: uri.clone(),
                        reason: "document was not loaded".into(),
                    })
                }
            }
        }
        Err(ResolveError::NotFound {
            kind,
            reference: r.clone(),
        })
    }

    fn gate_at(&self, s: Slot) -> &Gate {
        &self.documents[s.doc].instance.gate_libraries[s.lib].members[s.member]
    }

    fn circuit_at(&self, s: Slot) -> &Circuit {
        match &self.documents[s.doc].instance.circuit_libraries[s.lib].members[s.member] {
            CircuitMember::Circuit(c) => c,
            CircuitMember::Equivalent(e) => &e.circuit,
        }
    }

    pub fn resolve_gate(&self, r: &Reference) -> Result<&Gate, ResolveError> {
        self.resolve_gate_entry(r).map(|(_, g)| g)
    }

    /// Resolves a gate reference, returning its fully qualified key as well.
    pub fn resolve_gate_entry(&self, r: &Reference) -> Result<(&Key, &Gate), ResolveError> {
        let (k, s) = self.lookup(Kind::Gate, r)?;
        Ok((k, self.gate_at(s)))
    }

    pub fn resolve_circuit(&self, r: &Reference) -> Result<&Circuit, ResolveError> {
        self.resolve_circuit_entry(r).map(|(_, c)| c)
    }

    pub fn resolve_circuit_entry(&self, r: &Reference) -> Result<(&Key, &Circuit), ResolveError> {
        let (k, s) = self.lookup(Kind::Circuit, r)?;
        Ok((k, self.circuit_at(s)))
    }

    pub fn resolve_program(&self, r: &Reference) -> Result<&Program, ResolveError> {
        let (_, s) = self.lookup(Kind::Program, r)?;
        Ok(&self.documents[s.doc].instance.program_libraries[s.lib].members[s.member])
    }

    /// Gate registered under exactly `key`.
    pub fn gate_by_key(&self, key: &Key) -> Option<&Gate> {
        self.doc_entries
            .iter()
            .flatten()
            .find(|e| &e.key == key)
            .map(|e| self.gate_at(e.slot))
    }

    fn equivalent_at(&self, s: Slot) -> &GateEquivalentCircuit {
        match &self.documents[s.doc].instance.circuit_libraries[s.lib].members[s.member] {
            CircuitMember::Equivalent(e) => e,
            CircuitMember::Circuit(_) => unreachable!("slot recorded for an equivalence"),
        }
    }

    /// Equivalence circuit declared for `gate` under `model`.
    pub fn equivalent_for(&self, gate: &Key, model: &str) -> Option<&GateEquivalentCircuit> {
        self.equivalents
            .iter()
            .filter(|(k, _)| k.as_ref() == Some(gate))
            .map(|(_, s)| self.equivalent_at(*s))
            .find(|e| e.model.as_deref() == Some(model))
    }

    /// All equivalence circuits declared for `model`.
    pub fn equivalents_for_model<'a>(&'a self, model: &'a str) -> impl Iterator<Item = &'a GateEquivalentCircuit> + 'a {
        self.equivalents
            .iter()
            .map(|(_, s)| self.equivalent_at(*s))
            .filter(move |e| e.model.as_deref() == Some(model))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate_lib(agency: Option<&str>, ids: &[&str]) -> Instance {
        let mut lib = GateLibrary::new("lib", ids.iter().map(|id| Gate::new(id, id, SparseUnitary::new(1))).collect());
        lib.identification.agency = agency.map(str::to_string);
        Instance {
            gate_libraries: vec![lib],
            ..Instance::default()
        }
    }

    #[test]
    fn inherits_library_agency() {
        let ctx = ResolutionContext::build(vec![gate_lib(Some("org.example"), &["H"])]).unwrap();
        let (key, _) = ctx.resolve_gate_entry(&Reference::to("H")).unwrap();
        assert_eq!(key.agency.as_deref(), Some("org.example"));
    }

    #[test]
    fn duplicate_in_same_agency() {
        let err = ResolutionContext::build(vec![gate_lib(Some("a"), &["H"]), gate_lib(Some("a"), &["H"])]).unwrap_err();
        assert!(matches!(err, ResolveError::DuplicateIdentifier(_)));
    }

    #[test]
    fn ambiguous_without_agency_and_exact_with_it() {
        let ctx = ResolutionContext::build(vec![gate_lib(Some("a"), &["H"]), gate_lib(Some("b"), &["H"])]).unwrap();
        assert!(matches!(
            ctx.resolve_gate(&Reference::to("H")),
            Err(ResolveError::Ambiguous { ref candidates, .. }) if candidates.len() == 2
        ));
        let r = Reference {
            agency: Some("b".into()),
            ..Reference::to("H")
        };
        assert_eq!(ctx.resolve_gate_entry(&r).unwrap().0.agency.as_deref(), Some("b"));
    }

    #[test]
    fn not_found() {
        let ctx = ResolutionContext::build(vec![gate_lib(None, &["H"])]).unwrap();
        assert!(matches!(ctx.resolve_gate(&Reference::to("NOPE")), Err(ResolveError::NotFound { .. })));
    }

    #[test]
    fn library_id_narrows_lookup() {
        let mut a = gate_lib(Some("a"), &["H"]);
        a.gate_libraries[0].identification.id = "first".into();
        let mut b = gate_lib(Some("b"), &["H"]);
        b.gate_libraries[0].identification.id = "second".into();
        let ctx = ResolutionContext::build(vec![a, b]).unwrap();
        let r = Reference {
            library_id: Some("second".into()),
            ..Reference::to("H")
        };
        assert_eq!(ctx.resolve_gate_entry(&r).unwrap().0.agency.as_deref(), Some("b"));
    }

    #[test]
    fn versions_compare_exactly() {
        let mut a = gate_lib(None, &["H"]);
        a.gate_libraries[0].members[0].identification.version = Some("1.0".into());
        let ctx = ResolutionContext::build(vec![a]).unwrap();
        let r = Reference {
            version: Some("1".into()),
            ..Reference::to("H")
        };
        assert!(ctx.resolve_gate(&r).is_err());
    }

    struct MapLoader(BTreeMap<String, String>);

    impl DocumentLoader for MapLoader {
        fn load(&self, uri: &str, _base: Option<&Path>) -> Result<LoadedDocument, String> {
            self.0
                .get(uri)
                .map(|s| LoadedDocument {
                    canonical: uri.to_string(),
                    location: None,
                    bytes: s.clone().into_bytes(),
                })
                .ok_or_else(|| "missing".to_string())
        }
    }

    fn circuit_using(uri: &str) -> Instance {
        let mut op = Operation::gate("X", &[1]);
        if let OperationTarget::Gate(r) = &mut op.target {
            r.uri = Some(uri.to_string());
        }
        Instance {
            circuit_libraries: vec![CircuitLibrary::new(
                "c",
                vec![CircuitMember::Circuit(Circuit::new("uses", "uses", 1).step(vec![op]))],
            )],
            ..Instance::default()
        }
    }

    #[test]
    fn uri_reference_loads_through_plugged_loader() {
        let remote = crate::xmlio::serialize_instance(&gate_lib(Some("remote"), &["X"]));
        let loader = MapLoader([("mem:gates".to_string(), remote)].into_iter().collect());
        let ctx = ResolutionContext::build_with_loader(vec![circuit_using("mem:gates").into()], &loader).unwrap();
        let op = &ctx.documents()[0].instance.circuits().next().unwrap().steps[0][0];
        let OperationTarget::Gate(r) = &op.target else { panic!() };
        let (key, _) = ctx.resolve_gate_entry(r).unwrap();
        assert_eq!(key.agency.as_deref(), Some("remote"));
        // Not visible to unqualified lookups.
        assert!(ctx.resolve_gate(&Reference::to("X")).is_err());
    }

    #[test]
    fn loader_failure_surfaces_on_resolution() {
        let loader = MapLoader(BTreeMap::new());
        let ctx = ResolutionContext::build_with_loader(vec![circuit_using("mem:absent").into()], &loader).unwrap();
        let r = Reference {
            uri: Some("mem:absent".into()),
            ..Reference::to("X")
        };
        assert!(matches!(ctx.resolve_gate(&r), Err(ResolveError::LoaderFailure { .. })));
    }

    #[test]
    fn file_loader_refuses_network_schemes() {
        assert!(FileLoader.load("http://example.org/gates.qisxml", None).is_err());
    }

    #[test]
    fn cyclic_library_references_terminate() {
        let mut a = gate_lib(Some("a"), &["A"]);
        a.external_library_refs.push(Reference {
            uri: Some("mem:b".into()),
            ..Reference::to("b")
        });
        let mut b = gate_lib(Some("b"), &["B"]);
        b.external_library_refs.push(Reference {
            uri: Some("mem:a".into()),
            ..Reference::to("a")
        });
        let loader = MapLoader(
            [
                ("mem:a".to_string(), crate::xmlio::serialize_instance(&a)),
                ("mem:b".to_string(), crate::xmlio::serialize_instance(&b)),
            ]
            .into_iter()
            .collect(),
        );
        let root = gate_lib(Some("root"), &["R"]);
        let mut root = root;
        root.external_library_refs.push(Reference {
            uri: Some("mem:a".into()),
            ..Reference::to("a")
        });
        let ctx = ResolutionContext::build_with_loader(vec![root.into()], &loader).unwrap();
        assert!(ctx.resolve_gate(&Reference::to("A")).is_ok());
        assert!(ctx.resolve_gate(&Reference::to("B")).is_ok());
        assert_eq!(ctx.documents().len(), 3);
    }

    #[test]
    fn depth_limit_is_enforced() {
        let mut docs = BTreeMap::new();
        for i in 0..8 {
            let mut inst = gate_lib(Some(&format!("a{i}")), &["G"]);
            if i < 7 {
                inst.external_library_refs.push(Reference {
                    uri: Some(format!("mem:{}", i + 1)),
                    ..Reference::to("next")
                });
            }
            docs.insert(format!("mem:{i}"), crate::xmlio::serialize_instance(&inst));
        }
        let mut root = Instance::default();
        root.external_library_refs.push(Reference {
            uri: Some("mem:0".into()),
            ..Reference::to("first")
        });
        let err = ResolutionContext::build_with_loader(vec![root.clone().into()], &MapLoader(docs.clone())).unwrap_err();
        assert!(matches!(err, ResolveError::LoaderFailure { ref reason, .. } if reason.contains("depth")));
        let deep = ResolutionContext::build_with_options(vec![root.into()], &MapLoader(docs), 16).unwrap();
        assert_eq!(deep.documents().len(), 9);
    }
}
