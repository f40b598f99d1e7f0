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

//! `qisxml` command-line front end.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qisxml::model::*;
use qisxml::resolver::{FileLoader, ResolutionContext, SourceDocument};
use qisxml::sim::{run_program_with, RunOptions};
use qisxml::xmlio::{has_errors, parse_instance, serialize_instance, Severity};
use qisxml::{codegen, genadder, rewrite, stdgates, svgrender, validate};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qisxml", version, about = "Validate, simulate, render and compile QIS-XML documents")]
struct Cli {
    /// Do not load the standard gate library.
    #[arg(long, global = true)]
    no_stdgates: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Second-level validation report.
    Validate {
        #[arg(required = true)]
        files: Vec<String>,
        /// Tab-separated findings instead of the text report.
        #[arg(long)]
        tsv: bool,
    },
    /// Draw a circuit (or a single gate) as SVG.
    Render {
        file: String,
        #[arg(long, required_unless_present = "gate", conflicts_with = "gate")]
        circuit: Option<String>,
        #[arg(long)]
        gate: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Write the flattened netlist back as QIS-XML.
    Flatten {
        file: String,
        #[arg(long)]
        circuit: String,
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Run a program on the state-vector simulator.
    Simulate {
        file: String,
        #[arg(long)]
        program: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shots: usize,
        /// Print final basis-state probabilities.
        #[arg(long)]
        probs: bool,
        #[arg(long)]
        model: Option<String>,
        /// Disable the permutation fast path.
        #[arg(long)]
        dense: bool,
    },
    /// Emit source for an external simulator.
    Compile {
        file: String,
        #[arg(long)]
        program: String,
        #[arg(long, value_enum)]
        target: Target,
        #[command(flatten)]
        out: Out,
    },
    /// Generate an n-bit ripple-carry adder.
    Genadder {
        #[arg(long)]
        bits: usize,
        /// Also emit a program adding A and B.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        add: Option<Vec<u128>>,
        #[command(flatten)]
        out: Out,
    },
    /// HTML summary of the gates and circuits in a document.
    Report {
        file: String,
        #[command(flatten)]
        out: Out,
    },
    /// List the standard gate library.
    Gates,
}

#[derive(Args)]
struct Out {
    /// Output file, `-` for standard output.
    #[arg(short = 'o', long = "output", default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Qcl,
    Qml,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: e.into() }
}

fn processing(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, error: e.into() }
}

type Outcome = Result<u8, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input").map_err(usage)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}")).map_err(usage)
    }
}

/// Writes to standard output; a reader that went away early is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(usage(anyhow::Error::new(e).context("writing standard output")))
        }
        _ => Ok(()),
    }
}

fn write_output(out: &Out, text: &str) -> Result<(), Failure> {
    if out.output == "-" {
        emit(text)
    } else {
        std::fs::write(&out.output, text).with_context(|| format!("writing {}", out.output)).map_err(usage)
    }
}

fn stdlib_instance() -> Result<Instance, Failure> {
    match std::env::var_os("QISXML_STDLIB") {
        Some(path) => {
            let path = PathBuf::from(path);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading QISXML_STDLIB {}", path.display()))
                .map_err(usage)?;
            let (inst, diags) = parse_instance(&text).map_err(processing)?;
            if has_errors(&diags) {
                return Err(processing(anyhow!("{} does not parse cleanly", path.display())));
            }
            Ok(inst)
        }
        None => Ok(stdgates::standard_library()),
    }
}

struct Loaded {
    instance: Instance,
    diagnostics: Vec<qisxml::xmlio::ParseDiagnostic>,
    ctx: ResolutionContext,
}

fn load(path: &str, no_stdgates: bool) -> Result<Loaded, Failure> {
    let text = read_input(path)?;
    let (instance, diagnostics) = parse_instance(&text).with_context(|| path.to_string()).map_err(processing)?;
    let location = (path != "-").then(|| PathBuf::from(path));
    let mut docs = vec![SourceDocument {
        instance: instance.clone(),
        location,
    }];
    if !no_stdgates {
        let std = stdlib_instance()?;
        // A document that carries its own copy of the library wins.
        let same = |a: &GateLibrary, b: &GateLibrary| a.identification == b.identification;
        let shadowed = std
            .gate_libraries
            .iter()
            .all(|l| instance.gate_libraries.iter().any(|u| same(u, l)));
        if !shadowed {
            docs.push(std.into());
        }
    }
    let ctx = ResolutionContext::build_with_loader(docs, &FileLoader).map_err(processing)?;
    Ok(Loaded {
        instance,
        diagnostics,
        ctx,
    })
}

/// Like [`load`] but refuses documents with parse errors.
fn load_clean(path: &str, no_stdgates: bool) -> Result<Loaded, Failure> {
    let l = load(path, no_stdgates)?;
    for d in &l.diagnostics {
        eprintln!("{path}: {d}");
    }
    if has_errors(&l.diagnostics) {
        return Err(processing(anyhow!("{path} has structural errors")));
    }
    Ok(l)
}

fn cmd_validate(files: &[String], tsv: bool, no_stdgates: bool) -> Outcome {
    let mut errors = 0;
    for f in files {
        let l = load(f, no_stdgates)?;
        let report = validate::validate_instance(&l.instance, &l.ctx);
        let mut o = String::new();
        if files.len() > 1 {
            let _ = writeln!(o, "== {f}");
        }
        for d in &l.diagnostics {
            if d.severity == Severity::Error {
                errors += 1;
            }
            let _ = writeln!(o, "{d}");
        }
        o.push_str(&if tsv { report.to_tsv() } else { report.render() });
        emit(&o)?;
        errors += report.error_count();
    }
    Ok(u8::from(errors > 0))
}

fn find_circuit<'a>(ctx: &'a ResolutionContext, id: &str) -> Result<&'a Circuit, Failure> {
    ctx.resolve_circuit(&Reference::to(id)).map_err(processing)
}

fn cmd_render(file: &str, circuit: Option<&str>, gate: Option<&str>, model: Option<&str>, out: &Out, no_std: bool) -> Outcome {
    let l = load_clean(file, no_std)?;
    let svg = if let Some(g) = gate {
        svgrender::render_gate_glyph(l.ctx.resolve_gate(&Reference::to(g)).map_err(processing)?)
    } else {
        let id = circuit.unwrap_or_default();
        let c = find_circuit(&l.ctx, id)?;
        match model {
            Some(m) => {
                let n = rewrite::flatten(c, &l.ctx, Some(m)).map_err(processing)?;
                svgrender::render_circuit(&n.to_circuit(id, c.name.as_deref().unwrap_or(id)), &l.ctx)
            }
            None => svgrender::render_circuit(c, &l.ctx),
        }
        .map_err(processing)?
    };
    write_output(out, &svg)?;
    Ok(0)
}

fn cmd_flatten(file: &str, circuit: &str, model: Option<&str>, out: &Out, no_std: bool) -> Outcome {
    let l = load_clean(file, no_std)?;
    let c = find_circuit(&l.ctx, circuit)?;
    let n = rewrite::flatten(c, &l.ctx, model).map_err(processing)?;
    let flat = n.to_circuit(&format!("{circuit}_flat"), c.name.as_deref().unwrap_or(circuit));
    let inst = Instance {
        circuit_libraries: vec![CircuitLibrary::new("flattened", vec![CircuitMember::Circuit(flat)])],
        ..Instance::default()
    };
    write_output(out, &serialize_instance(&inst))?;
    Ok(0)
}

struct SimArgs<'a> {
    program: &'a str,
    seed: u64,
    shots: usize,
    probs: bool,
    model: Option<String>,
    dense: bool,
}

fn cmd_simulate(file: &str, a: SimArgs, no_std: bool) -> Outcome {
    let l = load_clean(file, no_std)?;
    let p = l.ctx.resolve_program(&Reference::to(a.program)).map_err(processing)?;
    let opts = RunOptions {
        seed: a.seed,
        shots: a.shots,
        model: a.model,
        force_dense: a.dense,
    };
    let runs = run_program_with::<f64>(p, &l.ctx, &opts).map_err(processing)?;
    let mut o = String::new();
    for (shot, r) in runs.iter().enumerate() {
        let _ = writeln!(o, "shot {shot}: {}", r.dump());
    }
    if a.probs {
        match runs.last().and_then(|r| r.final_probabilities.as_ref()) {
            Some(probs) => {
                for (index, pr) in probs {
                    if *pr > 1e-12 {
                        let _ = writeln!(o, "{:0width$b} {pr:.6}", index, width = p.memory_size);
                    }
                }
            }
            None => eprintln!("probabilities unavailable for a {}-qubit memory", p.memory_size),
        }
    }
    emit(&o)?;
    Ok(0)
}

fn cmd_compile(file: &str, program: &str, target: Target, out: &Out, no_std: bool) -> Outcome {
    let l = load_clean(file, no_std)?;
    let p = l.ctx.resolve_program(&Reference::to(program)).map_err(processing)?;
    let text = match target {
        Target::Qcl => codegen::emit_qcl(p, &l.ctx),
        Target::Qml => codegen::emit_qml(p, &l.ctx),
    }
    .map_err(processing)?;
    write_output(out, &text)?;
    Ok(0)
}

fn cmd_genadder(bits: usize, add: Option<&[u128]>, out: &Out) -> Outcome {
    let add = add.map(|v| (v[0], v[1]));
    let inst = genadder::generate_document(bits, add).map_err(usage)?;
    write_output(out, &serialize_instance(&inst))?;
    Ok(0)
}

fn html_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn amplitude(z: qisxml::Amplitude) -> String {
    let r = |v: f64| {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_string() } else { s.to_string() }
    };
    match (z.re.abs() < 1e-12, z.im.abs() < 1e-12) {
        (_, true) => r(z.re),
        (true, false) => format!("{}i", r(z.im)),
        (false, false) => format!("{}{}{}i", r(z.re), if z.im < 0.0 { "-" } else { "+" }, r(z.im.abs())),
    }
}

fn gate_html(o: &mut String, g: &Gate) {
    let _ = writeln!(
        o,
        "<h2>{} ({})</h2>\n<p>Size {}</p>",
        html_escape(&g.name),
        html_escape(&g.identification.id),
        g.size()
    );
    if let Some(nick) = &g.nickname {
        let _ = writeln!(o, "<p><i>{}</i></p>", html_escape(nick));
    }
    if let Some(d) = &g.description {
        let _ = writeln!(o, "<p>{}</p>", html_escape(d));
    }
    o.push_str(&svgrender::render_gate_glyph(g));
    o.push('\n');
    match g.matrix::<f64>(&Default::default()) {
        Ok(m) => {
            o.push_str("<table border=\"1\">\n");
            for r in 0..m.dim() {
                o.push_str("<tr>");
                for z in m.row(r) {
                    let _ = write!(o, "<td>{}</td>", amplitude(*z));
                }
                o.push_str("</tr>\n");
            }
            o.push_str("</table>\n");
        }
        Err(e) => {
            let _ = writeln!(o, "<p>matrix unavailable: {}</p>", html_escape(&e.to_string()));
        }
    }
}

fn cmd_report(file: &str, out: &Out, no_std: bool) -> Outcome {
    let l = load_clean(file, no_std)?;
    let mut o = String::from("<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>QIS-XML report</title></head>\n<body>\n");
    let _ = writeln!(o, "<h1>{}</h1>", html_escape(file));
    for g in l.instance.gates() {
        gate_html(&mut o, g);
    }
    for c in l.instance.circuits() {
        let _ = writeln!(
            o,
            "<h2>{} ({})</h2>\n<p>Size {}, {} step(s)</p>",
            html_escape(c.name.as_deref().unwrap_or_default()),
            html_escape(c.id()),
            c.size,
            c.steps.len()
        );
        if let Some(d) = &c.description {
            let _ = writeln!(o, "<p>{}</p>", html_escape(d));
        }
        match svgrender::render_circuit(c, &l.ctx) {
            Ok(svg) => o.push_str(&svg),
            Err(e) => {
                let _ = write!(o, "<p>cannot draw: {}</p>", html_escape(&e.to_string()));
            }
        }
        o.push('\n');
    }
    for p in l.instance.programs() {
        let _ = writeln!(
            o,
            "<h2>Program {}</h2>\n<p>Memory {}, {} step(s)</p>",
            html_escape(&p.identification.id),
            p.memory_size,
            p.steps.len()
        );
    }
    let report = validate::validate_instance(&l.instance, &l.ctx);
    let _ = writeln!(o, "<h2>Validation</h2>\n<pre>{}</pre>", html_escape(&report.render()));
    o.push_str("</body>\n</html>\n");
    write_output(out, &o)?;
    Ok(0)
}

fn cmd_gates() -> Outcome {
    let inst = stdlib_instance()?;
    let mut o = String::new();
    for g in inst.gates() {
        let _ = writeln!(o, "{:<10} {:<3} {}", g.identification.id, g.size(), g.name);
    }
    emit(&o)?;
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    let ns = cli.no_stdgates;
    match cli.command {
        Command::Validate { files, tsv } => cmd_validate(&files, tsv, ns),
        Command::Render {
            file,
            circuit,
            gate,
            model,
            out,
        } => cmd_render(&file, circuit.as_deref(), gate.as_deref(), model.as_deref(), &out, ns),
        Command::Flatten { file, circuit, model, out } => cmd_flatten(&file, &circuit, model.as_deref(), &out, ns),
        Command::Simulate {
            file,
            program,
            seed,
            shots,
            probs,
            model,
            dense,
        } => cmd_simulate(
            &file,
            SimArgs {
                program: &program,
                seed,
                shots,
                probs,
                model,
                dense,
            },
            ns,
        ),
        Command::Compile {
            file,
            program,
            target,
            out,
        } => cmd_compile(&file, &program, target, &out, ns),
        Command::Genadder { bits, add, out } => cmd_genadder(bits, add.as_deref(), &out),
        Command::Report { file, out } => cmd_report(&file, &out, ns),
        Command::Gates => cmd_gates(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qisxml: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
