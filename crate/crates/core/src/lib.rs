//! Flow graphs for a mini-Java subset.
//!
//! A single `int` method is parsed ([`ast`]), labelled ([`textgen`]) and
//! mapped onto a language-independent model ([`flowgraph`]). Control flow
//! ([`controlflow`]), def/use sets ([`defuse`]) and data flow ([`dataflow`])
//! are then computed on that model, and [`validator`] checks the result
//! against a `.validate` specification.
//!
//! ```
//! use flowgraph::Analysis;
//!
//! let a = Analysis::from_source("int m() { int a = 1; return a; }").unwrap();
//! let edges: Vec<_> = a.control.edges.edges()
//!     .map(|(x, y)| format!("{} --> {}", a.graph.txt(x), a.graph.txt(y)))
//!     .collect();
//! assert_eq!(edges, ["m() --> int a = 1;", "int a = 1; --> return a;", "return a; --> Exit"]);
//! ```

pub mod ast;
pub mod cli;
pub mod controlflow;
pub mod dataflow;
pub mod defuse;
pub mod flowgraph;
pub mod textgen;
pub mod validator;

use thiserror::Error;

use crate::controlflow::{ControlFlow, ControlFlowError};
use crate::dataflow::DataFlow;
use crate::defuse::DefUseAttr;
use crate::flowgraph::{FlowGraph, TraceMap};
use crate::textgen::TextAttr;
use crate::validator::{ValidationReport, ValidationSpec};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ast::ParseError),
    #[error(transparent)]
    ControlFlow(#[from] ControlFlowError),
    #[error(transparent)]
    Spec(#[from] validator::SpecError),
}

/// Every phase's result for one method.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub method: ast::Method,
    pub text: TextAttr,
    pub graph: FlowGraph,
    pub trace: TraceMap,
    pub control: ControlFlow,
    pub defuse: DefUseAttr,
    pub data: DataFlow,
}

impl Analysis {
    pub fn from_source(source: &str) -> Result<Self, Error> {
        let method = ast::parse_program(source)?;
        Ok(Self::from_method(method)?)
    }

    pub fn from_method(method: ast::Method) -> Result<Self, ControlFlowError> {
        let text = textgen::compute_text(&method);
        let (mut graph, trace) = flowgraph::build_flowgraph(&method, &text);
        flowgraph::collect_vars(&method, &mut graph);
        let control = controlflow::analyze_control_flow(&graph)?;
        let defuse = defuse::compute_def_use(&method, &graph, &trace);
        let data = dataflow::compute_data_flow(&graph, &control.edges, &defuse);
        Ok(Analysis {
            method,
            text,
            graph,
            trace,
            control,
            defuse,
            data,
        })
    }

    pub fn emit_spec(&self) -> ValidationSpec {
        validator::emit_spec(&self.graph, &self.control.edges, &self.data.edges)
    }

    /// Check a spec; data flow warnings are carried into the report.
    pub fn check(&self, spec: &ValidationSpec) -> ValidationReport {
        let mut report = validator::check(spec, &self.graph, &self.control.edges, &self.data.edges);
        report.warnings = self.data.warnings.iter().map(ToString::to_string).collect();
        report
    }
}
