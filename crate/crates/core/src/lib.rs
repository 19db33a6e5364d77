//! Workbench for monadic second-order theories of finite colored
//! partial-function graphs: composition operations on graphs and on their
//! finite theories, Ehrenfeucht-Fraisse oracles, closure tables with minimal
//! witnesses, finite satisfiability of MSO sentences with one unary function
//! symbol, spectra with eventual-periodicity certificates, and the pumping
//! construction behind them.

pub mod algebra;
pub mod canon;
pub mod enumerate;
pub mod epsets;
pub mod graph;
pub mod mso;
pub mod par;
pub mod spectra;
pub mod theory;
pub mod verify;
