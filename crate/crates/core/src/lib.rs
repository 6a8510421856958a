//! Compilation and analysis toolkit for time-multiplexed (switched) qubit control.
//!
//! The pipeline is: build or ingest a circuit, rebase it to a hardware gate set,
//! route it onto the coupling map, assign qubits to control switches, serialize
//! concurrent single-qubit gates that share a switch, and report the runtime
//! overhead relative to the routed circuit.
//!
//! ```
//! use mux_overhead::prelude::*;
//!
//! let spec = grid_spec(square_grid(5, 5).unwrap());
//! let cfg = RandomCircuitConfig::new(25, 200, 7);
//! let logical = random_circuit(&cfg, &spec).unwrap();
//! let report = run_pipeline(&logical, &spec, &PipelineParams::new(4, 7)).unwrap();
//! assert!(report.rel_overhead >= 1.0);
//! ```

pub mod analysis;
pub mod benchgen;
pub mod circuit;
pub mod coupler;
mod error;
pub mod grouping;
pub mod hardware;
pub mod models;
pub mod parallel;
pub mod qasm;
pub mod router;
pub mod serializer;
pub mod stats;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        fit_log_model, overhead_report, run_pipeline, sweep_k, FitResult, OverheadReport,
        PipelineParams, ReportMeta, SweepTable,
    };
    pub use crate::benchgen::{algo_circuit, random_circuit, Algorithm, RandomCircuitConfig};
    pub use crate::circuit::{
        asap_schedule, build_dag, depth, gate_densities, layer_indices, Circuit, CircuitDag,
        DensityReport, Gate, GateClass, GateKind, Schedule,
    };
    pub use crate::coupler::{group_couplers_alternating, verify_conflict_free, CouplerGrouping};
    pub use crate::grouping::{
        balanced_sizes, clustered_grouping, dispersed_grouping, random_grouping, trivial_grouping,
        GroupingStrategy, SwitchGrouping,
    };
    pub use crate::hardware::{
        eagle_spec, grid_spec, heavy_hexagon_127, square_grid, CouplingMap, HardwareSpec,
    };
    pub use crate::models::{
        expected_max_exponential, queue_max_waiting_mc, toy_model_run, ToyModelConfig,
    };
    pub use crate::qasm::{emit_qasm, parse_qasm};
    pub use crate::router::{rebase_to_native, route, RoutedCircuit};
    pub use crate::serializer::{
        serialize, strip_mux_gates, OrderHeuristic, SerializedCircuit, SerializerOptions,
    };
    pub use crate::{Error, Result};
}
