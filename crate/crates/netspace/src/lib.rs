//! Numerics for anisotropic net spaces: net-averaging functions of
//! grid-sampled functions on the plane, the associated quasi-norms, a
//! four-part block-mean decomposition, constructive K-functional bounds
//! with an interpolation functional, and randomized verification
//! campaigns for the inequalities the machinery rests on.

pub mod decomp;
pub mod error;
pub mod grid;
pub mod io;
pub mod kfunc;
pub mod netavg;
pub mod norms;
pub mod util;
pub mod verify;

pub use decomp::{check_zero_means, decompose, pad_to_blocks, Decomposition, Tau, ZeroMeanReport};
pub use error::{Error, Result};
pub use grid::{
    build_sat, make_indicator_2d, random_grid, tensor, Grid1D, Grid2D, GridFamily,
    SummedAreaTable,
};
pub use io::{load_grid_csv, read_grid_csv, save_grid_csv, write_grid_csv};
pub use kfunc::{
    build_k_curve, component_norms, embedding_ratio, interpolation_functional, k_upper,
    CandidateCost, ComponentNorms, InterpParams, KCurve,
};
pub use netavg::{
    build_net_average_table, morrey_average, net_average_1d, net_average_query, AverageTable1D,
    NetAverageTable, TailModel,
};
pub use norms::{
    net_norm_1d, net_norm_1d_breakdown, net_norm_2d, net_norm_2d_breakdown, norm_from_table,
    Exponents1D, Exponents2D, NormBreakdown, QIndex, QuadratureSpec,
};
pub use verify::{
    random_step_function, run_campaign, verify_hardy, CheckRecord, HardyCheck, CampaignConfig,
    VerificationReport,
    Witness,
};
