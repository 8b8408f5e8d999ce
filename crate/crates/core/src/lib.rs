//! Innovation/performance analysis of firm panels.
//!
//! The pipeline goes: parse a long-format indicator panel, average each
//! indicator over an innovation window and a performance window, min-max
//! normalize, and assign every company to a-priori centroids under a
//! weighted squared-Euclidean distance. Alongside that sit descriptive
//! statistics, log-log power-law fits, sigma-band outlier flags and 2D
//! Voronoi maps rendered to SVG.

pub mod cluster;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fixture;
pub mod geometry;
pub mod indicator;
pub mod ingest;
pub mod outliers;
pub mod pipeline;
pub mod stats;

pub use cluster::{
    assign_clusters, cross_tabulate, detect_collapse, innovation_distance, normalize,
    performance_distance, profile_clusters, resolve_collapse, Axis, ClusterAssignment,
    ClusterConfig, ClusterProfiles, CollapseDiagnosis, CollapseOutcome, CollapseParams,
    CompanyAssignment, CrossTab, NormalizedDataset,
};
pub use diagnostics::Diagnostic;
pub use error::{Error, Result};
pub use geometry::{
    compute_voronoi, log_project, render_svg, BBox, Point2D, Projection, SignFilter, SvgOptions,
    VoronoiCell, VoronoiDiagram,
};
pub use indicator::{IndicatorKind, IndicatorSet};
pub use ingest::{
    exclude_companies, parse_panel, window_average, AveragedDataset, Company, CompanyAverages,
    DroppedCompany, IndicatorPanel,
};
pub use outliers::{
    classify_systematic, sigma_band_flags, BandFlag, BandPosition, BandReport, SystematicReport,
};
pub use stats::{
    describe, power_law_fit, DescriptiveStats, KurtosisForm, MomentConvention, PowerLawFit,
    QuartileConvention, StatConventions, StdConvention,
};
