//! Planar Poisson-Voronoi and Poisson-Delaunay mosaics: cells, typical
//! cells, calibrated thresholds and exceedance center processes.

pub mod bounds;
pub mod calibrate;
pub mod center;
pub mod delaunay;
pub mod spec;
pub mod typical;
pub mod voronoi;

pub use bounds::{
    check_overlap_bound_delaunay, check_pair_bound_voronoi, delaunay_shape_eps, lens_area, pair_bound_rhs,
    OverlapBoundReport, PairBoundConfig, PairBoundReport, PairBoundRow,
};
pub use calibrate::{
    calibrate_at_level, calibrate_v_t, calibrate_v_t_exact, exact_survival, min_calibration_sample, CalibratedThreshold, CalibrationMode,
};
pub use center::{build_center_process, gumbel_statistic_mosaic, CenterProcessOutput};
pub use delaunay::{delaunay_cells, delaunay_cells_bruteforce, delaunay_cells_certified, incircle_sos, DelaunayCell};
pub use spec::{MosaicKind, MosaicSpec};
pub use typical::{
    deviation_tail_profile, sample_typical, sample_typical_delaunay, sample_typical_voronoi, typical_voronoi_cell,
    DeviationTailPoint, TypicalCellSample,
};
pub use voronoi::{
    cone_index, stabilization_radius_voronoi, stabilization_tail, voronoi_cell, voronoi_cell_bruteforce,
    voronoi_cell_clipped, stabilization_trials_voronoi, StabilizationReport, TaggedPolygon, VoronoiCell, N_CONES,
};
