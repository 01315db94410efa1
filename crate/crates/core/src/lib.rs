//! Exact arithmetic for Perron-type series expansions of numbers in (0, 1]:
//! digit extraction, cylinder geometry, the transport map between the
//! positive and alternating sides, and Monte-Carlo digit statistics.

pub mod cylinder;
pub mod digits;
pub mod error;
pub mod expansion;
pub mod interval;
pub mod measure;
pub mod montecarlo;
pub mod phi;
pub mod rational;
pub mod sampling;
pub mod stats;
pub mod transport;

pub use cylinder::{
    adjacent_boundary, child_ratio, compare_digitwise, cyl_bounds, cyl_bounds_p, cyl_bounds_pminus, CylinderBox,
    DigitOrder,
};
pub use digits::{validate_digits, DigitSeq, Side, ValidationReport, Violation};
pub use error::{Error, ErrorClass, Result};
pub use expansion::{
    cylinder_length, extract_p, extract_p_with, extract_pminus, extract_pminus_with, partial_sum_p, partial_sum_pminus,
    reconstruct_enclosure, BoundaryKind, BoundaryWitness, DigitOutcome, DigitStatus, Expander, Limits, Step,
};
pub use interval::Interval;
pub use montecarlo::{draw_rows, SampleConfig, SampleRow, SamplingMode};
pub use phi::{builtin_family, eval_phi, parse_phi_spec, BuiltinFamily, PhiError, PhiProgram, PhiRule, ProgramInfo};
pub use rational::{format_rational, parse_rational, ExactRational};
pub use transport::{
    is_membership, is_membership_with, transport_cylinder, transport_point, transport_point_with, witness_endpoint,
    BoundaryInfo, TransportResult,
};
pub use measure::{
    cover_measure_restricted, cover_measure_with_budget, exact_digit_law, mc_digit_law, CoverMeasure, DigitLawConfig,
    DigitLawReport, ExactLaw,
};
pub use stats::{
    digit_frequency, digit_stats, growth_exponent, renyi_profile, DigitStats, FrequencyReport, RenyiProfile, StatsRow,
};
