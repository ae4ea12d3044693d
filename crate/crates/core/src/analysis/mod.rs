//! Zeros, fields, streamlines and identity checks.

mod field;
mod streamline;
mod verify;
mod zeros;

pub use field::{sample_field, sample_field_of, FieldGrid, GridSpec, CSV_COLUMNS};
pub use streamline::{trace_streamline, trace_streamline_in, trace_streamline_of};
pub use verify::{verify_all, verify_identity, Params, IDENTITIES};
pub use zeros::{
    count_zeros, count_zeros_of, find_zeros, find_zeros_of, winding_number, Region, Zero, MAX_DEPTH,
    MULTIPLICITY_CAP,
};
