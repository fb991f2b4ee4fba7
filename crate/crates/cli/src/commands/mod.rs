pub mod estimate;
pub mod moments;
pub mod simulate;
pub mod transform;
