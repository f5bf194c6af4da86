pub mod diagrams;
pub mod weyl;
