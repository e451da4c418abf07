pub mod dd;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod matrix_jet;
pub mod models;
pub mod moments;
pub mod multiindex;
pub mod normal_forms;
pub mod oracle;
pub mod par;
pub mod peak_gram;
pub mod quadrature;
pub mod rational;
pub mod series;
