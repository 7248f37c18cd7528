pub mod analytics;
pub mod ensemble;
pub mod noise;
pub mod quadrature;
pub mod quantum;
pub mod sweep;
