pub mod fit;
pub mod quadrature;
pub mod specfun;

pub use fit::{fit_line, least_squares, log_log_slope, LineFit};
pub use quadrature::{integrate, integrate_semi_infinite, oscillatory_laplace, Quad, QuadOptions};
