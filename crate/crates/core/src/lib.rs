pub mod certify;
pub mod cheb;
pub mod interval;
pub mod maps;
pub mod pdcurve;
pub mod sweep;
pub mod zerofind;
