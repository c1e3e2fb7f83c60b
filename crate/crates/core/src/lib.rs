pub mod complexes;
pub mod dbar;
pub mod jointspec;
pub mod numerics;
pub mod spectra;
pub mod tensor;
