pub mod dirac;
pub mod gauge;
pub mod mechanics;
pub mod numeric;
pub mod pipeline;
pub mod quantize;
pub mod report;
pub mod scenario;
pub mod symcore;
