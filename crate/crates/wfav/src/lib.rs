pub mod datalog;
pub mod iq;
pub mod mapper;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod properties;
pub mod wfa;
