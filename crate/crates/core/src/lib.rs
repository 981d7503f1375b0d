pub mod builder;
pub mod dot;
pub mod executor;
pub mod methods;
pub mod pipeline;
pub mod rdf;
pub mod samples;
pub mod schema;
pub mod tabular;
pub mod vocab;
