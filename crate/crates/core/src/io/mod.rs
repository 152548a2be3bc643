//! Instance and solution files, and the random instance families.

mod format;
mod generate;

pub use format::{
    parse_instance, parse_solution, read_instance, read_solution, render_instance, render_solution, write_instance,
    write_solution, InstanceFile, Metadata, Probabilities, SolutionFile, FORMAT_HEADER, SOLUTION_HEADER,
};
pub use generate::{
    generate, generate_density_controlled, generate_euclidean, generate_random_metric, Family, GeneratorSpec,
};
