//! Matrix Market and 16-bit PGM input/output.

mod matrix_market;
mod pgm;

pub use matrix_market::{
    read_matrix_file, read_matrix_market, write_matrix_file, write_matrix_market, write_vector_file,
};
pub use pgm::{read_pgm, read_pgm_file, read_pgm_scaled, write_pgm, write_pgm_file, PgmImage};
