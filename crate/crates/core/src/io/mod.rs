//! Plain-text file formats: ASCII PCD clouds, OBJ meshes and 16-bit PGM
//! depth dumps.

pub mod obj;
pub mod pcd;
pub mod pgm;
