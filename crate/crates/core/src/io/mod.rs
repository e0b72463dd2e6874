//! File formats: splat PLY, meshes, images, point clouds.

pub mod cloud_io;
pub mod image_io;
pub mod mesh_io;
pub mod splat_ply;

pub use cloud_io::{encode_cloud_pcd, encode_cloud_ply, save_cloud, CloudEncoding};
pub use image_io::{
    encode_pfm, read_png_rgb8, read_rgb_image, write_pfm, write_png_gray16, write_png_gray8,
    write_png_rgb8, write_rgb_image,
};
pub use mesh_io::{load_mesh, load_mesh_with_report, save_mesh, MeshLoadReport};
pub use splat_ply::{decode_splat_ply, encode_splat_ply, load_splat_ply, save_splat_ply};
