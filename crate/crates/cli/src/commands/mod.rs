pub mod helix_info;
pub mod simulate;
pub mod verify;
