// placeholder while the core crate is brought up
