fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WFC_TERRAIN_LOG", "info"))
        .format_timestamp(None)
        .init();
    std::process::exit(wfc_terrain::cli::run(std::env::args_os()));
}
