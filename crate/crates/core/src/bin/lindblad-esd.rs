fn main() {
    std::process::exit(lindblad_esd::cli::run(std::env::args_os()));
}
