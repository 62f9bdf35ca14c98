fn main() {
    std::process::exit(prosody_clone::cli::run(std::env::args_os()));
}
