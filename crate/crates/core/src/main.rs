fn main() {
    std::process::exit(drs_dirac::cli::run(std::env::args_os()));
}
