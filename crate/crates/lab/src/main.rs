fn main() {
    std::process::exit(qmf_lab::cli::run(std::env::args_os()));
}
