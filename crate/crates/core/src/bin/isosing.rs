fn main() {
    std::process::exit(isosing::cli::main_from(std::env::args_os()));
}
