fn main() {
    std::process::exit(neutrofix::cli::main_with(std::env::args_os()));
}
