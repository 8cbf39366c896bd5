fn main() {
    std::process::exit(univoque::cli::main_from_env());
}
