fn main() {
    std::process::exit(rde::experiment::cli::main_from_env());
}
