fn main() {
    std::process::exit(besselab::cli::main_entry(std::env::args_os()));
}
