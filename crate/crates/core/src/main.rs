fn main() {
    std::process::exit(ncl::cli::main_entry());
}
