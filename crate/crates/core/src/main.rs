fn main() {
    std::process::exit(spring_linkage::cli::main_with_args(std::env::args_os()));
}
