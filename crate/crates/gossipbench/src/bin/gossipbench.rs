fn main() {
    std::process::exit(gossipbench::cli::main(std::env::args_os()));
}
