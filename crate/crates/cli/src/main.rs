fn main() {
    std::process::exit(glassey_lab::run(std::env::args_os()));
}
