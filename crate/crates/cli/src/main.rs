fn main() {
    std::process::exit(bpmcts_cli::dispatch(std::env::args_os()));
}
