fn main() {
    std::process::exit(msa_lab::cli::dispatch(std::env::args_os()));
}
