fn main() -> std::process::ExitCode {
    wsf_lab::cli::main()
}
