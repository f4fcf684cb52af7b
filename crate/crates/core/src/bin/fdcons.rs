fn main() -> std::process::ExitCode {
    fdcons::cli::main()
}
