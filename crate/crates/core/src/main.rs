fn main() -> std::process::ExitCode {
    riskfield::cli::main()
}
