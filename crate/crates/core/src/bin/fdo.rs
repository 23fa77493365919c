fn main() -> std::process::ExitCode {
    frechet_oracle::cli::main()
}
