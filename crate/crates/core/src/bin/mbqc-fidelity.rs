fn main() -> std::process::ExitCode {
    mbqc_fidelity::cli::main_entry()
}
