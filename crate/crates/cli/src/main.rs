use beamtrack_cli::commands::main_with;

fn main() {
    let code = main_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
