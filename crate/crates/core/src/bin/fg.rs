use flowgraph::cli::{self, Io};

fn main() {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut io = Io {
        stdin: &mut stdin.lock(),
        stdout: &mut stdout.lock(),
        stderr: &mut stderr.lock(),
        color: cli::color_from_env(),
    };
    let code = cli::run(std::env::args_os(), &mut io);
    std::process::exit(code);
}
