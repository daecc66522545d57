use std::io;

fn main() {
    let threads = std::env::var("RADON_SVM_THREADS").ok();
    let code = radon_svm_cli::app::main_with(
        std::env::args_os(),
        threads.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
