fn main() {
    // Command line surface is wired up in the pipeline module; filled in as
    // the library lands.
    eprintln!("thetalift: not yet wired");
    std::process::exit(1);
}
