fn main() {
    partreg_cli::main_entry();
}
