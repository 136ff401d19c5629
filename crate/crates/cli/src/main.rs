fn main() {
    adhoc_capacity_cli::run()
}
