fn main() {
    println!("csq");
}
