fn main() {
    println!("serana");
}
