fn main() {
    println!("pfspec");
}
