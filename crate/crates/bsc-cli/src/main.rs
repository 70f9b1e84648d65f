fn main() {
    println!("bsc");
}
