// Generate an instance, write it as JSON, and read it back.

use prophet_secretary::generators::{generate, Family, FamilyParams};
use prophet_secretary::instance_file::{load_instance, save_instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let params = FamilyParams { n: 3, m: 2, max_support: 2 };
    let instance = generate(Family::Xos, params, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let path = std::env::temp_dir().join(format!("xos-example-{}.json", std::process::id()));
    save_instance(&path, &instance, Some("example".into())).unwrap();
    println!("{}", std::fs::read_to_string(&path).unwrap());
    let (file, back) = load_instance(&path).unwrap();
    assert_eq!(back, instance);
    println!("reloaded {:?} with {} buyers", file.name, back.num_buyers());
    std::fs::remove_file(path).unwrap();
}
