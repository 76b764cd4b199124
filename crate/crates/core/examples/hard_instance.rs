//! The hypercube packing and the family of hard regression functions used
//! in minimax lower bounds.

use std::sync::Arc;

use specreg::mercer::{min_kernel_eigensystem, EigenSystem};
use specreg::targets::{
    default_epsilon, hard_instance, pack_hypercube, packing_distance, packing_size, write_hard_instance,
    DEFAULT_PACKING_BUDGET, DEFAULT_PACKING_SEED,
};

fn main() -> specreg::Result<()> {
    for m in [8, 16, 24, 32, 40] {
        let code = pack_hypercube(m, DEFAULT_PACKING_SEED, DEFAULT_PACKING_BUDGET)?;
        println!(
            "m={m:>2}: {:>3} codewords (need {:>3}), min distance {:>2} (need {:>2})",
            code.len(),
            packing_size(m),
            code.min_distance().unwrap_or(0),
            packing_distance(m)
        );
    }

    let es: Arc<dyn EigenSystem> = Arc::new(min_kernel_eigensystem());
    let (m, s, gamma) = (16, 0.4, 0.2);
    let eps = default_epsilon(0.01, m, s, gamma, es.beta());
    let family = hard_instance(es, m, s, gamma, eps, DEFAULT_PACKING_SEED, DEFAULT_PACKING_BUDGET)?;
    println!("epsilon = {eps:.3e}, {} functions", family.functions.len());
    for (i, norm) in family.norms.iter().enumerate() {
        println!("  f_{i}: bits {}  ||f||_[H]^s = {norm:.4e}", family.codebook.to_bit_string(i));
    }
    for p in family.pairs.iter().take(4) {
        println!(
            "  d(f_{}, f_{})^2 = {:.6e} = eps * {}",
            p.i, p.j, p.squared_distance, p.hamming
        );
    }

    let path = std::env::temp_dir().join("hard_instance.txt");
    write_hard_instance(&family, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
