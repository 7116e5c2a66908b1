//! Enumerates a small Fock basis, assembles the Hamiltonian and checks the
//! spectrum against its trace.
//!
//! cargo run --release --example basis_and_hamiltonian

use boson_chaos::basis::BasisTable;
use boson_chaos::hamiltonian::{assemble, ModelParams};
use boson_chaos::spectrum::diagonalize;

fn main() -> boson_chaos::Result<()> {
    let table = BasisTable::build(3, 3)?;
    println!("N = L = 3: dim {}", table.dim());
    for (i, s) in table.states().iter().enumerate() {
        println!("  {i:2}  {s}");
    }

    let params = ModelParams::standard(3, 3, 0.6).with_phase(1.0);
    let h = assemble(&params, &table)?;
    println!(
        "nnz {} (both triangles), |H|_inf = {:.4}",
        h.nnz(),
        h.norm_inf()
    );

    let d = diagonalize(&h)?;
    let sum: f64 = d.eigenvalues().iter().sum();
    println!("sum of eigenvalues {sum:.12}, trace {:.12}", h.trace());
    println!(
        "max residual {:.2e}, orthonormality {:.2e}",
        d.max_residual(&h),
        d.orthonormality_error()
    );

    for (n, l) in [(7, 7), (8, 8), (9, 9)] {
        println!("N = {n}, L = {l}: dim {}", BasisTable::build(n, l)?.dim());
    }
    Ok(())
}
