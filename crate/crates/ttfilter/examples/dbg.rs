use nalgebra::DMatrix;
fn main() {
    let eps_default = <f64 as approx::AbsDiffEq>::default_epsilon();
    println!("default_epsilon = {eps_default:e}, f64::EPSILON = {:e}", f64::EPSILON);
    let m = DMatrix::from_element(2, 4, 1.0);
    for eps in [eps_default, f64::EPSILON, 1e-15, 1e-14, 1e-12] {
        match m.clone().try_svd(true, true, eps, 0) {
            Some(svd) => println!("eps={eps:e}: s={:?}", svd.singular_values.as_slice()),
            None => println!("eps={eps:e}: None"),
        }
    }
}
