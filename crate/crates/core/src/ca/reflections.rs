use nalgebra::DVector;

use crate::ingest::SpecializationMatrix;

/// Country and product indicators per reflection step; step 0 is
/// diversity and ubiquity.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionsTrace {
    pub country: Vec<DVector<f64>>,
    pub product: Vec<DVector<f64>>,
}

/// Method of reflections, un-normalized.
///
/// Step `i + 1` averages the step-`i` indicator of the other side over the
/// specialized links. Both indicators drift to constants as `k` grows.
pub fn method_of_reflections(sm: &SpecializationMatrix, k: usize) -> ReflectionsTrace {
    let mut country = vec![sm.diversity_vector()];
    let mut product = vec![sm.ubiquity_vector()];
    let xd_t = sm.xd().transpose();
    for i in 0..k {
        let next_country = &xd_t * &product[i];
        let next_product = sm.xu() * &country[i];
        country.push(next_country);
        product.push(next_product);
    }
    ReflectionsTrace { country, product }
}
