#pragma once

#include <vector>

#include "symfuse/image.hpp"
#include "symfuse/symmetry.hpp"

// Dense 2-D filtering reference path. Computes the same quantities as the
// separable pipeline by direct correlation with fully sampled kernels; kept
// independent of the production code paths it checks.
namespace oracle {

symfuse::ComplexField orientation_tensor_dense(const symfuse::GrayImage& img, double sigma1);

symfuse::ComplexField normalized_response_dense(const symfuse::ComplexField& z, int order,
                                                double sigma2);

/// max |a-b| / max(max|b|, floor)
double relative_error(const symfuse::ComplexField& a, const symfuse::ComplexField& b);

}  // namespace oracle
