#pragma once

#include <cstddef>
#include <span>

#include "vshift/rng.hpp"
#include "vshift/tensor.hpp"

namespace vshift {

/// Tensor of n independent {0,1} draws, each 1 with probability keep_p.
Tensor sample_bernoulli_mask(double keep_p, std::size_t n, RngStream& rng);

/// Gaussian vectors whose coordinates share one mean, one variance and one
/// pairwise correlation, built from a common factor:
///
///   x_i = mean + sqrt(variance) * (sqrt(rho) * z0 + sqrt(1 - rho) * z_i)
///
/// with independent standard normals z. The construction covers rho in
/// [0, 1] and costs O(dim) per sample; negative correlations are rejected.
class EquicorrelatedGaussian {
public:
    EquicorrelatedGaussian(double mean, double variance, double rho, std::size_t dim);

    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double rho() const { return rho_; }
    std::size_t dim() const { return dim_; }

    /// Writes one sample into out; out.size() must equal dim().
    void sample(RngStream& rng, std::span<double> out) const;

    /// count samples as rows of a {count, dim} tensor.
    Tensor sample_matrix(RngStream& rng, std::size_t count) const;

private:
    double mean_;
    double variance_;
    double rho_;
    std::size_t dim_;
    double shared_scale_;
    double private_scale_;
};

}  // namespace vshift
