#include "vshift/sampling.hpp"

#include <cmath>

#include "vshift/errors.hpp"

namespace vshift {

Tensor sample_bernoulli_mask(double keep_p, std::size_t n, RngStream& rng) {
    if (keep_p < 0.0 || keep_p > 1.0) throw DomainError("bernoulli probability outside [0,1]");
    Tensor mask({n});
    for (std::size_t i = 0; i < n; ++i) mask[i] = rng.uniform() < keep_p ? 1.0 : 0.0;
    return mask;
}

EquicorrelatedGaussian::EquicorrelatedGaussian(double mean, double variance, double rho,
                                               std::size_t dim)
    : mean_(mean), variance_(variance), rho_(rho), dim_(dim) {
    if (variance <= 0.0) throw DomainError("equicorrelated sampler requires positive variance");
    if (rho < 0.0)
        throw DomainError("negative pairwise correlation is not supported by the common-factor sampler");
    if (rho > 1.0) throw DomainError("pairwise correlation above 1");
    if (dim == 0) throw DomainError("equicorrelated sampler requires dim >= 1");
    const double sd = std::sqrt(variance);
    shared_scale_ = sd * std::sqrt(rho);
    private_scale_ = sd * std::sqrt(1.0 - rho);
}

void EquicorrelatedGaussian::sample(RngStream& rng, std::span<double> out) const {
    if (out.size() != dim_) throw ShapeError("equicorrelated sample span has wrong length");
    const double shared = shared_scale_ != 0.0 ? shared_scale_ * rng.normal() : 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        out[i] = mean_ + shared + (private_scale_ != 0.0 ? private_scale_ * rng.normal() : 0.0);
}

Tensor EquicorrelatedGaussian::sample_matrix(RngStream& rng, std::size_t count) const {
    Tensor samples({count, dim_});
    for (std::size_t i = 0; i < count; ++i) sample(rng, samples.row(i));
    return samples;
}

}  // namespace vshift
