#include "vshift/arch.hpp"

#include <cmath>
#include <memory>

#include "vshift/errors.hpp"

namespace vshift {

void ArchSpec::validate() const {
    if (input_dim == 0) {
        throw DomainError("input dimension must be positive");
    }
    if (num_classes < 2) {
        throw DomainError("classifiers need at least 2 classes");
    }
    if (hidden_widths.empty()) {
        throw DomainError("at least one hidden width is required");
    }
    if (hidden_widths.size() != 1 && hidden_widths.size() != num_blocks) {
        throw DomainError("hidden widths must be a single value or one per block");
    }
    for (std::size_t w : hidden_widths) {
        if (w == 0) {
            throw DomainError("hidden widths must be positive");
        }
    }
    if (!(drop_ratio >= 0.0) || drop_ratio >= 1.0) {
        throw DomainError("drop ratio must lie in [0, 1)");
    }
    if (!(beta >= 0.0) || beta > 1.0) {
        throw DomainError("noise half-width must lie in [0, 1]");
    }
    if (placement == Placement::LastLayer && num_blocks == 0) {
        // Permitted: the single dropout still precedes the classifier.
    }
}

std::size_t ArchSpec::width_of_block(std::size_t block) const {
    return hidden_widths.size() == 1 ? hidden_widths[0] : hidden_widths.at(block);
}

namespace {

void init_dense(DenseLayer& dense, RngStream& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(dense.in_width()));
    Tensor& w = dense.weights();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = scale * rng.normal();
}

std::unique_ptr<DenseLayer> make_dense(std::size_t in, std::size_t out, RngStream& rng) {
    auto dense = std::make_unique<DenseLayer>(in, out);
    init_dense(*dense, rng);
    return dense;
}

}  // namespace

Network build_network(const ArchSpec& arch, RngStream& rng) {
    arch.validate();
    const double retain = 1.0 - arch.drop_ratio;
    Network net;
    std::size_t prev = arch.input_dim;
    for (std::size_t b = 0; b < arch.num_blocks; ++b) {
        const std::size_t width = arch.width_of_block(b);
        switch (arch.placement) {
            case Placement::None:
            case Placement::LastLayer:
                net.append(make_dense(prev, width, rng));
                break;
            case Placement::DropA:
                net.append(make_dense(prev, width, rng));
                net.append(std::make_unique<DropoutLayer>(retain));
                break;
            case Placement::DropB:
                net.append(std::make_unique<DropoutLayer>(retain));
                net.append(make_dense(prev, width, rng));
                break;
            case Placement::UoutB:
                net.append(std::make_unique<UoutLayer>(arch.beta));
                net.append(make_dense(prev, width, rng));
                break;
        }
        net.append(std::make_unique<BatchNormLayer>(width, arch.bn_momentum, 1e-5,
                                                    arch.bn_affine));
        net.append(std::make_unique<ReluLayer>());
        prev = width;
    }
    if (arch.placement == Placement::LastLayer) {
        net.append(std::make_unique<DropoutLayer>(retain));
    }
    net.append(make_dense(prev, arch.num_classes, rng));
    return net;
}

}  // namespace vshift
