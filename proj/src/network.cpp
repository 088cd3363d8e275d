#include "vshift/network.hpp"

#include <cstring>

#include "vshift/errors.hpp"

namespace vshift {

void Network::append(std::unique_ptr<Layer> layer) {
    if (!layer) {
        throw StateError("cannot append a null layer");
    }
    layers_.push_back(std::move(layer));
}

Tensor Network::forward(const Tensor& x, LayerMode mode, RngStream& rng) {
    Tensor cur = x;
    for (auto& layer : layers_) {
        cur = layer->forward(cur, mode, rng);
    }
    return cur;
}

Tensor Network::backward(const Tensor& grad_out) {
    Tensor cur = grad_out;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        cur = layers_[i]->backward(cur);
    }
    return cur;
}

std::vector<ParamRef> Network::parameters() {
    std::vector<ParamRef> all;
    for (auto& layer : layers_) {
        for (ParamRef& p : layer->parameters()) {
            all.push_back(std::move(p));
        }
    }
    return all;
}

std::vector<BatchNormLayer*> Network::batchnorm_layers() {
    std::vector<BatchNormLayer*> bns;
    for (auto& layer : layers_) {
        if (auto* bn = dynamic_cast<BatchNormLayer*>(layer.get())) {
            bns.push_back(bn);
        }
    }
    return bns;
}

std::vector<const BatchNormLayer*> Network::batchnorm_layers() const {
    std::vector<const BatchNormLayer*> bns;
    for (const auto& layer : layers_) {
        if (const auto* bn = dynamic_cast<const BatchNormLayer*>(layer.get())) {
            bns.push_back(bn);
        }
    }
    return bns;
}

std::uint64_t Network::parameter_checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const double* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t bits;
            std::memcpy(&bits, &data[i], sizeof bits);
            for (int b = 0; b < 8; ++b) {
                h ^= (bits >> (8 * b)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        }
    };
    for (const auto& layer : layers_) {
        // parameters() is non-const by signature; values are not mutated here.
        for (const ParamRef& p : const_cast<Layer&>(*layer).parameters()) {
            feed(p.value->values().data(), p.value->size());
        }
    }
    return h;
}

}  // namespace vshift
