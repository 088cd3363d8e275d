#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vshift/tensor.hpp"

namespace vshift {

enum class Generator { GaussianBlobs, ConcentricRings };

struct SyntheticDatasetSpec {
    Generator generator = Generator::GaussianBlobs;
    std::size_t num_classes = 3;
    std::size_t samples_per_class = 200;  // per split
    std::size_t input_dim = 16;
    double noise_scale = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct Dataset {
    Tensor features;  // rank-2, rows are samples
    std::vector<std::size_t> labels;

    std::size_t size() const { return labels.size(); }
};

/// Train and test splits drawn from disjoint RNG streams, plus the
/// train-split standardization parameters applied to both.
struct DatasetPair {
    Dataset train;
    Dataset test;
    std::vector<double> feature_mean;
    std::vector<double> feature_sd;
};

/// Balanced, class-interleaved splits; features standardized per dimension
/// by the train split's mean and population standard deviation.
DatasetPair make_dataset(const SyntheticDatasetSpec& spec);

/// Reads a labeled dataset from a headerless CSV file: every column but the
/// last is a feature, the last is a non-negative integer class label. Rows
/// must agree on column count and hold only finite numbers. Values are taken
/// as-is; standardize beforehand if the consumer expects it.
Dataset load_csv_dataset(const std::string& path);

}  // namespace vshift
