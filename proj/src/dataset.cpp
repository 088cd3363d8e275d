#include "vshift/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vshift/errors.hpp"
#include "vshift/rng.hpp"
#include "vshift/textio.hpp"

namespace vshift {

namespace {

// Orthonormal class directions via Gram-Schmidt on Gaussian draws; orthogonal
// centers keep every class linearly separable from the rest at low noise.
std::vector<std::vector<double>> blob_centers(const SyntheticDatasetSpec& spec,
                                              RngStream& rng) {
    const double radius = 3.0;
    std::vector<std::vector<double>> centers;
    for (std::size_t k = 0; k < spec.num_classes; ++k) {
        std::vector<double> v(spec.input_dim);
        for (int attempt = 0;; ++attempt) {
            if (attempt > 64) {
                throw DomainError("failed to orthogonalize blob centers");
            }
            for (double& x : v) x = rng.normal();
            for (const auto& u : centers) {
                double dot = 0.0, uu = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    dot += v[i] * u[i];
                    uu += u[i] * u[i];
                }
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot / uu * u[i];
            }
            double norm = 0.0;
            for (double x : v) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (double& x : v) x = x / norm * radius;
                break;
            }
        }
        centers.push_back(v);
    }
    return centers;
}

Dataset draw_split(const SyntheticDatasetSpec& spec,
                   const std::vector<std::vector<double>>& centers, RngStream& rng) {
    const std::size_t n = spec.num_classes * spec.samples_per_class;
    Dataset out;
    out.features = Tensor({n, spec.input_dim});
    out.labels.resize(n);
    // Class-interleaved order keeps contiguous mini-batches balanced.
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
        for (std::size_t k = 0; k < spec.num_classes; ++k) {
            const std::size_t row = s * spec.num_classes + k;
            double* dst = &out.features[row * spec.input_dim];
            if (spec.generator == Generator::GaussianBlobs) {
                for (std::size_t i = 0; i < spec.input_dim; ++i) {
                    dst[i] = centers[k][i] + spec.noise_scale * rng.normal();
                }
            } else {
                const double base = 2.0 * static_cast<double>(k + 1);
                const double r = base + spec.noise_scale * rng.normal();
                const double theta = rng.uniform_range(0.0, 6.283185307179586);
                dst[0] = r * std::cos(theta);
                dst[1] = r * std::sin(theta);
                for (std::size_t i = 2; i < spec.input_dim; ++i) {
                    dst[i] = spec.noise_scale * rng.normal();
                }
            }
            out.labels[row] = k;
        }
    }
    return out;
}

}  // namespace

void SyntheticDatasetSpec::validate() const {
    if (num_classes < 2) {
        throw DomainError("datasets need at least 2 classes");
    }
    if (samples_per_class < 2) {
        throw DomainError("datasets need at least 2 samples per class");
    }
    if (input_dim == 0) {
        throw DomainError("input dimension must be positive");
    }
    if (generator == Generator::GaussianBlobs && input_dim < num_classes) {
        throw DomainError("blob datasets need input dimension >= class count");
    }
    if (generator == Generator::ConcentricRings && input_dim < 2) {
        throw DomainError("ring datasets need input dimension >= 2");
    }
    if (!std::isfinite(noise_scale) || noise_scale < 0.0) {
        throw DomainError("noise scale must be finite and non-negative");
    }
}

DatasetPair make_dataset(const SyntheticDatasetSpec& spec) {
    spec.validate();
    RngStream center_rng(spec.seed, 0);
    RngStream train_rng(spec.seed, 1);
    RngStream test_rng(spec.seed, 2);

    std::vector<std::vector<double>> centers;
    if (spec.generator == Generator::GaussianBlobs) {
        centers = blob_centers(spec, center_rng);
    }

    DatasetPair pair;
    pair.train = draw_split(spec, centers, train_rng);
    pair.test = draw_split(spec, centers, test_rng);

    const std::size_t d = spec.input_dim;
    const std::size_t n = pair.train.size();
    pair.feature_mean.assign(d, 0.0);
    pair.feature_sd.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = &pair.train.features[r * d];
        for (std::size_t i = 0; i < d; ++i) pair.feature_mean[i] += row[i];
    }
    for (std::size_t i = 0; i < d; ++i) pair.feature_mean[i] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = &pair.train.features[r * d];
        for (std::size_t i = 0; i < d; ++i) {
            const double dlt = row[i] - pair.feature_mean[i];
            pair.feature_sd[i] += dlt * dlt;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        pair.feature_sd[i] = std::sqrt(pair.feature_sd[i] / static_cast<double>(n));
        // Constant dimensions pass through unscaled.
        if (pair.feature_sd[i] < 1e-12) pair.feature_sd[i] = 1.0;
    }
    for (Dataset* split : {&pair.train, &pair.test}) {
        for (std::size_t r = 0; r < split->size(); ++r) {
            double* row = &split->features[r * d];
            for (std::size_t i = 0; i < d; ++i) {
                row[i] = (row[i] - pair.feature_mean[i]) / pair.feature_sd[i];
            }
        }
    }
    return pair;
}

Dataset load_csv_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open dataset '" + path + "'");

    std::vector<double> values;
    std::vector<std::size_t> labels;
    std::size_t columns = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> fields;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            fields.push_back(parse_double(trim(cell)));
        }
        if (columns == 0) {
            if (fields.size() < 2) {
                throw ConfigError("dataset '" + path +
                                  "' needs at least one feature column and a label");
            }
            columns = fields.size();
        } else if (fields.size() != columns) {
            throw ConfigError("dataset '" + path + "' line " + format_u64(line_no) +
                              " has a different column count");
        }
        const double label = fields.back();
        if (!std::isfinite(label) || label < 0.0 || label != std::floor(label) ||
            label > 1e6) {
            throw ConfigError("dataset '" + path + "' line " + format_u64(line_no) +
                              " needs a non-negative integer label");
        }
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            if (!std::isfinite(fields[i])) {
                throw ConfigError("dataset '" + path + "' line " + format_u64(line_no) +
                                  " holds a non-finite feature");
            }
            values.push_back(fields[i]);
        }
        labels.push_back(static_cast<std::size_t>(label));
    }
    if (labels.empty()) throw ConfigError("dataset '" + path + "' holds no rows");

    Dataset out;
    out.features = Tensor({labels.size(), columns - 1}, std::move(values));
    out.labels = std::move(labels);
    return out;
}

}  // namespace vshift
