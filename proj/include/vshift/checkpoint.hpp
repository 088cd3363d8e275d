#pragma once

#include <optional>
#include <string>

#include "vshift/arch.hpp"
#include "vshift/dataset.hpp"
#include "vshift/train.hpp"

namespace vshift {

/// A trained network plus everything needed to regenerate its data and
/// continue working with it deterministically.
struct ModelBundle {
    ArchSpec arch;
    SyntheticDatasetSpec data_spec;
    TrainConfig train_cfg;
    Network net;
};

std::string placement_name(Placement p);
Placement placement_from_name(std::string_view name);
std::string generator_name(Generator g);
Generator generator_from_name(std::string_view name);

/// Writes `model.ini` (architecture, dataset recipe, training recipe),
/// `params.txt` (learnable parameters and moving statistics, exact decimal
/// round-trip), and optionally `history.csv` into `dir`.
void save_model(const std::string& dir, const ModelBundle& bundle,
                const TrainHistory* history = nullptr);

/// Rebuilds the network from `model.ini` and restores every value saved by
/// save_model. Loading then saving reproduces the files byte for byte.
ModelBundle load_model(const std::string& dir);

}  // namespace vshift
