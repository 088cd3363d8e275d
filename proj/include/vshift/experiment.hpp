#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vshift/arch.hpp"
#include "vshift/config.hpp"
#include "vshift/dataset.hpp"
#include "vshift/train.hpp"

namespace vshift {

/// One architecture variant of a sweep; everything else (data, training
/// recipe, diagnostics) is shared across cells.
struct ExperimentCell {
    std::string id;
    Placement placement = Placement::None;
    double drop_ratio = 0.0;
    double beta = 0.0;
    std::vector<std::size_t> hidden_widths;
    std::size_t num_blocks = 0;
};

struct ExperimentPlan {
    std::string name = "experiment";
    std::string out_dir;
    SyntheticDatasetSpec data_spec;  // seed holds the base; per-run seed adds the run seed
    std::vector<std::uint64_t> seeds;
    TrainConfig train_cfg;  // seed overwritten per run
    bool bn_affine = false;
    double bn_momentum = 0.1;
    std::size_t scan_passes = 10;
    bool adjust = false;
    std::size_t adjust_passes = 10;
    std::vector<ExperimentCell> cells;
};

/// Builds a plan from `[experiment]`, `[dataset]` and `[cell <id>]` sections.
/// Unknown keys, duplicate cell ids, an empty seed list and a cell-free grid
/// are all rejected.
ExperimentPlan plan_from_config(const ConfigDoc& doc);

struct CellRun {
    std::string cell_id;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    double train_acc = 0.0;  // final epoch, Train mode
    double test_acc = 0.0;   // Eval mode on the held-out split
    double vote_acc = 0.0;   // consistency probe on the train split
    double eval_acc = 0.0;
    double flip_rate = 0.0;
    double gm_max_ratio = 1.0;
    double adjusted_test_acc = 0.0;  // only meaningful when the plan adjusts
    std::vector<double> layer_max_ratio;  // shallow to deep
};

struct ExperimentResult {
    std::vector<CellRun> runs;  // cell-major, seeds in plan order
    bool any_failed = false;
};

/// Trains and probes every cell x seed combination, writing per-run shift
/// tables, `cells.csv`, `summary.json` and `shift_curves.svg` under
/// `plan.out_dir`. A failing run is recorded and the sweep continues.
/// Progress lines go to `log`.
ExperimentResult run_experiment(const ExperimentPlan& plan, std::ostream& log);

}  // namespace vshift
