#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vshift/analytic.hpp"
#include "vshift/arch.hpp"
#include "vshift/checkpoint.hpp"
#include "vshift/config.hpp"
#include "vshift/dataset.hpp"
#include "vshift/diagnostics.hpp"
#include "vshift/errors.hpp"
#include "vshift/experiment.hpp"
#include "vshift/montecarlo.hpp"
#include "vshift/report.hpp"
#include "vshift/textio.hpp"
#include "vshift/train.hpp"

namespace {

using namespace vshift;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

StatsPolicy policy_from_name(const std::string& name) {
    if (name == "ema") return StatsPolicy::Ema;
    if (name == "cumulative") return StatsPolicy::Cumulative;
    throw ConfigError("unknown statistics policy '" + name + "'");
}

struct AnalyticArgs {
    std::string kind;
    double mean = 0.0;
    double variance = 1.0;
    double drop_ratio = 0.5;
    std::size_t width = 4;
    double correlation = 0.0;
    double alignment = 1.0;
    double beta = 0.1;
};

int run_analytic(const AnalyticArgs& a) {
    ShiftScenario s;
    s.input_mean = a.mean;
    s.input_variance = a.variance;
    s.retain_ratio = 1.0 - a.drop_ratio;
    double value = 0.0;
    if (a.kind == "a") {
        value = shift_ratio_case_a(s).ratio;
    } else if (a.kind == "b") {
        s.width = a.width;
        s.input_correlation = a.correlation;
        s.cos2_alignment = a.alignment;
        value = shift_ratio_case_b(s).ratio;
    } else {
        value = uout_shift_ratio(a.beta);
    }
    std::cout << format_double(value) << '\n';
    return 0;
}

struct SimulateArgs {
    std::string grid = "all";
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
};

int run_simulate(const SimulateArgs& a) {
    std::vector<SweepScenario> grid = default_scenario_grid();
    if (a.grid != "all") {
        ScenarioKind keep = a.grid == "a"   ? ScenarioKind::CaseA
                            : a.grid == "b" ? ScenarioKind::CaseB
                                            : ScenarioKind::Uout;
        std::erase_if(grid, [&](const SweepScenario& s) { return s.kind != keep; });
    }
    RngStream rng(a.seed, 30);
    std::vector<SweepRow> rows = mc_grid_sweep(grid, a.samples, rng);
    emit(a.format == "json" ? sweep_rows_json(rows).dump(2) + "\n" : sweep_rows_csv(rows),
         a.out);
    bool any_failed =
        std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
    return any_failed ? 2 : 0;
}

struct TrainArgs {
    SyntheticDatasetSpec data;
    std::string generator = "blobs";
    std::string placement = "none";
    ArchSpec arch;
    std::vector<std::size_t> widths = {32};
    TrainConfig cfg;
    std::string out;
};

int run_train(TrainArgs& a) {
    a.data.generator = generator_from_name(a.generator);
    a.arch.placement = placement_from_name(a.placement);
    a.arch.input_dim = a.data.input_dim;
    a.arch.num_classes = a.data.num_classes;
    a.arch.hidden_widths = a.widths;
    a.arch.validate();
    a.cfg.validate();
    DatasetPair data = make_dataset(a.data);
    RngStream init_rng(a.cfg.seed, 10);
    Network net = build_network(a.arch, init_rng);
    TrainHistory history = train(net, data.train, a.cfg);
    std::cout << "train accuracy (final epoch): "
              << format_fixed(history.epochs.back().accuracy, 4) << '\n';
    std::cout << "eval accuracy (train split): "
              << format_fixed(eval_accuracy(net, data.train), 4) << '\n';
    std::cout << "eval accuracy (test split): "
              << format_fixed(eval_accuracy(net, data.test), 4) << '\n';
    ModelBundle bundle;
    bundle.arch = a.arch;
    bundle.data_spec = a.data;
    bundle.train_cfg = a.cfg;
    bundle.net = std::move(net);
    save_model(a.out, bundle, &history);
    std::cout << "saved model to " << a.out << '\n';
    return 0;
}

struct ProbeArgs {
    std::string model;
    std::string data;  // external CSV; empty regenerates the model's train split
    std::size_t passes = 10;
    std::size_t batch_size = 0;  // 0: the model's training batch size
    std::size_t votes = 8;
    std::string policy;
    bool seed_given = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

Dataset probe_data(const ProbeArgs& a, const ModelBundle& bundle) {
    if (!a.data.empty()) return load_csv_dataset(a.data);
    return make_dataset(bundle.data_spec).train;
}

int run_scan(const ProbeArgs& a) {
    ModelBundle bundle = load_model(a.model);
    Dataset data = probe_data(a, bundle);
    ScanOptions opt;
    opt.passes = a.passes;
    opt.batch_size = a.batch_size == 0 ? bundle.train_cfg.batch_size : a.batch_size;
    opt.policy = policy_from_name(a.policy.empty() ? "ema" : a.policy);
    std::uint64_t seed = a.seed_given ? a.seed : bundle.train_cfg.seed;
    RngStream rng(seed, 20);
    ShiftReport report = scan_variance_shift(bundle.net, data, opt, rng);
    emit(a.format == "json" ? shift_report_json(report).dump(2) + "\n"
                            : shift_report_csv(report),
         a.out);
    return 0;
}

int run_consistency(const ProbeArgs& a) {
    ModelBundle bundle = load_model(a.model);
    Dataset data = probe_data(a, bundle);
    ConsistencyOptions opt;
    opt.votes = a.votes;
    opt.batch_size = a.batch_size == 0 ? 64 : a.batch_size;
    std::uint64_t seed = a.seed_given ? a.seed : bundle.train_cfg.seed;
    RngStream rng(seed, 21);
    ConsistencyReport report = prediction_consistency(bundle.net, data, opt, rng);
    emit(a.format == "json" ? consistency_json(report).dump(2) + "\n"
                            : consistency_csv(report),
         a.out);
    return 0;
}

int run_adjust(const ProbeArgs& a) {
    ModelBundle bundle = load_model(a.model);
    Dataset data = probe_data(a, bundle);
    AdjustOptions opt;
    opt.passes = a.passes;
    opt.batch_size = a.batch_size == 0 ? bundle.train_cfg.batch_size : a.batch_size;
    opt.policy = policy_from_name(a.policy.empty() ? "cumulative" : a.policy);
    std::uint64_t seed = a.seed_given ? a.seed : bundle.train_cfg.seed;
    double before = eval_accuracy(bundle.net, data);
    RngStream rng(seed, 22);
    adjust_bn_statistics(bundle.net, data, opt, rng);
    double after = eval_accuracy(bundle.net, data);
    std::cout << "eval accuracy (adjustment data): " << format_fixed(before, 4) << " -> "
              << format_fixed(after, 4) << '\n';
    if (a.data.empty()) {
        // The held-out split exists only for regenerated synthetic data.
        Dataset test = make_dataset(bundle.data_spec).test;
        std::cout << "eval accuracy (test split): after adjustment "
                  << format_fixed(eval_accuracy(bundle.net, test), 4) << '\n';
    }
    const std::string& dir = a.out.empty() ? a.model : a.out;
    save_model(dir, bundle);
    std::cout << "saved model to " << dir << '\n';
    return 0;
}

struct ExperimentArgs {
    std::string config;
    std::string out;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    ConfigDoc doc = load_config_file(a.config);
    ExperimentPlan plan = plan_from_config(doc);
    if (!a.out.empty()) plan.out_dir = a.out;
    ExperimentResult result = run_experiment(plan, std::cerr);
    std::cout << "wrote " << plan.out_dir << "/summary.json\n";
    return result.any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variance-shift toolkit for dropout and batch-normalized networks"};
    app.require_subcommand(1);

    AnalyticArgs an;
    CLI::App* c_an = app.add_subcommand(
        "analytic", "Closed-form test/train variance ratio for one scenario");
    c_an->add_option("--case", an.kind, "Scenario family: a, b or uout")
        ->required()
        ->check(CLI::IsMember({"a", "b", "uout"}));
    c_an->add_option("--mean", an.mean, "Per-channel input mean");
    c_an->add_option("--variance", an.variance, "Per-channel input variance");
    c_an->add_option("--drop-ratio", an.drop_ratio, "Dropout probability, retain = 1 - ratio");
    c_an->add_option("--width", an.width, "Channels feeding the weighted sum (case b)");
    c_an->add_option("--correlation", an.correlation, "Pairwise input correlation (case b)");
    c_an->add_option("--alignment", an.alignment,
                     "Squared cosine between weights and all-ones (case b)");
    c_an->add_option("--beta", an.beta, "Uniform noise half-width (uout)");

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand(
        "simulate", "Monte Carlo sweep of the scenario grid against the closed forms");
    c_sim->add_option("--grid", sim.grid, "Scenario family filter")
        ->check(CLI::IsMember({"all", "a", "b", "uout"}));
    c_sim->add_option("--samples", sim.samples, "Samples per scenario");
    c_sim->add_option("--seed", sim.seed, "RNG seed");
    c_sim->add_option("--out", sim.out, "Output file (default: stdout)");
    c_sim->add_option("--format", sim.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    TrainArgs tr;
    CLI::App* c_tr =
        app.add_subcommand("train", "Train a block network on synthetic data and save it");
    c_tr->add_option("--generator", tr.generator, "blobs or rings")
        ->check(CLI::IsMember({"blobs", "rings"}));
    c_tr->add_option("--classes", tr.data.num_classes, "Number of classes");
    c_tr->add_option("--samples-per-class", tr.data.samples_per_class,
                     "Samples per class and split");
    c_tr->add_option("--input-dim", tr.data.input_dim, "Input dimension");
    c_tr->add_option("--noise", tr.data.noise_scale, "Generator noise scale");
    c_tr->add_option("--data-seed", tr.data.seed, "Dataset seed");
    c_tr->add_option("--placement", tr.placement, "Stochastic layer placement")
        ->check(CLI::IsMember({"none", "dropA", "dropB", "lastLayer", "uoutB"}));
    c_tr->add_option("--drop-ratio", tr.arch.drop_ratio, "Dropout probability");
    c_tr->add_option("--beta", tr.arch.beta, "Uniform noise half-width");
    c_tr->add_option("--widths", tr.widths, "Hidden widths, one entry or one per block")
        ->delimiter(',');
    c_tr->add_option("--blocks", tr.arch.num_blocks, "Number of blocks");
    c_tr->add_flag("--bn-affine", tr.arch.bn_affine, "Learn per-channel scale and shift");
    c_tr->add_option("--bn-momentum", tr.arch.bn_momentum, "Moving statistics momentum");
    c_tr->add_option("--epochs", tr.cfg.epochs, "Training epochs");
    c_tr->add_option("--batch-size", tr.cfg.batch_size, "Mini-batch size");
    c_tr->add_option("--lr", tr.cfg.learning_rate, "Learning rate");
    c_tr->add_option("--momentum", tr.cfg.momentum, "SGD momentum");
    c_tr->add_option("--seed", tr.cfg.seed, "Training and initialization seed");
    c_tr->add_option("--decay-epochs", tr.cfg.lr_decay_epochs,
                     "Zero-based epochs where the learning rate drops")
        ->delimiter(',');
    c_tr->add_option("--decay-factor", tr.cfg.lr_decay_factor, "Learning rate decay factor");
    c_tr->add_option("--out", tr.out, "Model directory")->required();

    ProbeArgs sc;
    CLI::App* c_sc = app.add_subcommand(
        "scan", "Compare saved moving variances against an Eval-mode re-estimate");
    c_sc->add_option("--model", sc.model, "Model directory")->required();
    c_sc->add_option("--data", sc.data,
                     "External CSV dataset, last column the class label "
                     "(default: regenerate the model's training data)");
    c_sc->add_option("--passes", sc.passes, "Streaming passes over the data");
    c_sc->add_option("--batch-size", sc.batch_size,
                     "Batch size (default: the model's training batch size)");
    c_sc->add_option("--policy", sc.policy, "ema or cumulative (default: ema)")
        ->check(CLI::IsMember({"ema", "cumulative"}));
    CLI::Option* sc_seed = c_sc->add_option("--seed", sc.seed,
                                            "RNG seed (default: the model's training seed)");
    c_sc->add_option("--out", sc.out, "Output file (default: stdout)");
    c_sc->add_option("--format", sc.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    ProbeArgs co;
    CLI::App* c_co = app.add_subcommand(
        "consistency", "Vote-mode versus Eval-mode accuracy on the training data");
    c_co->add_option("--model", co.model, "Model directory")->required();
    c_co->add_option("--data", co.data,
                     "External CSV dataset, last column the class label "
                     "(default: regenerate the model's training data)");
    c_co->add_option("--votes", co.votes, "Stochastic passes per sample");
    c_co->add_option("--batch-size", co.batch_size, "Batch size (default: 64)");
    CLI::Option* co_seed = c_co->add_option("--seed", co.seed,
                                            "RNG seed (default: the model's training seed)");
    c_co->add_option("--out", co.out, "Output file (default: stdout)");
    c_co->add_option("--format", co.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    ProbeArgs ad;
    CLI::App* c_ad = app.add_subcommand(
        "adjust", "Re-estimate moving statistics in Eval mode and save the model");
    c_ad->add_option("--model", ad.model, "Model directory")->required();
    c_ad->add_option("--data", ad.data,
                     "External CSV dataset, last column the class label "
                     "(default: regenerate the model's training data)");
    c_ad->add_option("--passes", ad.passes, "Streaming passes per normalization layer");
    c_ad->add_option("--batch-size", ad.batch_size,
                     "Batch size (default: the model's training batch size)");
    c_ad->add_option("--policy", ad.policy, "ema or cumulative (default: cumulative)")
        ->check(CLI::IsMember({"ema", "cumulative"}));
    CLI::Option* ad_seed = c_ad->add_option("--seed", ad.seed,
                                            "RNG seed (default: the model's training seed)");
    c_ad->add_option("--out", ad.out, "Output directory (default: overwrite in place)");

    ExperimentArgs ex;
    CLI::App* c_ex = app.add_subcommand(
        "experiment", "Run a config-driven sweep of placements, ratios and seeds");
    c_ex->add_option("--config", ex.config, "Experiment config file")->required();
    c_ex->add_option("--out", ex.out, "Output directory (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_an->parsed()) return run_analytic(an);
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_tr->parsed()) return run_train(tr);
        if (c_sc->parsed()) {
            sc.seed_given = sc_seed->count() > 0;
            return run_scan(sc);
        }
        if (c_co->parsed()) {
            co.seed_given = co_seed->count() > 0;
            return run_consistency(co);
        }
        if (c_ad->parsed()) {
            ad.seed_given = ad_seed->count() > 0;
            return run_adjust(ad);
        }
        if (c_ex->parsed()) return run_experiment_cmd(ex);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
