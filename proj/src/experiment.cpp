#include "vshift/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <utility>

#include "vshift/checkpoint.hpp"
#include "vshift/diagnostics.hpp"
#include "vshift/errors.hpp"
#include "vshift/report.hpp"
#include "vshift/svg.hpp"
#include "vshift/textio.hpp"

namespace vshift {
namespace {

ArchSpec arch_for(const ExperimentPlan& plan, const ExperimentCell& cell) {
    ArchSpec arch;
    arch.input_dim = plan.data_spec.input_dim;
    arch.hidden_widths = cell.hidden_widths;
    arch.num_blocks = cell.num_blocks;
    arch.num_classes = plan.data_spec.num_classes;
    arch.placement = cell.placement;
    arch.drop_ratio = cell.drop_ratio;
    arch.beta = cell.beta;
    arch.bn_affine = plan.bn_affine;
    arch.bn_momentum = plan.bn_momentum;
    return arch;
}

std::string file_token(std::string_view id) {
    std::string out;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out.push_back(ok ? c : '-');
    }
    return out;
}

std::string csv_safe(std::string text) {
    for (char& c : text) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

std::string cells_csv(const ExperimentPlan& plan, const std::vector<CellRun>& runs) {
    std::string out = "cell,seed,status,train_acc,test_acc,vote_acc,eval_acc,"
                      "flip_rate,gm_max_ratio,adjusted_test_acc,error\n";
    for (const CellRun& r : runs) {
        out += r.cell_id;
        out += ',';
        out += format_u64(r.seed);
        if (r.failed) {
            out += ",failed,,,,,,,,";
            out += csv_safe(r.error);
            out += '\n';
            continue;
        }
        out += ",ok,";
        out += format_double(r.train_acc) + ',' + format_double(r.test_acc) + ',';
        out += format_double(r.vote_acc) + ',' + format_double(r.eval_acc) + ',';
        out += format_double(r.flip_rate) + ',' + format_double(r.gm_max_ratio) + ',';
        if (plan.adjust) out += format_double(r.adjusted_test_acc);
        out += ",\n";
    }
    return out;
}

Json summary_json(const ExperimentPlan& plan, const ExperimentResult& result) {
    Json doc;
    doc["experiment"] = plan.name;
    Json ds;
    ds["generator"] = generator_name(plan.data_spec.generator);
    ds["num_classes"] = plan.data_spec.num_classes;
    ds["samples_per_class"] = plan.data_spec.samples_per_class;
    ds["input_dim"] = plan.data_spec.input_dim;
    ds["noise_scale"] = plan.data_spec.noise_scale;
    ds["seed_base"] = plan.data_spec.seed;
    doc["dataset"] = ds;
    Json tr;
    tr["epochs"] = plan.train_cfg.epochs;
    tr["batch_size"] = plan.train_cfg.batch_size;
    tr["learning_rate"] = plan.train_cfg.learning_rate;
    tr["momentum"] = plan.train_cfg.momentum;
    tr["lr_decay_epochs"] = plan.train_cfg.lr_decay_epochs;
    tr["lr_decay_factor"] = plan.train_cfg.lr_decay_factor;
    doc["train"] = tr;
    doc["seeds"] = plan.seeds;
    doc["scan_passes"] = plan.scan_passes;
    doc["adjust"] = plan.adjust;

    Json cells = Json::array();
    for (const ExperimentCell& cell : plan.cells) {
        Json jc;
        jc["id"] = cell.id;
        jc["placement"] = placement_name(cell.placement);
        jc["drop_ratio"] = cell.drop_ratio;
        jc["beta"] = cell.beta;
        jc["hidden_widths"] = cell.hidden_widths;
        jc["num_blocks"] = cell.num_blocks;
        Json jruns = Json::array();
        double sum_gm = 0.0, sum_test = 0.0, sum_eval = 0.0, sum_vote = 0.0;
        std::size_t ok = 0, failed = 0;
        for (const CellRun& r : result.runs) {
            if (r.cell_id != cell.id) continue;
            Json jr;
            jr["seed"] = r.seed;
            if (r.failed) {
                jr["status"] = "failed";
                jr["error"] = r.error;
                ++failed;
            } else {
                jr["status"] = "ok";
                jr["train_acc"] = r.train_acc;
                jr["test_acc"] = r.test_acc;
                jr["vote_acc"] = r.vote_acc;
                jr["eval_acc"] = r.eval_acc;
                jr["flip_rate"] = r.flip_rate;
                jr["gm_max_ratio"] = r.gm_max_ratio;
                jr["layer_max_ratio"] = r.layer_max_ratio;
                if (plan.adjust) jr["adjusted_test_acc"] = r.adjusted_test_acc;
                sum_gm += r.gm_max_ratio;
                sum_test += r.test_acc;
                sum_eval += r.eval_acc;
                sum_vote += r.vote_acc;
                ++ok;
            }
            jruns.push_back(std::move(jr));
        }
        jc["runs"] = std::move(jruns);
        jc["failures"] = failed;
        if (ok > 0) {
            double n = static_cast<double>(ok);
            jc["mean_gm_max_ratio"] = sum_gm / n;
            jc["mean_test_acc"] = sum_test / n;
            jc["mean_eval_acc"] = sum_eval / n;
            jc["mean_vote_acc"] = sum_vote / n;
        }
        cells.push_back(std::move(jc));
    }
    doc["cells"] = std::move(cells);
    doc["any_failed"] = result.any_failed;
    return doc;
}

std::string curves_svg(const ExperimentPlan& plan, const ExperimentResult& result) {
    std::vector<SvgSeries> series;
    for (const ExperimentCell& cell : plan.cells) {
        std::vector<double> sums;
        std::size_t ok = 0;
        for (const CellRun& r : result.runs) {
            if (r.cell_id != cell.id || r.failed) continue;
            if (sums.empty()) sums.resize(r.layer_max_ratio.size(), 0.0);
            for (std::size_t i = 0; i < r.layer_max_ratio.size(); ++i)
                sums[i] += r.layer_max_ratio[i];
            ++ok;
        }
        if (ok == 0) continue;
        SvgSeries s;
        s.label = cell.id;
        for (std::size_t i = 0; i < sums.size(); ++i)
            s.points.push_back({static_cast<double>(i + 1),
                                sums[i] / static_cast<double>(ok)});
        series.push_back(std::move(s));
    }
    if (series.empty()) return {};
    return render_line_chart(plan.name + ": moving vs real variance", "normalization layer",
                             "max variance ratio", series);
}

CellRun run_one(const ExperimentPlan& plan, const ExperimentCell& cell,
                std::uint64_t seed, std::string* shift_csv) {
    CellRun run;
    run.cell_id = cell.id;
    run.seed = seed;

    SyntheticDatasetSpec ds = plan.data_spec;
    ds.seed = plan.data_spec.seed + seed;
    DatasetPair data = make_dataset(ds);

    ArchSpec arch = arch_for(plan, cell);
    RngStream init_rng(seed, 10);
    Network net = build_network(arch, init_rng);

    TrainConfig cfg = plan.train_cfg;
    cfg.seed = seed;
    TrainHistory history = train(net, data.train, cfg);
    run.train_acc = history.epochs.empty() ? 0.0 : history.epochs.back().accuracy;
    run.test_acc = eval_accuracy(net, data.test);

    ScanOptions sopt;
    sopt.passes = plan.scan_passes;
    sopt.batch_size = cfg.batch_size;
    RngStream scan_rng(seed, 20);
    ShiftReport report = scan_variance_shift(net, data.train, sopt, scan_rng);
    run.gm_max_ratio = geometric_mean_max_ratio(report);
    for (const LayerShift& l : report.layers) run.layer_max_ratio.push_back(l.max_ratio);

    ConsistencyOptions copt;
    copt.batch_size = cfg.batch_size;
    RngStream cons_rng(seed, 21);
    ConsistencyReport cons = prediction_consistency(net, data.train, copt, cons_rng);
    run.vote_acc = cons.train_mode_acc;
    run.eval_acc = cons.eval_mode_acc;
    run.flip_rate = cons.flip_rate;
    report.consistency = cons;

    if (plan.adjust) {
        AdjustOptions aopt;
        aopt.passes = plan.adjust_passes;
        aopt.batch_size = cfg.batch_size;
        RngStream adj_rng(seed, 22);
        adjust_bn_statistics(net, data.train, aopt, adj_rng);
        run.adjusted_test_acc = eval_accuracy(net, data.test);
    }

    *shift_csv = shift_report_csv(report);
    return run;
}

}  // namespace

ExperimentPlan plan_from_config(const ConfigDoc& doc) {
    const ConfigSection* exp = doc.find("experiment");
    if (exp == nullptr) throw ConfigError("config needs an [experiment] section");
    ExperimentPlan plan;
    SectionReader er(*exp);
    plan.name = er.get_string_or("name", "experiment");
    plan.out_dir = er.get_string_or("out", plan.name);
    plan.seeds = er.get_u64_list_or("seeds", {});
    plan.train_cfg.epochs = er.get_size_or("epochs", plan.train_cfg.epochs);
    plan.train_cfg.batch_size = er.get_size_or("batch_size", plan.train_cfg.batch_size);
    plan.train_cfg.learning_rate =
        er.get_double_or("learning_rate", plan.train_cfg.learning_rate);
    plan.train_cfg.momentum = er.get_double_or("momentum", plan.train_cfg.momentum);
    plan.train_cfg.lr_decay_epochs = er.get_size_list_or("lr_decay_epochs", {});
    plan.train_cfg.lr_decay_factor =
        er.get_double_or("lr_decay_factor", plan.train_cfg.lr_decay_factor);
    std::uint64_t seed_base = er.get_u64_or("seed_base", 100);
    plan.bn_momentum = er.get_double_or("bn_momentum", 0.1);
    plan.bn_affine = er.get_bool_or("bn_affine", false);
    plan.scan_passes = er.get_size_or("scan_passes", 10);
    plan.adjust = er.get_bool_or("adjust", false);
    plan.adjust_passes = er.get_size_or("adjust_passes", 10);
    std::size_t default_width = er.get_size_or("width", 32);
    std::size_t default_blocks = er.get_size_or("num_blocks", 3);
    er.finish();
    if (plan.seeds.empty()) throw ConfigError("experiment needs a non-empty seeds list");
    plan.train_cfg.validate();

    const ConfigSection* ds = doc.find("dataset");
    if (ds == nullptr) throw ConfigError("config needs a [dataset] section");
    SectionReader dr(*ds);
    plan.data_spec.generator = generator_from_name(dr.get_string_or("generator", "blobs"));
    plan.data_spec.num_classes = dr.get_size_or("num_classes", 3);
    plan.data_spec.samples_per_class = dr.get_size_or("samples_per_class", 200);
    plan.data_spec.input_dim = dr.get_size_or("input_dim", 16);
    plan.data_spec.noise_scale = dr.get_double_or("noise_scale", 1.0);
    plan.data_spec.seed = seed_base;
    dr.finish();
    plan.data_spec.validate();

    std::set<std::string> seen;
    for (const ConfigSection* sec : doc.all("cell")) {
        if (sec->id.empty())
            throw ConfigError("cell sections need an id, e.g. [cell base]");
        if (!seen.insert(sec->id).second)
            throw ConfigError("duplicate cell id '" + sec->id + "'");
        ExperimentCell cell;
        cell.id = sec->id;
        SectionReader cr(*sec);
        cell.placement = placement_from_name(cr.get_string("placement"));
        cell.drop_ratio = cr.get_double_or("drop_ratio", 0.0);
        cell.beta = cr.get_double_or("beta", 0.0);
        std::size_t width = cr.get_size_or("width", default_width);
        cell.hidden_widths = cr.get_size_list_or("hidden_widths", {width});
        cell.num_blocks = cr.get_size_or("num_blocks", default_blocks);
        cr.finish();
        arch_for(plan, cell).validate();
        plan.cells.push_back(std::move(cell));
    }
    if (plan.cells.empty()) throw ConfigError("experiment defines no cells");
    return plan;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, std::ostream& log) {
    ExperimentResult result;
    for (const ExperimentCell& cell : plan.cells) {
        for (std::uint64_t seed : plan.seeds) {
            std::string shift_csv;
            CellRun run;
            try {
                run = run_one(plan, cell, seed, &shift_csv);
            } catch (const Error& e) {
                run = CellRun{};
                run.cell_id = cell.id;
                run.seed = seed;
                run.failed = true;
                run.error = e.what();
                result.any_failed = true;
            }
            if (run.failed) {
                log << "[" << cell.id << "] seed " << seed << " failed: " << run.error
                    << '\n';
            } else {
                log << "[" << cell.id << "] seed " << seed
                    << " test_acc=" << format_fixed(run.test_acc, 4)
                    << " gm_max_ratio=" << format_fixed(run.gm_max_ratio, 4) << '\n';
                write_text_file(plan.out_dir + "/shift_" + file_token(cell.id) + "_s" +
                                    format_u64(run.seed) + ".csv",
                                shift_csv);
            }
            result.runs.push_back(std::move(run));
        }
    }
    write_text_file(plan.out_dir + "/cells.csv", cells_csv(plan, result.runs));
    write_text_file(plan.out_dir + "/summary.json", summary_json(plan, result).dump(2) + "\n");
    std::string svg = curves_svg(plan, result);
    if (!svg.empty()) write_text_file(plan.out_dir + "/shift_curves.svg", svg);
    return result;
}

}  // namespace vshift
