#include "vshift/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vshift/errors.hpp"
#include "vshift/textio.hpp"

namespace vshift {

namespace {

void scenario_columns(std::ostringstream& os, const SweepScenario& s) {
    const ShiftScenario& sc = s.scenario;
    os << s.id << ',';
    if (s.kind == ScenarioKind::Uout) {
        os << ",,,,,";  // c,v,p,d,rho_x empty
        os << ',';      // cos2theta empty
        os << format_double(sc.uout_halfwidth);
    } else {
        os << format_double(sc.input_mean) << ',' << format_double(sc.input_variance)
           << ',' << format_double(sc.retain_ratio) << ',';
        if (s.kind == ScenarioKind::CaseB) {
            os << format_u64(sc.width) << ',' << format_double(sc.input_correlation)
               << ',' << format_double(sc.cos2_alignment);
        } else {
            os << ",,";
        }
        os << ',';  // beta empty
    }
}

Json scenario_json(const SweepScenario& s) {
    const ShiftScenario& sc = s.scenario;
    Json j;
    j["scenario_id"] = s.id;
    switch (s.kind) {
        case ScenarioKind::CaseA:
            j["kind"] = "single-unit";
            j["c"] = sc.input_mean;
            j["v"] = sc.input_variance;
            j["p"] = sc.retain_ratio;
            break;
        case ScenarioKind::CaseB:
            j["kind"] = "weighted-sum";
            j["c"] = sc.input_mean;
            j["v"] = sc.input_variance;
            j["p"] = sc.retain_ratio;
            j["d"] = sc.width;
            j["rho_x"] = sc.input_correlation;
            j["cos2theta"] = sc.cos2_alignment;
            break;
        case ScenarioKind::Uout:
            j["kind"] = "uout";
            j["beta"] = sc.uout_halfwidth;
            break;
    }
    return j;
}

}  // namespace

std::string shift_report_csv(const ShiftReport& report) {
    std::ostringstream os;
    os << "layer,moving_var,real_var,max_ratio\n";
    for (const LayerShift& l : report.layers) {
        os << format_u64(l.layer_index) << ',' << format_double(l.moving_var) << ','
           << format_double(l.real_var) << ',' << format_double(l.max_ratio) << '\n';
    }
    return os.str();
}

Json shift_report_json(const ShiftReport& report) {
    Json layers = Json::array();
    for (const LayerShift& l : report.layers) {
        Json row;
        row["layer"] = l.layer_index;
        row["moving_var"] = l.moving_var;
        row["real_var"] = l.real_var;
        row["max_ratio"] = l.max_ratio;
        layers.push_back(row);
    }
    Json j;
    j["layers"] = layers;
    j["geometric_mean_max_ratio"] = geometric_mean_max_ratio(report);
    if (report.consistency) {
        j["consistency"] = consistency_json(*report.consistency);
    }
    return j;
}

std::string consistency_csv(const ConsistencyReport& report) {
    std::ostringstream os;
    os << "train_mode_acc,eval_mode_acc,flip_rate\n";
    os << format_double(report.train_mode_acc) << ','
       << format_double(report.eval_mode_acc) << ',' << format_double(report.flip_rate)
       << '\n';
    return os.str();
}

Json consistency_json(const ConsistencyReport& report) {
    Json j;
    j["train_mode_acc"] = report.train_mode_acc;
    j["eval_mode_acc"] = report.eval_mode_acc;
    j["flip_rate"] = report.flip_rate;
    return j;
}

std::string sweep_rows_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "scenario_id,c,v,p,d,rho_x,cos2theta,beta,analytic,mc,stderr,z\n";
    for (const SweepRow& r : rows) {
        scenario_columns(os, r.spec);
        os << ',';
        if (r.failed) {
            os << ",,,\n";  // analytic, mc, stderr and z stay empty
            continue;
        }
        os << format_double(r.analytic) << ',' << format_double(r.mc.value) << ','
           << format_double(r.mc.stderr_value) << ',' << format_double(r.z) << '\n';
    }
    return os.str();
}

Json sweep_rows_json(const std::vector<SweepRow>& rows) {
    Json arr = Json::array();
    for (const SweepRow& r : rows) {
        Json j = scenario_json(r.spec);
        j["analytic"] = r.analytic;
        if (r.failed) {
            j["error"] = r.error;
        } else {
            j["mc"] = r.mc.value;
            j["stderr"] = r.mc.stderr_value;
            j["z"] = r.z;
            j["samples"] = r.mc.n_samples;
        }
        arr.push_back(j);
    }
    return arr;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream os(p, std::ios::binary);  // binary keeps LF endings everywhere
    if (!os) {
        throw ConfigError("cannot write '" + path + "'");
    }
    os << text;
}

}  // namespace vshift
