#include "vshift/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "vshift/config.hpp"
#include "vshift/errors.hpp"
#include "vshift/textio.hpp"

namespace vshift {

namespace {

constexpr std::string_view kParamsMagic = "vshift-params v1";

struct NamedParam {
    std::string name;
    Tensor* value;
};

/// Learnable parameters with stable layer-qualified names, topological order.
std::vector<NamedParam> named_parameters(Network& net) {
    std::vector<NamedParam> out;
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        for (const ParamRef& p : net.layer(i).parameters()) {
            out.push_back({"layer" + format_u64(i) + "." + p.name, p.value});
        }
    }
    return out;
}

void write_values(std::ostream& os, std::span<const double> xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ' ';
        os << format_double(xs[i]);
    }
    os << '\n';
}

std::vector<double> read_values(std::istream& is, std::size_t expected,
                                std::string_view what) {
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("parameter file ended while reading " + std::string(what));
    }
    std::istringstream ls(line);
    std::vector<double> out;
    out.reserve(expected);
    std::string tok;
    while (ls >> tok) out.push_back(parse_double(tok));
    if (out.size() != expected) {
        throw ConfigError("expected " + format_u64(expected) + " values for " +
                          std::string(what) + ", found " + format_u64(out.size()));
    }
    return out;
}

void save_ini(const std::string& path, const ModelBundle& b) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    os << "[arch]\n";
    os << "input_dim = " << format_u64(b.arch.input_dim) << '\n';
    os << "hidden_widths = ";
    for (std::size_t i = 0; i < b.arch.hidden_widths.size(); ++i) {
        if (i) os << ',';
        os << format_u64(b.arch.hidden_widths[i]);
    }
    os << '\n';
    os << "num_blocks = " << format_u64(b.arch.num_blocks) << '\n';
    os << "num_classes = " << format_u64(b.arch.num_classes) << '\n';
    os << "placement = " << placement_name(b.arch.placement) << '\n';
    os << "drop_ratio = " << format_double(b.arch.drop_ratio) << '\n';
    os << "beta = " << format_double(b.arch.beta) << '\n';
    os << "bn_affine = " << (b.arch.bn_affine ? 1 : 0) << '\n';
    os << "bn_momentum = " << format_double(b.arch.bn_momentum) << '\n';
    os << '\n';
    os << "[dataset]\n";
    os << "generator = " << generator_name(b.data_spec.generator) << '\n';
    os << "num_classes = " << format_u64(b.data_spec.num_classes) << '\n';
    os << "samples_per_class = " << format_u64(b.data_spec.samples_per_class) << '\n';
    os << "input_dim = " << format_u64(b.data_spec.input_dim) << '\n';
    os << "noise_scale = " << format_double(b.data_spec.noise_scale) << '\n';
    os << "seed = " << format_u64(b.data_spec.seed) << '\n';
    os << '\n';
    os << "[train]\n";
    os << "epochs = " << format_u64(b.train_cfg.epochs) << '\n';
    os << "batch_size = " << format_u64(b.train_cfg.batch_size) << '\n';
    os << "learning_rate = " << format_double(b.train_cfg.learning_rate) << '\n';
    os << "momentum = " << format_double(b.train_cfg.momentum) << '\n';
    os << "seed = " << format_u64(b.train_cfg.seed) << '\n';
    // The key is omitted when no decay is scheduled; an empty list value
    // would be rejected on load.
    if (!b.train_cfg.lr_decay_epochs.empty()) {
        os << "lr_decay_epochs = ";
        for (std::size_t i = 0; i < b.train_cfg.lr_decay_epochs.size(); ++i) {
            if (i) os << ',';
            os << format_u64(b.train_cfg.lr_decay_epochs[i]);
        }
        os << '\n';
    }
    os << "lr_decay_factor = " << format_double(b.train_cfg.lr_decay_factor) << '\n';
}

void load_ini(const std::string& path, ModelBundle& b) {
    ConfigDoc doc = load_config_file(path);
    const ConfigSection* arch_sec = doc.find("arch");
    const ConfigSection* data_sec = doc.find("dataset");
    const ConfigSection* train_sec = doc.find("train");
    if (!arch_sec || !data_sec || !train_sec) {
        throw ConfigError("model file '" + path +
                          "' needs [arch], [dataset] and [train] sections");
    }

    SectionReader arch(*arch_sec);
    b.arch.input_dim = arch.get_size("input_dim");
    b.arch.hidden_widths = arch.get_size_list_or("hidden_widths", {});
    b.arch.num_blocks = arch.get_size("num_blocks");
    b.arch.num_classes = arch.get_size("num_classes");
    b.arch.placement = placement_from_name(arch.get_string("placement"));
    b.arch.drop_ratio = arch.get_double("drop_ratio");
    b.arch.beta = arch.get_double("beta");
    b.arch.bn_affine = arch.get_bool_or("bn_affine", false);
    b.arch.bn_momentum = arch.get_double("bn_momentum");
    arch.finish();
    b.arch.validate();

    SectionReader data(*data_sec);
    b.data_spec.generator = generator_from_name(data.get_string("generator"));
    b.data_spec.num_classes = data.get_size("num_classes");
    b.data_spec.samples_per_class = data.get_size("samples_per_class");
    b.data_spec.input_dim = data.get_size("input_dim");
    b.data_spec.noise_scale = data.get_double("noise_scale");
    b.data_spec.seed = data.get_u64("seed");
    data.finish();
    b.data_spec.validate();

    SectionReader tr(*train_sec);
    b.train_cfg.epochs = tr.get_size("epochs");
    b.train_cfg.batch_size = tr.get_size("batch_size");
    b.train_cfg.learning_rate = tr.get_double("learning_rate");
    b.train_cfg.momentum = tr.get_double("momentum");
    b.train_cfg.seed = tr.get_u64("seed");
    b.train_cfg.lr_decay_epochs = tr.get_size_list_or("lr_decay_epochs", {});
    b.train_cfg.lr_decay_factor = tr.get_double("lr_decay_factor");
    tr.finish();
    b.train_cfg.validate();
}

}  // namespace

std::string placement_name(Placement p) {
    switch (p) {
        case Placement::None: return "none";
        case Placement::DropA: return "dropA";
        case Placement::DropB: return "dropB";
        case Placement::LastLayer: return "lastLayer";
        case Placement::UoutB: return "uoutB";
    }
    throw DomainError("unhandled placement");
}

Placement placement_from_name(std::string_view name) {
    if (name == "none") return Placement::None;
    if (name == "dropA") return Placement::DropA;
    if (name == "dropB") return Placement::DropB;
    if (name == "lastLayer") return Placement::LastLayer;
    if (name == "uoutB") return Placement::UoutB;
    throw ConfigError("unknown placement '" + std::string(name) +
                      "' (expected none|dropA|dropB|lastLayer|uoutB)");
}

std::string generator_name(Generator g) {
    switch (g) {
        case Generator::GaussianBlobs: return "blobs";
        case Generator::ConcentricRings: return "rings";
    }
    throw DomainError("unhandled generator");
}

Generator generator_from_name(std::string_view name) {
    if (name == "blobs") return Generator::GaussianBlobs;
    if (name == "rings") return Generator::ConcentricRings;
    throw ConfigError("unknown generator '" + std::string(name) +
                      "' (expected blobs|rings)");
}

void save_model(const std::string& dir, const ModelBundle& bundle,
                const TrainHistory* history) {
    std::filesystem::create_directories(dir);
    save_ini(dir + "/model.ini", bundle);

    // The bundle is morally const here; parameter handles require mutability.
    Network& net = const_cast<Network&>(bundle.net);
    const std::string params_path = dir + "/params.txt";
    std::ofstream os(params_path);
    if (!os) throw ConfigError("cannot write '" + params_path + "'");
    os << kParamsMagic << '\n';
    for (const NamedParam& p : named_parameters(net)) {
        os << "param " << p.name;
        for (std::size_t extent : p.value->shape()) os << ' ' << format_u64(extent);
        os << '\n';
        write_values(os, p.value->values());
    }
    std::size_t bn_index = 0;
    for (BatchNormLayer* bn : net.batchnorm_layers()) {
        const MovingStats& ms = bn->moving_stats();
        os << "stats " << format_u64(bn_index++) << ' ' << format_u64(ms.channels())
           << ' ' << format_u64(ms.update_count()) << '\n';
        write_values(os, ms.mean());
        write_values(os, ms.variance());
    }
    os << "end\n";

    if (history != nullptr) {
        const std::string hist_path = dir + "/history.csv";
        std::ofstream hs(hist_path);
        if (!hs) throw ConfigError("cannot write '" + hist_path + "'");
        hs << "epoch,loss,accuracy\n";
        for (std::size_t e = 0; e < history->epochs.size(); ++e) {
            hs << format_u64(e) << ',' << format_double(history->epochs[e].loss) << ','
               << format_double(history->epochs[e].accuracy) << '\n';
        }
    }
}

ModelBundle load_model(const std::string& dir) {
    ModelBundle bundle;
    load_ini(dir + "/model.ini", bundle);

    RngStream scratch(0, 0);  // parameters are overwritten below
    bundle.net = build_network(bundle.arch, scratch);

    const std::string params_path = dir + "/params.txt";
    std::ifstream is(params_path);
    if (!is) throw ConfigError("cannot open '" + params_path + "'");
    std::string line;
    if (!std::getline(is, line) || line != kParamsMagic) {
        throw ConfigError("'" + params_path + "' is not a recognized parameter file");
    }

    std::vector<NamedParam> params = named_parameters(bundle.net);
    std::vector<BatchNormLayer*> bns = bundle.net.batchnorm_layers();
    std::size_t next_param = 0, next_stats = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "end") {
            if (next_param != params.size() || next_stats != bns.size()) {
                throw ConfigError("parameter file is missing entries for this architecture");
            }
            return bundle;
        }
        if (tag == "param") {
            std::string name;
            if (!(ls >> name)) {
                throw ConfigError("malformed param header in '" + params_path + "'");
            }
            std::vector<std::size_t> shape;
            std::string extent;
            while (ls >> extent) shape.push_back(static_cast<std::size_t>(parse_u64(extent)));
            if (shape.empty()) {
                throw ConfigError("malformed param header in '" + params_path + "'");
            }
            if (next_param >= params.size() || name != params[next_param].name) {
                throw ConfigError("parameter '" + name +
                                  "' does not match the declared architecture");
            }
            Tensor* dst = params[next_param].value;
            if (shape != dst->shape()) {
                throw ConfigError("parameter '" + name + "' has mismatched shape");
            }
            std::vector<double> vals = read_values(is, dst->size(), name);
            std::copy(vals.begin(), vals.end(), &(*dst)[0]);
            ++next_param;
            continue;
        }
        if (tag == "stats") {
            std::string index, channels, updates;
            if (!(ls >> index >> channels >> updates)) {
                throw ConfigError("malformed stats header in '" + params_path + "'");
            }
            if (next_stats >= bns.size() || parse_u64(index) != next_stats) {
                throw ConfigError("moving statistics block " + index +
                                  " does not match the declared architecture");
            }
            MovingStats& ms = bns[next_stats]->moving_stats();
            if (parse_u64(channels) != ms.channels()) {
                throw ConfigError("moving statistics block " + index +
                                  " has mismatched channel count");
            }
            std::vector<double> mean = read_values(is, ms.channels(), "moving mean");
            std::vector<double> var = read_values(is, ms.channels(), "moving variance");
            ms.set_values(mean, var);
            ms.set_update_count(parse_u64(updates));
            ++next_stats;
            continue;
        }
        throw ConfigError("unrecognized entry '" + tag + "' in '" + params_path + "'");
    }
    throw ConfigError("parameter file ended before its end marker");
}

}  // namespace vshift
