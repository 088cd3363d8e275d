#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vshift/arch.hpp"
#include "vshift/checkpoint.hpp"
#include "vshift/config.hpp"
#include "vshift/dataset.hpp"
#include "vshift/diagnostics.hpp"
#include "vshift/errors.hpp"
#include "vshift/experiment.hpp"
#include "vshift/montecarlo.hpp"
#include "vshift/report.hpp"
#include "vshift/svg.hpp"
#include "vshift/textio.hpp"
#include "vshift/train.hpp"

using namespace vshift;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

/// Unique scratch directory under the build tree, wiped on construction.
struct ScratchDir {
    std::filesystem::path path;

    explicit ScratchDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / ("vshift-test-" + name)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~ScratchDir() { std::filesystem::remove_all(path); }

    std::string str() const { return path.string(); }
    std::string sub(const std::string& leaf) const { return (path / leaf).string(); }
};

ModelBundle small_trained_bundle() {
    ModelBundle b;
    b.data_spec.num_classes = 3;
    b.data_spec.samples_per_class = 40;
    b.data_spec.input_dim = 8;
    b.data_spec.noise_scale = 1.0;
    b.data_spec.seed = 5;
    b.arch.input_dim = 8;
    b.arch.hidden_widths = {12};
    b.arch.num_blocks = 2;
    b.arch.num_classes = 3;
    b.arch.placement = Placement::DropA;
    b.arch.drop_ratio = 0.3;
    b.arch.bn_momentum = 0.1;
    b.train_cfg.epochs = 8;
    b.train_cfg.batch_size = 16;
    b.train_cfg.learning_rate = 0.05;
    b.train_cfg.seed = 4;
    DatasetPair data = make_dataset(b.data_spec);
    RngStream init(b.train_cfg.seed, 10);
    b.net = build_network(b.arch, init);
    train(b.net, data.train, b.train_cfg);
    return b;
}

}  // namespace

TEST_CASE("config parses sections, ids, comments and value types") {
    ConfigDoc doc = parse_config_text(
        "# header comment\n"
        "[experiment]\n"
        "name = demo  ; trailing comment\n"
        "seeds = 1,2,3\n"
        "rate = 0.25\n"
        "flag = true\n"
        "\n"
        "[cell base]\n"
        "placement = none\n");
    REQUIRE(doc.sections.size() == 2);
    const ConfigSection* exp = doc.find("experiment");
    REQUIRE(exp != nullptr);
    SectionReader r(*exp);
    CHECK(r.get_string("name") == "demo");
    CHECK(r.get_u64_list_or("seeds", {}) == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(r.get_double("rate") == doctest::Approx(0.25));
    CHECK(r.get_bool_or("flag", false));
    CHECK_NOTHROW(r.finish());

    const ConfigSection* cell = doc.all("cell").at(0);
    CHECK(cell->id == "base");
    CHECK(cell->value("placement") == "none");
}

TEST_CASE("config rejects malformed input with line numbers") {
    CHECK_THROWS_AS(parse_config_text("key = 1\n"), ConfigError);  // before any section
    CHECK_THROWS_AS(parse_config_text("[a]\nnot-a-pair\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[a]\nk = 1\nk = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[unclosed\nk = 1\n"), ConfigError);
    try {
        parse_config_text("[a]\nk = 1\n???\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("section reader rejects unknown keys and bad values") {
    ConfigDoc doc = parse_config_text("[s]\na = 1\nb = x\n");
    {
        SectionReader r(*doc.find("s"));
        CHECK(r.get_u64("a") == 1);
        CHECK_THROWS_AS(r.finish(), ConfigError);  // b never consumed
    }
    {
        SectionReader r(*doc.find("s"));
        CHECK_THROWS_AS(r.get_u64("b"), ConfigError);   // not a number
        CHECK_THROWS_AS(r.get_u64("missing"), ConfigError);
        CHECK(r.get_u64_or("missing", 7) == 7);
    }
}

TEST_CASE("checkpoint round-trip preserves every value byte for byte") {
    ScratchDir dir("checkpoint");
    ModelBundle b = small_trained_bundle();
    TrainHistory hist;
    hist.epochs = {{0.9, 0.5}, {0.7, 0.625}};
    save_model(dir.sub("m"), b, &hist);

    ModelBundle loaded = load_model(dir.sub("m"));
    CHECK(loaded.arch.placement == b.arch.placement);
    CHECK(loaded.arch.drop_ratio == b.arch.drop_ratio);
    CHECK(loaded.data_spec.seed == b.data_spec.seed);
    CHECK(loaded.train_cfg.epochs == b.train_cfg.epochs);
    CHECK(loaded.net.parameter_checksum() == b.net.parameter_checksum());

    // Moving statistics and their update counts survive.
    std::vector<BatchNormLayer*> src = b.net.batchnorm_layers();
    std::vector<BatchNormLayer*> dst = loaded.net.batchnorm_layers();
    REQUIRE(src.size() == dst.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        CHECK(src[i]->moving_stats().update_count() == dst[i]->moving_stats().update_count());
        std::span<const double> sv = src[i]->moving_stats().variance();
        std::span<const double> dv = dst[i]->moving_stats().variance();
        std::span<const double> sm = src[i]->moving_stats().mean();
        std::span<const double> dm = dst[i]->moving_stats().mean();
        REQUIRE(sv.size() == dv.size());
        for (std::size_t c = 0; c < sv.size(); ++c) {
            CHECK(sv[c] == dv[c]);
            CHECK(sm[c] == dm[c]);
        }
    }

    // Saving the loaded bundle reproduces the files exactly.
    save_model(dir.sub("m2"), loaded);
    CHECK(read_file(dir.sub("m/model.ini")) == read_file(dir.sub("m2/model.ini")));
    CHECK(read_file(dir.sub("m/params.txt")) == read_file(dir.sub("m2/params.txt")));

    // Forward outputs agree on fresh data.
    DatasetPair data = make_dataset(b.data_spec);
    Tensor a = eval_logits(b.net, data.test.features);
    Tensor c = eval_logits(loaded.net, data.test.features);
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == c[i]);

    CHECK(read_file(dir.sub("m/history.csv")) ==
          "epoch,loss,accuracy\n0,0.9,0.5\n1,0.7,0.625\n");
}

TEST_CASE("checkpoint loader rejects tampered files") {
    ScratchDir dir("tamper");
    ModelBundle b = small_trained_bundle();
    save_model(dir.sub("m"), b);

    CHECK_THROWS_AS(load_model(dir.sub("missing")), ConfigError);

    std::string params = read_file(dir.sub("m/params.txt"));
    {
        std::ofstream os(dir.sub("m/params.txt"), std::ios::binary);
        os << params.substr(0, params.size() - 5);  // drop the end marker
    }
    CHECK_THROWS_AS(load_model(dir.sub("m")), ConfigError);
    {
        std::ofstream os(dir.sub("m/params.txt"), std::ios::binary);
        os << "wrong magic\n";
    }
    CHECK_THROWS_AS(load_model(dir.sub("m")), ConfigError);
}

TEST_CASE("placement and generator names round-trip") {
    for (Placement p : {Placement::None, Placement::DropA, Placement::DropB,
                        Placement::LastLayer, Placement::UoutB}) {
        CHECK(placement_from_name(placement_name(p)) == p);
    }
    for (Generator g : {Generator::GaussianBlobs, Generator::ConcentricRings}) {
        CHECK(generator_from_name(generator_name(g)) == g);
    }
    CHECK_THROWS_AS(placement_from_name("sideways"), ConfigError);
    CHECK_THROWS_AS(generator_from_name("spirals"), ConfigError);
}

TEST_CASE("shift and consistency serializers pin their headers") {
    ShiftReport rep;
    rep.layers = {{1, 2.0, 1.0, 2.0}, {2, 1.0, 4.0, 4.0}};
    std::string csv = shift_report_csv(rep);
    CHECK(csv == "layer,moving_var,real_var,max_ratio\n1,2,1,2\n2,1,4,4\n");

    rep.consistency = ConsistencyReport{0.75, 0.5, 0.125};
    Json j = shift_report_json(rep);
    CHECK(j["geometric_mean_max_ratio"] == doctest::Approx(std::sqrt(8.0)));
    CHECK(j["layers"].size() == 2);
    CHECK(j["consistency"]["flip_rate"] == doctest::Approx(0.125));

    CHECK(consistency_csv(*rep.consistency) ==
          "train_mode_acc,eval_mode_acc,flip_rate\n0.75,0.5,0.125\n");
}

TEST_CASE("sweep serializer fills only the applicable columns") {
    SweepRow a;
    a.spec.id = "a1";
    a.spec.kind = ScenarioKind::CaseA;
    a.spec.scenario.input_mean = 1.0;
    a.spec.scenario.input_variance = 1.0;
    a.spec.scenario.retain_ratio = 0.5;
    a.analytic = 1.0 / 3.0;
    a.mc = {0.33, 0.001, 1000};
    a.z = -3.0;

    SweepRow u;
    u.spec.id = "u1";
    u.spec.kind = ScenarioKind::Uout;
    u.spec.scenario.uout_halfwidth = 0.1;
    u.failed = true;
    u.error = "bad scenario";

    std::string csv = sweep_rows_csv({a, u});
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "scenario_id,c,v,p,d,rho_x,cos2theta,beta,analytic,mc,stderr,z");
    std::getline(is, line);
    CHECK(line == "a1,1,1,0.5,,,,,0.3333333333333333,0.33,0.001,-3");
    std::getline(is, line);
    CHECK(line == "u1,,,,,,,0.1,,,,");

    Json j = sweep_rows_json({a, u});
    CHECK(j[0]["kind"] == "single-unit");
    CHECK(j[1]["error"] == "bad scenario");
}

TEST_CASE("line chart renders axes, series and legend") {
    SvgSeries s1{"first", {{1.0, 1.0}, {2.0, 2.0}, {3.0, 1.5}}};
    SvgSeries s2{"second", {{1.0, 3.0}, {2.0, 2.5}}};
    std::string svg = render_line_chart("title text", "x axis", "y axis", {s1, s2});
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("title text") != std::string::npos);
    CHECK(svg.find("x axis") != std::string::npos);
    CHECK(svg.find("y axis") != std::string::npos);
    CHECK(svg.find("first") != std::string::npos);
    CHECK(svg.find("second") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos;
         at = svg.find("<polyline", at + 1)) {
        ++polylines;
    }
    CHECK(polylines == 2);
    CHECK(render_line_chart("t", "x", "y", {s1}) == render_line_chart("t", "x", "y", {s1}));

    CHECK_THROWS_AS(render_line_chart("t", "x", "y", {}), DomainError);
    SvgSeries empty{"e", {}};
    CHECK_THROWS_AS(render_line_chart("t", "x", "y", {empty}), DomainError);
    SvgSeries bad{"b", {{0.0, std::numeric_limits<double>::quiet_NaN()}}};
    CHECK_THROWS_AS(render_line_chart("t", "x", "y", {bad}), DomainError);
}

TEST_CASE("escaped text survives markup-sensitive labels") {
    SvgSeries s{"a<b&c>", {{0.0, 0.0}, {1.0, 1.0}}};
    std::string svg = render_line_chart("t", "x", "y", {s});
    CHECK(svg.find("a&lt;b&amp;c&gt;") != std::string::npos);
    CHECK(svg.find("a<b") == std::string::npos);
}

static const char* kTinyExperiment =
    "[experiment]\n"
    "name = tiny\n"
    "seeds = 1\n"
    "epochs = 4\n"
    "batch_size = 16\n"
    "learning_rate = 0.05\n"
    "bn_momentum = 0.1\n"
    "width = 12\n"
    "num_blocks = 2\n"
    "scan_passes = 2\n"
    "adjust = true\n"
    "adjust_passes = 2\n"
    "seed_base = 50\n"
    "\n"
    "[dataset]\n"
    "num_classes = 3\n"
    "samples_per_class = 30\n"
    "input_dim = 8\n"
    "noise_scale = 1\n"
    "\n"
    "[cell base]\n"
    "placement = none\n"
    "\n"
    "[cell drop]\n"
    "placement = dropA\n"
    "drop_ratio = 0.5\n";

TEST_CASE("experiment plan parses and validates the grid") {
    ExperimentPlan plan = plan_from_config(parse_config_text(kTinyExperiment));
    CHECK(plan.name == "tiny");
    CHECK(plan.out_dir == "tiny");  // defaults to the name
    CHECK(plan.seeds == std::vector<std::uint64_t>{1});
    CHECK(plan.train_cfg.epochs == 4);
    CHECK(plan.data_spec.seed == 50);
    REQUIRE(plan.cells.size() == 2);
    CHECK(plan.cells[1].placement == Placement::DropA);
    CHECK(plan.cells[1].hidden_widths == std::vector<std::size_t>{12});
    CHECK(plan.cells[1].num_blocks == 2);
}

TEST_CASE("experiment plan rejects bad grids") {
    // No cells at all.
    CHECK_THROWS_AS(plan_from_config(parse_config_text(
                        "[experiment]\nseeds = 1\n[dataset]\nnum_classes = 3\n")),
                    ConfigError);
    // Empty seed list.
    CHECK_THROWS_AS(plan_from_config(parse_config_text(
                        "[experiment]\n[dataset]\n[cell a]\nplacement = none\n")),
                    ConfigError);
    // Unknown key is a hard error.
    CHECK_THROWS_AS(plan_from_config(parse_config_text(
                        "[experiment]\nseeds = 1\nbogus = 1\n[dataset]\n"
                        "[cell a]\nplacement = none\n")),
                    ConfigError);
    // Cell id missing.
    CHECK_THROWS_AS(plan_from_config(parse_config_text(
                        "[experiment]\nseeds = 1\n[dataset]\n[cell]\nplacement = none\n")),
                    ConfigError);
    // Duplicate cell ids.
    CHECK_THROWS_AS(plan_from_config(parse_config_text(
                        "[experiment]\nseeds = 1\n[dataset]\n"
                        "[cell a]\nplacement = none\n[cell a]\nplacement = none\n")),
                    ConfigError);
    // Cell-level validation failures surface at plan time.
    CHECK_THROWS_AS(plan_from_config(parse_config_text(
                        "[experiment]\nseeds = 1\n[dataset]\n"
                        "[cell a]\nplacement = dropA\ndrop_ratio = 1.0\n")),
                    DomainError);
}

TEST_CASE("experiment runs the grid and writes deterministic outputs") {
    ScratchDir dir("experiment");
    ExperimentPlan plan = plan_from_config(parse_config_text(kTinyExperiment));
    plan.out_dir = dir.sub("run");
    std::ostringstream log;
    ExperimentResult result = run_experiment(plan, log);
    CHECK_FALSE(result.any_failed);
    REQUIRE(result.runs.size() == 2);
    CHECK(result.runs[0].cell_id == "base");
    CHECK(result.runs[1].cell_id == "drop");
    CHECK(result.runs[1].gm_max_ratio > result.runs[0].gm_max_ratio);

    std::string cells = read_file(dir.sub("run/cells.csv"));
    CHECK(cells.find("cell,seed,status,train_acc,test_acc,vote_acc,eval_acc,"
                     "flip_rate,gm_max_ratio,adjusted_test_acc,error\n") == 0);
    CHECK(cells.find("base,1,ok,") != std::string::npos);
    CHECK(cells.find("drop,1,ok,") != std::string::npos);

    Json summary = Json::parse(read_file(dir.sub("run/summary.json")));
    CHECK(summary["experiment"] == "tiny");
    CHECK(summary["any_failed"] == false);
    REQUIRE(summary["cells"].size() == 2);
    CHECK(summary["cells"][1]["runs"][0]["status"] == "ok");
    CHECK(summary["cells"][1]["mean_gm_max_ratio"].get<double>() ==
          doctest::Approx(result.runs[1].gm_max_ratio));

    std::string svg = read_file(dir.sub("run/shift_curves.svg"));
    CHECK(svg.find("<svg") == 0);

    CHECK(std::filesystem::exists(dir.sub("run/shift_base_s1.csv")));
    CHECK(std::filesystem::exists(dir.sub("run/shift_drop_s1.csv")));
    std::string shift = read_file(dir.sub("run/shift_drop_s1.csv"));
    CHECK(shift.find("layer,moving_var,real_var,max_ratio\n") == 0);

    // A rerun reproduces every artifact byte for byte.
    ExperimentPlan again = plan_from_config(parse_config_text(kTinyExperiment));
    again.out_dir = dir.sub("run2");
    std::ostringstream log2;
    run_experiment(again, log2);
    for (const char* f : {"cells.csv", "summary.json", "shift_curves.svg",
                          "shift_base_s1.csv", "shift_drop_s1.csv"}) {
        CHECK(read_file(dir.sub(std::string("run/") + f)) ==
              read_file(dir.sub(std::string("run2/") + f)));
    }
}

TEST_CASE("experiment records a failing cell and keeps going") {
    ScratchDir dir("experiment-fail");
    std::string text = std::string(kTinyExperiment) +
                       "\n[cell broken]\nplacement = none\nnum_blocks = 0\n";
    ExperimentPlan plan = plan_from_config(parse_config_text(text));
    plan.out_dir = dir.sub("run");
    std::ostringstream log;
    ExperimentResult result = run_experiment(plan, log);
    CHECK(result.any_failed);
    REQUIRE(result.runs.size() == 3);
    CHECK_FALSE(result.runs[0].failed);
    CHECK_FALSE(result.runs[1].failed);
    CHECK(result.runs[2].failed);  // no normalization layers to scan
    CHECK_FALSE(result.runs[2].error.empty());

    std::string cells = read_file(dir.sub("run/cells.csv"));
    CHECK(cells.find("broken,1,failed,") != std::string::npos);
    Json summary = Json::parse(read_file(dir.sub("run/summary.json")));
    CHECK(summary["any_failed"] == true);
    CHECK(summary["cells"][2]["failures"] == 1);
}

TEST_CASE("csv dataset loader reads labeled rows") {
    ScratchDir dir("csvdata");
    write_text_file(dir.sub("d.csv"),
                    "0.5, -1.25, 0\n"
                    "1.0, 2.0, 1\n"
                    "\n"
                    "-3.5, 0.0, 2\n");
    Dataset d = load_csv_dataset(dir.sub("d.csv"));
    REQUIRE(d.size() == 3);
    CHECK(d.features.rows() == 3);
    CHECK(d.features.cols() == 2);
    CHECK(d.features[0] == 0.5);
    CHECK(d.features[1] == -1.25);
    CHECK(d.features[4] == -3.5);
    CHECK(d.labels == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("csv dataset loader rejects malformed files") {
    ScratchDir dir("csvbad");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("missing.csv")), ConfigError);

    write_text_file(dir.sub("empty.csv"), "\n\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("empty.csv")), ConfigError);

    write_text_file(dir.sub("ragged.csv"), "1,2,0\n1,1\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("ragged.csv")), ConfigError);

    write_text_file(dir.sub("text.csv"), "1,abc,0\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("text.csv")), ConfigError);

    write_text_file(dir.sub("neg.csv"), "1,2,-1\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("neg.csv")), ConfigError);

    write_text_file(dir.sub("frac.csv"), "1,2,0.5\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("frac.csv")), ConfigError);

    write_text_file(dir.sub("labelonly.csv"), "0\n1\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("labelonly.csv")), ConfigError);

    write_text_file(dir.sub("nan.csv"), "nan,2,0\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.sub("nan.csv")), ConfigError);
}

TEST_CASE("text files are written with LF endings and parent directories") {
    ScratchDir dir("textout");
    write_text_file(dir.sub("a/b/c.txt"), "line 1\nline 2\n");
    std::string back = read_file(dir.sub("a/b/c.txt"));
    CHECK(back == "line 1\nline 2\n");
    CHECK(back.find('\r') == std::string::npos);
}
