// Exercises the shared-library surface the way a foreign-language binding
// would: through the C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "riskalloc.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("riskalloc_capi_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("version and default options") {
    CHECK(std::strcmp(ra_version(), "0.1.0") == 0);
    ra_options opts;
    ra_options_init(&opts);
    CHECK(opts.pairs == 1000);
    CHECK(opts.threads == 1);
    CHECK(opts.shapley_cap == 20);
}

TEST_CASE("errors set a code and a thread-local message") {
    ra_panel* panel = nullptr;
    const auto rc = ra_panel_load_csv("/definitely/not/here.csv", &panel);
    CHECK(rc == RA_ERR_IO);
    CHECK(ra_last_error_code() == RA_ERR_IO);
    CHECK(std::string(ra_last_error_message()).find("not/here.csv") !=
          std::string::npos);
    CHECK(panel == nullptr);
}

TEST_CASE("panel lifecycle through the C surface") {
    const char* ids[] = {"a", "b"};
    const double values[] = {1.0, 2.0, 3.0, 4.0};
    ra_panel* panel = nullptr;
    REQUIRE(ra_panel_create(ids, 2, 2, values, &panel) == RA_OK);
    CHECK(ra_panel_units(panel) == 2);
    CHECK(ra_panel_scenarios(panel) == 2);
    CHECK(std::strcmp(ra_panel_unit_id(panel, 1), "b") == 0);
    CHECK(ra_panel_unit_id(panel, 9) == nullptr);

    TempDir dir;
    const auto path = dir.file("p.csv");
    CHECK(ra_panel_write_csv(panel, path.c_str()) == RA_OK);
    ra_panel* reloaded = nullptr;
    REQUIRE(ra_panel_load_csv(path.c_str(), &reloaded) == RA_OK);
    CHECK(ra_panel_units(reloaded) == 2);
    ra_panel_free(reloaded);
    ra_panel_free(panel);
}

TEST_CASE("gaussian allocation end to end with repair and files") {
    ra_panel* panel = nullptr;
    REQUIRE(ra_panel_gaussian_equicorr(5, 0.0, 1.0, 0.2, 20000, 7, 1, &panel) ==
            RA_OK);
    ra_measure* measure = nullptr;
    REQUIRE(ra_measure_var(0.05, &measure) == RA_OK);

    ra_options opts;
    ra_options_init(&opts);
    ra_result* result = nullptr;
    REQUIRE(ra_allocate(panel, measure, "shapley", &opts, &result) == RA_OK);
    CHECK(ra_result_units(result) == 5);
    CHECK(ra_result_fair(result) == 1);
    double sum = 0.0;
    for (size_t i = 0; i < 5; ++i) sum += ra_result_allocation(result, i);
    CHECK(sum == doctest::Approx(ra_result_total(result)).epsilon(1e-9));
    CHECK(std::strcmp(ra_result_strategy(result), "shapley") == 0);

    double err = 0.0;
    CHECK(ra_result_std_error(result, 0, &err) == RA_ERR_INVALID_ARGUMENT);

    ra_result* repaired = nullptr;
    REQUIRE(ra_repair(result, "abs-prop", &repaired) == RA_OK);
    CHECK(std::strcmp(ra_result_strategy(repaired), "shapley+abs-prop") == 0);
    for (size_t i = 0; i < 5; ++i) CHECK(ra_result_allocation(repaired, i) >= 0.0);

    TempDir dir;
    const auto csv = dir.file("alloc.csv");
    const auto json = dir.file("alloc.json");
    CHECK(ra_result_write_csv(result, panel, csv.c_str()) == RA_OK);
    CHECK(ra_result_write_json(result, panel, json.c_str()) == RA_OK);
    CHECK(fs::exists(csv));
    CHECK(fs::exists(json));

    CHECK(ra_repair(result, "bogus", &repaired) == RA_ERR_INVALID_ARGUMENT);
    CHECK(ra_allocate(panel, measure, "nope", &opts, &result) ==
          RA_ERR_INVALID_ARGUMENT);

    ra_result_free(repaired);
    ra_result_free(result);
    ra_measure_free(measure);
    ra_panel_free(panel);
}

TEST_CASE("mc results expose standard errors and determinism") {
    ra_panel* panel = nullptr;
    REQUIRE(ra_panel_gaussian_equicorr(6, 0.0, 1.0, 0.0, 500, 3, 1, &panel) == RA_OK);
    ra_measure* measure = nullptr;
    REQUIRE(ra_measure_es(0.1, &measure) == RA_OK);
    ra_options opts;
    ra_options_init(&opts);
    opts.pairs = 200;
    opts.seed = 11;

    ra_result* a = nullptr;
    ra_result* b = nullptr;
    opts.threads = 1;
    REQUIRE(ra_allocate(panel, measure, "shapley-mc", &opts, &a) == RA_OK);
    opts.threads = 4;
    REQUIRE(ra_allocate(panel, measure, "shapley-mc", &opts, &b) == RA_OK);
    for (size_t i = 0; i < 6; ++i) {
        CHECK(ra_result_allocation(a, i) == ra_result_allocation(b, i));
        double ea = 0.0, eb = 0.0;
        REQUIRE(ra_result_std_error(a, i, &ea) == RA_OK);
        REQUIRE(ra_result_std_error(b, i, &eb) == RA_OK);
        CHECK(ea == eb);
    }
    ra_result_free(a);
    ra_result_free(b);
    ra_measure_free(measure);
    ra_panel_free(panel);
}

TEST_CASE("hierarchy and multilevel through the C surface") {
    TempDir dir;
    const auto tree = dir.file("tree.json");
    {
        std::ofstream out(tree);
        out << R"({"label":"root","children":[
            {"label":"A","units":[0,1]},
            {"label":"B","units":[2,3]}]})";
    }
    ra_hierarchy* hierarchy = nullptr;
    REQUIRE(ra_hierarchy_load_json(tree.c_str(), &hierarchy) == RA_OK);
    CHECK(ra_hierarchy_validate(hierarchy, 4) == RA_OK);
    CHECK(ra_hierarchy_validate(hierarchy, 6) == RA_ERR_INVALID_ARGUMENT);

    ra_panel* panel = nullptr;
    REQUIRE(ra_panel_gaussian_equicorr(4, 0.0, 1.0, 0.1, 5000, 5, 1, &panel) == RA_OK);
    ra_measure* measure = nullptr;
    REQUIRE(ra_measure_var(0.05, &measure) == RA_OK);
    ra_options opts;
    ra_options_init(&opts);

    ra_mlresult* ml = nullptr;
    REQUIRE(ra_allocate_multilevel(panel, measure, hierarchy, "shapley", "ptd",
                                   &opts, &ml) == RA_OK);
    REQUIRE(ra_mlresult_nodes(ml) == 3);
    CHECK(std::strcmp(ra_mlresult_path(ml, 0), "root") == 0);
    CHECK(ra_mlresult_allocation(ml, 1) + ra_mlresult_allocation(ml, 2) ==
          doctest::Approx(ra_mlresult_allocation(ml, 0)).epsilon(1e-9));
    CHECK(std::abs(ra_mlresult_gap(ml, 0)) <= 1e-9);

    const auto csv = dir.file("ml.csv");
    CHECK(ra_mlresult_write_csv(ml, csv.c_str()) == RA_OK);
    CHECK(fs::exists(csv));

    ra_mlresult_free(ml);
    ra_measure_free(measure);
    ra_panel_free(panel);
    ra_hierarchy_free(hierarchy);
}

TEST_CASE("sba pipeline through the C surface") {
    ra_sba_params* params = nullptr;
    REQUIRE(ra_sba_params_load_json("data/sba_params_sample.json", &params) == RA_OK);
    ra_sensitivities* sens = nullptr;
    REQUIRE(ra_sensitivities_load_csv("data/sba_sensitivities_sample.csv", params,
                                      &sens) == RA_OK);
    CHECK(ra_sensitivities_units(sens) == 4);
    CHECK(std::strcmp(ra_sensitivities_unit_id(sens, 2), "PTF_3") == 0);

    double total = 0.0;
    REQUIRE(ra_sba_measure_value(sens, params, &total) == RA_OK);
    CHECK(total > 0.0);

    ra_options opts;
    ra_options_init(&opts);
    ra_result* result = nullptr;
    REQUIRE(ra_sba_allocate(sens, params, "shapley", &opts, &result) == RA_OK);
    CHECK(ra_result_total(result) == doctest::Approx(total).epsilon(1e-12));
    double sum = 0.0;
    for (size_t i = 0; i < 4; ++i) sum += ra_result_allocation(result, i);
    CHECK(sum == doctest::Approx(total).epsilon(1e-9));

    // Euler variants are scenario-based and must be refused here.
    ra_result* bad = nullptr;
    CHECK(ra_sba_allocate(sens, params, "euler-std", &opts, &bad) ==
          RA_ERR_INVALID_ARGUMENT);

    ra_result_free(result);
    ra_sensitivities_free(sens);
    ra_sba_params_free(params);
}

TEST_CASE("count_evaluations and bench csv through the C surface") {
    uint64_t count = 0;
    REQUIRE(ra_count_evaluations("shapley", 10, 0, &count) == RA_OK);
    CHECK(count == 5120);
    REQUIRE(ra_count_evaluations("shapley-mc", 10, 500, &count) == RA_OK);
    CHECK(count == 5000);

    TempDir dir;
    const auto csv = dir.file("bench.csv");
    REQUIRE(ra_bench_scaling_csv("var", 0.1, 4, 6, 2, 60, 20, 20, 1, 1,
                                 csv.c_str()) == RA_OK);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,strategy,evals,median_seconds");
}

TEST_CASE("trace and converge sweeps write csv files") {
    TempDir dir;
    ra_panel* panel = nullptr;
    REQUIRE(ra_panel_gaussian_equicorr(4, 0.0, 1.0, 0.0, 300, 9, 1, &panel) == RA_OK);
    ra_measure* measure = nullptr;
    REQUIRE(ra_measure_var(0.1, &measure) == RA_OK);
    ra_options opts;
    ra_options_init(&opts);
    opts.pairs = 60;

    const auto trace = dir.file("trace.csv");
    REQUIRE(ra_trace_csv(panel, measure, &opts, 20, trace.c_str()) == RA_OK);
    std::ifstream in(trace);
    std::string header;
    std::getline(in, header);
    CHECK(header == "pairs,unit_id,estimate,std_error");

    const uint64_t grid[] = {100, 1000};
    const auto sweep = dir.file("sweep.csv");
    REQUIRE(ra_converge_gaussian_csv(4, 0.0, measure, "proportional", grid, 2, &opts,
                                     sweep.c_str()) == RA_OK);
    std::ifstream in2(sweep);
    std::getline(in2, header);
    CHECK(header == "m,unit_id,estimate");

    ra_measure_free(measure);
    ra_panel_free(panel);
}
