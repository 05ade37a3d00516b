// Batch entry point for the risk allocation engine. Links the C API only.
//
// Subcommands:
//   allocate  — single- or multi-level allocation of a panel (file or
//               synthetic Gaussian), optional repair, CSV/JSON output
//   converge  — Monte Carlo pair traces or sample-size sweeps
//   bench     — exact-vs-MC scaling study
//   sba       — allocation of the FRTB delta equity SBA measure

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskalloc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;  // domain/computation errors
constexpr int kExitInput = 2;    // missing/malformed files and flags

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void fail(ra_status status) {
    const int exit_code =
        (status == RA_ERR_PARSE || status == RA_ERR_IO ||
         status == RA_ERR_INVALID_ARGUMENT)
            ? kExitInput
            : kExitRuntime;
    throw CliError{exit_code, ra_last_error_message()};
}

void check(ra_status status) {
    if (status != RA_OK) fail(status);
}

template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, std::integral_constant<void (*)(T*), Free>>;

using PanelHandle = Handle<ra_panel, ra_panel_free>;
using MeasureHandle = Handle<ra_measure, ra_measure_free>;
using HierarchyHandle = Handle<ra_hierarchy, ra_hierarchy_free>;
using ResultHandle = Handle<ra_result, ra_result_free>;
using MlResultHandle = Handle<ra_mlresult, ra_mlresult_free>;
using SbaParamsHandle = Handle<ra_sba_params, ra_sba_params_free>;
using SensHandle = Handle<ra_sensitivities, ra_sensitivities_free>;

struct GaussianFlags {
    std::size_t n = 0;
    double rho = 0.0;
    double mean = 0.0;
    double sd = 1.0;

    // Inline spec "n=10,rho=0.3[,mean=0,sd=1]".
    static GaussianFlags parse(const std::string& text) {
        GaussianFlags g;
        std::string token;
        std::stringstream ss(text);
        while (std::getline(ss, token, ',')) {
            const auto eq = token.find('=');
            if (eq == std::string::npos)
                throw CliError{kExitInput, "bad --gaussian token '" + token + "'"};
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            try {
                if (key == "n")
                    g.n = std::stoul(value);
                else if (key == "rho")
                    g.rho = std::stod(value);
                else if (key == "mean")
                    g.mean = std::stod(value);
                else if (key == "sd")
                    g.sd = std::stod(value);
                else
                    throw CliError{kExitInput, "unknown --gaussian key '" + key + "'"};
            } catch (const std::logic_error&) {
                throw CliError{kExitInput, "bad --gaussian value '" + token + "'"};
            }
        }
        if (g.n == 0)
            throw CliError{kExitInput, "--gaussian needs n=<units>"};
        return g;
    }
};

struct CommonFlags {
    std::string panel_path;
    std::string stressed_path;
    std::string gaussian_spec;
    std::string measure = "var";
    double alpha = 0.01;
    std::string strategy = "shapley";
    std::string repair = "none";
    std::string multilevel;
    std::string hierarchy_path;
    std::uint64_t pairs = 1000;
    std::uint64_t samples = 10000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    std::string out_path;
    std::string format = "csv";
    bool strict_seed = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--panel", f.panel_path, "Scenario CSV file");
    cmd->add_option("--stressed-panel", f.stressed_path,
                    "Stressed scenario CSV (for --measure var+svar)");
    cmd->add_option("--gaussian", f.gaussian_spec,
                    "Synthetic panel spec: n=10,rho=0.3[,mean=0,sd=1]");
    cmd->add_option("--measure", f.measure, "std | var | es | var+svar | sba")
        ->default_val("var");
    cmd->add_option("--alpha", f.alpha, "Tail probability in (0,1)")->default_val(0.01);
    cmd->add_option("--strategy", f.strategy,
                    "standalone | proportional | marginal | shapley | shapley-mc | "
                    "liu-abs | liu-max | euler-std | euler-es | euler-var1 | "
                    "euler-var2 | euler-var-kernel")
        ->default_val("shapley");
    cmd->add_option("--repair", f.repair, "none | max-prop | abs-prop")
        ->default_val("none");
    cmd->add_option("--multilevel", f.multilevel, "ptd | ctd | bu");
    cmd->add_option("--hierarchy", f.hierarchy_path, "Hierarchy JSON file");
    cmd->add_option("--pairs", f.pairs, "Antithetic pair budget for shapley-mc")
        ->default_val(1000);
    cmd->add_option("--samples", f.samples, "Scenario count m for --gaussian")
        ->default_val(10000);
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--threads", f.threads, "Worker cap")->default_val(1);
    cmd->add_option("--out", f.out_path, "Output file path");
    cmd->add_option("--format", f.format, "csv | json")->default_val("csv");
    cmd->add_flag("--strict-seed", f.strict_seed,
                  "Require an explicit --seed for randomized runs");
}

ra_options make_options(const CommonFlags& f) {
    ra_options options;
    ra_options_init(&options);
    options.pairs = f.pairs;
    options.seed = f.seed;
    options.threads = f.threads;
    return options;
}

bool randomized(const CommonFlags& f) {
    return !f.gaussian_spec.empty() || f.strategy == "shapley-mc";
}

void enforce_strict_seed(const CommonFlags& f) {
    if (f.strict_seed && randomized(f) && !f.seed_given)
        throw CliError{kExitInput,
                       "--strict-seed: randomized runs need an explicit --seed"};
}

PanelHandle load_or_sample_panel(const CommonFlags& f) {
    if (!f.panel_path.empty() && !f.gaussian_spec.empty())
        throw CliError{kExitInput, "--panel and --gaussian are mutually exclusive"};
    ra_panel* panel = nullptr;
    if (!f.panel_path.empty()) {
        check(ra_panel_load_csv(f.panel_path.c_str(), &panel));
    } else if (!f.gaussian_spec.empty()) {
        const auto g = GaussianFlags::parse(f.gaussian_spec);
        check(ra_panel_gaussian_equicorr(g.n, g.mean, g.sd, g.rho, f.samples, f.seed,
                                         f.threads, &panel));
    } else {
        throw CliError{kExitInput, "one of --panel or --gaussian is required"};
    }
    return PanelHandle(panel);
}

MeasureHandle make_measure(const CommonFlags& f, const PanelHandle& panel) {
    ra_measure* measure = nullptr;
    if (f.measure == "std") {
        check(ra_measure_std(&measure));
    } else if (f.measure == "var") {
        check(ra_measure_var(f.alpha, &measure));
    } else if (f.measure == "es") {
        check(ra_measure_es(f.alpha, &measure));
    } else if (f.measure == "var+svar") {
        if (f.stressed_path.empty())
            throw CliError{kExitInput, "--measure var+svar needs --stressed-panel"};
        ra_panel* stressed = nullptr;
        check(ra_panel_load_csv(f.stressed_path.c_str(), &stressed));
        PanelHandle stressed_handle(stressed);
        check(ra_measure_var_svar(f.alpha, stressed, &measure));
    } else {
        throw CliError{kExitInput, "unknown measure '" + f.measure +
                                       "' (sba runs under the 'sba' subcommand)"};
    }
    (void)panel;
    return MeasureHandle(measure);
}

void write_result(const ResultHandle& result, const PanelHandle& panel,
                  const CommonFlags& f) {
    if (f.out_path.empty()) return;
    if (f.format == "json")
        check(ra_result_write_json(result.get(), panel.get(), f.out_path.c_str()));
    else if (f.format == "csv")
        check(ra_result_write_csv(result.get(), panel.get(), f.out_path.c_str()));
    else
        throw CliError{kExitInput, "unknown format '" + f.format + "'"};
}

void print_summary(const ResultHandle& result) {
    double sum = 0.0;
    for (std::size_t i = 0; i < ra_result_units(result.get()); ++i)
        sum += ra_result_allocation(result.get(), i);
    std::printf("strategy=%s sum_allocations=%.10g total=%.10g gap=%.3e\n",
                ra_result_strategy(result.get()), sum,
                ra_result_total(result.get()), ra_result_gap(result.get()));
}

int cmd_allocate(const CommonFlags& f) {
    enforce_strict_seed(f);
    auto panel = load_or_sample_panel(f);
    auto measure = make_measure(f, panel);
    const ra_options options = make_options(f);

    if (!f.multilevel.empty()) {
        if (f.hierarchy_path.empty())
            throw CliError{kExitInput, "--multilevel needs --hierarchy"};
        ra_hierarchy* hierarchy = nullptr;
        check(ra_hierarchy_load_json(f.hierarchy_path.c_str(), &hierarchy));
        HierarchyHandle hierarchy_handle(hierarchy);
        ra_mlresult* ml = nullptr;
        check(ra_allocate_multilevel(panel.get(), measure.get(), hierarchy,
                                     f.strategy.c_str(), f.multilevel.c_str(),
                                     &options, &ml));
        MlResultHandle ml_handle(ml);
        if (!f.out_path.empty()) {
            if (f.format == "json")
                check(ra_mlresult_write_json(ml, f.out_path.c_str()));
            else
                check(ra_mlresult_write_csv(ml, f.out_path.c_str()));
        }
        std::printf("multilevel=%s nodes=%zu root=%.10g\n", f.multilevel.c_str(),
                    ra_mlresult_nodes(ml), ra_mlresult_allocation(ml, 0));
        return kExitOk;
    }

    ra_result* raw = nullptr;
    check(ra_allocate(panel.get(), measure.get(), f.strategy.c_str(), &options, &raw));
    ResultHandle result(raw);
    if (f.repair != "none") {
        ra_result* repaired = nullptr;
        check(ra_repair(result.get(), f.repair.c_str(), &repaired));
        result.reset(repaired);
    }
    write_result(result, panel, f);
    print_summary(result);
    return kExitOk;
}

int cmd_converge(const CommonFlags& f, std::uint64_t stride) {
    enforce_strict_seed(f);
    if (f.out_path.empty()) throw CliError{kExitInput, "converge needs --out"};

    if (f.strategy == "shapley-mc") {
        auto panel = load_or_sample_panel(f);
        auto measure = make_measure(f, panel);
        const ra_options options = make_options(f);
        check(ra_trace_csv(panel.get(), measure.get(), &options, stride,
                           f.out_path.c_str()));
        std::printf("trace written to %s (pairs=%" PRIu64 ", stride=%" PRIu64 ")\n",
                    f.out_path.c_str(), f.pairs, stride);
        return kExitOk;
    }

    // Sample-size sweep: powers of 10 up to --samples, on the Gaussian spec.
    if (f.gaussian_spec.empty())
        throw CliError{kExitInput, "converge sweeps need --gaussian"};
    const auto g = GaussianFlags::parse(f.gaussian_spec);
    auto measure = make_measure(f, PanelHandle(nullptr));
    std::vector<std::uint64_t> grid;
    for (std::uint64_t m = 100; m < f.samples; m *= 10) grid.push_back(m);
    grid.push_back(f.samples);
    const ra_options options = make_options(f);
    check(ra_converge_gaussian_csv(g.n, g.rho, measure.get(), f.strategy.c_str(),
                                   grid.data(), grid.size(), &options,
                                   f.out_path.c_str()));
    std::printf("sweep written to %s (%zu grid points up to m=%" PRIu64 ")\n",
                f.out_path.c_str(), grid.size(), f.samples);
    return kExitOk;
}

int cmd_bench(const CommonFlags& f, std::size_t n_lo, std::size_t n_hi,
              std::size_t n_step, int repetitions, int exact_cap) {
    enforce_strict_seed(f);
    if (f.out_path.empty()) throw CliError{kExitInput, "bench needs --out"};
    check(ra_bench_scaling_csv(f.measure.c_str(), f.alpha, n_lo, n_hi, n_step,
                               f.samples, f.pairs, exact_cap, repetitions, f.seed,
                               f.out_path.c_str()));
    std::printf("bench written to %s (n=%zu..%zu, m=%" PRIu64 ", pairs=%" PRIu64
                ")\n",
                f.out_path.c_str(), n_lo, n_hi, f.samples, f.pairs);
    return kExitOk;
}

int cmd_sba(const CommonFlags& f, const std::string& sens_path,
            const std::string& params_path) {
    enforce_strict_seed(f);
    if (sens_path.empty() || params_path.empty())
        throw CliError{kExitInput, "sba needs --sensitivities and --sba-params"};

    ra_sba_params* params = nullptr;
    check(ra_sba_params_load_json(params_path.c_str(), &params));
    SbaParamsHandle params_handle(params);
    ra_sensitivities* sens = nullptr;
    check(ra_sensitivities_load_csv(sens_path.c_str(), params, &sens));
    SensHandle sens_handle(sens);
    const ra_options options = make_options(f);

    if (!f.multilevel.empty()) {
        if (f.hierarchy_path.empty())
            throw CliError{kExitInput, "--multilevel needs --hierarchy"};
        ra_hierarchy* hierarchy = nullptr;
        check(ra_hierarchy_load_json(f.hierarchy_path.c_str(), &hierarchy));
        HierarchyHandle hierarchy_handle(hierarchy);
        ra_mlresult* ml = nullptr;
        check(ra_sba_allocate_multilevel(sens, params, hierarchy, f.strategy.c_str(),
                                         f.multilevel.c_str(), &options, &ml));
        MlResultHandle ml_handle(ml);
        if (!f.out_path.empty()) {
            if (f.format == "json")
                check(ra_mlresult_write_json(ml, f.out_path.c_str()));
            else
                check(ra_mlresult_write_csv(ml, f.out_path.c_str()));
        }
        std::printf("multilevel=%s nodes=%zu root=%.10g\n", f.multilevel.c_str(),
                    ra_mlresult_nodes(ml), ra_mlresult_allocation(ml, 0));
        return kExitOk;
    }

    ra_result* raw = nullptr;
    check(ra_sba_allocate(sens, params, f.strategy.c_str(), &options, &raw));
    ResultHandle result(raw);
    if (f.repair != "none") {
        ra_result* repaired = nullptr;
        check(ra_repair(result.get(), f.repair.c_str(), &repaired));
        result.reset(repaired);
    }
    if (!f.out_path.empty()) {
        if (f.format == "json")
            check(ra_sba_result_write_json(result.get(), sens, f.out_path.c_str()));
        else
            check(ra_sba_result_write_csv(result.get(), sens, f.out_path.c_str()));
    }
    print_summary(result);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riskalloc — portfolio risk allocation engine"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flag defaults from a config file");

    CommonFlags alloc_flags;
    auto* allocate = app.add_subcommand("allocate", "Allocate a risk measure");
    add_common_flags(allocate, alloc_flags);

    CommonFlags conv_flags;
    std::uint64_t stride = 100;
    auto* converge = app.add_subcommand("converge", "Convergence traces and sweeps");
    add_common_flags(converge, conv_flags);
    converge->add_option("--stride", stride, "Pairs between trace snapshots")
        ->default_val(100);

    CommonFlags bench_flags;
    std::size_t n_lo = 4, n_hi = 14, n_step = 1;
    int repetitions = 3, exact_cap = 20;
    auto* bench = app.add_subcommand("bench", "Exact-vs-MC scaling study");
    add_common_flags(bench, bench_flags);
    bench->add_option("--n-lo", n_lo)->default_val(4);
    bench->add_option("--n-hi", n_hi)->default_val(14);
    bench->add_option("--n-step", n_step)->default_val(1);
    bench->add_option("--repetitions", repetitions)->default_val(3);
    bench->add_option("--exact-cap", exact_cap)->default_val(20);

    CommonFlags sba_flags;
    std::string sens_path, params_path;
    auto* sba = app.add_subcommand("sba", "FRTB SBA delta equity allocation");
    add_common_flags(sba, sba_flags);
    sba->add_option("--sensitivities", sens_path, "Sensitivity CSV");
    sba->add_option("--sba-params", params_path, "SBA parameter JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    // CLI11 leaves no portable "was this option seen" on plain bindings; use
    // count() for the seed so --strict-seed can tell.
    alloc_flags.seed_given = allocate->count("--seed") > 0;
    conv_flags.seed_given = converge->count("--seed") > 0;
    bench_flags.seed_given = bench->count("--seed") > 0;
    sba_flags.seed_given = sba->count("--seed") > 0;

    try {
        if (allocate->parsed()) return cmd_allocate(alloc_flags);
        if (converge->parsed()) return cmd_converge(conv_flags, stride);
        if (bench->parsed())
            return cmd_bench(bench_flags, n_lo, n_hi, n_step, repetitions, exact_cap);
        if (sba->parsed()) return cmd_sba(sba_flags, sens_path, params_path);
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.exit_code;
    }
    return kExitInput;
}
