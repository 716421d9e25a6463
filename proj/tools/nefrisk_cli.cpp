// nefrisk: fit, sample, estimate and check compound claim models from the
// command line. Run `nefrisk <subcommand> --help` for the flags.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nefrisk/nefrisk.hpp>

namespace fs = std::filesystem;
using namespace nefrisk;
using nefrisk::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitFit = 3;
constexpr int kExitSim = 4;

constexpr std::uint64_t kDefaultSeed = 20240607;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string data;
    std::string filter = "larger_cities";
    std::string filter_spec;
    double scale = 1000.0;
    std::string counting = "abel";
    std::string claim = "ig";
    std::string model_file;
    std::string count_moments;
    std::string aggregate_moments;
    std::string claim_moments;
    std::string levels;
    std::string method = "is";
    std::uint64_t M = 0;
    double target_rel_se = 0.0;
    std::uint64_t budget = std::uint64_t{1} << 24;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 1;
    std::string format = "csv";
    std::string out;
    // sample
    std::string what = "counting";
    std::uint64_t draws = 10;
    std::string diagnostics;
    // gof
    std::uint64_t sim = 2000;
    int bins = 20;
    int hist_bins = 30;
    std::string hist_out;
    // tailplot
    std::int64_t from = 1000;
    std::int64_t to = 1200;
    // reproduce
    std::string out_dir = "reproduce_out";
    double m_scale = 1.0;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + tok + "'");
        }
    }
    return out;
}

SampleMoments parse_moments(const std::string& s, const char* what) {
    const auto v = parse_list(s);
    if (v.size() != 2) {
        throw UsageError(std::string(what) + " expects 'mean,variance'");
    }
    return {v[0], v[1], 0};
}

std::vector<CountingFamily> counting_families(const std::string& s, bool with_poisson = false) {
    if (s == "all") {
        std::vector<CountingFamily> v(case_study::kCountingFamilies.begin(), case_study::kCountingFamilies.end());
        if (with_poisson) v.push_back(CountingFamily::poisson);
        return v;
    }
    try {
        return {parse_counting_family(s)};
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::vector<ClaimFamily> claim_families(const std::string& s) {
    if (s == "all") {
        return {case_study::kClaimFamilies.begin(), case_study::kClaimFamilies.end()};
    }
    try {
        return {parse_claim_family(s)};
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

SubsetFilter make_filter(const RunConfig& c) {
    try {
        return c.filter_spec.empty() ? named_filter(c.filter) : parse_filter_spec(c.filter_spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::vector<ClaimRecord> load_subset(const RunConfig& c) {
    if (c.data.empty()) {
        throw DataError("no data file given (--data)");
    }
    return apply_filter(load_dataset(c.data, c.scale), make_filter(c));
}

/// Count and claim moments from data, or from the moment flags, or the
/// built-in case-study summary.
struct MomentSource {
    SampleMoments count;
    SampleMoments claim;
    SampleMoments aggregate;
    std::string label;
};

MomentSource moments_for(const RunConfig& c) {
    MomentSource ms;
    if (!c.data.empty()) {
        const auto recs = load_subset(c);
        const DataSummary d = summarize(recs);
        ms.count = d.count_moments;
        ms.aggregate = d.aggregate_moments;
        ms.claim = recover_claim_moments(d.count_moments, d.aggregate_moments, d.total_claims, d.total_payment);
        ms.label = c.data + " [" + make_filter(c).name + ", " + std::to_string(d.rows) + " rows]";
        return ms;
    }
    ms.count = c.count_moments.empty() ? case_study::count_moments() : parse_moments(c.count_moments, "--count-moments");
    ms.aggregate = c.aggregate_moments.empty() ? case_study::aggregate_moments()
                                               : parse_moments(c.aggregate_moments, "--aggregate-moments");
    ms.claim = c.claim_moments.empty() ? case_study::claim_moments() : parse_moments(c.claim_moments, "--claim-moments");
    ms.label = c.count_moments.empty() ? "built-in case-study summary" : "moments given on the command line";
    return ms;
}

/// Model for estimate/sample: a fitted JSON file, or the case-study fits for
/// the named families.
CompoundModel model_for(const RunConfig& c) {
    if (!c.model_file.empty()) {
        std::ifstream in(c.model_file);
        if (!in) throw DataError("cannot open model file: " + c.model_file);
        json j;
        try {
            in >> j;
            if (j.is_array()) {
                if (j.empty()) throw DataError("model file holds an empty list");
                j = j.front();
            }
            const FittedModel f = io::fitted_model_from_json(j);
            return {f.counting(), f.claim()};
        } catch (const json::exception& e) {
            throw DataError(std::string("bad model file: ") + e.what());
        }
    }
    const auto nf = counting_families(c.counting, true);
    const auto yf = claim_families(c.claim);
    if (nf.size() != 1 || yf.size() != 1) {
        throw UsageError("estimate and sample need one counting and one claim family");
    }
    return case_study::model(nf[0], yf[0]);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw DataError("cannot write " + path);
    return file;
}

// ---------------------------------------------------------------------------

template <class... A>
void outf(std::ostream& os, const char* fmt, A... a) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, fmt, a...);
    os << buf;
}

int cmd_fit(const RunConfig& c, std::ostream& os = std::cout) {
    const MomentSource ms = moments_for(c);
    outf(os, "source: %s\n\n", ms.label.c_str());
    outf(os, "%-24s %14s %16s\n", "", "mean", "variance");
    outf(os, "%-24s %14.2f %16.2f\n", "claim number", ms.count.mean, ms.count.variance);
    outf(os, "%-24s %14.2f %16.2f\n", "aggregated claim size", ms.aggregate.mean, ms.aggregate.variance);
    outf(os, "%-24s %14.2f %16.2f\n\n", "individual claim size", ms.claim.mean, ms.claim.variance);

    const auto nf = counting_families(c.counting);
    const auto yf = claim_families(c.claim);
    outf(os, "%-10s %12s\n", "counting", "p");
    for (auto f : nf) {
        outf(os, "%-10s %12.6f\n", std::string(to_string(f)).c_str(), fit_counting_dispersion(f, ms.count));
    }
    outf(os, "\n%-18s %12s %12s %12s\n", "claim", "theta", "p", "alpha");
    for (auto f : yf) {
        const ClaimDist d = claim_from_moments(f, ms.claim.mean, ms.claim.variance);
        if (const auto* s = std::get_if<PositiveStableClaim>(&d)) {
            outf(os, "%-18s %12.6f %12.6f %12.6f\n", "positive_stable", s->theta, s->vf_power(), s->alpha);
        } else {
            outf(os, "%-18s %12.6f %12.6f\n", std::string(to_string(f)).c_str(), theta_of(d), dispersion_of(d));
        }
    }

    if (!c.out.empty()) {
        json arr = json::array();
        for (auto n : nf) {
            for (auto y : yf) {
                arr.push_back(io::to_json(fit_model(n, y, ms.count, ms.claim, ms.label)));
            }
        }
        std::ofstream f;
        open_out(c.out, f) << (arr.size() == 1 ? arr.front() : arr).dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_sample(const RunConfig& c) {
    const CompoundModel model = model_for(c);
    Rng rng(c.seed);
    std::ofstream file;
    std::ostream& os = open_out(c.out, file);
    ArStats stats;
    json diag;
    if (c.what == "counting") {
        for (std::uint64_t i = 0; i < c.draws; ++i) os << sample(model.counting, rng, &stats) << '\n';
        diag = io::to_json(model.counting, stats.proposals ? std::optional(stats.acceptance_rate()) : std::nullopt);
    } else if (c.what == "claim") {
        for (std::uint64_t i = 0; i < c.draws; ++i) {
            double y;
            if (const auto* s = std::get_if<PositiveStableClaim>(&model.claim)) {
                y = s->sample(rng, &stats);
            } else {
                y = sample_claim(model.claim, rng);
            }
            os << y << '\n';
        }
        diag = io::to_json(model.claim, stats.proposals ? std::optional(stats.acceptance_rate()) : std::nullopt);
    } else if (c.what == "aggregate") {
        os << "n,s\n";
        for (std::uint64_t i = 0; i < c.draws; ++i) {
            const auto [n, s] = sample_aggregate(model, rng);
            os << n << ',' << s << '\n';
        }
        diag = {{"counting", io::to_json(model.counting)}, {"claim", io::to_json(model.claim)}};
    } else {
        throw UsageError("--what must be counting, claim or aggregate");
    }
    if (!c.diagnostics.empty()) {
        std::ofstream f;
        open_out(c.diagnostics, f) << diag.dump(2) << '\n';
    }
    return kExitOk;
}

struct LevelResult {
    io::EstimateRow row;
    std::optional<EstimateResult> result;
    std::string error;
};

std::vector<LevelResult> run_levels(const CompoundModel& model, const std::vector<double>& xs, Method method,
                                    const RunConfig& c) {
    std::vector<LevelResult> out;
    for (double x : xs) {
        LevelResult lr;
        lr.row.x = x;
        try {
            EstimateResult r;
            if (c.target_rel_se > 0.0) {
                AdaptiveOptions opt;
                opt.budget = c.budget;
                opt.workers = c.workers;
                r = adaptive_sample_size(model, x, c.target_rel_se, method, c.seed, opt);
            } else {
                r = estimate(model, x, c.M, method, c.seed, c.workers);
            }
            lr.row.M = r.M;
            if (r.converged) {
                lr.row.estimate = r.estimate;
                lr.row.std_error = r.std_error;
            } else {
                lr.row.estimate = lr.row.std_error = std::nan("");
                lr.error = "budget exhausted before reaching the target relative error";
            }
            lr.result = r;
        } catch (const SimulationError& e) {
            lr.row.estimate = lr.row.std_error = std::nan("");
            lr.error = e.what();
        }
        if (!lr.error.empty()) {
            std::fprintf(stderr, "x=%g: %s\n", x, lr.error.c_str());
        }
        out.push_back(lr);
    }
    return out;
}

int cmd_estimate(const RunConfig& c) {
    if (c.M > 0 && c.target_rel_se > 0.0) {
        throw UsageError("--M and --target-rel-se are mutually exclusive");
    }
    RunConfig cc = c;
    if (cc.M == 0 && cc.target_rel_se <= 0.0) cc.M = 10000;
    const CompoundModel model = model_for(cc);
    const auto xs = parse_list(cc.levels);
    std::vector<Method> methods;
    if (cc.method == "both") {
        methods = {Method::mc, Method::is};
    } else {
        try {
            methods = {parse_method(cc.method)};
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    std::ofstream file;
    std::ostream& os = open_out(cc.out, file);
    json records = json::array();
    for (Method m : methods) {
        const auto res = run_levels(model, xs, m, cc);
        if (cc.format == "csv") {
            if (methods.size() > 1) os << "# method=" << to_string(m) << '\n';
            std::vector<io::EstimateRow> rows;
            for (const auto& r : res) rows.push_back(r.row);
            io::write_estimate_csv(os, rows);
        } else {
            for (const auto& r : res) {
                if (r.result) {
                    json rec = io::run_record(model, *r.result);
                    if (!r.error.empty()) rec["error"] = r.error;
                    records.push_back(rec);
                } else {
                    records.push_back({{"x", r.row.x}, {"method", std::string(to_string(m))}, {"error", r.error}});
                }
            }
        }
    }
    if (cc.format == "json") os << records.dump(2) << '\n';
    else if (cc.format != "csv") throw UsageError("--format must be csv or json");
    return kExitOk;
}

std::vector<double> simulate_aggregates(const CompoundModel& model, std::uint64_t n, Rng& rng) {
    std::vector<double> s(n);
    for (auto& v : s) v = sample_aggregate(model, rng).second;
    return s;
}

int cmd_gof(const RunConfig& c) {
    const auto recs = load_subset(c);
    const DataSummary d = summarize(recs);
    const SampleMoments claim =
        recover_claim_moments(d.count_moments, d.aggregate_moments, d.total_claims, d.total_payment);
    const std::vector<double> data = aggregate_payments(recs);

    std::ofstream file;
    std::ostream& os = open_out(c.out, file);
    os << "counting,claim,statistic,dof,p_value\n";

    const double hi = *std::max_element(data.begin(), data.end());
    std::vector<double> edges(static_cast<std::size_t>(c.hist_bins) + 1);
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = hi * static_cast<double>(i) / c.hist_bins;
    std::vector<std::pair<std::string, std::vector<double>>> hists;
    hists.emplace_back("data", normalized_histogram(data, edges));

    std::uint64_t stream = 0;
    for (auto nf : counting_families("all", true)) {
        for (auto yf : claim_families("all")) {
            const FittedModel fm = fit_model(nf, yf, d.count_moments, claim);
            const CompoundModel model{fm.counting(), fm.claim()};
            Rng rng(c.seed, stream++);
            const auto sim = simulate_aggregates(model, c.sim, rng);
            const GofResult g = chi_square_two_sample(data, sim, c.bins);
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s,%s,%.6g,%d,%.6g", std::string(to_string(nf)).c_str(),
                          std::string(to_string(yf)).c_str(), g.statistic, g.dof, g.p_value);
            os << buf << '\n';
            hists.emplace_back(std::string(to_string(nf)) + "+" + std::string(to_string(yf)),
                               normalized_histogram(sim, edges));
        }
    }
    if (!c.hist_out.empty()) {
        std::ofstream hf;
        std::ostream& hs = open_out(c.hist_out, hf);
        hs << "lower,upper";
        for (const auto& h : hists) hs << ',' << h.first;
        hs << '\n';
        for (int b = 0; b < c.hist_bins; ++b) {
            hs << edges[b] << ',' << edges[b + 1];
            for (const auto& h : hists) hs << ',' << h.second[b];
            hs << '\n';
        }
    }
    return kExitOk;
}

void write_tailplot(std::ostream& os, const SampleMoments& count, std::int64_t from, std::int64_t to) {
    const AbelDist a(fit_counting_dispersion(CountingFamily::abel, count), count.mean);
    const ArcsineDist s(fit_counting_dispersion(CountingFamily::arcsine, count), count.mean);
    const TakacsDist t(fit_counting_dispersion(CountingFamily::takacs, count), count.mean);
    const PoissonDist p(count.mean);
    os << "n,abel_pmf,arcsine_pmf,takacs_pmf,poisson_pmf\n";
    for (std::int64_t n = from; n <= to; ++n) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%lld,%.6e,%.6e,%.6e,%.6e", static_cast<long long>(n), a.pmf(n), s.pmf(n),
                      t.pmf(n), p.pmf(n));
        os << buf << '\n';
    }
}

int cmd_tailplot(const RunConfig& c) {
    if (c.to < c.from || c.from < 0) throw UsageError("need 0 <= --from <= --to");
    const MomentSource ms = moments_for(c);
    std::ofstream file;
    write_tailplot(open_out(c.out, file), ms.count, c.from, c.to);
    return kExitOk;
}

template <std::size_t N>
void reproduce_table(const fs::path& path, const CompoundModel& model,
                     const std::array<case_study::TableRow, N>& table, Method method, const RunConfig& c) {
    std::vector<io::EstimateRow> rows;
    for (const auto& t : table) {
        const auto M = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(t.M * c.m_scale)));
        const EstimateResult r = estimate(model, t.x, M, method, c.seed, c.workers);
        rows.push_back({t.x, r.M, r.estimate, r.std_error});
        std::fprintf(stderr, "  x=%-6g M=%-8llu %.2e (se %.1e)\n", t.x, static_cast<unsigned long long>(r.M),
                     r.estimate, r.std_error);
    }
    std::ofstream f(path);
    io::write_estimate_csv(f, rows);
}

int cmd_reproduce(const RunConfig& c) {
    fs::create_directories(c.out_dir);
    const fs::path dir(c.out_dir);
    using case_study::model;
    std::fprintf(stderr, "fit summary -> %s\n", (dir / "fit.txt").c_str());
    {
        std::ofstream f(dir / "fit.txt");
        RunConfig fc = c;
        fc.counting = fc.claim = "all";
        fc.out.clear();
        cmd_fit(fc, f);
    }
    std::fprintf(stderr, "abel + inverse gaussian, monte carlo\n");
    reproduce_table(dir / "table1_abel_ig_mc.csv", model(CountingFamily::abel, ClaimFamily::inverse_gaussian),
                    case_study::kAbelIgMc, Method::mc, c);
    std::fprintf(stderr, "abel + inverse gaussian, importance sampling\n");
    reproduce_table(dir / "table2_abel_ig_is.csv", model(CountingFamily::abel, ClaimFamily::inverse_gaussian),
                    case_study::kAbelIgIs, Method::is, c);
    std::fprintf(stderr, "arcsine + stable, monte carlo\n");
    reproduce_table(dir / "table3_arcsine_stable_mc.csv",
                    model(CountingFamily::arcsine, ClaimFamily::positive_stable), case_study::kArcsineStableMc,
                    Method::mc, c);
    std::fprintf(stderr, "arcsine + stable, importance sampling\n");
    reproduce_table(dir / "table3_arcsine_stable_is.csv",
                    model(CountingFamily::arcsine, ClaimFamily::positive_stable), case_study::kArcsineStableIs,
                    Method::is, c);
    {
        std::ofstream f(dir / "figure1_tail_pmf.csv");
        write_tailplot(f, case_study::count_moments(), 1000, 1200);
    }
    if (!c.data.empty()) {
        std::fprintf(stderr, "goodness of fit\n");
        RunConfig gc = c;
        gc.out = (dir / "table4_gof.csv").string();
        gc.hist_out = (dir / "figure2_histograms.csv").string();
        cmd_gof(gc);
    } else {
        std::fprintf(stderr, "no --data given; skipping the goodness-of-fit table\n");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

/// Reads a flat `key = value` file ('#' comments) into --key=value arguments.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
    return args;
}

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--data", c.data, "data file (7 columns)");
    sub->add_option("--filter", c.filter, "named subset: larger_cities or all");
    sub->add_option("--filter-spec", c.filter_spec, "inline subset, e.g. 'zone=1,2;bonus=7'");
    sub->add_option("--scale", c.scale, "payment divisor")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--out", c.out, "output file ('-' for stdout)");
}

void add_model(CLI::App* sub, RunConfig& c) {
    sub->add_option("--counting", c.counting, "abel, arcsine, takacs, poisson (or all for fit)");
    sub->add_option("--claim", c.claim, "gamma, ig, stable (or all for fit)");
    sub->add_option("--model", c.model_file, "fitted model JSON");
}

void add_moments(CLI::App* sub, RunConfig& c) {
    sub->add_option("--count-moments", c.count_moments, "claim-number mean,variance");
    sub->add_option("--aggregate-moments", c.aggregate_moments, "aggregate mean,variance");
    sub->add_option("--claim-moments", c.claim_moments, "claim-size mean,variance");
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    // --config file values go in front so that flags given later override them.
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size()) {
                path = args[i + 1];
                args.erase(args.begin() + i, args.begin() + i + 2);
            } else if (args[i].rfind("--config=", 0) == 0) {
                path = args[i].substr(9);
                args.erase(args.begin() + i);
            } else {
                continue;
            }
            const auto extra = config_args(path);
            const std::size_t at = args.empty() ? 0 : 1;  // after the subcommand
            args.insert(args.begin() + at, extra.begin(), extra.end());
            break;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Tail probabilities of compound claim sums with cubic-variance counting laws"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    RunConfig c;

    auto* fit = app.add_subcommand("fit", "two-moment fits from data or given moments");
    add_common(fit, c);
    add_moments(fit, c);
    fit->add_option("--counting", c.counting, "abel, arcsine, takacs or all");
    fit->add_option("--claim", c.claim, "gamma, ig, stable or all");

    auto* smp = app.add_subcommand("sample", "draw from a counting, claim or aggregate distribution");
    add_common(smp, c);
    add_model(smp, c);
    smp->add_option("--what", c.what, "counting, claim or aggregate");
    smp->add_option("-n,--draws", c.draws, "number of draws");
    smp->add_option("--diagnostics", c.diagnostics, "write sampler diagnostics JSON here");

    auto* est = app.add_subcommand("estimate", "estimate P(S_N > x)");
    add_common(est, c);
    add_model(est, c);
    est->add_option("-x,--levels", c.levels, "comma-separated thresholds")->expected(0, 1);
    est->add_option("--method", c.method, "mc, is or both");
    est->add_option("-M,--M", c.M, "replications per level");
    est->add_option("--target-rel-se", c.target_rel_se, "grow M until se/estimate is below this");
    est->add_option("--budget", c.budget, "largest M for --target-rel-se");
    est->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    est->add_option("--format", c.format, "csv or json");

    auto* gof = app.add_subcommand("gof", "chi-square fit of every model against the data");
    add_common(gof, c);
    gof->add_option("--sim", c.sim, "simulated aggregates per model");
    gof->add_option("--bins", c.bins, "target number of equal-probability bins");
    gof->add_option("--hist-bins", c.hist_bins, "histogram bins");
    gof->add_option("--hist-out", c.hist_out, "histogram CSV output");

    auto* tail = app.add_subcommand("tailplot", "counting pmfs over a range of n");
    add_common(tail, c);
    add_moments(tail, c);
    tail->add_option("--from", c.from, "first n");
    tail->add_option("--to", c.to, "last n");

    auto* rep = app.add_subcommand("reproduce", "run the case-study tables and tail data");
    add_common(rep, c);
    rep->add_option("--out-dir", c.out_dir, "output directory");
    rep->add_option("--m-scale", c.m_scale, "multiply every table's M by this")->check(CLI::PositiveNumber);
    rep->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*fit) return cmd_fit(c, std::cout);
        if (*smp) return cmd_sample(c);
        if (*est) return cmd_estimate(c);
        if (*gof) return cmd_gof(c);
        if (*tail) return cmd_tailplot(c);
        if (*rep) return cmd_reproduce(c);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << '\n';
        return kExitFit;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSim;
    } catch (const InvariantViolation& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSim;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
