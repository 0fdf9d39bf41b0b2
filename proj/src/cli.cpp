#include "bfp/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "bfp/bf.hpp"
#include "bfp/mc.hpp"
#include "bfp/model.hpp"
#include "bfp/numerics.hpp"
#include "bfp/power.hpp"
#include "bfp/ssd.hpp"

namespace bfp::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest decimal that round-trips, for the resolved-configuration echo.
std::string fmt_exact(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string fmt_sig(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

double parse_number(std::string_view text, const std::string& what) {
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("malformed number for " + what + ": '" +
                                    std::string(text) + "'");
    return value;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            return parts;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

// point:MU | normal:MU,TAU | t:MU,TAU,KAPPA,A,B | nm:TAU
AnalysisPrior parse_analysis_prior(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("prior spec needs the form kind:params, got '" +
                                    spec + "'");
    const std::string kind = spec.substr(0, colon);
    const auto params = split(spec.substr(colon + 1), ',');
    const auto need = [&](std::size_t count) {
        if (params.size() != count)
            throw std::invalid_argument("prior '" + kind + "' needs " +
                                        std::to_string(count) + " parameters");
    };
    if (kind == "point") {
        need(1);
        return PointPrior{parse_number(params[0], "prior mean")};
    }
    if (kind == "normal") {
        need(2);
        return NormalPrior{parse_number(params[0], "prior mean"),
                           parse_number(params[1], "prior sd")};
    }
    if (kind == "t") {
        need(5);
        return TruncatedTPrior{parse_number(params[0], "prior location"),
                               parse_number(params[1], "prior scale"),
                               parse_number(params[2], "prior df"),
                               parse_number(params[3], "prior lower bound"),
                               parse_number(params[4], "prior upper bound")};
    }
    if (kind == "nm") {
        need(1);
        return NormalMomentPrior{parse_number(params[0], "prior spread")};
    }
    throw std::invalid_argument("unknown prior kind '" + kind +
                                "' (expected point, normal, t, or nm)");
}

DesignPrior parse_design_prior(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("design spec needs the form kind:params, got '" +
                                    spec + "'");
    const std::string kind = spec.substr(0, colon);
    const auto params = split(spec.substr(colon + 1), ',');
    if (kind == "point") {
        if (params.size() != 1)
            throw std::invalid_argument("design 'point' needs one parameter");
        return DesignPrior{parse_number(params[0], "design mean"), 0.0};
    }
    if (kind == "normal") {
        if (params.size() != 2)
            throw std::invalid_argument("design 'normal' needs two parameters");
        return DesignPrior{parse_number(params[0], "design mean"),
                           parse_number(params[1], "design sd")};
    }
    throw std::invalid_argument("unknown design kind '" + kind +
                                "' (expected point or normal)");
}

std::string prior_to_spec(const AnalysisPrior& prior) {
    if (const auto* p = std::get_if<PointPrior>(&prior))
        return "point:" + fmt_exact(p->mean);
    if (const auto* p = std::get_if<NormalPrior>(&prior))
        return "normal:" + fmt_exact(p->mean) + "," + fmt_exact(p->sd);
    if (const auto* p = std::get_if<TruncatedTPrior>(&prior))
        return "t:" + fmt_exact(p->location) + "," + fmt_exact(p->scale) + "," +
               fmt_exact(p->df) + "," + fmt_exact(p->lower) + "," + fmt_exact(p->upper);
    const auto& p = std::get<NormalMomentPrior>(prior);
    return "nm:" + fmt_exact(p.spread);
}

std::string design_to_spec(const DesignPrior& design) {
    if (design.is_point()) return "point:" + fmt_exact(design.mean);
    return "normal:" + fmt_exact(design.mean) + "," + fmt_exact(design.sd);
}

TTestKind parse_t_kind(const std::string& type) {
    if (type == "onesample") return TTestKind::OneSample;
    if (type == "paired") return TTestKind::Paired;
    if (type == "twosample") return TTestKind::TwoSample;
    throw std::invalid_argument("unknown --type '" + type +
                                "' (expected onesample, paired, or twosample)");
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct Report {
    std::string title;
    KeyValues config;
    KeyValues results;
    std::vector<std::string> notes;
};

void print_human(std::ostream& out, const Report& report) {
    out << "      " << report.title << "\n\n";
    for (const auto& [key, value] : report.config) out << "  " << key << " = " << value << "\n";
    out << "\n";
    for (const auto& [key, value] : report.results)
        out << "  " << key << " = " << value << "\n";
    for (const auto& note : report.notes) out << "note: " << note << "\n";
}

void print_csv(std::ostream& out, const Report& report) {
    for (const auto& [key, value] : report.config)
        out << "# " << key << " = " << value << "\n";
    bool first = true;
    for (const auto& [key, value] : report.results) {
        out << (first ? "" : ",") << key;
        first = false;
    }
    out << "\n";
    first = true;
    for (const auto& [key, value] : report.results) {
        out << (first ? "" : ",") << value;
        first = false;
    }
    out << "\n";
}

// Shared test-level flags of the bf/power/n/curve/simulate subcommands.
struct TestOptions {
    std::string k_text = "1/10";
    std::string direction = "h1";
    double null_value = 0.0;
    double usd = 0.0;
    std::string usd_kind;
    double sigma = 0.0;
    bool usd_set = false, sigma_set = false;

    void add_to(CLI::App* cmd, bool with_threshold = true) {
        cmd->add_option("--null", null_value, "null value of the test");
        if (with_threshold) {
            cmd->add_option("--k", k_text, "BF threshold, decimal or fraction (e.g. 1/10)");
            cmd->add_option("--direction", direction,
                            "evidence direction: h1 (k < 1) or h0 (k > 1)");
        }
        cmd->add_option("--usd", usd, "unit variance of one effective observation")
            ->each([this](const std::string&) { usd_set = true; });
        cmd->add_option("--usd-kind", usd_kind,
                        "unit variance preset (see the presets subcommand)");
        cmd->add_option("--sigma", sigma, "observation sd for sigma-based presets")
            ->each([this](const std::string&) { sigma_set = true; });
    }

    Direction parse_direction() const {
        if (direction == "h1") return Direction::EvidenceForH1;
        if (direction == "h0") return Direction::EvidenceForH0;
        throw std::invalid_argument("--direction must be h1 or h0");
    }

    double resolve_usd() const {
        if (usd_set && !usd_kind.empty())
            throw std::invalid_argument("give either --usd or --usd-kind, not both");
        if (usd_set) return usd;
        if (!usd_kind.empty()) {
            const auto kind = preset_by_id(usd_kind);
            if (!kind)
                throw std::invalid_argument("unknown --usd-kind '" + usd_kind + "'");
            return unit_variance_for(*kind,
                                     sigma_set ? std::optional<double>(sigma)
                                               : std::nullopt);
        }
        throw std::invalid_argument("the unit variance is needed: --usd or --usd-kind");
    }

    TestSpec resolve_spec(bool needs_usd = true) const {
        TestSpec spec;
        spec.null_value = null_value;
        spec.threshold = parse_threshold(k_text);
        spec.direction = parse_direction();
        spec.unit_variance = needs_usd ? resolve_usd() : 1.0;
        if (!usd_kind.empty()) {
            const auto kind = preset_by_id(usd_kind);
            if (kind) spec.parameter_kind = std::string(preset_for(*kind).estimate);
        }
        spec.validate();
        return spec;
    }

    void echo_spec(KeyValues& config, const TestSpec& spec) const {
        config.emplace_back("null", fmt_exact(spec.null_value));
        config.emplace_back("k", k_text);
        config.emplace_back("direction", direction);
        if (!usd_kind.empty()) {
            config.emplace_back("usd-kind", usd_kind);
            if (sigma_set) config.emplace_back("sigma", fmt_exact(sigma));
        } else {
            config.emplace_back("usd", fmt_exact(spec.unit_variance));
        }
    }

    void add_notes(std::vector<std::string>& notes, const TestSpec& spec) const {
        notes.push_back("BF01 is oriented in favor of H0; BF01 < 1 indicates evidence for H1");
        if (!usd_kind.empty()) {
            const auto kind = preset_by_id(usd_kind);
            if (kind) {
                const auto& preset = preset_for(*kind);
                notes.push_back("n means '" + std::string(preset.n_interpretation) +
                                "' for a " + std::string(preset.estimate) +
                                " (unit variance " + fmt_exact(spec.unit_variance) + ")");
            }
        }
    }
};

void echo_power_intermediates(KeyValues& results, const PowerResult& r, int digits) {
    const auto put = [&](const char* name, const std::optional<double>& v) {
        if (v) results.emplace_back(name, fmt_sig(*v, digits));
    };
    put("z", r.z);
    put("m", r.m);
    put("x", r.x);
    put("y", r.y);
    put("a", r.a);
    put("t_crit_lo", r.t_crit_lo);
    put("t_crit_hi", r.t_crit_hi);
}

// Expands "--config FILE" into the flags read from the file; everything on
// the command line afterwards overrides the file values.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("--config needs a file path");
            path = args[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            path = a.substr(9);
        } else {
            rest.push_back(a);
        }
    }
    if (path.empty()) return rest;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::vector<std::string> expanded;
    if (!rest.empty()) expanded.push_back(rest.front());  // subcommand stays first
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        expanded.push_back("--" + key);
        if (!value.empty()) expanded.push_back(value);
    }
    for (std::size_t i = rest.empty() ? 0 : 1; i < rest.size(); ++i)
        expanded.push_back(rest[i]);
    return expanded;
}

struct CommandContext {
    bool csv = false;
    std::ostream& out;
    std::ostream& err;

    void emit(const Report& report) const {
        if (csv)
            print_csv(out, report);
        else
            print_human(out, report);
    }
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayes factor power and sample size calculations"};
    app.require_subcommand(1);
    // config-file values may be repeated by explicit flags; the last one wins
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    bool csv = false;
    app.add_flag("--csv", csv, "machine-readable CSV output");

    // ---- bf ----
    auto* bf_cmd = app.add_subcommand("bf", "evaluate a Bayes factor");
    TestOptions bf_test;
    bf_test.add_to(bf_cmd, false);
    std::string bf_prior;
    double estimate = 0.0, se = 0.0, n_eff = 0.0, tstat = 0.0, n1 = 0.0, n2 = 0.0;
    bool est_set = false, se_set = false, n_set = false, t_set = false, n2_set = false;
    std::string bf_type = "twosample";
    bf_cmd->add_option("--prior", bf_prior, "analysis prior")->required();
    bf_cmd->add_option("--estimate", estimate, "parameter estimate")
        ->each([&](const std::string&) { est_set = true; });
    bf_cmd->add_option("--se", se, "standard error of the estimate")
        ->each([&](const std::string&) { se_set = true; });
    bf_cmd->add_option("--n", n_eff, "effective sample size (with --usd)")
        ->each([&](const std::string&) { n_set = true; });
    bf_cmd->add_option("--tstat", tstat, "t statistic (t-test path)")
        ->each([&](const std::string&) { t_set = true; });
    bf_cmd->add_option("--n1", n1, "per-group sample size (t-test path)");
    bf_cmd->add_option("--n2", n2, "second group sample size (t-test path)")
        ->each([&](const std::string&) { n2_set = true; });
    bf_cmd->add_option("--type", bf_type, "t-test layout: onesample, paired, twosample");

    // ---- power ----
    auto* power_cmd = app.add_subcommand("power", "power at a given sample size");
    TestOptions power_test;
    power_test.add_to(power_cmd);
    std::string power_prior, power_design, power_type = "twosample";
    double power_n = 0.0;
    bool exact = false;
    power_cmd->add_option("--prior", power_prior, "analysis prior")->required();
    power_cmd->add_option("--design", power_design, "design prior")->required();
    power_cmd->add_option("--n", power_n, "sample size")->required();
    power_cmd->add_option("--type", power_type, "t-test layout (t priors only)");
    power_cmd->add_flag("--exact", exact,
                        "exact t design distribution for point design priors");

    // ---- n ----
    auto* n_cmd = app.add_subcommand("n", "sample size for a target power");
    TestOptions n_test;
    n_test.add_to(n_cmd);
    std::string n_prior, n_design, n_method = "auto", n_type = "twosample";
    double target = 0.0, n_lo = 0.0, n_hi = 0.0;
    bool minus_root = false, n_lo_set = false, n_hi_set = false;
    n_cmd->add_option("--prior", n_prior, "analysis prior")->required();
    n_cmd->add_option("--design", n_design, "design prior")->required();
    n_cmd->add_option("--power", target, "target power in (0, 1)")->required();
    n_cmd->add_option("--method", n_method, "auto, closed, or search");
    n_cmd->add_option("--type", n_type, "t-test layout (t priors only)");
    n_cmd->add_flag("--minus-root", minus_root,
                    "smaller closed-form root targeting power beta");
    n_cmd->add_option("--n-lo", n_lo, "search lower bound")
        ->each([&](const std::string&) { n_lo_set = true; });
    n_cmd->add_option("--n-hi", n_hi, "search upper bound")
        ->each([&](const std::string&) { n_hi_set = true; });

    // ---- curve ----
    auto* curve_cmd = app.add_subcommand("curve", "power curve as CSV");
    TestOptions curve_test;
    curve_test.add_to(curve_cmd);
    std::string curve_prior, curve_design, curve_type = "twosample", k0_text;
    double n_from = 1.0, n_to = 100.0;
    int n_points = 50;
    curve_cmd->add_option("--prior", curve_prior, "analysis prior")->required();
    curve_cmd->add_option("--design", curve_design, "design prior")->required();
    curve_cmd->add_option("--n-from", n_from, "first sample size")->required();
    curve_cmd->add_option("--n-to", n_to, "last sample size")->required();
    curve_cmd->add_option("--n-points", n_points, "number of grid points");
    curve_cmd->add_option("--type", curve_type, "t-test layout (t priors only)");
    curve_cmd->add_option("--k0", k0_text,
                          "adds a power_h0 column at this threshold (> 1)");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo power estimate");
    TestOptions sim_test;
    sim_test.add_to(sim_cmd);
    std::string sim_prior, sim_design, sim_type = "twosample";
    double sim_n = 0.0;
    long long reps = 50000;
    std::uint64_t seed = 0;
    sim_cmd->add_option("--prior", sim_prior, "analysis prior")->required();
    sim_cmd->add_option("--design", sim_design, "design prior")->required();
    sim_cmd->add_option("--n", sim_n, "sample size")->required();
    sim_cmd->add_option("--reps", reps, "number of replicates");
    sim_cmd->add_option("--seed", seed, "generator seed");
    sim_cmd->add_option("--type", sim_type, "t-test layout (t priors only)");

    // ---- presets ----
    auto* presets_cmd = app.add_subcommand("presets", "unit variance presets");

    try {
        std::vector<std::string> args = apply_config_file(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const CommandContext ctx{csv, out, err};
    try {
        if (app.got_subcommand(presets_cmd)) {
            if (csv) {
                out << "id,outcome,estimate,n_interpretation,unit_variance\n";
                for (const auto& p : unit_variance_presets())
                    out << p.id << "," << p.outcome << "," << p.estimate << ","
                        << p.n_interpretation << "," << p.unit_variance_rule << "\n";
            } else {
                out << "      Unit variance presets\n\n";
                char buf[160];
                std::snprintf(buf, sizeof(buf), "  %-9s %-10s %-30s %-22s %s\n", "id",
                              "outcome", "estimate", "n interpretation", "unit variance");
                out << buf;
                for (const auto& p : unit_variance_presets()) {
                    std::snprintf(buf, sizeof(buf), "  %-9s %-10s %-30s %-22s %s\n",
                                  std::string(p.id).c_str(),
                                  std::string(p.outcome).c_str(),
                                  std::string(p.estimate).c_str(),
                                  std::string(p.n_interpretation).c_str(),
                                  std::string(p.unit_variance_rule).c_str());
                    out << buf;
                }
            }
            return kExitOk;
        }

        const int digits = csv ? 12 : 6;

        if (app.got_subcommand(bf_cmd)) {
            const AnalysisPrior prior = parse_analysis_prior(bf_prior);
            Report report;
            BayesFactor result;
            if (std::holds_alternative<TruncatedTPrior>(prior)) {
                if (!t_set)
                    throw std::invalid_argument("t priors need --tstat and --n1");
                const TTestKind kind = parse_t_kind(bf_type);
                if (!(n1 > 0.0)) throw std::invalid_argument("--n1 must be positive");
                const std::optional<double> second =
                    (kind == TTestKind::TwoSample)
                        ? std::optional<double>(n2_set ? n2 : n1)
                        : std::nullopt;
                result = tbf01(tstat, n1, second, std::get<TruncatedTPrior>(prior),
                               kind == TTestKind::Paired);
                report.title = "t-test Bayes factor";
                report.config.emplace_back("prior", prior_to_spec(prior));
                report.config.emplace_back("tstat", fmt_exact(tstat));
                report.config.emplace_back("n1", fmt_exact(n1));
                if (second) report.config.emplace_back("n2", fmt_exact(*second));
                report.config.emplace_back("type", bf_type);
            } else {
                if (!est_set)
                    throw std::invalid_argument("--estimate is needed for this prior");
                EstimateInput input{};
                if (se_set) {
                    input = EstimateInput::from_se(estimate, se);
                } else if (n_set) {
                    input = EstimateInput::from_unit_variance(
                        estimate, bf_test.resolve_usd(), n_eff);
                } else {
                    throw std::invalid_argument("give --se or --n with --usd");
                }
                if (const auto* nm = std::get_if<NormalMomentPrior>(&prior))
                    result = nmbf01(input, bf_test.null_value, *nm);
                else
                    result = bf01(input, bf_test.null_value, prior);
                report.title = "Bayes factor from a normal parameter estimate";
                report.config.emplace_back("prior", prior_to_spec(prior));
                report.config.emplace_back("estimate", fmt_exact(estimate));
                report.config.emplace_back("se", fmt_exact(input.se));
                report.config.emplace_back("null", fmt_exact(bf_test.null_value));
            }
            report.results.emplace_back("bf01", fmt_sig(result.value(), digits));
            report.results.emplace_back("log_bf01", fmt_sig(result.log_value, digits));
            report.notes.push_back(
                "BF01 is oriented in favor of H0; BF01 < 1 indicates evidence for H1");
            ctx.emit(report);
            return kExitOk;
        }

        if (app.got_subcommand(power_cmd)) {
            const AnalysisPrior prior = parse_analysis_prior(power_prior);
            const DesignPrior design = parse_design_prior(power_design);
            Report report;
            PowerResult result;
            if (const auto* tprior = std::get_if<TruncatedTPrior>(&prior)) {
                const TTestKind kind = parse_t_kind(power_type);
                const double k = parse_threshold(power_test.k_text);
                result = power_t(power_n, *tprior, design, k, kind,
                                 power_test.parse_direction(), exact);
                report.title = "t-test Bayes factor power calculation";
                report.config.emplace_back("prior", prior_to_spec(prior));
                report.config.emplace_back("design", design_to_spec(design));
                report.config.emplace_back("k", power_test.k_text);
                report.config.emplace_back("direction", power_test.direction);
                report.config.emplace_back("n", fmt_exact(power_n));
                report.config.emplace_back("type", power_type);
                if (exact) report.config.emplace_back("exact", "1");
                report.notes.push_back("n is the sample size per group");
            } else {
                const TestSpec spec = power_test.resolve_spec();
                result = power({spec, prior, design, power_n});
                report.title = "Bayes factor power calculation";
                report.config.emplace_back("prior", prior_to_spec(prior));
                report.config.emplace_back("design", design_to_spec(design));
                power_test.echo_spec(report.config, spec);
                report.config.emplace_back("n", fmt_exact(power_n));
                power_test.add_notes(report.notes, spec);
            }
            report.results.emplace_back("power", fmt_sig(result.probability, digits));
            report.results.emplace_back("limiting_power",
                                        fmt_sig(result.limiting_power, digits));
            echo_power_intermediates(report.results, result, digits);
            ctx.emit(report);
            return kExitOk;
        }

        if (app.got_subcommand(n_cmd)) {
            const AnalysisPrior prior = parse_analysis_prior(n_prior);
            const DesignPrior design = parse_design_prior(n_design);
            Report report;
            SampleSizeResult result;
            if (const auto* tprior = std::get_if<TruncatedTPrior>(&prior)) {
                if (n_method == "closed")
                    throw std::invalid_argument("t priors have no closed form; use search");
                const TTestKind kind = parse_t_kind(n_type);
                const double k = parse_threshold(n_test.k_text);
                const Direction dir = n_test.parse_direction();
                const double lo = n_lo_set ? n_lo : 2.0;
                const double hi = n_hi_set ? n_hi : 1e6;
                result = n_search(
                    [&](double n) {
                        return power_t(n, *tprior, design, k, kind, dir).probability;
                    },
                    target, lo, hi);
                report.title = "t-test Bayes factor sample size determination";
                report.config.emplace_back("prior", prior_to_spec(prior));
                report.config.emplace_back("design", design_to_spec(design));
                report.config.emplace_back("k", n_test.k_text);
                report.config.emplace_back("direction", n_test.direction);
                report.config.emplace_back("power", fmt_exact(target));
                report.config.emplace_back("type", n_type);
                report.notes.push_back("n is the sample size per group");
            } else {
                const TestSpec spec = n_test.resolve_spec();
                if (n_method == "closed") {
                    if (const auto* point = std::get_if<PointPrior>(&prior)) {
                        result = n_point_analysis(spec, *point, design, target, minus_root);
                    } else if (const auto* normal = std::get_if<NormalPrior>(&prior)) {
                        if (!(normal->mean == spec.null_value &&
                              design.mean == spec.null_value && design.sd == normal->sd))
                            throw std::invalid_argument(
                                "the closed form for normal priors needs analysis and "
                                "design priors centered at the null with equal sd");
                        result = n_local_normal(spec.threshold, target,
                                                spec.unit_variance, normal->sd);
                    } else {
                        throw std::invalid_argument(
                            "no closed form for this prior; use --method search");
                    }
                } else if (const auto* point = std::get_if<PointPrior>(&prior);
                           point && n_method != "search") {
                    result = n_point_analysis(spec, *point, design, target, minus_root);
                } else {
                    const auto feas = feasibility(spec, prior, design, target);
                    if (!feas.feasible)
                        throw infeasible_error(
                            "target power exceeds the limiting power",
                            feas.limiting_power);
                    const double lo = n_lo_set ? n_lo : 1.0;
                    const double hi = n_hi_set ? n_hi : 1e8;
                    result = n_search(
                        [&](double n) {
                            return power({spec, prior, design, n}).probability;
                        },
                        target, lo, hi, feas.limiting_power);
                }
                report.title = "Bayes factor sample size determination";
                report.config.emplace_back("prior", prior_to_spec(prior));
                report.config.emplace_back("design", design_to_spec(design));
                n_test.echo_spec(report.config, spec);
                report.config.emplace_back("power", fmt_exact(target));
                if (minus_root) report.config.emplace_back("minus-root", "1");
                n_test.add_notes(report.notes, spec);
            }
            report.results.emplace_back("n_real", fmt_sig(result.n_real, digits));
            report.results.emplace_back("n_integer", std::to_string(result.n_integer));
            report.results.emplace_back("method", std::string(to_string(result.method)));
            report.results.emplace_back("achieved_power",
                                        fmt_sig(result.achieved_power, digits));
            report.results.emplace_back("limiting_power",
                                        fmt_sig(result.limiting_power, digits));
            if (result.unit_information_n)
                report.results.emplace_back("unit_information_n",
                                            fmt_sig(*result.unit_information_n, digits));
            if (result.n_refined)
                report.results.emplace_back("n_refined",
                                            fmt_sig(*result.n_refined, digits));
            ctx.emit(report);
            return kExitOk;
        }

        if (app.got_subcommand(curve_cmd)) {
            const AnalysisPrior prior = parse_analysis_prior(curve_prior);
            const DesignPrior design = parse_design_prior(curve_design);
            if (!(n_from > 0.0) || !(n_to > n_from) || n_points < 2)
                throw std::invalid_argument(
                    "curve needs 0 < --n-from < --n-to and --n-points >= 2");
            const bool is_t = std::holds_alternative<TruncatedTPrior>(prior);
            const TTestKind kind = parse_t_kind(curve_type);
            const double k = parse_threshold(curve_test.k_text);
            const Direction dir = curve_test.parse_direction();
            std::optional<double> k0;
            if (!k0_text.empty()) {
                k0 = parse_threshold(k0_text);
                if (!(*k0 > 1.0))
                    throw std::invalid_argument("--k0 must exceed one");
            }
            TestSpec spec;
            if (!is_t) spec = curve_test.resolve_spec();

            out << "# prior = " << prior_to_spec(prior) << "\n";
            out << "# design = " << design_to_spec(design) << "\n";
            out << "# k = " << curve_test.k_text << "\n";
            out << "# direction = " << curve_test.direction << "\n";
            if (!is_t) out << "# usd = " << fmt_exact(spec.unit_variance) << "\n";
            if (is_t) out << "# type = " << curve_type << "\n";
            if (k0) out << "# k0 = " << k0_text << "\n";
            out << "# n-from = " << fmt_exact(n_from) << "\n";
            out << "# n-to = " << fmt_exact(n_to) << "\n";
            out << "# n-points = " << n_points << "\n";
            out << "n,power" << (k0 ? ",power_h0" : "") << "\n";

            for (int i = 0; i < n_points; ++i) {
                const double n = n_from + (n_to - n_from) * i / (n_points - 1);
                double p, p0 = 0.0;
                if (is_t) {
                    const auto& tprior = std::get<TruncatedTPrior>(prior);
                    p = power_t(n, tprior, design, k, kind, dir).probability;
                    if (k0)
                        p0 = power_t(n, tprior, design, *k0, kind,
                                     Direction::EvidenceForH0)
                                 .probability;
                } else {
                    p = power({spec, prior, design, n}).probability;
                    if (k0) {
                        TestSpec h0 = spec;
                        h0.threshold = *k0;
                        h0.direction = Direction::EvidenceForH0;
                        p0 = power({h0, prior, design, n}).probability;
                    }
                }
                out << fmt_sig(n, 12) << "," << fmt_sig(p, 12);
                if (k0) out << "," << fmt_sig(p0, 12);
                out << "\n";
            }
            return kExitOk;
        }

        if (app.got_subcommand(sim_cmd)) {
            const AnalysisPrior prior = parse_analysis_prior(sim_prior);
            const DesignPrior design = parse_design_prior(sim_design);
            const bool is_t = std::holds_alternative<TruncatedTPrior>(prior);
            TestSpec spec;
            if (is_t) {
                spec.null_value = sim_test.null_value;
                spec.threshold = parse_threshold(sim_test.k_text);
                spec.direction = sim_test.parse_direction();
                spec.unit_variance = 2.0;
            } else {
                spec = sim_test.resolve_spec();
            }
            McConfig config;
            config.condition = {spec, prior, design, sim_n, parse_t_kind(sim_type)};
            config.replicates = reps;
            config.seed = seed;
            const auto report = simulate_power(config);

            out << "# prior = " << prior_to_spec(prior) << "\n";
            out << "# design = " << design_to_spec(design) << "\n";
            out << "# k = " << sim_test.k_text << "\n";
            out << "# direction = " << sim_test.direction << "\n";
            if (!is_t) out << "# usd = " << fmt_exact(spec.unit_variance) << "\n";
            if (is_t) out << "# type = " << sim_type << "\n";
            out << "# n = " << fmt_exact(sim_n) << "\n";
            out << "# reps = " << reps << "\n";
            out << "# seed = " << seed << "\n";
            out << "# generator = " << mc_generator_id << "\n";
            out << "empirical_power,mc_se,analytic_power,discrepancy,successes,"
                   "replicates\n";
            out << fmt_sig(report.empirical_power, 12) << ","
                << fmt_sig(report.mc_se, 12) << ","
                << fmt_sig(report.analytic_power, 12) << ","
                << fmt_sig(report.discrepancy, 12) << "," << report.successes << ","
                << report.replicates << "\n";
            return kExitOk;
        }

        err << "error: no subcommand given\n";
        return kExitUsage;
    } catch (const infeasible_error& e) {
        err << "infeasible: " << e.what() << "\n";
        if (std::isfinite(e.limiting_power))
            err << "limiting power: " << fmt_sig(e.limiting_power, 6) << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? argc - 1 : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace bfp::cli
