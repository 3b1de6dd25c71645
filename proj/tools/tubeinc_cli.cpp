// tubeinc: batch front end for tube-incidence experiments.
//
// Subcommands: generate, count, verify, highlow, grid-lower, falconer, run.
// Exit codes: 0 ok, 2 tolerance failure, 1 usage/validation error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tubeinc/bounds.hpp"
#include "tubeinc/falconer.hpp"
#include "tubeinc/highlow.hpp"
#include "tubeinc/multiscale.hpp"
#include "tubeinc/richness.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tubeinc;

namespace {

struct Tolerances {
    double verify_default = 100.0;
    double kakmax_hi = 8.0;
    double kakmax_lo = 0.125;
    double grid_lower_c = 1.0 / 64.0;
    double falconer_prop54_c = 100.0;
    double falconer_thm51_c = 0.01;
    double falconer_profile_slack = 4.0;
    std::map<std::string, double> verify_by_theorem;

    double verify_limit(const std::string& theorem) const {
        auto it = verify_by_theorem.find(theorem);
        return it == verify_by_theorem.end() ? verify_default : it->second;
    }
    ordered_json to_json() const {
        ordered_json j;
        j["verifyDefault"] = verify_default;
        for (auto& [k, v] : verify_by_theorem) j["verify"][k] = v;
        j["kakmaxSharpness"] = {kakmax_lo, kakmax_hi};
        j["gridLowerC"] = grid_lower_c;
        j["falconerProp54C"] = falconer_prop54_c;
        j["falconerThm51C"] = falconer_thm51_c;
        j["falconerProfileSlack"] = falconer_profile_slack;
        return j;
    }
};

Tolerances load_tolerances(const std::string& path) {
    Tolerances t;
    if (path.empty()) return t;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--tolerances", "cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("verifyDefault")) t.verify_default = j["verifyDefault"].get<double>();
    if (j.contains("verify"))
        for (auto& [k, v] : j["verify"].items()) t.verify_by_theorem[k] = v.get<double>();
    if (j.contains("kakmaxSharpness")) {
        t.kakmax_lo = j["kakmaxSharpness"][0].get<double>();
        t.kakmax_hi = j["kakmaxSharpness"][1].get<double>();
    }
    if (j.contains("gridLowerC")) t.grid_lower_c = j["gridLowerC"].get<double>();
    if (j.contains("falconerProp54C")) t.falconer_prop54_c = j["falconerProp54C"].get<double>();
    if (j.contains("falconerThm51C")) t.falconer_thm51_c = j["falconerThm51C"].get<double>();
    if (j.contains("falconerProfileSlack"))
        t.falconer_profile_slack = j["falconerProfileSlack"].get<double>();
    return t;
}

// Accepts "1/256", "2^-8", or a plain decimal; rational forms avoid float
// drift in delta.
double parse_scale(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        double num = std::stod(s.substr(0, slash));
        double den = std::stod(s.substr(slash + 1));
        if (den == 0) throw CLI::ValidationError("scale", "zero denominator in " + s);
        return num / den;
    }
    auto caret = s.find('^');
    if (caret != std::string::npos) {
        double base = std::stod(s.substr(0, caret));
        double expo = std::stod(s.substr(caret + 1));
        return std::pow(base, expo);
    }
    return std::stod(s);
}

std::vector<uint64_t> parse_seeds(const std::string& s) {
    std::vector<uint64_t> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto dots = item.find("..");
        if (dots != std::string::npos) {
            uint64_t a = std::stoull(item.substr(0, dots));
            uint64_t b = std::stoull(item.substr(dots + 2));
            for (uint64_t v = a; v <= b; ++v) out.push_back(v);
        } else if (!item.empty()) {
            out.push_back(std::stoull(item));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw CLI::ValidationError("seeds", "no seeds in '" + s + "'");
    return out;
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

struct GenArgs {
    std::string family = "bush";
    std::string delta_str = "1/64";
    int W = 1;
    int N1 = 1;
    double A = 1.0;
    int r = 1;
    double s = 1.5;
    int dim = 2;
};

TubeFamily make_family(const GenArgs& g, uint64_t seed) {
    double delta = parse_scale(g.delta_str);
    if (g.family == "bush") return gen_bush(delta);
    if (g.family == "well-spaced") return gen_well_spaced(delta, g.W, g.dim, seed);
    if (g.family == "direction-spaced") return gen_direction_spaced(delta, g.W, g.N1, seed);
    if (g.family == "heavy-ball") return gen_heavy_ball_example(delta, g.W, g.A, seed);
    if (g.family == "grid") return gen_grid_example(delta, g.W, g.dim);
    if (g.family == "fat-rectangle") return gen_fat_rectangle(delta, g.r, seed);
    throw CLI::ValidationError("--family", "unknown family '" + g.family + "'");
}

CLI::Option* add_gen_options(CLI::App* cmd, GenArgs& g) {
    CLI::Option* fam = cmd->add_option(
        "--family", g.family,
        "bush|well-spaced|direction-spaced|heavy-ball|grid|fat-rectangle|spread-ballset");
    cmd->add_option("--delta", g.delta_str, "scale, e.g. 1/256");
    cmd->add_option("--W", g.W, "spacing parameter");
    cmd->add_option("--N1", g.N1, "tubes per direction cell");
    cmd->add_option("--A", g.A, "heavy-ball side multiplier");
    cmd->add_option("--r", g.r, "fat-rectangle richness parameter");
    cmd->add_option("--s", g.s, "spread-ballset exponent");
    cmd->add_option("--dim", g.dim, "2 or 3");
    return fam;
}

// family matching the theorem's hypotheses when --family is not given
std::string default_family_for(const std::string& theorem) {
    if (theorem == "thm1_2") return "direction-spaced";
    if (theorem == "kakmax") return "bush";
    if (theorem == "st") return "direction-spaced";
    return "well-spaced";  // thm1_1, thm1_3, main
}

}  // namespace

static int run_cli(int argc, char** argv);

int main(int argc, char** argv) { return run_cli(argc, argv); }

static int run_cli(int argc, char** argv) {
    CLI::App app{"delta-tube incidence experiments"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string output = "out";
    std::string seeds_str = "0";
    std::string tol_path;
    app.add_option("--output", output, "output directory")->capture_default_str();
    app.add_option("--seeds,--seed", seeds_str, "seed list, e.g. 0..9 or 1,5,7");
    app.add_option("--tolerances", tol_path, "tolerance config JSON");

    GenArgs gen;
    auto* cmd_generate = app.add_subcommand("generate", "emit a tube family / ball set as JSON");
    add_gen_options(cmd_generate, gen);

    auto* cmd_count = app.add_subcommand("count", "richness map CSV + summary JSON");
    add_gen_options(cmd_count, gen);
    std::string input_family;
    bool use_oracle = false;
    cmd_count->add_option("--input", input_family, "read family JSON instead of generating");
    cmd_count->add_flag("--oracle", use_oracle, "use the reference double loop");

    auto* cmd_verify = app.add_subcommand("verify", "sweep dyadic r against a theorem bound");
    CLI::Option* verify_family_opt = add_gen_options(cmd_verify, gen);
    std::string theorem = "kakmax";
    double eps = 0.2;
    bool emit_svg = false;
    cmd_verify->add_option("--theorem", theorem, "st|thm1_1|thm1_2|thm1_3|main|kakmax");
    cmd_verify->add_option("--eps", eps, "epsilon in the bound");
    cmd_verify->add_flag("--svg", emit_svg, "emit log-log plot");

    auto* cmd_highlow = app.add_subcommand("highlow", "heavy-ball dichotomy verdict");
    add_gen_options(cmd_highlow, gen);
    double S = 4.0;
    uint64_t E_explicit = 0;
    cmd_highlow->add_option("--S", S, "heavy-ball scale");
    cmd_highlow->add_option("--E", E_explicit, "richness class (default: one above the mean)");

    auto* cmd_grid = app.add_subcommand("grid-lower", "coprime grid lower-bound check");
    add_gen_options(cmd_grid, gen);
    uint64_t grid_r = 16;
    cmd_grid->add_option("--richness", grid_r, "target richness r");

    auto* cmd_falc = app.add_subcommand("falconer", "Elekes-Sharir distance pipeline");
    add_gen_options(cmd_falc, gen);
    double falc_eps = 0.2;
    cmd_falc->add_option("--eps", falc_eps, "epsilon in the quadruple and interval bounds");

    auto* cmd_run = app.add_subcommand("run", "dispatch a JSON experiment config");
    std::string config_path;
    cmd_run->add_option("--config", config_path, "config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Tolerances tol = load_tolerances(tol_path);
        std::vector<uint64_t> seeds = parse_seeds(seeds_str);
        fs::path out_dir(output);
        bool tolerance_failed = false;

        if (cmd_run->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config " + config_path);
            nlohmann::json cfg = nlohmann::json::parse(in);
            std::vector<std::string> args{argv[0], cfg.at("command").get<std::string>()};
            if (cfg.contains("params"))
                for (auto& [k, v] : cfg["params"].items()) {
                    args.push_back("--" + k);
                    args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                }
            if (cfg.contains("seeds")) {
                std::string s;
                for (auto& v : cfg["seeds"]) s += (s.empty() ? "" : ",") + v.dump();
                args.push_back("--seeds");
                args.push_back(s);
            }
            if (cfg.contains("output")) {
                args.push_back("--output");
                args.push_back(cfg["output"].get<std::string>());
            }
            if (cfg.contains("tolerances")) {
                args.push_back("--tolerances");
                args.push_back(cfg["tolerances"].get<std::string>());
            }
            std::vector<char*> cargs;
            for (auto& a : args) cargs.push_back(a.data());
            return run_cli(int(cargs.size()), cargs.data());
        }

        if (cmd_generate->parsed()) {
            for (uint64_t seed : seeds) {
                if (gen.family == "spread-ballset") {
                    BallSet e = gen_spread_ballset(parse_scale(gen.delta_str), gen.s, seed);
                    write_file(out_dir / ("ballset_seed" + std::to_string(seed) + ".json"),
                               ballset_to_json(e));
                } else {
                    TubeFamily f = make_family(gen, seed);
                    write_file(out_dir / ("family_seed" + std::to_string(seed) + ".json"),
                               family_to_json(f));
                }
            }
            return 0;
        }

        if (cmd_count->parsed()) {
            for (uint64_t seed : seeds) {
                TubeFamily f;
                if (!input_family.empty()) {
                    std::ifstream in(input_family);
                    if (!in) throw std::runtime_error("cannot open " + input_family);
                    std::string text((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
                    f = family_from_json(text);
                } else {
                    f = make_family(gen, seed);
                }
                RichMap map = use_oracle ? richness_map_oracle(f) : richness_map_fast(f);
                std::string tag = "_seed" + std::to_string(seed);
                write_file(out_dir / ("richmap" + tag + ".csv"), richmap_to_csv(map));
                write_file(out_dir / ("summary" + tag + ".json"), richmap_summary_json(map));
            }
            return 0;
        }

        if (cmd_verify->parsed()) {
            auto name = bound_from_string(theorem);
            if (!name) throw CLI::ValidationError("--theorem", "unknown theorem " + theorem);
            if (verify_family_opt->count() == 0) gen.family = default_family_for(theorem);
            if (*name == BoundName::Thm1_3 && gen.dim == 2) gen.dim = 3;
            std::string csv = "seed,r,measured,bound,ratio\n";
            double max_ratio = 0;
            ordered_json per_seed = ordered_json::array();
            for (uint64_t seed : seeds) {
                TubeFamily f = make_family(gen, seed);
                BoundSpec spec;
                spec.name = *name;
                spec.epsilon = eps;
                spec.delta = f.delta;
                spec.W = f.W;
                spec.tube_count = double(f.size());
                spec.dim = f.dim;
                spec.N1 = gen.N1;
                VerifyReport rep = verify_family(f, spec);
                csv += verify_report_csv(rep, seed);
                max_ratio = std::max(max_ratio, rep.max_ratio);
                ordered_json sj;
                sj["seed"] = seed;
                sj["maxRatio"] = rep.max_ratio;
                if (!rep.warning.empty()) sj["warning"] = rep.warning;
                per_seed.push_back(sj);
                if (emit_svg)
                    write_file(out_dir / ("verify_seed" + std::to_string(seed) + ".svg"),
                               verify_report_svg(rep));
            }
            double limit = tol.verify_limit(theorem);
            ordered_json summary;
            summary["theorem"] = theorem;
            summary["epsilon"] = eps;
            summary["maxRatio"] = max_ratio;
            summary["ratioLimit"] = limit;
            summary["pass"] = max_ratio <= limit;
            summary["seeds"] = per_seed;
            summary["tolerances"] = tol.to_json();
            write_file(out_dir / "verify.csv", csv);
            write_file(out_dir / "verify_summary.json", summary.dump(2) + "\n");
            tolerance_failed = max_ratio > limit;
        }

        if (cmd_highlow->parsed()) {
            for (uint64_t seed : seeds) {
                TubeFamily f = make_family(gen, seed);
                RichMap map = richness_map_fast(f);
                uint64_t E = E_explicit;
                if (E == 0) {
                    double mean = double(map.total_incidences()) / double(map.counts.size());
                    E = 1;
                    while (double(E) * 2.0 <= mean) E <<= 1;
                    E <<= 1;  // one dyadic class above the mean
                }
                RescaledInputs in = rescale_for_classify(f, map, uint32_t(E));
                HeavyBallVerdict v = classify(in.P, in.T, double(E), S, in.D, f.dim);
                write_file(out_dir / ("verdict_seed" + std::to_string(seed) + ".json"),
                           verdict_to_json(v));
            }
            return 0;
        }

        if (cmd_grid->parsed()) {
            GridLowerReport rep =
                grid_lower_bound_check(parse_scale(gen.delta_str), gen.W, gen.dim, grid_r);
            bool pass = rep.min_richness * 8 >= grid_r &&
                        rep.min_separation >= 1.0 / (2.0 * gen.W) &&
                        rep.c_measured >= tol.grid_lower_c;
            ordered_json j = nlohmann::ordered_json::parse(grid_lower_report_json(rep));
            j["pass"] = pass;
            j["cLimit"] = tol.grid_lower_c;
            write_file(out_dir / "grid_lower.json", j.dump(2) + "\n");
            tolerance_failed = !pass;
        }

        if (cmd_falc->parsed()) {
            for (uint64_t seed : seeds) {
                double delta = parse_scale(gen.delta_str);
                BallSet e = gen_spread_ballset(delta, gen.s, seed);
                FalconerReport rep = falconer_pipeline(e, delta, falc_eps);
                bool pass = rep.cs_exact_ok && rep.spacing_ok &&
                            rep.prop54_ratio <= tol.falconer_prop54_c &&
                            rep.thm51_ratio >= tol.falconer_thm51_c &&
                            rep.profile_ratio <= tol.falconer_profile_slack;
                ordered_json j = nlohmann::ordered_json::parse(falconer_report_json(rep));
                j["pass"] = pass;
                j["prop54Limit"] = tol.falconer_prop54_c;
                j["thm51Limit"] = tol.falconer_thm51_c;
                j["profileSlackLimit"] = tol.falconer_profile_slack;
                write_file(out_dir / ("falconer_seed" + std::to_string(seed) + ".json"),
                           j.dump(2) + "\n");
                if (!pass) tolerance_failed = true;
            }
        }

        return tolerance_failed ? 2 : 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
