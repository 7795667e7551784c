#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "caplab/campanato.hpp"
#include "caplab/criterion.hpp"
#include "caplab/errors.hpp"
#include "caplab/geometry.hpp"
#include "caplab/hausdorff.hpp"
#include "caplab/json_io.hpp"
#include "caplab/numerics.hpp"
#include "caplab/sufficiency.hpp"
#include "caplab/witness.hpp"

namespace {

using namespace caplab;

// "factorial", "geometric:8", "power:2,0.5", "custom:0.1,0.05,..."
criterion::RoadrunnerSpec parse_roadrunner(const std::string& text, int n_max) {
    criterion::RoadrunnerSpec spec;
    spec.n_max = n_max;
    const auto colon = text.find(':');
    const std::string law = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    const auto parse_list = [&args]() {
        std::vector<double> values;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                values.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("bad roadrunner argument: " + item);
            }
        }
        return values;
    };
    if (law == "factorial") {
        spec.law = criterion::RoadrunnerSpec::Law::Factorial;
    } else if (law == "geometric") {
        spec.law = criterion::RoadrunnerSpec::Law::Geometric;
        const auto values = parse_list();
        if (values.size() != 1) throw ConfigError("geometric law takes one ratio, e.g. geometric:8");
        spec.q = values[0];
    } else if (law == "power") {
        spec.law = criterion::RoadrunnerSpec::Law::PowerScaled;
        const auto values = parse_list();
        if (values.size() != 2) throw ConfigError("power law takes base,exponent, e.g. power:2,0.5");
        spec.a = values[0];
        spec.s = values[1];
    } else if (law == "custom") {
        spec.law = criterion::RoadrunnerSpec::Law::Custom;
        spec.radii = parse_list();
        if (spec.radii.empty()) throw ConfigError("custom law needs a radius list");
    } else {
        throw ConfigError("unknown roadrunner law: " + law);
    }
    return spec;
}

geometry::Point parse_point_arg(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ConfigError("point must be x,y: " + text);
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("point must be x,y: " + text);
    }
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty())
        std::cout << content << "\n";
    else
        json_io::write_file(out_path, content);
}

struct CommonArgs {
    double p = 2.0;
    double lambda = 2.0;
    int t = 0;
    int depth = 8;
    int nmax = 20;
    unsigned long long seed = 0;
    int threads = 0;
    std::string out;
    std::string region_path;
    std::string roadrunner;
};

geometry::Region resolve_region(const CommonArgs& args) {
    if (!args.roadrunner.empty() && !args.region_path.empty())
        throw ConfigError("give either --roadrunner or --region, not both");
    if (!args.roadrunner.empty())
        return criterion::build_roadrunner(parse_roadrunner(args.roadrunner, args.nmax));
    if (!args.region_path.empty()) return json_io::load_region(args.region_path);
    throw ConfigError("a region is required: --roadrunner or --region");
}

int run_content(const CommonArgs& args, double alpha) {
    const geometry::Region region = resolve_region(args);
    const hausdorff::IntervalEstimate estimate =
        hausdorff::lower_content_interval(region, alpha, args.depth);
    json_io::JsonWriter w;
    w.begin_object();
    w.field("alpha", alpha);
    w.field("depth", estimate.depth);
    w.field("lower", estimate.lower);
    w.field("upper", estimate.upper);
    w.field("notes", estimate.method_notes);
    w.end_object();
    emit(w.str(), args.out);
    return 0;
}

int run_criterion(const CommonArgs& args, const std::string& x_text,
                  const std::string& csv_path) {
    const campanato::CampanatoParams params(args.p, args.lambda);
    criterion::CriterionReport report;
    if (!args.roadrunner.empty()) {
        report = criterion::criterion_series(parse_roadrunner(args.roadrunner, args.nmax),
                                             args.t, params);
    } else {
        const geometry::Region region = resolve_region(args);
        const geometry::Point x = parse_point_arg(x_text);
        report = criterion::criterion_series(region, x, args.t, params,
                                             {1, args.nmax}, args.depth);
    }
    json_io::JsonWriter w;
    json_io::write_criterion_report(w, report);
    emit(w.str(), args.out);
    if (!csv_path.empty()) json_io::write_file(csv_path, json_io::criterion_terms_csv(report));
    std::cerr << "verdict: " << criterion::verdict_name(report.verdict) << "\n";
    return 0;
}

int run_witness(const CommonArgs& args, const std::string& x_text, int shell_limit) {
    const campanato::CampanatoParams params(args.p, args.lambda);
    const geometry::Region region = resolve_region(args);
    const geometry::Point x = parse_point_arg(x_text);
    witness::NecessityConfig config;
    config.seed = static_cast<unsigned>(args.seed);
    config.extra_depth = args.depth > 4 ? 4 : args.depth;
    config.shell_limit = shell_limit;
    const witness::WitnessReport report =
        witness::necessity_suite(region, x, args.t, params, config);
    json_io::JsonWriter w;
    json_io::write_witness_report(w, report);
    emit(w.str(), args.out);
    std::cerr << "status: " << report.status << "\n";
    return 0;
}

int run_seminorm(const CommonArgs& args, const std::string& fn_name, int balls,
                 const std::string& mode_name) {
    const campanato::CampanatoParams params(args.p, args.lambda);
    const campanato::FunctionHandle f = campanato::named_function(fn_name);
    campanato::BallSamplingSpec sampling;
    if (balls > 0) {
        const int per_axis = std::max(
            2, static_cast<int>(std::lround(std::sqrt(
                   static_cast<double>(balls) / sampling.radius_levels))));
        sampling.centers_per_axis = per_axis;
    }
    if (mode_name == "inf")
        sampling.mode = campanato::OscMode::InfC;
    else if (mode_name != "mean")
        throw ConfigError("mode must be mean or inf");
    const campanato::SeminormEstimate estimate =
        campanato::seminorm_estimate(f, params, sampling);
    json_io::JsonWriter w;
    w.begin_object();
    w.field("fn", fn_name);
    w.field("p", params.p);
    w.field("lambda", params.lambda);
    w.field("mode", mode_name);
    w.field("value", estimate.value);
    w.field("balls_sampled", estimate.balls_sampled);
    w.field("quadrature_nodes", estimate.quadrature_nodes);
    w.end_object();
    emit(w.str(), args.out);
    std::cerr << "value: " << numerics::format_double(estimate.value) << "\n";
    return 0;
}

int run_sufficiency(const CommonArgs& args, const std::vector<std::string>& pole_texts,
                    const std::string& x_text, int nodes) {
    const campanato::CampanatoParams params(args.p, args.lambda);
    if (pole_texts.empty()) throw ConfigError("at least one --pole is required");
    std::vector<campanato::PoleTerm> poles;
    std::vector<geometry::Region> pads;
    for (const std::string& text : pole_texts) {
        const geometry::Point pole = parse_point_arg(text);
        poles.push_back({pole, 1, 1.0});
        pads.push_back(geometry::Region::disk({pole, 0.05}));
    }
    const campanato::FunctionHandle f = campanato::fn_poles(poles);
    geometry::Region target = args.region_path.empty()
                                  ? geometry::Region::join(std::move(pads))
                                  : json_io::load_region(args.region_path);
    const geometry::Point x = parse_point_arg(x_text);

    const sufficiency::DyadicCover cover = sufficiency::dyadic_cover(target, args.depth);
    const sufficiency::BumpPartition partition = sufficiency::bump_partition(cover, 2);
    const double moment = sufficiency::moment_vanish_check(partition, x, args.t, nodes);
    const double bound =
        sufficiency::green_derivative_bound(f, x, args.t, params, cover, nodes);
    const numerics::Complex contour = numerics::contour_derivative(
        f.evaluator, {x.re, x.im}, args.t, 0.25, 512);

    json_io::JsonWriter w;
    w.begin_object();
    w.field("t", args.t);
    w.field("cover_squares", static_cast<long long>(cover.squares.size()));
    w.field("moment_residual", moment);
    w.field("green_bound", bound);
    w.field("contour_magnitude", std::abs(contour));
    w.field("dominates", bound * 1.10 >= std::abs(contour));
    w.end_object();
    emit(w.str(), args.out);
    return 0;
}

int run_sweep(const CommonArgs& args, const std::string& pairs_text,
              const std::string& ts_text) {
    if (args.roadrunner.empty()) throw ConfigError("sweep needs --roadrunner");
    std::vector<std::pair<double, double>> grid;
    {
        std::stringstream ss(pairs_text);
        std::string cell;
        while (std::getline(ss, cell, ';')) {
            if (cell.empty()) continue;
            const auto comma = cell.find(',');
            if (comma == std::string::npos) throw ConfigError("bad sweep pair: " + cell);
            try {
                grid.emplace_back(std::stod(cell.substr(0, comma)),
                                  std::stod(cell.substr(comma + 1)));
            } catch (const std::exception&) {
                throw ConfigError("bad sweep pair: " + cell);
            }
        }
    }
    std::vector<int> ts;
    {
        std::stringstream ss(ts_text);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell.empty()) continue;
            try {
                ts.push_back(std::stoi(cell));
            } catch (const std::exception&) {
                throw ConfigError("bad sweep order list: " + ts_text);
            }
        }
    }

    std::string csv = "p,lambda,t,verdict,sum_lower,sum_upper,ratio_limit\n";
    for (const auto& [p, lambda] : grid) {
        for (int t : ts) {
            csv += numerics::format_double(p);
            csv += ',';
            csv += numerics::format_double(lambda);
            csv += ',';
            csv += std::to_string(t);
            csv += ',';
            try {
                const campanato::CampanatoParams params(p, lambda);
                const criterion::CriterionReport report = criterion::criterion_series(
                    parse_roadrunner(args.roadrunner, args.nmax), t, params);
                csv += criterion::verdict_name(report.verdict);
                csv += ',';
                csv += numerics::format_double(report.sum_lower);
                csv += ',';
                csv += numerics::format_double(report.sum_upper);
                csv += ',';
                csv += report.ratio_limit ? numerics::format_double(*report.ratio_limit)
                                          : std::string();
            } catch (const std::exception& e) {
                std::string message = e.what();
                for (char& c : message)
                    if (c == ',' || c == '\n') c = ';';
                csv += "error: " + message + ",,,";
            }
            csv += '\n';
        }
    }
    emit(csv, args.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"criterion laboratory for bounded point derivations"};
    app.require_subcommand(1);

    CommonArgs args;
    double content_alpha = 1.0;
    std::string x_text = "0,0";
    std::string csv_path;
    std::string fn_name = "re_z";
    std::string mode_name = "mean";
    std::string pairs_text;
    std::string ts_text = "0,1,2";
    std::vector<std::string> pole_texts;
    int balls = 0;
    int nodes = 64;
    int shell_limit = 400;

    const auto add_common = [&](CLI::App* cmd, bool with_params) {
        cmd->add_option("--region", args.region_path, "region JSON file");
        cmd->add_option("--roadrunner", args.roadrunner,
                        "factorial | geometric:q | power:a,s | custom:r1,r2,...");
        cmd->add_option("--depth", args.depth, "dyadic evaluation depth");
        cmd->add_option("--nmax", args.nmax, "shell range upper end");
        cmd->add_option("--seed", args.seed, "random seed for sampled paths");
        cmd->add_option("--threads", args.threads, "worker cap (0 = all cores)");
        cmd->add_option("--out", args.out, "output path (stdout when omitted)");
        if (with_params) {
            cmd->add_option("--p", args.p, "integral exponent p >= 1");
            cmd->add_option("--lambda", args.lambda, "growth exponent lambda >= 0");
            cmd->add_option("--t", args.t, "derivation order t >= 0");
        }
    };

    CLI::App* content = app.add_subcommand("content", "lower-content interval of a region");
    add_common(content, false);
    content->add_option("--alpha", content_alpha, "content exponent in (0, 2)");

    CLI::App* crit = app.add_subcommand("criterion", "evaluate the derivation series");
    add_common(crit, true);
    crit->add_option("--x", x_text, "evaluation point x,y");
    crit->add_option("--csv", csv_path, "also write terms CSV here");

    CLI::App* wit = app.add_subcommand("witness", "divergence-side construction");
    add_common(wit, true);
    wit->add_option("--x", x_text, "evaluation point x,y");
    wit->add_option("--shells", shell_limit, "shell budget for block selection");

    CLI::App* semi = app.add_subcommand("seminorm", "oscillation seminorm of a library function");
    add_common(semi, true);
    semi->add_option("--fn", fn_name, "function name: const_0, const_1, re_z, z, conj_z");
    semi->add_option("--balls", balls, "approximate ball-family size");
    semi->add_option("--mode", mode_name, "mean | inf");

    CLI::App* suff = app.add_subcommand("sufficiency-check", "Cauchy-Green derivative bound");
    add_common(suff, true);
    suff->add_option("--pole", pole_texts, "pole location x,y (repeatable)");
    suff->add_option("--x", x_text, "evaluation point x,y");
    suff->add_option("--nodes", nodes, "quadrature nodes per axis");

    CLI::App* sweep = app.add_subcommand("sweep", "criterion over a parameter grid");
    add_common(sweep, true);
    sweep->add_option("--pairs", pairs_text, "grid as p,lambda;p,lambda;...")->required();
    sweep->add_option("--ts", ts_text, "derivation orders, comma separated");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        numerics::set_thread_count(args.threads);
        if (content->parsed()) return run_content(args, content_alpha);
        if (crit->parsed()) return run_criterion(args, x_text, csv_path);
        if (wit->parsed()) return run_witness(args, x_text, shell_limit);
        if (semi->parsed()) return run_seminorm(args, fn_name, balls, mode_name);
        if (suff->parsed()) return run_sufficiency(args, pole_texts, x_text, nodes);
        if (sweep->parsed()) return run_sweep(args, pairs_text, ts_text);
        std::cerr << "no command given\n";
        return 3;
    } catch (const InvalidParams& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
