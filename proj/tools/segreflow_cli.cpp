// segreflow command-line driver: solve / eigs / oracle1d / ladder / validate.
// Exit codes: 0 success, 2 config error, 3 numerical non-convergence,
// 4 internal invariant violation. Failures print a machine-readable
// {"error": {...}} object on stdout.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "segreflow/flow.hpp"
#include "segreflow/ladder.hpp"
#include "segreflow/partition.hpp"
#include "segreflow/seed.hpp"

using nlohmann::ordered_json;
namespace sf = segreflow;

namespace {

struct RunConfig {
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> grid{1000, 0};
    int m = 2;
    std::vector<double> a;
    std::vector<int> k;
    bool allow_high_k = false;
    double beta = 1.0;
    std::vector<double> beta_schedule;  // empty: single beta
    bool schedule_given = false;
    sf::NonlinearitySpec nl_defaults;   // p, q, truncation carried here
    sf::FlowParams flow;
    std::vector<std::vector<sf::Rect>> seed_rects;  // empty: default slabs
    std::vector<double> mix;
    std::uint64_t rng_seed = 12345;
    std::string out_dir;
    int workers = 1;
};

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw sf::config_error("config field '" + field + "': " + why);
}

double need_num(const ordered_json& j, const std::string& field) {
    if (!j.is_number()) bad_field(field, "expected a number");
    return j.get<double>();
}

void parse_nonlin(const ordered_json& j, RunConfig& cfg) {
    for (auto& [key, val] : j.items()) {
        if (key == "p")
            cfg.nl_defaults.p = need_num(val, "nonlin.p");
        else if (key == "q")
            cfg.nl_defaults.q = need_num(val, "nonlin.q");
        else if (key == "truncation") {
            if (val.is_string()) {
                if (val.get<std::string>() != "off")
                    bad_field("nonlin.truncation", "expected a positive number or \"off\"");
                cfg.nl_defaults.truncated = false;
            } else {
                cfg.nl_defaults.truncated = true;
                cfg.nl_defaults.n = need_num(val, "nonlin.truncation");
            }
        } else
            bad_field("nonlin." + key, "unknown field");
    }
}

void parse_flow(const ordered_json& j, RunConfig& cfg) {
    for (auto& [key, val] : j.items()) {
        if (key == "tol")
            cfg.flow.tol = need_num(val, "flow.tol");
        else if (key == "dt0")
            cfg.flow.dt0 = need_num(val, "flow.dt0");
        else if (key == "dt_min")
            cfg.flow.dt_min = need_num(val, "flow.dt_min");
        else if (key == "dt_max")
            cfg.flow.dt_max = need_num(val, "flow.dt_max");
        else if (key == "max_steps") {
            if (!val.is_number_integer()) bad_field("flow.max_steps", "expected an integer");
            cfg.flow.max_steps = val.get<long>();
        } else if (key == "max_seconds")
            cfg.flow.max_seconds = need_num(val, "flow.max_seconds");
        else
            bad_field("flow." + key, "unknown field");
    }
}

sf::Rect parse_rect(const ordered_json& j, const std::string& field, int dim) {
    if (!j.is_object()) bad_field(field, "expected an object with \"x\" (and \"y\" in 2D)");
    sf::Rect r;
    bool have_x = false;
    for (auto& [key, val] : j.items()) {
        if (key == "x" || key == "y") {
            if (!val.is_array() || val.size() != 2)
                bad_field(field + "." + key, "expected [lo, hi]");
            double lo = need_num(val[0], field + "." + key);
            double hi = need_num(val[1], field + "." + key);
            if (!(lo < hi)) bad_field(field + "." + key, "lo must be < hi");
            if (key == "x") {
                r.xlo = lo;
                r.xhi = hi;
                have_x = true;
            } else {
                r.ylo = lo;
                r.yhi = hi;
            }
        } else
            bad_field(field + "." + key, "unknown field");
    }
    if (!have_x) bad_field(field, "missing \"x\" bounds");
    if (dim == 2 && !(r.ylo < r.yhi)) bad_field(field, "missing \"y\" bounds in 2D");
    return r;
}

RunConfig parse_config(const ordered_json& j) {
    RunConfig cfg;
    bool have_grid = false;

    for (auto& [key, val] : j.items()) {
        if (key == "domain") {
            if (!val.is_object() || !val.contains("extent"))
                bad_field("domain", "expected {\"extent\": [..]}");
            const auto& e = val["extent"];
            if (!e.is_array() || e.empty() || e.size() > 2)
                bad_field("domain.extent", "expected 1 or 2 entries");
            cfg.dim = (int)e.size();
            for (std::size_t i = 0; i < e.size(); ++i) {
                cfg.extent[i] = need_num(e[i], "domain.extent");
                if (!(cfg.extent[i] > 0.0)) bad_field("domain.extent", "entries must be positive");
            }
        } else if (key == "grid") {
            if (!val.is_array() || val.empty() || val.size() > 2)
                bad_field("grid", "expected 1 or 2 interior counts");
            for (std::size_t i = 0; i < val.size(); ++i) {
                if (!val[i].is_number_integer()) bad_field("grid", "expected integers");
                cfg.grid[i] = val[i].get<int>();
            }
            if (val.size() == 1) cfg.grid[1] = 0;
            have_grid = true;
            if (cfg.grid[0] < 1 || (val.size() == 2 && cfg.grid[1] < 1))
                bad_field("grid", "interior counts must be >= 1");
            if ((int)val.size() != cfg.dim && j.contains("domain"))
                bad_field("grid", "dimension does not match domain.extent");
            cfg.dim = (int)val.size();
        } else if (key == "m") {
            if (!val.is_number_integer() || val.get<int>() < 1)
                bad_field("m", "expected an integer >= 1");
            cfg.m = val.get<int>();
        } else if (key == "a") {
            if (!val.is_array()) bad_field("a", "expected an array");
            cfg.a.clear();
            for (const auto& x : val) cfg.a.push_back(need_num(x, "a"));
        } else if (key == "k") {
            if (!val.is_array()) bad_field("k", "expected an array");
            cfg.k.clear();
            for (const auto& x : val) {
                if (!x.is_number_integer()) bad_field("k", "expected integers");
                cfg.k.push_back(x.get<int>());
            }
        } else if (key == "allow_high_k") {
            if (!val.is_boolean()) bad_field("allow_high_k", "expected a boolean");
            cfg.allow_high_k = val.get<bool>();
        } else if (key == "beta") {
            cfg.beta = need_num(val, "beta");
            if (!(cfg.beta > 0.0)) bad_field("beta", "must be positive");
        } else if (key == "beta_schedule") {
            if (!val.is_array() || val.empty()) bad_field("beta_schedule", "expected a nonempty array");
            cfg.beta_schedule.clear();
            for (const auto& x : val) {
                double b = need_num(x, "beta_schedule");
                if (!(b > 0.0)) bad_field("beta_schedule", "values must be positive");
                cfg.beta_schedule.push_back(b);
            }
            cfg.schedule_given = true;
        } else if (key == "nonlin") {
            if (!val.is_object()) bad_field("nonlin", "expected an object");
            parse_nonlin(val, cfg);
        } else if (key == "flow") {
            if (!val.is_object()) bad_field("flow", "expected an object");
            parse_flow(val, cfg);
        } else if (key == "delta") {
            cfg.flow.cone_delta = need_num(val, "delta");
        } else if (key == "seed_partition") {
            if (!val.is_array()) bad_field("seed_partition", "expected an array of rectangle lists");
            cfg.seed_rects.clear();
            for (std::size_t i = 0; i < val.size(); ++i) {
                const auto& lst = val[i];
                std::string fld = "seed_partition[" + std::to_string(i) + "]";
                if (!lst.is_array() || lst.empty()) bad_field(fld, "expected a nonempty rectangle list");
                std::vector<sf::Rect> rects;
                for (const auto& r : lst) rects.push_back(parse_rect(r, fld, cfg.dim));
                cfg.seed_rects.push_back(std::move(rects));
            }
        } else if (key == "mix") {
            if (!val.is_array()) bad_field("mix", "expected an array");
            cfg.mix.clear();
            for (const auto& x : val) cfg.mix.push_back(need_num(x, "mix"));
        } else if (key == "rng_seed") {
            if (!val.is_number_unsigned() && !val.is_number_integer())
                bad_field("rng_seed", "expected an integer");
            cfg.rng_seed = val.get<std::uint64_t>();
        } else if (key == "workers") {
            if (!val.is_number_integer() || val.get<int>() < 1)
                bad_field("workers", "expected an integer >= 1");
            cfg.workers = val.get<int>();
        } else if (key == "out") {
            if (!val.is_string()) bad_field("out", "expected a string");
            cfg.out_dir = val.get<std::string>();
        } else {
            bad_field(key, "unknown field");
        }
    }

    if (!have_grid && cfg.dim == 2) bad_field("grid", "2D domain requires a grid");
    if (cfg.a.empty()) cfg.a.assign(cfg.m, 0.0);
    if (cfg.k.empty()) cfg.k.assign(cfg.m, 1);
    if ((int)cfg.a.size() != cfg.m) bad_field("a", "must have m entries");
    if ((int)cfg.k.size() != cfg.m) bad_field("k", "must have m entries");
    for (int ki : cfg.k) {
        if (ki < 1) bad_field("k", "entries must be >= 1");
        if (ki > 2 && !cfg.allow_high_k)
            bad_field("k", "entries above 2 are experimental; set allow_high_k");
    }
    if (!cfg.seed_rects.empty() && (int)cfg.seed_rects.size() != cfg.m)
        bad_field("seed_partition", "must have one rectangle list per component");
    if (!cfg.mix.empty() && (int)cfg.mix.size() != cfg.m)
        bad_field("mix", "must have m entries");
    const double cone_bound = std::sqrt(2.0) / 2.0;
    if (!(cfg.flow.cone_delta > 0.0 && cfg.flow.cone_delta < cone_bound)) {
        std::ostringstream os;
        os << "must lie in (0, " << cone_bound << ") = (0, sqrt(2)/2), got "
           << cfg.flow.cone_delta;
        bad_field("delta", os.str());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return parse_config(ordered_json::object());
    std::ifstream f(path);
    if (!f) throw sf::config_error("cannot open config file " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(f);
    } catch (const std::exception& e) {
        throw sf::config_error(std::string("config parse: ") + e.what());
    }
    if (!j.is_object()) throw sf::config_error("config root must be a JSON object");
    return parse_config(j);
}

sf::Grid make_grid(const RunConfig& cfg) {
    if (cfg.dim == 1) return sf::build_grid_1d(cfg.extent[0], cfg.grid[0]);
    return sf::build_grid_2d(cfg.extent[0], cfg.extent[1], cfg.grid[0], cfg.grid[1]);
}

sf::NonlinearitySpec make_nonlin(const RunConfig& cfg) {
    sf::NonlinearitySpec nl = cfg.nl_defaults;
    nl.m = cfg.m;
    nl.a = cfg.a;
    nl.beta = cfg.beta;
    sf::validate_nonlin(nl);
    return nl;
}

ordered_json grid_json(const sf::Grid& g) {
    ordered_json j;
    j["dim"] = g.dim;
    j["extent"] = g.dim == 1 ? ordered_json::array({g.extent[0]})
                             : ordered_json::array({g.extent[0], g.extent[1]});
    j["interior"] =
        g.dim == 1 ? ordered_json::array({g.n[0]}) : ordered_json::array({g.n[0], g.n[1]});
    j["h"] = g.dim == 1 ? ordered_json::array({g.h[0]}) : ordered_json::array({g.h[0], g.h[1]});
    return j;
}

ordered_json model_json(const RunConfig& cfg) {
    ordered_json j;
    j["m"] = cfg.m;
    j["a"] = cfg.a;
    j["k"] = cfg.k;
    if (cfg.schedule_given)
        j["beta_schedule"] = cfg.beta_schedule;
    else
        j["beta"] = cfg.beta;
    j["p"] = cfg.nl_defaults.p;
    j["q"] = cfg.nl_defaults.q;
    if (cfg.nl_defaults.truncated)
        j["truncation"] = cfg.nl_defaults.n;
    else
        j["truncation"] = "off";
    return j;
}

ordered_json flow_json(const sf::FlowParams& p) {
    ordered_json j;
    j["tol"] = p.tol;
    j["dt0"] = p.dt0;
    j["dt_min"] = p.dt_min;
    j["dt_max"] = p.dt_max;
    j["max_steps"] = p.max_steps;
    j["max_seconds"] = p.max_seconds;
    j["cone_delta"] = p.cone_delta;
    return j;
}

void ensure_out_dir(const std::string& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw sf::config_error("cannot create output directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw sf::config_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw sf::config_error("failed writing " + path);
}

void write_trace_csv(const std::string& path, const std::vector<sf::TraceRow>& trace, int m) {
    std::ostringstream os;
    os << "t,J,v_h1,cone_dist,cone_comp,cone_sign,dt";
    for (int i = 1; i <= m; ++i) os << ",lambda_" << i;
    for (int i = 1; i <= m; ++i) os << ",pos_" << i;
    for (int i = 1; i <= m; ++i) os << ",neg_" << i;
    os << "\n";
    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
    };
    for (const auto& r : trace) {
        put(r.t);
        os << ",";
        put(r.J);
        os << ",";
        put(r.v_h1);
        os << ",";
        put(r.cone_dist);
        os << "," << r.cone_comp + 1 << "," << r.cone_sign << ",";
        put(r.dt);
        for (double x : r.lambda) {
            os << ",";
            put(x);
        }
        for (double x : r.pos_norm) {
            os << ",";
            put(x);
        }
        for (double x : r.neg_norm) {
            os << ",";
            put(x);
        }
        os << "\n";
    }
    write_text(path, os.str());
}

void write_fields_csv(const std::string& path, const sf::State& s) {
    const sf::Grid& g = s.grid();
    std::ostringstream os;
    os << (g.dim == 1 ? "x,component,value\n" : "x,y,component,value\n");
    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
    };
    for (int i = 0; i < s.m(); ++i) {
        for (int iy = 0; iy < g.n[1]; ++iy) {
            for (int ix = 0; ix < g.n[0]; ++ix) {
                put(g.coord(0, ix));
                if (g.dim == 2) {
                    os << ",";
                    put(g.coord(1, iy));
                }
                os << "," << i + 1 << ",";
                put(s.u[i].v[g.index(ix, iy)]);
                os << "\n";
            }
        }
    }
    write_text(path, os.str());
}

void write_partition_output(const sf::Partition& part, const std::string& out_dir) {
    if (out_dir.empty()) return;
    if (part.grid->dim == 1)
        sf::write_partition_csv(part, out_dir + "/partition.csv");
    else
        sf::write_partition_pgm(part, out_dir + "/partition.pgm");
}

struct Pipeline {
    sf::Grid grid;
    sf::NonlinearitySpec nl;
    sf::rng_t rng;
    sf::TrialPartition trial;
    sf::BoundsReport bounds;
    sf::State seed;
};

Pipeline build_pipeline(const RunConfig& cfg) {
    Pipeline pl{make_grid(cfg), make_nonlin(cfg), sf::rng_t(cfg.rng_seed), {}, {}, {}};
    auto rects = cfg.seed_rects.empty() ? sf::default_trial_rects(pl.grid, cfg.m) : cfg.seed_rects;
    pl.trial =
        sf::make_trial_partition(pl.grid, rects, cfg.k, 1e-8, pl.rng, cfg.allow_high_k);
    pl.bounds = sf::bounds_report(pl.grid, pl.trial, 1e-8, pl.rng);
    pl.seed = sf::seed_from_partition(pl.trial, cfg.mix);
    return pl;
}

ordered_json bounds_json(const sf::BoundsReport& b, double J) {
    ordered_json j;
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["lambda_lower"] = b.lambda_lower;
    j["lambda_upper"] = b.lambda_upper;
    j["sandwich_ok"] =
        b.lower <= J + 1e-9 && J <= b.upper + 1e-6 * std::max(1.0, std::abs(b.upper));
    return j;
}

ordered_json partition_json(sf::Partition& part, const std::vector<int>& k, double eig_tol,
                            sf::rng_t& rng) {
    double energy = sf::partition_energy(part, k, eig_tol, rng);
    ordered_json j;
    j["energy"] = energy;
    j["uncovered_fraction"] = part.uncovered_fraction;
    j["overlap_count"] = part.overlap_count;
    j["lambda1"] = part.lambda1;
    j["lambda2"] = part.lambda2;
    if (part.grid->dim == 1) j["interfaces"] = sf::interface_points_1d(part);
    return j;
}

int cmd_solve(const RunConfig& cfg) {
    Pipeline pl = build_pipeline(cfg);
    sf::FlowParams fp = cfg.flow;
    fp.workers = cfg.workers;

    double J_seed = sf::energy_J(pl.seed, pl.nl);
    sf::FlowResult fr = sf::run_flow(pl.seed, pl.nl, fp);

    ordered_json summary;
    summary["schema"] = "segreflow-summary-1";
    summary["command"] = "solve";
    summary["rng_seed"] = cfg.rng_seed;
    summary["workers"] = cfg.workers;
    summary["grid"] = grid_json(pl.grid);
    summary["model"] = model_json(cfg);
    summary["flow"] = flow_json(fp);
    summary["status"] = sf::to_string(fr.status);
    summary["steps"] = fr.steps;
    summary["flow_time"] = fr.trace.empty() ? 0.0 : fr.trace.back().t;
    summary["J_seed"] = J_seed;
    summary["J"] = fr.J;
    summary["lambda"] = fr.lambda;
    summary["v_h1"] = fr.v_h1;
    summary["max_residual"] = fr.max_residual;

    sf::ConeDistance cd = sf::cone_distance(fr.state);
    summary["cone"] = {{"dist", cd.dist}, {"component", cd.comp + 1}, {"sign", cd.sign}};
    ordered_json pos = ordered_json::array();
    for (int i = 0; i < fr.state.m(); ++i) {
        const sf::TraceRow& last = fr.trace.back();
        pos.push_back(std::min(last.pos_norm[i], last.neg_norm[i]) <= 1e-6);
    }
    summary["positive_components"] = pos;
    summary["bounds"] = bounds_json(pl.bounds, fr.J);
    summary["defect"] = sf::segregation_defect(fr.state, pl.nl.beta);

    sf::Partition part = sf::extract_partition(fr.state, 1e-3);
    summary["partition"] = partition_json(part, cfg.k, 1e-8, pl.rng);

    std::string text = summary.dump(2) + "\n";
    if (!cfg.out_dir.empty()) {
        ensure_out_dir(cfg.out_dir);
        write_text(cfg.out_dir + "/summary.json", text);
        write_trace_csv(cfg.out_dir + "/trace.csv", fr.trace, fr.state.m());
        write_fields_csv(cfg.out_dir + "/fields.csv", fr.state);
        write_partition_output(part, cfg.out_dir);
    }
    std::fputs(text.c_str(), stdout);
    if (fr.status != sf::flow_status::converged) {
        ordered_json err;
        err["error"] = {{"type", "numerical"},
                        {"message", "flow did not converge within budget (status " +
                                        std::string(sf::to_string(fr.status)) + ")"}};
        std::fputs((err.dump() + "\n").c_str(), stdout);
        return 3;
    }
    return 0;
}

int cmd_ladder(const RunConfig& cfg) {
    Pipeline pl = build_pipeline(cfg);

    sf::LadderParams lp;
    if (cfg.schedule_given) {
        lp.schedule = cfg.beta_schedule;
        lp.explicit_schedule = true;
    } else {
        lp.schedule = {1.0, 10.0, 100.0, 1000.0};
        lp.explicit_schedule = false;
    }
    lp.flow = cfg.flow;
    lp.flow.workers = cfg.workers;
    lp.k = cfg.k;

    sf::LadderReport rep = sf::run_ladder(pl.seed, pl.nl, lp, pl.rng);

    ordered_json out;
    out["schema"] = "segreflow-ladder-1";
    out["command"] = "ladder";
    out["rng_seed"] = cfg.rng_seed;
    out["workers"] = cfg.workers;
    out["grid"] = grid_json(pl.grid);
    out["model"] = model_json(cfg);
    out["flow"] = flow_json(lp.flow);
    out["schedule"] = lp.schedule;
    out["plateau_stopped"] = rep.plateau_stopped;
    out["bounds"] = bounds_json(pl.bounds, rep.rungs.back().J);

    ordered_json rungs = ordered_json::array();
    bool all_converged = true;
    for (const auto& r : rep.rungs) {
        ordered_json rj;
        rj["beta"] = r.beta;
        rj["status"] = sf::to_string(r.status);
        rj["steps"] = r.steps;
        rj["J"] = r.J;
        rj["lambda"] = r.lambda;
        rj["v_h1"] = r.v_h1;
        rj["max_residual"] = r.max_residual;
        rj["defect"] = r.defect;
        rj["partition_energy"] = r.partition_energy;
        rj["uncovered_fraction"] = r.uncovered_fraction;
        if (!r.interfaces.empty()) rj["interfaces"] = r.interfaces;
        rj["state_diff"] = r.state_diff;
        rungs.push_back(std::move(rj));
        all_converged = all_converged && r.status == sf::flow_status::converged;
    }
    out["rungs"] = std::move(rungs);

    auto norms = sf::norm_ladder(rep.final_state, 4, 6.0);
    out["norm_ladder"] = {{"surrogate", 6.0},
                          {"delta", sf::delta_sequence(4, 6.0)},
                          {"norms", norms}};

    std::string text = out.dump(2) + "\n";
    if (!cfg.out_dir.empty()) {
        ensure_out_dir(cfg.out_dir);
        write_text(cfg.out_dir + "/ladder.json", text);
        write_fields_csv(cfg.out_dir + "/fields.csv", rep.final_state);
        sf::Partition part = sf::extract_partition(rep.final_state, 1e-3);
        write_partition_output(part, cfg.out_dir);
    }
    std::fputs(text.c_str(), stdout);
    if (!all_converged) {
        ordered_json err;
        err["error"] = {{"type", "numerical"}, {"message", "one or more rungs did not converge"}};
        std::fputs((err.dump() + "\n").c_str(), stdout);
        return 3;
    }
    return 0;
}

int cmd_eigs(const RunConfig& cfg, int pairs) {
    sf::Grid grid = make_grid(cfg);
    sf::rng_t rng(cfg.rng_seed);
    sf::LinearOperator A = sf::laplacian(grid);
    sf::EigResult e = sf::dirichlet_eigs(A, pairs, 1e-8, rng);

    ordered_json out;
    out["schema"] = "segreflow-eigs-1";
    out["command"] = "eigs";
    out["rng_seed"] = cfg.rng_seed;
    out["grid"] = grid_json(grid);
    out["values"] = e.values;
    out["residuals"] = e.residuals;
    std::string text = out.dump(2) + "\n";
    if (!cfg.out_dir.empty()) {
        ensure_out_dir(cfg.out_dir);
        write_text(cfg.out_dir + "/eigs.json", text);
        sf::State s;
        s.u = e.vectors;
        write_fields_csv(cfg.out_dir + "/fields.csv", s);
    }
    std::fputs(text.c_str(), stdout);
    return 0;
}

int cmd_oracle1d(int m, const std::vector<int>& k, int segments, const std::string& out_dir) {
    sf::Oracle1DResult res = sf::oracle_1d(m, k, segments);
    ordered_json out;
    out["schema"] = "segreflow-oracle1d-1";
    out["command"] = "oracle1d";
    out["m"] = m;
    out["k"] = k;
    out["segments"] = segments;
    out["value"] = res.value;
    out["layouts"] = res.layouts;
    std::string text = out.dump(2) + "\n";
    if (!out_dir.empty()) {
        ensure_out_dir(out_dir);
        write_text(out_dir + "/oracle1d.json", text);
    }
    std::fputs(text.c_str(), stdout);
    return 0;
}

int cmd_validate(std::uint64_t seed) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                    detail.empty() ? "" : " : ", detail.c_str());
        if (!ok) ++failures;
    };

    // kernel inequalities across truncation levels
    for (double n : {1.0, 5.0, 100.0}) {
        sf::NonlinearitySpec nl;
        nl.m = 1;
        nl.a = {1.0};
        nl.truncated = true;
        nl.n = n;
        sf::InequalityReport rep = sf::check_inequalities(nl, 10000, seed);
        report("kernel inequalities (n=" + std::to_string((int)n) + ")", rep.worst() <= 1e-12,
               "worst violation " + std::to_string(rep.worst()));
    }

    // discrete 1D spectrum exactness
    {
        sf::Grid g = sf::build_grid_1d(1.0, 300);
        sf::rng_t rng(seed);
        sf::LinearOperator A = sf::laplacian(g);
        sf::EigResult e = sf::dirichlet_eigs(A, 3, 1e-10, rng);
        double worst = 0.0;
        for (int k = 1; k <= 3; ++k)
            worst = std::max(worst, std::abs(e.values[k - 1] - sf::discrete_eig_1d(1.0, 300, k)) /
                                        sf::discrete_eig_1d(1.0, 300, k));
        report("1D discrete eigenvalues", worst <= 1e-10,
               "worst relative error " + std::to_string(worst));
    }

    // K fixed point on the ground state
    {
        sf::Grid g = sf::build_grid_1d(1.0, 200);
        sf::rng_t rng(seed);
        sf::LinearOperator A = sf::laplacian(g);
        sf::EigResult e = sf::dirichlet_eigs(A, 1, 1e-10, rng);
        sf::State s;
        s.u = {e.vectors[0]};
        sf::NonlinearitySpec nl;
        nl.m = 1;
        nl.a = {0.0};
        nl.beta = 1.0;
        sf::KSolveResult k = sf::solve_K(s, nl, 1e-9);
        double dw = 0.0;
        for (int p = 0; p < g.total; ++p)
            dw = std::max(dw, std::abs(k.comp[0].w.v[p] - e.vectors[0].v[p]));
        report("K fixed point at ground state",
               dw <= 1e-6 && std::abs(k.comp[0].mu - e.values[0]) <= 1e-6,
               "max |w - phi1| = " + std::to_string(dw));
    }

    // short flow run: energy monotone, manifold kept
    {
        sf::Grid g = sf::build_grid_1d(1.0, 300);
        sf::rng_t rng(seed);
        sf::NonlinearitySpec nl;
        nl.m = 2;
        nl.a = {0.0, 0.0};
        nl.beta = 10.0;
        auto rects = sf::default_trial_rects(g, 2);
        sf::TrialPartition tp = sf::make_trial_partition(g, rects, {1, 1}, 1e-8, rng);
        sf::State seed_state = sf::seed_from_partition(tp);
        sf::FlowParams fp;
        fp.tol = 1e-5;
        fp.max_steps = 2000;
        sf::FlowResult fr = sf::run_flow(seed_state, nl, fp);
        bool mono = true;
        for (std::size_t i = 1; i < fr.trace.size(); ++i)
            mono = mono && fr.trace[i].J <= fr.trace[i - 1].J + 1e-9;
        report("flow energy monotone + converged",
               mono && fr.status == sf::flow_status::converged,
               "steps " + std::to_string(fr.steps));
    }

    // 1D oracle values
    {
        sf::Oracle1DResult r11 = sf::oracle_1d(2, {1, 1}, 8);
        sf::Oracle1DResult r22 = sf::oracle_1d(2, {2, 2}, 8);
        bool ok = std::abs(r11.value - 8.0 * M_PI * M_PI) <= 1e-9 &&
                  std::abs(r22.value - 32.0 * M_PI * M_PI) <= 1e-9;
        report("1D partition oracle", ok,
               "values " + std::to_string(r11.value) + ", " + std::to_string(r22.value));
    }

    std::printf("%s\n", failures == 0 ? "ALL CHECKS PASSED" : "CHECKS FAILED");
    return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"segregated gradient-flow solver for coupled Schrodinger systems"};
    app.require_subcommand(1);

    std::string config_path, out_dir, grid_arg;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    double beta = 0.0;
    bool beta_set = false;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed override");
    app.add_option("--workers", workers, "worker threads (components are independent)");
    auto* beta_opt = app.add_option("--beta", beta, "competition parameter override");
    app.add_option("--grid", grid_arg, "interior grid counts, N or NX,NY");

    auto* sc_solve = app.add_subcommand("solve", "seed, flow to a critical point, report");
    auto* sc_eigs = app.add_subcommand("eigs", "Dirichlet eigenpairs of the domain");
    int eig_pairs = 3;
    sc_eigs->add_option("--pairs", eig_pairs, "number of eigenpairs");
    auto* sc_oracle = app.add_subcommand("oracle1d", "exhaustive 1D optimal partition");
    int oracle_m = 2, oracle_segments = 8;
    std::string oracle_k = "2,2";
    sc_oracle->add_option("--m", oracle_m, "components");
    sc_oracle->add_option("--k", oracle_k, "eigenvalue indices, comma separated");
    sc_oracle->add_option("--segments", oracle_segments, "equal segments of (0,1)");
    auto* sc_ladder = app.add_subcommand("ladder", "beta continuation with diagnostics");
    auto* sc_validate = app.add_subcommand("validate", "quick self-check suite");

    try {
        app.parse(argc, argv);
        seed_set = seed_opt->count() > 0;
        beta_set = beta_opt->count() > 0;

        RunConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_set) cfg.rng_seed = seed;
        if (workers > 0) cfg.workers = workers;
        if (beta_set) {
            if (!(beta > 0.0)) throw sf::config_error("--beta must be positive");
            cfg.beta = beta;
            cfg.beta_schedule.clear();
            cfg.schedule_given = false;
        }
        if (!grid_arg.empty()) {
            int nx = 0, ny = 0;
            if (std::sscanf(grid_arg.c_str(), "%d,%d", &nx, &ny) == 2) {
                cfg.dim = 2;
                cfg.grid = {nx, ny};
                if (cfg.extent[1] <= 0.0) cfg.extent[1] = cfg.extent[0];
            } else if (std::sscanf(grid_arg.c_str(), "%d", &nx) == 1) {
                cfg.dim = 1;
                cfg.grid = {nx, 0};
            } else {
                throw sf::config_error("--grid expects N or NX,NY");
            }
            if (nx < 1 || (cfg.dim == 2 && ny < 1))
                throw sf::config_error("--grid counts must be >= 1");
        }

        if (sc_solve->parsed()) return cmd_solve(cfg);
        if (sc_eigs->parsed()) return cmd_eigs(cfg, eig_pairs);
        if (sc_oracle->parsed()) {
            std::vector<int> k;
            std::stringstream ss(oracle_k);
            std::string tok;
            while (std::getline(ss, tok, ',')) k.push_back(std::stoi(tok));
            return cmd_oracle1d(oracle_m, k, oracle_segments, cfg.out_dir);
        }
        if (sc_ladder->parsed()) return cmd_ladder(cfg);
        if (sc_validate->parsed()) return cmd_validate(cfg.rng_seed);
        throw sf::config_error("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        ordered_json err;
        err["error"] = {{"type", "config"}, {"message", e.what()}};
        std::fputs((err.dump() + "\n").c_str(), stdout);
        return 2;
    } catch (const sf::config_error& e) {
        ordered_json err;
        err["error"] = {{"type", "config"}, {"message", e.what()}};
        std::fputs((err.dump() + "\n").c_str(), stdout);
        return 2;
    } catch (const sf::numerical_error& e) {
        ordered_json err;
        err["error"] = {{"type", "numerical"}, {"message", e.what()}};
        std::fputs((err.dump() + "\n").c_str(), stdout);
        return 3;
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = {{"type", "invariant"}, {"message", e.what()}};
        std::fputs((err.dump() + "\n").c_str(), stdout);
        return 4;
    }
}
