// hklab: transportation distances, Renyi-type divergences, and functional
// inequality harnesses for Markov kernels on finite metric spaces.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hklab/divergence.hpp"
#include "hklab/dynamics.hpp"
#include "hklab/funcineq.hpp"
#include "hklab/io.hpp"
#include "hklab/markov.hpp"
#include "hklab/space.hpp"
#include "hklab/transport.hpp"

using json = nlohmann::json;
using namespace hklab;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 ok, 1 harness/envelope failure, 2 validation error,
// 3 solver non-convergence
constexpr int kExitOk = 0;
constexpr int kExitHarnessFail = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

double j12(double x) { return io::round_12sig(x); }

struct RunContext {
    std::string command;
    json config = json::object();
    json inputs = json::object();
    uint64_t seed = 0;
    int threads = 1;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void record_input(const std::string& path) { inputs[path] = io::file_digest(path); }

    json manifest() const {
        json m;
        m["command"] = command;
        m["config"] = config;
        m["inputs"] = inputs;
        m["seed"] = seed;
        m["threads"] = threads;
        m["version"] = kVersion;
        m["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
        m["outputs"] = outputs;
        return m;
    }

    json report(json body) const {
        json r;
        r["manifest"] = manifest();
        r["result"] = std::move(body);
        return r;
    }
};

void emit_report(RunContext& ctx, const json& body, const std::string& out_path) {
    if (out_path.empty()) return;
    const json rep = ctx.report(body);
    io::write_text_file(out_path, rep.dump(2) + "\n");
}

json harness_to_json(const HarnessReport& rep) {
    json j;
    j["id"] = rep.id;
    j["trials"] = rep.trials;
    j["skipped"] = rep.skipped;
    j["tol"] = j12(rep.tol);
    j["max_violation"] = j12(rep.max_violation);
    json wc = json::object();
    for (const auto& [k, v] : rep.worst_case) wc[k] = j12(v);
    j["worst_case"] = wc;
    j["pass"] = rep.pass;
    return j;
}

json estimate_to_json(const ConstantEstimate& est) {
    json j;
    j["defined"] = est.defined;
    if (est.defined) {
        j["value"] = j12(est.value);
        j["witness_point"] = est.witness_point;
        json w = json::array();
        for (double v : est.witness_function) w.push_back(j12(v));
        j["witness_function"] = w;
    }
    j["excluded"] = est.excluded;
    json curve = json::array();
    for (auto [size, value] : est.convergence)
        curve.push_back(json{{"dictionary_size", size}, {"estimate", j12(value)}});
    j["convergence"] = curve;
    return j;
}

DictionaryConfig dict_config(uint64_t seed, int size_hint) {
    DictionaryConfig cfg;
    cfg.seed = seed;
    if (size_hint > 0) {
        cfg.max_distance_functions = size_hint;
        cfg.random_functions = std::max(2, size_hint / 4);
    }
    return cfg;
}

std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> sample_measure_pairs(
    const FiniteMetricSpace& space, int dirac_pairs, int random_pairs, uint64_t seed) {
    std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> pairs;
    Rng rng(seed);
    const int n = space.size();
    for (int k = 0; k < dirac_pairs; ++k)
        pairs.emplace_back(DiscreteMeasure::dirac(rng.uniform_int(n), n),
                           DiscreteMeasure::dirac(rng.uniform_int(n), n));
    for (int k = 0; k < random_pairs; ++k) {
        Vec w0(n), w1(n);
        double s0 = 0.0, s1 = 0.0;
        for (int i = 0; i < n; ++i) {
            w0[i] = rng.uniform(0.01, 1.0);
            w1[i] = rng.uniform(0.01, 1.0);
            s0 += w0[i];
            s1 += w1[i];
        }
        for (int i = 0; i < n; ++i) {
            w0[i] /= s0;
            w1[i] /= s1;
        }
        pairs.emplace_back(DiscreteMeasure(w0), DiscreteMeasure(w1));
    }
    return pairs;
}

int cmd_gen(RunContext& ctx, const std::string& kind, int n, double h, double x0, double d,
            double t, double rate, const std::string& space_file, const std::string& out,
            const std::string& report_path) {
    if (kind == "grid") {
        io::save_space(make_grid_space(n, h, x0), out, report_path);
    } else if (kind == "cycle") {
        io::save_space(make_cycle_space(n), out, report_path);
    } else if (kind == "two-point") {
        io::save_space(make_two_point_space(d), out, report_path);
    } else if (kind == "heat" || kind == "ou") {
        if (space_file.empty()) throw std::invalid_argument("gen " + kind + ": needs --space");
        ctx.record_input(space_file);
        auto space = io::load_space(space_file);
        auto kernel =
            kind == "heat" ? heat_kernel_grid(space, t) : ou_kernel_grid(space, t, rate);
        io::save_kernel(kernel, out, report_path);
    } else {
        throw std::invalid_argument("gen: unknown kind '" + kind + "'");
    }
    ctx.outputs.push_back(out);
    emit_report(ctx, json{{"kind", kind}, {"written", out}}, report_path);
    std::cout << out << "\n";
    return kExitOk;
}

int cmd_dist(RunContext& ctx, const std::string& space_file, const std::string& mu0_file,
             const std::string& mu1_file, const std::string& metric, double a, double b,
             double alpha, const LetOptions& let_opts, const std::string& report_path) {
    ctx.record_input(space_file);
    ctx.record_input(mu0_file);
    ctx.record_input(mu1_file);
    auto space = io::load_space(space_file);
    auto mu0 = io::load_measure(mu0_file);
    auto mu1 = io::load_measure(mu1_file);
    if (mu0.size() != space.size() || mu1.size() != space.size())
        throw std::invalid_argument("measure files do not match the space size");
    mu0.require_probability(1e-9);
    mu1.require_probability(1e-9);

    json body;
    body["metric"] = metric;
    int exit_code = kExitOk;

    if (metric == "he2") {
        const double v = hellinger_sq(mu0, mu1);
        body["value"] = j12(v);
        std::cout << io::format_double(j12(v)) << "\n";
    } else if (metric == "w2") {
        const double v = wasserstein2_sq(mu0, mu1, space);
        body["value"] = j12(v);
        std::cout << io::format_double(j12(v)) << "\n";
    } else if (metric == "wab" || metric == "hk") {
        WParams params = metric == "hk" ? WParams(alpha / 4.0, 1.0) : WParams(a, b);
        auto res = w_ab_full(params, mu0, mu1, space, let_opts);
        body["value"] = j12(res.value);
        body["route"] = res.route;
        body["gap"] = j12(res.gap);
        body["iterations"] = res.iterations;
        json sched = json::array();
        for (double e : res.epsilon_schedule) sched.push_back(e);
        body["epsilon_schedule"] = sched;
        body["converged"] = res.converged;
        if (!res.converged) exit_code = kExitSolver;
        std::cout << io::format_double(j12(res.value)) << "\n";
    } else if (metric == "t0b") {
        DivParams params(0.0, b);
        auto r = renyi_T0b(params, mu0, mu1);
        body["value"] = std::isinf(r.value) ? json("inf") : json(j12(r.value));
        body["t_tilde"] = std::isinf(r.t_tilde) ? json("inf") : json(j12(r.t_tilde));
        body["order_q"] = j12(params.q);
        std::cout << (std::isinf(r.value) ? "inf" : io::format_double(j12(r.value))) << "\n";
    } else if (metric == "tab") {
        DivParams params(a, b);
        auto dict = build_dictionary(space, dict_config(ctx.seed, 0));
        auto cv = t_ab_bounds(params, mu0, mu1, space, dict);
        body["lower"] = j12(cv.lower);
        body["upper"] = std::isinf(cv.upper) ? json("inf") : json(j12(cv.upper));
        body["lower_certificate"] =
            json{{"family", cv.lower_certificate.linear_family ? "explin" : "expquad"},
                 {"f_index", cv.lower_certificate.f_index},
                 {"k", j12(cv.lower_certificate.k)},
                 {"beta0_rule", cv.lower_certificate.beta0_rule}};
        body["upper_certificate"] = cv.upper_certificate;
        body["upper_capped"] = cv.upper_capped;
        std::cout << "[" << io::format_double(j12(cv.lower)) << ", "
                  << (std::isinf(cv.upper) ? "inf" : io::format_double(j12(cv.upper)))
                  << "]\n";
    } else {
        throw std::invalid_argument("dist: unknown metric '" + metric + "'");
    }
    emit_report(ctx, body, report_path);
    return exit_code;
}

int cmd_constants(RunContext& ctx, const std::string& space_file, const std::string& kernel_file,
                  const std::string& which, int dict_size, const std::string& witness_out,
                  const std::string& report_path) {
    ctx.record_input(space_file);
    ctx.record_input(kernel_file);
    auto space = io::load_space(space_file);
    auto kernel = io::load_kernel(kernel_file);
    if (kernel.size() != space.size())
        throw std::invalid_argument("kernel size does not match the space");
    auto dict = build_dictionary(space, dict_config(ctx.seed, dict_size));
    EstimatorOptions opts;
    opts.threads = ctx.threads;

    ConstantEstimate est;
    if (which == "rpi")
        est = rpi_constant(kernel, space, dict, opts);
    else if (which == "rlsi")
        est = rlsi_constant(kernel, space, dict, opts);
    else if (which == "grad")
        est = gradient_bound_constant(kernel, space, dict, opts);
    else
        throw std::invalid_argument("constants: unknown estimator '" + which + "'");

    if (!witness_out.empty() && est.defined) {
        // measure-file layout (one value per line); witnesses may be signed
        std::string text;
        if (!report_path.empty()) text += "# manifest: " + report_path + "\n";
        for (double v : est.witness_function) text += io::format_double(v) + "\n";
        io::write_text_file(witness_out, text);
        ctx.outputs.push_back(witness_out);
    }
    json body = estimate_to_json(est);
    body["which"] = which;
    emit_report(ctx, body, report_path);
    if (est.defined)
        std::cout << io::format_double(j12(est.value)) << "\n";
    else
        std::cout << "absent\n";
    return kExitOk;
}

int cmd_verify(RunContext& ctx, const std::string& space_file, const std::string& kernel_file,
               const std::string& suite, double constant, bool use_estimate, int trials,
               const std::string& report_path) {
    ctx.record_input(space_file);
    ctx.record_input(kernel_file);
    auto space = io::load_space(space_file);
    auto kernel = io::load_kernel(kernel_file);
    if (kernel.size() != space.size())
        throw std::invalid_argument("kernel size does not match the space");
    auto dict = build_dictionary(space, dict_config(ctx.seed, 16));

    double c_rpi = constant, c_rlsi = constant, c_grad = constant;
    if (use_estimate) {
        EstimatorOptions opts;
        opts.threads = ctx.threads;
        auto rpi = rpi_constant(kernel, space, dict, opts);
        auto rlsi = rlsi_constant(kernel, space, dict, opts);
        auto grad = gradient_bound_constant(kernel, space, dict, opts);
        if (!rpi.defined || !rlsi.defined || !grad.defined)
            throw std::invalid_argument("constant estimate absent (deterministic kernel?)");
        c_rpi = rpi.value;
        c_rlsi = rlsi.value;
        c_grad = grad.value;
    } else if (!(constant > 0.0)) {
        throw std::invalid_argument("verify: provide --constant C > 0 or --estimate");
    }

    const Vec p_grid{1.5, 2.0, 3.0, 5.0};
    auto pairs = sample_measure_pairs(space, 6, 6, ctx.seed + 1);
    std::vector<std::pair<int, int>> point_pairs;
    {
        Rng rng(ctx.seed + 2);
        for (int k = 0; k < 8; ++k)
            point_pairs.emplace_back(rng.uniform_int(space.size()),
                                     rng.uniform_int(space.size()));
    }
    Vec kappas;
    for (double b : {0.7, 1.0, 1.5, 2.0}) kappas.push_back(b / c_rlsi);

    std::vector<HarnessReport> reports;
    auto want = [&](const std::string& name) { return suite == "all" || suite == name; };
    if (want("hkc")) reports.push_back(hkc_harness(kernel, space, c_rpi, pairs, 1e-3));
    if (want("eti")) reports.push_back(eti_harness(kernel, space, c_rlsi, kappas, pairs, 1e-3));
    if (want("whi"))
        reports.push_back(whi_check(kernel, space, c_rlsi, p_grid, dict, trials, ctx.seed, 1e-8));
    if (want("hpi"))
        reports.push_back(hpi_check(kernel, space, c_rpi, dict, trials, ctx.seed, 1e-8));
    if (want("ihi"))
        reports.push_back(ihi_check(kernel, space, c_rlsi, p_grid, point_pairs, 1e-3));
    if (want("kuwada")) reports.push_back(kuwada_harness(kernel, space, c_grad, pairs, 1e-3));
    if (want("increment"))
        reports.push_back(increment_lemma_check(kernel, space, dict, trials, ctx.seed, 1e-10));
    if (reports.empty()) throw std::invalid_argument("verify: unknown suite '" + suite + "'");

    bool all_pass = true;
    json bundle = json::array();
    for (const auto& rep : reports) {
        bundle.push_back(harness_to_json(rep));
        all_pass = all_pass && rep.pass;
        std::cout << rep.id << ": " << (rep.pass ? "pass" : "FAIL") << " (max violation "
                  << io::format_double(j12(rep.max_violation)) << ")\n";
    }
    json body;
    body["suites"] = bundle;
    body["constants"] = json{{"rpi", j12(c_rpi)}, {"rlsi", j12(c_rlsi)}, {"grad", j12(c_grad)}};
    body["pass"] = all_pass;
    emit_report(ctx, body, report_path);
    return all_pass ? kExitOk : kExitHarnessFail;
}

Potential potential_from_json(const json& p) {
    if (p.contains("quadratic")) return quadratic_potential(p.at("quadratic").get<double>());
    if (p.contains("quartic")) return quartic_potential(p.at("quartic").get<double>());
    if (p.contains("user")) return user_potential(p.at("user").get<std::string>());
    throw std::invalid_argument("config.potential: expected quadratic, quartic, or user");
}

int cmd_simulate(RunContext& ctx, const std::string& config_file, const std::string& experiment,
                 const std::string& out_prefix, const std::string& report_path) {
    ctx.record_input(config_file);
    json cfg = json::parse(io::read_text_file(config_file));
    ctx.config["simulation"] = cfg;

    json body;
    bool pass = true;

    if (experiment == "quasi") {
        const double t = cfg.at("t").get<double>();
        const double d = cfg.at("d").get<double>();
        const Vec kappas = cfg.value("kappas", Vec{0.5, 1.0, 2.0});
        const Vec ps = cfg.value("ps", Vec{1.5, 2.0, 3.0});
        const double h = cfg.value("h", 0.01);
        auto rep = gaussian_quasi_invariance(t, d, kappas, ps, h);
        json checks = json::array();
        for (const auto& c : rep.checks)
            checks.push_back(json{{"name", c.name},
                                  {"lhs", j12(c.lhs)},
                                  {"rhs", j12(c.rhs)},
                                  {"pass", c.pass}});
        body["checks"] = checks;
        body["hellinger_vacuous"] = rep.hellinger_vacuous;
        body["subdivision_steps"] = rep.subdivision_steps;
        json steps = json::array();
        for (double v : rep.subdivision_he2) steps.push_back(j12(v));
        body["subdivision_he2"] = steps;
        body["grid"] = json{{"h", j12(rep.grid_h)}, {"n", rep.grid_n}};
        pass = rep.pass;
    } else {
        LangevinConfig lc;
        lc.potential = potential_from_json(cfg.at("potential"));
        lc.convexity = cfg.value("convexity", 0.0);
        lc.step = cfg.value("step", 1e-3);
        lc.paths = cfg.value("paths", 100000);
        lc.seed = cfg.value("seed", static_cast<uint64_t>(ctx.seed));
        lc.threads = ctx.threads;
        lc.reflect_box = cfg.value("reflect_box", 0.0);
        const Vec times = cfg.at("times").get<Vec>();
        if (times.empty()) throw std::invalid_argument("config.times: must be nonempty");
        lc.horizon = cfg.value("horizon", times.back());
        const double stat_tol = cfg.value("stat_tol", 0.05);

        DecaySeries series;
        if (experiment == "w2decay") {
            auto parse_atoms = [&](const char* key) {
                AtomicMeasure nu;
                for (const auto& atom : cfg.at(key))
                    nu.emplace_back(atom.at(0).get<double>(), atom.at(1).get<double>());
                return nu;
            };
            series = w2_decay_experiment(lc, parse_atoms("nu0"), parse_atoms("nu1"), times,
                                         stat_tol);
        } else if (experiment == "hedecay") {
            series = hellinger_decay_experiment(lc, cfg.value("start", 0.0), times, stat_tol);
        } else {
            throw std::invalid_argument("simulate: unknown experiment '" + experiment + "'");
        }
        const std::string csv_path = out_prefix + ".csv";
        io::save_decay_series(series, csv_path, report_path);
        ctx.outputs.push_back(csv_path);
        json rows = json::array();
        for (size_t i = 0; i < series.times.size(); ++i)
            rows.push_back(json{{"time", j12(series.times[i])},
                                {"value", j12(series.values[i])},
                                {"stderr", j12(series.stderrs[i])},
                                {"envelope", j12(series.envelopes[i])}});
        body["series"] = rows;
        body["stat_tol"] = j12(series.stat_tol);
        if (!series.note.empty()) body["note"] = series.note;
        pass = series.pass;
    }

    body["pass"] = pass;
    emit_report(ctx, body, report_path);
    std::cout << (pass ? "pass" : "FAIL") << "\n";
    return pass ? kExitOk : kExitHarnessFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transportation distances and functional inequalities on finite spaces"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed/--threads/--report may follow the subcommand

    RunContext ctx;
    uint64_t seed = 0;
    int threads = 1;
    if (const char* env = std::getenv("HKLAB_THREADS")) threads = std::max(1, std::atoi(env));
    app.add_option("--seed", seed, "master seed for all randomness");
    app.add_option("--threads", threads, "worker threads (HKLAB_THREADS fallback)");
    std::string report_path;
    app.add_option("--report", report_path, "write a JSON report with the run manifest");

    auto* gen = app.add_subcommand("gen", "emit built-in spaces and kernels");
    std::string gen_kind, gen_space, gen_out;
    int gen_n = 101;
    double gen_h = 0.1, gen_x0 = -5.0, gen_d = 1.0, gen_t = 0.25, gen_rate = 1.0;
    gen->add_option("--kind", gen_kind, "grid|cycle|two-point|heat|ou")->required();
    gen->add_option("--n", gen_n, "point count (grid, cycle)");
    gen->add_option("--spacing", gen_h, "grid spacing");
    gen->add_option("--x0", gen_x0, "grid origin");
    gen->add_option("--d", gen_d, "two-point distance");
    gen->add_option("--t", gen_t, "kernel time");
    gen->add_option("--rate", gen_rate, "OU convexity rate");
    gen->add_option("--space", gen_space, "space file (heat, ou)");
    gen->add_option("--out", gen_out, "output path")->required();

    auto* dist = app.add_subcommand("dist", "distances and divergences between measure files");
    std::string dist_space, dist_mu0, dist_mu1, dist_metric;
    double dist_a = 1.0, dist_b = 1.0, dist_alpha = 1.0;
    dist->add_option("--space", dist_space)->required();
    dist->add_option("--mu0", dist_mu0)->required();
    dist->add_option("--mu1", dist_mu1)->required();
    dist->add_option("--metric", dist_metric, "w2|he2|wab|hk|t0b|tab")->required();
    dist->add_option("--a", dist_a, "gradient weight");
    dist->add_option("--b", dist_b, "zeroth-order weight");
    dist->add_option("--alpha", dist_alpha, "HK alpha (metric hk)");
    LetOptions dist_let;
    bool dist_no_polish = false;
    dist->add_option("--let-eps-end", dist_let.eps_end, "final entropic epsilon");
    dist->add_option("--let-gap", dist_let.target_gap, "certified gap target");
    dist->add_flag("--no-let-polish", dist_no_polish, "disable the descent polish");

    auto* cons = app.add_subcommand("constants", "functional-inequality constant estimates");
    std::string cons_space, cons_kernel, cons_which;
    int cons_dict = 32;
    cons->add_option("--space", cons_space)->required();
    cons->add_option("--kernel", cons_kernel)->required();
    cons->add_option("--which", cons_which, "rpi|rlsi|grad")->required();
    cons->add_option("--dict-size", cons_dict, "dictionary size hint");
    std::string cons_witness;
    cons->add_option("--witness-out", cons_witness, "write the witness function as CSV");

    auto* verify = app.add_subcommand("verify", "inequality harnesses for a kernel");
    std::string ver_space, ver_kernel, ver_suite = "all";
    double ver_constant = 0.0;
    bool ver_estimate = false;
    int ver_trials = 1000;
    verify->add_option("--space", ver_space)->required();
    verify->add_option("--kernel", ver_kernel)->required();
    verify->add_option("--suite", ver_suite, "hkc|eti|whi|hpi|ihi|kuwada|increment|all");
    verify->add_option("--constant", ver_constant, "inequality constant C");
    verify->add_flag("--estimate", ver_estimate, "estimate constants from the kernel");
    verify->add_option("--trials", ver_trials, "sampled tuples per harness");

    auto* sim = app.add_subcommand("simulate", "Langevin experiments and Gaussian shifts");
    std::string sim_config, sim_experiment, sim_out = "series";
    sim->add_option("--config", sim_config)->required();
    sim->add_option("--experiment", sim_experiment, "w2decay|hedecay|quasi")->required();
    sim->add_option("--out", sim_out, "output prefix for CSV series");

    CLI11_PARSE(app, argc, argv);

    ctx.seed = seed;
    ctx.threads = threads;

    try {
        if (gen->parsed()) {
            ctx.command = "gen";
            ctx.config = json{{"kind", gen_kind}, {"n", gen_n},     {"h", gen_h},
                              {"x0", gen_x0},     {"d", gen_d},     {"t", gen_t},
                              {"rate", gen_rate}, {"out", gen_out}};
            return cmd_gen(ctx, gen_kind, gen_n, gen_h, gen_x0, gen_d, gen_t, gen_rate,
                           gen_space, gen_out, report_path);
        }
        if (dist->parsed()) {
            ctx.command = "dist";
            ctx.config = json{{"metric", dist_metric},
                              {"a", dist_a},
                              {"b", dist_b},
                              {"alpha", dist_alpha}};
            dist_let.polish_small = !dist_no_polish;
            return cmd_dist(ctx, dist_space, dist_mu0, dist_mu1, dist_metric, dist_a, dist_b,
                            dist_alpha, dist_let, report_path);
        }
        if (cons->parsed()) {
            ctx.command = "constants";
            ctx.config = json{{"which", cons_which}, {"dict_size", cons_dict}};
            return cmd_constants(ctx, cons_space, cons_kernel, cons_which, cons_dict,
                                 cons_witness, report_path);
        }
        if (verify->parsed()) {
            ctx.command = "verify";
            ctx.config = json{{"suite", ver_suite},
                              {"constant", ver_constant},
                              {"estimate", ver_estimate},
                              {"trials", ver_trials}};
            return cmd_verify(ctx, ver_space, ver_kernel, ver_suite, ver_constant, ver_estimate,
                              ver_trials, report_path);
        }
        if (sim->parsed()) {
            ctx.command = "simulate";
            ctx.config = json{{"experiment", sim_experiment}, {"out", sim_out}};
            return cmd_simulate(ctx, sim_config, sim_experiment, sim_out, report_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitValidation;
}
