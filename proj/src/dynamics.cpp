#include "hklab/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "hklab/divergence.hpp"
#include "hklab/transport.hpp"

namespace hklab {

Potential quadratic_potential(double a) {
    if (!(a >= 0.0)) throw std::invalid_argument("quadratic potential: a must be >= 0");
    return Potential{[a](double x) { return 0.5 * a * x * x; },
                     [a](double x) { return a * x; }, "quadratic"};
}

Potential quartic_potential(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("quartic potential: lambda must be > 0");
    return Potential{[lambda](double x) { return 0.25 * lambda * x * x * x * x; },
                     [lambda](double x) { return lambda * x * x * x; }, "quartic"};
}

// ---------------------------------------------------------------------------
// tiny arithmetic parser for user potentials: numbers, x, + - * / ^, (), and
// exp/log/sin/cos/sqrt/abs/tanh
// ---------------------------------------------------------------------------

namespace {

struct ExprParser {
    const std::string& s;
    size_t pos = 0;

    explicit ExprParser(const std::string& src) : s(src) {}

    using Fn = std::function<double(double)>;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    Fn parse() {
        Fn e = expr();
        skip();
        if (pos != s.size())
            throw std::invalid_argument("potential expression: trailing input at position " +
                                        std::to_string(pos));
        return e;
    }

    Fn expr() {
        Fn left = term();
        while (true) {
            if (eat('+')) {
                Fn right = term();
                left = [left, right](double x) { return left(x) + right(x); };
            } else if (eat('-')) {
                Fn right = term();
                left = [left, right](double x) { return left(x) - right(x); };
            } else {
                return left;
            }
        }
    }

    Fn term() {
        Fn left = unary();
        while (true) {
            if (eat('*')) {
                Fn right = unary();
                left = [left, right](double x) { return left(x) * right(x); };
            } else if (eat('/')) {
                Fn right = unary();
                left = [left, right](double x) { return left(x) / right(x); };
            } else {
                return left;
            }
        }
    }

    // unary minus binds looser than '^', so -x^2 means -(x^2)
    Fn unary() {
        if (eat('-')) {
            Fn e = unary();
            return [e](double x) { return -e(x); };
        }
        eat('+');
        return power();
    }

    Fn power() {
        Fn base = atom();
        if (eat('^')) {
            Fn e = unary();  // right associative
            return [base, e](double x) { return std::pow(base(x), e(x)); };
        }
        return base;
    }

    Fn atom() {
        skip();
        if (pos >= s.size()) throw std::invalid_argument("potential expression: unexpected end");
        if (eat('(')) {
            Fn e = expr();
            if (!eat(')')) throw std::invalid_argument("potential expression: missing ')'");
            return e;
        }
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            const double v = std::stod(s.substr(pos), &used);
            pos += used;
            return [v](double) { return v; };
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t end = pos;
            while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
            const std::string name = s.substr(pos, end - pos);
            pos = end;
            if (name == "x") return [](double x) { return x; };
            if (name == "pi") return [](double) { return 3.141592653589793; };
            if (!eat('('))
                throw std::invalid_argument("potential expression: '" + name + "' expects '('");
            Fn arg = expr();
            if (!eat(')')) throw std::invalid_argument("potential expression: missing ')'");
            if (name == "exp") return [arg](double x) { return std::exp(arg(x)); };
            if (name == "log") return [arg](double x) { return std::log(arg(x)); };
            if (name == "sin") return [arg](double x) { return std::sin(arg(x)); };
            if (name == "cos") return [arg](double x) { return std::cos(arg(x)); };
            if (name == "sqrt") return [arg](double x) { return std::sqrt(arg(x)); };
            if (name == "abs") return [arg](double x) { return std::abs(arg(x)); };
            if (name == "tanh") return [arg](double x) { return std::tanh(arg(x)); };
            throw std::invalid_argument("potential expression: unknown function '" + name + "'");
        }
        throw std::invalid_argument("potential expression: unexpected character '" +
                                    std::string(1, c) + "'");
    }
};

}  // namespace

Potential user_potential(const std::string& expression) {
    ExprParser parser(expression);
    auto u = parser.parse();
    u(0.0);  // force evaluation errors now rather than mid-simulation
    auto grad = [u](double x) {
        const double h = 1e-5 * (1.0 + std::abs(x));
        return (u(x + h) - u(x - h)) / (2.0 * h);
    };
    return Potential{u, grad, "user:" + expression};
}

void LangevinConfig::validate() const {
    if (!potential.u || !potential.grad_u)
        throw std::invalid_argument("langevin: potential not set");
    if (!(step > 0.0)) throw std::invalid_argument("langevin: step must be positive");
    if (horizon < step) throw std::invalid_argument("langevin: horizon must be >= step");
    if (paths < 1000) throw std::invalid_argument("langevin: need at least 1000 paths");
    if (convexity < 0.0) throw std::invalid_argument("langevin: convexity must be >= 0");
}

SimulationResult simulate_langevin(const LangevinConfig& config, const Vec& starts,
                                   const Vec& checkpoint_times) {
    config.validate();
    std::vector<long long> steps_at;
    for (double t : checkpoint_times) {
        if (!(t > 0.0)) throw std::invalid_argument("langevin: checkpoint times must be > 0");
        if (t > config.horizon + 1e-12)
            throw std::invalid_argument("langevin: checkpoint beyond horizon");
        steps_at.push_back(std::llround(t / config.step));
    }
    if (!std::is_sorted(steps_at.begin(), steps_at.end()))
        throw std::invalid_argument("langevin: checkpoint times must be increasing");

    SimulationResult out;
    out.samples.assign(starts.size(),
                       std::vector<Vec>(checkpoint_times.size(), Vec(config.paths, 0.0)));
    std::atomic<long long> aborted{0}, reflected{0};
    const double h = config.step;
    const double noise = std::sqrt(2.0 * h);
    const Rng master(config.seed);

    for (size_t si = 0; si < starts.size(); ++si) {
        auto& per_checkpoint = out.samples[si];
        parallel_for(config.paths, config.threads, [&](int path) {
            Rng rng = master.child(si * static_cast<uint64_t>(config.paths) + path);
            double x = starts[si];
            size_t next_cp = 0;
            bool alive = true;
            const long long total = steps_at.back();
            for (long long step_count = 1; step_count <= total && alive; ++step_count) {
                x += -config.potential.grad_u(x) * h + noise * rng.normal();
                if (config.reflect_box > 0.0 && std::abs(x) > config.reflect_box) {
                    x = std::copysign(2.0 * config.reflect_box - std::abs(x), x);
                    reflected.fetch_add(1, std::memory_order_relaxed);
                }
                if (std::abs(x) > config.blowup_guard) {
                    aborted.fetch_add(1, std::memory_order_relaxed);
                    alive = false;
                    x = std::copysign(config.blowup_guard, x);
                }
                while (next_cp < steps_at.size() && steps_at[next_cp] == step_count) {
                    per_checkpoint[next_cp][path] = x;
                    ++next_cp;
                }
            }
            // an aborted path keeps its clamped value at later checkpoints
            for (; next_cp < steps_at.size(); ++next_cp) per_checkpoint[next_cp][path] = x;
        });
    }
    out.aborted = aborted.load();
    out.reflected = reflected.load();
    return out;
}

namespace {

UniformGrid1d make_binning_grid(double lo, double hi, int cells = 512) {
    const double h = (hi - lo) / (cells - 1);
    return UniformGrid1d{lo, h, cells};
}

FiniteMetricSpace grid_space_of(const UniformGrid1d& g) {
    return make_grid_space(g.n, g.h, g.x0);
}

// exact empirical 1-D W2^2 between equal-size sample clouds (quantile
// coupling); used only for the error bars
double quantile_w2_sq(Vec a, Vec b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const size_t n = std::min(a.size(), b.size());
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(n);
}

double block_stderr_w2(const Vec& cloud0, const Vec& cloud1, int blocks = 10) {
    const int n = static_cast<int>(std::min(cloud0.size(), cloud1.size()));
    if (n < blocks * 10) return 0.0;
    const int bs = n / blocks;
    Vec vals;
    for (int b = 0; b < blocks; ++b) {
        Vec c0(cloud0.begin() + b * bs, cloud0.begin() + (b + 1) * bs);
        Vec c1(cloud1.begin() + b * bs, cloud1.begin() + (b + 1) * bs);
        vals.push_back(quantile_w2_sq(std::move(c0), std::move(c1)));
    }
    const double mean = sum(vals) / blocks;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (blocks - 1);
    return std::sqrt(var / blocks);
}

double block_stderr_he2(const Vec& cloud, const DiscreteMeasure& reference,
                        const UniformGrid1d& grid, int blocks = 10) {
    const int n = static_cast<int>(cloud.size());
    if (n < blocks * 10) return 0.0;
    const int bs = n / blocks;
    Vec vals;
    for (int b = 0; b < blocks; ++b) {
        Vec chunk(cloud.begin() + b * bs, cloud.begin() + (b + 1) * bs);
        long long clamped = 0;
        vals.push_back(hellinger_sq(bin_samples(chunk, grid, &clamped), reference));
    }
    const double mean = sum(vals) / blocks;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (blocks - 1);
    return std::sqrt(var / blocks);
}

}  // namespace

DecaySeries w2_decay_experiment(const LangevinConfig& config, const AtomicMeasure& nu0,
                                const AtomicMeasure& nu1, const Vec& times, double stat_tol) {
    if (!(config.convexity > 0.0))
        throw std::invalid_argument("w2 decay: requires declared convexity a > 0");
    if (nu0.empty() || nu1.empty()) throw std::invalid_argument("w2 decay: empty start measure");

    auto total_mass = [](const AtomicMeasure& nu) {
        double t = 0.0;
        for (const auto& [_, m] : nu) t += m;
        if (!(t > 0.0)) throw std::invalid_argument("w2 decay: start measure has no mass");
        return t;
    };
    const double tot0 = total_mass(nu0), tot1 = total_mass(nu1);

    Vec starts;
    Vec masses0, masses1;
    for (const auto& [pos, m] : nu0) {
        starts.push_back(pos);
        masses0.push_back(m / tot0);
    }
    for (const auto& [pos, m] : nu1) {
        starts.push_back(pos);
        masses1.push_back(m / tot1);
    }

    SimulationResult sim = simulate_langevin(config, starts, times);

    double w2_start;
    {
        Matrix cost(static_cast<int>(nu0.size()), static_cast<int>(nu1.size()));
        for (size_t i = 0; i < nu0.size(); ++i)
            for (size_t j = 0; j < nu1.size(); ++j) {
                const double dx = nu0[i].first - nu1[j].first;
                cost(static_cast<int>(i), static_cast<int>(j)) = dx * dx;
            }
        w2_start = exact_ot(cost, masses0, masses1).value;
    }

    DecaySeries series;
    series.stat_tol = stat_tol;
    series.pass = true;
    for (size_t ci = 0; ci < times.size(); ++ci) {
        double lo = kInf, hi = -kInf;
        for (size_t si = 0; si < starts.size(); ++si)
            for (double v : sim.samples[si][ci]) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        const UniformGrid1d grid = make_binning_grid(lo - 1e-9, hi + 1e-9);
        Vec w0(grid.n, 0.0), w1(grid.n, 0.0);
        long long clamped = 0;
        for (size_t k = 0; k < nu0.size(); ++k) {
            DiscreteMeasure binned = bin_samples(sim.samples[k][ci], grid, &clamped);
            for (int j = 0; j < grid.n; ++j) w0[j] += masses0[k] * binned[j];
        }
        for (size_t k = 0; k < nu1.size(); ++k) {
            DiscreteMeasure binned = bin_samples(sim.samples[nu0.size() + k][ci], grid, &clamped);
            for (int j = 0; j < grid.n; ++j) w1[j] += masses1[k] * binned[j];
        }

        const double value =
            wasserstein2_sq(DiscreteMeasure(w0), DiscreteMeasure(w1), grid_space_of(grid));
        const double envelope = std::exp(-2.0 * config.convexity * times[ci]) * w2_start;
        const double se = (nu0.size() == 1 && nu1.size() == 1)
                              ? block_stderr_w2(sim.samples[0][ci], sim.samples[1][ci])
                              : 0.0;

        series.times.push_back(times[ci]);
        series.values.push_back(value);
        series.stderrs.push_back(se);
        series.envelopes.push_back(envelope);
        if (value > envelope * (1.0 + stat_tol) + 1e-12) series.pass = false;
    }
    return series;
}

DecaySeries hellinger_decay_experiment(const LangevinConfig& config, double start,
                                       const Vec& times, double stat_tol) {
    config.validate();

    // equilibrium support: where e^{-U} is above 1e-16 of its maximum
    double best_u = kInf;
    for (double x = -50.0; x <= 50.0; x += 0.01) best_u = std::min(best_u, config.potential.u(x));
    double lo = start, hi = start;
    for (double x = -50.0; x <= 50.0; x += 0.01) {
        if (config.potential.u(x) - best_u < 37.0) {  // e^{-37} ~ 1e-16
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    const UniformGrid1d grid = make_binning_grid(lo - 1.0, hi + 1.0);

    Vec eq(grid.n);
    for (int i = 0; i < grid.n; ++i) eq[i] = std::exp(-(config.potential.u(grid.x(i)) - best_u));
    const double z = sum(eq);
    for (double& w : eq) w /= z;
    const DiscreteMeasure mu(eq);

    const FiniteMetricSpace gspace = grid_space_of(grid);
    int start_idx = static_cast<int>(std::llround((start - grid.x0) / grid.h));
    start_idx = std::clamp(start_idx, 0, grid.n - 1);
    const double w2_start = wasserstein2_sq(DiscreteMeasure::dirac(start_idx, grid.n), mu, gspace);

    SimulationResult sim = simulate_langevin(config, {start}, times);

    DecaySeries series;
    series.stat_tol = stat_tol;
    series.pass = true;
    for (size_t ci = 0; ci < times.size(); ++ci) {
        long long clamped = 0;
        const DiscreteMeasure binned = bin_samples(sim.samples[0][ci], grid, &clamped);
        const double value = hellinger_sq(binned, mu);
        const double envelope = w2_start / (4.0 * times[ci]);
        const double se = block_stderr_he2(sim.samples[0][ci], mu, grid);
        series.times.push_back(times[ci]);
        series.values.push_back(value);
        series.stderrs.push_back(se);
        series.envelopes.push_back(envelope);
        if (value > envelope * (1.0 + stat_tol) + 1e-12) series.pass = false;
    }
    // trend to equilibrium: allow per-step noise of a few standard errors
    for (size_t i = 0; i + 1 < series.values.size(); ++i) {
        const double slack = 3.0 * (series.stderrs[i] + series.stderrs[i + 1]) + 1e-3;
        if (series.values[i + 1] > series.values[i] + slack) {
            series.pass = false;
            series.note = "non-monotone decay";
        }
    }
    return series;
}

QuasiInvarianceReport gaussian_quasi_invariance(double t, double d, const Vec& kappa_grid,
                                                const Vec& p_grid, double h, double rel_tol) {
    if (!(t > 0.0)) throw std::invalid_argument("quasi-invariance: t must be > 0");
    if (d < 0.0) throw std::invalid_argument("quasi-invariance: shift must be >= 0");

    // mu_t is the centered Gaussian of variance t; with the grid kernels'
    // variance-2s convention this is the heat kernel at time t/2.  The grid
    // must keep the shift on lattice nodes.
    const double radius = 6.0 * std::sqrt(t) + d;
    int shift_cells = std::max(1, static_cast<int>(std::llround(d / h)));
    if (d > 0.0) h = d / shift_cells;
    const int half = static_cast<int>(std::ceil(radius / h));
    const int n = 2 * half + 1;
    if (n > 200000)
        throw std::invalid_argument(
            "quasi-invariance: shift is far below the grid resolution (lattice would need " +
            std::to_string(n) + " nodes); raise h or d");
    const UniformGrid1d grid{-half * h, h, n};

    const MarkovKernel heat = heat_kernel_grid(grid, t / 2.0);
    const int center = half;
    auto row_at_shift = [&](int cells) { return heat.row_measure(center + cells); };
    if (d > 0.0 && center + shift_cells >= n)
        throw std::invalid_argument("quasi-invariance: grid too small for the shift");

    const DiscreteMeasure mu_t = row_at_shift(0);
    const DiscreteMeasure mu_t_d = d > 0.0 ? row_at_shift(shift_cells) : mu_t;

    QuasiInvarianceReport rep;
    rep.grid_h = h;
    rep.grid_n = n;
    rep.pass = true;
    auto add = [&](std::string name, double lhs, double rhs, bool ok) {
        rep.checks.push_back(QuasiCheck{std::move(name), lhs, rhs, ok});
        if (!ok) rep.pass = false;
    };

    // (i) T_{0, 2 kappa / t}(mu_t, mu_t^d) <= C_b exp(t d^2 / (8 kappa^2))
    for (double kappa : kappa_grid) {
        const DivParams params(0.0, 2.0 * kappa / t);
        const double lhs = renyi_T0b(params, mu_t, mu_t_d).value;
        const double rhs = params.c_b * std::exp(t * d * d / (8.0 * kappa * kappa));
        add("T-estimate kappa=" + std::to_string(kappa), lhs, rhs,
            lhs <= rhs * (1.0 + rel_tol));
    }

    // (ii) Renyi functional against the weak bound and the exact value
    for (double p : p_grid) {
        double inner = 0.0;
        bool support_ok = true;
        for (int z = 0; z < n; ++z) {
            const double a = mu_t[z], b = mu_t_d[z];
            if (a <= 0.0) continue;
            if (b <= 0.0) {
                support_ok = false;
                break;
            }
            inner += std::pow(a / b, 1.0 / (p - 1.0)) * a;
        }
        const double functional = support_ok ? std::pow(inner, p - 1.0) : kInf;
        const double weak_bound =
            std::exp((p - 1.0) / (std::log(p) * std::log(p)) * d * d / (2.0 * t));
        const double exact = std::exp(p / (p - 1.0) * d * d / (2.0 * t));
        add("renyi-functional<=weak-bound p=" + std::to_string(p), functional, weak_bound,
            functional <= weak_bound * (1.0 + rel_tol));
        add("renyi-functional=exact p=" + std::to_string(p), functional, exact,
            std::abs(functional - exact) <= rel_tol * exact);
    }

    // (iii) Hellinger route, with the n-step subdivision when vacuous
    const double he = hellinger_sq(mu_t, mu_t_d);
    const double he_bound = d * d / (4.0 * t);
    add("hellinger<=d^2/(4t)", he, he_bound, he <= he_bound * (1.0 + rel_tol) + 1e-12);
    if (he_bound >= 2.0) {
        rep.hellinger_vacuous = true;
        const int steps = static_cast<int>(std::ceil(d / std::sqrt(4.0 * t)));
        rep.subdivision_steps = steps;
        for (int k = 0; k < steps; ++k) {
            // near-equal lattice splits of the shift
            const int from = static_cast<int>(std::llround(static_cast<double>(k) *
                                                           shift_cells / steps));
            const int to = static_cast<int>(std::llround(static_cast<double>(k + 1) *
                                                         shift_cells / steps));
            const double step_he = hellinger_sq(row_at_shift(from), row_at_shift(to));
            rep.subdivision_he2.push_back(step_he);
            if (!(step_he < 2.0 - 1e-6)) rep.pass = false;
        }
    }
    return rep;
}

}  // namespace hklab
