#include "sdppp/experiments.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sdppp/asymptotics.hpp"
#include "sdppp/bbm.hpp"
#include "sdppp/overlap.hpp"
#include "sdppp/parallel.hpp"
#include "sdppp/point_process.hpp"
#include "sdppp/rem_exact.hpp"
#include "sdppp/susceptibility.hpp"

namespace sdppp {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path) : f_(path) {
        if (!f_) throw std::runtime_error("cannot open " + path.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) f_ << ',';
            f_ << cells[i];
        }
        f_ << '\n';
    }

  private:
    std::ofstream f_;
};

struct Summary {
    std::ostringstream text;
    bool all_pass = true;
    void check(const std::string& name, bool pass, const std::string& detail) {
        text << (pass ? "[PASS] " : "[FAIL] ") << name << "  " << detail << '\n';
        all_pass = all_pass && pass;
    }
    void note(const std::string& line) { text << line << '\n'; }
};

std::vector<double> grid_or(const ExperimentConfig& cfg, std::vector<double> fallback) {
    return cfg.beta_grid.empty() ? std::move(fallback) : cfg.beta_grid;
}

std::uint64_t samples_for(const ExperimentConfig& cfg, std::uint64_t full) {
    const std::uint64_t n = cfg.n_samples ? cfg.n_samples : full;
    return cfg.quick ? std::max<std::uint64_t>(n / 50, 500) : n;
}

// --------------------------------------------------------------------------
// validate-exact: the closed-form suite with max relative deviations
// --------------------------------------------------------------------------
int run_validate_exact(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                       Summary& summary) {
    CsvWriter csv(dir / "validate_exact.csv");
    csv.row({"check", "value", "reference", "rel_dev", "pass"});
    auto check = [&](const std::string& name, double value, double ref, double tol) {
        const double dev = std::abs(value - ref) / std::max(std::abs(ref), 1e-300);
        const bool ok = dev <= tol;
        csv.row({name, fmt(value), fmt(ref), fmt(dev), ok ? "1" : "0"});
        summary.check(name, ok, "value=" + fmt(value) + " ref=" + fmt(ref) +
                                   " rel_dev=" + fmt(dev));
    };
    const double pi = kPi;
    check("laplace_Z(2,1)=exp(-sqrt(pi))", rem::laplace_Z(2.0, 1.0),
          std::exp(-std::sqrt(pi)), 1e-12);
    check("laplace_Z(2,4)=exp(-2 sqrt(pi))", rem::laplace_Z(2.0, 4.0),
          std::exp(-2.0 * std::sqrt(pi)), 1e-12);
    check("neg_moment(2,1)=2/pi", rem::neg_moment(2.0, 1.0), 2.0 / pi, 1e-10);
    check("mean_log_Z(2)=gamma+log(pi)", rem::mean_log_Z(2.0),
          kEulerGamma + std::log(pi), 1e-12);
    check("var_log_Z(2)=pi^2/2", rem::var_log_Z(2.0), pi * pi / 2.0, 1e-12);
    check("var_ratio(2)=pi^2/6+pi^2/16", rem::var_ratio(2.0),
          pi * pi / 6.0 + pi * pi / 16.0, 1e-12);
    check("cov_logZ_ratio(2)=pi^2/3", rem::cov_logZ_ratio(2.0), pi * pi / 3.0, 1e-12);
    check("kappa(2)=1/144", rem::kappa(2.0), 1.0 / 144.0, 1e-10);
    check("trigamma(1/2)=pi^2/2", trigamma(0.5).value, pi * pi / 2.0, 1e-10);
    Rng rng(derive_seed(cfg.seed, 0x76616c69ULL));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double beta = 1.05 + 3.95 * rng.u01();
        const double k1 = rem::kappa(beta);
        const double k2 = rem::kappa_variance_form(beta);
        worst = std::max(worst, std::abs(k1 - k2) / std::abs(k1));
    }
    check("kappa identity bridge (20 random beta)", worst, 0.0, 1e-10);
    check("near-critical (b-1)^2 kappa at 1.001",
          rem::kappa(1.001) * 1e-6, rem::kappa_near_critical_constant(), 0.01);
    check("low-temperature beta^5 kappa at 200",
          rem::kappa(200.0) * std::pow(200.0, 5.0), rem::kappa_low_temperature_constant(),
          0.02);
    return summary.all_pass ? 0 : 1;
}

// --------------------------------------------------------------------------
// overlap-scan
// --------------------------------------------------------------------------

// conditional-event diagnostic for the REM scan: mass of Q carried outside
// E = { xi_1 in [0.5 L, L] }, L = log(1/(beta-1)), vs the epsilon (beta-1) L
// reference of the bounding proposition.
struct EventDiag {
    double mass = 0.0;
    double reference = 0.0;
};

EventDiag rem_event_diagnostic(double beta, double beta_prime, std::uint64_t n,
                               std::uint64_t seed) {
    const double L = std::log(1.0 / (beta - 1.0));
    const std::size_t nat = atoms_for_beta(beta);
    OnlineStats acc;
    for (std::uint64_t rep = 0; rep < n; ++rep) {
        Rng rng(derive_seed(seed, 0x65766e74ULL, rep));
        KahanSum zb, zp, zbp;
        double eta = 0.0;
        double xi1 = 0.0;
        for (std::size_t i = 0; i < nat; ++i) {
            eta += rng.exponential();
            if (i == 0) xi1 = -std::log(eta);
            const double le = std::log(eta);
            const double wb = std::exp(-beta * le);
            const double wp = std::exp(-beta_prime * le);
            zb.add(wb);
            zp.add(wp);
            zbp.add(wb * wp);
        }
        const double zbc = zb.value() + tail_mean_mass(eta, beta);
        const double zpc = zp.value() + tail_mean_mass(eta, beta_prime);
        const double q = zbp.value() / (zbc * zpc);
        const bool inside = xi1 >= 0.5 * L && xi1 <= L;
        acc.add(inside ? 0.0 : q);
    }
    return {acc.mean, 0.5 * (beta - 1.0) * L};
}

int run_overlap_scan(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                     Summary& summary) {
    const auto grid = grid_or(cfg, overlap::default_scan_grid());
    const std::uint64_t n = samples_for(cfg, 100000);
    const DecorationModel model = cfg.model();
    std::vector<overlap::OverlapEstimate> rows(grid.size());
    run_cells(grid.size(), cfg.workers, [&](std::size_t cell) {
        rows[cell] = overlap::direct_overlap(model, grid[cell], cfg.beta_prime, n,
                                             derive_seed(cfg.seed, 0x7363616eULL, cell),
                                             cfg.n_atoms);
    });
    CsvWriter csv(dir / "overlap_scan.csv");
    const bool diag = cfg.event_check && model.kind == DecorationKind::point_mass;
    if (diag)
        csv.row({"beta", "beta_prime", "mean", "stderr", "n", "method", "seed",
                 "event_mass", "event_reference"});
    else
        csv.row({"beta", "beta_prime", "mean", "stderr", "n", "method", "seed"});
    std::vector<double> x1, x2, y, se;
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        const auto& r = rows[cell];
        std::vector<std::string> line{fmt(r.beta),       fmt(r.beta_prime), fmt(r.mean),
                                      fmt(r.stderr_),    std::to_string(r.n_samples),
                                      "direct",          std::to_string(r.seed)};
        if (diag) {
            const auto d = rem_event_diagnostic(r.beta, cfg.beta_prime,
                                                std::max<std::uint64_t>(n / 10, 1000),
                                                derive_seed(cfg.seed, 0x64696167ULL, cell));
            line.push_back(fmt(d.mass));
            line.push_back(fmt(d.reference));
        }
        csv.row(line);
        x1.push_back((r.beta - 1.0) * std::log(1.0 / (r.beta - 1.0)));
        x2.push_back(r.beta - 1.0);
        y.push_back(r.mean);
        se.push_back(r.stderr_);
    }
    const FitResult fit = weighted_fit2(x1, x2, y, se);
    CsvWriter fcsv(dir / "overlap_fit.csv");
    fcsv.row({"model", "beta_prime", "c1", "c1_se", "c2", "c2_se", "n_per_point"});
    fcsv.row({model.name(), fmt(cfg.beta_prime), fmt(fit.c1), fmt(fit.c1_se), fmt(fit.c2),
              fmt(fit.c2_se), std::to_string(n)});
    summary.note("overlap scan " + model.name() + ": c1 = " + fmt(fit.c1) + " +- " +
                 fmt(fit.c1_se) + ", c2 = " + fmt(fit.c2) + " +- " + fmt(fit.c2_se));
    if (fit.conditioning_warning) summary.note("warning: fit design poorly conditioned");
    return 0;
}

// --------------------------------------------------------------------------
// susceptibility
// --------------------------------------------------------------------------
int run_susceptibility(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                       Summary& summary) {
    using namespace susceptibility;
    const auto grid = grid_or(cfg, {cfg.beta});
    const std::uint64_t n = samples_for(cfg, 200000);
    const DecorationModel model = cfg.model();
    CsvWriter csv(dir / "susceptibility.csv");
    csv.row({"model", "beta", "method", "kappa", "stderr", "var_ratio", "var_logZ", "cov",
             "kappa_rem", "tilt_variance", "n", "seed", "warning"});
    struct Cell { double beta; Method method; };
    std::vector<Cell> cells;
    for (double b : grid)
        for (Method m : {Method::decomposition, Method::variance_form, Method::finite_h_fit})
            cells.push_back({b, m});
    std::vector<SusceptibilityEstimate> out(cells.size());
    run_cells(cells.size(), cfg.workers, [&](std::size_t i) {
        const auto [b, m] = cells[i];
        const std::uint64_t s = derive_seed(cfg.seed, 0x73757363ULL, i);
        switch (m) {
            case Method::decomposition:
                out[i] = kappa_decomposition(model, b, n, s);
                break;
            case Method::variance_form:
                out[i] = kappa_variance_form(model, b, n, s, cfg.n_atoms);
                break;
            case Method::finite_h_fit:
                out[i] = kappa_finite_h(model, b, {0.02, 0.05, 0.1}, n, s, cfg.n_atoms);
                break;
        }
    });
    for (const auto& e : out) {
        csv.row({model.name(), fmt(e.beta), method_name(e.method), fmt(e.kappa),
                 fmt(e.stderr_), fmt(e.var_ratio), fmt(e.var_logZ), fmt(e.cov),
                 fmt(e.kappa_rem), fmt(e.tilt_variance), std::to_string(e.n_samples),
                 std::to_string(e.seed), e.warning ? "1" : "0"});
        summary.note("kappa[" + std::string(method_name(e.method)) + "] beta=" + fmt(e.beta) +
                     ": " + fmt(e.kappa) + " +- " + fmt(e.stderr_) +
                     (e.warning ? " (warning)" : ""));
    }
    return 0;
}

// --------------------------------------------------------------------------
// asymptotics
// --------------------------------------------------------------------------
int run_asymptotics(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                    Summary& summary) {
    using namespace asymptotics;
    CsvWriter csv(dir / "asymptotics.csv");
    csv.row({"k", "gamma", "eps", "log_quadrature", "log_leading", "log_predicted",
             "quad_over_predicted_minus_1"});
    const std::vector<double> gammas = grid_or(cfg, {0.3, 0.5, 0.7});
    for (double g : gammas) {
        for (int k = 0; k <= 2; ++k) {
            for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
                if (peak_location(g, eps) < 10.0) continue;
                const auto exp_res = laplace_expansion(k, g, eps);
                const double lq = log_integral_xk(k, g, eps);
                csv.row({std::to_string(k), fmt(g), fmt(eps), fmt(lq),
                         fmt(exp_res.log_leading), fmt(exp_res.log_predicted),
                         fmt(std::expm1(lq - exp_res.log_predicted))});
            }
        }
        const double comb = correction_coefficient(2, g) + correction_coefficient(0, g) -
                            2.0 * correction_coefficient(1, g);
        const double target = std::pow(g, -1.0 / (1.0 - g)) / (1.0 - g);
        summary.check("combination identity c2+c0-2c1 at gamma=" + fmt(g),
                      std::abs(comb - target) <= 1e-10 * target,
                      "value=" + fmt(comb) + " ref=" + fmt(target));
    }
    CsvWriter mcsv(dir / "log_moments.csv");
    mcsv.row({"k", "gamma", "eps", "beta", "quadrature_over_predicted"});
    for (int k = 0; k <= 2; ++k) {
        const double r = log_moment_quadrature_ratio(k, 0.5, 0.05, 1.05);
        mcsv.row({std::to_string(k), fmt(0.5), fmt(0.05), fmt(1.05), fmt(r)});
    }
    return summary.all_pass ? 0 : 1;
}

// --------------------------------------------------------------------------
// bbm
// --------------------------------------------------------------------------
int run_bbm(const ExperimentConfig& cfg, const std::filesystem::path& dir,
            Summary& summary) {
    const std::uint64_t runs = cfg.quick ? std::max<std::uint64_t>(cfg.bbm_runs / 20, 30)
                                         : cfg.bbm_runs;
    const std::vector<double> betas = grid_or(cfg, {0.5, 2.0});
    CsvWriter csv(dir / "bbm_runs.csv");
    std::vector<std::string> header{"run", "seed", "N_t", "max", "recentered_max",
                                    "rem_recentered_max"};
    for (double b : betas) header.push_back("f_beta_" + fmt(b));
    csv.row(header);
    struct Row { std::uint64_t seed = 0; std::size_t pop = 0; double mx = 0, rmax = 0, rem = 0;
                 std::vector<double> f; bool capped = false; };
    std::vector<Row> rows(runs);
    run_cells(runs, cfg.workers, [&](std::size_t i) {
        Row& r = rows[i];
        r.seed = derive_seed(cfg.seed, 0x62626d72ULL, i);
        const auto forest = bbm::simulate(cfg.bbm_t, cfg.bbm_max_population, r.seed);
        r.capped = forest.capped;
        if (forest.capped) return;
        r.pop = forest.population();
        r.rmax = bbm::recentered_max(forest);
        r.mx = r.rmax + (cfg.bbm_t - 1.5 * std::log(cfg.bbm_t));
        r.rem = bbm::rem_recentered_max(cfg.bbm_t, derive_seed(cfg.seed, 0x72656d72ULL, i));
        for (double b : betas) r.f.push_back(bbm::free_energy(forest, b).f);
    });
    std::size_t capped = 0;
    std::vector<std::vector<double>> fcols(betas.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        if (r.capped) { ++capped; continue; }
        std::vector<std::string> line{std::to_string(i), std::to_string(r.seed),
                                      std::to_string(r.pop), fmt(r.mx), fmt(r.rmax),
                                      fmt(r.rem)};
        for (std::size_t j = 0; j < betas.size(); ++j) {
            line.push_back(fmt(r.f[j]));
            fcols[j].push_back(r.f[j]);
        }
        csv.row(line);
    }
    if (capped) summary.note("warning: " + std::to_string(capped) + " runs hit the population cap and were excluded");
    for (std::size_t j = 0; j < betas.size(); ++j)
        summary.note("median f(" + fmt(betas[j]) + ") = " + fmt(median(fcols[j])));
    // overlap histograms from one long-horizon forest per temperature pair
    const auto forest = bbm::simulate(cfg.bbm_t, cfg.bbm_max_population,
                                      derive_seed(cfg.seed, 0x62626d68ULL));
    if (!forest.capped) {
        for (double b : betas) {
            const auto h = bbm::empirical_overlap(forest, b, b, cfg.bbm_pairs,
                                                  derive_seed(cfg.seed, 0x68697374ULL));
            CsvWriter hcsv(dir / ("bbm_overlap_hist_beta_" + fmt(b) + ".csv"));
            hcsv.row({"bin_left", "bin_right", "mass"});
            for (std::size_t k = 0; k < h.mass.size(); ++k)
                hcsv.row({fmt(h.edges[k]), fmt(h.edges[k + 1]), fmt(h.mass[k])});
        }
    }
    return 0;
}

// --------------------------------------------------------------------------
// fluctuations: empirical characteristic function of Z(beta) - 1/(beta-1)
// --------------------------------------------------------------------------
int run_fluctuations(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                     Summary& summary) {
    const double beta = cfg.beta > 1.0 && cfg.beta < 1.2 ? cfg.beta : 1.02;
    const std::uint64_t n = samples_for(cfg, 100000);
    const std::size_t nat = cfg.n_atoms ? cfg.n_atoms : atoms_for_beta(beta);
    const std::vector<double> ts{0.5, -0.5, 1.0, -1.0};
    std::vector<KahanSum> re(ts.size()), im(ts.size());
    for (std::uint64_t rep = 0; rep < n; ++rep) {
        Rng rng(derive_seed(cfg.seed, 0x666c7563ULL, rep));
        KahanSum z;
        double eta = 0.0;
        for (std::size_t i = 0; i < nat; ++i) {
            eta += rng.exponential();
            z.add(std::pow(eta, -beta));
        }
        const double w = z.value() + tail_mean_mass(eta, beta) - 1.0 / (beta - 1.0);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            re[k].add(std::cos(ts[k] * w));
            im[k].add(std::sin(ts[k] * w));
        }
    }
    CsvWriter csv(dir / "fluctuations.csv");
    csv.row({"beta", "t", "re_emp", "im_emp", "re_exact", "im_exact", "abs_diff", "n"});
    double worst = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        const double er = re[k].value() / static_cast<double>(n);
        const double ei = im[k].value() / static_cast<double>(n);
        // exp{it(1-gamma) - (pi/2)|t|(1 + i (2/pi) sgn(t) log|t|)}
        const double mod = std::exp(-kPi / 2.0 * std::abs(t));
        const double phase = t * (1.0 - kEulerGamma) -
                             std::abs(t) * std::copysign(1.0, t) * std::log(std::abs(t));
        const double xr = mod * std::cos(phase);
        const double xi = mod * std::sin(phase);
        const double diff = std::hypot(er - xr, ei - xi);
        worst = std::max(worst, diff);
        csv.row({fmt(beta), fmt(t), fmt(er), fmt(ei), fmt(xr), fmt(xi), fmt(diff),
                 std::to_string(n)});
    }
    summary.check("1-stable characteristic function at beta=" + fmt(beta), worst <= 0.05,
                  "max |emp - exact| = " + fmt(worst));
    return summary.all_pass ? 0 : 1;
}

}  // namespace

DecorationModel ExperimentConfig::model() const {
    if (model_kind == "PointMass") return DecorationModel::point_mass();
    if (model_kind == "ParetoPoisson") return DecorationModel::pareto_poisson(model_a, model_b);
    if (model_kind == "PowerTailDelta") return DecorationModel::power_tail_delta(model_b);
    if (model_kind == "StretchedExpDelta")
        return DecorationModel::stretched_exp_delta(model_gamma);
    throw std::invalid_argument("unknown model.kind: " + model_kind);
}

std::string ExperimentConfig::to_kv() const {
    std::ostringstream os;
    os << "experiment=" << experiment << '\n';
    os << "model.kind=" << model_kind << '\n';
    os << "model.a=" << fmt_full(model_a) << '\n';
    os << "model.b=" << fmt_full(model_b) << '\n';
    os << "model.gamma=" << fmt_full(model_gamma) << '\n';
    os << "beta_grid=";
    for (std::size_t i = 0; i < beta_grid.size(); ++i)
        os << (i ? "," : "") << fmt_full(beta_grid[i]);
    os << '\n';
    os << "beta=" << fmt_full(beta) << '\n';
    os << "beta_prime=" << fmt_full(beta_prime) << '\n';
    os << "n_samples=" << n_samples << '\n';
    os << "seed=" << seed << '\n';
    os << "trunc_tol=" << fmt_full(trunc_tol) << '\n';
    os << "n_atoms=" << n_atoms << '\n';
    os << "workers=" << workers << '\n';
    os << "quick=" << (quick ? 1 : 0) << '\n';
    os << "event_check=" << (event_check ? 1 : 0) << '\n';
    os << "bbm.t=" << fmt_full(bbm_t) << '\n';
    os << "bbm.runs=" << bbm_runs << '\n';
    os << "bbm.max_population=" << bbm_max_population << '\n';
    os << "bbm.pairs=" << bbm_pairs << '\n';
    os << "out=" << out_dir << '\n';
    return os.str();
}

ExperimentConfig ExperimentConfig::parse_kv(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got: " + line);
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "experiment") cfg.experiment = val;
        else if (key == "model.kind") cfg.model_kind = val;
        else if (key == "model.a") cfg.model_a = std::stod(val);
        else if (key == "model.b") cfg.model_b = std::stod(val);
        else if (key == "model.gamma") cfg.model_gamma = std::stod(val);
        else if (key == "beta_grid") {
            cfg.beta_grid.clear();
            std::istringstream gs(val);
            std::string tok;
            while (std::getline(gs, tok, ','))
                if (!tok.empty()) cfg.beta_grid.push_back(std::stod(tok));
        }
        else if (key == "beta") cfg.beta = std::stod(val);
        else if (key == "beta_prime") cfg.beta_prime = std::stod(val);
        else if (key == "n_samples") cfg.n_samples = std::stoull(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "trunc_tol") cfg.trunc_tol = std::stod(val);
        else if (key == "n_atoms") cfg.n_atoms = std::stoull(val);
        else if (key == "workers") cfg.workers = std::stoi(val);
        else if (key == "quick") cfg.quick = val == "1" || val == "true";
        else if (key == "event_check") cfg.event_check = val == "1" || val == "true";
        else if (key == "bbm.t") cfg.bbm_t = std::stod(val);
        else if (key == "bbm.runs") cfg.bbm_runs = std::stoull(val);
        else if (key == "bbm.max_population") cfg.bbm_max_population = std::stoull(val);
        else if (key == "bbm.pairs") cfg.bbm_pairs = std::stoull(val);
        else if (key == "out") cfg.out_dir = val;
        else throw std::invalid_argument("config: unknown key: " + key);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_kv(os.str());
}

int run_experiment(const ExperimentConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    {
        nlohmann::json manifest;
        manifest["experiment"] = cfg.experiment;
        manifest["seed"] = cfg.seed;
        manifest["version"] = "0.1.0";
        nlohmann::json kv;
        std::istringstream is(cfg.to_kv());
        std::string line;
        while (std::getline(is, line)) {
            const auto eq = line.find('=');
            if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
        manifest["config"] = kv;
        std::ofstream mf(dir / "manifest.json");
        mf << manifest.dump(2) << '\n';
    }
    Summary summary;
    int status = 0;
    try {
        if (cfg.experiment == "validate-exact")
            status = run_validate_exact(cfg, dir, summary);
        else if (cfg.experiment == "overlap-scan")
            status = run_overlap_scan(cfg, dir, summary);
        else if (cfg.experiment == "susceptibility")
            status = run_susceptibility(cfg, dir, summary);
        else if (cfg.experiment == "asymptotics")
            status = run_asymptotics(cfg, dir, summary);
        else if (cfg.experiment == "bbm")
            status = run_bbm(cfg, dir, summary);
        else if (cfg.experiment == "fluctuations")
            status = run_fluctuations(cfg, dir, summary);
        else {
            std::cerr << "unknown experiment: " << cfg.experiment << '\n';
            return 2;
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        err["experiment"] = cfg.experiment;
        std::ofstream ef(dir / "error.json");
        ef << err.dump(2) << '\n';
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    std::ofstream sf(dir / "summary.txt");
    sf << summary.text.str();
    std::cout << summary.text.str();
    return status;
}

}  // namespace sdppp
