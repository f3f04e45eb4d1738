#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "zmlab/config.hpp"
#include "zmlab/detail/format.hpp"
#include "zmlab/properties.hpp"
#include "zmlab/ssf.hpp"
#include "zmlab/toeplitz.hpp"
#include "zmlab/version.hpp"
#include "zmlab/zeromodes.hpp"

namespace zmlab::cli {

using detail::fmt17;
using detail::fmt_int;

struct CliOptions {
    std::filesystem::path out_dir = ".";
    int threads = 0;  // 0 = auto
    unsigned long seed = 12345;
};

class StageTimer {
  public:
    void start(const std::string& name) {
        name_ = name;
        t0_ = std::chrono::steady_clock::now();
    }
    void stop() {
        const auto dt = std::chrono::steady_clock::now() - t0_;
        if (!name_.empty())
            ms_[name_] += std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(dt).count();
        name_.clear();
    }
    const std::map<std::string, double>& timings() const { return ms_; }

  private:
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
    std::map<std::string, double> ms_;
};

class CsvFile {
  public:
    CsvFile(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file " + path.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

inline void write_report(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
}

inline nlohmann::json base_report(const std::string& command, const RunConfig& cfg,
                                  const CliOptions& opt, const StageTimer& timer) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = version_string;
    j["config_echo"] = canonical_config(cfg);
    j["threads"] = opt.threads;
    j["seed"] = opt.seed;
    j["timings_ms"] = timer.timings();
    return j;
}

// Deterministic probe set: golden-angle spiral filling the disc of radius R.
inline std::vector<Vec2> spiral_probes(double R, int n) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = R * std::sqrt((i + 0.5) / n);
        const double th = 2.399963229728653 * i;
        pts.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return pts;
}

// kernel: grid evaluation of P_b(x,x) against the two-sided bound
// (b0/2pi) e^{-+2 osc}.  Exit 3 when any value violates the bounds beyond
// 1e-4 * (b0/2pi).
inline int cmd_kernel(const RunConfig& cfg, const CliOptions& opt) {
    StageTimer timer;
    timer.start("basis");
    const MagneticField field = make_field(cfg.field);
    const ZeroModeBasis basis = make_basis(cfg, opt.threads);
    timer.stop();

    timer.start("osc");
    const OscEstimate osc = resolve_osc(cfg, field);
    timer.stop();
    const double scale = field.b0() / (2.0 * M_PI);
    const double lower = scale * std::exp(-2.0 * osc.osc);
    const double upper = scale * std::exp(2.0 * osc.osc);
    const double tol = 1e-4 * scale;

    timer.start("grid");
    const double gr = cfg.kernel.grid_radius > 0.0 ? cfg.kernel.grid_radius : basis.radius();
    const int n = cfg.kernel.grid_points;
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 x(n == 1 ? 0.0 : -gr + 2.0 * gr * i / (n - 1),
                         n == 1 ? 0.0 : -gr + 2.0 * gr * j / (n - 1));
            if (x.norm() <= basis.radius()) pts.push_back(x);
        }
    }
    long violations = 0;
    CsvFile csv(opt.out_dir / "kernel.csv");
    csv.row({"x1", "x2", "value", "lower", "upper"});
    std::vector<double> values(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        values[i] = basis.kernel_diag(pts[i]);
        if (values[i] < lower - tol || values[i] > upper + tol) ++violations;
        csv.row({fmt17(pts[i].x()), fmt17(pts[i].y()), fmt17(values[i]), fmt17(lower), fmt17(upper)});
    }
    timer.stop();

    bool trunc_checked = false, trunc_stable = true;
    double trunc_change = 0.0;
    if (cfg.basis->truncation_check && !pts.empty()) {
        timer.start("truncation");
        ZeroModeBasis::Options bo;
        bo.self_check = false;
        bo.threads = opt.threads;
        const int K2 = static_cast<int>(std::ceil(1.25 * cfg.basis->K));
        const ZeroModeBasis bigger(field, K2, bo);
        for (size_t i = 0; i < pts.size(); ++i) {
            const double v2 = bigger.kernel_diag(pts[i]);
            trunc_change = std::max(trunc_change, std::abs(v2 - values[i]) / std::max(std::abs(v2), 1e-300));
        }
        trunc_checked = true;
        trunc_stable = trunc_change < 1e-6;
        timer.stop();
    }

    nlohmann::json rep = base_report("kernel", cfg, opt, timer);
    rep["quadrature"] = {{"gram_drift", basis.gram_drift()}};
    rep["osc"] = {{"inf", osc.inf}, {"sup", osc.sup}, {"osc", osc.osc}};
    rep["bounds"] = {{"lower", lower}, {"upper", upper}, {"tolerance", tol}, {"violations", violations}};
    rep["truncation"] = {{"checked", trunc_checked}, {"stable", trunc_stable}, {"max_rel_change", trunc_change}};
    write_report(opt.out_dir / "kernel.report.json", rep);
    if (violations > 0) {
        std::cerr << "kernel: " << violations << " bound violations\n";
        return 3;
    }
    return 0;
}

// toeplitz: eigenvalues once, then counting vs the matched comparator over
// the s sweep.
inline int cmd_toeplitz(const RunConfig& cfg, const CliOptions& opt) {
    if (!cfg.symbol) throw ConfigError("toeplitz: [symbol] section required");
    if (!cfg.sweep) throw ConfigError("toeplitz: [sweep] section required");
    StageTimer timer;
    timer.start("basis");
    const MagneticField field = make_field(cfg.field);
    const ZeroModeBasis basis = make_basis(cfg, opt.threads);
    timer.stop();
    timer.start("assembly");
    const SymbolU symbol = make_symbol(*cfg.symbol);
    ToeplitzOptions topt;
    topt.threads = opt.threads;
    topt.self_check = cfg.basis->self_check;
    const ToeplitzMatrix mat = toeplitz_matrix(basis, symbol, topt);
    timer.stop();

    {
        CsvFile ev(opt.out_dir / "toeplitz_eigenvalues.csv");
        ev.row({"k", "lambda"});
        for (Eigen::Index k = 0; k < mat.eigenvalues.size(); ++k)
            ev.row({fmt_int(k), fmt17(mat.eigenvalues(k))});
    }

    const std::vector<double> sweep = sweep_values(*cfg.sweep);
    auto comparator = [&](double s) -> double {
        try {
            if (cfg.symbol->kind == "power") {
                std::vector<double> scaled = cfg.symbol->u0;
                for (double& c : scaled) c *= cfg.symbol->c1;
                return comparator_psi(s, cfg.symbol->alpha, CosineSeries(scaled), field.b0());
            }
            if (cfg.symbol->kind == "gaussian")
                return comparator_phi(s, cfg.symbol->beta, cfg.symbol->eta, field.b0());
            return comparator_phi_inf(s);
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    timer.start("sweep");
    std::vector<long> counts(sweep.size());
    CsvFile csv(opt.out_dir / "toeplitz.csv");
    csv.row({"s", "count", "comparator", "ratio"});
    for (size_t i = 0; i < sweep.size(); ++i) {
        counts[i] = counting(mat, sweep[i]);
        const double comp = comparator(sweep[i]);
        const double ratio = (std::isnan(comp) || comp == 0.0)
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(counts[i]) / comp;
        csv.row({fmt17(sweep[i]), fmt_int(counts[i]), fmt17(comp), fmt17(ratio)});
    }
    timer.stop();

    bool trunc_checked = false, trunc_stable = true;
    std::vector<bool> row_stable(sweep.size(), true);
    if (cfg.basis->truncation_check) {
        timer.start("truncation");
        ZeroModeBasis::Options bo;
        bo.self_check = false;
        bo.threads = opt.threads;
        const ZeroModeBasis bigger(field, static_cast<int>(std::ceil(1.25 * cfg.basis->K)), bo);
        ToeplitzOptions topt2;
        topt2.threads = opt.threads;
        topt2.self_check = false;
        const ToeplitzMatrix mat2 = toeplitz_matrix(bigger, symbol, topt2);
        for (size_t i = 0; i < sweep.size(); ++i) {
            row_stable[i] = counting(mat2, sweep[i]) == counts[i];
            trunc_stable = trunc_stable && row_stable[i];
        }
        trunc_checked = true;
        timer.stop();
    }

    nlohmann::json rep = base_report("toeplitz", cfg, opt, timer);
    rep["quadrature"] = {{"gram_drift", basis.gram_drift()}, {"symbol_drift", mat.quadrature_residual}};
    rep["truncation"] = {{"checked", trunc_checked}, {"stable", trunc_stable},
                         {"rows_stable", row_stable}};
    write_report(opt.out_dir / "toeplitz.report.json", rep);
    return 0;
}

// ssf: per-energy corridor table.  Columns are the effective corridor
// endpoints; the theorems' O(1) remainders are not added.
inline int cmd_ssf(const RunConfig& cfg, const CliOptions& opt) {
    if (!cfg.perturbation) throw ConfigError("ssf: [perturbation] section required");
    if (!cfg.sweep) throw ConfigError("ssf: [sweep] section required");
    StageTimer timer;
    timer.start("basis");
    const MagneticField field = make_field(cfg.field);
    const ZeroModeBasis basis = make_basis(cfg, opt.threads);
    timer.stop();
    timer.start("assembly");
    const PerturbationProfile profile = make_profile(*cfg.perturbation);
    ToeplitzOptions topt;
    topt.threads = opt.threads;
    topt.self_check = cfg.basis->self_check;
    const EffectiveModel model(basis, profile, topt);
    const EffectiveSpectrum spectrum = model.spectrum();
    timer.stop();

    const Sign sign = cfg.run.sign >= 0 ? Sign::plus : Sign::minus;
    const std::vector<double> sweep = sweep_values(*cfg.sweep);
    const double sgn = cfg.run.sign >= 0 ? 1.0 : -1.0;

    timer.start("sweep");
    double worst_trace = 0.0;
    CsvFile csv(opt.out_dir / "ssf.csv");
    csv.row({"E", "below_lo", "below_hi", "above_lo", "above_hi", "tilde", "semiclassical"});
    for (const double E : sweep) {
        const Eigen::VectorXd nu = model.block_spectrum(E);
        const double trace_gap = std::abs(nu.sum() - spectrum.mu.sum()) /
                                 std::max(std::abs(spectrum.mu.sum()), 1e-300);
        worst_trace = std::max(worst_trace, trace_gap);
        const SsfCorridor c = make_corridor(spectrum, nu, E, cfg.run.epsilon, sign);
        const double tilde = xi_above_tilde(spectrum, E, sign);
        const double semi = sgn * xi_semiclassical(profile, E, field.b0());
        csv.row({fmt17(E), fmt17(c.below_lo), fmt17(c.below_hi), fmt17(c.above_lo), fmt17(c.above_hi),
                 fmt17(tilde), fmt17(semi)});
    }
    timer.stop();

    nlohmann::json rep = base_report("ssf", cfg, opt, timer);
    rep["quadrature"] = {{"gram_drift", basis.gram_drift()},
                         {"symbol_drift", model.transverse_matrix().quadrature_residual}};
    rep["trace_identity"] = {{"worst_rel_gap", worst_trace}, {"tolerance", 1e-10}};
    write_report(opt.out_dir / "ssf.report.json", rep);
    if (worst_trace > 1e-10) {
        std::cerr << "ssf: trace identity violated, rel gap " << worst_trace << "\n";
        return 3;
    }
    return 0;
}

// levinson: ratio trend table plus the predicted limit.
inline int cmd_levinson(const RunConfig& cfg, const CliOptions& opt) {
    if (!cfg.perturbation) throw ConfigError("levinson: [perturbation] section required");
    if (!cfg.sweep) throw ConfigError("levinson: [sweep] section required");
    StageTimer timer;
    timer.start("basis");
    const MagneticField field = make_field(cfg.field);
    const ZeroModeBasis basis = make_basis(cfg, opt.threads);
    timer.stop();
    timer.start("assembly");
    const PerturbationProfile profile = make_profile(*cfg.perturbation);
    ToeplitzOptions topt;
    topt.threads = opt.threads;
    topt.self_check = cfg.basis->self_check;
    const EffectiveModel model(basis, profile, topt);
    timer.stop();

    std::vector<double> sweep = sweep_values(*cfg.sweep);
    if (sweep.size() > 1 && sweep.front() < sweep.back()) std::reverse(sweep.begin(), sweep.end());

    timer.start("sweep");
    // eps -> 0 reference endpoints
    const LevinsonResult res = levinson_ratio(model, sweep, 1e-6);
    timer.stop();

    long flagged = 0;
    CsvFile csv(opt.out_dir / "levinson.csv");
    csv.row({"E", "ratio"});
    for (const auto& row : res.rows) {
        if (row.flagged) ++flagged;
        csv.row({fmt17(row.E), fmt17(row.ratio)});
    }
    double last_ratio = std::numeric_limits<double>::quiet_NaN();
    for (auto it = res.rows.rbegin(); it != res.rows.rend(); ++it)
        if (!it->flagged) {
            last_ratio = it->ratio;
            break;
        }
    const double rel_gap = std::abs(last_ratio - res.predicted) / res.predicted;

    nlohmann::json rep = base_report("levinson", cfg, opt, timer);
    rep["quadrature"] = {{"gram_drift", basis.gram_drift()},
                         {"symbol_drift", model.transverse_matrix().quadrature_residual}};
    rep["summary"] = {{"predicted", res.predicted},
                      {"last_ratio", last_ratio},
                      {"relative_gap", rel_gap},
                      {"flagged_rows", flagged}};
    write_report(opt.out_dir / "levinson.report.json", rep);
    std::cout << "levinson: predicted " << fmt17(res.predicted) << ", last ratio " << fmt17(last_ratio)
              << ", relative gap " << fmt17(rel_gap) << "\n";
    if (flagged > 0)
        std::cerr << "levinson: " << flagged << " rows with zero counting denominator (E too large)\n";
    return 0;
}

// ids: constant-field integrated density of states over the energy sweep.
inline int cmd_ids(const RunConfig& cfg, const CliOptions& opt) {
    if (!cfg.sweep) throw ConfigError("ids: [sweep] section required");
    StageTimer timer;
    timer.start("sweep");
    const MagneticField field = make_field(cfg.field);
    const std::vector<double> sweep = sweep_values(*cfg.sweep);
    CsvFile csv(opt.out_dir / "ids.csv");
    csv.row({"E", "value", "at_landau_level"});
    for (const double E : sweep) {
        const IdsValue v = ids_constant_field(E, field.b0());
        csv.row({fmt17(E), fmt17(v.value), v.at_landau_level ? "1" : "0"});
    }
    timer.stop();
    nlohmann::json rep = base_report("ids", cfg, opt, timer);
    write_report(opt.out_dir / "ids.report.json", rep);
    return 0;
}

// selfcheck: the run-time verification battery.  Exit 2 on the first level
// of failure, with each failing check named.
inline int cmd_selfcheck(const RunConfig& cfg, const CliOptions& opt) {
    StageTimer timer;
    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Check> checks;
    auto add = [&checks](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
    };

    const MagneticField field = make_field(cfg.field);
    std::optional<ZeroModeBasis> basis;

    timer.start("basis");
    try {
        basis.emplace(make_basis(cfg, opt.threads));
        add("gram-doubled-node", true, "drift " + fmt17(basis->gram_drift()));
    } catch (const ConvergenceFailure& e) {
        add("gram-doubled-node", false, e.what());
    }
    timer.stop();

    if (basis) {
        timer.start("whiten");
        const int K = basis->K();
        const Eigen::MatrixXcd resid = basis->whiten() * basis->gram() * basis->whiten() -
                                       Eigen::MatrixXcd::Identity(K, K);
        const double rel = resid.norm() / std::sqrt(static_cast<double>(K));
        add("whiten-identity", rel < 1e-10, "relative Frobenius residual " + fmt17(rel));
        timer.stop();

        timer.start("gram-bounds");
        const OscEstimate osc = resolve_osc(cfg, field);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(basis->gram(), Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(K - 1);
        const bool bounds_ok = lo >= std::exp(-2.0 * osc.sup) - 1e-6 && hi <= std::exp(-2.0 * osc.inf) + 1e-6;
        add("gram-eigenvalue-bounds", bounds_ok,
            "spectrum [" + fmt17(lo) + ", " + fmt17(hi) + "] vs [" + fmt17(std::exp(-2.0 * osc.sup)) +
                ", " + fmt17(std::exp(-2.0 * osc.inf)) + "]");
        timer.stop();

        timer.start("truncation");
        ZeroModeBasis::Options bo;
        bo.self_check = false;
        bo.threads = opt.threads;
        const ZeroModeBasis bigger(field, static_cast<int>(std::ceil(1.25 * K)), bo);
        double change = 0.0;
        for (const Vec2& x : spiral_probes(basis->radius(), 32)) {
            const double a = basis->kernel_diag(x), b = bigger.kernel_diag(x);
            change = std::max(change, std::abs(a - b) / std::max(std::abs(b), 1e-300));
        }
        add("kernel-truncation", change < 1e-6, "max relative change " + fmt17(change));
        timer.stop();

        if (cfg.symbol) {
            timer.start("toeplitz");
            try {
                ToeplitzOptions topt;
                topt.threads = opt.threads;
                const ToeplitzMatrix mat = toeplitz_matrix(*basis, make_symbol(*cfg.symbol), topt);
                add("toeplitz-doubled-node", true, "drift " + fmt17(mat.quadrature_residual));
                if (!field.constant()) {
                    ZeroModeBasis::Options b0opt;
                    b0opt.threads = opt.threads;
                    const ZeroModeBasis flat(MagneticField(field.b0()), K, b0opt);
                    const ToeplitzMatrix mat0 = toeplitz_matrix(flat, make_symbol(*cfg.symbol), topt);
                    const OscEstimate osc2 = resolve_osc(cfg, field);
                    bool ok = true;
                    long bad = 0;
                    for (int i = 0; i < 20; ++i) {
                        const double s = 0.5 * std::pow(10.0, -3.0 * i / 19.0);
                        const SandwichResult r = sandwich_counts(mat.eigenvalues, mat0.eigenvalues, s, osc2.osc);
                        if (!r.ok) {
                            ok = false;
                            ++bad;
                        }
                    }
                    add("sandwich", ok, ok ? "20 thresholds ordered" : fmt_int(bad) + " rows violated");
                }
            } catch (const SupportExceedsRadius& e) {
                add("toeplitz-doubled-node", false, std::string("support-exceeds-radius: ") + e.what());
            } catch (const ConvergenceFailure& e) {
                add("toeplitz-doubled-node", false, e.what());
            }
            timer.stop();
        }

        if (cfg.perturbation) {
            timer.start("trace");
            try {
                ToeplitzOptions topt;
                topt.threads = opt.threads;
                const EffectiveModel model(*basis, make_profile(*cfg.perturbation), topt);
                const double mu_sum = model.spectrum().mu.sum();
                const double nu_sum = model.block_spectrum(1e-4).sum();
                const double gap = std::abs(nu_sum - mu_sum) / std::max(std::abs(mu_sum), 1e-300);
                add("trace-equality", gap < 1e-10, "relative gap " + fmt17(gap));
            } catch (const SupportExceedsRadius& e) {
                add("trace-equality", false, std::string("support-exceeds-radius: ") + e.what());
            } catch (const ConvergenceFailure& e) {
                add("trace-equality", false, e.what());
            }
            timer.stop();
        }
    }

    timer.start("properties");
    const long dual_fail = duality_trials(opt.seed, 200);
    add("counting-duality", dual_fail == 0, fmt_int(dual_fail) + " failures in 200 trials");
    const long weyl_fail = weyl_trials(opt.seed + 1, 200);
    add("weyl-inequality", weyl_fail == 0, fmt_int(weyl_fail) + " failures in 200 trials");
    timer.stop();

    bool all_pass = true;
    {
        std::ofstream txt(opt.out_dir / "selfcheck.txt", std::ios::binary);
        for (const auto& c : checks) {
            all_pass = all_pass && c.pass;
            txt << c.name << ": " << (c.pass ? "pass" : "fail") << " (" << c.detail << ")\n";
            std::cout << c.name << ": " << (c.pass ? "pass" : "fail") << " (" << c.detail << ")\n";
        }
    }
    nlohmann::json rep = base_report("selfcheck", cfg, opt, timer);
    nlohmann::json jc = nlohmann::json::array();
    for (const auto& c : checks) jc.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    rep["checks"] = jc;
    rep["all_pass"] = all_pass;
    write_report(opt.out_dir / "selfcheck.report.json", rep);
    return all_pass ? 0 : 2;
}

}  // namespace zmlab::cli
