// Command-line driver: sampling, field evaluation, trajectories, variance
// profiles, verification and the Monte Carlo experiment suite.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "jacobimax/config.hpp"
#include "jacobimax/extremes.hpp"
#include "jacobimax/io.hpp"
#include "jacobimax/oracle.hpp"
#include "jacobimax/recursion.hpp"
#include "jacobimax/regimes.hpp"
#include "jacobimax/variance.hpp"
#include "jacobimax/verify.hpp"

using nlohmann::json;
using namespace jacobimax;

namespace {

const char* kUsage =
    "usage: jacobimax <subcommand> [--config <path>] [--seed N] [--threads N] [--out <path>]\n"
    "                 [--set key=value ...]\n"
    "subcommands: sample eval trajectory profile verify extremes barrier diagnose\n";

json config_json(const ExperimentConfig& cfg) {
    json j;
    std::istringstream iss(cfg.resolved_text());
    std::string line;
    while (std::getline(iss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = line.substr(0, eq);
        auto val = line.substr(eq + 1);
        key.erase(key.find_last_not_of(' ') + 1);
        val.erase(0, val.find_first_not_of(' '));
        j[key] = val;
    }
    return j;
}

void emit_json(const ExperimentConfig& cfg, const json& body) {
    json out = body;
    out["config"] = config_json(cfg);
    const std::string text = out.dump(2) + "\n";
    std::cout << text;
    if (!cfg.out.empty()) write_file(cfg.out, text);
}

int cmd_sample(const ExperimentConfig& cfg) {
    const auto spec = cfg.ensemble_spec();
    const std::size_t n = cfg.n_values.front();
    CsvWriter csv(cfg.out, cfg, "stream_id,k,b,a");
    for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
        const auto c = sample_ensemble(spec, n, {cfg.seed, r});
        for (std::size_t k = 1; k <= n; ++k)
            csv.row(r, k, c.b[k - 1], k < n ? format_double(c.a[k - 1]) : std::string());
    }
    if (cfg.out.empty()) std::cout << csv.str();
    return 0;
}

int cmd_eval(const ExperimentConfig& cfg) {
    const auto spec = cfg.ensemble_spec();
    const std::size_t n = cfg.n_values.front();
    EvalNet net;
    if (cfg.net == "chebyshev") {
        std::size_t degree = n;
        if (2 * degree + 1 > cfg.net_max_points && cfg.net_max_points >= 3)
            degree = (cfg.net_max_points - 1) / 2;
        net = chebyshev_net(degree, cfg.eta);
    } else {
        net = uniform_net(cfg.uniform_count, cfg.eta);
    }
    CsvWriter csv(cfg.out, cfg, "stream_id,z,log_abs_p,sign,centered");
    for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
        const auto c = sample_ensemble(spec, n, {cfg.seed, r});
        for (const auto& res : eval_grid(c, net.points))
            csv.row(r, res.z, res.log_abs_p, res.sign, res.centered);
    }
    if (cfg.out.empty()) std::cout << csv.str();
    return 0;
}

int cmd_trajectory(const ExperimentConfig& cfg) {
    const auto spec = cfg.ensemble_spec();
    const std::size_t n = cfg.n_values.front();
    const double z = cfg.z_values.front();
    const auto sched = build_schedule(z, n, cfg.kappa, cfg.delta, cfg.eta);
    const auto coeffs = sample_ensemble(spec, n, {cfg.seed, 0});
    TrajectoryOptions opt;
    opt.stride = cfg.stride;
    opt.moments = CoefficientMoments{spec.noise_variance()};
    const auto traj = conjugated_trajectory(coeffs, sched, opt);
    CsvWriter csv(cfg.out, cfg, "k,psi,W,zeta,log_norm_Y,M");
    for (const auto& p : traj.checkpoints) csv.row(p.k, p.psi, p.W, p.zeta, p.log_norm_Y, p.M);
    if (cfg.out.empty()) std::cout << csv.str();
    return traj.valid ? 0 : 3;
}

int cmd_profile(const ExperimentConfig& cfg) {
    const auto spec = cfg.ensemble_spec();
    const std::size_t n = cfg.n_values.front();
    const double z = cfg.z_values.front();
    const auto sched = build_schedule(z, n, cfg.kappa, cfg.delta, cfg.eta);
    const auto prof = build_profile(sched, CoefficientMoments{spec.noise_variance()});
    CsvWriter csv(cfg.out, cfg, "k,sigma2,Sigma2,hat_sigma2,hat_Sigma2");
    for (std::size_t k = 1; k <= n; ++k)
        csv.row(k, prof.sigma2[k - 1], prof.Sigma2[k - 1], prof.hat_sigma2[k - 1],
                prof.hat_Sigma2[k - 1]);
    if (cfg.out.empty()) {
        std::cout << csv.str();
        std::cout << "t,n_t\n";
        for (std::size_t t = 1; t <= prof.T_z; ++t)
            std::cout << t << "," << prof.time_change[t - 1] << "\n";
    } else {
        CsvWriter times(sibling_path(cfg.out, "times"), cfg, "t,n_t");
        for (std::size_t t = 1; t <= prof.T_z; ++t) times.row(t, prof.time_change[t - 1]);
    }
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
    const auto rep = run_verification(cfg.seed);
    json body;
    body["checks"] = json::array();
    for (const auto& c : rep.checks) {
        std::printf("%-55s max_error=%-12.3e tol=%-9.1e %s\n", c.name.c_str(), c.max_error,
                    c.tolerance, c.pass ? "PASS" : "FAIL");
        body["checks"].push_back(
            {{"name", c.name}, {"max_error", c.max_error}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    }
    body["all_pass"] = rep.all_pass();
    if (!cfg.out.empty()) {
        body["config"] = config_json(cfg);
        write_file(cfg.out, body.dump(2) + "\n");
    }
    return rep.all_pass() ? 0 : 1;
}

int cmd_extremes(const ExperimentConfig& cfg) {
    ExperimentPlan plan;
    plan.spec = cfg.ensemble_spec();
    plan.n_values = cfg.n_values;
    plan.replicas = cfg.replicas;
    plan.net_kind = cfg.net == "uniform" ? NetKind::Uniform : NetKind::Chebyshev;
    plan.net_max_points = cfg.net_max_points;
    plan.uniform_count = cfg.uniform_count;
    plan.eta = cfg.eta;
    plan.master_seed = cfg.seed;
    const auto records = run_experiment(plan);

    CsvWriter csv(cfg.out, cfg, "n,beta,stream_id,max_centered,argmax_z,runtime_ms");
    for (const auto& r : records)
        csv.row(r.n, r.beta_or_v, r.stream_id, r.max_centered, r.argmax_z, r.runtime_ms);
    if (cfg.out.empty()) std::cout << csv.str();

    json body;
    if (cfg.n_values.size() >= 3) {
        const auto fit = fit_leading(records);
        body["fit"] = {{"slope_logn", fit.slope_logn},
                       {"slope_loglogn", fit.slope_loglogn},
                       {"intercept", fit.intercept},
                       {"stderr_logn", fit.stderr_logn},
                       {"stderr_loglogn", fit.stderr_loglogn},
                       {"stderr_intercept", fit.stderr_intercept},
                       {"groups", fit.groups}};
        body["config"] = config_json(cfg);
        std::cout << body.dump(2) << "\n";
        if (!cfg.out.empty()) write_file(sibling_path(cfg.out, "fit"), body.dump(2) + "\n");
    }
    return 0;
}

// Per-z schedule + profile cache for the barrier and covariance commands.
struct ZContext {
    RegimeSchedule sched;
    VarianceProfile prof;
};

ZContext make_zcontext(double z, std::size_t n, const ExperimentConfig& cfg, double v) {
    ZContext c{build_schedule(z, n, cfg.kappa, cfg.delta, cfg.eta), {}};
    c.prof = build_profile(c.sched, CoefficientMoments{v});
    return c;
}

int cmd_barrier(const ExperimentConfig& cfg) {
    const auto spec = cfg.ensemble_spec();
    const double v = spec.noise_variance();
    const std::size_t n = cfg.n_values.front();
    EvalNet net = cfg.net == "chebyshev"
                      ? chebyshev_net(std::min<std::size_t>((cfg.net_max_points - 1) / 2, n), cfg.eta)
                      : uniform_net(cfg.uniform_count, cfg.eta);
    std::vector<ZContext> ctx;
    for (double z : net.points) ctx.push_back(make_zcontext(z, n, cfg, v));

    std::vector<std::vector<TimeChangedField>> runs(cfg.replicas);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(cfg.replicas); ++r) {
        const auto coeffs = sample_ensemble(spec, n, {cfg.seed, static_cast<std::uint64_t>(r)});
        auto& fields = runs[r];
        fields.resize(net.points.size());
        for (std::size_t iz = 0; iz < net.points.size(); ++iz) {
            TrajectoryOptions opt;
            opt.stride = n;  // only probes are needed
            opt.probes.assign(ctx[iz].prof.time_change.begin(), ctx[iz].prof.time_change.end());
            opt.moments = CoefficientMoments{v};
            const auto traj = conjugated_trajectory(coeffs, ctx[iz].sched, opt);
            fields[iz].z = net.points[iz];
            fields[iz].T_z = ctx[iz].prof.T_z;
            fields[iz].psi_t = traj.probe_psi;
        }
    }
    const auto rep = barrier_scan(runs, cfg.barrier_C, cfg.barrier_q, n, v);
    json body;
    body["barrier"] = {{"C", rep.C},
                       {"q", rep.q},
                       {"replicas", rep.replicas},
                       {"times_tested", rep.times_tested},
                       {"crossings", rep.crossings},
                       {"crossing_fraction", rep.crossing_fraction},
                       {"worst_excess", rep.worst_excess}};
    json zt = json::array();
    for (std::size_t iz = 0; iz < rep.z_values.size(); ++iz) {
        json row = {{"z", rep.z_values[iz]}, {"worst_excess_by_t", json::array()}};
        for (double e : rep.worst_excess_zt[iz])
            row["worst_excess_by_t"].push_back(e <= -1e300 ? json() : json(e));
        zt.push_back(row);
    }
    body["barrier"]["per_z"] = zt;
    emit_json(cfg, body);
    return 0;
}

int cmd_diagnose(const ExperimentConfig& cfg) {
    const auto spec = cfg.ensemble_spec();
    const double v = spec.noise_variance();
    const std::size_t n = cfg.n_values.front();
    const double z = cfg.z_values.front();
    json body;

    const auto ctx = make_zcontext(z, n, cfg, v);

    // Good-block fractions pooled over replicas.
    {
        std::size_t good_h = 0, tot_h = 0, good_e = 0, tot_e = 0;
        json per_index = json::array();
        std::map<long, std::pair<std::size_t, std::size_t>> by_index;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(cfg.replicas); ++r) {
            const auto coeffs = sample_ensemble(spec, n, {cfg.seed, static_cast<std::uint64_t>(r)});
            TrajectoryOptions opt;
            opt.stride = 1;
            opt.moments = CoefficientMoments{v};
            const auto traj = conjugated_trajectory(coeffs, ctx.sched, opt);
            const auto flags = good_block_flags(traj, ctx.sched, cfg.block_r, cfg.block_delta_exponent);
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                for (const auto& f : flags.hyperbolic) {
                    ++tot_h;
                    if (f.good) ++good_h;
                }
                for (const auto& f : flags.elliptic) {
                    ++tot_e;
                    if (f.good) ++good_e;
                    auto& e = by_index[f.index];
                    ++e.second;
                    if (f.good) ++e.first;
                }
            }
        }
        for (const auto& [idx, gc] : by_index)
            per_index.push_back({{"index", idx},
                                 {"good", gc.first},
                                 {"total", gc.second},
                                 {"fraction", static_cast<double>(gc.first) / gc.second}});
        body["good_blocks"] = {
            {"hyperbolic_good", good_h},          {"hyperbolic_total", tot_h},
            {"elliptic_good", good_e},            {"elliptic_total", tot_e},
            {"elliptic_fraction_by_index", per_index}};
    }

    // Per-block ratio of the aligned-phase variance to the approximate profile.
    {
        json ratios = json::array();
        for (std::size_t j = 0; j + 1 < ctx.sched.kb.size(); ++j) {
            const long i = ctx.sched.j_lo + static_cast<long>(j);
            KahanSum disp, cyc, hat;
            for (std::size_t k = std::max(ctx.sched.kb[j], ctx.sched.k0 + ctx.sched.ell0 + 1);
                 k < ctx.sched.kb[j + 1]; ++k) {
                const auto f = noise_functionals(k, z, n, CoefficientMoments{v});
                disp.add(f.sigma2_display);
                cyc.add(f.sigma2_cycle);
                hat.add(v / (4.0 * static_cast<double>(k - ctx.sched.k0)));
            }
            if (hat.value() > 0.0)
                ratios.push_back({{"index", i},
                                  {"display_over_hat", disp.value() / hat.value()},
                                  {"cycle_over_hat", cyc.value() / hat.value()}});
        }
        body["elliptic_sigma2_block_ratios"] = ratios;
    }

    // Anticoncentration frequency.
    body["anticoncentration"] = {
        {"delta", cfg.anti_delta},
        {"frequency", anticoncentration_check(spec, n, z, cfg.anti_delta, cfg.replicas, cfg.seed)}};

    // Field covariance at two clock times.
    {
        const std::size_t ns = ctx.prof.n_of(cfg.cov_s), nt = ctx.prof.n_of(cfg.cov_t);
        std::vector<double> ps(cfg.replicas), pt(cfg.replicas);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(cfg.replicas); ++r) {
            const auto coeffs = sample_ensemble(spec, n, {cfg.seed + 1, static_cast<std::uint64_t>(r)});
            TrajectoryOptions opt;
            opt.stride = n;
            opt.probes = {std::min(ns, nt), std::max(ns, nt)};
            opt.moments = CoefficientMoments{v};
            const auto traj = conjugated_trajectory(coeffs, ctx.sched, opt);
            ps[r] = traj.probe_psi[ns <= nt ? 0 : 1];
            pt[r] = traj.probe_psi[ns <= nt ? 1 : 0];
        }
        const auto res = field_covariance(ps, pt);
        body["field_covariance"] = {{"s", cfg.cov_s},       {"t", cfg.cov_t},
                                    {"n_s", ns},            {"n_t", nt},
                                    {"covariance", res.covariance},
                                    {"var_s", res.var_s},   {"var_t", res.var_t},
                                    {"replicas", res.replicas},
                                    {"low_replica_warning", res.low_replica_warning}};
    }

    // Deterministic tail product.
    {
        const auto tp = deterministic_tail_product(z, n, cfg.tail_delta);
        body["tail_product"] = {{"delta", cfg.tail_delta},
                                {"k", tp.k},
                                {"op_norm", tp.op_norm},
                                {"entry_error", tp.entry_error}};
    }

    // Decorrelation of restarted fields for the first two z values.
    if (cfg.z_values.size() >= 2) {
        const double z2 = cfg.z_values[1];
        const auto ctx2 = make_zcontext(z2, n, cfg, v);
        const auto w1 = truncation_window(ctx.prof, cfg.epsilon);
        const auto w2 = truncation_window(ctx2.prof, cfg.epsilon);
        const bool disjoint = w1.last < w2.first || w2.last < w1.first;
        json dec = {{"z1", z}, {"z2", z2}, {"epsilon", cfg.epsilon},
                    {"window1", {w1.first, w1.last}}, {"window2", {w2.first, w2.last}},
                    {"disjoint", disjoint}};
        if (disjoint) {
            std::vector<double> f1(cfg.replicas), f2(cfg.replicas);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
            for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(cfg.replicas); ++r) {
                const auto coeffs =
                    sample_ensemble(spec, n, {cfg.seed + 2, static_cast<std::uint64_t>(r)});
                f1[r] = truncated_field(coeffs, ctx.sched, ctx.prof, cfg.epsilon);
                f2[r] = truncated_field(coeffs, ctx2.sched, ctx2.prof, cfg.epsilon);
            }
            const auto res = field_covariance(f1, f2);
            const double corr = res.covariance / std::sqrt(res.var_s * res.var_t);
            dec["correlation"] = corr;
            dec["band_4sigma"] = 4.0 / std::sqrt(static_cast<double>(cfg.replicas));
        }
        body["decorrelation"] = dec;
    }

    emit_json(cfg, body);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << kUsage;
        return 2;
    }
    const std::string command = argv[1];
    std::string config_path;
    std::map<std::string, std::string> overrides;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        auto need_value = [&](const char* flag) -> std::string {
            if (i + 1 >= argc) {
                throw ConfigError(std::string("missing value for ") + flag);
            }
            return argv[++i];
        };
        try {
            if (arg == "--config") config_path = need_value("--config");
            else if (arg == "--seed") overrides["seed"] = need_value("--seed");
            else if (arg == "--threads") overrides["threads"] = need_value("--threads");
            else if (arg == "--out") overrides["out"] = need_value("--out");
            else if (arg == "--set") {
                const std::string kv = need_value("--set");
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw ConfigError("--set expects key=value");
                overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
            } else {
                std::cerr << "unknown flag '" << arg << "'\n" << kUsage;
                return 2;
            }
        } catch (const ConfigError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    try {
        ExperimentConfig cfg =
            config_path.empty() ? ExperimentConfig{} : parse_config_file(config_path);
        cfg.command = command;
        for (const auto& [k, val] : overrides) apply_override(cfg, k, val);
        cfg.validate();
#ifdef _OPENMP
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
        if (command == "sample") return cmd_sample(cfg);
        if (command == "eval") return cmd_eval(cfg);
        if (command == "trajectory") return cmd_trajectory(cfg);
        if (command == "profile") return cmd_profile(cfg);
        if (command == "verify") return cmd_verify(cfg);
        if (command == "extremes") return cmd_extremes(cfg);
        if (command == "barrier") return cmd_barrier(cfg);
        if (command == "diagnose") return cmd_diagnose(cfg);
        std::cerr << "unknown subcommand '" << command << "'\n" << kUsage;
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const SamplingError& e) {
        std::cerr << "sampling error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
