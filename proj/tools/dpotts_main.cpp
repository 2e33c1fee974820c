// Command-line front end: simulate / analyze / bounds / verify.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpotts/dpotts.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

int cmd_bounds(const std::vector<int>& ds) {
    std::printf("%4s  %12s  %12s\n", "d", "p_hb", "p_upper");
    for (int d : ds) {
        const dpotts::BoundReport r = dpotts::bound_report(d);
        std::printf("%4d  %12.6f  %12.6f\n", r.d, r.p_hb, r.p_upper);
    }
    std::printf("\nself-consistency of the hashing values, p(n^2+n) >= p(n)(1 + 1/n - 1/n^2):\n");
    for (int n : {2, 3, 5}) {
        const auto sc = dpotts::self_consistency([](int d) { return dpotts::hashing_bound(d); }, n);
        std::printf("  n=%d: p(%d)=%.6f >= %.6f  margin=%+.6f  %s\n", sc.n, n * n + n, sc.lhs,
                    sc.rhs, sc.margin, sc.pass ? "pass" : "FAIL");
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& store_dir) {
    const dpotts::CampaignConfig cfg = dpotts::parse_config_file(config_path);
    std::fprintf(stderr, "campaign: d=%d, %zu p values, %zu sizes, %d samples each, t_eq=2^%d, %d workers\n",
                 cfg.d, cfg.p.size(), cfg.L.size(), cfg.n_samples, cfg.b,
                 dpotts::resolve_workers(cfg.workers));
    const auto progress = [](double p, int L, int done, int total) {
        if (done == total || done % 50 == 0)
            std::fprintf(stderr, "  p=%.4f L=%-3d %d/%d samples\n", p, L, done, total);
    };
    const dpotts::ResultStore store = dpotts::run_campaign(cfg, progress);
    dpotts::save_store(store, store_dir);
    long long failed = 0;
    for (const auto& [key, set] : store.sets)
        for (const auto& s : set.samples)
            if (!s.ok) ++failed;
    if (failed > 0) std::fprintf(stderr, "warning: %lld sample(s) failed and were skipped\n", failed);
    std::printf("store written to %s\n", store_dir.c_str());
    return 0;
}

int cmd_analyze(const std::string& store_dir, const std::vector<double>& p_grid,
                const std::string& out_dir, int resamples) {
    const dpotts::ResultStore store = dpotts::load_store(store_dir);
    const dpotts::ThresholdAnalysis an =
        dpotts::analyze(store, resamples, p_grid.empty() ? nullptr : &p_grid);
    std::cout << dpotts::analysis_table(an);
    const std::string dir = out_dir.empty() ? store_dir : out_dir;
    dpotts::write_analysis(an, dir);
    std::fprintf(stderr, "plot data written to %s\n", dir.c_str());
    return 0;
}

int cmd_verify(int d, int L, double p, double beta, uint64_t seed, int b) {
    const dpotts::VerifyReport r = dpotts::verify_bruteforce(d, L, p, beta, seed, 1LL << b);
    std::printf("exact enumeration over %lld states (d=%d, L=%d, p=%g, beta=%g, seed=%llu)\n",
                r.exact.states, r.d, r.L, r.p, r.beta,
                static_cast<unsigned long long>(r.seed));
    std::printf("%-10s %16s %16s %12s %8s\n", "observable", "exact", "monte-carlo", "se", "z");
    std::printf("%-10s %16.8f %16.8f %12.3g %8.2f\n", "energy", r.exact.energy, r.mc_e, r.mc_e_se,
                r.z_e);
    std::printf("%-10s %16.8f %16.8f %12.3g %8.2f\n", "chi(0)", r.exact.chi0, r.mc_chi0,
                r.mc_chi0_se, r.z_chi0);
    std::printf("%-10s %16.8f %16.8f %12.3g %8.2f\n", "chi(kmin)", r.exact.chik, r.mc_chik,
                r.mc_chik_se, r.z_chik);
    const bool ok = std::fabs(r.z_e) <= 3.0 && std::fabs(r.z_chi0) <= 3.0 && std::fabs(r.z_chik) <= 3.0;
    std::printf("verdict: %s (|z| <= 3)\n", ok ? "consistent" : "INCONSISTENT");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disordered-Potts Monte Carlo for qudit toric-code error thresholds"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "run a campaign from a config file");
    std::string config_path, store_dir = "store";
    sim->add_option("--config", config_path, "campaign config file")->required();
    sim->add_option("--store", store_dir, "output store directory");

    auto* ana = app.add_subcommand("analyze", "finite-size-scaling analysis of a store");
    std::string ana_store, ana_out;
    std::vector<double> p_grid;
    int resamples = 500;
    ana->add_option("--store", ana_store, "store directory")->required();
    ana->add_option("--p-grid", p_grid, "only analyze these p values")->delimiter(',');
    ana->add_option("--out", ana_out, "directory for plot data (default: the store)");
    ana->add_option("--resamples", resamples, "bootstrap resamplings");

    auto* bnd = app.add_subcommand("bounds", "hashing bound and analytic threshold bounds");
    std::vector<int> ds{2, 3, 4, 6, 10};
    bnd->add_option("--d", ds, "qudit dimensions")->delimiter(',');

    auto* ver = app.add_subcommand("verify", "exact enumeration vs Monte Carlo on a small lattice");
    int v_d = 2, v_L = 2, v_b = 14;
    double v_p = 0.0, v_beta = 1.0;
    uint64_t v_seed = 1;
    ver->add_option("--d", v_d, "qudit dimension")->required();
    ver->add_option("--L", v_L, "linear size")->required();
    ver->add_option("--p", v_p, "error rate")->required();
    ver->add_option("--beta", v_beta, "inverse temperature")->required();
    ver->add_option("--seed", v_seed, "disorder seed");
    ver->add_option("--b", v_b, "equilibration exponent, t_eq = 2^b");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, store_dir);
        if (ana->parsed()) return cmd_analyze(ana_store, p_grid, ana_out, resamples);
        if (bnd->parsed()) return cmd_bounds(ds);
        if (ver->parsed()) return cmd_verify(v_d, v_L, v_p, v_beta, v_seed, v_b);
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "validation error: %s\n", ex.what());
        return kExitValidation;
    } catch (const std::bad_alloc&) {
        std::fprintf(stderr, "resource error: out of memory\n");
        return kExitResource;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
