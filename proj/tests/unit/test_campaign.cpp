#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpotts/campaign.hpp"

using namespace dpotts;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

CampaignConfig tiny_config() {
    CampaignConfig cfg;
    cfg.d = 3;
    cfg.p = {0.0, 0.10};
    cfg.L = {4, 6};
    cfg.n_samples = 3;
    cfg.b = 8;
    cfg.t_min = 0.7;
    cfg.t_max = 1.3;
    cfg.n_temps = 6;
    cfg.seed = 11;
    cfg.measure_every = 2;
    cfg.workers = 2;
    return cfg;
}

// Synthetic chi pair whose xi_L/L equals y.
ChiTerms chi_for_ratio(double y, int L) {
    const double s = 2.0 * std::sin(M_PI / L) * y * L;
    return {1.0 + s * s, 1.0};
}

}  // namespace

TEST_CASE("config echo round-trips every field") {
    const CampaignConfig cfg = tiny_config();
    std::istringstream in(echo_config(cfg));
    const CampaignConfig back = parse_config(in);
    CHECK(back.d == cfg.d);
    CHECK(back.p == cfg.p);
    CHECK(back.L == cfg.L);
    CHECK(back.n_samples == cfg.n_samples);
    CHECK(back.b == cfg.b);
    CHECK(back.t_min == cfg.t_min);
    CHECK(back.t_max == cfg.t_max);
    CHECK(back.n_temps == cfg.n_temps);
    CHECK(back.seed == cfg.seed);
    CHECK(back.measure_every == cfg.measure_every);
    CHECK(back.workers == cfg.workers);
    CHECK(echo_config(back) == echo_config(cfg));
}

TEST_CASE("config parser rejects malformed input") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("d = 3\np = 0.1\nL = 8\nbogus_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("d = 3\np = 0.9\nL = 8\n"), std::invalid_argument);   // p > (d-1)/d
    CHECK_THROWS_AS(parse("d = 3\np = 0.1\nL = 1\n"), std::invalid_argument);   // L < 2
    CHECK_THROWS_AS(parse("d = 3\np = 0.1\nL = 8\nt_min = 2\nt_max = 1\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse("d = 3\np = abc\nL = 8\n"), std::invalid_argument);
    // comments and blank lines are fine
    CHECK_NOTHROW(parse("# campaign\nd = 3\n\np = 0.1 # inline\nL = 8\n"));
}

TEST_CASE("campaign run is deterministic and worker-count independent") {
    CampaignConfig cfg = tiny_config();
    const ResultStore a = run_campaign(cfg);
    const ResultStore b = run_campaign(cfg);
    cfg.workers = 1;
    const ResultStore c = run_campaign(cfg);

    namespace fs = std::filesystem;
    const fs::path tmp = fs::temp_directory_path() / "dpotts_test_store";
    fs::remove_all(tmp);
    save_store(a, (tmp / "a").string());
    save_store(b, (tmp / "b").string());
    save_store(c, (tmp / "c").string());

    for (const char* name : {"records_p0.000000_L4.tsv", "records_p0.100000_L6.tsv"}) {
        const std::string fa = slurp(tmp / "a" / name);
        CHECK(fa == slurp(tmp / "b" / name));
        CHECK(fa == slurp(tmp / "c" / name));
        CHECK(!fa.empty());
    }
    fs::remove_all(tmp);
}

TEST_CASE("store save/load round trip") {
    const ResultStore store = run_campaign(tiny_config());
    namespace fs = std::filesystem;
    const fs::path tmp = fs::temp_directory_path() / "dpotts_test_roundtrip";
    fs::remove_all(tmp);
    save_store(store, tmp.string());
    const ResultStore back = load_store(tmp.string());

    CHECK(echo_config(back.config) == echo_config(store.config));
    REQUIRE(back.sets.size() == store.sets.size());
    for (const auto& [key, set] : store.sets) {
        REQUIRE(back.sets.count(key) == 1);
        const RecordSet& rs = back.sets.at(key);
        REQUIRE(rs.samples.size() == set.samples.size());
        CHECK(rs.temperatures == set.temperatures);
        CHECK(rs.verdicts == set.verdicts);
        for (size_t i = 0; i < set.samples.size(); ++i) {
            CHECK(rs.samples[i].seed == set.samples[i].seed);
            REQUIRE(rs.samples[i].temps.size() == set.samples[i].temps.size());
            for (size_t t = 0; t < set.samples[i].temps.size(); ++t) {
                CHECK(rs.samples[i].temps[t].e_mean == set.samples[i].temps[t].e_mean);
                CHECK(rs.samples[i].temps[t].chi0_mean == set.samples[i].temps[t].chi0_mean);
                CHECK(rs.samples[i].temps[t].bins_e.size() ==
                      set.samples[i].temps[t].bins_e.size());
            }
        }
    }

    // byte-identical re-serialization
    const fs::path tmp2 = fs::temp_directory_path() / "dpotts_test_roundtrip2";
    fs::remove_all(tmp2);
    save_store(back, tmp2.string());
    for (const auto& entry : fs::directory_iterator(tmp)) {
        const auto name = entry.path().filename();
        CHECK(slurp(entry.path()) == slurp(tmp2 / name));
    }
    fs::remove_all(tmp);
    fs::remove_all(tmp2);
}

TEST_CASE("equilibration flags mark a planted drifting sample") {
    RecordSet set;
    set.p = 0.1;
    set.L = 4;
    set.temperatures = {0.8};
    set.n_bins = 6;
    set.t_eq = 64;
    auto make_sample = [&](int id, bool drift) {
        SampleRecord s;
        s.sample_id = id;
        s.seed = id;
        TempRecord t;
        t.t_index = 0;
        for (int b = 0; b < 6; ++b) {
            const double base = drift ? 10.0 + 3.0 * b : 10.0 + 0.01 * ((id * 7 + b) % 5);
            t.bins_e.push_back({1LL << b, base, 0.01});
            t.bins_chi0.push_back({1LL << b, 5.0 + 0.01 * ((id + b) % 3), 0.01});
            t.bins_chik.push_back({1LL << b, 2.0 + 0.01 * ((id * 2 + b) % 3), 0.01});
        }
        t.e_mean = 10;
        t.chi0_mean = 5;
        t.chik_mean = 2;
        s.temps.push_back(t);
        return s;
    };
    for (int i = 0; i < 8; ++i) set.samples.push_back(make_sample(i, false));
    set.samples.push_back(make_sample(8, true));
    detail::flag_equilibration(set);
    REQUIRE(set.verdicts.size() == 9);
    CHECK(set.verdicts[8] == Equilibration::fail);
    for (int i = 0; i < 8; ++i) CHECK(set.verdicts[i] == Equilibration::pass);
}

TEST_CASE("a single sample cannot be judged and is not excluded") {
    RecordSet set;
    set.p = 0.0;
    set.L = 4;
    set.temperatures = {0.8};
    SampleRecord s;
    s.sample_id = 0;
    TempRecord t;
    for (int b = 0; b < 5; ++b) t.bins_e.push_back({1LL << b, 1.0 * b, 0.0});
    t.bins_chi0 = t.bins_e;
    t.bins_chik = t.bins_e;
    s.temps.push_back(t);
    set.samples.push_back(s);
    detail::flag_equilibration(set);
    CHECK(set.verdicts[0] == Equilibration::indeterminate);
    int excluded = 0;
    detail::size_data_from_set(set, &excluded);
    CHECK(excluded == 0);
}

TEST_CASE("analysis on a synthetic store recovers the planted critical point") {
    // build a store by hand: three sizes, exact curves crossing at t0
    const double t0 = 1.05;
    ResultStore store;
    store.config = tiny_config();
    store.config.p = {0.05};
    store.config.L = {4, 6, 8};
    const auto grid = build_grid(0.8, 1.3, 10);

    for (int L : store.config.L) {
        RecordSet set;
        set.p = 0.05;
        set.L = L;
        set.temperatures = grid.T;
        set.t_eq = 16;
        set.n_bins = 4;
        const double slope = 0.3 * L;
        for (int s = 0; s < 5; ++s) {
            SampleRecord rec;
            rec.sample_id = s;
            rec.seed = s;
            for (int t = 0; t < grid.size(); ++t) {
                TempRecord tr;
                tr.t_index = t;
                tr.n_meas = 16;
                const ChiTerms chi = chi_for_ratio(0.6 - slope * (grid.T[t] - t0), L);
                tr.chi0_mean = chi.chi0;
                tr.chik_mean = chi.chik;
                tr.e_mean = -2.0 * L * L * 0.5;
                rec.temps.push_back(tr);
            }
            set.samples.push_back(rec);
        }
        store.sets[{0.05, L}] = std::move(set);
    }

    const ThresholdAnalysis an = analyze(store, 50);
    REQUIRE(an.per_p.size() == 1);
    REQUIRE(an.per_p[0].has_tc);
    CHECK(an.per_p[0].T_c == Catch::Approx(t0).margin(1e-8));
    CHECK(an.per_p[0].T_c_se == Catch::Approx(0.0).margin(1e-10));
    REQUIRE(an.per_p[0].crossings.size() == 2);

    // identical inputs give identical outputs
    const ThresholdAnalysis an2 = analyze(store, 50);
    CHECK(analysis_table(an) == analysis_table(an2));
    CHECK(an2.per_p[0].T_c == an.per_p[0].T_c);
    CHECK(an2.per_p[0].T_c_se == an.per_p[0].T_c_se);
}

TEST_CASE("brute-force verification at beta = 0") {
    // <E> at infinite temperature is -(2 L^2)/d exactly
    for (auto [d, L] : {std::pair{2, 2}, {3, 2}, {2, 3}}) {
        const auto rep = verify_bruteforce(d, L, 0.2, 0.0, 7, 1 << 12);
        CHECK(rep.exact.energy == Catch::Approx(-2.0 * L * L / d).margin(1e-9));
        CHECK(std::fabs(rep.z_e) < 4.0);
        CHECK(std::fabs(rep.z_chi0) < 4.0);
        CHECK(std::fabs(rep.z_chik) < 4.0);
    }
}

TEST_CASE("brute-force verification on a small disordered qutrit system") {
    const auto rep = verify_bruteforce(3, 2, 0.15, 1.0, 99, 1 << 13);
    CHECK(rep.exact.states == 81);
    INFO("z_e=" << rep.z_e << " z_chi0=" << rep.z_chi0 << " z_chik=" << rep.z_chik);
    CHECK(std::fabs(rep.z_e) < 4.0);
    CHECK(std::fabs(rep.z_chi0) < 4.0);
    CHECK(std::fabs(rep.z_chik) < 4.0);
    CHECK_THROWS_AS(verify_bruteforce(10, 4, 0.1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("worker count resolution honors the environment override") {
    unsetenv("DPOTTS_WORKERS");
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
    setenv("DPOTTS_WORKERS", "5", 1);
    CHECK(resolve_workers(3) == 5);
    setenv("DPOTTS_WORKERS", "junk", 1);
    CHECK(resolve_workers(3) == 3);
    unsetenv("DPOTTS_WORKERS");
}

TEST_CASE("pure-model correlation ratio swings from ordered to disordered") {
    // xi_L/L of the clean d=3 model over the main schedule window: well above
    // 1 at the cold end, small at the hot end
    CampaignConfig cfg;
    cfg.d = 3;
    cfg.p = {0.0};
    cfg.L = {8, 12};
    cfg.n_samples = 2;
    cfg.b = 12;
    cfg.t_min = 0.60;
    cfg.t_max = 1.40;
    cfg.n_temps = 16;
    cfg.seed = 606;
    cfg.workers = 2;
    const ResultStore store = run_campaign(cfg);
    const ThresholdAnalysis an = analyze(store, 20);
    REQUIRE(an.per_p.size() == 1);
    REQUIRE(an.per_p[0].curves.size() == 2);
    for (const auto& curve : an.per_p[0].curves) {
        REQUIRE(curve.T.size() >= 4);
        INFO("L=" << curve.L << " cold " << curve.y.front() << " hot " << curve.y.back());
        CHECK(curve.y.front() > 1.0);   // T = 0.60, deep in the ordered phase
        CHECK(curve.y.back() < 0.5);    // T = 1.40, disordered
    }
    // crossing near the self-dual point
    REQUIRE(an.per_p[0].has_tc);
    CHECK(an.per_p[0].T_c > 0.90);
    CHECK(an.per_p[0].T_c < 1.10);
}

TEST_CASE("excluding flagged samples changes membership, not payloads") {
    const ResultStore store = run_campaign(tiny_config());
    for (const auto& [key, set] : store.sets) {
        RecordSet copy = set;
        // force-flag one sample and confirm only aggregation membership moves
        if (copy.samples.size() < 2) continue;
        copy.verdicts.assign(copy.samples.size(), Equilibration::pass);
        copy.verdicts[0] = Equilibration::fail;
        int excluded = 0;
        const SizeData sd = detail::size_data_from_set(copy, &excluded);
        CHECK(excluded == 1);
        CHECK(sd.samples.size() == copy.samples.size() - 1);
        // payloads untouched
        for (size_t i = 0; i < copy.samples.size(); ++i)
            CHECK(copy.samples[i].seed == set.samples[i].seed);
    }
}
