#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "progbayes/errors.hpp"
#include "progbayes/trial_data.hpp"

#include "../oracles.hpp"

using namespace progbayes;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "progbayes_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_file(const std::string& name, const std::string& body) {
    const auto path = temp_file(name);
    std::ofstream out(path);
    out << body;
    return path;
}

std::string what_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE_BEGIN("trial_data");

TEST_CASE("from_columns validates the invariants") {
    CHECK_NOTHROW(TrialData::from_columns({1, 2, 3, 4}, {0, 1, 0, 1}, {0.1, 0.2, 0.3, 0.4}));
    // Too short.
    CHECK_THROWS_AS(TrialData::from_columns({1, 2, 3}, {0, 1, 0}, {0.1, 0.2, 0.3}), LoadError);
    // Non-binary w.
    CHECK_THROWS_AS(TrialData::from_columns({1, 2, 3, 4}, {0, 2, 0, 1}, {0.1, 0.2, 0.3, 0.4}),
                    LoadError);
    // One-arm trials.
    CHECK_THROWS_AS(TrialData::from_columns({1, 2, 3, 4}, {1, 1, 1, 1}, {0.1, 0.2, 0.3, 0.4}),
                    LoadError);
    CHECK_THROWS_AS(TrialData::from_columns({1, 2, 3, 4}, {0, 0, 0, 0}, {0.1, 0.2, 0.3, 0.4}),
                    LoadError);
    // Constant prognostic score.
    const auto msg = what_of([] {
        TrialData::from_columns({1, 2, 3, 4}, {0, 1, 0, 1}, {0.5, 0.5, 0.5, 0.5});
    });
    CHECK(msg.find("zero variance") != std::string::npos);
    // Non-finite values.
    CHECK_THROWS_AS(TrialData::from_columns({1, NAN, 3, 4}, {0, 1, 0, 1}, {0.1, 0.2, 0.3, 0.4}),
                    LoadError);

    const auto data = TrialData::from_columns({1, 2, 3, 4}, {0, 1, 1, 0}, {0.1, 0.2, 0.3, 0.4});
    CHECK(data.n() == 4);
    CHECK(data.treated_count() == 2);
    CHECK(data.treated_fraction() == 0.5);
}

TEST_CASE("load_trial_csv happy path and errors") {
    const auto good = write_file("good.csv", "y,w,m\n1.0,1,0.5\n2.0,0,1.5\n0.5,1,0.7\n3.0,0,2.0\n");
    const auto data = load_trial_csv(good);
    CHECK(data.n() == 4);
    CHECK(data.treated_count() == 2);
    CHECK(data.y()[2] == 0.5);

    // subject_id column is ignored.
    const auto with_id = write_file(
        "id.csv", "subject_id,y,w,m\ns1,1.0,1,0.5\ns2,2.0,0,1.5\ns3,0.5,1,0.7\ns4,3.0,0,2.0\n");
    CHECK(load_trial_csv(with_id).n() == 4);

    // w = 2 in data row 3.
    const auto bad_w =
        write_file("badw.csv", "y,w,m\n1.0,1,0.5\n2.0,0,1.5\n0.5,2,0.7\n3.0,0,2.0\n");
    const auto msg = what_of([&] { load_trial_csv(bad_w); });
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("'w'") != std::string::npos);

    // Constant m.
    const auto flat_m =
        write_file("flatm.csv", "y,w,m\n1.0,1,0.5\n2.0,0,0.5\n0.5,1,0.5\n3.0,0,0.5\n");
    const auto msg2 = what_of([&] { load_trial_csv(flat_m); });
    CHECK(msg2.find("zero variance") != std::string::npos);

    // Missing column.
    const auto no_m = write_file("nom.csv", "y,w\n1.0,1\n2.0,0\n0.5,1\n3.0,0\n");
    CHECK(what_of([&] { load_trial_csv(no_m); }).find("'m'") != std::string::npos);

    // Unknown column.
    const auto extra = write_file("extra.csv", "y,w,m,zzz\n1.0,1,0.5,9\n");
    CHECK(what_of([&] { load_trial_csv(extra); }).find("zzz") != std::string::npos);

    // Non-numeric cell names the row and column.
    const auto bad_y =
        write_file("bady.csv", "y,w,m\n1.0,1,0.5\noops,0,1.5\n0.5,1,0.7\n3.0,0,2.0\n");
    const auto msg3 = what_of([&] { load_trial_csv(bad_y); });
    CHECK(msg3.find("row 2") != std::string::npos);
    CHECK(msg3.find("'y'") != std::string::npos);

    CHECK_THROWS_AS(load_trial_csv(temp_file("missing_file.csv")), LoadError);
}

TEST_CASE("write then load round-trips exactly") {
    oracles::TestRng rng(42);
    std::vector<double> y, m;
    std::vector<int> w;
    for (int i = 0; i < 37; ++i) {
        y.push_back(rng.normal(0.3, 2.7));
        m.push_back(rng.normal(-0.1, 1.3));
        w.push_back(i % 3 == 0 ? 1 : 0);
    }
    const auto original = TrialData::from_columns(y, w, m);
    const auto path = temp_file("roundtrip.csv");
    write_trial_csv(original, path);
    const auto reloaded = load_trial_csv(path);
    REQUIRE(reloaded.n() == original.n());
    for (std::size_t i = 0; i < original.n(); ++i) {
        CHECK(reloaded.y()[i] == original.y()[i]);
        CHECK(reloaded.w()[i] == original.w()[i]);
        CHECK(reloaded.m()[i] == original.m()[i]);
    }
}

TEST_CASE("summarize matches a naive loop and known cases") {
    // y = m: arm means of y - m are zero.
    {
        const std::vector<double> m{0.4, 1.2, -0.3, 2.2, 0.8, 1.4};
        const auto data = TrialData::from_columns({0.4, 1.2, -0.3, 2.2, 0.8, 1.4},
                                                  {1, 0, 1, 0, 1, 0}, m);
        const auto s = summarize(data);
        CHECK(s.ybar_treated - s.mbar_treated == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(s.ybar_control - s.mbar_control == doctest::Approx(0.0).epsilon(1e-15));
    }
    // Constant y.
    {
        const auto data = TrialData::from_columns({7, 7, 7, 7}, {0, 1, 0, 1}, {1, 2, 3, 4});
        const auto s = summarize(data);
        CHECK(s.ybar_control == 7.0);
        CHECK(s.ybar_treated == 7.0);
    }
    // Random instance vs naive recomputation.
    {
        oracles::TestRng rng(7);
        std::vector<double> y, m;
        std::vector<int> w;
        for (int i = 0; i < 20; ++i) {
            y.push_back(rng.normal());
            m.push_back(rng.normal());
            w.push_back(rng.uniform() < 0.4 ? 1 : 0);
        }
        w[0] = 1;
        w[1] = 0;  // both arms non-empty
        const auto data = TrialData::from_columns(y, w, m);
        const auto s = summarize(data);

        double yc = 0, yt = 0, mc = 0, mt = 0, mbar = 0;
        std::size_t nc = 0, nt = 0;
        for (int i = 0; i < 20; ++i) {
            mbar += m[static_cast<std::size_t>(i)];
            if (w[static_cast<std::size_t>(i)] == 1) {
                yt += y[static_cast<std::size_t>(i)];
                mt += m[static_cast<std::size_t>(i)];
                ++nt;
            } else {
                yc += y[static_cast<std::size_t>(i)];
                mc += m[static_cast<std::size_t>(i)];
                ++nc;
            }
        }
        mbar /= 20.0;
        double s2 = 0;
        for (double v : m) s2 += (v - mbar) * (v - mbar);
        s2 /= 20.0;

        CHECK(s.ybar_control == doctest::Approx(yc / nc).epsilon(1e-14));
        CHECK(s.ybar_treated == doctest::Approx(yt / nt).epsilon(1e-14));
        CHECK(s.mbar_control == doctest::Approx(mc / nc).epsilon(1e-14));
        CHECK(s.mbar_treated == doctest::Approx(mt / nt).epsilon(1e-14));
        CHECK(s.mbar == doctest::Approx(mbar).epsilon(1e-14));
        CHECK(s.s2_m == doctest::Approx(s2).epsilon(1e-14));
        CHECK(s.n_control == nc);
        CHECK(s.n_treated == nt);
    }
}

TEST_CASE("summarize is invariant to row order") {
    oracles::TestRng rng(11);
    std::vector<double> y, m;
    std::vector<int> w;
    for (int i = 0; i < 25; ++i) {
        y.push_back(rng.normal());
        m.push_back(rng.normal());
        w.push_back(i % 2);
    }
    const auto s1 = summarize(TrialData::from_columns(y, w, m));

    // Reverse all rows.
    std::reverse(y.begin(), y.end());
    std::reverse(w.begin(), w.end());
    std::reverse(m.begin(), m.end());
    const auto s2 = summarize(TrialData::from_columns(y, w, m));

    CHECK(s1.ybar_control == doctest::Approx(s2.ybar_control).epsilon(1e-13));
    CHECK(s1.ybar_treated == doctest::Approx(s2.ybar_treated).epsilon(1e-13));
    CHECK(s1.mbar == doctest::Approx(s2.mbar).epsilon(1e-13));
    CHECK(s1.s2_m == doctest::Approx(s2.s2_m).epsilon(1e-13));
}

TEST_CASE("load_historical_csv") {
    const auto good = write_file("hist.csv",
                                 "study_id,y,m\nA,1.0,0.5\nA,2.0,1.5\nA,0.5,0.7\n"
                                 "B,3.0,2.0\nB,2.5,2.2\nB,1.0,1.4\n");
    const auto hist = load_historical_csv(good);
    CHECK(hist.study_count() == 2);
    CHECK(hist.total_subjects() == 6);
    CHECK(hist.study(0).id == "A");
    CHECK(hist.study(0).size() == 3);

    const auto empty = write_file("hist_empty.csv", "study_id,y,m\n");
    CHECK_THROWS_AS(load_historical_csv(empty), LoadError);

    const auto singleton =
        write_file("hist_single.csv", "study_id,y,m\nA,1.0,0.5\nA,2.0,1.5\nB,3.0,2.0\n");
    const auto msg = what_of([&] { load_historical_csv(singleton); });
    CHECK(msg.find("'B'") != std::string::npos);
}

TEST_SUITE_END();
