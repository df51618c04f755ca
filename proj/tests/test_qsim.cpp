#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "qmap/qsim.hpp"

using namespace qmap;
using doctest::Approx;

namespace {

constexpr double kTol = 1e-9;

BlochVector from_array(std::array<double, 3> a) { return {a[0], a[1], a[2]}; }

std::vector<oracle::cd> amps_of(const NetworkState& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }

NetworkState fresh(int n, const BlochVector& target) {
    return NetworkState::init(n, CouplingMap::path(n), target);
}

void check_close(const BlochVector& a, const BlochVector& b, double tol = kTol) {
    CHECK(std::abs(a.x - b.x) <= tol);
    CHECK(std::abs(a.y - b.y) <= tol);
    CHECK(std::abs(a.z - b.z) <= tol);
}

int oracle_index(PauliAxis p) { return static_cast<int>(p) + 1; }

}  // namespace

TEST_SUITE("qsim") {

TEST_CASE("init at <Z>=1 gives the |0> Bloch vector") {
    auto s = fresh(1, {0, 0, 1});
    auto b = s.bloch(0);
    CHECK(std::abs(b.z - 1.0) <= kTol);
    CHECK(std::abs(b.x) <= kTol);
    CHECK(std::abs(b.y) <= kTol);
    CHECK(s.expect(PauliAxis::Z, 0) == Approx(1.0));
}

TEST_CASE("init to the even policy state on two qubits") {
    auto s = fresh(2, even_policy_state());
    const double v = 1.0 / std::sqrt(3.0);
    for (int q = 0; q < 2; ++q) check_close(s.bloch(q), {v, v, v});
    // Every pairwise correlation factorizes to 1/3; the oracle evaluates the
    // dense Pauli operator on the same amplitudes.
    auto psi = amps_of(s);
    for (PauliAxis p : kAllAxes) {
        for (PauliAxis q : kAllAxes) {
            double got = s.expect(p, 0, q, 1);
            double want = oracle::expectation(oracle::pauli_string({oracle_index(p), oracle_index(q)}), psi);
            CHECK(std::abs(got - want) <= kTol);
            CHECK(std::abs(got - 1.0 / 3.0) <= kTol);
        }
    }
}

TEST_CASE("statevector cap is enforced") {
    CHECK_THROWS_WITH_AS(NetworkState::init(21, CouplingMap::path(21), {0, 0, 1}), doctest::Contains("statevector cap"),
                         QsimError);
    CHECK_NOTHROW(NetworkState::init(4, CouplingMap::path(4), {0, 0, 1}, 4));
    CHECK_THROWS_AS(NetworkState::init(5, CouplingMap::path(5), {0, 0, 1}, 4), QsimError);
}

TEST_CASE("quarter turn about y takes <Z>=1 to <X>=1") {
    auto s = fresh(1, {0, 0, 1});
    s.apply_1q(0, {{0, 1, 0}, std::numbers::pi / 2});
    check_close(s.bloch(0), {1, 0, 0});
}

TEST_CASE("zero angle is the identity") {
    std::mt19937_64 rng(3);
    auto s = fresh(3, even_policy_state());
    s.apply_1q(1, {from_array(oracle::random_unit(rng)), 0.7});
    auto before = amps_of(s);
    s.apply_1q(2, {from_array(oracle::random_unit(rng)), 0.0});
    auto after = amps_of(s);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(std::abs(before[i] - after[i]) <= 1e-15);
}

TEST_CASE("qubit 0 is the least significant bit") {
    auto s = fresh(2, {0, 0, 1});
    s.apply_1q(0, {{1, 0, 0}, std::numbers::pi});
    CHECK(std::norm(s.amplitudes()[1]) == Approx(1.0));
    CHECK(s.expect(PauliAxis::Z, 0) == Approx(-1.0));
    CHECK(s.expect(PauliAxis::Z, 1) == Approx(1.0));
}

TEST_CASE("single-qubit gates match the dense rotation oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    for (int n = 1; n <= 3; ++n) {
        auto s = NetworkState::init(n, CouplingMap::path(n), {0, 0, 1});
        auto psi = amps_of(s);
        for (int step = 0; step < 20; ++step) {
            int q = static_cast<int>(rng() % static_cast<unsigned>(n));
            auto axis = oracle::random_unit(rng);
            double theta = ang(rng);
            s.apply_1q(q, {from_array(axis), theta});
            psi = oracle::apply(oracle::embed_1q(oracle::rotation(axis[0], axis[1], axis[2], theta), q, n), psi);
            if (n > 1 && step % 3 == 2) {
                int j = q == 0 ? 1 : q - 1;
                s.apply_cz(j, q);
                psi = oracle::apply(oracle::cz(j, q, n), psi);
            }
        }
        auto got = amps_of(s);
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - psi[i]) <= 1e-9);
    }
}

TEST_CASE("Bloch vector rotates as the axis-angle rotation") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        auto s = fresh(2, from_array(oracle::random_unit(rng)));
        s.apply_1q(1, {from_array(oracle::random_unit(rng)), 1.1});
        s.apply_cz(0, 1);
        BlochVector before = s.bloch(0);
        auto axis = from_array(oracle::random_unit(rng));
        double angle = 0.1 * t;
        s.apply_1q(0, {axis, angle});
        check_close(s.bloch(0), rotate(before, axis, angle));
        CHECK(std::abs(s.bloch(0).norm() - before.norm()) <= kTol);
    }
}

TEST_CASE("entangled qubit with Bloch norm 0.5 keeps it under rotations") {
    // |+> on qubit 0 and a qubit 1 tilted so <Z_1> = 0.5; after cz the
    // reduced Bloch vector of qubit 0 is (0.5, 0, 0).
    auto s = fresh(2, {0, 0, 1});
    s.apply_1q(0, {{0, 1, 0}, std::numbers::pi / 2});
    s.apply_1q(1, {{0, 1, 0}, std::acos(0.5)});
    s.apply_cz(0, 1);
    CHECK(s.bloch(0).norm() == Approx(0.5).epsilon(1e-12));
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        s.apply_1q(0, {from_array(oracle::random_unit(rng)), 0.37 * i});
        CHECK(std::abs(s.bloch(0).norm() - 0.5) <= kTol);
    }
}

TEST_CASE("non-unit rotation axis is rejected") {
    auto s = fresh(1, {0, 0, 1});
    CHECK_THROWS_AS(s.apply_1q(0, {{1, 1, 0}, 0.3}), QsimError);
    CHECK_THROWS_AS(s.apply_1q(1, {{1, 0, 0}, 0.3}), QsimError);
}

TEST_CASE("cz on <X>=1 inputs builds the war state") {
    auto s = fresh(2, {1, 0, 0});
    s.apply_cz(0, 1);
    CHECK(s.expect(PauliAxis::X, 0, PauliAxis::Z, 1) == Approx(1.0));
    CHECK(s.expect(PauliAxis::Z, 0, PauliAxis::X, 1) == Approx(1.0));
    for (int q = 0; q < 2; ++q) CHECK(s.bloch(q).norm() <= kTol);
    // Sign convention checked against the dense oracle: X Z * Z X = Y Y, so
    // the cz-built state has <YY> = +1.
    double yy = s.expect(PauliAxis::Y, 0, PauliAxis::Y, 1);
    CHECK(yy == Approx(oracle::expectation(oracle::pauli_string({2, 2}), amps_of(s))));
    CHECK(yy == Approx(1.0));
}

TEST_CASE("cz leaves |00> unchanged, is symmetric and self-inverse") {
    auto zero = fresh(2, {0, 0, 1});
    auto before = amps_of(zero);
    zero.apply_cz(0, 1);
    auto after = amps_of(zero);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(std::abs(before[i] - after[i]) <= 1e-15);

    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        auto a = NetworkState::init(3, CouplingMap::path(3), {0, 0, 1});
        for (int q = 0; q < 3; ++q) a.apply_1q(q, {from_array(oracle::random_unit(rng)), 2.0 * t + q});
        auto b = a;
        auto orig = amps_of(a);
        a.apply_cz(1, 2);
        b.apply_cz(2, 1);
        auto ta = amps_of(a), tb = amps_of(b);
        for (std::size_t i = 0; i < ta.size(); ++i) CHECK(ta[i] == tb[i]);
        a.apply_cz(1, 2);
        auto twice = amps_of(a);
        for (std::size_t i = 0; i < twice.size(); ++i) CHECK(std::abs(twice[i] - orig[i]) <= 1e-12);
    }
}

TEST_CASE("cz off the coupling map is a coupling violation") {
    auto s = fresh(3, {0, 0, 1});
    CHECK_THROWS_WITH_AS(s.apply_cz(0, 2), doctest::Contains("coupling violation"), QsimError);
    CHECK_THROWS_AS(s.apply_cz(1, 1), QsimError);
}

TEST_CASE("expect rejects duplicate indices and bad arity") {
    auto s = fresh(2, {0, 0, 1});
    std::vector<PauliTerm> dup{{PauliAxis::X, 0}, {PauliAxis::Z, 0}};
    CHECK_THROWS_AS(s.expect(dup), QsimError);
    std::vector<PauliTerm> none;
    CHECK_THROWS_AS(s.expect(none), QsimError);
    std::vector<PauliTerm> three{{PauliAxis::X, 0}, {PauliAxis::Z, 1}, {PauliAxis::Y, 0}};
    CHECK_THROWS_AS(s.expect(three), QsimError);
}

TEST_CASE("product-state correlations factorize") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 30; ++t) {
        BlochVector a = from_array(oracle::random_unit(rng));
        BlochVector b = from_array(oracle::random_unit(rng));
        auto s = NetworkState::init(2, CouplingMap::path(2), {0, 0, 1});
        s.apply_1q(0, {normalized(cross({0, 0, 1}, a)), std::acos(std::clamp(a.z, -1.0, 1.0))});
        s.apply_1q(1, {normalized(cross({0, 0, 1}, b)), std::acos(std::clamp(b.z, -1.0, 1.0))});
        for (PauliAxis p : kAllAxes)
            for (PauliAxis q : kAllAxes) CHECK(std::abs(s.expect(p, 0, q, 1) - a[p] * b[q]) <= kTol);
    }
}

TEST_CASE("expect agrees with dense Pauli matrices for n <= 3") {
    std::mt19937_64 rng(77);
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 15; ++trial) {
            auto s = NetworkState::init(n, CouplingMap::path(n), from_array(oracle::random_unit(rng)));
            for (int step = 0; step < 12; ++step) {
                int q = static_cast<int>(rng() % static_cast<unsigned>(n));
                s.apply_1q(q, {from_array(oracle::random_unit(rng)), 0.9 * step + 0.1});
                if (n > 1) s.apply_cz(q, q + 1 < n ? q + 1 : q - 1);
            }
            auto psi = amps_of(s);
            for (int j = 0; j < n; ++j) {
                for (PauliAxis p : kAllAxes) {
                    std::vector<int> ops(static_cast<std::size_t>(n), 0);
                    ops[static_cast<std::size_t>(j)] = oracle_index(p);
                    CHECK(std::abs(s.expect(p, j) - oracle::expectation(oracle::pauli_string(ops), psi)) <= kTol);
                    for (int k = 0; k < n; ++k) {
                        if (k == j) continue;
                        for (PauliAxis q : kAllAxes) {
                            auto ops2 = ops;
                            ops2[static_cast<std::size_t>(k)] = oracle_index(q);
                            double want = oracle::expectation(oracle::pauli_string(ops2), psi);
                            CHECK(std::abs(s.expect(p, j, q, k) - want) <= kTol);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("normalization survives long gate sequences") {
    std::mt19937_64 rng(101);
    auto s = NetworkState::init(6, CouplingMap::path(6), even_policy_state());
    for (int step = 0; step < 2000; ++step) {
        int q = static_cast<int>(rng() % 6);
        s.apply_1q(q, {from_array(oracle::random_unit(rng)), 0.013 * step});
        if (q < 5) s.apply_cz(q, q + 1);
    }
    CHECK(std::abs(s.norm_squared() - 1.0) <= kTol);
}

TEST_CASE("sampling a certain outcome") {
    auto s = fresh(1, {0, 0, 1});
    std::mt19937_64 rng(1);
    std::vector<PauliAxis> z{PauliAxis::Z};
    for (auto o : s.sample(z, 500, rng)) CHECK(o == 0u);

    auto x = fresh(1, {1, 0, 0});
    std::vector<PauliAxis> xs{PauliAxis::X};
    for (auto o : x.sample(xs, 500, rng)) CHECK(o == 0u);
    auto y = fresh(1, {0, 1, 0});
    std::vector<PauliAxis> ys{PauliAxis::Y};
    for (auto o : y.sample(ys, 500, rng)) CHECK(o == 0u);
}

TEST_CASE("X measurement of <Z>=1 is a fair coin") {
    auto s = fresh(1, {0, 0, 1});
    std::mt19937_64 rng(2024);
    std::vector<PauliAxis> xs{PauliAxis::X};
    auto out = s.sample(xs, 10000, rng);
    double zeros = static_cast<double>(std::count(out.begin(), out.end(), 0u)) / out.size();
    CHECK(zeros >= 0.47);
    CHECK(zeros <= 0.53);
}

TEST_CASE("sampled XZ parity of the war state") {
    auto s = fresh(2, {1, 0, 0});
    s.apply_cz(0, 1);
    std::mt19937_64 rng(8);
    std::vector<PauliAxis> setting{PauliAxis::X, PauliAxis::Z};
    auto out = s.sample(setting, 10000, rng);
    double parity = 0;
    for (auto o : out) parity += (std::popcount(o) % 2 == 0) ? 1.0 : -1.0;
    parity /= out.size();
    CHECK(parity >= 0.97);
    CHECK(parity <= 1.0);
}

TEST_CASE("sample means converge to expect") {
    std::mt19937_64 rng(55);
    auto s = NetworkState::init(3, CouplingMap::path(3), even_policy_state());
    s.apply_1q(0, {from_array(oracle::random_unit(rng)), 1.3});
    s.apply_cz(0, 1);
    s.apply_1q(2, {from_array(oracle::random_unit(rng)), 2.1});
    s.apply_cz(1, 2);
    for (PauliAxis p : kAllAxes) {
        std::vector<PauliAxis> setting(3, p);
        auto out = s.sample(setting, 40000, rng);
        for (int q = 0; q < 3; ++q) {
            double m = 0;
            for (auto o : out) m += ((o >> q) & 1u) ? -1.0 : 1.0;
            m /= out.size();
            CHECK(std::abs(m - s.expect(p, q)) <= 4.5 / std::sqrt(40000.0));
        }
    }
}

TEST_CASE("sampling is deterministic for a fixed seed") {
    auto s = fresh(3, even_policy_state());
    std::vector<PauliAxis> setting{PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
    std::mt19937_64 a(42), b(42), c(43);
    auto oa = s.sample(setting, 256, a);
    CHECK(oa == s.sample(setting, 256, b));
    CHECK(oa != s.sample(setting, 256, c));
    std::mt19937_64 d(1);
    CHECK_THROWS_AS(s.sample(setting, 0, d), QsimError);
}

TEST_CASE("coupling map parsing and validation") {
    auto c = CouplingMap::from_json_text(R"({"n": 4, "edges": [[2, 1], [0, 1], [1, 2], [3, 2]]})");
    CHECK(c.size() == 4);
    CHECK(c.edges().size() == 3);
    CHECK(c.has_edge(1, 2));
    CHECK(c.has_edge(2, 1));
    CHECK_FALSE(c.has_edge(0, 3));
    CHECK(CouplingMap::from_json_text(c.to_json_text()) == c);
    CHECK_THROWS_AS(CouplingMap::from_json_text(R"({"n": 2, "edges": [[0, 0]]})"), QsimError);
    CHECK_THROWS_AS(CouplingMap::from_json_text(R"({"n": 2, "edges": [[0, 2]]})"), QsimError);
    CHECK_THROWS_AS(CouplingMap::from_json_text(R"({"edges": []})"), QsimError);
    CHECK_THROWS_AS(CouplingMap::load("/nonexistent/map.json"), QsimError);
    // Disconnected maps load with a warning.
    auto split = CouplingMap::from_json_text(R"({"n": 4, "edges": [[0, 1], [2, 3]]})");
    CHECK_FALSE(split.is_connected());
}

TEST_CASE("bicoloring") {
    auto path = CouplingMap::path(7);
    auto colors = path.bicoloring();
    REQUIRE(colors.size() == 7);
    for (int q = 0; q < 7; ++q) CHECK(colors[static_cast<std::size_t>(q)] == q % 2);
    CHECK_FALSE(CouplingMap::ring(8).bicoloring().empty());
    CHECK(CouplingMap::ring(5).bicoloring().empty());
}

TEST_CASE("shipped coupling maps are connected and bipartite") {
    for (const char* name : {"path3", "path7", "ring8", "tree9", "tree11", "heavyhex15"}) {
        CAPTURE(name);
        auto c = CouplingMap::load(std::string(QMAP_DATA_DIR) + "/coupling/" + name + ".json");
        CHECK(c.is_connected());
        CHECK_FALSE(c.bicoloring().empty());
        CHECK(c.size() <= kDefaultQubitCap);
    }
}

}  // TEST_SUITE
