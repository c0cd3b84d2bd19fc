#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

using namespace sis;
using namespace sis::testing;

namespace {

FiberVector vec(std::initializer_list<Complex> entries) {
    Eigen::VectorXcd v(static_cast<int>(entries.size()));
    int i = 0;
    for (Complex z : entries) v(i++) = z;
    return {0, std::move(v)};
}

FiberMatrix mat(std::initializer_list<Complex> column) {
    Eigen::MatrixXcd m(static_cast<int>(column.size()), 1);
    int i = 0;
    for (Complex z : column) m(i++, 0) = z;
    return {0, std::move(m)};
}

}  // namespace

TEST_CASE("translate modulates fibers") {
    const auto s = eval_chi({{rat(0), rat(1)}}, 4, 2);
    SUBCASE("theta = 1/2 multiplies the omega = 1/2 entry by -i") {
        const auto t = translate(s, 0.5);
        const Complex expected = std::polar(1.0, -std::numbers::pi / 2.0);  // e^{-i pi/2}
        CHECK(std::abs(t.value(2, 0) - expected * s.value(2, 0)) < 1e-15);
    }
    SUBCASE("theta = 0 is the identity, bit for bit") {
        CHECK(translate(s, 0.0) == s);
    }
    SUBCASE("theta = 1 then -1 round trips") {
        const auto round = translate(translate(s, 1.0), -1.0);
        for (std::size_t i = 0; i < round.values().size(); ++i) {
            CHECK(std::abs(round.values()[i] - s.values()[i]) < 1e-15);
        }
    }
}

TEST_CASE("fiber residual of pinned pairs") {
    SUBCASE("orthogonal unit vectors") {
        const auto r = fiber_residual(vec({{0, 0}, {1, 0}}), mat({{1, 0}, {0, 0}}), 1e-12);
        CHECK(r.residual == doctest::Approx(1.0));
    }
    SUBCASE("contained vector") {
        const auto r = fiber_residual(vec({{1, 0}, {0, 0}}), mat({{1, 0}, {0, 0}}), 1e-12);
        CHECK(r.residual == doctest::Approx(0.0));
        CHECK(std::abs(r.coefficients(0) - Complex{1.0, 0.0}) < 1e-14);
    }
    SUBCASE("orthogonal pair (1,1) vs (1,-1)") {
        const auto r = fiber_residual(vec({{1, 0}, {1, 0}}), mat({{1, 0}, {-1, 0}}), 1e-12);
        CHECK(r.residual == doctest::Approx(1.0));
    }
    SUBCASE("zero target counts as contained") {
        const auto r = fiber_residual(vec({{0, 0}, {0, 0}}), mat({{1, 0}, {0, 0}}), 1e-12);
        CHECK(r.residual == 0.0);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(fiber_residual(vec({{1, 0}}), mat({{1, 0}, {0, 0}}), 1e-12),
                        std::invalid_argument);
    }
}

TEST_CASE("invariance oracle on pinned families") {
    const FrequencyGrid grid(256, 16);
    SUBCASE("two-cell indicator: exact member at n = 2, orthogonal at n = 4") {
        const std::vector<SampledSpectrum> phi = {
            eval_chi({{rat(0), rat(1)}, {rat(2), rat(3)}}, 256, 16)};
        const InvarianceVerdict v2 = invariance_oracle(phi, 2, grid, 1e-6);
        CHECK(v2.invariant);
        CHECK(v2.max_residual <= 1e-10);
        const InvarianceVerdict v4 = invariance_oracle(phi, 4, grid, 1e-6);
        CHECK_FALSE(v4.invariant);
        CHECK(v4.max_residual == doctest::Approx(1.0));
    }
    SUBCASE("singleton fibers are modulation eigenvectors") {
        const std::vector<SampledSpectrum> phi = {eval_chi({{rat(0), rat(1)}}, 256, 16)};
        const InvarianceVerdict v = invariance_oracle(phi, 5, grid, 1e-6);
        CHECK(v.invariant);
        CHECK(v.max_residual <= 1e-12);
    }
}

TEST_CASE("box generator fails the oracle decisively off the integer cells") {
    // For the box, the half-shift residual has the closed form |sin(pi w)|:
    // the fiber is proportional to (1/(w+k))_k, its half-shift modulation flips
    // alternate signs, and the two classical series
    //   sum 1/(w+k)^2 = pi^2/sin^2(pi w),  sum (-1)^k/(w+k)^2 = pi^2 cos(pi w)/sin^2(pi w)
    // give residual^2 = 1 - cos^2(pi w).
    const FrequencyGrid grid(512, 16);
    const std::vector<SampledSpectrum> phi = {evaluate(GeneratorSpec::bspline(0), grid)};
    const OracleProfile profile = invariance_oracle_profile(phi, 2, grid, 1e-6);
    CHECK_FALSE(profile.verdict.invariant);
    CHECK(profile.verdict.max_residual > 0.99);  // attained near w = 1/2
    for (int i : {1, 16, 128, 256, 400}) {
        const double expected = std::abs(std::sin(std::numbers::pi * grid.omega(i)));
        CHECK(profile.residuals[i] == doctest::Approx(expected).epsilon(0.03));
    }
    CHECK(profile.residuals[1] == doctest::Approx(0.0061359).epsilon(0.05));
}

TEST_CASE("oracle verdicts agree with rank-sum verdicts on random families") {
    std::mt19937_64 rng(404);
    const FrequencyGrid grid(kSweepGridM, kSweepGridK);
    for (int trial = 0; trial < 15; ++trial) {
        const RandomFamily family = random_family(rng);
        std::vector<SampledSpectrum> phi;
        for (const auto& g : family.generators) phi.push_back(evaluate(g, grid));
        for (int n = 2; n <= 4; ++n) {
            const bool by_rank = rank_sum_test(phi, n, grid, 1e-8).invariant;
            const bool by_oracle = invariance_oracle(phi, n, grid, 1e-6).invariant;
            CHECK(by_rank == by_oracle);
        }
    }
}

TEST_CASE("oracle divisor property") {
    const FrequencyGrid grid(48, 8);
    // supports in cells congruent mod 6: invariant at 6 and at its divisors
    const std::vector<SampledSpectrum> phi = {
        eval_chi({{rat(0), rat(1)}, {rat(6), rat(7)}}, 48, 8)};
    REQUIRE(invariance_oracle(phi, 6, grid, 1e-6).invariant);
    CHECK(invariance_oracle(phi, 2, grid, 1e-6).invariant);
    CHECK(invariance_oracle(phi, 3, grid, 1e-6).invariant);
}

TEST_CASE("residuals are unchanged by unit-modulus rescaling") {
    const FrequencyGrid grid(64, 8);
    const auto base = eval_chi({{rat(0), rat(1)}, {rat(2), rat(3)}}, 64, 8);
    const auto rotated =
        eval_chi({{rat(0), rat(1)}, {rat(2), rat(3)}}, 64, 8, std::polar(1.0, 1.234));
    for (int n : {2, 3, 4}) {
        const auto a = invariance_oracle({base}, n, grid, 1e-6);
        const auto b = invariance_oracle({rotated}, n, grid, 1e-6);
        CHECK(a.max_residual == doctest::Approx(b.max_residual).epsilon(1e-12));
    }
}

TEST_CASE("projection coefficients rebuild member fibers") {
    const FrequencyGrid grid(64, 8);
    const std::vector<SampledSpectrum> phi = {
        eval_chi({{rat(0), rat(1)}, {rat(2), rat(3)}}, 64, 8),
        eval_chi({{rat(1), rat(2)}}, 64, 8, {0.0, 2.0}),
    };
    const auto translated = translate(phi[0], 0.5);
    for (int i = 0; i < grid.base_size(); ++i) {
        const FiberMatrix basis = fiber_matrix(phi, i);
        const FiberVector target = fiber(translated, i);
        const auto projection = fiber_residual(target, basis, 1e-12);
        REQUIRE(projection.residual <= 1e-10);
        const Eigen::VectorXcd rebuilt = basis.columns * projection.coefficients;
        CHECK((rebuilt - target.entries).norm() <= 1e-10 * std::max(target.entries.norm(), 1.0));
    }
}

TEST_CASE("refined membership") {
    const FrequencyGrid grid(64, 8);
    const auto g = eval_chi({{rat(0), rat(1)}}, 64, 8);
    const auto f = eval_chi({{rat(0), rat(2)}}, 64, 8);
    SUBCASE("integer translates cannot reach the half-support function") {
        const MembershipVerdict v = refined_membership(g, f, 1, 1e-6);
        CHECK_FALSE(v.member);
        CHECK(v.max_residual == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-9));
    }
    SUBCASE("half-integer translates reach it with a periodic multiplier") {
        const MembershipVerdict v = refined_membership(g, f, 2, 1e-6);
        CHECK(v.member);
        CHECK(v.max_residual <= 1e-10);
        for (int i = 0; i < grid.base_size(); ++i) {
            CHECK(std::abs(v.coefficients[i][0] - Complex{1.0, 0.0}) < 1e-12);
            CHECK(std::abs(v.coefficients[i][1]) < 1e-12);
        }
    }
    SUBCASE("identity membership at any modulus") {
        for (int n : {1, 2, 5}) {
            const MembershipVerdict v = refined_membership(f, f, n, 1e-6);
            CHECK(v.member);
            CHECK(v.max_residual <= 1e-13);
        }
    }
    SUBCASE("window too small") {
        CHECK_THROWS_AS(refined_membership(g, f, 9, 1e-6), std::invalid_argument);
    }
    SUBCASE("grids must match") {
        CHECK_THROWS_AS(refined_membership(g, eval_chi({{rat(0), rat(2)}}, 32, 8), 2, 1e-6),
                        std::invalid_argument);
    }
}
