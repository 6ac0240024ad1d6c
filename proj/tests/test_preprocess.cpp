#include "itcr/preprocess.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace itcr;

namespace {

Matrix column(std::initializer_list<double> v)
{
    Matrix a(static_cast<Index>(v.size()), 1);
    Index i = 0;
    for (double x : v) {
        a(i++, 0) = x;
    }
    return a;
}

} // namespace

TEST_CASE("normalize_predictors")
{
    SUBCASE("mean-relative values")
    {
        const auto n = normalize_predictors(column({2, 4, 6}));
        CHECK(n.values(0, 0) == doctest::Approx(-0.5));
        CHECK(n.values(1, 0) == doctest::Approx(0.0));
        CHECK(n.values(2, 0) == doctest::Approx(0.5));
        CHECK(n.guard_log.empty());
    }
    SUBCASE("constant column")
    {
        const auto n = normalize_predictors(column({5, 5, 5}));
        CHECK(n.values.isZero());
    }
    SUBCASE("zero mean falls back to divisor 1")
    {
        const auto n = normalize_predictors(column({-1, 1}));
        CHECK(n.values(0, 0) == -1.0);
        CHECK(n.values(1, 0) == 1.0);
        REQUIRE(n.guard_log.size() == 1);
        CHECK(n.guard_log[0].predictor == 0);
    }
    SUBCASE("negative mean keeps orientation")
    {
        const auto n = normalize_predictors(column({-2, -4, -6}));
        CHECK(n.values(0, 0) == doctest::Approx(0.5));
        CHECK(n.values(2, 0) == doctest::Approx(-0.5));
    }
    SUBCASE("all-zero column warns")
    {
        const auto n = normalize_predictors(column({0, 0, 0}));
        CHECK(n.values.isZero());
        CHECK_FALSE(n.warnings.empty());
    }
    SUBCASE("column sums vanish")
    {
        Rng rng(3);
        Matrix a = oracle::random_matrix(rng, 25, 12).array() + 4.0;
        const auto n = normalize_predictors(a);
        for (Index j = 0; j < a.cols(); ++j) {
            CHECK(std::fabs(n.values.col(j).sum()) <= 1e-9 * 25);
        }
    }
}

TEST_CASE("constant_cosine_filter")
{
    SUBCASE("parallel to ones")
    {
        const auto r = constant_cosine_filter(column({5, 5, 5}), 0.9);
        CHECK(r.cosines(0) == doctest::Approx(1.0));
        CHECK(r.removed == IndexList{0});
    }
    SUBCASE("orthogonal to ones")
    {
        const auto r = constant_cosine_filter(column({1, -1}), 0.9);
        CHECK(r.cosines(0) == doctest::Approx(0.0));
        CHECK(r.kept == IndexList{0});
    }
    SUBCASE("hand-computed cosine 6/(sqrt 8 sqrt 5)")
    {
        const auto r = constant_cosine_filter(column({1, 1, 1, 1, 2}), 0.9);
        CHECK(r.cosines(0) == doctest::Approx(0.9486832980505138).epsilon(1e-14));
        CHECK(r.removed == IndexList{0});
    }
    SUBCASE("zero column")
    {
        const auto r = constant_cosine_filter(column({0, 0, 0}), 0.9);
        CHECK(r.cosines(0) == 1.0);
        CHECK(r.removed == IndexList{0});
    }
    SUBCASE("positive rescaling leaves cosines unchanged")
    {
        Rng rng(11);
        Matrix a = oracle::random_matrix(rng, 15, 8);
        a.col(2).array() += 6.0;
        Matrix b = a;
        for (Index j = 0; j < b.cols(); ++j) {
            b.col(j) *= 0.01 + 3.0 * static_cast<double>(j);
        }
        const auto ra = constant_cosine_filter(a, 0.9);
        const auto rb = constant_cosine_filter(b, 0.9);
        CHECK(ra.kept == rb.kept);
        for (Index j = 0; j < a.cols(); ++j) {
            CHECK(ra.cosines(j) == doctest::Approx(rb.cosines(j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("log_shift_transform")
{
    CHECK(log_shift_constant(-1.7617) == 2.0);
    CHECK(log_shift_constant(3.0) == 1.0);
    CHECK(log_shift_constant(0.0) == 1.0);
    CHECK(log_shift_constant(-2.0) == 3.0);

    Matrix x(1, 4);
    x << -1.7617, 3.0, 0.0, -2.0;
    const Matrix t = log_shift_transform(x);
    // ln(0.2383) evaluated independently: -1.43422489...
    CHECK(t(0, 0) == doctest::Approx(-1.4342248948774408).epsilon(1e-12));
    CHECK(t(0, 1) == doctest::Approx(std::log(4.0)));
    CHECK(t(0, 2) == 0.0);
    CHECK(t(0, 3) == 0.0);

    // equals ln(x+1) exactly for x > 0, finite everywhere
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double v = (rng.uniform() - 0.5) * 40.0;
        Matrix one(1, 1);
        one(0, 0) = v;
        const double out = log_shift_transform(one)(0, 0);
        CHECK(std::isfinite(out));
        if (v > 0) {
            CHECK(out == std::log(v + 1.0));
        } else {
            CHECK(out <= 0.0);
        }
    }
}

TEST_CASE("standardize")
{
    SUBCASE("column (1,2,3)")
    {
        Vector y(3);
        y << 0, 1, 1;
        const auto s = standardize(column({1, 2, 3}), y);
        CHECK(s.values(0, 0) == doctest::Approx(-1.0));
        CHECK(s.values(1, 0) == doctest::Approx(0.0));
        CHECK(s.values(2, 0) == doctest::Approx(1.0));
    }
    SUBCASE("response (0,1,0,1)")
    {
        Vector y(4);
        y << 0, 1, 0, 1;
        const auto s = standardize(column({1, 2, 3, 5}), y);
        CHECK(s.params.response_mean == 0.5);
        CHECK(s.params.response_sd == doctest::Approx(std::sqrt(1.0 / 3.0)));
        CHECK(s.response(0) == doctest::Approx(-s.response(1)));
    }
    SUBCASE("constant column is an error naming it")
    {
        Matrix a(3, 2);
        a << 1, 4, 2, 4, 3, 4;
        Vector y(3);
        y << 0, 1, 0;
        CHECK(zero_variance_columns(a) == IndexList{1});
        CHECK_THROWS_AS(standardize(a, y), ValidationError);
    }
    SUBCASE("round trip through params")
    {
        Rng rng(8);
        Matrix a = oracle::random_matrix(rng, 20, 6) * 7.0;
        a.array() += 3.0;
        const Vector y = oracle::random_vector(rng, 20);
        const auto s = standardize(a, y);
        for (Index j = 0; j < a.cols(); ++j) {
            CHECK(std::fabs(s.values.col(j).mean()) < 1e-12);
            const double sd = std::sqrt(s.values.col(j).squaredNorm() / 19.0);
            CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
        }
        const Matrix back = s.params.invert(s.values);
        CHECK((back - a).norm() <= 1e-10 * a.norm());
        CHECK((s.params.apply(a) - s.values).norm() <= 1e-12 * s.values.norm());
    }
}
