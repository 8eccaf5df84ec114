#include "doctest.h"

#include <cmath>

#include "neumann_holes/bessel.hpp"

using namespace nh;

// reference values computed with scipy.special to 16 digits
TEST_CASE("J0 and J1 against tabulated references") {
    struct Row { double z, j0, j1; };
    const Row rows[] = {
        {0.5, 9.3846980724081297e-01, 2.4226845767487387e-01},
        {1.0, 7.6519768655796649e-01, 4.4005058574493355e-01},
        {3.7, -3.9923020337119119e-01, 5.3833987745461810e-02},
        {8.0, 1.7165080713755390e-01, 2.3463634685391460e-01},
        {8.5, 4.1939251842934490e-02, 2.7312196367405384e-01},
        {12.3, 1.1079795030758527e-01, -1.9425884804059129e-01},
        {25.0, 9.6266783275958015e-02, -1.2535024958028981e-01},
        {50.0, 5.5812327669252086e-02, -9.7511828125175087e-02},
    };
    for (const auto& r : rows) {
        CHECK(std::abs(bessel::j0(r.z) - r.j0) <= 1e-13);
        CHECK(std::abs(bessel::j1(r.z) - r.j1) <= 1e-13);
    }
    CHECK(bessel::j0(0.0) == 1.0);
    CHECK(bessel::j1(0.0) == 0.0);
    CHECK(bessel::j1(-1.0) == doctest::Approx(-4.4005058574493355e-01).epsilon(1e-13));
}

TEST_CASE("roots of J0' match the printed digits") {
    double a1 = bessel::j0_prime_zero(1);
    double a2 = bessel::j0_prime_zero(2);
    CHECK(a1 == doctest::Approx(3.831705970207512).epsilon(1e-12));
    CHECK(a2 == doctest::Approx(7.015586669815619).epsilon(1e-12));
    CHECK(std::abs(bessel::j1(a1)) <= 1e-12);
    CHECK(std::abs(bessel::j1(a2)) <= 1e-12);
}

TEST_CASE("first zero of J0") {
    double z1 = bessel::j0_zero(1);
    CHECK(z1 == doctest::Approx(2.404825557695772).epsilon(1e-13));
    CHECK(std::abs(bessel::j0(z1)) <= 1e-13);
}

TEST_CASE("jn table consistency with j0/j1 and the recurrence") {
    for (double z : {0.3, 2.0, 7.7, 14.0}) {
        auto t = bessel::jn_table(z, 8);
        CHECK(t[0] == doctest::Approx(bessel::j0(z)).epsilon(1e-12));
        CHECK(t[1] == doctest::Approx(bessel::j1(z)).epsilon(1e-12));
        for (int n = 1; n < 8; ++n)
            CHECK(t[n - 1] + t[n + 1] == doctest::Approx(2.0 * n / z * t[n]).epsilon(1e-10));
    }
}
