#include <doctest.h>

#include <complex>
#include <vector>

#include "qpar/kernels.hpp"
#include "qpar/qsim.hpp"
#include "qpar/rng.hpp"

using namespace qpar;

namespace {

std::vector<double> random_reals(int n, uint64_t seed) {
    SplitRng rng(seed);
    std::vector<double> v(std::size_t(1) << n);
    for (auto& x : v) x = rng.unit() * 2.0 - 1.0;
    return v;
}

std::vector<cd> random_state(int nq, uint64_t seed) {
    SplitRng rng(seed);
    std::vector<cd> v(std::size_t(1) << nq);
    for (auto& x : v) x = cd(rng.unit() - 0.5, rng.unit() - 0.5);
    return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("wht dispatch is bit-identical to the scalar reference") {
    for (int n : {0, 1, 2, 3, 5, 8, 12}) {
        auto v = random_reals(n, 11 + n);
        auto ref = v;
        kern::wht_butterfly_scalar(ref.data(), n);
        auto got = v;
        kern::wht_butterfly(got.data(), n);
        CHECK(got == ref);
    }
}

TEST_CASE("scale dispatch is bit-identical") {
    auto v = random_reals(9, 7);
    auto ref = v;
    kern::scale_scalar(ref.data(), ref.size(), 0.125);
    kern::scale(v.data(), v.size(), 0.125);
    CHECK(v == ref);
}

TEST_CASE("gate application matches the scalar reference on every qubit pair") {
    SplitRng rng(99);
    for (int nq : {2, 3, 5, 7}) {
        for (int qa = 0; qa < nq; ++qa) {
            for (int qb = 0; qb < nq; ++qb) {
                if (qa == qb) continue;
                Mat4 u = random_unitary4(rng);
                auto psi = random_state(nq, 1000 + nq * 64 + qa * 8 + qb);
                auto ref = psi;
                kern::apply_gate2_scalar(ref.data(), nq, qa, qb, u.data());
                kern::apply_gate2(psi.data(), nq, qa, qb, u.data());
                CHECK(psi == ref);
            }
        }
    }
}

TEST_CASE("forced scalar backend produces the same values") {
    auto psi = random_state(6, 5);
    SplitRng rng(3);
    Mat4 u = random_unitary4(rng);
    auto a = psi;
    kern::force_backend(kern::Backend::scalar);
    kern::apply_gate2(a.data(), 6, 1, 4, u.data());
    kern::reset_backend();
    auto b = psi;
    kern::apply_gate2(b.data(), 6, 1, 4, u.data());
    CHECK(a == b);
}

TEST_CASE("backend is reported") {
    CHECK(kern::backend_name(kern::active_backend()) != nullptr);
}

}
