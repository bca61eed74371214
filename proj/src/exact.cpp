#include "sublin/exact.hpp"

#include <cmath>
#include <stdexcept>

#include <mpfr.h>

namespace sublin {

namespace {

void require_finite(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite statistic");
}

}  // namespace

ExactSum::ExactSum() { mpq_init(q_); }

ExactSum::ExactSum(const ExactSum& other) {
    mpq_init(q_);
    mpq_set(q_, other.q_);
}

ExactSum::ExactSum(ExactSum&& other) noexcept {
    mpq_init(q_);
    mpq_swap(q_, other.q_);
}

ExactSum& ExactSum::operator=(const ExactSum& other) {
    if (this != &other) mpq_set(q_, other.q_);
    return *this;
}

ExactSum& ExactSum::operator=(ExactSum&& other) noexcept {
    if (this != &other) mpq_swap(q_, other.q_);
    return *this;
}

ExactSum::~ExactSum() { mpq_clear(q_); }

void ExactSum::add(double x) {
    require_finite(x);
    mpq_t t;
    mpq_init(t);
    mpq_set_d(t, x);  // exact: doubles are dyadic rationals
    mpq_add(q_, q_, t);
    mpq_clear(t);
}

void ExactSum::add_product(double a, double b) {
    require_finite(a);
    require_finite(b);
    mpq_t ta, tb;
    mpq_init(ta);
    mpq_init(tb);
    mpq_set_d(ta, a);
    mpq_set_d(tb, b);
    mpq_mul(ta, ta, tb);
    mpq_add(q_, q_, ta);
    mpq_clear(ta);
    mpq_clear(tb);
}

void ExactSum::add(const ExactSum& other) { mpq_add(q_, q_, other.q_); }

void ExactSum::negate() { mpq_neg(q_, q_); }

int ExactSum::compare(const ExactSum& other) const {
    const int c = mpq_cmp(q_, other.q_);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool ExactSum::equals_scaled(const ExactSum& other, double lambda) const {
    require_finite(lambda);
    mpq_t t;
    mpq_init(t);
    mpq_set_d(t, lambda);
    mpq_mul(t, t, other.q_);
    const bool eq = mpq_equal(q_, t) != 0;
    mpq_clear(t);
    return eq;
}

ExactSum ExactSum::scaled(const ExactSum& s, double lambda) {
    require_finite(lambda);
    ExactSum out;
    mpq_t t;
    mpq_init(t);
    mpq_set_d(t, lambda);
    mpq_mul(out.q_, t, s.q_);
    mpq_clear(t);
    return out;
}

double ExactSum::mean(std::int64_t n) const {
    if (n <= 0) throw std::invalid_argument("mean requires n > 0");
    mpq_t t;
    mpq_init(t);
    mpq_set_si(t, static_cast<long>(n), 1);
    mpq_div(t, q_, t);
    mpfr_t r;
    mpfr_init2(r, 53);
    mpfr_set_q(r, t, MPFR_RNDN);
    const double out = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clear(r);
    mpq_clear(t);
    return out;
}

double ExactSum::to_double() const {
    mpfr_t r;
    mpfr_init2(r, 53);
    mpfr_set_q(r, q_, MPFR_RNDN);
    const double out = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clear(r);
    return out;
}

bool ExactSum::is_zero() const { return mpq_sgn(q_) == 0; }

}  // namespace sublin
