#pragma once

#include <cstdint>
#include <gmp.h>

namespace sublin {

// Exact rational accumulator over IEEE doubles.
//
// Every finite double is a dyadic rational, so sums and products of
// doubles are representable exactly in GMP rationals. This is what makes
// the max-of-means axioms (monotonicity, constant preservation,
// sub-additivity, positive homogeneity) assertable with zero tolerance:
// the comparisons happen on exact values, and only the reported mean is
// rounded (correctly, via MPFR) at the very end.
//
// The exact value is also permutation-invariant, so results cannot depend
// on evaluation order.
class ExactSum {
  public:
    ExactSum();
    ExactSum(const ExactSum& other);
    ExactSum(ExactSum&& other) noexcept;
    ExactSum& operator=(const ExactSum& other);
    ExactSum& operator=(ExactSum&& other) noexcept;
    ~ExactSum();

    // Throws std::invalid_argument on NaN/Inf.
    void add(double x);
    // Accumulates the exact product a*b (no intermediate rounding).
    void add_product(double a, double b);
    void add(const ExactSum& other);

    void negate();

    // -1, 0, +1 as exact rationals.
    [[nodiscard]] int compare(const ExactSum& other) const;

    // this == lambda * other, exactly (lambda taken as its exact dyadic value).
    [[nodiscard]] bool equals_scaled(const ExactSum& other, double lambda) const;

    // lambda * s as an exact rational.
    [[nodiscard]] static ExactSum scaled(const ExactSum& s, double lambda);

    // Correctly rounded double of (exact value / n), n > 0.
    [[nodiscard]] double mean(std::int64_t n) const;
    [[nodiscard]] double to_double() const;

    [[nodiscard]] bool is_zero() const;

  private:
    mpq_t q_;
};

}  // namespace sublin
