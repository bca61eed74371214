#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace sublin {

// Neumaier-compensated accumulator. Fixed accumulation order gives
// bit-stable results; the carried error term keeps ~106 bits of the
// running sum, so regrouped partial sums agree after final rounding.
class CompensatedSum {
  public:
    CompensatedSum() = default;
    explicit CompensatedSum(double x) : sum_(x) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    // Merge a partial accumulator (chunked reductions). Order of merges
    // must itself be fixed by the caller.
    void add(const CompensatedSum& other) {
        add(other.sum_);
        comp_ += other.comp_;
    }

    [[nodiscard]] double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Full-precision formatting: %.17g round-trips every finite double.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_sig6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace sublin
