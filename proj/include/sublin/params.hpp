#pragma once

#include <cmath>
#include <stdexcept>

namespace sublin {

// Volatility band [sigma_lo, sigma_hi] with its ratio beta = sigma_hi/sigma_lo.
// beta is always recomputed from the band; a stored value that disagrees with
// the quotient is rejected.
struct GParams {
    double sigma_lo = 1.0;
    double sigma_hi = 1.0;
    double beta = 1.0;

    static GParams make(double lo, double hi) {
        GParams p{lo, hi, hi / lo};
        p.validate();
        return p;
    }

    // Band with sigma_lo = 2/(1+beta), sigma_hi = 2*beta/(1+beta), so that
    // sigma_mid == 1. One code path then serves both the raw band and the
    // ratio-normalized convention.
    static GParams normalized(double beta) {
        if (!(beta >= 1.0) || !std::isfinite(beta))
            throw std::invalid_argument("beta must be finite and >= 1");
        return make(2.0 / (1.0 + beta), 2.0 * beta / (1.0 + beta));
    }

    [[nodiscard]] double sigma_mid() const { return 0.5 * (sigma_lo + sigma_hi); }
    [[nodiscard]] bool classical() const { return sigma_lo == sigma_hi; }

    void validate() const {
        if (!(sigma_lo > 0.0) || !std::isfinite(sigma_lo) || !std::isfinite(sigma_hi))
            throw std::invalid_argument("sigma_lo must be positive and the band finite");
        if (sigma_lo > sigma_hi)
            throw std::invalid_argument("sigma_lo must not exceed sigma_hi");
        if (beta != sigma_hi / sigma_lo)
            throw std::invalid_argument("beta must equal sigma_hi / sigma_lo");
    }

    bool operator==(const GParams&) const = default;
};

}  // namespace sublin
