#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kitaev {

enum class Boundary { open, periodic };

inline std::string_view to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

inline Boundary boundary_from_string(std::string_view s) {
    if(s == "open") return Boundary::open;
    if(s == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary '" + std::string(s) + "' (expected open|periodic)");
}

/// Parameters of the chain
///   H = sum_j -w (c_j^+ c_{j+1} + h.c.) - mu (n_j - 1/2) + Delta c_j c_{j+1} + Delta^* c_{j+1}^+ c_j^+
/// with Delta = |Delta| exp(i phi). Periodic chains identify c_{N+1} = c_1.
struct KitaevParams {
    int      n_sites            = 2;
    double   hopping            = 1.0;
    double   chemical_potential = 0.0;
    double   pairing_magnitude  = 1.0;
    double   pairing_phase      = 0.0;
    Boundary boundary           = Boundary::open;

    [[nodiscard]] std::complex<double> pairing() const { return std::polar(pairing_magnitude, pairing_phase); }

    void validate() const {
        if(n_sites < 2) throw std::invalid_argument("KitaevParams: n_sites must be >= 2, got " + std::to_string(n_sites));
        if(!(pairing_magnitude >= 0.0)) throw std::invalid_argument("KitaevParams: pairing_magnitude must be >= 0");
        if(!(pairing_phase >= 0.0 && pairing_phase < 2.0 * std::numbers::pi))
            throw std::invalid_argument("KitaevParams: pairing_phase must lie in [0, 2pi)");
        if(!std::isfinite(hopping) || !std::isfinite(chemical_potential) || !std::isfinite(pairing_magnitude))
            throw std::invalid_argument("KitaevParams: non-finite parameter");
    }

    [[nodiscard]] KitaevParams with_sites(int n) const {
        auto p    = *this;
        p.n_sites = n;
        return p;
    }
};

} // namespace kitaev
