#pragma once

#include "folding.hpp"
#include "params.hpp"
#include "quadratic_fermions.hpp"
#include "tensor_chain.hpp"

#include <stdexcept>

namespace kitaev {

enum class Level { ground, first_excited };

/// Everything produced on the way from parameters to a tensor-chain eigenstate.
struct Eigenstate {
    KitaevParams      params;
    MajoranaSchur     schur;
    FoldingPlan       plan;
    OccupationPattern occupation;
    TensorChain       state;
    double            energy = 0.0;

    /// Smallest single-body energy is a zero mode: the level is (numerically) degenerate.
    [[nodiscard]] bool degenerate() const { return schur.degenerate(); }
};

inline OccupationPattern occupation_for(Level level, int n_sites) {
    // Energies are sorted non-increasing, so the cheapest excitation is the last mode.
    return level == Level::ground ? OccupationPattern::ground(n_sites) : OccupationPattern::excited(n_sites, n_sites - 1);
}

inline Eigenstate solve_eigenstate(const KitaevParams &params, const OccupationPattern &occupation, TruncationPolicy policy = {}) {
    params.validate();
    if(params.pairing_phase != 0.0) throw std::invalid_argument("solve_eigenstate: only pairing_phase = 0 is supported by the gate set");
    if(static_cast<int>(occupation.size()) != params.n_sites) throw std::invalid_argument("solve_eigenstate: occupation length differs from N");
    auto schur  = schur_decompose(build_coupling_matrix(params));
    auto plan   = compute_folding_plan(schur);
    auto state  = reconstruct_eigenstate(plan, occupation, policy);
    double e    = eigenenergy(schur.epsilons, occupation);
    return Eigenstate{params, std::move(schur), std::move(plan), occupation, std::move(state), e};
}

inline Eigenstate solve_eigenstate(const KitaevParams &params, Level level = Level::ground, TruncationPolicy policy = {}) {
    return solve_eigenstate(params, occupation_for(level, params.n_sites), policy);
}

} // namespace kitaev
