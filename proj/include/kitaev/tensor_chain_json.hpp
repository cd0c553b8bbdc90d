#pragma once

// Debug dump of a tensor chain:
//   {"n_sites": N,
//    "gammas":  [ site ][ k ][ row ][ col ] -> [re, im],
//    "lambdas": [ internal bond ][ index ]}

#include "tensor_chain.hpp"

#include <json.hpp>

#include <array>
#include <vector>

namespace kitaev {

inline nlohmann::json to_json(const TensorChain &state) {
    nlohmann::json j;
    j["n_sites"] = state.size();
    auto &gammas = j["gammas"] = nlohmann::json::array();
    for(std::size_t s = 0; s < state.size(); ++s) {
        nlohmann::json site = nlohmann::json::array();
        for(int k = 0; k < 2; ++k) {
            const Eigen::MatrixXcd g    = state.gamma(s, k);
            nlohmann::json         rows = nlohmann::json::array();
            for(Eigen::Index r = 0; r < g.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for(Eigen::Index c = 0; c < g.cols(); ++c) row.push_back({g(r, c).real(), g(r, c).imag()});
                rows.push_back(std::move(row));
            }
            site.push_back(std::move(rows));
        }
        gammas.push_back(std::move(site));
    }
    auto &lambdas = j["lambdas"] = nlohmann::json::array();
    for(std::size_t b = 1; b < state.size(); ++b) {
        const auto &l = state.lambda(b);
        lambdas.push_back(std::vector<double>(l.data(), l.data() + l.size()));
    }
    return j;
}

inline TensorChain tensor_chain_from_json(const nlohmann::json &j, TruncationPolicy policy = {}) {
    const auto                                   n = j.at("n_sites").get<std::size_t>();
    std::vector<std::array<Eigen::MatrixXcd, 2>> gammas(n);
    for(std::size_t s = 0; s < n; ++s)
        for(std::size_t k = 0; k < 2; ++k) {
            const auto &rows = j.at("gammas").at(s).at(k);
            const auto  nr   = static_cast<Eigen::Index>(rows.size());
            const auto  nc   = nr == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.at(0).size());
            gammas[s][k].resize(nr, nc);
            for(Eigen::Index r = 0; r < nr; ++r)
                for(Eigen::Index c = 0; c < nc; ++c) {
                    const auto &z   = rows.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
                    gammas[s][k](r, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
                }
        }
    std::vector<Eigen::VectorXd> lambdas;
    for(const auto &l : j.at("lambdas")) {
        const auto v = l.get<std::vector<double>>();
        lambdas.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return TensorChain::from_gammas(gammas, lambdas, policy);
}

} // namespace kitaev
