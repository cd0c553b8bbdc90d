// kitaev-cli: spectra, Z tables and figure data for the Kitaev chain.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <kitaev/kitaev.hpp>
#include <kitaev/oracle.hpp>
#include <kitaev/tensor_chain_json.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

using namespace kitaev;
using json = nlohmann::json;

namespace {

constexpr int exit_ok = 0, exit_numerical = 1, exit_usage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Output table

struct Fixed3 {
    double v;
};
using Cell = std::variant<double, Fixed3, long long, bool, std::string, std::monostate>;

struct Table {
    std::vector<std::string>       header;
    std::vector<std::vector<Cell>> rows;
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string csv_cell(const Cell &c) {
    struct V {
        std::string operator()(double v) const { return fmt("%.6f", v); }
        std::string operator()(Fixed3 v) const { return fmt("%.3f", v.v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "1" : "0"; }
        std::string operator()(const std::string &v) const {
            if(v.find_first_of(",\"\n") == std::string::npos) return v;
            std::string q = "\"";
            for(char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        }
        std::string operator()(std::monostate) const { return ""; }
    };
    return std::visit(V{}, c);
}

json json_cell(const Cell &c) {
    struct V {
        json operator()(double v) const { return std::isfinite(v) ? json(v) : json(nullptr); }
        json operator()(Fixed3 v) const { return std::isfinite(v.v) ? json(v.v) : json(nullptr); }
        json operator()(long long v) const { return v; }
        json operator()(bool v) const { return v; }
        json operator()(const std::string &v) const { return v; }
        json operator()(std::monostate) const { return nullptr; }
    };
    return std::visit(V{}, c);
}

// ---------------------------------------------------------------------------
// Options

struct Options {
    int              n        = 10;
    double           w        = 1.0;
    double           mu       = 0.0;
    double           delta    = 1.0;
    double           phi      = 0.0;
    std::string      boundary = "open";
    std::string      n_schedule;
    double           tol      = 1e-3;
    double           trunc    = 1e-12;
    std::size_t      max_bond = 1024;
    std::string      format   = "csv";
    std::string      out;
    unsigned         jobs = 1;
    std::string      mu_grid, w_grid, w2_grid;
    std::string      level = "ground";
    std::string      dump_state;
    std::vector<std::string> explicit_flags;
};

std::vector<double> parse_grid(const std::string &spec, const char *flag) {
    std::vector<double> out;
    try {
        if(spec.find(':') != std::string::npos) {
            std::stringstream ss(spec);
            std::string       a, b, c;
            std::getline(ss, a, ':');
            std::getline(ss, b, ':');
            std::getline(ss, c, ':');
            const double lo = std::stod(a), hi = std::stod(b), st = std::stod(c);
            if(!(st > 0.0) || hi < lo) throw UsageError(std::string(flag) + ": expected start:stop:step with step > 0 and stop >= start");
            const auto count = static_cast<long long>(std::floor((hi - lo) / st + 1e-9));
            for(long long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * st);
        } else {
            std::stringstream ss(spec);
            std::string       item;
            while(std::getline(ss, item, ','))
                if(!item.empty()) out.push_back(std::stod(item));
        }
    } catch(const std::logic_error &) {
        throw UsageError(std::string(flag) + ": cannot parse '" + spec + "'");
    }
    if(out.empty()) throw UsageError(std::string(flag) + ": empty grid");
    for(double v : out)
        if(!std::isfinite(v)) throw UsageError(std::string(flag) + ": non-finite value");
    return out;
}

std::vector<int> parse_schedule(const std::string &spec) {
    if(spec.empty()) return default_n_schedule();
    std::vector<int>  out;
    std::stringstream ss(spec);
    std::string       item;
    try {
        while(std::getline(ss, item, ','))
            if(!item.empty()) out.push_back(std::stoi(item));
    } catch(const std::logic_error &) {
        throw UsageError("--n-schedule: cannot parse '" + spec + "'");
    }
    if(out.empty()) throw UsageError("--n-schedule: empty schedule");
    for(std::size_t i = 0; i < out.size(); ++i) {
        if(out[i] < 3) throw UsageError("--n-schedule: chain lengths must be >= 3");
        if(i > 0 && out[i] <= out[i - 1]) throw UsageError("--n-schedule: values must increase");
    }
    return out;
}

KitaevParams base_params(const Options &o, Boundary b) {
    if(o.phi != 0.0) throw UsageError("--phi: only 0 is supported");
    if(!(o.delta >= 0.0)) throw UsageError("--delta must be >= 0");
    if(!(o.tol > 0.0)) throw UsageError("--tol must be > 0");
    if(!(o.trunc > 0.0 && o.trunc < 1.0)) throw UsageError("--trunc must lie in (0, 1)");
    if(o.max_bond < 1) throw UsageError("--max-bond must be >= 1");
    if(o.jobs < 1) throw UsageError("--jobs must be >= 1");
    KitaevParams p{o.n, o.w, o.mu, o.delta, 0.0, b};
    try {
        p.validate();
    } catch(const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    return p;
}

Boundary parse_boundary(const std::string &s) {
    try {
        return boundary_from_string(s);
    } catch(const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
}

TruncationPolicy policy_of(const Options &o) { return {o.trunc, o.max_bond}; }

json config_json(const Options &o, const std::string &command) {
    json c;
    c["command"]   = command;
    c["n"]         = o.n;
    c["w"]         = o.w;
    c["mu"]        = o.mu;
    c["delta"]     = o.delta;
    c["phi"]       = o.phi;
    c["boundary"]  = o.boundary;
    c["tol"]       = o.tol;
    c["trunc"]     = o.trunc;
    c["max_bond"]  = o.max_bond;
    c["jobs"]      = o.jobs;
    c["level"]     = o.level;
    if(!o.n_schedule.empty()) c["n_schedule"] = o.n_schedule;
    if(!o.mu_grid.empty()) c["mu_grid"] = o.mu_grid;
    if(!o.w_grid.empty()) c["w_grid"] = o.w_grid;
    if(!o.w2_grid.empty()) c["w2_grid"] = o.w2_grid;
    return c;
}

void emit(const Options &o, const std::string &command, const Table &t) {
    std::ostringstream os;
    if(o.format == "json") {
        json doc;
        doc["config"] = config_json(o, command);
        doc["rows"]   = json::array();
        for(const auto &r : t.rows) {
            json row;
            for(std::size_t i = 0; i < t.header.size(); ++i) row[t.header[i]] = json_cell(r[i]);
            doc["rows"].push_back(std::move(row));
        }
        os << doc.dump(2) << '\n';
    } else {
        for(std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
        os << '\n';
        for(const auto &r : t.rows) {
            for(std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
            os << '\n';
        }
    }
    if(o.out.empty()) {
        std::cout << os.str();
        std::cout.flush();
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if(!f) throw UsageError("--out: cannot open '" + o.out + "' for writing");
    f << os.str();
}

/// Evaluate work(i) for i in [0, count) on `jobs` threads; results land by index.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)> &work) {
    std::atomic<std::size_t> next{0};
    auto                     worker = [&] {
        for(std::size_t i = next++; i < count; i = next++) work(i);
    };
    std::vector<std::thread> pool;
    const unsigned           extra = std::min<std::size_t>(jobs, count) > 0 ? static_cast<unsigned>(std::min<std::size_t>(jobs, count)) - 1 : 0;
    for(unsigned t = 0; t < extra; ++t) pool.emplace_back(worker);
    worker();
    for(auto &th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Commands

int cmd_spectrum(const Options &o) {
    const auto p     = base_params(o, parse_boundary(o.boundary));
    const auto schur = schur_decompose(build_coupling_matrix(p));
    Table      t{{"quantity", "index", "value"}, {}};
    for(std::size_t k = 0; k < schur.epsilons.size(); ++k) t.rows.push_back({std::string("epsilon"), static_cast<long long>(k + 1), schur.epsilons[k]});
    t.rows.push_back({std::string("ground_energy"), std::monostate{}, schur.ground_energy()});
    t.rows.push_back({std::string("degenerate"), std::monostate{}, schur.degenerate()});
    if(p.boundary == Boundary::periodic) {
        const auto ea  = analytic_periodic_epsilons(p);
        double     dev = 0.0;
        for(std::size_t k = 0; k < ea.size(); ++k) {
            t.rows.push_back({std::string("epsilon_analytic"), static_cast<long long>(k + 1), ea[k]});
            dev = std::max(dev, std::abs(ea[k] - schur.epsilons[k]));
        }
        t.rows.push_back({std::string("max_deviation"), std::monostate{}, dev});
    }
    if(!o.dump_state.empty()) {
        const auto    eig = solve_eigenstate(p, Level::ground, policy_of(o));
        std::ofstream f(o.dump_state, std::ios::binary);
        if(!f) throw UsageError("--dump-state: cannot open '" + o.dump_state + "'");
        f << to_json(eig.state).dump() << '\n';
    }
    emit(o, "spectrum", t);
    return exit_ok;
}

int cmd_zscan(const Options &o) {
    auto p = base_params(o, Boundary::open);
    if(o.boundary != "open") throw UsageError("zscan: only open chains have edge correlations");
    const auto mus      = parse_grid(o.mu_grid.empty() ? "-4:4:1" : o.mu_grid, "--mu-grid");
    const auto w2s      = parse_grid(o.w2_grid.empty() ? "-4:4:1" : o.w2_grid, "--w2-grid");
    const auto schedule = parse_schedule(o.n_schedule);
    Level      level;
    if(o.level == "ground")
        level = Level::ground;
    else if(o.level == "first-excited")
        level = Level::first_excited;
    else
        throw UsageError("--level: expected ground or first-excited");

    struct Result {
        std::optional<ZResult> z;
        std::string            error;
    };
    std::vector<Result> results(mus.size() * w2s.size());
    parallel_for(results.size(), o.jobs, [&](std::size_t i) {
        auto q               = p;
        q.chemical_potential = mus[i / w2s.size()];
        q.hopping            = 0.5 * w2s[i % w2s.size()];
        try {
            results[i].z = z_saturated(q, schedule, o.tol, {level, policy_of(o)});
        } catch(const std::exception &e) {
            results[i].error = e.what();
        }
    });

    Table t{{"mu", "two_w", "w", "delta", "z", "z_analytic", "abs_diff", "n_used", "converged", "degenerate", "error"}, {}};
    bool  failed = false;
    for(std::size_t i = 0; i < results.size(); ++i) {
        auto q               = p;
        q.chemical_potential = mus[i / w2s.size()];
        q.hopping            = 0.5 * w2s[i % w2s.size()];
        const double za      = z_analytic(q);
        const auto  &r       = results[i];
        if(r.z) {
            t.rows.push_back({q.chemical_potential, 2.0 * q.hopping, q.hopping, q.pairing_magnitude, Fixed3{r.z->z}, Fixed3{za},
                              std::abs(r.z->z - za), static_cast<long long>(r.z->n_used), r.z->converged, r.z->degenerate, std::string()});
        } else {
            failed = true;
            t.rows.push_back({q.chemical_potential, 2.0 * q.hopping, q.hopping, q.pairing_magnitude, Fixed3{std::nan("")}, Fixed3{za},
                              std::nan(""), 0LL, false, false, r.error});
        }
    }
    emit(o, "zscan", t);
    return failed ? exit_numerical : exit_ok;
}

struct GridPoint {
    double mu, w;
};

std::vector<GridPoint> figure_grid(const Options &o) {
    const auto             mus = parse_grid(o.mu_grid.empty() ? "-4:4:0.5" : o.mu_grid, "--mu-grid");
    const auto             ws  = parse_grid(o.w_grid.empty() ? "-2:2:0.25" : o.w_grid, "--w-grid");
    std::vector<GridPoint> g;
    for(double w : ws)
        for(double mu : mus) g.push_back({mu, w});
    return g;
}

int cmd_energy_accuracy(const Options &o) {
    const auto p = base_params(o, parse_boundary(o.boundary));
    const auto g = figure_grid(o);
    struct Row {
        double      e_tensor = std::nan(""), e_exact = 0.0;
        bool        degenerate = false;
        std::string error;
    };
    std::vector<Row> rows(g.size());
    parallel_for(g.size(), o.jobs, [&](std::size_t i) {
        auto q               = p;
        q.chemical_potential = g[i].mu;
        q.hopping            = g[i].w;
        try {
            const auto eig     = solve_eigenstate(q, Level::ground, policy_of(o));
            rows[i].e_exact    = eig.energy;
            rows[i].degenerate = eig.degenerate();
            if(!(q.boundary == Boundary::periodic && rows[i].degenerate)) rows[i].e_tensor = energy_expectation(eig.state, q);
        } catch(const std::exception &e) {
            rows[i].error = e.what();
        }
    });
    Table t{{"mu", "w", "e_tensor", "e_exact", "abs_diff", "degenerate", "error"}, {}};
    bool  failed = false;
    for(std::size_t i = 0; i < g.size(); ++i) {
        const auto &r = rows[i];
        failed        = failed || !r.error.empty();
        Cell diff     = std::isnan(r.e_tensor) ? Cell(std::monostate{}) : Cell(std::abs(r.e_tensor - r.e_exact));
        Cell et       = std::isnan(r.e_tensor) ? Cell(std::monostate{}) : Cell(r.e_tensor);
        t.rows.push_back({g[i].mu, g[i].w, et, r.e_exact, diff, r.degenerate, r.error});
    }
    emit(o, "energy-accuracy", t);
    return failed ? exit_numerical : exit_ok;
}

int cmd_particles(const Options &o) {
    const auto p = base_params(o, parse_boundary(o.boundary));
    const auto g = figure_grid(o);
    struct Row {
        double      n = std::nan("");
        int         parity     = 0;
        bool        degenerate = false;
        std::string error;
    };
    std::vector<Row> rows(g.size());
    parallel_for(g.size(), o.jobs, [&](std::size_t i) {
        auto q               = p;
        q.chemical_potential = g[i].mu;
        q.hopping            = g[i].w;
        try {
            const auto eig     = solve_eigenstate(q, Level::ground, policy_of(o));
            rows[i].n          = mean_particle_number(eig.state);
            rows[i].parity     = parity(eig) == Parity::even ? 0 : 1;
            rows[i].degenerate = eig.degenerate();
        } catch(const std::exception &e) {
            rows[i].error = e.what();
        }
    });
    Table t{{"mu", "w", "mean_particles", "parity", "degenerate", "error"}, {}};
    bool  failed = false;
    for(std::size_t i = 0; i < g.size(); ++i) {
        const auto &r = rows[i];
        failed        = failed || !r.error.empty();
        t.rows.push_back({g[i].mu, g[i].w, r.error.empty() ? Cell(r.n) : Cell(std::monostate{}), static_cast<long long>(r.parity), r.degenerate, r.error});
    }
    emit(o, "particles", t);
    return failed ? exit_numerical : exit_ok;
}

int cmd_verify(const Options &o) {
    const auto p = base_params(o, parse_boundary(o.boundary));
    if(p.n_sites > 8) throw UsageError("verify: N must be <= 8");
    const auto mus = parse_grid(o.mu_grid.empty() ? "-3:3:1.5" : o.mu_grid, "--mu-grid");
    const auto ws  = parse_grid(o.w_grid.empty() ? "-1,0.5,1" : o.w_grid, "--w-grid");

    Table t{{"check", "mu", "w", "value", "tolerance", "status"}, {}};
    bool  failed = false;
    auto  record = [&](const std::string &name, double mu, double w, double value, double tol, bool skip = false) {
        const bool pass = value <= tol;
        failed          = failed || (!skip && !pass);
        t.rows.push_back({name, mu, w, value, tol, std::string(skip ? "skip" : (pass ? "pass" : "fail"))});
    };
    for(double w : ws)
        for(double mu : mus) {
            auto q               = p;
            q.chemical_potential = mu;
            q.hopping            = w;
            const auto h         = oracle::dense_hamiltonian(q);
            const auto es        = oracle::diagonalize(h);
            const auto eig       = solve_eigenstate(q, Level::ground, policy_of(o));

            const auto mb  = many_body_spectrum(eig.schur.epsilons);
            double     err = 0.0;
            for(std::size_t i = 0; i < mb.size(); ++i) err = std::max(err, std::abs(mb[i] - es.eigenvalues()(static_cast<Eigen::Index>(i))));
            record("spectrum", mu, w, err, 1e-9);

            const auto amps = fock_coefficients(eig.state);
            const oracle::DenseVector v = Eigen::Map<const oracle::DenseVector>(amps.data(), static_cast<Eigen::Index>(amps.size()));
            const bool degenerate       = es.eigenvalues().size() > 1 && es.eigenvalues()(1) - es.eigenvalues()(0) < 1e-9;
            const double ov             = std::abs(es.eigenvectors().col(0).dot(v));
            record("ground_overlap_deficit", mu, w, 1.0 - ov, 1e-9, degenerate);

            if(q.n_sites >= 3) {
                const auto rho = rdm_ends(eig.state);
                record("rdm_ends", mu, w, (rho.rho - oracle::ends_partial_trace(v, q.n_sites)).cwiseAbs().maxCoeff(), 1e-10);
                const double zed = std::abs(oracle::ed_expectation(oracle::end_hopping_operator(q.n_sites), v));
                record("z_value", mu, w, std::abs(z_value(eig.state, parity(eig)) - zed), 1e-9);
            }
        }
    emit(o, "verify", t);
    return failed ? exit_numerical : exit_ok;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Kitaev chain: Majorana folding, tensor-chain eigenstates and end-to-end correlations"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--n", o.n, "Number of sites")->check(CLI::PositiveNumber);
        sub->add_option("--w", o.w, "Hopping w");
        sub->add_option("--mu", o.mu, "Chemical potential mu");
        sub->add_option("--delta", o.delta, "Pairing magnitude |Delta|");
        sub->add_option("--phi", o.phi, "Pairing phase (only 0 is supported)");
        sub->add_option("--boundary", o.boundary, "open or periodic")->check(CLI::IsMember({"open", "periodic"}));
        sub->add_option("--trunc", o.trunc, "Relative singular-value truncation threshold");
        sub->add_option("--max-bond", o.max_bond, "Bond dimension cap");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", o.out, "Output file (default stdout)");
        sub->add_option("--jobs", o.jobs, "Worker threads for grid points");
    };
    auto grids = [&](CLI::App *sub) {
        sub->add_option("--mu-grid", o.mu_grid, "mu values: start:stop:step or a comma list");
        sub->add_option("--w-grid", o.w_grid, "w values: start:stop:step or a comma list");
    };

    auto *spectrum = app.add_subcommand("spectrum", "Single-body energies, ground energy, degeneracy");
    common(spectrum);
    spectrum->add_option("--dump-state", o.dump_state, "Write the ground-state tensor chain as JSON");

    auto *zscan = app.add_subcommand("zscan", "Saturated Z over a (mu, 2w) grid");
    common(zscan);
    zscan->add_option("--mu-grid", o.mu_grid, "mu values (default -4:4:1)");
    zscan->add_option("--w2-grid", o.w2_grid, "2w values (default -4:4:1)");
    zscan->add_option("--n-schedule", o.n_schedule, "Comma list of chain lengths (default 8,16,...,96)");
    zscan->add_option("--tol", o.tol, "Convergence tolerance between consecutive lengths");
    zscan->add_option("--level", o.level, "ground or first-excited");

    auto *energy = app.add_subcommand("energy-accuracy", "Tensor-chain energy against -sum(eps)/2 over a (mu, w) grid");
    common(energy);
    grids(energy);
    auto *particles = app.add_subcommand("particles", "Mean particle number and parity over a (mu, w) grid");
    common(particles);
    grids(particles);
    auto *verify = app.add_subcommand("verify", "Cross-check against exact diagonalization (N <= 8)");
    common(verify);
    grids(verify);

    // Periodic defaults for the figure commands, N = 6 for verify.
    energy->preparse_callback([&](std::size_t) { o.boundary = "periodic"; });
    particles->preparse_callback([&](std::size_t) { o.boundary = "periodic"; });
    verify->preparse_callback([&](std::size_t) { o.n = 6; });

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if(*spectrum) return cmd_spectrum(o);
        if(*zscan) return cmd_zscan(o);
        if(*energy) return cmd_energy_accuracy(o);
        if(*particles) return cmd_particles(o);
        if(*verify) return cmd_verify(o);
    } catch(const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch(const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch(const std::exception &e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_usage;
}
