// Copyright 2026 The rlncsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment commands behind the rlncsched tool. Each command turns an
// ExperimentSpec into a Table; tools/rlncsched.cpp only parses flags and
// writes the result.

#ifndef RLNCSCHED_CLI_HPP
#define RLNCSCHED_CLI_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlncsched/analytics.hpp"
#include "rlncsched/codec.hpp"
#include "rlncsched/model.hpp"
#include "rlncsched/oracle.hpp"
#include "rlncsched/policies.hpp"
#include "rlncsched/simulator.hpp"

namespace rlncsched::cli {

using nlohmann::json;

enum class OutputFormat { csv, json };

[[nodiscard]] inline OutputFormat parse_format(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

/// Exit codes of the tool.
enum ExitCode : int { kOk = 0, kConfigError = 2, kCapExceeded = 3, kNumericalFailure = 4 };

/// Everything a subcommand may need. Grids are cross-multiplied.
struct ExperimentSpec {
    std::vector<std::size_t> n{10};
    std::vector<std::size_t> f{1000};
    std::vector<std::size_t> k{10};
    std::vector<double> p{0.5};
    std::vector<std::string> policies{"lr"};
    std::size_t reps = 200;
    std::uint64_t seed = 1;
    std::string coding = "ideal";
    bool ragged = false;
    std::string out;
    std::string format = "csv";
    std::size_t workers = 0;
    double epsilon = 0.1;
    std::string formula = "simplified";
    bool divisor_only = false;
    std::uint64_t cap = oracle::kDefaultCap;
    bool simulate = false;  // table1: also derive the simulated-LR column

    [[nodiscard]] std::vector<PolicyKind> policy_kinds() const {
        std::vector<PolicyKind> out;
        for (const auto& name : policies) out.push_back(parse_policy(name));
        return out;
    }

    /// Checks grid shapes and every scenario in the grid.
    void validate(bool check_scenarios = true) const {
        if (n.empty() || f.empty() || k.empty() || p.empty()) throw ConfigError("scenario grids must be non-empty");
        if (policies.empty()) throw ConfigError("policy list must be non-empty");
        if (reps == 0) throw ConfigError("replications must be at least 1");
        (void)policy_kinds();
        (void)parse_coding(coding);
        (void)parse_format(format);
        if (check_scenarios)
            for (const auto& s : scenarios()) s.validate();
    }

    [[nodiscard]] std::vector<ScenarioConfig> scenarios() const {
        std::vector<ScenarioConfig> out;
        for (auto nn : n)
            for (auto ff : f)
                for (auto pp : p)
                    for (auto kk : k) out.push_back({nn, ff, kk, pp, ragged});
        return out;
    }
};

inline void to_json(json& j, const ExperimentSpec& s) {
    j = json{{"n", s.n},           {"f", s.f},
             {"k", s.k},           {"p", s.p},
             {"policy", s.policies}, {"reps", s.reps},
             {"seed", s.seed},     {"coding", s.coding},
             {"ragged", s.ragged}, {"workers", s.workers},
             {"epsilon", s.epsilon}, {"formula", s.formula},
             {"divisor_only", s.divisor_only}, {"cap", s.cap},
             {"simulate", s.simulate}};
}

/// Fills fields from a JSON config object. Keys for which `given_on_cli`
/// returns true are left alone so command-line flags take precedence.
inline void apply_config(ExperimentSpec& spec, const json& cfg,
                         const std::function<bool(const std::string&)>& given_on_cli) {
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    const auto take = [&](const char* key, auto& field) {
        if (!cfg.contains(key) || given_on_cli(key)) return;
        using T = std::decay_t<decltype(field)>;
        try {
            if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
                field = cfg.at(key).is_array() ? cfg.at(key).get<T>() : T{cfg.at(key).get<typename T::value_type>()};
            } else {
                field = cfg.at(key).get<T>();
            }
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config key '") + key + "': " + e.what());
        }
    };
    take("n", spec.n);
    take("f", spec.f);
    take("k", spec.k);
    take("p", spec.p);
    take("policy", spec.policies);
    take("reps", spec.reps);
    take("seed", spec.seed);
    take("coding", spec.coding);
    take("ragged", spec.ragged);
    take("out", spec.out);
    take("format", spec.format);
    take("workers", spec.workers);
    take("epsilon", spec.epsilon);
    take("formula", spec.formula);
    take("divisor_only", spec.divisor_only);
    take("cap", spec.cap);
    take("simulate", spec.simulate);
}

/// Shortest decimal that parses back to exactly `x`.
[[nodiscard]] inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Rows of JSON scalars under named columns.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    void add(std::vector<json> row) {
        if (row.size() != columns.size()) throw std::logic_error("row width does not match columns");
        rows.push_back(std::move(row));
    }

    [[nodiscard]] std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::out_of_range("no column " + std::string(name));
    }
};

[[nodiscard]] inline std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    return format_double(v.get<double>());
}

/// CSV: one `#` comment line carrying the command and its resolved config,
/// then the header and data rows. JSON: {"command", "config", "rows"}.
inline void write_table(std::ostream& os, const Table& table, std::string_view command, const json& config,
                        OutputFormat format) {
    if (format == OutputFormat::json) {
        json doc{{"command", command}, {"config", config}, {"rows", json::array()}};
        for (const auto& row : table.rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i];
            doc["rows"].push_back(std::move(obj));
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "# rlncsched " << command << ' ' << config.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

/// Inverse of the CSV writer: skips `#` lines, returns the header and cells.
[[nodiscard]] inline std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>> read_csv(
    std::istream& is) {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (header.empty()) header = std::move(cells);
        else rows.push_back(std::move(cells));
    }
    return {header, rows};
}

inline const std::vector<std::string> kResultColumns = {
    "policy", "n",           "f",          "k",          "p",
    "seed",   "reps",        "t_max_mean", "t_max_ci95", "t_mean_mean",
    "t_var_mean", "throughput_norm", "t_max_norm"};

[[nodiscard]] inline std::vector<json> result_row(PolicyKind policy, const ScenarioConfig& s,
                                                  const ExperimentSpec& spec, const BatchResult& r) {
    const double ideal = static_cast<double>(s.file_size) / s.conn_prob;
    return {std::string(to_string(policy)),
            s.n_receivers,
            s.file_size,
            s.window,
            s.conn_prob,
            spec.seed,
            spec.reps,
            r.t_max.mean,
            r.t_max.ci95(),
            r.t_mean.mean,
            r.t_var.mean,
            r.throughput.mean,
            r.t_max.mean / ideal};
}

[[nodiscard]] inline ReplicationPlan plan_for(const ExperimentSpec& spec, const ScenarioConfig& s, PolicyKind k) {
    ReplicationPlan plan;
    plan.base_seed = spec.seed;
    plan.replications = spec.reps;
    plan.scenario = s;
    plan.policy = k;
    plan.coding = parse_coding(spec.coding);
    plan.workers = spec.workers;
    return plan;
}

/// One row per (scenario, policy). Every policy of a scenario runs on the
/// same seed, hence on the same channel realizations.
[[nodiscard]] inline Table cmd_simulate(const ExperimentSpec& spec) {
    spec.validate();
    Table t{kResultColumns, {}};
    for (const auto& s : spec.scenarios())
        for (PolicyKind kind : spec.policy_kinds()) t.add(result_row(kind, s, spec, run_batch(plan_for(spec, s, kind))));
    return t;
}

/// Completion time against K for each policy; rows ordered by scenario,
/// policy, then ascending K.
[[nodiscard]] inline Table cmd_sweep(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentSpec sorted = spec;
    std::sort(sorted.k.begin(), sorted.k.end());
    sorted.k.erase(std::unique(sorted.k.begin(), sorted.k.end()), sorted.k.end());
    Table t{kResultColumns, {}};
    for (auto nn : sorted.n)
        for (auto ff : sorted.f)
            for (auto pp : sorted.p)
                for (PolicyKind kind : sorted.policy_kinds())
                    for (auto kk : sorted.k) {
                        const ScenarioConfig s{nn, ff, kk, pp, sorted.ragged};
                        t.add(result_row(kind, s, sorted, run_batch(plan_for(sorted, s, kind))));
                    }
    return t;
}

/// gnuplot script drawing t_max_norm against k, one curve per policy.
[[nodiscard]] inline std::string gnuplot_script(const std::string& csv_path, const ExperimentSpec& spec) {
    std::ostringstream os;
    os << "# generated by rlncsched sweep\n"
       << "set datafile separator ','\n"
       << "set xlabel 'coding window K'\n"
       << "set ylabel 'completion time / (F/p)'\n"
       << "set key top right\n"
       << "plot ";
    const auto kinds = spec.policy_kinds();
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const std::string name(to_string(kinds[i]));
        os << (i ? ", \\\n     " : "") << "'" << csv_path << "' using ($1 eq '" << name
           << "' ? $4 : 1/0):13 with linespoints title '" << name << "'";
    }
    os << '\n';
    return os.str();
}

/// Analytic estimates over the K grid; every K must divide F.
[[nodiscard]] inline Table cmd_analyze(const ExperimentSpec& spec) {
    if (spec.n.empty() || spec.f.empty() || spec.k.empty() || spec.p.empty())
        throw ConfigError("scenario grids must be non-empty");
    Table t{{"n", "f", "k", "p", "num_batches", "mu", "sigma", "n_tilde", "a_n", "a_n_approx", "b_n",
             "e_t_integral", "e_t_3sigma", "e_t_orderstat", "e_t_integral_norm", "e_t_3sigma_norm",
             "e_t_orderstat_norm"},
            {}};
    for (auto nn : spec.n)
        for (auto ff : spec.f)
            for (auto pp : spec.p)
                for (auto kk : spec.k) {
                    const ScenarioConfig s{nn, ff, kk, pp, false};
                    const auto r = analytics::expected_completion(s);
                    const double ideal = static_cast<double>(ff) / pp;
                    const json three = r.e_t_3sigma ? json(*r.e_t_3sigma) : json(nullptr);
                    const json three_norm = r.e_t_3sigma ? json(*r.e_t_3sigma / ideal) : json(nullptr);
                    t.add({nn, ff, kk, pp, r.num_batches, r.params.mu, r.params.sigma, r.n_tilde, r.a_n,
                           analytics::a_approx(nn, r.n_tilde), r.b_n, r.e_t_integral, three, r.e_t_orderstat,
                           r.e_t_integral / ideal, three_norm, r.e_t_orderstat / ideal});
                }
    return t;
}

struct MinKLine {
    std::size_t f, n;
    double p, epsilon;
    analytics::WindowFormula formula;
    bool divisor_only;
    analytics::MinWindow result;

    [[nodiscard]] json to_json() const {
        return {{"f", f},
                {"n", n},
                {"p", p},
                {"epsilon", epsilon},
                {"formula", analytics::to_string(formula)},
                {"divisor_only", divisor_only},
                {"k", result.window},
                {"percent", result.percent_of(f)},
                {"three_sigma_domain", result.three_sigma_domain}};
    }

    [[nodiscard]] std::string to_line() const {
        std::ostringstream os;
        os << "k=" << result.window << " percent=" << format_double(result.percent_of(f)) << " f=" << f
           << " n=" << n << " p=" << format_double(p) << " epsilon=" << format_double(epsilon)
           << " formula=" << analytics::to_string(formula) << " divisor_only=" << (divisor_only ? "true" : "false")
           << " three_sigma_domain=" << (result.three_sigma_domain ? "true" : "false");
        return os.str();
    }
};

[[nodiscard]] inline MinKLine cmd_min_k(const ExperimentSpec& spec) {
    if (spec.f.size() != 1 || spec.n.size() != 1 || spec.p.size() != 1)
        throw ConfigError("min-k takes a single F, N and p");
    const auto formula = analytics::parse_formula(spec.formula);
    const auto r = analytics::min_window(spec.f[0], spec.n[0], spec.p[0], {spec.epsilon}, formula, spec.divisor_only);
    return {spec.f[0], spec.n[0], spec.p[0], spec.epsilon, formula, spec.divisor_only, r};
}

inline constexpr std::size_t kTable1Receivers = 50;
inline constexpr double kTable1ConnProb = 0.8;
inline const std::vector<std::size_t> kTable1FileSizes = {2000, 5000, 10000};
inline const std::vector<double> kTable1Epsilons = {0.10, 0.01};

/// Smallest divisor K of F whose simulated mean LR completion time is within
/// epsilon of the K = F value.
[[nodiscard]] inline std::size_t simulated_min_window(std::size_t f, std::size_t n, double p, double epsilon,
                                                      const ExperimentSpec& spec) {
    const auto mean_t = [&](std::size_t k) {
        return run_batch(plan_for(spec, {n, f, k, p, false}, PolicyKind::lr)).t_max.mean;
    };
    const double reference = mean_t(f);
    for (std::size_t k = 1; k < f; ++k) {
        if (f % k != 0) continue;
        if ((mean_t(k) - reference) / reference <= epsilon) return k;
    }
    return f;
}

/// Minimum coding window as a percentage of F for N = 50, p = 0.8, F in
/// {2000, 5000, 10000} and epsilon in {10%, 1%}; F/K need not be integral.
/// With spec.simulate, a third "simulated" formula column is derived from
/// LR runs over divisors of F.
[[nodiscard]] inline Table cmd_table1(const ExperimentSpec& spec) {
    Table t{{"epsilon", "f", "formula", "k", "percent", "three_sigma_domain"}, {}};
    for (double eps : kTable1Epsilons)
        for (std::size_t f : kTable1FileSizes) {
            if (spec.simulate) {
                const std::size_t k = simulated_min_window(f, kTable1Receivers, kTable1ConnProb, eps, spec);
                t.add({eps, f, "simulated", k, 100.0 * static_cast<double>(k) / static_cast<double>(f), nullptr});
            }
            for (auto formula : {analytics::WindowFormula::exact, analytics::WindowFormula::simplified}) {
                const auto r = analytics::min_window(f, kTable1Receivers, kTable1ConnProb, {eps}, formula, false);
                t.add({eps, f, std::string(analytics::to_string(formula)), r.window, r.percent_of(f),
                       r.three_sigma_domain});
            }
        }
    return t;
}

/// Certification of each requested policy against the exact optimum for
/// every scenario in the grid.
[[nodiscard]] inline Table cmd_oracle(const ExperimentSpec& spec) {
    spec.validate();
    Table t{{"policy", "n", "f", "k", "p", "v_star", "v_policy", "gap", "max_gap", "states", "verdict"}, {}};
    for (const auto& s : spec.scenarios())
        for (PolicyKind kind : spec.policy_kinds()) {
            const auto r = oracle::certify(s, kind, spec.cap);
            t.add({std::string(to_string(kind)), s.n_receivers, s.file_size, s.window, s.conn_prob, r.v_star,
                   r.v_policy, r.v_policy - r.v_star, r.max_gap, r.states, r.pass() ? "PASS" : "FAIL"});
        }
    return t;
}

/// LR against its ACK-only variant on common channel realizations.
[[nodiscard]] inline Table cmd_compare_feedback(const ExperimentSpec& spec) {
    spec.validate();
    Table t{{"n", "f", "k", "p", "seed", "reps", "t_lr_mean", "t_lr_ack_mean", "gap_pct", "gap_ci95_pct"}, {}};
    for (const auto& s : spec.scenarios()) {
        const auto r = paired_comparison(s, PolicyKind::lr_ack, PolicyKind::lr, spec.reps, spec.seed,
                                         parse_coding(spec.coding), spec.workers);
        std::vector<double> diffs;
        for (std::size_t i = 0; i < spec.reps; ++i) diffs.push_back(r.a.runs[i].t_max - r.b.runs[i].t_max);
        const Summary d = Summary::of(diffs);
        const double base = r.b.t_max.mean;
        t.add({s.n_receivers, s.file_size, s.window, s.conn_prob, spec.seed, spec.reps, base, r.a.t_max.mean,
               100.0 * d.mean / base, 100.0 * d.ci95() / base});
    }
    return t;
}

struct SelfTestCheck {
    std::string name;
    bool ok;
    std::string detail;
};

/// Exhaustive field check, random-batch round trips and the full-rank
/// frequency of K random packets.
[[nodiscard]] inline std::vector<SelfTestCheck> codec_selftest(std::size_t round_trips, std::size_t rank_trials,
                                                               std::size_t rank_k, std::uint64_t seed) {
    std::vector<SelfTestCheck> out;

    std::size_t bad = 0;
    for (unsigned a = 0; a < 256; ++a) {
        for (unsigned b = 0; b < 256; ++b) {
            // shift-and-add product modulo the field polynomial
            unsigned x = a, y = b, prod = 0;
            while (y) {
                if (y & 1) prod ^= x;
                x <<= 1;
                if (x & 0x100) x ^= gf256::kPolynomial;
                y >>= 1;
            }
            if (gf256::mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) != prod) ++bad;
        }
        if (a != 0 && gf256::mul(static_cast<std::uint8_t>(a), gf256::inv(static_cast<std::uint8_t>(a))) != 1) ++bad;
    }
    out.push_back({"field-tables", bad == 0, std::to_string(bad) + " mismatches over 256x256 products"});

    Engine rng = make_stream(seed, 0, Substream::coding);
    std::size_t failures = 0, decoded = 0;
    for (std::size_t t = 0; t < round_trips; ++t) {
        const std::size_t k = 1 + uniform_below(rng, 16);
        const std::size_t len = 1 + uniform_below(rng, 256);
        std::vector<codec::Bytes> src(k, codec::Bytes(len));
        for (auto& s : src)
            for (auto& byte : s) byte = static_cast<std::uint8_t>(rng());
        codec::DecoderState dec(1, k);
        for (std::size_t guard = 0; !dec.decodable() && guard < 64 * k; ++guard)
            (void)dec.absorb(codec::encode(1, src, rng));
        if (!dec.decodable() || dec.decode() != src) ++failures;
        else ++decoded;
    }
    out.push_back({"round-trip", failures == 0,
                   std::to_string(decoded) + "/" + std::to_string(round_trips) + " random batches decoded exactly"});

    std::size_t full = 0;
    for (std::size_t t = 0; t < rank_trials; ++t) {
        codec::DecoderState dec(1, rank_k);
        for (std::size_t j = 0; j < rank_k; ++j)
            (void)dec.absorb(codec::EncodedPacket{1, codec::random_coefficients(rank_k, rng), {}});
        if (dec.decodable()) ++full;
    }
    const double freq = static_cast<double>(full) / static_cast<double>(rank_trials);
    const double expected = codec::full_rank_probability(rank_k);
    out.push_back({"full-rank-frequency", std::abs(freq - expected) <= 0.002,
                   "observed " + format_double(freq) + " expected " + format_double(expected) + " (K=" +
                       std::to_string(rank_k) + ", " + std::to_string(rank_trials) + " trials, tol 0.002)"});
    return out;
}

}  // namespace rlncsched::cli

#endif  // RLNCSCHED_CLI_HPP
