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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rlncsched/cli.hpp"

namespace {

using namespace rlncsched;
using rlncsched::cli::ExperimentSpec;

struct Flags {
    std::string config_path;
    std::string gnuplot_path;
    std::size_t round_trips = 10000;
    std::size_t rank_trials = 100000;
    std::size_t rank_k = 8;
};

void add_scenario_flags(CLI::App* sub, ExperimentSpec& spec, bool with_policy) {
    sub->add_option("--n", spec.n, "receivers N (comma list)")->delimiter(',')->capture_default_str();
    sub->add_option("--f", spec.f, "file size F in packets (comma list)")->delimiter(',')->capture_default_str();
    sub->add_option("--k", spec.k, "coding window K (comma list)")->delimiter(',')->capture_default_str();
    sub->add_option("--p", spec.p, "connection probability p (comma list)")->delimiter(',')->capture_default_str();
    if (with_policy)
        sub->add_option("--policy", spec.policies, "lr, rs, mg, lr-ack (comma list)")
            ->delimiter(',')
            ->capture_default_str();
}

void add_run_flags(CLI::App* sub, ExperimentSpec& spec) {
    sub->add_option("--reps", spec.reps, "replications per scenario")->capture_default_str();
    sub->add_option("--seed", spec.seed, "base seed")->capture_default_str();
    sub->add_option("--coding", spec.coding, "ideal or gf256")->capture_default_str();
    sub->add_flag("--ragged", spec.ragged, "allow F not divisible by K (short final batch)");
    sub->add_option("--workers", spec.workers, "worker threads (0 = all cores)")->capture_default_str();
}

void add_output_flags(CLI::App* sub, ExperimentSpec& spec, Flags& flags) {
    sub->add_option("--out", spec.out, "output file (default: stdout)");
    sub->add_option("--format", spec.format, "csv or json")->capture_default_str();
    sub->add_option("--config", flags.config_path, "JSON config file; command-line flags take precedence");
}

void load_config(CLI::App* sub, ExperimentSpec& spec, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    cli::json cfg;
    try {
        cfg = cli::json::parse(in);
    } catch (const cli::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    cli::apply_config(spec, cfg, [&](const std::string& key) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        try {
            return sub->get_option(flag)->count() > 0;
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
    });
}

void emit(const cli::Table& table, const char* command, const ExperimentSpec& spec) {
    const cli::json config = spec;
    const auto format = cli::parse_format(spec.format);
    if (spec.out.empty()) {
        cli::write_table(std::cout, table, command, config, format);
        return;
    }
    std::ofstream out(spec.out);
    if (!out) throw ConfigError("cannot write " + spec.out);
    cli::write_table(out, table, command, config, format);
    std::cout << spec.out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chunked RLNC broadcast scheduling workbench"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    Flags flags;

    auto* simulate = app.add_subcommand("simulate", "simulate every (scenario, policy) pair");
    add_scenario_flags(simulate, spec, true);
    add_run_flags(simulate, spec);
    add_output_flags(simulate, spec, flags);

    auto* sweep = app.add_subcommand("sweep", "completion time against K, policies on common channels");
    add_scenario_flags(sweep, spec, true);
    add_run_flags(sweep, spec);
    add_output_flags(sweep, spec, flags);
    sweep->add_option("--gnuplot", flags.gnuplot_path, "also write a gnuplot script plotting the sweep");

    auto* analyze = app.add_subcommand("analyze", "closed-form completion-time estimates");
    add_scenario_flags(analyze, spec, false);
    add_output_flags(analyze, spec, flags);

    auto* min_k = app.add_subcommand("min-k", "minimum coding window for a delay constraint");
    add_scenario_flags(min_k, spec, false);
    min_k->add_option("--epsilon", spec.epsilon, "relative delay bound")->capture_default_str();
    min_k->add_option("--formula", spec.formula, "exact or simplified")->capture_default_str();
    min_k->add_flag("--divisor-only", spec.divisor_only, "restrict K to divisors of F");
    min_k->add_option("--format", spec.format, "csv (key=value line) or json")->capture_default_str();
    min_k->add_option("--config", flags.config_path, "JSON config file; command-line flags take precedence");

    auto* table1 = app.add_subcommand("table1", "minimum window grid for N=50, p=0.8");
    table1->add_flag("--simulate", spec.simulate, "add the simulated-LR column (slow)");
    add_run_flags(table1, spec);
    add_output_flags(table1, spec, flags);

    auto* oracle_cmd = app.add_subcommand("oracle", "exact optimality certificate on small instances");
    add_scenario_flags(oracle_cmd, spec, true);
    oracle_cmd->add_flag("--ragged", spec.ragged, "allow F not divisible by K");
    oracle_cmd->add_option("--cap", spec.cap, "max states x connectivity vectors")->capture_default_str();
    add_output_flags(oracle_cmd, spec, flags);

    auto* feedback = app.add_subcommand("compare-feedback", "LR against LR with ACK-only feedback");
    add_scenario_flags(feedback, spec, false);
    add_run_flags(feedback, spec);
    add_output_flags(feedback, spec, flags);

    auto* selftest = app.add_subcommand("codec-selftest", "GF(256) codec checks");
    selftest->add_option("--round-trips", flags.round_trips, "random batches to round-trip")->capture_default_str();
    selftest->add_option("--trials", flags.rank_trials, "full-rank trials")->capture_default_str();
    selftest->add_option("--rank-k", flags.rank_k, "batch size for the full-rank trials")->capture_default_str();
    selftest->add_option("--seed", spec.seed, "seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return cli::kConfigError;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        load_config(sub, spec, flags.config_path);

        if (sub == simulate) {
            emit(cli::cmd_simulate(spec), "simulate", spec);
        } else if (sub == sweep) {
            emit(cli::cmd_sweep(spec), "sweep", spec);
            if (!flags.gnuplot_path.empty()) {
                std::ofstream gp(flags.gnuplot_path);
                if (!gp) throw ConfigError("cannot write " + flags.gnuplot_path);
                gp << cli::gnuplot_script(spec.out.empty() ? "sweep.csv" : spec.out, spec);
                std::cout << flags.gnuplot_path << '\n';
            }
        } else if (sub == analyze) {
            emit(cli::cmd_analyze(spec), "analyze", spec);
        } else if (sub == min_k) {
            const auto line = cli::cmd_min_k(spec);
            if (cli::parse_format(spec.format) == cli::OutputFormat::json) std::cout << line.to_json().dump() << '\n';
            else std::cout << line.to_line() << '\n';
        } else if (sub == table1) {
            emit(cli::cmd_table1(spec), "table1", spec);
        } else if (sub == oracle_cmd) {
            emit(cli::cmd_oracle(spec), "oracle", spec);
        } else if (sub == feedback) {
            emit(cli::cmd_compare_feedback(spec), "compare-feedback", spec);
        } else if (sub == selftest) {
            bool all = true;
            for (const auto& c : cli::codec_selftest(flags.round_trips, flags.rank_trials, flags.rank_k, spec.seed)) {
                std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                all = all && c.ok;
            }
            return all ? cli::kOk : cli::kNumericalFailure;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kConfigError;
    } catch (const oracle::StateSpaceCapExceeded& e) {
        std::cerr << "oracle cap exceeded: " << e.what() << '\n';
        return cli::kCapExceeded;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return cli::kNumericalFailure;
    }
    return cli::kOk;
}
