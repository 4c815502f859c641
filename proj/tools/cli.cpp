// Copyright 2026 The locc-usd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locc/canonical.hpp"
#include "locc/io.hpp"
#include "locc/protocols.hpp"
#include "locc/simulate.hpp"
#include "locc/statespace.hpp"

namespace locc::cli {

namespace {

struct CliConfig {
    std::vector<std::size_t> dims;
    double overlap = 0.0;
    std::uint64_t seed = 0;
    std::string input;
    std::string output;
    std::string states;
    std::string protocol;
    std::string dump_canonical;
    std::string json_out;
    std::string hypothesis = "phi";
    std::uint64_t shots = 100000;
    double tol = 1e-9;
};

void print_report(std::ostream& out, const EvaluationReport& r, const OptimalityVerdict& v) {
    out << std::setprecision(12);
    out << "                 prepared phi      prepared psi\n";
    out << "conclusive    " << std::setw(16) << r.p_conclusive_phi << "  " << std::setw(16)
        << r.p_conclusive_psi << "\n";
    out << "error         " << std::setw(16) << r.p_error_phi << "  " << std::setw(16) << r.p_error_psi
        << "\n";
    out << "inconclusive  " << std::setw(16) << r.p_inconclusive_phi << "  " << std::setw(16)
        << r.p_inconclusive_psi << "\n";
    out << "|<phi|psi>|          " << r.overlap << "\n";
    out << "bound 1-|<phi|psi>|  " << r.bound << "\n";
    out << "optimality residual  " << r.optimality_residual << "\n";
    out << "max error            " << v.max_error << "\n";
    out << (v.pass ? "PASS: " : "FAIL: ") << v.message << "\n";
}

int cmd_random(const CliConfig& cfg, std::ostream& out) {
    const PartySpace space(cfg.dims);
    const auto [phi, psi] = random_pair(space, cfg.overlap, cfg.seed);
    const std::string text = state_pair_to_json(phi, psi);
    if (cfg.output.empty())
        out << text;
    else
        write_file(cfg.output, text);
    return kSuccess;
}

int cmd_compile(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const StatePair pair = parse_state_pair(read_file(cfg.input));
    ProtocolTree tree = ProtocolTree::leaf(Verdict::Inconclusive);
    try {
        tree = compile(pair.phi, pair.psi);
    } catch (const InternalError& e) {
        err << "compile: " << e.what() << "\n";
        return kVerificationFailed;
    }
    const ValidationReport rep = validate_protocol(tree);
    if (!rep.pass) {
        for (const auto& f : rep.failures)
            err << "compile: " << f << "\n";
        return kVerificationFailed;
    }
    if (!cfg.dump_canonical.empty()) {
        if (std::abs(inner_product(pair.phi, pair.psi)) <= kOrthogonalGate)
            err << "compile: orthogonal input has no canonical form; nothing dumped\n";
        else
            write_file(cfg.dump_canonical, canonical_to_json(canonicalize(pair.phi, pair.psi, 0)));
    }
    const std::string text = protocol_to_json(tree);
    if (cfg.output.empty())
        out << text;
    else
        write_file(cfg.output, text);
    return kSuccess;
}

int cmd_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const StatePair pair = parse_state_pair(read_file(cfg.states));
    const ProtocolTree tree = parse_protocol(read_file(cfg.protocol));
    const ValidationReport rep = validate_protocol(tree);
    for (const auto& f : rep.failures)
        err << "verify: " << f << "\n";
    const EvaluationReport report = evaluate_exact(tree, pair.phi, pair.psi);
    const OptimalityVerdict verdict = check_optimality(report, cfg.tol);
    print_report(out, report, verdict);
    if (!rep.pass)
        out << "FAIL: protocol validation (" << rep.failures.size() << " issue(s))\n";
    if (!cfg.json_out.empty())
        write_file(cfg.json_out, report_to_json(report, verdict));
    return rep.pass && verdict.pass ? kSuccess : kVerificationFailed;
}

int cmd_simulate(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const StatePair pair = parse_state_pair(read_file(cfg.states));
    const ProtocolTree tree = parse_protocol(read_file(cfg.protocol));
    const ValidationReport rep = validate_protocol(tree);
    if (!rep.pass) {
        for (const auto& f : rep.failures)
            err << "simulate: " << f << "\n";
        return kVerificationFailed;
    }
    const Verdict prepared = verdict_from_string(cfg.hypothesis);
    const PureState& state = prepared == Verdict::Phi ? pair.phi : pair.psi;
    const EvaluationReport exact = evaluate_exact(tree, pair.phi, pair.psi);
    const ShotCounts counts = run_shots(tree, state, cfg.shots, cfg.seed);

    const bool is_phi = prepared == Verdict::Phi;
    const double p_exact[3] = {
        is_phi ? exact.p_conclusive_phi : exact.p_error_psi,
        is_phi ? exact.p_error_phi : exact.p_conclusive_psi,
        is_phi ? exact.p_inconclusive_phi : exact.p_inconclusive_psi,
    };
    const Verdict order[3] = {Verdict::Phi, Verdict::Psi, Verdict::Inconclusive};
    const double n = static_cast<double>(counts.shots);

    out << "prepared " << cfg.hypothesis << ", shots " << counts.shots << ", seed " << counts.seed << "\n";
    out << "verdict          count     frequency         exact      5-sigma  ok\n";
    bool all_ok = counts.aborted == 0;
    out << std::fixed << std::setprecision(8);
    for (int k = 0; k < 3; ++k) {
        const std::uint64_t c = counts.count(order[k]);
        const double freq = static_cast<double>(c) / n;
        const double band = 5.0 * std::sqrt(p_exact[k] * (1.0 - p_exact[k]) / n);
        const bool ok = std::abs(freq - p_exact[k]) <= band + 1e-12;
        all_ok = all_ok && ok;
        out << std::left << std::setw(14) << to_string(order[k]) << std::right << std::setw(9) << c
            << std::setw(14) << freq << std::setw(14) << p_exact[k] << std::setw(13) << band << "  "
            << (ok ? "yes" : "NO") << "\n";
    }
    if (counts.aborted)
        out << "aborted shots: " << counts.aborted << "\n";
    if (!cfg.json_out.empty())
        write_file(cfg.json_out, shots_to_json(counts, prepared, exact));
    return all_ok ? kSuccess : kVerificationFailed;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"locc: optimal unambiguous discrimination of two pure states by LOCC"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto add_tol = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "numerical tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    auto* random = app.add_subcommand("random", "generate a random state pair with a given overlap");
    random->add_option("--dims", cfg.dims, "comma-separated local dimensions")
        ->required()
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    random->add_option("--overlap", cfg.overlap, "target |<phi|psi>|")->required()->check(CLI::Range(0.0, 1.0));
    random->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    random->add_option("-o,--output", cfg.output, "output file (stdout if omitted)");
    add_tol(random);

    auto* comp = app.add_subcommand("compile", "compile a state pair into an LOCC protocol");
    comp->add_option("-i,--input", cfg.input, "state-pair file")->required();
    comp->add_option("-o,--output", cfg.output, "protocol file (stdout if omitted)");
    comp->add_option("--dump-canonical", cfg.dump_canonical, "write the canonical form to this file");
    add_tol(comp);

    auto* verify = app.add_subcommand("verify", "evaluate a protocol exactly and check optimality");
    verify->add_option("--states", cfg.states, "state-pair file")->required();
    verify->add_option("--protocol", cfg.protocol, "protocol file")->required();
    verify->add_option("--json", cfg.json_out, "also write the report as JSON");
    add_tol(verify);

    auto* sim = app.add_subcommand("simulate", "sample measurement shots of a protocol");
    sim->add_option("--states", cfg.states, "state-pair file")->required();
    sim->add_option("--protocol", cfg.protocol, "protocol file")->required();
    sim->add_option("--hypothesis", cfg.hypothesis, "prepared state")
        ->check(CLI::IsMember({"phi", "psi"}))
        ->capture_default_str();
    sim->add_option("--shots", cfg.shots, "number of shots")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sim->add_option("--json", cfg.json_out, "also write the counts as JSON");
    add_tol(sim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (random->parsed())
            return cmd_random(cfg, out);
        if (comp->parsed())
            return cmd_compile(cfg, out, err);
        if (verify->parsed())
            return cmd_verify(cfg, out, err);
        if (sim->parsed())
            return cmd_simulate(cfg, out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const ShapeError& e) {
        err << "dimension error: " << e.what() << "\n";
        return kUsageError;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kVerificationFailed;
    }
    return kUsageError;
}

} // namespace locc::cli
