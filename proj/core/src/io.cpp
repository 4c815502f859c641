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

#include "locc/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace locc {

using nlohmann::json;

namespace {

json complex_to_json(complex z) { return json::array({z.real(), z.imag()}); }

complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (const auto& z : v)
        arr.push_back(complex_to_json(z));
    return arr;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array())
        throw ParseError("expected an array of [re, im] pairs");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
        v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k]);
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw ParseError("expected a nonempty array of matrix rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0)
        throw ParseError("matrix rows must be nonempty arrays");
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ParseError("ragged matrix");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
    }
    return m;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

const json& require(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError(std::string("missing key '") + key + "'");
    return obj.at(key);
}

std::string finish(const json& j, int indent) { return j.dump(indent) + "\n"; }

json node_to_json(const ProtocolTree& tree) {
    if (tree.is_leaf())
        return {{"kind", "verdict"}, {"verdict", std::string(to_string(tree.verdict()))}};
    const MeasureNode& node = tree.node();
    json out;
    out["kind"] = "measure";
    out["party"] = node.party;
    json ops = json::array();
    for (const auto& op : node.operators)
        ops.push_back(matrix_to_json(op));
    out["operators"] = std::move(ops);
    json branches = json::object();
    for (std::size_t k = 0; k < node.branches.size(); ++k)
        branches[std::to_string(k)] = node_to_json(node.branches[k]);
    out["branches"] = std::move(branches);
    if (node.isometry) {
        out["isometry"] = matrix_to_json(node.isometry->matrix);
        out["ancilla_dim"] = node.isometry->ancilla_dim;
    }
    return out;
}

ProtocolTree node_from_json(const json& j) {
    const json& kind = require(j, "kind");
    if (kind == "verdict") {
        const json& v = require(j, "verdict");
        if (!v.is_string())
            throw ParseError("verdict must be a string");
        return ProtocolTree::leaf(verdict_from_string(v.get<std::string>()));
    }
    if (kind != "measure")
        throw ParseError("node kind must be 'measure' or 'verdict'");

    MeasureNode node;
    const json& party = require(j, "party");
    if (!party.is_number_unsigned())
        throw ParseError("party must be a nonnegative integer");
    node.party = party.get<std::size_t>();

    const json& ops = require(j, "operators");
    if (!ops.is_array() || ops.empty())
        throw ParseError("operators must be a nonempty array");
    for (const auto& op : ops)
        node.operators.push_back(matrix_from_json(op));

    const json& branches = require(j, "branches");
    if (!branches.is_object() || branches.size() != node.operators.size())
        throw ParseError("branches must map each operator index to a node");
    for (std::size_t k = 0; k < node.operators.size(); ++k) {
        const auto key = std::to_string(k);
        if (!branches.contains(key))
            throw ParseError("missing branch '" + key + "'");
        node.branches.push_back(node_from_json(branches.at(key)));
    }

    if (j.contains("isometry")) {
        AncillaIsometry iso;
        iso.matrix = matrix_from_json(j.at("isometry"));
        const json& m = require(j, "ancilla_dim");
        if (!m.is_number_unsigned())
            throw ParseError("ancilla_dim must be a nonnegative integer");
        iso.ancilla_dim = m.get<std::size_t>();
        node.isometry = std::move(iso);
    }
    return ProtocolTree::measure(std::move(node));
}

} // namespace

StatePair parse_state_pair(std::string_view text) {
    const json j = parse_json(text);
    const json& dims_j = require(j, "dims");
    if (!dims_j.is_array() || dims_j.empty())
        throw ParseError("dims must be a nonempty integer array");
    std::vector<std::size_t> dims;
    for (const auto& d : dims_j) {
        if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
            throw ParseError("dims entries must be positive integers");
        dims.push_back(d.get<std::size_t>());
    }
    try {
        PartySpace space(dims);
        PureState phi(space, vector_from_json(require(j, "phi")));
        PureState psi(space, vector_from_json(require(j, "psi")));
        return {std::move(phi), std::move(psi)};
    } catch (const ShapeError& e) {
        throw ParseError(std::string("state-pair file: ") + e.what());
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("state-pair file: ") + e.what());
    }
}

std::string state_pair_to_json(const PureState& phi, const PureState& psi) {
    json j;
    j["dims"] = phi.space().dims();
    j["phi"] = vector_to_json(phi.amplitudes());
    j["psi"] = vector_to_json(psi.amplitudes());
    return finish(j, 2);
}

ProtocolTree parse_protocol(std::string_view text) {
    try {
        return node_from_json(parse_json(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("protocol file: ") + e.what());
    } catch (const ShapeError& e) {
        throw ParseError(std::string("protocol file: ") + e.what());
    }
}

std::string protocol_to_json(const ProtocolTree& tree) { return finish(node_to_json(tree), -1); }

std::string canonical_to_json(const CanonicalForm& form) {
    json j;
    j["cut_party"] = form.cut_party;
    j["alice_unitary"] = matrix_to_json(form.alice_unitary);
    j["global_phase"] = form.global_phase;
    json t = json::array(), mu = json::array(), nu = json::array(), rho = json::array(),
         sign = json::array();
    for (const auto& term : form.terms) {
        t.push_back(term.weight);
        mu.push_back(term.mu ? vector_to_json(*term.mu) : json(nullptr));
        nu.push_back(term.nu ? vector_to_json(*term.nu) : json(nullptr));
        rho.push_back(term.rho);
        sign.push_back(term.sign);
    }
    j["t"] = std::move(t);
    j["mu"] = std::move(mu);
    j["nu"] = std::move(nu);
    j["rho"] = std::move(rho);
    j["sign"] = std::move(sign);
    j["complement_dims"] = form.complement.dims();
    return finish(j, 2);
}

std::string report_to_json(const EvaluationReport& r, const OptimalityVerdict& v) {
    json j;
    j["p_conclusive_phi"] = r.p_conclusive_phi;
    j["p_conclusive_psi"] = r.p_conclusive_psi;
    j["p_error_phi"] = r.p_error_phi;
    j["p_error_psi"] = r.p_error_psi;
    j["p_inconclusive_phi"] = r.p_inconclusive_phi;
    j["p_inconclusive_psi"] = r.p_inconclusive_psi;
    j["overlap"] = r.overlap;
    j["bound"] = r.bound;
    j["optimality_residual"] = r.optimality_residual;
    j["root_phi"] = r.root_phi;
    j["root_psi"] = r.root_psi;
    json branches = json::array();
    for (const auto& b : r.branches)
        branches.push_back({{"path", b.path},
                            {"verdict", std::string(to_string(b.verdict))},
                            {"p_phi", b.p_phi},
                            {"p_psi", b.p_psi}});
    j["branches"] = std::move(branches);
    j["verdict"] = {{"pass", v.pass},
                    {"tol", v.tol},
                    {"optimality_residual", v.optimality_residual},
                    {"max_error", v.max_error},
                    {"message", v.message}};
    return finish(j, 2);
}

std::string shots_to_json(const ShotCounts& c, Verdict prepared, const EvaluationReport& exact) {
    const bool is_phi = prepared == Verdict::Phi;
    json j;
    j["prepared"] = std::string(to_string(prepared));
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    j["counts"] = {{"phi", c.phi}, {"psi", c.psi}, {"inconclusive", c.inconclusive}, {"aborted", c.aborted}};
    j["exact"] = {
        {"phi", is_phi ? exact.p_conclusive_phi : exact.p_error_psi},
        {"psi", is_phi ? exact.p_error_phi : exact.p_conclusive_psi},
        {"inconclusive", is_phi ? exact.p_inconclusive_phi : exact.p_inconclusive_psi},
    };
    return finish(j, 2);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace locc
