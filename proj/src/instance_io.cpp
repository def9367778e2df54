// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/instance_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fcvi/saddle.hpp"

namespace fcvi {

using nlohmann::json;

namespace {

json vec_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vec_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw ConfigError(std::string(what) + ": expected numbers");
    v[i] = e.get<double>();
  }
  return v;
}

json mat_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix mat_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(std::string(what) + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(std::string(what) + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json set_to_json(const SimpleSet& s) {
  json j;
  switch (s.kind()) {
    case SimpleSet::Kind::Box:
      j["kind"] = "box";
      j["lower"] = vec_to_json(s.lower());
      j["upper"] = vec_to_json(s.upper());
      break;
    case SimpleSet::Kind::Ball:
      j["kind"] = "ball";
      j["center"] = vec_to_json(s.center());
      j["radius"] = s.radius();
      break;
    case SimpleSet::Kind::Simplex:
      j["kind"] = "simplex";
      j["dimension"] = s.dim();
      j["scale"] = s.scale();
      break;
    case SimpleSet::Kind::Product: {
      j["kind"] = "product";
      json blocks = json::array();
      for (const auto& b : s.blocks()) blocks.push_back(set_to_json(b));
      j["blocks"] = std::move(blocks);
      break;
    }
  }
  return j;
}

SimpleSet set_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "box")
    return SimpleSet::box(vec_from_json(j.at("lower"), "set.lower"),
                          vec_from_json(j.at("upper"), "set.upper"));
  if (kind == "ball")
    return SimpleSet::ball(vec_from_json(j.at("center"), "set.center"),
                           j.at("radius").get<double>());
  if (kind == "simplex")
    return SimpleSet::simplex(j.at("dimension").get<Eigen::Index>(),
                              j.at("scale").get<double>());
  if (kind == "product") {
    std::vector<SimpleSet> blocks;
    for (const auto& b : j.at("blocks")) blocks.push_back(set_from_json(b));
    return SimpleSet::product(std::move(blocks));
  }
  throw ConfigError("set.kind: unknown kind '" + kind + "'");
}

json term_to_json(const ConstraintTerm& t) {
  json j;
  switch (t.kind) {
    case ConstraintTerm::Kind::Affine:
      j["kind"] = "affine";
      j["a"] = vec_to_json(t.a);
      break;
    case ConstraintTerm::Kind::Quadratic:
      j["kind"] = "quadratic";
      j["Q"] = mat_to_json(t.Q);
      j["c"] = vec_to_json(t.c);
      break;
    case ConstraintTerm::Kind::Norm:
      j["kind"] = "norm";
      j["scale"] = t.scale;
      j["center"] = vec_to_json(t.center);
      break;
  }
  j["offset"] = t.offset;
  return j;
}

ConstraintTerm term_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double offset = j.at("offset").get<double>();
  if (kind == "affine")
    return ConstraintTerm::affine(vec_from_json(j.at("a"), "constraint.a"), offset);
  if (kind == "quadratic")
    return ConstraintTerm::quadratic(mat_from_json(j.at("Q"), "constraint.Q"),
                                     vec_from_json(j.at("c"), "constraint.c"), offset);
  if (kind == "norm")
    return ConstraintTerm::norm(j.at("scale").get<double>(),
                                vec_from_json(j.at("center"), "constraint.center"), offset);
  throw ConfigError("constraint.kind: unknown kind '" + kind + "'");
}

std::vector<ConstraintTerm> terms_from_json(const json& j) {
  std::vector<ConstraintTerm> terms;
  if (!j.is_array()) throw ConfigError("constraints: expected an array");
  for (const auto& t : j) terms.push_back(term_from_json(t));
  return terms;
}

void check_metadata(const json& meta, const ProblemInstance& inst) {
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
  };
  const bool ok = close(meta.at("L").get<double>(), inst.L()) &&
                  close(meta.at("H").get<double>(), inst.H()) &&
                  close(meta.at("L_g").get<double>(), inst.L_g()) &&
                  close(meta.at("H_g").get<double>(), inst.H_g()) &&
                  close(meta.at("M_g").get<double>(), inst.M_g()) &&
                  close(meta.at("D_X").get<double>(), inst.D_X());
  if (!ok)
    throw ConfigError("instance '" + inst.label() +
                      "': metadata block disagrees with values derived from the data");
}

}  // namespace

json instance_to_json(const ProblemInstance& inst) {
  json j;
  j["label"] = inst.label();
  j["set"] = set_to_json(inst.set());
  json op;
  switch (inst.op().kind()) {
    case OperatorSpec::Kind::Affine:
      op["kind"] = "affine";
      break;
    case OperatorSpec::Kind::AffinePlusNonsmooth:
      op["kind"] = "affine_plus_nonsmooth";
      op["nonsmooth_scale"] = inst.op().nonsmooth_scale();
      break;
    case OperatorSpec::Kind::Custom:
      throw InputError("instance_to_json: custom operator callbacks are not serializable");
  }
  op["A"] = mat_to_json(inst.op().A());
  op["b"] = vec_to_json(inst.op().b());
  j["operator"] = std::move(op);
  json cons = json::array();
  for (const auto& t : inst.constraints().terms()) cons.push_back(term_to_json(t));
  j["constraints"] = std::move(cons);
  json meta;
  meta["L"] = inst.L();
  meta["H"] = inst.H();
  meta["L_g"] = inst.L_g();
  meta["H_g"] = inst.H_g();
  meta["M_g"] = inst.M_g();
  meta["D_X"] = inst.D_X();
  if (inst.constraints().jacobian_bound_estimated()) meta["M_g_estimated"] = true;
  j["metadata"] = std::move(meta);
  if (inst.known_solution()) {
    json ks;
    ks["x_star"] = vec_to_json(inst.known_solution()->x_star);
    ks["lambda_star"] = vec_to_json(inst.known_solution()->lambda_star);
    j["known_solution"] = std::move(ks);
  }
  return j;
}

ProblemInstance instance_from_json(const json& j) {
  SimpleSet set = set_from_json(j.at("set"));
  const json& jop = j.at("operator");
  const std::string op_kind = jop.at("kind").get<std::string>();
  Matrix A = mat_from_json(jop.at("A"), "operator.A");
  Vector b = vec_from_json(jop.at("b"), "operator.b");
  OperatorSpec op =
      op_kind == "affine"
          ? OperatorSpec::affine(std::move(A), std::move(b))
          : op_kind == "affine_plus_nonsmooth"
                ? OperatorSpec::affine_plus_nonsmooth(std::move(A), std::move(b),
                                                      jop.at("nonsmooth_scale").get<double>())
                : throw ConfigError("operator.kind: unknown kind '" + op_kind + "'");
  ConstraintSpec constraints(terms_from_json(j.at("constraints")), set);
  std::optional<KnownSolution> known;
  if (j.contains("known_solution")) {
    known = KnownSolution{vec_from_json(j.at("known_solution").at("x_star"), "x_star"),
                          vec_from_json(j.at("known_solution").at("lambda_star"), "lambda_star")};
  }
  ProblemInstance inst(std::move(set), std::move(op), std::move(constraints), std::move(known),
                       j.value("label", std::string{}));
  if (j.contains("metadata")) check_metadata(j.at("metadata"), inst);
  return inst;
}

namespace {

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in '" + path + "': " + e.what());
  }
}

void dump_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace

ProblemInstance load_instance(const std::string& path) { return instance_from_json(parse_file(path)); }
void save_instance(const ProblemInstance& inst, const std::string& path) {
  dump_file(instance_to_json(inst), path);
}

bool is_saddle_schema(const json& j) { return j.is_object() && j.contains("payoff"); }

json saddle_to_json(const SaddleProblem& sp) {
  json j;
  j["label"] = sp.label();
  json payoff;
  switch (sp.payoff_kind()) {
    case SaddleProblem::PayoffKind::Bilinear:
      payoff["kind"] = "bilinear";
      break;
    case SaddleProblem::PayoffKind::Quadratic:
      payoff["kind"] = "quadratic";
      payoff["P"] = mat_to_json(sp.P());
      payoff["R"] = mat_to_json(sp.R());
      break;
    case SaddleProblem::PayoffKind::Custom:
      throw InputError("saddle_to_json: custom payoffs are not serializable");
  }
  payoff["K"] = mat_to_json(sp.K());
  payoff["a"] = vec_to_json(sp.a());
  payoff["b"] = vec_to_json(sp.b());
  j["payoff"] = std::move(payoff);
  j["set_u"] = set_to_json(sp.set_u());
  j["set_v"] = set_to_json(sp.set_v());
  json cons = json::array();
  for (const auto& t : sp.coupling()) cons.push_back(term_to_json(t));
  j["coupling"] = std::move(cons);
  if (sp.known_saddle()) {
    json ks;
    ks["w_star"] = vec_to_json(sp.known_saddle()->x_star);
    ks["lambda_star"] = vec_to_json(sp.known_saddle()->lambda_star);
    j["known_saddle"] = std::move(ks);
  }
  return j;
}

SaddleProblem saddle_from_json(const json& j) {
  SimpleSet U = set_from_json(j.at("set_u"));
  SimpleSet V = set_from_json(j.at("set_v"));
  const json& payoff = j.at("payoff");
  const std::string kind = payoff.at("kind").get<std::string>();
  Matrix K = mat_from_json(payoff.at("K"), "payoff.K");
  Vector a = vec_from_json(payoff.at("a"), "payoff.a");
  Vector b = vec_from_json(payoff.at("b"), "payoff.b");
  auto coupling = terms_from_json(j.at("coupling"));
  const std::string label = j.value("label", std::string{});
  SaddleProblem sp =
      kind == "bilinear"
          ? SaddleProblem::bilinear(std::move(U), std::move(V), std::move(K), std::move(a),
                                    std::move(b), std::move(coupling), label)
          : kind == "quadratic"
                ? SaddleProblem::quadratic(std::move(U), std::move(V),
                                           mat_from_json(payoff.at("P"), "payoff.P"),
                                           std::move(K),
                                           mat_from_json(payoff.at("R"), "payoff.R"),
                                           std::move(a), std::move(b), std::move(coupling),
                                           label)
                : throw ConfigError("payoff.kind: unknown kind '" + kind + "'");
  if (j.contains("known_saddle")) {
    sp.set_known_saddle(
        KnownSolution{vec_from_json(j.at("known_saddle").at("w_star"), "w_star"),
                      vec_from_json(j.at("known_saddle").at("lambda_star"), "lambda_star")});
  }
  return sp;
}

SaddleProblem load_saddle(const std::string& path) { return saddle_from_json(parse_file(path)); }
void save_saddle(const SaddleProblem& sp, const std::string& path) {
  dump_file(saddle_to_json(sp), path);
}

}  // namespace fcvi
