// Copyright 2026 The qdcg Authors
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

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qdcg/error.hpp"
#include "qdcg/graph.hpp"

namespace qdcg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& node, const std::string& field, const std::string& why) {
  throw InvalidArgument("graph json: node '" + node + "': field '" + field + "' " + why);
}

double number(const json& obj, const std::string& node, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end()) fail(node, field, "is missing");
  if (!it->is_number()) fail(node, field, "must be a number");
  return it->get<double>();
}

double number_or(const json& obj, const std::string& node, const char* field, double fallback) {
  return obj.contains(field) ? number(obj, node, field) : fallback;
}

std::vector<double> numbers(const json& obj, const std::string& node, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end()) fail(node, field, "is missing");
  if (!it->is_array()) fail(node, field, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) fail(node, field, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Coefficient coefficient(const json& obj, const std::string& node, const char* field) {
  const auto c = numbers(obj, node, field);
  if (c.size() != 2) fail(node, field, "must be [constant, slope]");
  return affine_coefficient(c[0], c[1]);
}

SourceSpec parse_dist(const json& dist, const std::string& node) {
  if (!dist.is_object()) fail(node, "dist", "must be an object");
  const auto type_it = dist.find("type");
  if (type_it == dist.end() || !type_it->is_string()) fail(node, "dist.type", "must be a string");
  const std::string type = type_it->get<std::string>();
  try {
    if (type == "gaussian" || type == "normal") {
      return SourceSpec::gaussian(number(dist, node, "mean"), number(dist, node, "std"));
    }
    if (type == "uniform") {
      return SourceSpec::uniform(number(dist, node, "lo"), number(dist, node, "hi"));
    }
    if (type == "point") {
      return SourceSpec::discrete(DiscreteMeasure::point_mass(number(dist, node, "value")));
    }
    if (type == "discrete") {
      const auto atoms = numbers(dist, node, "atoms");
      if (atoms.empty()) fail(node, "dist.atoms", "must not be empty");
      if (!dist.contains("weights")) {
        return SourceSpec::discrete(DiscreteMeasure::uniform(atoms));
      }
      return SourceSpec::discrete(DiscreteMeasure(atoms, numbers(dist, node, "weights")));
    }
    if (type == "quantile") {
      return SourceSpec::tabulated_quantile(numbers(dist, node, "p"), numbers(dist, node, "q"));
    }
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    if (what.rfind("graph json:", 0) == 0) throw;
    fail(node, "dist", std::string("is invalid: ") + e.what());
  }
  fail(node, "dist.type", "has unknown value '" + type + "'");
}

NodeOp parse_op(const json& obj, const std::string& node) {
  const auto it = obj.find("op");
  if (it == obj.end() || !it->is_string()) fail(node, "op", "must be a string");
  const std::string op = it->get<std::string>();
  if (op == "affine") return NodeOp::affine(number(obj, node, "a"), number_or(obj, node, "b", 0.0));
  if (op == "add") return NodeOp::add();
  if (op == "sub") return NodeOp::sub();
  if (op == "min") return NodeOp::min();
  if (op == "max") return NodeOp::max();
  if (op == "scale_add") return NodeOp::scale_add(number(obj, node, "c"));
  if (op == "em_step") {
    return NodeOp::em_step(coefficient(obj, node, "drift"), coefficient(obj, node, "diffusion"),
                           number_or(obj, node, "t", 0.0), number(obj, node, "dt"));
  }
  fail(node, "op", "has unknown value '" + op + "'");
}

}  // namespace

CompGraph graph_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("graph json: parse error: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("graph json: top level must be an object");
  const auto nodes = doc.find("nodes");
  if (nodes == doc.end() || !nodes->is_array()) {
    throw InvalidArgument("graph json: 'nodes' must be an array");
  }
  CompGraph g;
  std::size_t position = 0;
  for (const auto& item : *nodes) {
    const std::string where = "#" + std::to_string(position++);
    if (!item.is_object()) fail(where, "(node)", "must be an object");
    const auto id_it = item.find("id");
    if (id_it == item.end() || !id_it->is_string()) fail(where, "id", "must be a string");
    const std::string id = id_it->get<std::string>();
    const std::string kind = item.value("kind", item.contains("dist") ? "source" : "op");
    Node node;
    node.id = id;
    if (kind == "source") {
      if (item.contains("dist")) node.source = parse_dist(item.at("dist"), id);
    } else if (kind == "op") {
      node.op = parse_op(item, id);
      if (item.contains("lip")) {
        try {
          node.op->override_lipschitz(number(item, id, "lip"));
        } catch (const InvalidArgument&) {
          fail(id, "lip", "must be a finite nonnegative number");
        }
      }
      const auto in = item.find("inputs");
      if (in == item.end()) fail(id, "inputs", "is missing");
      if (!in->is_array()) fail(id, "inputs", "must be an array of node ids");
      for (const auto& v : *in) {
        if (!v.is_string()) fail(id, "inputs", "must be an array of node ids");
        node.inputs.push_back(v.get<std::string>());
      }
    } else {
      fail(id, "kind", "must be \"source\" or \"op\"");
    }
    g.add_node(std::move(node));
  }
  const auto terminal = doc.find("terminal");
  if (terminal == doc.end() || !terminal->is_string()) {
    throw InvalidArgument("graph json: 'terminal' must be a node id string");
  }
  g.set_terminal(terminal->get<std::string>());
  return g;
}

CompGraph graph_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("graph json: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return graph_from_json(buffer.str());
}

}  // namespace qdcg
