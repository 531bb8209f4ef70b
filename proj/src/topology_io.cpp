#include "fendi/topology_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fendi/error.hpp"

namespace fendi {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ParseError(where + ": unknown field '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Network topology_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("topology: document must be an object");
  reject_unknown(doc, {"nodes", "links", "meta"}, "topology");
  const json& nodes = require(doc, "nodes", "topology");
  const json& links = require(doc, "links", "topology");
  if (!nodes.is_array() || !links.is_array()) {
    throw ParseError("topology: 'nodes' and 'links' must be arrays");
  }
  Network net;
  try {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const json& n = nodes[i];
      const std::string where = "topology.nodes[" + std::to_string(i) + "]";
      if (!n.is_object()) throw ParseError(where + ": must be an object");
      reject_unknown(n, {"id", "q", "w", "alpha", "o1", "o2"}, where);
      const std::string id = text(n, "id", where);
      const double q = number(n, "q", where);
      const bool has_ops = n.contains("alpha") || n.contains("o1") || n.contains("o2");
      NodeParams params;
      if (n.contains("w")) {
        if (has_ops) throw ParseError(where + ": give either 'w' or 'alpha'/'o1'/'o2', not both");
        params = NodeParams{q, number(n, "w", where)};
      } else if (has_ops) {
        params = NodeParams::from_operations(q, number(n, "alpha", where), number(n, "o1", where),
                                             number(n, "o2", where));
      } else {
        throw ParseError(where + ": missing field 'w'");
      }
      net.add_node(id, params);
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
      const json& l = links[i];
      const std::string where = "topology.links[" + std::to_string(i) + "]";
      if (!l.is_object()) throw ParseError(where + ": must be an object");
      reject_unknown(l, {"a", "b", "capacity", "q", "fidelity"}, where);
      const json& cap = require(l, "capacity", where);
      if (!cap.is_number_integer()) throw ParseError(where + ": 'capacity' must be an integer");
      net.add_link(text(l, "a", where), text(l, "b", where), cap.get<int>(), number(l, "q", where),
                   number(l, "fidelity", where));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("topology: ") + e.what());
  }
  return net;
}

json topology_to_json(const Network& net) {
  json nodes = json::array();
  for (const auto& n : net.nodes()) {
    nodes.push_back({{"id", n.id}, {"q", n.params.q}, {"w", n.params.w}});
  }
  json links = json::array();
  for (const auto& l : net.links()) {
    links.push_back({{"a", net.node(l.a).id},
                     {"b", net.node(l.b).id},
                     {"capacity", l.capacity},
                     {"q", l.q},
                     {"fidelity", l.fidelity}});
  }
  return json{{"nodes", nodes}, {"links", links}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Network load_topology(const std::filesystem::path& path) {
  return topology_from_json(read_json_file(path));
}

void save_topology(const Network& net, const std::filesystem::path& path, const json& meta) {
  json doc = topology_to_json(net);
  if (!meta.is_null()) doc["meta"] = meta;
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace fendi
