#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fendi/network.hpp"

namespace fendi {

// Topology file schema:
//   {"nodes": [{"id": str, "q": num, "w": num}, ...],
//    "links": [{"a": str, "b": str, "capacity": int, "q": num, "fidelity": num}, ...]}
// A node may give {"alpha", "o1", "o2"} instead of "w". An optional top-level
// "meta" object is carried for provenance and ignored. Any other field is an
// error.
Network topology_from_json(const nlohmann::json& doc);
nlohmann::json topology_to_json(const Network& net);

Network load_topology(const std::filesystem::path& path);
void save_topology(const Network& net, const std::filesystem::path& path,
                   const nlohmann::json& meta = nullptr);

// Writes `contents` to `path` via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace fendi
