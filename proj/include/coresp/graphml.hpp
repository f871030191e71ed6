#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace coresp {

/// Undirected attributed graph for export as GraphML.
struct GraphDocument {
    struct Edge {
        std::size_t source = 0;
        std::size_t target = 0;
        double weight = 0.0;
    };

    std::vector<std::string> node_ids;
    std::vector<std::pair<std::string, std::vector<double>>> real_node_attributes;
    std::vector<std::pair<std::string, std::vector<std::int64_t>>> int_node_attributes;
    std::vector<Edge> edges;
};

void write_graphml(const std::filesystem::path& path, const GraphDocument& graph);

std::string xml_escape(const std::string& text);

} // namespace coresp
