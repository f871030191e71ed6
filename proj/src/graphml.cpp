#include "coresp/graphml.hpp"

#include "coresp/error.hpp"
#include "coresp/table.hpp"

#include <fstream>

#include <fmt/format.h>

namespace coresp {

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

void write_graphml(const std::filesystem::path& path, const GraphDocument& graph) {
    const std::size_t n = graph.node_ids.size();
    for (const auto& [name, values] : graph.real_node_attributes) {
        if (values.size() != n) throw ValidationError(fmt::format("graph attribute '{}' has wrong length", name));
    }
    for (const auto& [name, values] : graph.int_node_attributes) {
        if (values.size() != n) throw ValidationError(fmt::format("graph attribute '{}' has wrong length", name));
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    int key = 0;
    for (const auto& [name, values] : graph.real_node_attributes) {
        out << fmt::format("  <key id=\"d{}\" for=\"node\" attr.name=\"{}\" attr.type=\"double\"/>\n", key++,
                           xml_escape(name));
    }
    for (const auto& [name, values] : graph.int_node_attributes) {
        out << fmt::format("  <key id=\"d{}\" for=\"node\" attr.name=\"{}\" attr.type=\"long\"/>\n", key++,
                           xml_escape(name));
    }
    const int weight_key = key;
    out << fmt::format("  <key id=\"d{}\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n", weight_key);
    out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << fmt::format("    <node id=\"{}\">\n", xml_escape(graph.node_ids[i]));
        int k = 0;
        for (const auto& [name, values] : graph.real_node_attributes) {
            out << fmt::format("      <data key=\"d{}\">{}</data>\n", k++, format_number(values[i], report_digits));
        }
        for (const auto& [name, values] : graph.int_node_attributes) {
            out << fmt::format("      <data key=\"d{}\">{}</data>\n", k++, values[i]);
        }
        out << "    </node>\n";
    }
    for (const auto& e : graph.edges) {
        if (e.source >= n || e.target >= n) throw ValidationError("graph edge references unknown node");
        out << fmt::format("    <edge source=\"{}\" target=\"{}\">\n", xml_escape(graph.node_ids[e.source]),
                           xml_escape(graph.node_ids[e.target]))
            << fmt::format("      <data key=\"d{}\">{}</data>\n", weight_key, format_number(e.weight, report_digits))
            << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

} // namespace coresp
