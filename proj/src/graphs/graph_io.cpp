// Copyright 2026 The qgnn-tracking Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qgnn/csv.hpp"
#include "qgnn/graphs.hpp"

#include <fstream>
#include <string>

namespace qgnn::graphs {

namespace {
std::filesystem::path with_suffix(const std::filesystem::path &stem, const char *suffix) {
    return stem.string() + suffix;
}
} // namespace

void write_graph(const EventGraph &graph, const std::filesystem::path &stem) {
    using io::format_double;
    {
        const auto path = with_suffix(stem, "-nodes.csv");
        std::ofstream out(path);
        if (!out) {
            throw events::IngestError("cannot write " + path.string());
        }
        out << "# event_id=" << graph.event_id << '\n';
        out << "node,hit_id,r,phi,z,layer,particle_id\n";
        for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
            out << i << ',' << graph.hit_id[i] << ',' << format_double(graph.x[3 * i]) << ','
                << format_double(graph.x[3 * i + 1]) << ',' << format_double(graph.x[3 * i + 2])
                << ',' << graph.layer_index[i] << ',' << graph.particle_id[i] << '\n';
        }
    }
    {
        const auto path = with_suffix(stem, "-edges.csv");
        std::ofstream out(path);
        if (!out) {
            throw events::IngestError("cannot write " + path.string());
        }
        out << "edge,src,dst,y\n";
        for (std::size_t k = 0; k < graph.n_edges(); ++k) {
            out << k << ',' << graph.edges[k].src << ',' << graph.edges[k].dst << ','
                << static_cast<int>(graph.y[k]) << '\n';
        }
    }
}

EventGraph read_graph(const std::filesystem::path &stem) {
    EventGraph g;
    const auto nodes_path = with_suffix(stem, "-nodes.csv");
    {
        io::CsvReader csv(nodes_path);
        const std::string tag = " event_id=";
        if (csv.comments().empty() || csv.comments().front().rfind(tag, 0) != 0) {
            throw events::IngestError(nodes_path.string() + ": missing event_id comment");
        }
        g.event_id = std::stoll(csv.comments().front().substr(tag.size()));
        const auto c_node = csv.column("node");
        const auto c_hit = csv.column("hit_id");
        const auto c_r = csv.column("r");
        const auto c_phi = csv.column("phi");
        const auto c_z = csv.column("z");
        const auto c_layer = csv.column("layer");
        const auto c_pid = csv.column("particle_id");
        while (csv.next()) {
            if (static_cast<std::size_t>(csv.get_int(c_node)) != g.n_nodes()) {
                throw events::IngestError(nodes_path.string() + ": row " +
                                          std::to_string(csv.row_number()) + ": nodes out of order");
            }
            g.hit_id.push_back(csv.get_int(c_hit));
            g.x.insert(g.x.end(), {csv.get_double(c_r), csv.get_double(c_phi), csv.get_double(c_z)});
            g.layer_index.push_back(static_cast<int>(csv.get_int(c_layer)));
            g.particle_id.push_back(csv.get_int(c_pid));
        }
    }
    {
        const auto edges_path = with_suffix(stem, "-edges.csv");
        io::CsvReader csv(edges_path);
        const auto c_src = csv.column("src");
        const auto c_dst = csv.column("dst");
        const auto c_y = csv.column("y");
        while (csv.next()) {
            const auto src = csv.get_int(c_src);
            const auto dst = csv.get_int(c_dst);
            if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= g.n_nodes() ||
                static_cast<std::size_t>(dst) >= g.n_nodes()) {
                throw events::IngestError(edges_path.string() + ": row " +
                                          std::to_string(csv.row_number()) + ": node index out of range");
            }
            g.edges.push_back({static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst)});
            g.y.push_back(static_cast<std::uint8_t>(csv.get_int(c_y) != 0));
        }
    }
    rebuild_incidence(g);
    return g;
}

} // namespace qgnn::graphs
