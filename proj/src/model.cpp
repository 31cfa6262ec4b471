#include "pathlet/model.hpp"

#include "pathlet/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace pathlet {

RoadGraph::RoadGraph(std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i].id == edges[i - 1].id) {
            throw DuplicateEdge("edge_id " + std::to_string(edges[i].id) + " appears more than once");
        }
    }
    const bool any_geometry = std::any_of(edges.begin(), edges.end(),
                                          [](const Edge& e) { return !e.geometry.empty(); });
    if (any_geometry) {
        for (const Edge& e : edges) {
            if (e.geometry.size() < 2) {
                throw MissingGeometry("edge " + std::to_string(e.id) +
                                      " has no geometry while other edges do");
            }
        }
    }
    has_geometry_ = any_geometry;

    original_ids_.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].id < 0) {
            throw ParseError("negative edge_id " + std::to_string(edges[i].id));
        }
        original_ids_.push_back(edges[i].id);
        if (edges[i].id != static_cast<EdgeId>(i)) remapped_ = true;
        edges[i].id = static_cast<EdgeId>(i);
    }
    edges_ = std::move(edges);
}

const Edge& RoadGraph::edge(EdgeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= edges_.size()) {
        throw IndexOutOfRange("edge " + std::to_string(id) + " outside [0, " +
                              std::to_string(edges_.size()) + ")");
    }
    return edges_[static_cast<std::size_t>(id)];
}

EdgeId RoadGraph::dense_id(std::int64_t original) const {
    auto it = std::lower_bound(original_ids_.begin(), original_ids_.end(), original);
    if (it == original_ids_.end() || *it != original) {
        throw DanglingReference("unknown edge_id " + std::to_string(original));
    }
    return static_cast<EdgeId>(it - original_ids_.begin());
}

bool RoadGraph::contiguous(EdgeId a, EdgeId b) const {
    return edge(a).to_node == edge(b).from_node;
}

std::optional<std::size_t> RoadGraph::first_discontinuity(std::span<const EdgeId> seq) const {
    for (std::size_t i = 1; i < seq.size(); ++i) {
        if (!contiguous(seq[i - 1], seq[i])) return i;
    }
    return std::nullopt;
}

Point RoadGraph::midpoint(EdgeId id) const {
    const auto& g = edge(id).geometry;
    if (g.empty()) throw MissingGeometry("edge " + std::to_string(id) + " has no geometry");
    double total = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) total += std::hypot(g[i].x - g[i - 1].x, g[i].y - g[i - 1].y);
    if (total == 0.0) return g.front();
    double half = total / 2.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        double len = std::hypot(g[i].x - g[i - 1].x, g[i].y - g[i - 1].y);
        if (len >= half && len > 0.0) {
            double f = half / len;
            return {g[i - 1].x + f * (g[i].x - g[i - 1].x), g[i - 1].y + f * (g[i].y - g[i - 1].y)};
        }
        half -= len;
    }
    return g.back();
}

std::vector<Sequence> split_at_revisits(std::span<const Symbol> seq) {
    std::vector<Sequence> pieces;
    Sequence current;
    std::unordered_set<Symbol> seen;
    for (Symbol s : seq) {
        if (seen.count(s)) {
            pieces.push_back(std::move(current));
            current.clear();
            seen.clear();
        }
        current.push_back(s);
        seen.insert(s);
    }
    if (!current.empty()) pieces.push_back(std::move(current));
    return pieces;
}

std::vector<Sequence> edge_sequences(std::span<const Trajectory> trajs) {
    std::vector<Sequence> out;
    out.reserve(trajs.size());
    for (const auto& t : trajs) out.push_back(t.edges);
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t b = field.find_first_not_of(' ');
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

template <class T>
T parse_number(const std::string& s, std::size_t line_no, const std::string& column) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + column + " '" + s + "'");
    }
    return value;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

RoadGraph parse_graph_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> col;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto header = split_csv_line(line);
        for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
        break;
    }
    for (const char* required : {"edge_id", "from_node", "to_node"}) {
        if (!col.count(required)) throw ParseError(std::string("graph header lacks column ") + required);
    }
    const int geometry_cols = static_cast<int>(col.count("x1") + col.count("y1") + col.count("x2") + col.count("y2"));
    if (geometry_cols != 0 && geometry_cols != 4) {
        throw ParseError("graph header must name all of x1,y1,x2,y2 or none");
    }
    const bool with_geometry = geometry_cols == 4;

    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != col.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(col.size()) + " fields, got " + std::to_string(f.size()));
        }
        Edge e;
        auto id = parse_number<std::int64_t>(f[col["edge_id"]], line_no, "edge_id");
        if (id < 0 || id > INT32_MAX) throw ParseError("line " + std::to_string(line_no) + ": edge_id out of range");
        e.id = static_cast<EdgeId>(id);
        e.from_node = parse_number<NodeId>(f[col["from_node"]], line_no, "from_node");
        e.to_node = parse_number<NodeId>(f[col["to_node"]], line_no, "to_node");
        if (with_geometry) {
            e.geometry = {{parse_number<double>(f[col["x1"]], line_no, "x1"),
                           parse_number<double>(f[col["y1"]], line_no, "y1")},
                          {parse_number<double>(f[col["x2"]], line_no, "x2"),
                           parse_number<double>(f[col["y2"]], line_no, "y2")}};
        }
        edges.push_back(std::move(e));
    }
    return RoadGraph(std::move(edges));
}

RoadGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file " + path);
    return parse_graph_csv(in);
}

void write_graph_csv(std::ostream& out, const RoadGraph& graph) {
    out << "edge_id,from_node,to_node";
    if (graph.has_geometry()) out << ",x1,y1,x2,y2";
    out << '\n';
    for (const Edge& e : graph.edges()) {
        out << graph.original_id(e.id) << ',' << e.from_node << ',' << e.to_node;
        if (graph.has_geometry()) {
            const Point& a = e.geometry.front();
            const Point& b = e.geometry.back();
            out << ',' << format_double(a.x) << ',' << format_double(a.y) << ','
                << format_double(b.x) << ',' << format_double(b.y);
        }
        out << '\n';
    }
}

namespace {

std::optional<TimeOfDay> parse_departure(const nlohmann::json& j, std::size_t line_no) {
    auto it = j.find("departure");
    if (it == j.end()) return std::nullopt;
    if (!it->is_string()) throw ParseError("line " + std::to_string(line_no) + ": departure must be \"HH:MM\"");
    const std::string s = it->get<std::string>();
    auto colon = s.find(':');
    if (colon == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": departure must be \"HH:MM\"");
    TimeOfDay t;
    t.hours = parse_number<int>(s.substr(0, colon), line_no, "departure hours");
    t.minutes = parse_number<int>(s.substr(colon + 1), line_no, "departure minutes");
    if (t.hours < 0 || t.hours > 23 || t.minutes < 0 || t.minutes > 59) {
        throw ParseError("line " + std::to_string(line_no) + ": departure out of range");
    }
    return t;
}

}  // namespace

std::vector<Trajectory> parse_trajectories_jsonl(std::istream& in, const RoadGraph& graph,
                                                 TrajectoryLoadStats* stats) {
    std::vector<Trajectory> out;
    TrajectoryLoadStats local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++local.lines;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("traj_id") || !j.contains("edge_seq") ||
            !j["traj_id"].is_number_integer() || !j["edge_seq"].is_array()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected {\"traj_id\":int,\"edge_seq\":[int,...]}");
        }
        Sequence seq;
        for (const auto& v : j["edge_seq"]) {
            if (!v.is_number_integer()) throw ParseError("line " + std::to_string(line_no) + ": non-integer edge id");
            seq.push_back(graph.dense_id(v.get<std::int64_t>()));
        }
        if (auto bad = graph.first_discontinuity(seq)) {
            throw NonContiguous("line " + std::to_string(line_no) + ": edge_seq breaks at index " +
                                    std::to_string(*bad),
                                *bad);
        }
        const auto departure = parse_departure(j, line_no);
        auto pieces = split_at_revisits(seq);
        if (pieces.size() > 1) ++local.split_trajectories;
        int part = 0;
        for (auto& piece : pieces) {
            if (piece.empty()) continue;
            Trajectory t;
            t.traj_id = j["traj_id"].get<std::int64_t>();
            t.part = part++;
            t.edges = std::move(piece);
            t.departure = departure;
            out.push_back(std::move(t));
            ++local.pieces;
        }
    }
    if (stats) *stats = local;
    return out;
}

std::vector<Trajectory> load_trajectories(const std::string& path, const RoadGraph& graph,
                                          TrajectoryLoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory file " + path);
    return parse_trajectories_jsonl(in, graph, stats);
}

void write_trajectories_jsonl(std::ostream& out, std::span<const Trajectory> trajs,
                              const RoadGraph& graph) {
    for (const auto& t : trajs) {
        nlohmann::ordered_json j;
        j["traj_id"] = t.traj_id;
        if (t.part != 0) j["part"] = t.part;
        auto& seq = j["edge_seq"] = nlohmann::ordered_json::array();
        for (EdgeId e : t.edges) seq.push_back(graph.original_id(e));
        if (t.departure) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "%02d:%02d", t.departure->hours, t.departure->minutes);
            j["departure"] = buf;
        }
        out << j.dump() << '\n';
    }
}

}  // namespace pathlet
