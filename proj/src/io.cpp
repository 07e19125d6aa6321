#include "hklab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hklab::io {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << content;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

double round_12sig(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string file_digest(const std::string& path) {
    const std::string data = read_text_file(path);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FiniteMetricSpace load_space(const std::string& path) {
    json j = json::parse(read_text_file(path));
    if (j.contains("coords")) {
        std::vector<Vec> coords;
        for (const auto& row : j.at("coords")) coords.push_back(row.get<Vec>());
        const std::string metric = j.value("metric", "euclidean");
        if (metric != "euclidean")
            throw std::invalid_argument("space file: unsupported metric '" + metric + "'");
        const double radius = j.value("neighbor_radius", 0.0);
        return make_euclidean_space(coords, radius);
    }
    if (!j.contains("dist") || !j.contains("neighbors"))
        throw std::invalid_argument("space file: needs dist+neighbors or coords");
    const auto& rows = j.at("dist");
    const int n = static_cast<int>(rows.size());
    Matrix dist(n, n);
    for (int i = 0; i < n; ++i) {
        const Vec row = rows[i].get<Vec>();
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("space file: dist matrix not square");
        for (int k = 0; k < n; ++k) dist(i, k) = row[k];
    }
    std::vector<std::vector<int>> neighbors;
    for (const auto& row : j.at("neighbors")) neighbors.push_back(row.get<std::vector<int>>());
    FiniteMetricSpace space(std::move(dist), std::move(neighbors), j.value("tol", 1e-12));
    if (j.contains("points") && j.at("points").size() != static_cast<size_t>(n))
        throw std::invalid_argument("space file: point labels do not match dist size");
    return space;
}

void save_space(const FiniteMetricSpace& space, const std::string& path,
                const std::string& manifest_ref) {
    json j;
    if (!manifest_ref.empty()) j["manifest_ref"] = manifest_ref;
    if (space.coords()) {
        json coords = json::array();
        for (const auto& c : *space.coords()) coords.push_back(c);
        j["coords"] = coords;
        j["metric"] = "euclidean";
        // nearest-neighbor radius that reproduces the stored graph
        double radius = 0.0;
        for (int i = 0; i < space.size(); ++i)
            for (int k : space.neighbors()[i]) radius = std::max(radius, space.dist(i, k));
        j["neighbor_radius"] = round_12sig(radius * (1.0 + 1e-9));
    } else {
        json dist = json::array();
        for (int i = 0; i < space.size(); ++i) {
            json row = json::array();
            for (int k = 0; k < space.size(); ++k) row.push_back(round_12sig(space.dist(i, k)));
            dist.push_back(row);
        }
        j["dist"] = dist;
        j["neighbors"] = space.neighbors();
        json points = json::array();
        for (int i = 0; i < space.size(); ++i) points.push_back("p" + std::to_string(i));
        j["points"] = points;
    }
    write_text_file(path, j.dump(2) + "\n");
}

DiscreteMeasure load_measure(const std::string& path) {
    std::istringstream in(read_text_file(path));
    Vec w;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        w.push_back(std::strtod(line.c_str(), nullptr));
    }
    if (w.empty()) throw std::invalid_argument("measure file is empty: " + path);
    return DiscreteMeasure(std::move(w));
}

void save_measure(const DiscreteMeasure& mu, const std::string& path,
                  const std::string& manifest_ref) {
    std::ostringstream out;
    if (!manifest_ref.empty()) out << "# manifest: " << manifest_ref << "\n";
    for (int i = 0; i < mu.size(); ++i) out << format_double(mu[i]) << "\n";
    write_text_file(path, out.str());
}

MarkovKernel load_kernel(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<Vec> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        Vec row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw std::invalid_argument("kernel file is empty: " + path);
    Matrix p(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::invalid_argument("kernel file: row " + std::to_string(i) +
                                        " has wrong length");
        for (int j = 0; j < n; ++j) p(i, j) = rows[i][j];
    }
    return MarkovKernel(std::move(p));
}

void save_kernel(const MarkovKernel& kernel, const std::string& path,
                 const std::string& manifest_ref) {
    std::ostringstream out;
    if (!manifest_ref.empty()) out << "# manifest: " << manifest_ref << "\n";
    for (int i = 0; i < kernel.size(); ++i) {
        for (int j = 0; j < kernel.size(); ++j) {
            if (j) out << ",";
            out << format_double(kernel(i, j));
        }
        out << "\n";
    }
    write_text_file(path, out.str());
}

void save_decay_series(const DecaySeries& series, const std::string& path,
                       const std::string& manifest_ref) {
    std::ostringstream out;
    if (!manifest_ref.empty()) out << "# manifest: " << manifest_ref << "\n";
    out << "time,value,stderr,envelope\n";
    for (size_t i = 0; i < series.times.size(); ++i)
        out << format_double(series.times[i]) << "," << format_double(series.values[i]) << ","
            << format_double(series.stderrs[i]) << "," << format_double(series.envelopes[i])
            << "\n";
    write_text_file(path, out.str());
}

DecaySeries load_decay_series(const std::string& path) {
    std::istringstream in(read_text_file(path));
    DecaySeries s;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        Vec row;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != 4) throw std::invalid_argument("decay series: bad row in " + path);
        s.times.push_back(row[0]);
        s.values.push_back(row[1]);
        s.stderrs.push_back(row[2]);
        s.envelopes.push_back(row[3]);
    }
    return s;
}

}  // namespace hklab::io
