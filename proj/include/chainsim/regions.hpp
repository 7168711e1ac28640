#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "chainsim/errors.hpp"

namespace chainsim::net {

// One geographic pool of nodes. Bandwidths are megabytes per second (decimal,
// 1e6 bytes); the column names follow the dataset header. The numbers in the
// shipped dataset are replaceable inputs measured from public sources, not
// constants of the model.
struct Region {
    std::string id;
    double download_mbps = 0;
    double upload_mbps = 0;
    std::uint32_t node_count = 0;
    double mine_power_share = 0;
};

class RegionTable {
  public:
    std::size_t size() const { return regions_.size(); }
    const Region& at(std::size_t i) const { return regions_.at(i); }

    std::size_t index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw UnknownRegion("unknown region '" + id + "'");
        return it->second;
    }

    bool contains(const std::string& id) const { return index_.count(id) != 0; }

    void add(Region r) {
        if (contains(r.id))
            throw ConfigError("duplicate region '" + r.id + "'");
        index_.emplace(r.id, regions_.size());
        regions_.push_back(std::move(r));
    }

    auto begin() const { return regions_.begin(); }
    auto end() const { return regions_.end(); }

  private:
    std::vector<Region> regions_;
    std::unordered_map<std::string, std::size_t> index_;
};

// one-way latency in milliseconds, indexed by RegionTable positions;
// asymmetric values are allowed and used as given
class LatencyMatrix {
  public:
    LatencyMatrix() = default;
    explicit LatencyMatrix(std::size_t n) : n_(n), ms_(n * n, -1.0) {}

    void set(std::size_t from, std::size_t to, double ms) { ms_.at(from * n_ + to) = ms; }

    double ms(std::size_t from, std::size_t to) const {
        double v = ms_.at(from * n_ + to);
        if (v < 0) throw ConfigError("latency matrix entry missing");
        return v;
    }

    std::size_t size() const { return n_; }

  private:
    std::size_t n_ = 0;
    std::vector<double> ms_;
};

struct RegionDataset {
    RegionTable regions;
    LatencyMatrix latency;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        // trim surrounding whitespace
        const auto a = field.find_first_not_of(" \t\r");
        const auto b = field.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    return out;
}

inline double parse_num(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: '" + s + "'");
    }
}

} // namespace detail

// Dataset layout: a region table, a blank line, then a latency matrix whose
// header row is "latency_ms" followed by region ids. See data/regions9.csv.
inline RegionDataset load_regions(std::istream& in, const std::string& name) {
    RegionDataset ds;
    std::string line;
    std::size_t lineno = 0;
    auto where = [&] { return name + ":" + std::to_string(lineno); };

    // region table
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            if (saw_header) break; // blank separator before the matrix
            continue;
        }
        auto f = detail::split_csv(line);
        if (!saw_header) {
            if (f.size() != 5 || f[0] != "region_id")
                throw ConfigError(where() + ": expected header "
                                  "region_id,download_mbps,upload_mbps,node_count,mine_power_share");
            saw_header = true;
            continue;
        }
        if (f.size() != 5)
            throw ConfigError(where() + ": expected 5 fields, got " +
                              std::to_string(f.size()));
        Region r;
        r.id = f[0];
        r.download_mbps = detail::parse_num(f[1], where());
        r.upload_mbps = detail::parse_num(f[2], where());
        double nodes = detail::parse_num(f[3], where());
        r.mine_power_share = detail::parse_num(f[4], where());
        if (r.download_mbps <= 0 || r.upload_mbps <= 0)
            throw ConfigError(where() + ": region '" + r.id +
                              "' needs positive bandwidth");
        if (nodes < 0 || nodes != static_cast<std::uint32_t>(nodes))
            throw ConfigError(where() + ": node_count must be a non-negative integer");
        r.node_count = static_cast<std::uint32_t>(nodes);
        if (r.mine_power_share < 0)
            throw ConfigError(where() + ": mine_power_share must be >= 0");
        ds.regions.add(std::move(r));
    }
    if (ds.regions.size() == 0)
        throw ConfigError(name + ": no regions defined");

    double share_sum = 0;
    for (const auto& r : ds.regions) share_sum += r.mine_power_share;
    if (share_sum > 1.0 + 1e-9)
        throw ConfigError(name + ": mine_power_share sums to " +
                          std::to_string(share_sum) + ", must be <= 1");

    // latency matrix
    const std::size_t n = ds.regions.size();
    ds.latency = LatencyMatrix(n);
    std::vector<std::size_t> cols;
    bool saw_matrix_header = false;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = detail::split_csv(line);
        if (!saw_matrix_header) {
            if (f.empty() || f[0] != "latency_ms")
                throw ConfigError(where() + ": expected latency matrix header "
                                  "starting with latency_ms");
            for (std::size_t i = 1; i < f.size(); ++i)
                cols.push_back(ds.regions.index_of(f[i]));
            if (cols.size() != n)
                throw ConfigError(where() + ": latency header must list all " +
                                  std::to_string(n) + " regions");
            saw_matrix_header = true;
            continue;
        }
        if (f.size() != n + 1)
            throw ConfigError(where() + ": expected " + std::to_string(n + 1) +
                              " fields in latency row");
        const std::size_t from = ds.regions.index_of(f[0]);
        for (std::size_t i = 1; i < f.size(); ++i) {
            double ms = detail::parse_num(f[i], where());
            if (ms < 0)
                throw ConfigError(where() + ": latency must be >= 0");
            ds.latency.set(from, cols[i - 1], ms);
        }
        ++rows;
    }
    if (!saw_matrix_header || rows != n)
        throw ConfigError(name + ": latency matrix must have one row per region");
    return ds;
}

inline RegionDataset load_regions_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open regions file '" + path + "'");
    return load_regions(in, path);
}

} // namespace chainsim::net
